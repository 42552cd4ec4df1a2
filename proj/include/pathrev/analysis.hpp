#pragma once

// Exact law of the path-reversal cost on the n-node star, its generating
// function, moments and the cross-checks around them. Everything here is
// exact rational arithmetic except asymptotic_moments() and the Monte Carlo
// normality diagnostic.

#include "pathrev/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathrev {

/// How P_1 is read. The product form has P_1(z) = 1 (empty product, matching
/// p_{1,0} = 1); the literal generating-function recurrence starts from
/// P_1(z) = z. Both agree for every n >= 2, so the flag only affects n = 1.
enum class BoundaryConvention { kProductForm, kEq2Literal };

/// Exact distribution {p_{n,k}} of the reversal cost on T_n.
struct CostDistribution {
    std::size_t n = 0;
    std::vector<Rational> probs; // probs[k] = Pr{cost = k}

    [[nodiscard]] Polynomial<Rational> pgf() const { return Polynomial<Rational>(probs); }

    [[nodiscard]] Rational total() const
    {
        return std::accumulate(probs.begin(), probs.end(), Rational(0));
    }

    [[nodiscard]] Rational mean() const
    {
        Rational m(0);
        for (std::size_t k = 1; k < probs.size(); ++k) {
            m += probs[k] * static_cast<unsigned long>(k);
        }
        return m;
    }

    /// Non-negative, sums to one, and no mass at zero once n >= 2.
    [[nodiscard]] bool valid() const
    {
        for (const auto& p : probs) {
            if (sgn(p) < 0) {
                return false;
            }
        }
        if (n >= 2 && !probs.empty() && sgn(probs[0]) != 0) {
            return false;
        }
        return total() == 1;
    }

    friend bool operator==(const CostDistribution& a, const CostDistribution& b)
    {
        if (a.n != b.n) {
            return false;
        }
        const std::size_t len = std::max(a.probs.size(), b.probs.size());
        for (std::size_t k = 0; k < len; ++k) {
            const Rational pa = k < a.probs.size() ? a.probs[k] : Rational(0);
            const Rational pb = k < b.probs.size() ? b.probs[k] : Rational(0);
            if (pa != pb) {
                return false;
            }
        }
        return true;
    }
};

namespace detail {

inline void require_positive(std::size_t n, const char* what)
{
    if (n == 0) {
        throw std::invalid_argument(std::string(what) + ": n must be positive");
    }
}

inline void trim_trailing_zeros(std::vector<Rational>& v)
{
    while (v.size() > 1 && sgn(v.back()) == 0) {
        v.pop_back();
    }
}

} // namespace detail

/// p_{n,k} = (1 - 1/(n-1)) p_{n-1,k} + (1/(n-1)) p_{n-1,k-1}, from p_{1,0} = 1.
inline CostDistribution cost_distribution_recurrence(std::size_t n)
{
    detail::require_positive(n, "cost_distribution_recurrence");
    std::vector<Rational> p{Rational(1)};
    for (std::size_t m = 2; m <= n; ++m) {
        const Rational jump(1, static_cast<unsigned long>(m - 1));
        const Rational stay = Rational(1) - jump;
        std::vector<Rational> next(p.size() + 1, Rational(0));
        for (std::size_t k = 0; k < next.size(); ++k) {
            if (k < p.size()) {
                next[k] += stay * p[k];
            }
            if (k >= 1) {
                next[k] += jump * p[k - 1];
            }
        }
        p = std::move(next);
    }
    detail::trim_trailing_zeros(p);
    return CostDistribution{n, std::move(p)};
}

/// Expands prod_{j=1}^{n-1} (z + j - 1) / j.
inline CostDistribution cost_distribution_pgf(std::size_t n,
                                              BoundaryConvention conv = BoundaryConvention::kProductForm)
{
    detail::require_positive(n, "cost_distribution_pgf");
    if (n == 1 && conv == BoundaryConvention::kEq2Literal) {
        return CostDistribution{1, {Rational(0), Rational(1)}};
    }
    Polynomial<Rational> poly(std::vector<Rational>{Rational(1)});
    for (std::size_t j = 1; j < n; ++j) {
        const Rational inv(1, static_cast<unsigned long>(j));
        poly.mul_linear(Rational(static_cast<unsigned long>(j - 1)) * inv, inv);
    }
    auto coeffs = poly.coefficients();
    detail::trim_trailing_zeros(coeffs);
    return CostDistribution{n, std::move(coeffs)};
}

struct Moments {
    Rational mean;
    Rational variance;

    friend bool operator==(const Moments&, const Moments&) = default;
};

/// Mean H_{n-1} and variance H_{n-1} - H^{(2)}_{n-1}.
inline Moments moments_from_harmonic(std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("moments: n must be at least 2");
    }
    const auto hp = harmonic(n - 1);
    return Moments{hp.h, hp.h - hp.h2};
}

/// Mean P'(1) and variance P''(1) + P'(1) - P'(1)^2 of the expanded generating function.
inline Moments moments_from_pgf(std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("moments: n must be at least 2");
    }
    const auto pgf = cost_distribution_pgf(n).pgf();
    const auto d1 = pgf.derivative();
    const Rational p1 = d1.eval(Rational(1));
    const Rational p2 = d1.derivative().eval(Rational(1));
    return Moments{p1, p2 + p1 - p1 * p1};
}

/// Both routes, which must agree exactly; a mismatch is a logic error.
inline Moments moments(std::size_t n)
{
    auto closed = moments_from_harmonic(n);
    const auto derived = moments_from_pgf(n);
    if (!(closed == derived)) {
        throw std::logic_error("moments: harmonic and generating-function routes disagree at n = " +
                               std::to_string(n));
    }
    return closed;
}

/// Moments for every n in [2, max_n], both routes, built incrementally.
///
/// The generating-function side keeps the integer polynomial
/// prod_{j<n} (z + j - 1) (unsigned Stirling cycle numbers) and divides by
/// (n-1)! only when reading off derivatives, which keeps n ~ 10^3 cheap.
struct MomentsRow {
    std::size_t n;
    Moments harmonic_route;
    Moments pgf_route;
};

inline std::vector<MomentsRow> moments_table(std::size_t max_n)
{
    std::vector<MomentsRow> rows;
    if (max_n < 2) {
        return rows;
    }
    std::vector<BigInt> c{BigInt(1)}; // coefficients of prod (z + j - 1)
    BigInt fact(1);
    Rational h(0), h2(0);
    for (std::size_t n = 2; n <= max_n; ++n) {
        const unsigned long j = n - 1;
        // multiply by (z + j - 1)
        c.emplace_back(0);
        for (std::size_t k = c.size() - 1; k > 0; --k) {
            c[k] = c[k] * (j - 1) + c[k - 1];
        }
        c[0] *= (j - 1);
        fact *= j;
        h += Rational(BigInt(1), BigInt(j));
        h2 += Rational(BigInt(1), BigInt(j) * BigInt(j));

        BigInt s1(0), s2(0);
        for (std::size_t k = 1; k < c.size(); ++k) {
            s1 += c[k] * static_cast<unsigned long>(k);
            s2 += c[k] * static_cast<unsigned long>(k * (k - 1));
        }
        Rational p1(s1, fact), p2(s2, fact);
        p1.canonicalize();
        p2.canonicalize();
        rows.push_back(MomentsRow{n, Moments{h, h - h2}, Moments{p1, p2 + p1 - p1 * p1}});
    }
    return rows;
}

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPiSquaredOver6 = std::numbers::pi * std::numbers::pi / 6.0;
/// gamma - pi^2/6 = -1.0677...
inline constexpr double kVarianceOffset = kEulerGamma - kPiSquaredOver6;

struct AsymptoticMoments {
    double mean_approx;
    double var_approx;
};

/// ln n + gamma and ln n + gamma - pi^2/6.
inline AsymptoticMoments asymptotic_moments(std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("asymptotic_moments: n must be at least 2");
    }
    const double ln = std::log(static_cast<double>(n));
    return {ln + kEulerGamma, ln + kVarianceOffset};
}

/// Mean cost through the recurrence C_{k+1} = C_k + 1/k, C_1 = 0.
inline Rational appendix_recurrence_mean(std::size_t n)
{
    detail::require_positive(n, "appendix_recurrence_mean");
    Rational c(0);
    for (std::size_t k = 1; k < n; ++k) {
        c += Rational(1, static_cast<unsigned long>(k));
    }
    return c;
}

/// Same quantity through the averaging form
/// C_{k+1} = (1/k) * sum_{i<=k} (C_i + 1).
inline Rational appendix_averaging_mean(std::size_t n)
{
    detail::require_positive(n, "appendix_averaging_mean");
    Rational c(0);   // C_1
    Rational sum(0); // sum of (C_i + 1), i <= k
    for (std::size_t k = 1; k < n; ++k) {
        sum += c + 1;
        c = sum / Rational(static_cast<unsigned long>(k));
    }
    return c;
}

struct StirlingCheck {
    std::size_t n;
    std::uint64_t count;   // permutations of [n] with exactly two cycles
    Rational expected;     // (n-1)! * H_{n-1}
    bool ok;
};

/// Counts permutations of [n] with exactly 2 cycles and compares to (n-1)! H_{n-1}.
inline StirlingCheck stirling_cycle_check(std::size_t n, std::size_t limit = 8)
{
    detail::require_positive(n, "stirling_cycle_check");
    if (n > limit) {
        throw std::invalid_argument("stirling_cycle_check: n = " + std::to_string(n) +
                                    " exceeds enumeration limit " + std::to_string(limit));
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<char> seen(n);
    std::uint64_t count = 0;
    do {
        std::fill(seen.begin(), seen.end(), 0);
        std::size_t cycles = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (seen[i]) {
                continue;
            }
            ++cycles;
            for (std::size_t j = i; !seen[j]; j = perm[j]) {
                seen[j] = 1;
            }
        }
        if (cycles == 2) {
            ++count;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    BigInt fact(1);
    for (std::size_t i = 2; i < n; ++i) {
        fact *= static_cast<unsigned long>(i);
    }
    const Rational expected = Rational(fact) * harmonic(n - 1).h;
    return StirlingCheck{n, count, expected, expected == Rational(BigInt(count))};
}

/// Skewness of the exact cost law, third central moment over var^{3/2}.
inline double exact_skewness(std::size_t n)
{
    const auto dist = cost_distribution_pgf(n);
    const Rational m = dist.mean();
    Rational m2(0), m3(0);
    for (std::size_t k = 0; k < dist.probs.size(); ++k) {
        const Rational d = Rational(static_cast<unsigned long>(k)) - m;
        m2 += dist.probs[k] * d * d;
        m3 += dist.probs[k] * d * d * d;
    }
    if (sgn(m2) == 0) {
        return 0.0;
    }
    return to_double(m3) / std::pow(to_double(m2), 1.5);
}

struct NormalityDiagnostic {
    double standardized_mean;
    double standardized_var;
};

/// Samples costs from the exact law (inverse CDF, exact cumulative sums
/// converted to double at the end) and standardizes with the exact moments.
inline NormalityDiagnostic normality_diagnostic(std::size_t n, std::size_t samples, std::uint64_t seed)
{
    if (n < 10 || samples < 1000) {
        throw std::invalid_argument("normality_diagnostic: needs n >= 10 and samples >= 1000");
    }
    const auto dist = cost_distribution_pgf(n);
    std::vector<double> cdf;
    cdf.reserve(dist.probs.size());
    Rational acc(0);
    for (const auto& p : dist.probs) {
        acc += p;
        cdf.push_back(to_double(acc));
    }
    cdf.back() = 1.0;

    const auto mom = moments_from_harmonic(n);
    const double mean = to_double(mom.mean);
    const double sd = std::sqrt(to_double(mom.variance));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double u = unif(rng);
        const auto k = static_cast<double>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const double z = (k - mean) / sd;
        sum += z;
        sum_sq += z * z;
    }
    const double s = static_cast<double>(samples);
    const double zbar = sum / s;
    return {zbar, (sum_sq - s * zbar * zbar) / (s - 1.0)};
}

} // namespace pathrev
