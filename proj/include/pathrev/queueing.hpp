#pragma once

// Finite-source birth-death model of the waiting queue: state k counts the
// nodes queued for the token including the one in the CS, arrivals occur at
// rate (n - k) lambda and service at rate mu = 1 / sigma.
//
// Every function is templated on the scalar: Rational for exact identity
// checks, double for large n and asymptotics.

#include "pathrev/protocol.hpp"
#include "pathrev/rational.hpp"
#include "pathrev/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace pathrev {

template <typename T>
struct QueueModel {
    std::size_t n = 1;
    T lambda;
    T sigma;
    T delta;

    [[nodiscard]] T mu() const { return T(1) / sigma; }
    [[nodiscard]] T rho() const { return T(lambda * sigma); }

    void validate() const
    {
        if (n == 0 || !(lambda > 0) || !(sigma > 0) || !(delta > 0)) {
            throw std::invalid_argument("QueueModel: n, lambda, sigma and delta must be positive");
        }
    }
};

template <typename T>
struct StateDistribution {
    std::vector<T> probs; // P_0 .. P_n
    T nbar;               // sum k P_k
};

namespace detail {

template <typename T>
T checked_delta_zero_ok(const QueueModel<T>& m)
{
    if (m.n == 0 || !(m.lambda > 0) || !(m.sigma > 0) || m.delta < 0) {
        throw std::invalid_argument("QueueModel: n, lambda, sigma must be positive and delta non-negative");
    }
    return m.rho();
}

} // namespace detail

/// P_k = n^{(k)} rho^k P_0 with n^{(k)} the falling factorial, normalized.
template <typename T>
StateDistribution<T> state_probabilities(const QueueModel<T>& m)
{
    const T rho = detail::checked_delta_zero_ok(m);
    const std::size_t n = m.n;
    StateDistribution<T> out;
    out.probs.resize(n + 1);
    if constexpr (std::is_floating_point_v<T>) {
        // log-weights keep n! rho^n finite
        std::vector<T> lw(n + 1);
        lw[0] = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            lw[k] = lw[k - 1] + std::log(static_cast<T>(n - k + 1) * rho);
        }
        const T top = *std::max_element(lw.begin(), lw.end());
        T z = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            out.probs[k] = std::exp(lw[k] - top);
            z += out.probs[k];
        }
        for (auto& p : out.probs) {
            p /= z;
        }
    } else {
        T w(1);
        T z(0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k > 0) {
                w = w * T(static_cast<unsigned long>(n - k + 1)) * rho;
            }
            out.probs[k] = w;
            z += w;
        }
        for (auto& p : out.probs) {
            p = p / z;
        }
    }
    out.nbar = T(0);
    for (std::size_t k = 1; k <= n; ++k) {
        out.nbar += out.probs[k] * T(static_cast<unsigned long>(k));
    }
    return out;
}

/// w_0 = 2 delta; w_k = (k - 1)(sigma + delta) + sigma / 2 for 1 <= k <= n - 1.
template <typename T>
T waiting_time_k(const QueueModel<T>& m, std::size_t k)
{
    if (k >= m.n) {
        throw std::out_of_range("waiting_time_k: k = " + std::to_string(k) + " outside [0, " +
                                std::to_string(m.n - 1) + "]");
    }
    if (k == 0) {
        return T(2 * m.delta);
    }
    return T(T(static_cast<unsigned long>(k - 1)) * (m.sigma + m.delta) + m.sigma / 2);
}

/// Closed form (sigma + delta)(nbar - n P_n) - (delta + sigma/2)(1 - P_0 - P_n) + 2 delta P_0.
template <typename T>
T expected_waiting(const QueueModel<T>& m)
{
    const auto d = state_probabilities(m);
    const T p0 = d.probs.front();
    const T pn = d.probs.back();
    const T nn(static_cast<unsigned long>(m.n));
    return T((m.sigma + m.delta) * (d.nbar - nn * pn) - (m.delta + m.sigma / 2) * (T(1) - p0 - pn) +
             2 * m.delta * p0);
}

/// sum_{k=0}^{n-1} w_k P_k.
template <typename T>
T expected_waiting_direct(const QueueModel<T>& m)
{
    const auto d = state_probabilities(m);
    T acc(0);
    for (std::size_t k = 0; k < m.n; ++k) {
        acc += waiting_time_k(m, k) * d.probs[k];
    }
    return acc;
}

/// (n - 1)(sigma + delta) + sigma / 2. At n = 1 this is just sigma / 2, the
/// formula's value, although a lone node never waits behind anyone.
template <typename T>
T worst_case_waiting(const QueueModel<T>& m)
{
    return T(T(static_cast<unsigned long>(m.n - 1)) * (m.sigma + m.delta) + m.sigma / 2);
}

struct AsymptoticBound {
    double bound;  // (sigma+delta) n (1 - 2e^{-1/rho}) - (delta + sigma/2)(1 - e^{-1/rho})
    double o_term; // (sigma/2 + 3 delta) e^{-1/rho} rho^{-n} / n!
};

/// Large-n upper bound on the expected waiting time, valid only for rho < 1.
inline AsymptoticBound asymptotic_waiting_bound(const QueueModel<double>& m)
{
    const double rho = m.rho();
    if (!(rho < 1.0)) {
        throw std::domain_error("asymptotic_waiting_bound: needs rho < 1");
    }
    const double e = std::exp(-1.0 / rho);
    const double n = static_cast<double>(m.n);
    AsymptoticBound b;
    b.bound = (m.sigma + m.delta) * n * (1.0 - 2.0 * e) - (m.delta + m.sigma / 2.0) * (1.0 - e);
    b.o_term = std::exp(std::log(m.sigma / 2.0 + 3.0 * m.delta) - 1.0 / rho - n * std::log(rho) - std::lgamma(n + 1.0));
    return b;
}

struct SimComparison {
    double analytic = 0.0;
    double empirical = 0.0;
    double std_error = 0.0; // batch means
    double relative_error = 0.0;
    double z_score = 0.0;
    std::size_t samples = 0;

    [[nodiscard]] bool within(double k_se) const { return std::abs(empirical - analytic) <= k_se * std_error; }
};

/// Empirical mean wait of a Poisson, constant-delay run against the closed form.
inline SimComparison compare_with_simulation(const QueueModel<double>& m, const SimReport& sim,
                                             std::size_t batches = 30)
{
    const auto& c = sim.config;
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    if (c.mode != SimMode::kPoisson || !c.delay.is_constant() || c.graph) {
        throw std::invalid_argument("compare_with_simulation: needs a Poisson run on a complete network with constant delay");
    }
    if (c.n != m.n || !same(c.lambda, m.lambda) || !same(c.sigma, m.sigma) || !same(c.delay.min, m.delta)) {
        throw std::invalid_argument("compare_with_simulation: model and simulation parameters differ");
    }
    const auto waits = sim.waits();
    SimComparison out;
    out.analytic = expected_waiting(m);
    out.samples = waits.size();
    out.empirical = summarize(waits).mean;
    out.std_error = batch_means_std_error(waits, batches);
    out.relative_error = out.analytic != 0.0 ? (out.empirical - out.analytic) / out.analytic : 0.0;
    out.z_score = out.std_error > 0.0 ? (out.empirical - out.analytic) / out.std_error : 0.0;
    return out;
}

} // namespace pathrev
