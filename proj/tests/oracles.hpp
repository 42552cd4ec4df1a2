#pragma once

// Brute-force oracles used only by the tests. None of these call into the
// code paths they are used to check.

#include "pathrev/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pathrev::oracle {

inline std::size_t cycle_count(const std::vector<int>& perm)
{
    std::vector<char> seen(perm.size(), 0);
    std::size_t cycles = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (!seen[i]) {
            ++cycles;
            for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
                seen[j] = 1;
            }
        }
    }
    return cycles;
}

/// Law of the number of cycles of a uniform permutation of [m], by full
/// enumeration. For m = n - 1 this is the reversal-cost law on T_n.
inline std::vector<Rational> cycle_law(std::size_t m)
{
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::uint64_t> counts(m + 1, 0);
    std::uint64_t total = 0;
    do {
        ++counts[cycle_count(p)];
        ++total;
    } while (std::next_permutation(p.begin(), p.end()));
    std::vector<Rational> law;
    for (auto c : counts) {
        Rational r(BigInt(static_cast<unsigned long>(c)), BigInt(static_cast<unsigned long>(total)));
        r.canonicalize();
        law.push_back(r);
    }
    while (law.size() > 1 && sgn(law.back()) == 0) {
        law.pop_back();
    }
    return law;
}

inline Rational law_mean(const std::vector<Rational>& law)
{
    Rational m(0);
    for (std::size_t k = 0; k < law.size(); ++k) {
        m += law[k] * static_cast<unsigned long>(k);
    }
    return m;
}

inline Rational law_variance(const std::vector<Rational>& law)
{
    const Rational m = law_mean(law);
    Rational v(0);
    for (std::size_t k = 0; k < law.size(); ++k) {
        const Rational d = Rational(static_cast<unsigned long>(k)) - m;
        v += law[k] * d * d;
    }
    return v;
}

/// All binary tournament trees on labels {lo..hi} as canonical strings
/// `(<label> <left> <right>)`, built by choosing the label set of the left
/// subtree. Independent of the sequence-splitting construction.
inline std::vector<std::string> tournaments_on(const std::vector<int>& labels)
{
    if (labels.empty()) {
        return {"."};
    }
    const int root = labels.front(); // labels are sorted; minimum is the root
    std::vector<int> rest(labels.begin() + 1, labels.end());
    std::vector<std::string> out;
    const std::size_t m = rest.size();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> l, r;
        for (std::size_t i = 0; i < m; ++i) {
            ((mask >> i) & 1u ? l : r).push_back(rest[i]);
        }
        for (const auto& ls : tournaments_on(l)) {
            for (const auto& rs : tournaments_on(r)) {
                out.push_back("(" + std::to_string(root) + " " + ls + " " + rs + ")");
            }
        }
    }
    return out;
}

/// Reverses the path at x on a plain parent array (-1 marks the root).
inline std::size_t reverse_at(std::vector<int>& parent, int x)
{
    std::vector<int> path;
    for (int y = parent[x]; y != -1; y = parent[y]) {
        path.push_back(y);
    }
    for (int y : path) {
        parent[y] = x;
    }
    parent[x] = -1;
    return path.size();
}

/// Exact long-run mean reversal cost when each step reverses at a uniformly
/// chosen node, starting from the star. Solves pi P = pi over every reachable
/// tree with Gaussian elimination in rationals. Small n only.
inline Rational stationary_mean_cost(int n)
{
    std::map<std::vector<int>, std::size_t> index;
    std::vector<std::vector<int>> states;
    std::vector<int> start(static_cast<std::size_t>(n), 0);
    start[0] = -1;
    index[start] = 0;
    states.push_back(start);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> moves; // (target, cost)
    for (std::size_t i = 0; i < states.size(); ++i) {
        std::vector<std::pair<std::size_t, std::size_t>> row;
        for (int x = 0; x < n; ++x) {
            auto next = states[i];
            const auto cost = reverse_at(next, x);
            auto [it, fresh] = index.emplace(next, states.size());
            if (fresh) {
                states.push_back(next);
            }
            row.emplace_back(it->second, cost);
        }
        moves.push_back(std::move(row));
    }
    const std::size_t s = states.size();
    // (P^T - I) pi = 0 with the last equation replaced by sum pi = 1.
    std::vector<std::vector<Rational>> a(s, std::vector<Rational>(s + 1, Rational(0)));
    const Rational step(1, static_cast<unsigned long>(n));
    for (std::size_t i = 0; i < s; ++i) {
        for (auto [j, c] : moves[i]) {
            a[j][i] += step;
        }
        a[i][i] -= 1;
    }
    for (std::size_t i = 0; i < s; ++i) {
        a[s - 1][i] = 1;
    }
    a[s - 1][s] = 1;
    for (std::size_t col = 0; col < s; ++col) {
        std::size_t piv = col;
        while (sgn(a[piv][col]) == 0) {
            ++piv;
        }
        std::swap(a[piv], a[col]);
        const Rational inv = Rational(1) / a[col][col];
        for (auto& v : a[col]) {
            v *= inv;
        }
        for (std::size_t r = 0; r < s; ++r) {
            if (r != col && sgn(a[r][col]) != 0) {
                const Rational f = a[r][col];
                for (std::size_t c = col; c <= s; ++c) {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Rational mean(0);
    for (std::size_t i = 0; i < s; ++i) {
        Rational row(0);
        for (auto [j, c] : moves[i]) {
            row += Rational(static_cast<unsigned long>(c));
        }
        mean += a[i][s] * row * step;
    }
    return mean;
}

} // namespace pathrev::oracle
