#pragma once

// Canned experiments shared by `pathrev reproduce` and the acceptance run.

#include "pathrev/analysis.hpp"
#include "pathrev/graph.hpp"
#include "pathrev/protocol.hpp"
#include "pathrev/queueing.hpp"
#include "pathrev/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pathrev {

struct MessageComplexityResult {
    std::size_t n = 0;
    std::size_t requests = 0;
    std::uint64_t seed = 0;
    double mean_messages = 0.0; // Request + Token per CS entry
    double std_error = 0.0;     // batch means
    double expected = 0.0;      // H_{n-1}
    double z_score = 0.0;
    double forwarded_mean = 0.0; // Request messages only
    double forwarded_std_error = 0.0;
    double forwarded_expected = 0.0; // H_{n-1} - (n-1)/n under uniform requesters
    bool safe = true;
    std::size_t ungranted = 0;
    bool shadow_ok = true;

    [[nodiscard]] bool within(double k_se) const { return std::abs(mean_messages - expected) <= k_se * std_error; }
};

/// Sequential requests by uniformly chosen nodes (the holder included) on a
/// complete network.
inline MessageComplexityResult message_complexity_experiment(std::size_t n, std::size_t requests, std::uint64_t seed)
{
    if (n < 2) {
        throw std::invalid_argument("message_complexity_experiment: n must be at least 2");
    }
    SimConfig c;
    c.n = n;
    c.mode = SimMode::kSequential;
    c.lambda = 1.0;
    c.sigma = 1.0;
    c.delay = DelayModel::constant(0.1);
    c.max_requests = requests;
    c.seed = seed;
    const auto rep = run_simulation(c);

    MessageComplexityResult out;
    out.n = n;
    out.requests = rep.requests.size();
    out.seed = seed;
    const auto total = rep.message_counts();
    const auto fwd = rep.request_message_counts();
    out.mean_messages = summarize(total).mean;
    out.std_error = batch_means_std_error(total);
    const auto hp = harmonic(n - 1);
    out.expected = to_double(hp.h);
    out.z_score = out.std_error > 0 ? (out.mean_messages - out.expected) / out.std_error : 0.0;
    out.forwarded_mean = summarize(fwd).mean;
    out.forwarded_std_error = batch_means_std_error(fwd);
    out.forwarded_expected = to_double(hp.h - Rational(static_cast<unsigned long>(n - 1), static_cast<unsigned long>(n)));
    out.safe = rep.safe();
    out.ungranted = rep.ungranted;
    out.shadow_ok = shadow_tree_check(rep).ok;
    return out;
}

struct WaitingResult {
    QueueModel<double> model;
    SimComparison comparison;
    double worst_case = 0.0;
    std::optional<AsymptoticBound> bound; // rho < 1 only
    bool safe = true;
    std::size_t ungranted = 0;
};

/// Poisson run with constant delay against the birth-death model.
inline WaitingResult waiting_time_experiment(const QueueModel<double>& m, std::size_t requests, std::uint64_t seed)
{
    m.validate();
    SimConfig c;
    c.n = m.n;
    c.mode = SimMode::kPoisson;
    c.lambda = m.lambda;
    c.sigma = m.sigma;
    c.delay = DelayModel::constant(m.delta);
    c.max_requests = requests;
    c.seed = seed;
    const auto rep = run_simulation(c);
    WaitingResult out;
    out.model = m;
    out.comparison = compare_with_simulation(m, rep);
    out.worst_case = worst_case_waiting(m);
    if (m.rho() < 1.0) {
        out.bound = asymptotic_waiting_bound(m);
    }
    out.safe = rep.safe();
    out.ungranted = rep.ungranted;
    return out;
}

struct HopBoundRow {
    std::string kind; // "sparse" or "regular"
    std::size_t n = 0;
    std::size_t runs = 0;
    std::size_t requests = 0;
    std::uint32_t min_diameter = 0;
    std::uint32_t max_diameter = 0;
    std::uint64_t max_hops = 0;
    double mean_hops = 0.0;
    std::size_t violations = 0; // requests with hops > 2D of their graph
    std::uint64_t max_excess = 0; // largest hops - 2D seen
};

struct HopBoundResult {
    std::vector<HopBoundRow> rows;
    std::size_t runs = 0;
    std::size_t requests = 0;
    std::size_t violations = 0;
    double log_fit_c = 0.0;   // least-squares c in max_hops ~ c ln n
    double log_log_slope = 0.0; // slope of ln(max_hops) against ln n
};

struct HopBoundSetup {
    std::vector<std::size_t> sizes{64, 128, 256};
    std::size_t runs_per_cell = 17;    // per (kind, n)
    std::size_t requests_per_run = 2000;
    std::size_t sparse_degree = 8;     // M = n * degree / 2; lower averages rarely connect at n <= 256
    std::size_t regular_degree = 3;
    std::uint64_t seed = 1;
};

/// Sequential requests on random sparse and regular graphs; every logical
/// message travels a shortest path and each edge counts once.
inline HopBoundResult hop_bound_experiment(const HopBoundSetup& s)
{
    HopBoundResult out;
    std::uint64_t run_seed = s.seed;
    for (const std::string kind : {"sparse", "regular"}) {
        for (std::size_t n : s.sizes) {
            HopBoundRow row;
            row.kind = kind;
            row.n = n;
            row.min_diameter = std::numeric_limits<std::uint32_t>::max();
            double hop_sum = 0.0;
            for (std::size_t r = 0; r < s.runs_per_cell; ++r, ++run_seed) {
                const auto spec = kind == "sparse" ? TopologySpec::sparse(n, n * s.sparse_degree / 2)
                                                   : TopologySpec::regular(n, s.regular_degree);
                SimConfig c;
                c.n = n;
                c.graph = generate_topology(spec, run_seed);
                c.mode = SimMode::kSequential;
                c.delay = DelayModel::constant(0.1);
                c.max_requests = s.requests_per_run;
                c.seed = run_seed;
                const auto rep = run_arbitrary_network(c);
                const std::uint64_t two_d = 2ull * rep.diameter;
                row.min_diameter = std::min(row.min_diameter, rep.diameter);
                row.max_diameter = std::max(row.max_diameter, rep.diameter);
                row.max_hops = std::max(row.max_hops, rep.max_hop_messages);
                row.violations += rep.lemma_violations;
                for (const auto& q : rep.requests) {
                    hop_sum += static_cast<double>(q.hop_messages);
                    if (q.hop_messages > two_d) {
                        row.max_excess = std::max(row.max_excess, q.hop_messages - two_d);
                    }
                }
                row.requests += rep.requests.size();
                ++row.runs;
            }
            row.mean_hops = row.requests ? hop_sum / static_cast<double>(row.requests) : 0.0;
            out.runs += row.runs;
            out.requests += row.requests;
            out.violations += row.violations;
            out.rows.push_back(row);
        }
    }
    // fit over per-size maxima (both kinds pooled)
    double sxy = 0.0, sxx = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n : s.sizes) {
        std::uint64_t worst = 0;
        for (const auto& row : out.rows) {
            if (row.n == n) {
                worst = std::max(worst, row.max_hops);
            }
        }
        const double ln = std::log(static_cast<double>(n));
        sxy += static_cast<double>(worst) * ln;
        sxx += ln * ln;
        if (worst > 0) {
            pts.emplace_back(ln, std::log(static_cast<double>(worst)));
        }
    }
    out.log_fit_c = sxx > 0 ? sxy / sxx : 0.0;
    if (pts.size() >= 2) {
        double mx = 0, my = 0;
        for (auto [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
        double num = 0, den = 0;
        for (auto [x, y] : pts) {
            num += (x - mx) * (y - my);
            den += (x - mx) * (x - mx);
        }
        out.log_log_slope = den > 0 ? num / den : 0.0;
    }
    return out;
}

} // namespace pathrev
