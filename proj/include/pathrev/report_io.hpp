#pragma once

// JSON / CSV renderings shared by the CLI and the tests. Field order is fixed
// (ordered_json) so identical inputs always serialize byte-identically.

#include "pathrev/analysis.hpp"
#include "pathrev/protocol.hpp"
#include "pathrev/queueing.hpp"
#include "pathrev/stats.hpp"

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <string>

namespace pathrev {

using ordered_json = nlohmann::ordered_json;

inline const char* to_string(SimMode m) { return m == SimMode::kSequential ? "sequential" : "poisson"; }

inline ordered_json to_json(const CostDistribution& d)
{
    ordered_json probs = ordered_json::array();
    for (std::size_t k = 0; k < d.probs.size(); ++k) {
        if (sgn(d.probs[k]) != 0) {
            probs.push_back({{"k", k}, {"p", to_string(d.probs[k])}, {"p_float", to_double(d.probs[k])}});
        }
    }
    return {{"n", d.n}, {"probs", probs}};
}

/// `n,k,p_num,p_den` rows, header first, zero-probability rows omitted.
inline std::string to_csv(const CostDistribution& d, bool header = true)
{
    std::ostringstream os;
    if (header) {
        os << "n,k,p_num,p_den\n";
    }
    for (std::size_t k = 0; k < d.probs.size(); ++k) {
        if (sgn(d.probs[k]) != 0) {
            os << d.n << ',' << k << ',' << d.probs[k].get_num().get_str() << ',' << d.probs[k].get_den().get_str()
               << '\n';
        }
    }
    return os.str();
}

inline ordered_json moments_json(std::size_t n, const Moments& m)
{
    return {{"n", n},
            {"mean", to_string(m.mean)},
            {"variance", to_string(m.variance)},
            {"mean_float", to_double(m.mean)},
            {"var_float", to_double(m.variance)}};
}

inline ordered_json summary_json(std::span<const double> xs)
{
    const auto s = summarize(xs);
    return {{"count", s.count}, {"mean", s.mean}, {"variance", s.variance}, {"std_error", s.std_error}};
}

inline ordered_json config_json(const SimConfig& c)
{
    return {{"n", c.n},
            {"topology", c.graph ? "explicit" : "complete"},
            {"edges", c.graph ? c.graph->edge_count() : c.n * (c.n - 1) / 2},
            {"lambda", c.lambda},
            {"sigma", c.sigma},
            {"delta_min", c.delay.min},
            {"delta_max", c.delay.max},
            {"mode", to_string(c.mode)},
            {"requests", c.max_requests},
            {"seed", c.seed}};
}

/// Aggregates only; per-request rows go through to_csv(SimReport).
inline ordered_json to_json(const SimReport& r)
{
    const auto msgs = r.message_counts();
    const auto reqs = r.request_message_counts();
    const auto waits = r.waits();
    ordered_json j;
    j["config"] = config_json(r.config);
    j["requests_issued"] = r.requests.size();
    j["cs_entries"] = r.cs_entry_order.size();
    j["events"] = r.events;
    j["end_time"] = r.end_time;
    j["messages"] = summary_json(msgs);
    j["request_messages"] = summary_json(reqs);
    j["wait_time"] = summary_json(waits);
    j["max_messages"] = r.max_messages;
    j["max_hop_messages"] = r.max_hop_messages;
    j["diameter"] = r.diameter;
    j["q"] = r.config.q();
    j["message_bound"] = r.config.message_bound();
    j["bound_violations"] = r.bound_violations;
    j["hop_bound"] = 2ull * r.diameter;
    j["hop_bound_violations"] = r.lemma_violations;
    j["safety_violations"] = r.safety_violations.size();
    j["fairness_violations"] = r.fairness_violations.size();
    j["ungranted"] = r.ungranted;
    return j;
}

/// `request_id,origin,messages,wait_time,granted_at`; ungranted rows leave the
/// last two fields empty.
inline std::string to_csv(const SimReport& r)
{
    std::ostringstream os;
    os.precision(17);
    os << "request_id,origin,messages,wait_time,granted_at\n";
    for (const auto& q : r.requests) {
        os << q.id << ',' << q.origin << ',' << (r.config.graph ? q.hop_messages : q.messages()) << ',';
        if (q.granted) {
            os << q.wait() << ',' << q.granted_at;
        } else {
            os << ',';
        }
        os << '\n';
    }
    return os.str();
}

} // namespace pathrev
