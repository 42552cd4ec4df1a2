#pragma once

// Token-based mutual exclusion over a dynamic Last tree (first variant: each
// node keeps at most one Next), plus a deterministic discrete-event network
// simulator that drives it and checks safety, liveness and message bounds.

#include "pathrev/graph.hpp"
#include "pathrev/stats.hpp"
#include "pathrev/tree_core.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pathrev {

/// Raised when a node sees a state the algorithm can never produce
/// (second token, second Next, request while requesting). Always a bug.
class ProtocolViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class MessageKind { kRequest, kToken };

struct Message {
    MessageKind kind = MessageKind::kRequest;
    NodeId src = 0;
    NodeId dst = 0;
    NodeId origin = 0;          // kRequest: the requesting node
    std::vector<NodeId> queue;  // kToken: nodes to serve, front = dst
    double deliver_at = 0.0;
};

/// Per-node algorithm state. `last` is empty exactly when the node is the
/// root of the Last tree (the tail of the waiting queue).
struct ProtocolNodeState {
    NodeId id = 0;
    std::optional<NodeId> last;
    std::optional<NodeId> next;
    bool requesting = false;
    bool has_token = false;
    bool in_cs = false;

    friend bool operator==(const ProtocolNodeState&, const ProtocolNodeState&) = default;
};

/// Initial state on the star: node 0 is the root and holds the token.
inline ProtocolNodeState initial_state(NodeId id)
{
    ProtocolNodeState s;
    s.id = id;
    if (id == 0) {
        s.has_token = true;
    } else {
        s.last = NodeId{0};
    }
    return s;
}

struct LocalRequest {};
struct CsExit {};
using NodeEvent = std::variant<LocalRequest, Message, CsExit>;

struct StepResult {
    ProtocolNodeState state;
    std::vector<Message> out;
    bool entered_cs = false;
};

namespace detail {

inline Message make_request(NodeId src, NodeId dst, NodeId origin)
{
    Message m;
    m.kind = MessageKind::kRequest;
    m.src = src;
    m.dst = dst;
    m.origin = origin;
    return m;
}

inline Message make_token(NodeId src, NodeId dst)
{
    Message m;
    m.kind = MessageKind::kToken;
    m.src = src;
    m.dst = dst;
    m.queue = {dst};
    return m;
}

inline void violation(const ProtocolNodeState& s, const std::string& what)
{
    throw ProtocolViolation("node " + std::to_string(s.id) + ": " + what);
}

} // namespace detail

/// One transition of the algorithm at a single node.
///
/// - local request: send Request(self) to Last and become a root, or enter
///   the CS at once when already the idle root holding the token;
/// - Request(j) at a non-root: forward to Last; at a root: record j as Next
///   when waiting or in the CS, otherwise hand over the token. Either way
///   Last becomes j;
/// - Token: enter the CS;
/// - CS exit: pass the token to Next if there is one.
inline StepResult step_node(ProtocolNodeState s, const NodeEvent& ev)
{
    StepResult r;
    if (std::holds_alternative<LocalRequest>(ev)) {
        if (s.requesting) {
            detail::violation(s, "request while already requesting");
        }
        s.requesting = true;
        if (!s.last) {
            if (!s.has_token) {
                detail::violation(s, "idle root without the token");
            }
            s.in_cs = true;
            r.entered_cs = true;
        } else {
            r.out.push_back(detail::make_request(s.id, *s.last, s.id));
            s.last.reset();
        }
    } else if (const auto* msg = std::get_if<Message>(&ev)) {
        if (msg->dst != s.id) {
            detail::violation(s, "message addressed to " + std::to_string(msg->dst));
        }
        if (msg->kind == MessageKind::kRequest) {
            const NodeId j = msg->origin;
            if (j == s.id) {
                detail::violation(s, "own request came back");
            }
            if (!s.last) {
                if (s.requesting) {
                    if (s.next) {
                        detail::violation(s, "second Next");
                    }
                    s.next = j;
                } else {
                    if (!s.has_token) {
                        detail::violation(s, "idle root without the token");
                    }
                    s.has_token = false;
                    r.out.push_back(detail::make_token(s.id, j));
                }
            } else {
                r.out.push_back(detail::make_request(s.id, *s.last, j));
            }
            s.last = j;
        } else {
            if (s.has_token) {
                detail::violation(s, "second token");
            }
            if (msg->queue.empty() || msg->queue.front() != s.id) {
                detail::violation(s, "token queue does not start here");
            }
            if (!s.requesting) {
                detail::violation(s, "token without a pending request");
            }
            s.has_token = true;
            s.in_cs = true;
            r.entered_cs = true;
        }
    } else {
        if (!s.in_cs) {
            detail::violation(s, "CS exit outside the CS");
        }
        s.in_cs = false;
        s.requesting = false;
        if (s.next) {
            s.has_token = false;
            r.out.push_back(detail::make_token(s.id, *s.next));
            s.next.reset();
        }
    }
    r.state = s;
    return r;
}

/// Per-message delay, uniform on [min, max]; min == max is the constant case.
struct DelayModel {
    double min = 1.0;
    double max = 1.0;

    static DelayModel constant(double d) { return {d, d}; }
    static DelayModel uniform(double lo, double hi) { return {lo, hi}; }
    [[nodiscard]] bool is_constant() const noexcept { return min == max; }
};

enum class SimMode { kSequential, kPoisson };

struct SimConfig {
    std::size_t n = 1;
    std::optional<Graph> graph; // empty: complete network, one message per logical send
    double lambda = 1.0;        // per-node request rate
    double sigma = 1.0;         // CS duration
    DelayModel delay;
    SimMode mode = SimMode::kPoisson;
    std::size_t max_requests = 1000; // requests issued before the run drains
    double max_time = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;
    bool record_trace = false; // Last-link snapshots after each sequential request
    std::vector<NodeId> script; // sequential mode: fixed requester order instead of uniform picks
    std::size_t max_events = 500'000'000;

    /// Maximum delay of one message on the network.
    [[nodiscard]] double max_delay() const noexcept { return delay.max; }
    /// q = ceil(max delay / CS time).
    [[nodiscard]] std::uint64_t q() const { return static_cast<std::uint64_t>(std::ceil(max_delay() / sigma)); }
    /// (n - 1)(q + 1).
    [[nodiscard]] std::uint64_t message_bound() const { return (n - 1) * (q() + 1); }

    void validate() const
    {
        if (n == 0) {
            throw std::invalid_argument("SimConfig: n must be positive");
        }
        if (!(lambda > 0.0) || !(sigma > 0.0) || !(delay.min > 0.0) || delay.max < delay.min) {
            throw std::invalid_argument("SimConfig: rates, CS time and delays must be positive");
        }
        if (graph && graph->size() != n) {
            throw std::invalid_argument("SimConfig: graph size differs from n");
        }
        if (graph && !graph->connected()) {
            throw std::invalid_argument("SimConfig: graph is disconnected");
        }
        for (NodeId v : script) {
            if (v >= n) {
                throw std::invalid_argument("SimConfig: scripted requester out of range");
            }
        }
    }
};

struct RequestRecord {
    std::uint64_t id = 0;
    NodeId origin = 0;
    double issued_at = 0.0;
    double granted_at = std::numeric_limits<double>::quiet_NaN();
    std::uint32_t request_messages = 0; // Request sends attributed to this request
    std::uint32_t token_messages = 0;   // Token sends that delivered the grant
    std::uint64_t hop_messages = 0;     // edge traversals of both, on explicit graphs
    bool granted = false;

    [[nodiscard]] std::uint32_t messages() const noexcept { return request_messages + token_messages; }
    [[nodiscard]] double wait() const noexcept { return granted_at - issued_at; }
};

struct SimReport {
    SimConfig config;
    std::vector<RequestRecord> requests;
    std::vector<NodeId> cs_entry_order;
    std::vector<std::string> safety_violations;   // two nodes in the CS, token count != 1
    std::vector<std::string> fairness_violations; // grant not along the recorded Next link
    std::size_t ungranted = 0;
    std::uint64_t events = 0;
    double end_time = 0.0;
    std::uint32_t diameter = 1;

    std::size_t bound_violations = 0;   // messages > (n-1)(q+1), complete network
    std::size_t lemma_violations = 0;   // hop messages > 2D, explicit graph
    std::uint64_t max_messages = 0;
    std::uint64_t max_hop_messages = 0;

    /// Last links after each sequential request (record_trace only).
    std::vector<std::vector<std::optional<NodeId>>> last_snapshots;

    [[nodiscard]] bool liveness_failure() const noexcept { return ungranted > 0; }
    [[nodiscard]] bool safe() const noexcept { return safety_violations.empty() && fairness_violations.empty(); }

    [[nodiscard]] std::vector<double> message_counts() const
    {
        std::vector<double> v;
        v.reserve(requests.size());
        for (const auto& r : requests) {
            if (r.granted) {
                v.push_back(r.messages());
            }
        }
        return v;
    }

    [[nodiscard]] std::vector<double> request_message_counts() const
    {
        std::vector<double> v;
        v.reserve(requests.size());
        for (const auto& r : requests) {
            if (r.granted) {
                v.push_back(r.request_messages);
            }
        }
        return v;
    }

    [[nodiscard]] std::vector<double> waits() const
    {
        std::vector<double> v;
        v.reserve(requests.size());
        for (const auto& r : requests) {
            if (r.granted) {
                v.push_back(r.wait());
            }
        }
        return v;
    }
};

namespace detail {

class Simulator {
public:
    explicit Simulator(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed)
    {
        cfg_.validate();
        report_.config = cfg_;
        report_.diameter = cfg_.graph ? cfg_.graph->diameter() : (cfg_.n > 1 ? 1 : 0);
        nodes_.reserve(cfg_.n);
        for (NodeId v = 0; v < cfg_.n; ++v) {
            nodes_.push_back(initial_state(v));
        }
        current_.assign(cfg_.n, std::nullopt);
        successor_.assign(cfg_.n, std::nullopt);
    }

    SimReport run()
    {
        if (cfg_.mode == SimMode::kPoisson) {
            for (NodeId v = 0; v < cfg_.n; ++v) {
                schedule_arrival(v, 0.0);
            }
        } else {
            schedule_sequential(0.0);
        }
        while (!queue_.empty()) {
            if (++report_.events > cfg_.max_events) {
                break;
            }
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            dispatch(ev);
        }
        report_.end_time = now_;
        for (const auto& r : report_.requests) {
            if (!r.granted) {
                ++report_.ungranted;
            }
        }
        return std::move(report_);
    }

private:
    enum class EventKind { kArrival, kDeliver, kExit };

    struct Event {
        double time;
        std::uint64_t seq;
        EventKind kind;
        NodeId node;
        std::size_t message; // index into in_flight_ for kDeliver
    };

    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    bool horizon_reached() const
    {
        const bool script_done = !cfg_.script.empty() && report_.requests.size() >= cfg_.script.size();
        return script_done || report_.requests.size() >= cfg_.max_requests || now_ >= cfg_.max_time;
    }

    void push(double t, EventKind k, NodeId node, std::size_t msg = 0)
    {
        queue_.push(Event{t, seq_++, k, node, msg});
    }

    double draw_delay()
    {
        if (cfg_.delay.is_constant()) {
            return cfg_.delay.min;
        }
        return std::uniform_real_distribution<double>(cfg_.delay.min, cfg_.delay.max)(rng_);
    }

    double draw_gap() { return std::exponential_distribution<double>(cfg_.lambda)(rng_); }

    void schedule_arrival(NodeId v, double from) { push(from + draw_gap(), EventKind::kArrival, v); }

    void schedule_sequential(double from)
    {
        if (horizon_reached()) {
            return;
        }
        const auto v = cfg_.script.empty()
                           ? std::uniform_int_distribution<NodeId>(0, static_cast<NodeId>(cfg_.n - 1))(rng_)
                           : cfg_.script[report_.requests.size()];
        push(from + draw_gap(), EventKind::kArrival, v);
    }

    void dispatch(const Event& ev)
    {
        switch (ev.kind) {
        case EventKind::kArrival:
            if (horizon_reached()) {
                return;
            }
            issue_request(ev.node);
            break;
        case EventKind::kDeliver: {
            Message msg = std::move(in_flight_[ev.message]);
            free_slots_.push_back(ev.message);
            if (msg.kind == MessageKind::kToken) {
                --tokens_in_flight_;
            }
            deliver(std::move(msg));
            break;
        }
        case EventKind::kExit:
            if (successor_[ev.node]) {
                expected_grantee_ = successor_[ev.node];
                successor_[ev.node].reset();
            }
            apply(ev.node, CsExit{});
            if (cfg_.mode == SimMode::kPoisson) {
                schedule_arrival(ev.node, now_);
            } else {
                schedule_sequential(now_);
            }
            break;
        }
    }

    void issue_request(NodeId v)
    {
        RequestRecord rec;
        rec.id = report_.requests.size();
        rec.origin = v;
        rec.issued_at = now_;
        current_[v] = report_.requests.size();
        report_.requests.push_back(rec);
        apply(v, LocalRequest{});
    }

    void deliver(Message msg)
    {
        const NodeId dst = msg.dst;
        // Observer: a Request reaching a root either queues its origin behind
        // that (requesting) root or, at the idle holder, names the next grantee.
        if (msg.kind == MessageKind::kRequest && !nodes_[dst].last) {
            if (nodes_[dst].requesting) {
                successor_[dst] = msg.origin;
            } else {
                expected_grantee_ = msg.origin;
            }
        }
        apply(dst, std::move(msg));
    }

    void apply(NodeId v, const NodeEvent& ev)
    {
        const bool had_token = nodes_[v].has_token;
        const bool was_in_cs = nodes_[v].in_cs;
        StepResult r = step_node(nodes_[v], ev);
        nodes_[v] = r.state;
        tokens_held_ += static_cast<int>(r.state.has_token) - static_cast<int>(had_token);
        in_cs_ += static_cast<int>(r.state.in_cs) - static_cast<int>(was_in_cs);

        for (auto& m : r.out) {
            send(std::move(m));
        }
        if (r.entered_cs) {
            on_enter(v);
        }
        if (tokens_held_ + tokens_in_flight_ != 1) {
            report_.safety_violations.push_back("t=" + std::to_string(now_) + ": " +
                                                std::to_string(tokens_held_ + tokens_in_flight_) + " tokens");
        }
        if (cfg_.mode == SimMode::kSequential && cfg_.record_trace && std::holds_alternative<CsExit>(ev)) {
            std::vector<std::optional<NodeId>> links(cfg_.n);
            for (NodeId u = 0; u < cfg_.n; ++u) {
                links[u] = nodes_[u].last;
            }
            report_.last_snapshots.push_back(std::move(links));
        }
    }

    void send(Message m)
    {
        std::uint64_t hops = 1;
        double delay = 0.0;
        if (cfg_.graph) {
            hops = cfg_.graph->distance(m.src, m.dst);
            for (std::uint64_t h = 0; h < hops; ++h) {
                delay += draw_delay();
            }
        } else {
            delay = draw_delay();
        }
        const NodeId charged = m.kind == MessageKind::kRequest ? m.origin : m.dst;
        if (auto idx = current_[charged]) {
            auto& rec = report_.requests[*idx];
            if (m.kind == MessageKind::kRequest) {
                ++rec.request_messages;
            } else {
                ++rec.token_messages;
                ++tokens_in_flight_;
            }
            rec.hop_messages += hops;
        } else if (m.kind == MessageKind::kToken) {
            ++tokens_in_flight_;
        }
        m.deliver_at = now_ + delay;
        std::size_t slot;
        if (free_slots_.empty()) {
            slot = in_flight_.size();
            in_flight_.push_back(std::move(m));
        } else {
            slot = free_slots_.back();
            free_slots_.pop_back();
            in_flight_[slot] = std::move(m);
        }
        push(in_flight_[slot].deliver_at, EventKind::kDeliver, in_flight_[slot].dst, slot);
    }

    void on_enter(NodeId v)
    {
        if (in_cs_ > 1) {
            report_.safety_violations.push_back("t=" + std::to_string(now_) + ": node " + std::to_string(v) +
                                                " entered while another node is in the CS");
        }
        // A token grant must go to the node the observer saw queued next.
        if (holder_ != v) {
            if (expected_grantee_ != v) {
                report_.fairness_violations.push_back("t=" + std::to_string(now_) + ": node " +
                                                      std::to_string(v) + " served out of Next order");
            }
            expected_grantee_.reset();
        }
        holder_ = v;
        report_.cs_entry_order.push_back(v);

        auto idx = current_[v];
        if (!idx) {
            throw ProtocolViolation("node " + std::to_string(v) + " entered the CS without a request");
        }
        auto& rec = report_.requests[*idx];
        rec.granted = true;
        rec.granted_at = now_;
        current_[v].reset();
        report_.max_messages = std::max<std::uint64_t>(report_.max_messages, rec.messages());
        report_.max_hop_messages = std::max(report_.max_hop_messages, rec.hop_messages);
        if (cfg_.graph) {
            if (rec.hop_messages > 2ull * report_.diameter) {
                ++report_.lemma_violations;
            }
        } else if (rec.messages() > cfg_.message_bound()) {
            ++report_.bound_violations;
        }
        push(now_ + cfg_.sigma, EventKind::kExit, v);
    }

    SimConfig cfg_;
    std::mt19937_64 rng_;
    SimReport report_;
    std::vector<ProtocolNodeState> nodes_;
    std::vector<std::optional<std::size_t>> current_; // outstanding request per node
    std::vector<std::optional<NodeId>> successor_;    // observer's view of Next links
    std::optional<NodeId> expected_grantee_;          // where the token is headed
    NodeId holder_ = 0;                               // last node granted the token
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::vector<Message> in_flight_;
    std::vector<std::size_t> free_slots_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0;
    int tokens_held_ = 1;
    int tokens_in_flight_ = 0;
    int in_cs_ = 0;
};

} // namespace detail

/// Runs the algorithm on a complete network (or on cfg.graph when set).
///
/// New requests stop at the horizon (max_requests issued or max_time
/// reached); the run then drains, so any request still ungranted at the end
/// is a liveness failure.
inline SimReport run_simulation(const SimConfig& cfg) { return detail::Simulator(cfg).run(); }

/// The arbitrary-network variant: every logical message is routed along a
/// shortest path and costs one message per edge.
inline SimReport run_arbitrary_network(const SimConfig& cfg)
{
    if (!cfg.graph) {
        throw std::invalid_argument("run_arbitrary_network: config has no explicit graph");
    }
    if (!cfg.graph->connected()) {
        throw std::invalid_argument("run_arbitrary_network: graph is disconnected");
    }
    return run_simulation(cfg);
}

struct ShadowCheck {
    bool ok = true;
    std::size_t checked = 0;
    std::vector<std::size_t> costs; // reversal costs replayed on the shadow tree
    std::string first_mismatch;
};

/// Replays a sequential run on a star with path reversals at each requester;
/// per request, the forwarded Request count must equal the reversal cost and
/// (when snapshots were recorded) the Last links must equal the parent links.
inline ShadowCheck shadow_tree_check(const SimReport& rep)
{
    if (rep.config.mode != SimMode::kSequential) {
        throw std::invalid_argument("shadow_tree_check: needs a sequential-mode report");
    }
    ShadowCheck out;
    RootedTree shadow = star(rep.config.n);
    for (std::size_t i = 0; i < rep.requests.size(); ++i) {
        const auto& r = rep.requests[i];
        const auto cost = shadow.path_reversal(r.origin);
        out.costs.push_back(cost);
        ++out.checked;
        if (cost != r.request_messages) {
            out.ok = false;
            out.first_mismatch = "request " + std::to_string(i) + ": cost " + std::to_string(cost) +
                                 " vs " + std::to_string(r.request_messages) + " messages";
            return out;
        }
        if (i < rep.last_snapshots.size() && rep.last_snapshots[i] != shadow.parents()) {
            out.ok = false;
            out.first_mismatch = "request " + std::to_string(i) + ": Last links differ from shadow tree";
            return out;
        }
    }
    return out;
}

} // namespace pathrev
