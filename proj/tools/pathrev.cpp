// pathrev: command-line front end for the analysis, simulation and
// queueing code. Output is JSON or CSV; `table`/`text` are renderings of the
// same JSON document.

#include "pathrev/pathrev.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

using namespace pathrev;

namespace {

constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kInvariant = 3, kLiveness = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Result {
    std::string text;
    int status = kOk;
};

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return os.str();
}

std::string scalar_text(const ordered_json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_null()) {
        return "-";
    }
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(6) << v.get<double>();
        return os.str();
    }
    return v.dump();
}

/// Scalars as `key  value` lines; arrays of flat objects as column tables;
/// nested objects are flattened with dotted keys.
void render_table(const ordered_json& j, std::ostream& os, const std::string& prefix = "")
{
    std::vector<std::pair<std::string, std::string>> scalars;
    std::vector<std::pair<std::string, const ordered_json*>> tables;
    std::vector<std::pair<std::string, const ordered_json*>> nested;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            nested.emplace_back(key, &*it);
        } else if (it->is_array() && !it->empty() && it->front().is_object()) {
            tables.emplace_back(key, &*it);
        } else if (it->is_array()) {
            std::string joined;
            for (const auto& x : *it) {
                joined += (joined.empty() ? "" : ",") + scalar_text(x);
            }
            scalars.emplace_back(key, joined);
        } else {
            scalars.emplace_back(key, scalar_text(*it));
        }
    }
    std::size_t width = 0;
    for (const auto& [k, v] : scalars) {
        width = std::max(width, k.size());
    }
    for (const auto& [k, v] : scalars) {
        os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
    }
    for (const auto& [k, obj] : nested) {
        render_table(*obj, os, k);
    }
    for (const auto& [k, arr] : tables) {
        os << '\n' << k << ":\n";
        std::vector<std::string> cols;
        for (auto it = arr->front().begin(); it != arr->front().end(); ++it) {
            cols.push_back(it.key());
        }
        std::vector<std::size_t> w(cols.size());
        std::vector<std::vector<std::string>> cells;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            w[c] = cols[c].size();
        }
        for (const auto& row : *arr) {
            std::vector<std::string> line;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                line.push_back(row.contains(cols[c]) ? scalar_text(row[cols[c]]) : "");
                w[c] = std::max(w[c], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            os << std::left << std::setw(static_cast<int>(w[c]) + 2) << cols[c];
        }
        os << '\n';
        for (const auto& line : cells) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                os << std::left << std::setw(static_cast<int>(w[c]) + 2) << line[c];
            }
            os << '\n';
        }
    }
}

std::string as_table(const ordered_json& j)
{
    std::ostringstream os;
    render_table(j, os);
    return os.str();
}

/// One CSV row per array element, or `key,value` lines for a flat object.
std::string as_csv(const ordered_json& j, const std::string& rows_key = "")
{
    std::ostringstream os;
    if (!rows_key.empty()) {
        const auto& rows = j.at(rows_key);
        if (rows.empty()) {
            return "";
        }
        bool first = true;
        for (auto it = rows.front().begin(); it != rows.front().end(); ++it) {
            os << (first ? "" : ",") << it.key();
            first = false;
        }
        os << '\n';
        for (const auto& row : rows) {
            first = true;
            for (auto it = row.begin(); it != row.end(); ++it) {
                os << (first ? "" : ",") << (it->is_string() ? it->get<std::string>() : it->dump());
                first = false;
            }
            os << '\n';
        }
        return os.str();
    }
    os << "key,value\n";
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it->is_structured()) {
            os << it.key() << ',' << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
        }
    }
    return os.str();
}

std::string as_json(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::size_t n = 2;
    std::size_t limit = 8;
    std::string convention = "product";
    std::string method = "pgf";
    std::string format = "json";
};

Result analyze_dist(const AnalyzeOpts& o)
{
    const auto conv =
        o.convention == "literal" ? BoundaryConvention::kEq2Literal : BoundaryConvention::kProductForm;
    const auto d = o.method == "recurrence" ? cost_distribution_recurrence(o.n) : cost_distribution_pgf(o.n, conv);
    if (o.format == "csv") {
        return {to_csv(d)};
    }
    auto j = to_json(d);
    j["method"] = o.method;
    j["convention"] = o.convention;
    return {o.format == "table" ? as_table(j) : as_json(j)};
}

Result analyze_moments(const AnalyzeOpts& o)
{
    const auto j = moments_json(o.n, moments(o.n));
    if (o.format == "csv") {
        return {"n,mean,variance,mean_float,var_float\n" + std::to_string(o.n) + "," + j["mean"].get<std::string>() +
                "," + j["variance"].get<std::string>() + "," + j["mean_float"].dump() + "," +
                j["var_float"].dump() + "\n"};
    }
    return {o.format == "table" ? as_table(j) : as_json(j)};
}

Result analyze_stirling(const AnalyzeOpts& o)
{
    const auto c = stirling_cycle_check(o.n, o.limit);
    ordered_json j{{"n", c.n}, {"two_cycle_count", c.count}, {"expected", to_string(c.expected)}, {"ok", c.ok}};
    const int status = c.ok ? kOk : kInvariant;
    if (o.format == "csv") {
        return {"n,two_cycle_count,expected,ok\n" + std::to_string(c.n) + "," + std::to_string(c.count) + "," +
                    to_string(c.expected) + "," + (c.ok ? "true" : "false") + "\n",
                status};
    }
    return {o.format == "table" ? as_table(j) : as_json(j), status};
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::size_t n = 8;
    std::string topology = "complete";
    double lambda = 0.1;
    double sigma = 1.0;
    std::vector<double> delta{0.1};
    std::size_t requests = 10000;
    double max_time = std::numeric_limits<double>::infinity();
    std::size_t max_events = 500'000'000;
    std::uint64_t seed = 0;
    std::string mode = "poisson";
    std::string format = "json";
    std::size_t replications = 1;
    std::size_t jobs = 1;
};

SimConfig make_config(const SimulateOpts& o, std::uint64_t seed)
{
    SimConfig c;
    c.n = o.n;
    c.lambda = o.lambda;
    c.sigma = o.sigma;
    if (o.delta.size() == 1) {
        c.delay = DelayModel::constant(o.delta[0]);
    } else if (o.delta.size() == 2) {
        c.delay = DelayModel::uniform(o.delta[0], o.delta[1]);
    } else {
        throw UsageError("--delta takes one value or a min,max pair");
    }
    c.mode = o.mode == "sequential" ? SimMode::kSequential : SimMode::kPoisson;
    c.max_requests = o.requests;
    c.max_time = o.max_time;
    c.max_events = o.max_events;
    c.seed = seed;

    if (o.topology != "complete") {
        const auto colon = o.topology.find(':');
        if (colon == std::string::npos) {
            throw UsageError("--topology must be complete, sparse:<M> or regular:<r>");
        }
        const std::string kind = o.topology.substr(0, colon);
        std::size_t value = 0;
        try {
            value = std::stoul(o.topology.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("--topology: bad number in '" + o.topology + "'");
        }
        TopologySpec spec;
        if (kind == "sparse") {
            spec = TopologySpec::sparse(o.n, value);
        } else if (kind == "regular") {
            spec = TopologySpec::regular(o.n, value);
        } else {
            throw UsageError("--topology must be complete, sparse:<M> or regular:<r>");
        }
        c.graph = generate_topology(spec, seed);
    }
    return c;
}

int status_of(const SimReport& r)
{
    if (!r.safe()) {
        return kInvariant;
    }
    return r.liveness_failure() ? kLiveness : kOk;
}

Result simulate(const SimulateOpts& o)
{
    const std::size_t reps = std::max<std::size_t>(1, o.replications);
    std::vector<SimReport> reports(reps);
    std::vector<std::string> errors(reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < reps; i = next++) {
            try {
                const auto cfg = make_config(o, o.seed + i);
                reports[i] = cfg.graph ? run_arbitrary_network(cfg) : run_simulation(cfg);
            } catch (const ProtocolViolation& e) {
                errors[i] = e.what();
            }
        }
    };
    // build one config up front so parameter errors surface before threads start
    (void)make_config(o, o.seed);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(o.jobs, reps); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (!e.empty()) {
            throw ProtocolViolation(e);
        }
    }

    int status = kOk;
    for (const auto& r : reports) {
        status = std::max(status, status_of(r));
    }
    if (reps == 1) {
        const auto& r = reports.front();
        if (o.format == "csv") {
            return {to_csv(r), status};
        }
        const auto j = to_json(r);
        return {o.format == "table" ? as_table(j) : as_json(j), status};
    }

    if (o.format == "csv") {
        std::string out = "seed," + to_csv(reports.front()).substr(0, to_csv(reports.front()).find('\n') + 1);
        for (std::size_t i = 0; i < reps; ++i) {
            const auto body = to_csv(reports[i]);
            std::istringstream lines(body.substr(body.find('\n') + 1));
            for (std::string line; std::getline(lines, line);) {
                out += std::to_string(o.seed + i) + "," + line + "\n";
            }
        }
        return {out, status};
    }
    ordered_json runs = ordered_json::array();
    std::vector<double> msg_means, wait_means;
    std::size_t unsafe = 0, ungranted = 0, bound = 0, hop = 0;
    for (std::size_t i = 0; i < reps; ++i) {
        auto j = to_json(reports[i]);
        runs.push_back(j);
        msg_means.push_back(j["messages"]["mean"].get<double>());
        wait_means.push_back(j["wait_time"]["mean"].get<double>());
        unsafe += reports[i].safe() ? 0 : 1;
        ungranted += reports[i].ungranted;
        bound += reports[i].bound_violations;
        hop += reports[i].lemma_violations;
    }
    ordered_json agg{{"replications", reps},
                     {"first_seed", o.seed},
                     {"messages_mean", summary_json(msg_means)},
                     {"wait_time_mean", summary_json(wait_means)},
                     {"unsafe_runs", unsafe},
                     {"ungranted", ungranted},
                     {"bound_violations", bound},
                     {"hop_bound_violations", hop}};
    ordered_json j{{"aggregate", agg}, {"runs", runs}};
    return {o.format == "table" ? as_table(agg) : as_json(j), status};
}

// ---------------------------------------------------------------- queue

struct QueueOpts {
    std::size_t n = 8;
    std::string lambda = "0.2";
    std::string sigma = "1";
    std::string delta = "0.1";
    bool exact = false;
    std::string format = "json";
};

double parse_double(const std::string& name, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception&) {
        // p/q is accepted too
        try {
            return to_double(parse_rational(text));
        } catch (const std::exception&) {
            throw UsageError("--" + name + ": not a number: '" + text + "'");
        }
    }
}

Rational parse_exact(const std::string& name, const std::string& text)
{
    try {
        return parse_rational(text);
    } catch (const std::exception&) {
        throw UsageError("--" + name + ": not an exact decimal or p/q: '" + text + "'");
    }
}

template <typename T>
ordered_json queue_json(const QueueModel<T>& m, const QueueModel<double>& fm)
{
    auto show = [](const T& v) -> ordered_json {
        if constexpr (std::is_floating_point_v<T>) {
            return v;
        } else {
            return to_string(v);
        }
    };
    const auto d = state_probabilities(m);
    ordered_json probs = ordered_json::array();
    for (const auto& p : d.probs) {
        probs.push_back(show(p));
    }
    const T wbar = expected_waiting(m);
    const T direct = expected_waiting_direct(m);
    ordered_json j;
    j["n"] = m.n;
    j["lambda"] = show(m.lambda);
    j["sigma"] = show(m.sigma);
    j["delta"] = show(m.delta);
    j["rho"] = show(m.rho());
    j["exact"] = !std::is_floating_point_v<T>;
    j["P"] = probs;
    j["nbar"] = show(d.nbar);
    j["wbar"] = show(wbar);
    j["wbar_direct_sum"] = show(direct);
    if constexpr (std::is_floating_point_v<T>) {
        j["identity_gap"] = wbar - direct;
    } else {
        j["identity_gap"] = to_string(T(wbar - direct));
    }
    j["worst_case"] = show(worst_case_waiting(m));
    if (fm.rho() < 1.0) {
        const auto b = asymptotic_waiting_bound(fm);
        j["asymptotic_bound"] = {{"bound", b.bound}, {"o_term", b.o_term}};
    } else {
        j["asymptotic_bound"] = nullptr;
    }
    return j;
}

Result queue_eval(const QueueOpts& o)
{
    const QueueModel<double> fm{o.n, parse_double("lambda", o.lambda), parse_double("sigma", o.sigma),
                                parse_double("delta", o.delta)};
    if (fm.n == 0 || !(fm.lambda > 0) || !(fm.sigma > 0) || fm.delta < 0) {
        throw UsageError("queue eval: n, lambda, sigma must be positive and delta non-negative");
    }
    ordered_json j;
    if (o.exact) {
        const QueueModel<Rational> em{o.n, parse_exact("lambda", o.lambda), parse_exact("sigma", o.sigma),
                                      parse_exact("delta", o.delta)};
        j = queue_json(em, fm);
    } else {
        j = queue_json(fm, fm);
    }
    if (o.format == "csv") {
        std::string out = "k,P_k\n";
        for (std::size_t k = 0; k < j["P"].size(); ++k) {
            out += std::to_string(k) + "," + scalar_text(j["P"][k]) + "\n";
        }
        return {out + "\n" + as_csv(j)};
    }
    return {o.format == "table" ? as_table(j) : as_json(j)};
}

// ---------------------------------------------------------------- bijection

struct BijectionOpts {
    std::size_t n = 6;
    std::string format = "text";
};

Result bijection_check(const BijectionOpts& o)
{
    if (o.n > 9) {
        throw UsageError("bijection check: --n above 9 is too large to enumerate");
    }
    std::size_t cases = 0, ok = 0, gamma_ok = 0, alpha_ok = 0;
    std::set<std::string> tournaments;
    std::set<std::vector<std::vector<NodeId>>> shapes;
    for_each_permutation(o.n, [&](const std::vector<int>& p) {
        ++cases;
        const auto t = tournament_from_sequence(p);
        const bool g = t.valid() && sequence_from_tournament(t) == p &&
                       tournament_from_permutation(Permutation(p)) == t;
        tournaments.insert(t.to_string());
        bool a = false;
        if (o.n > 0) {
            const auto tree = ordered_tree_from_sequence(p);
            a = sequence_from_ordered_tree(tree) == p;
            std::vector<std::vector<NodeId>> key{{tree.root()}};
            for (NodeId v = 0; v < tree.size(); ++v) {
                key.push_back(tree.children(v));
            }
            shapes.insert(key);
        } else {
            a = sequence_from_ordered_tree(OrderedTree{}).empty();
        }
        gamma_ok += g;
        alpha_ok += a;
        ok += g && a;
    });
    const bool distinct = tournaments.size() == cases && (o.n == 0 || shapes.size() == cases);
    const bool pass = ok == cases && distinct;
    ordered_json j{{"n", o.n},
                   {"cases", cases},
                   {"roundtrips", ok},
                   {"gamma_roundtrips", gamma_ok},
                   {"alpha_beta_roundtrips", alpha_ok},
                   {"distinct_tournaments", tournaments.size()},
                   {"distinct_ordered_trees", o.n == 0 ? cases : shapes.size()},
                   {"ok", pass}};
    const int status = pass ? kOk : kInvariant;
    if (o.format == "json") {
        return {as_json(j), status};
    }
    if (o.format == "csv") {
        return {as_csv(j), status};
    }
    return {std::string(pass ? "OK" : "FAIL") + ": " + std::to_string(ok) + "/" + std::to_string(cases) +
                " roundtrips\n",
            status};
}

// ---------------------------------------------------------------- reproduce

struct ReproduceOpts {
    std::size_t n = 16;              // theorem31
    std::size_t requests = 200000;   // theorem31
    std::size_t queue_n = 8;         // theorem41
    std::size_t queue_requests = 50000;
    std::size_t run_requests = 2000; // lemma51, per run
    std::uint64_t seed = 0;
    double lambda = 0.2;
    double sigma = 1.0;
    double delta = 0.1;
    std::vector<std::size_t> sizes{64, 128, 256};
    std::size_t runs = 17;
    std::size_t sparse_degree = 8;
    std::size_t regular_degree = 3;
    std::string format = "table";
};

Result render(const ordered_json& j, const std::string& format, const std::string& rows_key, int status)
{
    if (format == "json") {
        return {as_json(j), status};
    }
    if (format == "csv") {
        return {as_csv(j, rows_key), status};
    }
    return {as_table(j), status};
}

Result reproduce_theorem31(const ReproduceOpts& o)
{
    const auto r = message_complexity_experiment(o.n, o.requests, o.seed);
    ordered_json rows = ordered_json::array();
    rows.push_back({{"quantity", "request+token per CS entry"},
                    {"empirical", r.mean_messages},
                    {"std_error", r.std_error},
                    {"expected", r.expected},
                    {"z", r.z_score},
                    {"within_3se", r.within(3.0)}});
    const double fz = r.forwarded_std_error > 0 ? (r.forwarded_mean - r.forwarded_expected) / r.forwarded_std_error : 0;
    rows.push_back({{"quantity", "forwarded requests only"},
                    {"empirical", r.forwarded_mean},
                    {"std_error", r.forwarded_std_error},
                    {"expected", r.forwarded_expected},
                    {"z", fz},
                    {"within_3se", std::abs(fz) <= 3.0}});
    ordered_json j{{"experiment", "theorem31"},
                   {"n", r.n},
                   {"requests", r.requests},
                   {"seed", r.seed},
                   {"harmonic", to_string(harmonic(o.n - 1).h)},
                   {"safe", r.safe},
                   {"ungranted", r.ungranted},
                   {"shadow_tree_match", r.shadow_ok},
                   {"rows", rows}};
    const int status = !r.safe || !r.shadow_ok ? kInvariant : (r.ungranted ? kLiveness : kOk);
    return render(j, o.format, "rows", status);
}

Result reproduce_theorem41(const ReproduceOpts& o)
{
    const QueueModel<double> m{o.queue_n, o.lambda, o.sigma, o.delta};
    const auto r = waiting_time_experiment(m, o.queue_requests, o.seed);
    const auto& c = r.comparison;
    ordered_json j{{"experiment", "theorem41"},
                   {"n", o.queue_n},
                   {"lambda", o.lambda},
                   {"sigma", o.sigma},
                   {"delta", o.delta},
                   {"rho", m.rho()},
                   {"requests", c.samples},
                   {"seed", o.seed},
                   {"wbar_model", c.analytic},
                   {"wbar_simulated", c.empirical},
                   {"std_error", c.std_error},
                   {"relative_error", c.relative_error},
                   {"z", c.z_score},
                   {"within_3se", c.within(3.0)},
                   {"worst_case", r.worst_case},
                   {"asymptotic_bound", r.bound ? ordered_json(r.bound->bound) : ordered_json(nullptr)},
                   {"bound_holds", r.bound ? ordered_json(r.bound->bound >= c.analytic) : ordered_json(nullptr)},
                   {"safe", r.safe},
                   {"ungranted", r.ungranted}};
    const int status = !r.safe ? kInvariant : (r.ungranted ? kLiveness : kOk);
    return render(j, o.format, "", status);
}

Result reproduce_lemma51(const ReproduceOpts& o)
{
    HopBoundSetup s;
    s.sizes = o.sizes;
    s.runs_per_cell = o.runs;
    s.requests_per_run = o.run_requests;
    s.sparse_degree = o.sparse_degree;
    s.regular_degree = o.regular_degree;
    s.seed = o.seed;
    const auto r = hop_bound_experiment(s);
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"kind", row.kind},
                        {"n", row.n},
                        {"runs", row.runs},
                        {"requests", row.requests},
                        {"diameter_min", row.min_diameter},
                        {"diameter_max", row.max_diameter},
                        {"max_hops", row.max_hops},
                        {"mean_hops", row.mean_hops},
                        {"over_2D", row.violations},
                        {"max_excess", row.max_excess}});
    }
    ordered_json j{{"experiment", "lemma51"},
                   {"seed", o.seed},
                   {"runs", r.runs},
                   {"requests", r.requests},
                   {"over_2D", r.violations},
                   {"log_fit_c", r.log_fit_c},
                   {"log_log_slope", r.log_log_slope},
                   {"rows", rows}};
    return render(j, o.format, "rows", kOk);
}

// ---------------------------------------------------------------- dispatch

struct Invocation {
    std::vector<std::string> canonical; // subcommand path + resolved options
    std::optional<std::uint64_t> seed;
    std::function<Result()> action;
};

/// Resolved options of the selected subcommand (from flags, environment or
/// config file), minus those that do not change the output.
std::vector<std::string> canonical_args(CLI::App* sub, const std::vector<std::string>& path)
{
    std::vector<std::string> out = path;
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_name(false, true);
        if (opt->empty() || name == "--help" || name == "--out" || name == "--jobs" || name == "--config") {
            continue;
        }
        const std::string flag = opt->get_lnames().empty() ? name : "--" + opt->get_lnames().front();
        if (opt->get_items_expected_max() == 0) {
            out.push_back(flag + "=" + opt->results().back());
            continue;
        }
        std::string joined;
        for (const auto& v : opt->results()) {
            joined += (joined.empty() ? "" : ",") + v;
        }
        out.push_back(flag);
        out.push_back(joined);
    }
    return out;
}

struct Cli {
    CLI::App app{"pathrev: path-reversal mutual exclusion toolkit"};
    std::string out_path;
    std::string manifest_path;
    bool replay_print = false;

    AnalyzeOpts analyze;
    SimulateOpts sim;
    QueueOpts queue;
    BijectionOpts bij;
    ReproduceOpts repro;

    CLI::App* a_dist = nullptr;
    CLI::App* a_moments = nullptr;
    CLI::App* a_stirling = nullptr;
    CLI::App* s_cmd = nullptr;
    CLI::App* q_eval = nullptr;
    CLI::App* b_check = nullptr;
    CLI::App* r_31 = nullptr;
    CLI::App* r_41 = nullptr;
    CLI::App* r_51 = nullptr;
    CLI::App* replay = nullptr;

    Cli()
    {
        app.set_version_flag("--version", kVersion);
        app.set_config("--config", "", "TOML/INI file with option values (sections per subcommand)");
        app.require_subcommand(1);
        const auto formats = CLI::IsMember({"json", "csv", "table"});
        auto add_out = [&](CLI::App* c) {
            c->add_option("--out", out_path, "write output here and a manifest next to it");
        };

        auto* an = app.add_subcommand("analyze", "exact cost law, moments, cycle counts");
        an->require_subcommand(1);
        a_dist = an->add_subcommand("dist", "distribution of the reversal cost");
        a_moments = an->add_subcommand("moments", "mean and variance");
        a_stirling = an->add_subcommand("stirling", "two-cycle count against (n-1)! H_{n-1}");
        for (auto* c : {a_dist, a_moments, a_stirling}) {
            c->add_option("--n", analyze.n, "tree size")->required()->check(CLI::PositiveNumber);
            c->add_option("--format", analyze.format)->check(formats)->capture_default_str();
            add_out(c);
        }
        a_dist->add_option("--method", analyze.method)->check(CLI::IsMember({"pgf", "recurrence"}))
            ->capture_default_str();
        a_dist->add_option("--convention", analyze.convention, "n = 1 boundary: product or literal")
            ->check(CLI::IsMember({"product", "literal"}))
            ->capture_default_str();
        a_stirling->add_option("--limit", analyze.limit, "enumeration cap")->capture_default_str();

        s_cmd = app.add_subcommand("simulate", "run the protocol on a simulated network");
        s_cmd->add_option("--n", sim.n)->envname("PATHREV_N")->check(CLI::PositiveNumber)->capture_default_str();
        s_cmd->add_option("--topology", sim.topology, "complete | sparse:<M> | regular:<r>")
            ->envname("PATHREV_TOPOLOGY")
            ->capture_default_str();
        s_cmd->add_option("--lambda", sim.lambda, "per-node request rate")
            ->envname("PATHREV_LAMBDA")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        s_cmd->add_option("--sigma", sim.sigma, "CS duration")
            ->envname("PATHREV_SIGMA")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        s_cmd->add_option("--delta", sim.delta, "constant delay, or min,max")
            ->envname("PATHREV_DELTA")
            ->delimiter(',')
            ->expected(1, 2)
            ->capture_default_str();
        s_cmd->add_option("--requests", sim.requests, "requests issued before draining")
            ->envname("PATHREV_REQUESTS")
            ->capture_default_str();
        s_cmd->add_option("--max-time", sim.max_time, "stop issuing requests at this time")
            ->envname("PATHREV_MAX_TIME");
        s_cmd->add_option("--max-events", sim.max_events, "event budget; a run cut short reports a liveness failure")
            ->capture_default_str();
        s_cmd->add_option("--seed", sim.seed)->envname("PATHREV_SEED")->required();
        s_cmd->add_option("--mode", sim.mode)
            ->envname("PATHREV_MODE")
            ->check(CLI::IsMember({"poisson", "sequential"}))
            ->capture_default_str();
        s_cmd->add_option("--format", sim.format)->envname("PATHREV_FORMAT")->check(formats)->capture_default_str();
        s_cmd->add_option("--replications", sim.replications, "independent runs with seeds seed, seed+1, ...")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        s_cmd->add_option("--jobs", sim.jobs, "worker threads for replications")
            ->envname("PATHREV_JOBS")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        add_out(s_cmd);

        auto* qu = app.add_subcommand("queue", "birth-death waiting-time model");
        qu->require_subcommand(1);
        q_eval = qu->add_subcommand("eval", "state probabilities and waiting times");
        q_eval->add_option("--n", queue.n)->envname("PATHREV_N")->check(CLI::PositiveNumber)->capture_default_str();
        q_eval->add_option("--lambda", queue.lambda)->envname("PATHREV_LAMBDA")->capture_default_str();
        q_eval->add_option("--sigma", queue.sigma)->envname("PATHREV_SIGMA")->capture_default_str();
        q_eval->add_option("--delta", queue.delta)->envname("PATHREV_DELTA")->capture_default_str();
        q_eval->add_flag("--exact", queue.exact, "rational arithmetic; inputs as decimals or p/q");
        q_eval->add_option("--format", queue.format)->check(formats)->capture_default_str();
        add_out(q_eval);

        auto* bi = app.add_subcommand("bijection", "exhaustive bijection checks");
        bi->require_subcommand(1);
        b_check = bi->add_subcommand("check", "round-trip every permutation of [n]");
        b_check->add_option("--n", bij.n)->required();
        b_check->add_option("--format", bij.format)->check(CLI::IsMember({"text", "json", "csv"}))
            ->capture_default_str();
        add_out(b_check);

        auto* re = app.add_subcommand("reproduce", "headline experiments");
        re->require_subcommand(1);
        r_31 = re->add_subcommand("theorem31", "mean messages per CS entry against H_{n-1}");
        r_41 = re->add_subcommand("theorem41", "simulated waiting time against the queueing model");
        r_51 = re->add_subcommand("lemma51", "hop counts on random sparse and regular graphs");
        for (auto* c : {r_31, r_41, r_51}) {
            c->add_option("--seed", repro.seed)->required();
            c->add_option("--format", repro.format)->check(formats)->capture_default_str();
            add_out(c);
        }
        r_31->add_option("--n", repro.n)->capture_default_str();
        r_31->add_option("--requests", repro.requests)->capture_default_str();
        r_41->add_option("--n", repro.queue_n)->check(CLI::PositiveNumber)->capture_default_str();
        r_41->add_option("--requests", repro.queue_requests)->capture_default_str();
        r_41->add_option("--lambda", repro.lambda)->check(CLI::PositiveNumber)->capture_default_str();
        r_41->add_option("--sigma", repro.sigma)->check(CLI::PositiveNumber)->capture_default_str();
        r_41->add_option("--delta", repro.delta)->check(CLI::PositiveNumber)->capture_default_str();
        r_51->add_option("--sizes", repro.sizes)->delimiter(',')->capture_default_str();
        r_51->add_option("--runs", repro.runs, "runs per (family, size)")->capture_default_str();
        r_51->add_option("--requests", repro.run_requests, "sequential requests per run")->capture_default_str();
        r_51->add_option("--sparse-degree", repro.sparse_degree, "average degree; M = n * degree / 2")
            ->capture_default_str();
        r_51->add_option("--regular-degree", repro.regular_degree)->capture_default_str();

        replay = app.add_subcommand("replay", "rerun a manifest and compare the output checksum");
        replay->add_option("manifest", manifest_path)->required()->check(CLI::ExistingFile);
        replay->add_flag("--print", replay_print, "also print the regenerated output");
    }

    /// The subcommand chain that was selected, e.g. {"analyze", "dist"}.
    std::pair<CLI::App*, std::vector<std::string>> selected()
    {
        std::vector<std::string> path;
        CLI::App* at = &app;
        while (true) {
            auto subs = at->get_subcommands();
            if (subs.empty()) {
                break;
            }
            at = subs.front();
            path.push_back(at->get_name());
        }
        return {at, path};
    }

    Invocation bind()
    {
        auto [leaf, path] = selected();
        Invocation inv;
        inv.canonical = canonical_args(leaf, path);
        if (leaf == a_dist) {
            inv.action = [this] { return analyze_dist(analyze); };
        } else if (leaf == a_moments) {
            inv.action = [this] { return analyze_moments(analyze); };
        } else if (leaf == a_stirling) {
            inv.action = [this] { return analyze_stirling(analyze); };
        } else if (leaf == s_cmd) {
            inv.seed = sim.seed;
            inv.action = [this] { return simulate(sim); };
        } else if (leaf == q_eval) {
            inv.action = [this] { return queue_eval(queue); };
        } else if (leaf == b_check) {
            inv.action = [this] { return bijection_check(bij); };
        } else if (leaf == r_31) {
            inv.seed = repro.seed;
            inv.action = [this] { return reproduce_theorem31(repro); };
        } else if (leaf == r_41) {
            inv.seed = repro.seed;
            inv.action = [this] { return reproduce_theorem41(repro); };
        } else if (leaf == r_51) {
            inv.seed = repro.seed;
            inv.action = [this] { return reproduce_lemma51(repro); };
        }
        return inv;
    }
};

/// Parses and runs one command line (without argv[0]).
int run_once(std::vector<std::string> args, Result& result, Invocation& inv, Cli& cli)
{
    std::reverse(args.begin(), args.end());
    try {
        cli.app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return cli.app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return cli.app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return cli.app.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.app.exit(e);
        return kUsage;
    }
    inv = cli.bind();
    if (!inv.action) {
        return -1; // replay, handled by the caller
    }
    result = inv.action();
    return result.status;
}

int write_outputs(const Result& r, const Invocation& inv, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << r.text;
        return r.status;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot write " << out_path << '\n';
        return kUsage;
    }
    f << r.text;
    f.close();
    ordered_json m{{"tool", "pathrev"},
                   {"version", kVersion},
                   {"command", inv.canonical},
                   {"seed", inv.seed ? ordered_json(*inv.seed) : ordered_json(nullptr)},
                   {"output", out_path},
                   {"sha256", sha256_hex(r.text)},
                   {"exit_status", r.status}};
    std::ofstream mf(out_path + ".manifest.json", std::ios::binary);
    mf << m.dump(2) << '\n';
    return r.status;
}

int do_replay(const std::string& path, bool print)
{
    std::ifstream f(path);
    ordered_json m;
    try {
        m = ordered_json::parse(f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
        return kUsage;
    }
    if (!m.contains("command") || !m.contains("sha256")) {
        std::cerr << "error: " << path << ": not a pathrev manifest\n";
        return kUsage;
    }
    if (m.value("version", "") != kVersion) {
        std::cerr << "warning: manifest from version " << m.value("version", "?") << ", running " << kVersion
                  << '\n';
    }
    Cli cli;
    Result r;
    Invocation inv;
    const int st = run_once(m["command"].get<std::vector<std::string>>(), r, inv, cli);
    if (st == kUsage || !inv.action) {
        return kUsage;
    }
    if (print) {
        std::cout << r.text;
    }
    const std::string got = sha256_hex(r.text);
    if (got != m["sha256"].get<std::string>()) {
        std::cerr << "MISMATCH: " << got << " != " << m["sha256"].get<std::string>() << '\n';
        return kInvariant;
    }
    std::cerr << "OK: output matches " << got << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    Cli cli;
    Result result;
    Invocation inv;
    try {
        const int st = run_once(args, result, inv, cli);
        if (!inv.action) {
            if (st != -1) {
                return st;
            }
            return do_replay(cli.manifest_path, cli.replay_print);
        }
        return write_outputs(result, inv, cli.out_path);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const TopologyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ProtocolViolation& e) {
        std::cerr << "protocol violation: " << e.what() << '\n';
        return kInvariant;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
