#include "opinionet/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace opinionet {

OpinionState Scenario::initial_state() const {
    const int n = topology.agent_count;
    const int d = topology.topic_count;
    OpinionState state(n, d);
    for (int i = 0; i < n; ++i) {
        for (int p = 0; p < d; ++p) state(i, p) = initial_opinions(i, p);
    }
    return state;
}

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream os;
    os << "scenario has " << issues.size() << " issue(s):";
    for (const std::string& issue : issues) os << "\n  - " << issue;
    return os.str();
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> issues_in)
    : std::runtime_error(join_issues(issues_in)), issues(std::move(issues_in)) {}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Parser state: collects raw fields first, assembles and validates at the
// end so one pass reports as many issues as possible.
struct ParsedEdge {
    int line = 0;
    int a = 0;  // 1-based as written
    int b = 0;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<int, int>> anti_pairs;  // 1-based topic pairs
};

class Parser {
public:
    explicit Parser(const std::string& source) : source_(source) {}

    void issue(int line, const std::string& text) {
        std::ostringstream os;
        os << source_;
        if (line > 0) os << ":" << line;
        os << ": " << text;
        issues_.push_back(os.str());
    }

    bool number(const std::string& tok, double& out, int line, const std::string& what) {
        std::size_t pos = 0;
        try {
            out = std::stod(tok, &pos);
        } catch (const std::exception&) {
            issue(line, "expected a number for " + what + ", got '" + tok + "'");
            return false;
        }
        if (pos != tok.size() || !std::isfinite(out)) {
            issue(line, "malformed number for " + what + ": '" + tok + "'");
            return false;
        }
        return true;
    }

    bool integer(const std::string& tok, int& out, int line, const std::string& what) {
        double v = 0.0;
        if (!number(tok, v, line, what)) return false;
        if (v != std::floor(v)) {
            issue(line, what + " must be an integer, got '" + tok + "'");
            return false;
        }
        out = static_cast<int>(v);
        return true;
    }

    Scenario run(std::istream& in);

private:
    void handle_line(const std::vector<std::string>& tokens, int line);
    Scenario assemble();

    std::string source_;
    std::vector<std::string> issues_;

    std::string name_;
    int agents_ = -1;
    int topics_ = -1;
    FeedbackConfig feedback_;
    SolverSettings solver_;
    int stride_ = 100;
    std::vector<ParsedEdge> edges_;
    std::map<int, std::pair<int, std::vector<double>>> opinions_;  // agent -> (line, values)
    std::ptrdiff_t open_edge_ = -1;  // index of the edge block being read
    int matrix_rows_needed_ = 0;
};

void Parser::handle_line(const std::vector<std::string>& tokens, int line) {
    const std::string& key = tokens[0];

    if (matrix_rows_needed_ > 0 && key != "anti") {
        // Expect one matrix row: d numbers.
        if (static_cast<int>(tokens.size()) != topics_) {
            issue(line, "coupling row needs exactly " + std::to_string(topics_) +
                            " entries, got " + std::to_string(tokens.size()));
            matrix_rows_needed_ = 0;
            return;
        }
        std::vector<double> row;
        for (const std::string& tok : tokens) {
            double v = 0.0;
            if (number(tok, v, line, "coupling gain")) {
                if (v < 0.0) {
                    issue(line, "negative gain '" + tok +
                                    "' (write the magnitude and flag the pair with 'anti')");
                }
                row.push_back(v);
            } else {
                row.push_back(0.0);
            }
        }
        edges_[static_cast<std::size_t>(open_edge_)].rows.push_back(std::move(row));
        --matrix_rows_needed_;
        return;
    }

    auto need_value = [&](std::size_t count) {
        if (tokens.size() != count + 1) {
            issue(line, "'" + key + "' takes " + std::to_string(count) + " value(s)");
            return false;
        }
        return true;
    };

    if (key == "name") {
        if (need_value(1)) name_ = tokens[1];
    } else if (key == "agents") {
        if (need_value(1)) integer(tokens[1], agents_, line, "agents");
    } else if (key == "topics") {
        if (need_value(1)) integer(tokens[1], topics_, line, "topics");
    } else if (key == "feedback") {
        if (need_value(1)) {
            if (tokens[1] == "inverse-proportional") {
                feedback_.mode = FeedbackMode::InverseProportional;
            } else if (tokens[1] == "proportional") {
                feedback_.mode = FeedbackMode::Proportional;
            } else {
                issue(line, "feedback must be inverse-proportional or proportional");
            }
        }
    } else if (key == "smoothing") {
        if (need_value(1)) {
            if (tokens[1] == "exact") {
                feedback_.smoothing = SignSmoothing::Exact;
            } else if (tokens[1] == "sigmoid") {
                feedback_.smoothing = SignSmoothing::Sigmoid;
            } else if (tokens[1] == "signum") {
                feedback_.smoothing = SignSmoothing::Signum;
            } else {
                issue(line, "smoothing must be exact, sigmoid, or signum");
            }
        }
    } else if (key == "c0") {
        if (need_value(1)) number(tokens[1], feedback_.c0, line, "c0");
    } else if (key == "c1") {
        if (need_value(1)) number(tokens[1], feedback_.c1, line, "c1");
    } else if (key == "c2") {
        if (need_value(1)) number(tokens[1], feedback_.c2, line, "c2");
    } else if (key == "ke") {
        if (need_value(1)) number(tokens[1], feedback_.sigmoid_gain, line, "ke");
    } else if (key == "alpha") {
        if (need_value(1)) number(tokens[1], feedback_.signum_exponent, line, "alpha");
    } else if (key == "step" || key == "h") {
        if (need_value(1)) number(tokens[1], solver_.step, line, "step");
    } else if (key == "horizon" || key == "tf") {
        if (need_value(1)) number(tokens[1], solver_.horizon, line, "horizon");
    } else if (key == "cluster-tol") {
        if (need_value(1)) number(tokens[1], solver_.cluster_tolerance, line, "cluster-tol");
    } else if (key == "steady-tol") {
        if (need_value(1)) number(tokens[1], solver_.steady_tolerance, line, "steady-tol");
    } else if (key == "stride") {
        if (need_value(1)) integer(tokens[1], stride_, line, "stride");
    } else if (key == "allow-unstable") {
        if (need_value(1)) {
            if (tokens[1] == "true" || tokens[1] == "false") {
                solver_.allow_unstable = tokens[1] == "true";
            } else {
                issue(line, "allow-unstable must be true or false");
            }
        }
    } else if (key == "edge") {
        if (topics_ <= 0) {
            issue(line, "'edge' must come after 'topics'");
            return;
        }
        ParsedEdge e;
        e.line = line;
        if (tokens.size() != 3 || !integer(tokens[1], e.a, line, "edge endpoint") ||
            !integer(tokens[2], e.b, line, "edge endpoint")) {
            issue(line, "'edge' takes two agent indices");
            return;
        }
        edges_.push_back(e);
        open_edge_ = static_cast<std::ptrdiff_t>(edges_.size()) - 1;
        matrix_rows_needed_ = topics_;
    } else if (key == "anti") {
        if (open_edge_ < 0) {
            issue(line, "'anti' must follow an edge block");
            return;
        }
        int p = 0;
        int q = 0;
        if (tokens.size() != 3 || !integer(tokens[1], p, line, "anti topic") ||
            !integer(tokens[2], q, line, "anti topic")) {
            issue(line, "'anti' takes two topic indices");
            return;
        }
        edges_[static_cast<std::size_t>(open_edge_)].anti_pairs.emplace_back(p, q);
    } else if (key == "opinion") {
        if (topics_ <= 0) {
            issue(line, "'opinion' must come after 'topics'");
            return;
        }
        if (static_cast<int>(tokens.size()) != topics_ + 2) {
            issue(line, "'opinion' takes an agent index and " + std::to_string(topics_) +
                            " values");
            return;
        }
        int agent = 0;
        if (!integer(tokens[1], agent, line, "opinion agent")) return;
        std::vector<double> values;
        for (std::size_t t = 2; t < tokens.size(); ++t) {
            double v = 0.0;
            number(tokens[t], v, line, "opinion value");
            values.push_back(v);
        }
        if (opinions_.count(agent)) {
            issue(line, "duplicate opinion for agent " + std::to_string(agent));
        } else {
            opinions_[agent] = {line, std::move(values)};
        }
    } else {
        issue(line, "unknown key '" + key + "'");
    }
}

Scenario Parser::assemble() {
    Scenario scenario;
    scenario.name = name_.empty() ? "unnamed" : name_;
    scenario.feedback = feedback_;
    scenario.solver = solver_;
    scenario.output_stride = stride_;

    // Without valid counts and solver settings nothing below can be checked;
    // other issues keep accumulating so one parse reports them all.
    bool usable = true;
    if (agents_ < 1) {
        issue(0, "missing or invalid 'agents'");
        usable = false;
    }
    if (topics_ < 1) {
        issue(0, "missing or invalid 'topics'");
        usable = false;
    }
    if (stride_ < 1) {
        issue(0, "'stride' must be >= 1");
        usable = false;
    }
    if (!(solver_.step > 0.0)) {
        issue(0, "'step' must be positive");
        usable = false;
    }
    if (!(solver_.horizon > 0.0)) {
        issue(0, "'horizon' must be positive");
        usable = false;
    }
    if (!usable) throw ScenarioError(issues_);

    scenario.topology.agent_count = agents_;
    scenario.topology.topic_count = topics_;
    for (const ParsedEdge& e : edges_) {
        if (e.a < 1 || e.a > agents_ || e.b < 1 || e.b > agents_) {
            issue(e.line, "edge endpoint out of range 1.." + std::to_string(agents_));
            continue;
        }
        scenario.topology.edges.push_back(
            Edge{std::min(e.a, e.b) - 1, std::max(e.a, e.b) - 1});

        CouplingMatrix coupling(topics_);
        if (static_cast<int>(e.rows.size()) == topics_) {
            for (int p = 0; p < topics_; ++p) {
                for (int q = 0; q < topics_; ++q) {
                    coupling.set_entry(p, q, e.rows[static_cast<std::size_t>(p)]
                                                   [static_cast<std::size_t>(q)]);
                }
            }
        } else {
            issue(e.line, "edge block needs " + std::to_string(topics_) + " coupling rows");
        }
        for (const auto& [p, q] : e.anti_pairs) {
            if (p < 1 || p > topics_ || q < 1 || q > topics_) {
                issue(e.line, "anti topic pair out of range 1.." + std::to_string(topics_));
                continue;
            }
            coupling.set_entry(p - 1, q - 1, coupling.gain(p - 1, q - 1), true);
            coupling.set_entry(q - 1, p - 1, coupling.gain(q - 1, p - 1), true);
        }
        scenario.coupling.per_edge.push_back(std::move(coupling));
    }

    scenario.initial_opinions = Eigen::MatrixXd::Zero(agents_, topics_);
    for (int i = 1; i <= agents_; ++i) {
        auto it = opinions_.find(i);
        if (it == opinions_.end()) {
            issue(0, "missing opinion for agent " + std::to_string(i));
            continue;
        }
        for (int p = 0; p < topics_; ++p) {
            scenario.initial_opinions(i - 1, p) = it->second.second[static_cast<std::size_t>(p)];
        }
    }
    for (const auto& [agent, entry] : opinions_) {
        if (agent < 1 || agent > agents_) {
            issue(entry.first, "opinion agent out of range 1.." + std::to_string(agents_));
        }
    }

    if (issues_.empty()) {
        for (const Violation& v : validate(scenario.topology, scenario.coupling)) {
            issue(0, v.rule + ": " + v.detail);
        }
        try {
            check_feedback(scenario.feedback);
        } catch (const std::invalid_argument& e) {
            issue(0, e.what());
        }
    }
    if (!issues_.empty()) throw ScenarioError(issues_);
    return scenario;
}

Scenario Parser::run(std::istream& in) {
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        handle_line(tokenize(text), line);
    }
    if (matrix_rows_needed_ > 0 && open_edge_ >= 0) {
        issue(edges_[static_cast<std::size_t>(open_edge_)].line,
              "edge block ends before its coupling rows are complete");
    }
    return assemble();
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source_name) {
    Parser parser(source_name);
    return parser.run(in);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError({path + ": cannot open file"});
    return parse_scenario(in, path);
}

void write_scenario(const Scenario& scenario, std::ostream& out) {
    const int n = scenario.topology.agent_count;
    const int d = scenario.topology.topic_count;

    out << "name " << scenario.name << "\n";
    out << "agents " << n << "\n";
    out << "topics " << d << "\n\n";

    out << "feedback "
        << (scenario.feedback.mode == FeedbackMode::InverseProportional
                ? "inverse-proportional"
                : "proportional")
        << "\n";
    out << "c0 " << format_number(scenario.feedback.c0) << "\n";
    out << "c1 " << format_number(scenario.feedback.c1) << "\n";
    out << "c2 " << format_number(scenario.feedback.c2) << "\n";
    switch (scenario.feedback.smoothing) {
        case SignSmoothing::Exact: out << "smoothing exact\n"; break;
        case SignSmoothing::Sigmoid: out << "smoothing sigmoid\n"; break;
        case SignSmoothing::Signum: out << "smoothing signum\n"; break;
    }
    out << "ke " << format_number(scenario.feedback.sigmoid_gain) << "\n";
    out << "alpha " << format_number(scenario.feedback.signum_exponent) << "\n\n";

    out << "step " << format_number(scenario.solver.step) << "\n";
    out << "horizon " << format_number(scenario.solver.horizon) << "\n";
    out << "cluster-tol " << format_number(scenario.solver.cluster_tolerance) << "\n";
    out << "steady-tol " << format_number(scenario.solver.steady_tolerance) << "\n";
    out << "stride " << scenario.output_stride << "\n";
    if (scenario.solver.allow_unstable) out << "allow-unstable true\n";
    out << "\n";

    for (std::size_t k = 0; k < scenario.topology.edges.size(); ++k) {
        const Edge& e = scenario.topology.edges[k];
        const CouplingMatrix& coupling = scenario.coupling.per_edge[k];
        out << "edge " << e.tail + 1 << " " << e.head + 1 << "\n";
        for (int p = 0; p < d; ++p) {
            out << " ";
            for (int q = 0; q < d; ++q) out << " " << format_number(coupling.gain(p, q));
            out << "\n";
        }
        for (int p = 0; p < d; ++p) {
            for (int q = p; q < d; ++q) {
                if (coupling.anti(p, q)) out << "anti " << p + 1 << " " << q + 1 << "\n";
            }
        }
    }
    out << "\n";

    for (int i = 0; i < n; ++i) {
        out << "opinion " << i + 1;
        for (int p = 0; p < d; ++p) out << " " << format_number(scenario.initial_opinions(i, p));
        out << "\n";
    }
}

std::string scenario_to_string(const Scenario& scenario) {
    std::ostringstream os;
    write_scenario(scenario, os);
    return os.str();
}

namespace {

using Mat3 = std::vector<std::vector<double>>;

Scenario five_agent_scenario(const std::string& name, const std::vector<Mat3>& couplings) {
    Scenario s;
    s.name = name;
    s.topology = make_topology(5, 3, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}});
    for (const Mat3& rows : couplings) {
        Eigen::MatrixXd m(3, 3);
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) m(p, q) = rows[static_cast<std::size_t>(p)]
                                                      [static_cast<std::size_t>(q)];
        s.coupling.per_edge.push_back(CouplingMatrix::from_dense(m));
    }
    s.initial_opinions.resize(5, 3);
    s.initial_opinions << 1, 2, 3,
                          2, 4, 4,
                          3, 1, 5,
                          4, 3, 2,
                          5, 6, 1;
    // Defaults hold (inverse-proportional, sigmoid, h = 1e-3) except the
    // horizon: 30 time units leave every built-in settled well below the
    // steady threshold, where 20 leaves the slowest ones marginally above it.
    s.solver.horizon = 30.0;
    return s;
}

const Mat3 kBandedCoupling = {{1, 1, 0}, {1, 1, 1}, {0, 1, 1}};

struct BuiltinDef {
    std::string description;
    Scenario (*make)();
};

const std::map<std::string, BuiltinDef>& builtin_table() {
    static const std::map<std::string, BuiltinDef> table = {
        {"fig5",
         {"positive semidefinite couplings, every topic consensus graph connected; "
          "all three topics reach consensus",
          [] {
              return five_agent_scenario("fig5",
                                         {{{1, 1, 0}, {1, 1, 0}, {0, 0, 0}},
                                          {{1, 0, 0}, {0, 1, 1}, {0, 1, 1}},
                                          {{2, 0, 1}, {0, 2, 1}, {1, 1, 2}},
                                          {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}},
                                          {{1, 0, 1}, {0, 1, 0}, {1, 0, 1}}});
          }}},
        {"fig6",
         {"fig5 with the (1,3) and (3,4) couplings restricted to topics 2 and 3; "
          "topic 1 splits into {1,2,3} and {4,5}",
          [] {
              return five_agent_scenario("fig6",
                                         {{{1, 1, 0}, {1, 1, 0}, {0, 0, 0}},
                                          {{0, 0, 0}, {0, 1, 1}, {0, 1, 1}},
                                          {{2, 0, 1}, {0, 2, 1}, {1, 1, 2}},
                                          {{0, 0, 0}, {0, 1, 1}, {0, 1, 1}},
                                          {{1, 0, 1}, {0, 1, 0}, {1, 0, 1}}});
          }}},
        {"fig7",
         {"homogeneous indefinite couplings except edge (3,4), where the direct "
          "gains of topics 1 and 2 are removed; topic 1 splits into {1,2,3} and "
          "{4,5}, topic 2 still reaches consensus",
          [] {
              return five_agent_scenario("fig7",
                                         {kBandedCoupling, kBandedCoupling, kBandedCoupling,
                                          {{0, 1, 0}, {1, 0, 1}, {0, 1, 1}},
                                          kBandedCoupling});
          }}},
        {"fig7p",
         {"fig7 with the direct topic-1 gain restored on edge (3,4); every topic "
          "reaches consensus even though the analysis gives no guarantee",
          [] {
              return five_agent_scenario("fig7p",
                                         {kBandedCoupling, kBandedCoupling, kBandedCoupling,
                                          {{1, 1, 0}, {1, 0, 1}, {0, 1, 1}},
                                          kBandedCoupling});
          }}},
        {"fig8",
         {"couplings on edges (1,3) and (2,3) touch topics 1 and 3 only through "
          "topic 2; topics 1 and 3 split into {1,2} and {3,4,5}, topic 2 reaches "
          "consensus",
          [] {
              const Mat3 cut = {{0, 1, 0}, {1, 1, 1}, {0, 1, 0}};
              return five_agent_scenario(
                  "fig8", {kBandedCoupling, cut, cut, kBandedCoupling, kBandedCoupling});
          }}},
        {"fig9",
         {"zero direct gains with complete coupling graphs on every edge; no "
          "topic reaches consensus",
          [] {
              const Mat3 ring = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
              return five_agent_scenario("fig9", {ring, ring, ring, ring, ring});
          }}},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = {"fig5", "fig6", "fig7",
                                                   "fig7p", "fig8", "fig9"};
    return names;
}

std::string builtin_scenario_description(const std::string& name) {
    const auto it = builtin_table().find(name);
    if (it == builtin_table().end()) {
        throw std::invalid_argument("unknown built-in scenario '" + name + "'");
    }
    return it->second.description;
}

Scenario builtin_scenario(const std::string& name) {
    const auto it = builtin_table().find(name);
    if (it == builtin_table().end()) {
        throw std::invalid_argument("unknown built-in scenario '" + name + "'");
    }
    return it->second.make();
}

}  // namespace opinionet
