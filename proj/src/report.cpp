#include "opinionet/report.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace opinionet {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void print_groups(std::ostream& os, const std::vector<std::vector<int>>& groups) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g) os << ' ';
        os << '{';
        for (std::size_t i = 0; i < groups[g].size(); ++i) {
            if (i) os << ',';
            os << groups[g][i] + 1;
        }
        os << '}';
    }
}

}  // namespace

std::string render_analysis(const AnalysisReport& report, const Scenario& scenario) {
    std::ostringstream os;
    os << "analysis " << scenario.name << "\n";
    os << "agents " << scenario.topology.agent_count << "  topics "
       << scenario.topology.topic_count << "  edges " << scenario.topology.edge_count()
       << "\n\n";

    os << "couplings:\n";
    for (std::size_t k = 0; k < report.spectral.per_edge.size(); ++k) {
        const Edge& e = scenario.topology.edges[k];
        const EigenvalueCheck& check = report.spectral.per_edge[k];
        os << "  edge (" << e.tail + 1 << "," << e.head + 1 << "): "
           << to_string(check.definiteness) << ", eigenvalues";
        for (Eigen::Index i = 0; i < check.eigenvalues.size(); ++i) {
            os << ' ' << num(check.eigenvalues(i));
        }
        os << "\n";
    }
    os << "  all positive semidefinite: " << (report.spectral.all_psd ? "yes" : "no") << "\n\n";

    os << "classification:\n";
    os << "  topic-coupled:";
    for (std::size_t p = 0; p < report.classification.topic_coupled.size(); ++p) {
        os << ' ' << (report.classification.topic_coupled[p] ? "yes" : "no");
    }
    os << "\n";
    os << "  all-topic coupled: " << (report.classification.all_topic_coupled ? "yes" : "no")
       << "\n";
    os << "  homogeneous: " << (report.classification.homogeneous ? "yes" : "no") << "\n";
    os << "  direct gains all zero: "
       << (report.classification.no_direct_coupling ? "yes" : "no") << "\n";
    os << "  every cross pair coupled: "
       << (report.classification.fully_cross_coupled ? "yes" : "no") << "\n\n";

    os << "topic consensus graphs:\n";
    for (const TopicConsensusGraph& g : report.topic_graphs) {
        os << "  topic " << g.topic + 1 << ": "
           << (g.connected() ? "connected" : "disconnected") << ", components ";
        print_groups(os, g.components);
        os << "\n";
    }
    os << "\n";

    os << "regime " << to_string(report.regime) << "\n";
    if (report.cluster_bound) {
        os << "cluster bound " << *report.cluster_bound << "\n";
    }
    for (const std::string& w : report.warnings) os << "warning: " << w << "\n";
    if (scenario.feedback.smoothing == SignSmoothing::Exact) {
        os << "note: exact signs make the dynamics discontinuous; sigmoid smoothing "
              "is the default\n";
    }
    return os.str();
}

std::string render_outcome(const SimOutcome& outcome, const Scenario& scenario) {
    std::ostringstream os;
    os << "outcome " << scenario.name << "\n";
    os << "settled " << (outcome.settled ? "yes" : "no") << "  (|xdot| = "
       << num(outcome.final_velocity) << ", threshold "
       << num(scenario.solver.steady_tolerance) << ")\n";
    for (std::size_t p = 0; p < outcome.topics.size(); ++p) {
        const TopicVerdict& verdict = outcome.topics[p];
        os << "topic " << p + 1 << ": ";
        if (verdict.consensus) {
            os << "consensus at " << num(verdict.group_values.front());
        } else {
            os << verdict.groups.size() << " groups ";
            print_groups(os, verdict.groups);
            os << " at";
            for (double v : verdict.group_values) os << ' ' << num(v);
        }
        os << "\n";
    }
    os << "global clusters ";
    print_groups(os, outcome.clusters);
    os << "\n";
    os << "lyapunov non-increasing " << (outcome.lyapunov_monotone ? "yes" : "no") << "\n";
    os << "mean drift " << num(outcome.mean_drift) << "\n";
    if (scenario.feedback.smoothing == SignSmoothing::Exact) {
        os << "note: exact signs make the dynamics discontinuous; sigmoid smoothing "
              "is the default\n";
    }
    return os.str();
}

std::string render_reconciliation(const Reconciliation& reconciliation,
                                  const AnalysisReport& report, const Scenario& scenario) {
    std::ostringstream os;
    os << "compare " << scenario.name << "\n";
    os << "predicted regime " << to_string(report.regime) << "\n";
    os << "status " << to_string(reconciliation.status) << "\n";
    for (const std::string& note : reconciliation.notes) os << "note: " << note << "\n";
    return os.str();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, int stride) {
    if (stride < 1) stride = 1;
    out << "t,agent,topic,value\n";
    const std::size_t last = trajectory.size() - 1;
    for (std::size_t k = 0; k <= last; k += static_cast<std::size_t>(stride)) {
        const std::size_t idx = k;
        char tbuf[32];
        std::snprintf(tbuf, sizeof(tbuf), "%.10g", trajectory.times[idx]);
        for (int i = 0; i < trajectory.agent_count; ++i) {
            for (int p = 0; p < trajectory.topic_count; ++p) {
                char vbuf[32];
                std::snprintf(vbuf, sizeof(vbuf), "%.12g",
                              trajectory.states[idx](
                                  static_cast<Eigen::Index>(i) * trajectory.topic_count + p));
                out << tbuf << ',' << i + 1 << ',' << p + 1 << ',' << vbuf << '\n';
            }
        }
        if (idx == last) return;
        if (idx + static_cast<std::size_t>(stride) > last) {
            // Emit the final step even when the stride does not land on it.
            char fbuf[32];
            std::snprintf(fbuf, sizeof(fbuf), "%.10g", trajectory.times[last]);
            for (int i = 0; i < trajectory.agent_count; ++i) {
                for (int p = 0; p < trajectory.topic_count; ++p) {
                    char vbuf[32];
                    std::snprintf(vbuf, sizeof(vbuf), "%.12g",
                                  trajectory.states[last](
                                      static_cast<Eigen::Index>(i) * trajectory.topic_count + p));
                    out << fbuf << ',' << i + 1 << ',' << p + 1 << ',' << vbuf << '\n';
                }
            }
            return;
        }
    }
}

}  // namespace opinionet
