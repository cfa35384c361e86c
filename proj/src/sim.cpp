#include "opinionet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "opinionet/weights.hpp"

namespace opinionet {

namespace {

Eigen::VectorXd dynamics(const Topology& topology, const CouplingSpec& spec,
                         const FeedbackConfig& config, const Eigen::VectorXd& x) {
    const OpinionState state(topology.agent_count, topology.topic_count, x);
    return -(assemble_laplacian(topology, spec, config, state) * x);
}

std::string group_to_string(const std::vector<int>& group) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (i) os << ',';
        os << group[i] + 1;
    }
    os << '}';
    return os.str();
}

std::string groups_to_string(const std::vector<std::vector<int>>& groups) {
    std::ostringstream os;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i) os << ' ';
        os << group_to_string(groups[i]);
    }
    return os.str();
}

// Canonical form for partition comparison: members sorted, groups ordered by
// first member.
std::vector<std::vector<int>> canonical(std::vector<std::vector<int>> groups) {
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end());
    return groups;
}

}  // namespace

Trajectory integrate(const Topology& topology, const CouplingSpec& spec,
                     const FeedbackConfig& config, const OpinionState& initial,
                     const SolverSettings& settings) {
    check_feedback(config);
    if (!(settings.step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(settings.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!initial.finite()) throw std::invalid_argument("initial state must be finite");
    if (initial.agent_count() != topology.agent_count ||
        initial.topic_count() != topology.topic_count) {
        throw std::invalid_argument("initial state does not match the topology");
    }
    if (!spec.cooperative() && !settings.allow_unstable) {
        throw std::invalid_argument(
            "anti-coupled specs can diverge; set allow_unstable to simulate them");
    }

    const double h = settings.step;
    const long steps = std::lround(settings.horizon / h);
    const double guard = 1e6 * initial.vec().cwiseAbs().maxCoeff();

    Trajectory traj;
    traj.agent_count = topology.agent_count;
    traj.topic_count = topology.topic_count;
    traj.step = h;
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);

    auto record = [&](double t, const Eigen::VectorXd& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.lyapunov.push_back(0.5 * x.squaredNorm());
        const QuadraticForm q = quadratic_form(
            topology, spec, config, OpinionState(topology.agent_count, topology.topic_count, x));
        traj.lyapunov_rate.push_back(-q.total);
        traj.dissipation_direct.push_back(q.direct);
        traj.dissipation_cross.push_back(q.cross);
    };

    Eigen::VectorXd x = initial.vec();
    record(0.0, x);
    for (long k = 1; k <= steps; ++k) {
        const Eigen::VectorXd k1 = dynamics(topology, spec, config, x);
        const Eigen::VectorXd k2 = dynamics(topology, spec, config, x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = dynamics(topology, spec, config, x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = dynamics(topology, spec, config, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double t = static_cast<double>(k) * h;
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > guard) {
            throw SimulationDiverged(t, x.cwiseAbs().maxCoeff());
        }
        record(t, x);
    }

    traj.final_velocity =
        dynamics(topology, spec, config, x).cwiseAbs().maxCoeff();
    return traj;
}

LyapunovTrace lyapunov_trace(const Trajectory& trajectory) {
    LyapunovTrace trace;
    trace.values = trajectory.lyapunov;
    trace.rates = trajectory.lyapunov_rate;
    trace.tolerance = 1e-9 * (trajectory.lyapunov.empty() ? 0.0 : trajectory.lyapunov.front());
    for (std::size_t k = 1; k < trajectory.lyapunov.size(); ++k) {
        const double increase = trajectory.lyapunov[k] - trajectory.lyapunov[k - 1];
        trace.max_increase = std::max(trace.max_increase, increase);
    }
    trace.max_increase = std::max(trace.max_increase, 0.0);
    trace.monotone = trace.max_increase <= trace.tolerance;
    return trace;
}

SimOutcome detect_clusters(const Trajectory& trajectory, double cluster_tolerance,
                           double steady_tolerance) {
    const int n = trajectory.agent_count;
    const int d = trajectory.topic_count;
    const Eigen::VectorXd& x = trajectory.final_state();

    SimOutcome outcome;
    outcome.final_velocity = trajectory.final_velocity;
    outcome.settled = trajectory.final_velocity < steady_tolerance;
    outcome.lyapunov_monotone = lyapunov_trace(trajectory).monotone;
    outcome.mean_drift = conservation_drift(trajectory);

    // Per topic: sort agents by final value, chain while adjacent gaps stay
    // within tolerance.
    std::vector<std::vector<int>> group_of_topic(static_cast<std::size_t>(d),
                                                 std::vector<int>(static_cast<std::size_t>(n)));
    for (int p = 0; p < d; ++p) {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return x(static_cast<Eigen::Index>(a) * d + p) < x(static_cast<Eigen::Index>(b) * d + p);
        });

        TopicVerdict verdict;
        std::vector<int> current{order[0]};
        auto value = [&](int agent) { return x(static_cast<Eigen::Index>(agent) * d + p); };
        for (int idx = 1; idx < n; ++idx) {
            if (value(order[static_cast<std::size_t>(idx)]) -
                    value(order[static_cast<std::size_t>(idx - 1)]) <=
                cluster_tolerance) {
                current.push_back(order[static_cast<std::size_t>(idx)]);
            } else {
                verdict.groups.push_back(current);
                current = {order[static_cast<std::size_t>(idx)]};
            }
        }
        verdict.groups.push_back(current);
        verdict.groups = canonical(verdict.groups);
        verdict.consensus = verdict.groups.size() == 1;
        for (std::size_t g = 0; g < verdict.groups.size(); ++g) {
            double sum = 0.0;
            for (int agent : verdict.groups[g]) sum += value(agent);
            verdict.group_values.push_back(sum / static_cast<double>(verdict.groups[g].size()));
            for (int agent : verdict.groups[g]) {
                group_of_topic[static_cast<std::size_t>(p)][static_cast<std::size_t>(agent)] =
                    static_cast<int>(g);
            }
        }
        outcome.topics.push_back(std::move(verdict));
    }

    // Global clusters: agents matching on every topic's grouping.
    std::vector<int> assigned(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (assigned[static_cast<std::size_t>(i)] >= 0) continue;
        const int cluster = static_cast<int>(outcome.clusters.size());
        outcome.clusters.push_back({i});
        assigned[static_cast<std::size_t>(i)] = cluster;
        for (int j = i + 1; j < n; ++j) {
            if (assigned[static_cast<std::size_t>(j)] >= 0) continue;
            bool same = true;
            for (int p = 0; p < d && same; ++p) {
                same = group_of_topic[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)] ==
                       group_of_topic[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
            }
            if (same) {
                outcome.clusters[static_cast<std::size_t>(cluster)].push_back(j);
                assigned[static_cast<std::size_t>(j)] = cluster;
            }
        }
    }
    outcome.clusters = canonical(outcome.clusters);
    return outcome;
}

ClusterPartition SimOutcome::partition() const {
    ClusterPartition p;
    p.topic_components.reserve(topics.size());
    for (const TopicVerdict& verdict : topics) p.topic_components.push_back(verdict.groups);
    p.clusters = clusters;
    return p;
}

double conservation_drift(const Trajectory& trajectory) {
    const int n = trajectory.agent_count;
    const int d = trajectory.topic_count;

    auto topic_sums = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < n; ++i) {
            sums += x.segment(static_cast<Eigen::Index>(i) * d, d);
        }
        return sums;
    };

    const Eigen::VectorXd initial = topic_sums(trajectory.states.front());
    double drift = 0.0;
    for (const Eigen::VectorXd& x : trajectory.states) {
        drift = std::max(drift, (topic_sums(x) - initial).cwiseAbs().maxCoeff());
    }
    return drift;
}

const char* to_string(MatchStatus status) {
    switch (status) {
        case MatchStatus::Pass: return "PASS";
        case MatchStatus::Fail: return "FAIL";
        case MatchStatus::Informational: return "INFO";
    }
    return "?";
}

Reconciliation compare(const AnalysisReport& report, const SimOutcome& outcome) {
    Reconciliation rec;

    if (report.regime == Regime::NoGuarantee) {
        rec.status = MatchStatus::Informational;
        rec.notes.push_back("analysis gave no guarantee; observed outcome recorded");
        bool all = true;
        for (std::size_t p = 0; p < outcome.topics.size(); ++p) {
            if (!outcome.topics[p].consensus) {
                all = false;
                rec.notes.push_back("topic " + std::to_string(p + 1) + " split into " +
                                    groups_to_string(outcome.topics[p].groups));
            }
        }
        if (all) rec.notes.push_back("consensus observed on every topic");
        if (!outcome.settled) rec.notes.push_back("run not settled; extend the horizon");
        return rec;
    }

    if (!outcome.settled) {
        rec.status = MatchStatus::Fail;
        rec.notes.push_back("run not settled at the horizon; extend it before comparing");
        return rec;
    }

    if (report.regime == Regime::CompleteConsensus) {
        bool all = true;
        for (std::size_t p = 0; p < outcome.topics.size(); ++p) {
            if (!outcome.topics[p].consensus) {
                all = false;
                rec.notes.push_back("predicted consensus but topic " + std::to_string(p + 1) +
                                    " split into " + groups_to_string(outcome.topics[p].groups));
            }
        }
        rec.status = all ? MatchStatus::Pass : MatchStatus::Fail;
        if (all) rec.notes.push_back("complete consensus confirmed on every topic");
        return rec;
    }

    // Partial consensus: observed per-topic groups must equal the predicted
    // components, and the global cluster count must respect the bound.
    bool ok = true;
    for (std::size_t p = 0; p < report.topic_graphs.size(); ++p) {
        const auto predicted = canonical(report.topic_graphs[p].components);
        const auto observed = canonical(outcome.topics[p].groups);
        if (predicted != observed) {
            ok = false;
            rec.notes.push_back("topic " + std::to_string(p + 1) + ": predicted " +
                                groups_to_string(predicted) + " but observed " +
                                groups_to_string(observed));
        }
    }
    if (report.cluster_bound &&
        static_cast<int>(outcome.clusters.size()) > *report.cluster_bound) {
        ok = false;
        rec.notes.push_back("observed " + std::to_string(outcome.clusters.size()) +
                            " global clusters, above the bound " +
                            std::to_string(*report.cluster_bound));
    }
    rec.status = ok ? MatchStatus::Pass : MatchStatus::Fail;
    if (ok) {
        rec.notes.push_back("per-topic components match; " +
                            std::to_string(outcome.clusters.size()) +
                            " global clusters within bound " +
                            std::to_string(report.cluster_bound.value_or(0)));
    }
    return rec;
}

}  // namespace opinionet
