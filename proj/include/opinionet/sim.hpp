#pragma once

// Fixed-step integration of the opinion dynamics xdot = -L(x) x, with the
// Lyapunov candidate V = 0.5 |x|^2 monitored along the run, cluster
// detection on the settled state, per-topic mean conservation, and the
// reconciliation of simulated outcomes against the static prediction.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "opinionet/analysis.hpp"
#include "opinionet/core.hpp"

namespace opinionet {

/// Integrator and detector settings. The defaults suit the desk-scale
/// scenarios: the classical fourth-order step at h = 1e-3 resolves the
/// sigmoid-smoothed field comfortably, and the cluster tolerance sits three
/// orders of magnitude under the O(1) separations the dynamics produce.
struct SolverSettings {
    double step = 1e-3;
    double horizon = 20.0;
    double cluster_tolerance = 1e-3;
    double steady_tolerance = 1e-6;
    /// Anti-coupled specs can diverge; simulating one requires opting in.
    bool allow_unstable = false;
};

/// Thrown when the state magnitude exceeds a million times its initial
/// value, which only happens for anti-coupled (unstable) configurations.
class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(double time, double magnitude)
        : std::runtime_error("state diverged at t = " + std::to_string(time)),
          time(time), magnitude(magnitude) {}

    double time;
    double magnitude;
};

/// Sampled solution of one run on the uniform step grid, together with the
/// Lyapunov value, its rate -x^T L x, and the direct/cross split of the
/// dissipation at every step.
struct Trajectory {
    int agent_count = 0;
    int topic_count = 0;
    double step = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<double> lyapunov;           ///< V(t_k)
    std::vector<double> lyapunov_rate;      ///< -x^T L x at t_k
    std::vector<double> dissipation_direct; ///< same-topic part of x^T L x
    std::vector<double> dissipation_cross;  ///< distinct-topic part
    /// Infinity norm of xdot at the final state.
    double final_velocity = 0.0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] const Eigen::VectorXd& final_state() const { return states.back(); }
    [[nodiscard]] double final_time() const { return times.back(); }
    [[nodiscard]] OpinionState state_at(std::size_t k) const {
        return OpinionState(agent_count, topic_count, states[k]);
    }
};

/// Classical fourth-order fixed-step integration of xdot = -L(x) x from the
/// given initial state, re-assembling the Laplacian at every stage. Throws
/// SimulationDiverged when the divergence guard trips and
/// std::invalid_argument for anti-coupled specs without allow_unstable.
Trajectory integrate(const Topology& topology, const CouplingSpec& spec,
                     const FeedbackConfig& config, const OpinionState& initial,
                     const SolverSettings& settings);

/// Monotonicity summary of the Lyapunov value along a trajectory. The
/// tolerance absorbs integration roundoff: an increase counts as a violation
/// only beyond 1e-9 * V(0).
struct LyapunovTrace {
    std::vector<double> values;
    std::vector<double> rates;
    bool monotone = true;
    double max_increase = 0.0;  ///< largest single-step increase, 0 when none
    double tolerance = 0.0;
};

LyapunovTrace lyapunov_trace(const Trajectory& trajectory);

/// Final grouping of one topic: agents chained together when their settled
/// values differ by at most the cluster tolerance.
struct TopicVerdict {
    bool consensus = false;
    std::vector<std::vector<int>> groups;
    std::vector<double> group_values;  ///< mean settled value per group
};

/// Observed outcome of a run.
struct SimOutcome {
    /// Whether |xdot| at the end of the run is below the steady tolerance;
    /// groupings on an unsettled run are provisional and the caller should
    /// extend the horizon.
    bool settled = false;
    double final_velocity = 0.0;
    std::vector<TopicVerdict> topics;
    /// Global clusters: agents grouped together iff they share a group on
    /// every topic.
    std::vector<std::vector<int>> clusters;
    bool lyapunov_monotone = false;
    double mean_drift = 0.0;  ///< from conservation_drift

    /// The per-topic components and global clusters as one partition value.
    [[nodiscard]] ClusterPartition partition() const;
};

/// Groups agents per topic by transitive chaining of their final values with
/// the given gap tolerance, intersects the per-topic groups into global
/// clusters, and records settledness against the steady tolerance.
SimOutcome detect_clusters(const Trajectory& trajectory, double cluster_tolerance,
                           double steady_tolerance);

/// Largest drift, over the whole run and all topics, of the per-topic sum of
/// opinions from its initial value. The symmetric dynamics conserve these
/// sums exactly, so the drift measures integrator roundoff only.
double conservation_drift(const Trajectory& trajectory);

enum class MatchStatus { Pass, Fail, Informational };

const char* to_string(MatchStatus status);

struct Reconciliation {
    MatchStatus status = MatchStatus::Informational;
    std::vector<std::string> notes;
};

/// Checks a simulated outcome against the static prediction. A complete
/// consensus prediction passes iff every topic settled to one group; a
/// partial prediction passes iff the observed per-topic groups equal the
/// predicted components and the number of global clusters respects the
/// bound; when the analysis gave no guarantee the outcome is reported as
/// informational and never fails.
Reconciliation compare(const AnalysisReport& report, const SimOutcome& outcome);

}  // namespace opinionet
