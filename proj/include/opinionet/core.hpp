#pragma once

// Core domain types for multi-topic opinion networks: the interaction
// topology over agents, per-edge topic coupling matrices, feedback
// configuration, opinion state vectors, and structural validation /
// classification utilities shared by the weight, analysis, and simulation
// layers.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace opinionet {

/// One undirected interaction edge. The orientation (tail -> head) is fixed
/// at construction with tail < head so that incidence-based computations are
/// deterministic; weight matrices do not depend on the choice.
struct Edge {
    int tail = 0;
    int head = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected interaction graph over `agent_count` agents discussing
/// `topic_count` topics. Edges are stored in insertion order; the edge index
/// is the row index of the incidence matrix.
struct Topology {
    int agent_count = 0;
    int topic_count = 0;
    std::vector<Edge> edges;

    [[nodiscard]] int edge_count() const { return static_cast<int>(edges.size()); }
    [[nodiscard]] int state_size() const { return agent_count * topic_count; }
    [[nodiscard]] bool has_edge(int i, int j) const;
    [[nodiscard]] std::vector<int> neighbors(int agent) const;
};

/// Builds a topology from unordered agent pairs (0-based), normalizing each
/// edge so the lower index is the tail. Throws std::invalid_argument on
/// self-loops, duplicates, or out-of-range indices.
Topology make_topology(int agent_count, int topic_count,
                       const std::vector<std::pair<int, int>>& pairs);

/// Symmetric per-edge coupling gains between topics. Magnitudes are kept
/// nonnegative; an antagonistic coupling keeps its nonnegative magnitude and
/// sets the anti flag, which negates the entry wherever the gain is used.
/// Entries can be written asymmetrically through set_entry so that validation
/// failures remain constructible; set_symmetric is the normal path.
class CouplingMatrix {
public:
    CouplingMatrix() = default;
    explicit CouplingMatrix(int topic_count)
        : dim_(topic_count),
          gain_(Eigen::MatrixXd::Zero(topic_count, topic_count)),
          anti_(static_cast<std::size_t>(topic_count) * topic_count, 0) {}

    /// Splits a dense matrix into magnitudes and anti flags (negative entries
    /// become anti-flagged magnitudes). Requires a square matrix.
    static CouplingMatrix from_dense(const Eigen::MatrixXd& values);

    [[nodiscard]] int topic_count() const { return dim_; }
    [[nodiscard]] double gain(int p, int q) const { return gain_(p, q); }
    [[nodiscard]] bool anti(int p, int q) const {
        return anti_[static_cast<std::size_t>(p) * dim_ + q] != 0;
    }
    /// Gain with the anti flag applied as a sign.
    [[nodiscard]] double signed_gain(int p, int q) const {
        return anti(p, q) ? -gain_(p, q) : gain_(p, q);
    }

    void set_entry(int p, int q, double gain, bool anti = false);
    /// Sets (p,q) and (q,p) together.
    void set_symmetric(int p, int q, double gain, bool anti = false);

    [[nodiscard]] bool cooperative() const;
    /// True when no entry is nonzero.
    [[nodiscard]] bool zero() const { return gain_.isZero(0.0); }

    [[nodiscard]] const Eigen::MatrixXd& magnitudes() const { return gain_; }
    [[nodiscard]] Eigen::MatrixXd signed_dense() const;

private:
    int dim_ = 0;
    Eigen::MatrixXd gain_;
    std::vector<std::uint8_t> anti_;
};

/// Per-edge coupling matrices, parallel to Topology::edges. The matrix for
/// edge (i,j) is shared by both orientations.
struct CouplingSpec {
    std::vector<CouplingMatrix> per_edge;

    [[nodiscard]] bool cooperative() const;
};

/// Builds a spec from dense per-edge matrices (see CouplingMatrix::from_dense).
CouplingSpec make_coupling_spec(const std::vector<Eigen::MatrixXd>& matrices);

enum class FeedbackMode {
    InverseProportional,  ///< constant direct gains, sign-product cross gains
    Proportional,         ///< gains attenuated by opinion distance
};

enum class SignSmoothing {
    Exact,    ///< hard sign, +1 at zero difference
    Sigmoid,  ///< 2 / (1 + exp(-gain * delta)) - 1
    Signum,   ///< sign(delta) * |delta|^exponent, combined factor
};

/// Feedback law configuration. The sigmoid smoothing is the simulation
/// default: the hard sign makes the vector field discontinuous, while the
/// sigmoid keeps it smooth without visibly changing the outcomes.
struct FeedbackConfig {
    FeedbackMode mode = FeedbackMode::InverseProportional;
    double c0 = 1.0;
    double c1 = 1.0;
    double c2 = 0.0;
    SignSmoothing smoothing = SignSmoothing::Sigmoid;
    double sigmoid_gain = 50.0;     ///< slope parameter of the sigmoid
    double signum_exponent = 0.5;   ///< in (0, 1)
};

/// Throws std::invalid_argument when the configuration is unusable
/// (proportional mode with c0 <= 0, non-finite or non-positive sigmoid gain,
/// signum exponent outside (0,1), negative c1/c2).
void check_feedback(const FeedbackConfig& config);

/// Full opinion vector in R^(n*d), agent-major: entry (agent*d + topic).
class OpinionState {
public:
    OpinionState() = default;
    OpinionState(int agent_count, int topic_count)
        : agents_(agent_count), topics_(topic_count),
          values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(agent_count) * topic_count)) {}
    /// Wraps an existing stacked vector; throws on size mismatch.
    OpinionState(int agent_count, int topic_count, Eigen::VectorXd values);

    [[nodiscard]] int agent_count() const { return agents_; }
    [[nodiscard]] int topic_count() const { return topics_; }

    [[nodiscard]] double operator()(int agent, int topic) const {
        return values_(static_cast<Eigen::Index>(agent) * topics_ + topic);
    }
    double& operator()(int agent, int topic) {
        return values_(static_cast<Eigen::Index>(agent) * topics_ + topic);
    }

    /// d-dimensional opinion of one agent.
    [[nodiscard]] Eigen::VectorXd agent(int i) const {
        return values_.segment(static_cast<Eigen::Index>(i) * topics_, topics_);
    }

    [[nodiscard]] const Eigen::VectorXd& vec() const { return values_; }
    Eigen::VectorXd& vec() { return values_; }

    [[nodiscard]] bool finite() const { return values_.allFinite(); }

private:
    int agents_ = 0;
    int topics_ = 0;
    Eigen::VectorXd values_;
};

/// One structural rule violation; `rule` is a stable identifier, `detail`
/// names the offending edge or entry.
struct Violation {
    std::string rule;
    std::string detail;
};

/// Checks every structural invariant of a topology/coupling pair: no
/// self-loops or duplicate edges, indices in range, one coupling matrix per
/// edge with the right dimension, intra-edge symmetry of gains and anti
/// flags, nonnegative finite gains. Returns an empty list iff all hold.
std::vector<Violation> validate(const Topology& topology, const CouplingSpec& spec);

/// Incidence matrix of the interaction graph (m x n): row k has -1 at the
/// tail and +1 at the head of edge k.
Eigen::MatrixXd incidence_matrix(const Topology& topology);

/// Incidence matrix lifted to the stacked opinion space: H kron I_d,
/// shape (m*d) x (n*d). Row block k of (H kron I_d) * x equals x_head - x_tail.
Eigen::MatrixXd stacked_incidence(const Topology& topology);

/// Structural classification of a coupling spec, driving the simulation-free
/// consensus predictions.
struct CouplingClassification {
    /// Per topic p: the subgraph keeping only edges with a nonzero direct
    /// gain on p is connected over all agents.
    std::vector<bool> topic_coupled;
    bool all_topic_coupled = false;
    /// All edges share one zero/nonzero coupling pattern.
    bool homogeneous = false;
    /// Every direct (same-topic) gain is zero on every edge.
    bool no_direct_coupling = false;
    /// Every cross (distinct-topic) gain is nonzero on every edge.
    bool fully_cross_coupled = false;
};

CouplingClassification classify(const Topology& topology, const CouplingSpec& spec);

/// Connected components of an undirected graph given as an edge list over
/// vertices 0..vertex_count-1. Components and their members are sorted.
std::vector<std::vector<int>> connected_components(int vertex_count,
                                                   const std::vector<Edge>& edges);

/// Graph over agents for one topic: edge (i,j) present iff the coupling on
/// (i,j) touches the topic (any nonzero gain in the topic's row). Connectivity
/// of this graph decides consensus on the topic in the PSD regime.
struct TopicConsensusGraph {
    int topic = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> components;

    [[nodiscard]] bool connected() const { return components.size() == 1; }
};

/// Per-topic agent partitions plus the global clusters (agents agreeing on
/// every topic).
struct ClusterPartition {
    std::vector<std::vector<std::vector<int>>> topic_components;
    std::vector<std::vector<int>> clusters;
};

}  // namespace opinionet
