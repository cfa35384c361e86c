#pragma once

// Simulation-free prediction of consensus outcomes from the coupling
// structure: per-edge definiteness of the coupling matrices, the per-topic
// consensus graphs derived from their zero patterns, the predicted regime
// (complete consensus, partial consensus with named components, or no
// guarantee), the cluster-count bound, and a pointwise kernel computation
// for the stacked Laplacian.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "opinionet/core.hpp"

namespace opinionet {

enum class Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    NegativeSemidefinite,
    Indefinite,
};

const char* to_string(Definiteness definiteness);

struct EigenvalueCheck {
    Eigen::VectorXd eigenvalues;  ///< sorted ascending
    Definiteness definiteness = Definiteness::Indefinite;

    [[nodiscard]] bool positive_semidefinite() const {
        return definiteness == Definiteness::PositiveDefinite ||
               definiteness == Definiteness::PositiveSemidefinite;
    }
};

/// Eigenvalues and definiteness class of a symmetric matrix. The class is
/// decided against the tolerance: strictly positive definite when the
/// smallest eigenvalue exceeds tol, positive semidefinite when it is above
/// -tol, negative semidefinite when the largest eigenvalue is below tol,
/// indefinite otherwise. Throws std::invalid_argument when the input is not
/// symmetric within tolerance.
EigenvalueCheck check_definiteness(const Eigen::MatrixXd& matrix, double tol = 1e-9);

/// Definiteness of every per-edge coupling matrix (anti flags applied as
/// signs) plus the conjunction used by the prediction logic.
struct SpectralVerdict {
    std::vector<EigenvalueCheck> per_edge;
    bool all_psd = false;
};

SpectralVerdict spectral_verdict(const CouplingSpec& spec, double tol = 1e-9);

/// Consensus matrix of one coupling matrix: diagonal entry (p,p) is 1 iff
/// some gain in row p is nonzero, i.e. the coupling touches topic p at all;
/// off-diagonal entries are unused and left at zero.
Eigen::MatrixXd consensus_matrix(const CouplingMatrix& coupling);

/// Topic consensus graphs for every topic: agent (i,j) is an edge of graph p
/// iff the coupling on (i,j) touches topic p. Components are computed over
/// all agents.
std::vector<TopicConsensusGraph> topic_consensus_graphs(const Topology& topology,
                                                        const CouplingSpec& spec);

enum class Regime {
    CompleteConsensus,
    PartialConsensus,
    NoGuarantee,
};

const char* to_string(Regime regime);

/// Everything the static analysis can say about a cooperative scenario
/// before simulating it.
struct AnalysisReport {
    SpectralVerdict spectral;
    CouplingClassification classification;
    std::vector<TopicConsensusGraph> topic_graphs;
    Regime regime = Regime::NoGuarantee;
    /// Maximum number of global opinion clusters; 1 for complete consensus,
    /// sum over topics of (component count - 1) plus one for partial
    /// consensus, absent when no guarantee applies.
    std::optional<int> cluster_bound;
    std::vector<std::string> warnings;
};

/// Predicts the consensus regime:
///  - complete consensus when all couplings are positive semidefinite and
///    every topic consensus graph is connected, or when every topic has a
///    connected direct-gain subgraph (which holds regardless of
///    definiteness);
///  - partial consensus when all couplings are positive semidefinite but
///    some topic consensus graph is disconnected, with the per-topic
///    components and the cluster bound filled in;
///  - no guarantee otherwise, with warnings describing the structural
///    conditions known to prevent or weaken convergence.
/// Throws std::invalid_argument for anti-coupled specs.
AnalysisReport predict(const Topology& topology, const CouplingSpec& spec);

/// Numerically computed kernel of the stacked Laplacian at one state.
struct NullspaceInfo {
    int dimension = 0;
    Eigen::MatrixXd basis;  ///< orthonormal columns spanning the kernel
    std::vector<std::string> warnings;
};

/// Kernel of L(state): eigenvectors whose eigenvalue magnitude is at most
/// tol * max(1, spectral radius). Always contains the consensus directions
/// (every agent moved equally on one topic), so the dimension is at least
/// the topic count for cooperative specs. Warns, without failing, when some
/// coupling matrix is not positive semidefinite; the kernel then describes
/// only the evaluated state. Throws std::invalid_argument for anti-coupled
/// specs.
NullspaceInfo laplacian_nullspace(const Topology& topology, const CouplingSpec& spec,
                                  const FeedbackConfig& config, const OpinionState& state,
                                  double tol = 1e-9);

}  // namespace opinionet
