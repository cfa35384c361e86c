#include "opinionet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opinionet/weights.hpp"

namespace opinionet {

const char* to_string(Definiteness definiteness) {
    switch (definiteness) {
        case Definiteness::PositiveDefinite: return "positive-definite";
        case Definiteness::PositiveSemidefinite: return "positive-semidefinite";
        case Definiteness::NegativeSemidefinite: return "negative-semidefinite";
        case Definiteness::Indefinite: return "indefinite";
    }
    return "?";
}

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::CompleteConsensus: return "complete-consensus";
        case Regime::PartialConsensus: return "partial-consensus";
        case Regime::NoGuarantee: return "no-guarantee";
    }
    return "?";
}

EigenvalueCheck check_definiteness(const Eigen::MatrixXd& matrix, double tol) {
    if (matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("definiteness check requires a square matrix");
    }
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
        throw std::invalid_argument("definiteness check requires a symmetric matrix");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix,
                                                          Eigen::EigenvaluesOnly);
    EigenvalueCheck check;
    check.eigenvalues = solver.eigenvalues();

    const double lo = check.eigenvalues.minCoeff();
    const double hi = check.eigenvalues.maxCoeff();
    if (lo > tol) {
        check.definiteness = Definiteness::PositiveDefinite;
    } else if (lo >= -tol) {
        check.definiteness = Definiteness::PositiveSemidefinite;
    } else if (hi <= tol) {
        check.definiteness = Definiteness::NegativeSemidefinite;
    } else {
        check.definiteness = Definiteness::Indefinite;
    }
    return check;
}

SpectralVerdict spectral_verdict(const CouplingSpec& spec, double tol) {
    SpectralVerdict verdict;
    verdict.all_psd = true;
    verdict.per_edge.reserve(spec.per_edge.size());
    for (const CouplingMatrix& coupling : spec.per_edge) {
        verdict.per_edge.push_back(check_definiteness(coupling.signed_dense(), tol));
        if (!verdict.per_edge.back().positive_semidefinite()) verdict.all_psd = false;
    }
    return verdict;
}

Eigen::MatrixXd consensus_matrix(const CouplingMatrix& coupling) {
    const int d = coupling.topic_count();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) {
            if (coupling.gain(p, q) != 0.0) {
                c(p, p) = 1.0;
                break;
            }
        }
    }
    return c;
}

std::vector<TopicConsensusGraph> topic_consensus_graphs(const Topology& topology,
                                                        const CouplingSpec& spec) {
    const int d = topology.topic_count;
    std::vector<Eigen::MatrixXd> per_edge_consensus;
    per_edge_consensus.reserve(spec.per_edge.size());
    for (const CouplingMatrix& coupling : spec.per_edge) {
        per_edge_consensus.push_back(consensus_matrix(coupling));
    }

    std::vector<TopicConsensusGraph> graphs(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p) {
        TopicConsensusGraph& g = graphs[static_cast<std::size_t>(p)];
        g.topic = p;
        for (std::size_t k = 0; k < topology.edges.size(); ++k) {
            if (per_edge_consensus[k](p, p) != 0.0) g.edges.push_back(topology.edges[k]);
        }
        g.components = connected_components(topology.agent_count, g.edges);
    }
    return graphs;
}

AnalysisReport predict(const Topology& topology, const CouplingSpec& spec) {
    if (!spec.cooperative()) {
        throw std::invalid_argument(
            "prediction covers cooperative specs only (no anti couplings)");
    }

    AnalysisReport report;
    report.spectral = spectral_verdict(spec);
    report.classification = classify(topology, spec);
    report.topic_graphs = topic_consensus_graphs(topology, spec);

    const bool all_connected =
        std::all_of(report.topic_graphs.begin(), report.topic_graphs.end(),
                    [](const TopicConsensusGraph& g) { return g.connected(); });

    if ((report.spectral.all_psd && all_connected) ||
        report.classification.all_topic_coupled) {
        report.regime = Regime::CompleteConsensus;
        report.cluster_bound = 1;
    } else if (report.spectral.all_psd) {
        report.regime = Regime::PartialConsensus;
        int bound = 1;
        for (const TopicConsensusGraph& g : report.topic_graphs) {
            bound += static_cast<int>(g.components.size()) - 1;
        }
        report.cluster_bound = bound;
    } else {
        report.regime = Regime::NoGuarantee;
        const CouplingClassification& c = report.classification;
        if (c.no_direct_coupling && c.fully_cross_coupled) {
            report.warnings.push_back(
                "adjacency-only coupling (zero direct gains, every cross pair coupled): "
                "the interaction matrix has negative eigenvalues away from consensus");
            report.warnings.push_back(
                "zero direct gains with complete coupling graphs: "
                "at least one topic may fail to converge");
        }
        if (!c.homogeneous && !c.all_topic_coupled) {
            report.warnings.push_back(
                "heterogeneous couplings with some topic lacking a connected "
                "direct-gain subgraph: complete consensus is not ensured");
        }
    }
    return report;
}

NullspaceInfo laplacian_nullspace(const Topology& topology, const CouplingSpec& spec,
                                  const FeedbackConfig& config, const OpinionState& state,
                                  double tol) {
    if (!spec.cooperative()) {
        throw std::invalid_argument(
            "kernel computation covers cooperative specs only (no anti couplings)");
    }

    NullspaceInfo info;
    const SpectralVerdict verdict = spectral_verdict(spec);
    if (!verdict.all_psd) {
        info.warnings.push_back(
            "some coupling matrices are not positive semidefinite; the kernel "
            "describes only the evaluated state, not an invariant set");
    }

    const Eigen::MatrixXd lap = assemble_laplacian(topology, spec, config, state);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    const Eigen::VectorXd& values = solver.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());

    std::vector<Eigen::Index> kernel_columns;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::abs(values(i)) <= tol * scale) kernel_columns.push_back(i);
    }

    info.dimension = static_cast<int>(kernel_columns.size());
    info.basis.resize(lap.rows(), info.dimension);
    for (std::size_t c = 0; c < kernel_columns.size(); ++c) {
        info.basis.col(static_cast<Eigen::Index>(c)) =
            solver.eigenvectors().col(kernel_columns[c]);
    }
    return info;
}

}  // namespace opinionet
