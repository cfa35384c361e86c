#include "opinionet/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace opinionet {

double smoothed_sign(double delta, const FeedbackConfig& config) {
    switch (config.smoothing) {
        case SignSmoothing::Exact:
            return delta >= 0.0 ? 1.0 : -1.0;
        case SignSmoothing::Sigmoid:
            return 2.0 / (1.0 + std::exp(-config.sigmoid_gain * delta)) - 1.0;
        case SignSmoothing::Signum: {
            if (delta == 0.0) return 0.0;
            const double mag = std::pow(std::abs(delta), config.signum_exponent);
            return delta > 0.0 ? mag : -mag;
        }
    }
    return 0.0;
}

namespace {

Eigen::VectorXd edge_difference(const Topology& topology, const OpinionState& state,
                                int edge_index) {
    const Edge& e = topology.edges[static_cast<std::size_t>(edge_index)];
    return state.agent(e.head) - state.agent(e.tail);
}

Eigen::MatrixXd weight_from_difference(const CouplingMatrix& coupling,
                                       const FeedbackConfig& config,
                                       const Eigen::VectorXd& delta) {
    const int d = coupling.topic_count();
    Eigen::VectorXd sign(d);
    for (int p = 0; p < d; ++p) sign(p) = smoothed_sign(delta(p), config);

    // Off-diagonal entries are mirrored so the matrix is symmetric to the
    // last bit, not just up to rounding.
    Eigen::MatrixXd a(d, d);
    if (config.mode == FeedbackMode::InverseProportional) {
        for (int p = 0; p < d; ++p) {
            a(p, p) = coupling.signed_gain(p, p);
            for (int q = p + 1; q < d; ++q) {
                const double value = coupling.signed_gain(p, q) * sign(p) * sign(q);
                a(p, q) = value;
                a(q, p) = value;
            }
        }
    } else {
        Eigen::VectorXd cross_den(d);
        for (int p = 0; p < d; ++p) cross_den(p) = config.c1 * std::abs(delta(p)) + config.c0;
        for (int p = 0; p < d; ++p) {
            const double ad = std::abs(delta(p));
            a(p, p) = coupling.signed_gain(p, p) /
                      (config.c2 * ad * ad + config.c1 * ad + config.c0);
            for (int q = p + 1; q < d; ++q) {
                const double value = coupling.signed_gain(p, q) * sign(p) * sign(q) /
                                     (cross_den(p) * cross_den(q));
                a(p, q) = value;
                a(q, p) = value;
            }
        }
    }
    return a;
}

}  // namespace

Eigen::MatrixXd edge_weight_matrix(const Topology& topology, const CouplingSpec& spec,
                                   const FeedbackConfig& config, const OpinionState& state,
                                   int edge_index) {
    check_feedback(config);
    return weight_from_difference(spec.per_edge[static_cast<std::size_t>(edge_index)], config,
                                  edge_difference(topology, state, edge_index));
}

Eigen::MatrixXd assemble_laplacian(const Topology& topology, const CouplingSpec& spec,
                                   const FeedbackConfig& config, const OpinionState& state) {
    check_feedback(config);
    const int d = topology.topic_count;
    const Eigen::Index size = topology.state_size();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(size, size);
    for (int k = 0; k < topology.edge_count(); ++k) {
        const Edge& e = topology.edges[static_cast<std::size_t>(k)];
        const Eigen::MatrixXd a = weight_from_difference(
            spec.per_edge[static_cast<std::size_t>(k)], config,
            edge_difference(topology, state, k));
        const Eigen::Index bi = static_cast<Eigen::Index>(e.tail) * d;
        const Eigen::Index bj = static_cast<Eigen::Index>(e.head) * d;
        lap.block(bi, bi, d, d) += a;
        lap.block(bj, bj, d, d) += a;
        lap.block(bi, bj, d, d) -= a;
        lap.block(bj, bi, d, d) -= a;
    }
    return lap;
}

Eigen::MatrixXd LaplacianFactors::product() const {
    const Eigen::Index rows = incidence.rows();
    Eigen::MatrixXd middle = Eigen::MatrixXd::Zero(rows, rows);
    const int d = edge_couplings.empty() ? 0 : static_cast<int>(edge_couplings[0].rows());
    for (std::size_t k = 0; k < edge_couplings.size(); ++k) {
        middle.block(static_cast<Eigen::Index>(k) * d, static_cast<Eigen::Index>(k) * d, d, d) =
            edge_couplings[k];
    }
    const Eigen::MatrixXd scaled =
        sign_factors.asDiagonal() * middle * sign_factors.asDiagonal();
    return incidence.transpose() * scaled * incidence;
}

LaplacianFactors factorize_laplacian(const Topology& topology, const CouplingSpec& spec,
                                     const FeedbackConfig& config, const OpinionState& state) {
    check_feedback(config);
    if (!spec.cooperative()) {
        throw std::invalid_argument(
            "factorization requires a cooperative spec (no anti couplings)");
    }
    if (config.mode == FeedbackMode::Proportional && config.c2 != 0.0) {
        throw std::invalid_argument("proportional factorization requires c2 = 0");
    }

    const int d = topology.topic_count;
    LaplacianFactors factors;
    factors.incidence = stacked_incidence(topology);
    factors.sign_factors.resize(static_cast<Eigen::Index>(topology.edge_count()) * d);
    factors.edge_couplings.reserve(static_cast<std::size_t>(topology.edge_count()));

    for (int k = 0; k < topology.edge_count(); ++k) {
        const Eigen::VectorXd delta = edge_difference(topology, state, k);
        for (int p = 0; p < d; ++p) {
            double s = smoothed_sign(delta(p), config);
            if (config.mode == FeedbackMode::Proportional) {
                s /= config.c1 * std::abs(delta(p)) + config.c0;
            }
            factors.sign_factors(static_cast<Eigen::Index>(k) * d + p) = s;
        }
        factors.edge_couplings.push_back(spec.per_edge[static_cast<std::size_t>(k)].magnitudes());
    }
    return factors;
}

QuadraticForm quadratic_form(const Topology& topology, const CouplingSpec& spec,
                             const FeedbackConfig& config, const OpinionState& state) {
    check_feedback(config);
    const int d = topology.topic_count;
    QuadraticForm q;
    for (int k = 0; k < topology.edge_count(); ++k) {
        const Eigen::VectorXd delta = edge_difference(topology, state, k);
        const Eigen::MatrixXd a = weight_from_difference(
            spec.per_edge[static_cast<std::size_t>(k)], config, delta);
        for (int p = 0; p < d; ++p) {
            q.direct += a(p, p) * delta(p) * delta(p);
            for (int qd = 0; qd < d; ++qd) {
                if (qd != p) q.cross += a(p, qd) * delta(p) * delta(qd);
            }
        }
    }
    q.total = q.direct + q.cross;
    return q;
}

}  // namespace opinionet
