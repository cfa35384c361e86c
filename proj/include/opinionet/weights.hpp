#pragma once

// State-dependent edge weight matrices and the stacked interaction
// Laplacian. The weight matrix of an edge combines the constant coupling
// gains with sign factors of the per-topic opinion differences (and, in
// proportional mode, distance-based denominators); the Laplacian collects
// the weight matrices into the usual block structure so that the opinion
// dynamics read xdot = -L(x) x.

#include <Eigen/Dense>

#include <vector>

#include "opinionet/core.hpp"

namespace opinionet {

/// Smoothed sign of an opinion difference, per the configured smoothing:
///   Exact   -> +1 for delta >= 0, -1 otherwise;
///   Sigmoid -> 2 / (1 + exp(-gain * delta)) - 1, in (-1, 1);
///   Signum  -> sign(delta) * |delta|^exponent (combined factor, odd in
///              delta, not bounded by 1 for |delta| > 1).
double smoothed_sign(double delta, const FeedbackConfig& config);

/// Weight matrix A of one edge at one state. Row/column order is topics.
/// Inverse-proportional mode: A(p,p) = k(p,p) and
/// A(p,q) = k(p,q) * s_p * s_q with s_p the smoothed sign of the topic-p
/// difference across the edge. Proportional mode divides the direct terms by
/// c2*|dp|^2 + c1*|dp| + c0 and the cross terms by
/// (c1*|dp| + c0) * (c1*|dq| + c0). Anti-flagged entries enter negated.
Eigen::MatrixXd edge_weight_matrix(const Topology& topology, const CouplingSpec& spec,
                                   const FeedbackConfig& config, const OpinionState& state,
                                   int edge_index);

/// Stacked (n*d) x (n*d) Laplacian: block (i,i) sums the weight matrices of
/// the edges at agent i, block (i,j) is -A(i,j) for an edge, zero otherwise.
/// Symmetric for cooperative specs.
Eigen::MatrixXd assemble_laplacian(const Topology& topology, const CouplingSpec& spec,
                                   const FeedbackConfig& config, const OpinionState& state);

/// Three-factor form L = Hbar^T * diag(s) * blkdg(K) * diag(s) * Hbar, where
/// Hbar is the stacked incidence matrix, s holds one sign factor per
/// (edge, topic), and blkdg(K) stacks the constant coupling matrices.
///
/// The reconstruction is exact (to roundoff) for inverse-proportional
/// feedback with exact signs, and for any smoothing when all direct gains
/// are zero. Smoothed signs square to less than one on the diagonal, so a
/// coupling with direct gains reconstructs those entries attenuated; the
/// factors themselves remain well defined.
struct LaplacianFactors {
    Eigen::MatrixXd incidence;            ///< Hbar, (m*d) x (n*d)
    Eigen::VectorXd sign_factors;         ///< length m*d, diagonal of the middle factor
    std::vector<Eigen::MatrixXd> edge_couplings;  ///< d x d constant blocks

    /// Multiplies the factors back together.
    [[nodiscard]] Eigen::MatrixXd product() const;
};

/// Computes the factors at a state. Sign factors are the smoothed signs of
/// the per-topic differences; proportional mode divides each by
/// c1*|delta| + c0 and requires c2 = 0. Throws std::invalid_argument for
/// anti-coupled specs and for proportional mode with c2 != 0.
LaplacianFactors factorize_laplacian(const Topology& topology, const CouplingSpec& spec,
                                     const FeedbackConfig& config, const OpinionState& state);

/// Value of x^T L(x) x split into its direct (same-topic) and cross
/// (distinct-topic) parts, accumulated edge by edge. total = direct + cross,
/// and -total is the derivative of the Lyapunov candidate V = 0.5 |x|^2
/// along the dynamics. Both parts are nonnegative for cooperative specs.
struct QuadraticForm {
    double total = 0.0;
    double direct = 0.0;
    double cross = 0.0;
};

QuadraticForm quadratic_form(const Topology& topology, const CouplingSpec& spec,
                             const FeedbackConfig& config, const OpinionState& state);

}  // namespace opinionet
