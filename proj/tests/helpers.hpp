#pragma once

// Shared fixtures for the test suites: the five-agent reference network with
// its coupling sets, the small matrices used in the eigenvalue regressions,
// and seeded random generators for property-style tests.

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "opinionet/core.hpp"

namespace testutil {

using opinionet::CouplingMatrix;
using opinionet::CouplingSpec;
using opinionet::OpinionState;
using opinionet::Topology;

inline Eigen::MatrixXd mat3(std::initializer_list<double> values) {
    Eigen::MatrixXd m(3, 3);
    int i = 0;
    for (double v : values) {
        m(i / 3, i % 3) = v;
        ++i;
    }
    return m;
}

/// Five agents, edges (1,2),(1,3),(2,3),(3,4),(4,5), three topics.
inline Topology five_agent_topology() {
    return opinionet::make_topology(5, 3, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}});
}

/// The all-PSD coupling set of the reference consensus run.
inline std::vector<Eigen::MatrixXd> psd_coupling_set() {
    return {mat3({1, 1, 0, 1, 1, 0, 0, 0, 0}),
            mat3({1, 0, 0, 0, 1, 1, 0, 1, 1}),
            mat3({2, 0, 1, 0, 2, 1, 1, 1, 2}),
            mat3({1, 1, 1, 1, 1, 1, 1, 1, 1}),
            mat3({1, 0, 1, 0, 1, 0, 1, 0, 1})};
}

/// The same set with the (1,3) and (3,4) couplings cut down to topics 2,3,
/// which disconnects topic 1 between agents 3 and 4.
inline std::vector<Eigen::MatrixXd> split_topic1_coupling_set() {
    auto set = psd_coupling_set();
    set[1] = mat3({0, 0, 0, 0, 1, 1, 0, 1, 1});
    set[3] = mat3({0, 0, 0, 0, 1, 1, 0, 1, 1});
    return set;
}

/// Banded indefinite coupling shared by the homogeneous scenarios.
inline Eigen::MatrixXd banded_coupling() {
    return mat3({1, 1, 0, 1, 1, 1, 0, 1, 1});
}

inline std::vector<Eigen::MatrixXd> homogeneous_banded_set() {
    return std::vector<Eigen::MatrixXd>(5, banded_coupling());
}

/// Reference initial opinions of the five-agent runs.
inline OpinionState reference_initial_state() {
    Eigen::VectorXd x(15);
    x << 1, 2, 3, 2, 4, 4, 3, 1, 5, 4, 3, 2, 5, 6, 1;
    return OpinionState(5, 3, x);
}

inline CouplingSpec spec_from(const std::vector<Eigen::MatrixXd>& mats) {
    return opinionet::make_coupling_spec(mats);
}

// --- matrices for the eigenvalue regressions -------------------------------

/// Nonsingular indefinite diagonal example with eigenvalues {-4,-4,1,1}.
inline Eigen::MatrixXd indefinite_diagonal_example() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m.diagonal() << 1, 1, -4, -4;
    return m;
}

/// 5x5 complete-graph adjacency (ones off the diagonal).
inline Eigen::MatrixXd complete_graph_adjacency5() {
    return Eigen::MatrixXd::Ones(5, 5) - Eigen::MatrixXd::Identity(5, 5);
}

/// Block-diagonal PSD example: topics {1,2} and {4,5} coupled, topic 3 free.
inline Eigen::MatrixXd block_psd_example() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
    m.block(0, 0, 2, 2).setOnes();
    m.block(3, 3, 2, 2).setOnes();
    return m;
}

/// block_psd_example with an extra (1,3) coupling, which makes it indefinite.
inline Eigen::MatrixXd block_indefinite_example() {
    Eigen::MatrixXd m = block_psd_example();
    m(0, 2) = 1.0;
    m(2, 0) = 1.0;
    return m;
}

// --- random generators ------------------------------------------------------

using Rng = std::mt19937;

inline Topology random_connected_topology(Rng& rng, int max_agents = 6, int max_topics = 4) {
    std::uniform_int_distribution<int> agents(2, max_agents);
    std::uniform_int_distribution<int> topics(1, max_topics);
    const int n = agents(rng);
    const int d = topics(rng);

    std::vector<std::pair<int, int>> pairs;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        pairs.emplace_back(parent(rng), v);
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool present =
                std::any_of(pairs.begin(), pairs.end(), [&](const auto& p) {
                    return (p.first == i && p.second == j) || (p.first == j && p.second == i);
                });
            if (!present && coin(rng) < 0.25) pairs.emplace_back(i, j);
        }
    }
    return opinionet::make_topology(n, d, pairs);
}

/// Random PSD coupling with nonnegative entries: a nonnegative combination
/// of outer products of nonnegative vectors.
inline Eigen::MatrixXd random_psd_coupling(Rng& rng, int d) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    std::uniform_int_distribution<int> rank(1, d);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
    const int r = rank(rng);
    for (int t = 0; t < r; ++t) {
        Eigen::VectorXd v(d);
        for (int p = 0; p < d; ++p) v(p) = unit(rng) < 0.4 ? 0.0 : unit(rng);
        k += weight(rng) * v * v.transpose();
    }
    return k;
}

inline CouplingSpec random_psd_spec(Rng& rng, const Topology& topo) {
    CouplingSpec spec;
    for (int k = 0; k < topo.edge_count(); ++k) {
        spec.per_edge.push_back(
            CouplingMatrix::from_dense(random_psd_coupling(rng, topo.topic_count)));
    }
    return spec;
}

/// Random cooperative coupling: symmetric nonnegative entries, not
/// necessarily PSD.
inline CouplingSpec random_cooperative_spec(Rng& rng, const Topology& topo,
                                            bool zero_diagonal = false) {
    std::uniform_real_distribution<double> gain(0.0, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    CouplingSpec spec;
    const int d = topo.topic_count;
    for (int k = 0; k < topo.edge_count(); ++k) {
        CouplingMatrix m(d);
        for (int p = 0; p < d; ++p) {
            for (int q = p; q < d; ++q) {
                if (p == q && zero_diagonal) continue;
                if (coin(rng) < 0.5) m.set_symmetric(p, q, gain(rng));
            }
        }
        spec.per_edge.push_back(std::move(m));
    }
    return spec;
}

/// Zero direct gains, every cross pair coupled (random positive gains).
inline CouplingSpec random_adjacency_only_spec(Rng& rng, const Topology& topo) {
    std::uniform_real_distribution<double> gain(0.5, 2.0);
    CouplingSpec spec;
    const int d = topo.topic_count;
    for (int k = 0; k < topo.edge_count(); ++k) {
        CouplingMatrix m(d);
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) m.set_symmetric(p, q, gain(rng));
        }
        spec.per_edge.push_back(std::move(m));
    }
    return spec;
}

inline OpinionState random_state(Rng& rng, const Topology& topo, double magnitude = 3.0) {
    std::uniform_real_distribution<double> value(-magnitude, magnitude);
    OpinionState state(topo.agent_count, topo.topic_count);
    for (Eigen::Index i = 0; i < state.vec().size(); ++i) state.vec()(i) = value(rng);
    return state;
}

/// Applies an agent permutation to a topology/spec pair, keeping couplings
/// attached to their (renamed) edges.
inline std::pair<Topology, CouplingSpec> relabel(const Topology& topo,
                                                 const CouplingSpec& spec,
                                                 const std::vector<int>& perm) {
    Topology out;
    out.agent_count = topo.agent_count;
    out.topic_count = topo.topic_count;
    CouplingSpec out_spec;
    for (std::size_t k = 0; k < topo.edges.size(); ++k) {
        const int a = perm[static_cast<std::size_t>(topo.edges[k].tail)];
        const int b = perm[static_cast<std::size_t>(topo.edges[k].head)];
        out.edges.push_back(opinionet::Edge{std::min(a, b), std::max(a, b)});
        out_spec.per_edge.push_back(spec.per_edge[k]);
    }
    return {out, out_spec};
}

}  // namespace testutil
