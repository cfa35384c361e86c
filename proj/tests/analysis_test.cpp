#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "helpers.hpp"
#include "opinionet/analysis.hpp"
#include "opinionet/core.hpp"
#include "opinionet/weights.hpp"

using namespace opinionet;
namespace tu = testutil;

namespace {

FeedbackConfig exact_config() {
    FeedbackConfig c;
    c.smoothing = SignSmoothing::Exact;
    return c;
}

bool close(const Eigen::VectorXd& values, std::initializer_list<double> expected,
           double tol = 1e-9) {
    if (values.size() != static_cast<Eigen::Index>(expected.size())) return false;
    Eigen::Index i = 0;
    for (double e : expected) {
        if (std::abs(values(i++) - e) > tol) return false;
    }
    return true;
}

// Breadth-first component search, independent of the union-find used by the
// library.
std::vector<std::vector<int>> bfs_components(int n, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
    for (const Edge& e : edges) {
        adjacency[static_cast<std::size_t>(e.tail)].push_back(e.head);
        adjacency[static_cast<std::size_t>(e.head)].push_back(e.tail);
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<std::vector<int>> components;
    for (int start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::vector<int> component;
        std::queue<int> frontier;
        frontier.push(start);
        seen[static_cast<std::size_t>(start)] = true;
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop();
            component.push_back(v);
            for (int w : adjacency[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    frontier.push(w);
                }
            }
        }
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
    }
    std::sort(components.begin(), components.end());
    return components;
}

}  // namespace

TEST_CASE("definiteness regressions") {
    SUBCASE("indefinite diagonal example") {
        const EigenvalueCheck check = check_definiteness(tu::indefinite_diagonal_example());
        CHECK(close(check.eigenvalues, {-4, -4, 1, 1}));
        CHECK(check.definiteness == Definiteness::Indefinite);
    }
    SUBCASE("all-ones coupling") {
        const EigenvalueCheck check = check_definiteness(Eigen::MatrixXd::Ones(3, 3));
        CHECK(close(check.eigenvalues, {0, 0, 3}));
        CHECK(check.definiteness == Definiteness::PositiveSemidefinite);
    }
    SUBCASE("complete-graph adjacency, five topics") {
        const EigenvalueCheck check = check_definiteness(tu::complete_graph_adjacency5());
        CHECK(close(check.eigenvalues, {-1, -1, -1, -1, 4}));
        CHECK(check.definiteness == Definiteness::Indefinite);
    }
    SUBCASE("block example turns indefinite with one extra coupling") {
        CHECK(check_definiteness(tu::block_psd_example()).definiteness ==
              Definiteness::PositiveSemidefinite);
        const EigenvalueCheck check = check_definiteness(tu::block_indefinite_example());
        CHECK(check.definiteness == Definiteness::Indefinite);
        CHECK(check.eigenvalues.minCoeff() < -1e-6);
        CHECK(check.eigenvalues.maxCoeff() > 1e-6);
        CHECK(check.eigenvalues.cwiseAbs().minCoeff() < 1e-9);  // has a zero eigenvalue
    }
    SUBCASE("strictly positive definite coupling") {
        const EigenvalueCheck check =
            check_definiteness(tu::mat3({2, 0, 1, 0, 2, 1, 1, 1, 2}));
        CHECK(check.definiteness == Definiteness::PositiveDefinite);
        CHECK(close(check.eigenvalues, {2.0 - std::sqrt(2.0), 2.0, 2.0 + std::sqrt(2.0)}));
    }
    SUBCASE("negative semidefinite") {
        CHECK(check_definiteness(-Eigen::MatrixXd::Identity(2, 2)).definiteness ==
              Definiteness::NegativeSemidefinite);
    }
    SUBCASE("non-symmetric input is rejected") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 1) = 1.0;
        CHECK_THROWS_AS(check_definiteness(m), std::invalid_argument);
    }
}

TEST_CASE("spectral verdict over the reference sets") {
    SUBCASE("the PSD set is PSD everywhere") {
        const SpectralVerdict verdict = spectral_verdict(tu::spec_from(tu::psd_coupling_set()));
        CHECK(verdict.all_psd);
        for (const EigenvalueCheck& check : verdict.per_edge) {
            CHECK(check.positive_semidefinite());
        }
    }
    SUBCASE("the banded coupling is indefinite") {
        const SpectralVerdict verdict =
            spectral_verdict(tu::spec_from(tu::homogeneous_banded_set()));
        CHECK_FALSE(verdict.all_psd);
        for (const EigenvalueCheck& check : verdict.per_edge) {
            CHECK(check.definiteness == Definiteness::Indefinite);
        }
    }
}

TEST_CASE("consensus matrix marks touched topics") {
    SUBCASE("first reference coupling touches topics 1 and 2 only") {
        const CouplingMatrix k =
            CouplingMatrix::from_dense(tu::mat3({1, 1, 0, 1, 1, 0, 0, 0, 0}));
        const Eigen::MatrixXd c = consensus_matrix(k);
        CHECK(c(0, 0) == 1.0);
        CHECK(c(1, 1) == 1.0);
        CHECK(c(2, 2) == 0.0);
        CHECK(c.sum() == 2.0);  // off-diagonals stay zero
    }
    SUBCASE("zero coupling gives a zero matrix") {
        CHECK(consensus_matrix(CouplingMatrix(3)).isZero(0.0));
    }
    SUBCASE("direct gains on all topics mark every topic") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
        m.diagonal() << 1, 1, 1;
        const Eigen::MatrixXd c = consensus_matrix(CouplingMatrix::from_dense(m));
        CHECK((c.diagonal() - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("topic consensus graphs of the four-agent path example") {
    // Path 1-2-3-4. Couplings: direct topic-1 gains on (1,2) and (3,4), a
    // (1,2) cross pair on (2,3), direct topic-2/3 gains on (1,2), and a (2,3)
    // cross pair on (3,4).
    const Topology topo = make_topology(4, 3, {{0, 1}, {1, 2}, {2, 3}});
    CouplingMatrix k12(3);
    k12.set_symmetric(0, 0, 1.0);
    k12.set_symmetric(1, 1, 1.0);
    k12.set_symmetric(2, 2, 1.0);
    CouplingMatrix k23(3);
    k23.set_symmetric(0, 1, 1.0);
    CouplingMatrix k34(3);
    k34.set_symmetric(0, 0, 1.0);
    k34.set_symmetric(1, 2, 1.0);
    CouplingSpec spec;
    spec.per_edge = {k12, k23, k34};

    const auto graphs = topic_consensus_graphs(topo, spec);
    REQUIRE(graphs.size() == 3);

    CHECK(graphs[0].edges == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
    CHECK(graphs[0].connected());
    CHECK(graphs[1].edges == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
    CHECK(graphs[1].connected());
    CHECK(graphs[2].edges == std::vector<Edge>{{0, 1}, {2, 3}});
    CHECK_FALSE(graphs[2].connected());
    CHECK(graphs[2].components ==
          std::vector<std::vector<int>>{{0, 1}, {2, 3}});
}

TEST_CASE("topic consensus graphs of the reference sets") {
    const Topology topo = tu::five_agent_topology();
    SUBCASE("PSD set: every topic graph connected") {
        for (const auto& g : topic_consensus_graphs(topo, tu::spec_from(tu::psd_coupling_set()))) {
            CHECK(g.connected());
        }
    }
    SUBCASE("all-zero couplings: no edges anywhere") {
        CouplingSpec zero;
        for (int k = 0; k < 5; ++k) zero.per_edge.emplace_back(3);
        for (const auto& g : topic_consensus_graphs(topo, zero)) {
            CHECK(g.edges.empty());
            CHECK(g.components.size() == 5);
        }
    }
}

TEST_CASE("predict: complete consensus for the PSD reference set") {
    const AnalysisReport report =
        predict(tu::five_agent_topology(), tu::spec_from(tu::psd_coupling_set()));
    CHECK(report.regime == Regime::CompleteConsensus);
    CHECK(report.cluster_bound == 1);
    CHECK(report.warnings.empty());
}

TEST_CASE("predict: partial consensus after cutting topic 1") {
    const AnalysisReport report =
        predict(tu::five_agent_topology(), tu::spec_from(tu::split_topic1_coupling_set()));
    CHECK(report.regime == Regime::PartialConsensus);
    REQUIRE(report.cluster_bound.has_value());
    CHECK(*report.cluster_bound == 2);
    CHECK(report.topic_graphs[0].components ==
          std::vector<std::vector<int>>{{0, 1, 2}, {3, 4}});
    CHECK(report.topic_graphs[1].connected());
    CHECK(report.topic_graphs[2].connected());
}

TEST_CASE("predict: cluster bound adds one disconnection per split topic") {
    // Path of five agents; direct-gain couplings only. Topic 1 splits at edge
    // (3,4), topic 2 splits at edge (1,2), topic 3 stays connected, so the
    // bound is (2-1) + (2-1) + (1-1) + 1 = 3.
    const Topology topo = make_topology(5, 3, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    auto diag = [](double a, double b, double c) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
        m.diagonal() << a, b, c;
        return m;
    };
    const CouplingSpec spec = tu::spec_from(
        {diag(1, 0, 1), diag(1, 1, 1), diag(0, 1, 1), diag(1, 1, 1)});

    const AnalysisReport report = predict(topo, spec);
    CHECK(report.regime == Regime::PartialConsensus);
    CHECK(report.cluster_bound == 3);
    CHECK(report.topic_graphs[0].components ==
          std::vector<std::vector<int>>{{0, 1, 2}, {3, 4}});
    CHECK(report.topic_graphs[1].components ==
          std::vector<std::vector<int>>{{0}, {1, 2, 3, 4}});
}

TEST_CASE("predict: all-topic coupling guarantees consensus without PSD") {
    const AnalysisReport report =
        predict(tu::five_agent_topology(), tu::spec_from(tu::homogeneous_banded_set()));
    CHECK_FALSE(report.spectral.all_psd);
    CHECK(report.classification.all_topic_coupled);
    CHECK(report.regime == Regime::CompleteConsensus);
}

TEST_CASE("predict: no guarantee with warnings") {
    const Topology topo = tu::five_agent_topology();
    SUBCASE("cross-only complete couplings") {
        const Eigen::MatrixXd ring = tu::mat3({0, 1, 1, 1, 0, 1, 1, 1, 0});
        const AnalysisReport report =
            predict(topo, tu::spec_from(std::vector<Eigen::MatrixXd>(5, ring)));
        CHECK(report.regime == Regime::NoGuarantee);
        CHECK_FALSE(report.cluster_bound.has_value());
        REQUIRE(report.warnings.size() == 2);
    }
    SUBCASE("heterogeneous with broken direct gains") {
        auto set = tu::homogeneous_banded_set();
        set[3] = tu::mat3({0, 1, 0, 1, 0, 1, 0, 1, 1});
        const AnalysisReport report = predict(topo, tu::spec_from(set));
        CHECK(report.regime == Regime::NoGuarantee);
        REQUIRE(report.warnings.size() == 1);
    }
}

TEST_CASE("predict rejects anti couplings") {
    const Topology topo = make_topology(2, 2, {{0, 1}});
    CouplingSpec spec;
    spec.per_edge.emplace_back(2);
    spec.per_edge[0].set_symmetric(0, 1, 1.0, true);
    CHECK_THROWS_AS(predict(topo, spec), std::invalid_argument);
}

TEST_CASE("predict components match a breadth-first oracle") {
    tu::Rng rng(5001);
    for (int trial = 0; trial < 20; ++trial) {
        const Topology topo = tu::random_connected_topology(rng);
        const CouplingSpec spec = tu::random_psd_spec(rng, topo);
        const AnalysisReport report = predict(topo, spec);
        for (const TopicConsensusGraph& g : report.topic_graphs) {
            auto expected = bfs_components(topo.agent_count, g.edges);
            auto actual = g.components;
            std::sort(actual.begin(), actual.end());
            CHECK(actual == expected);
        }
    }
}

TEST_CASE("predict is invariant under agent relabeling") {
    tu::Rng rng(5002);
    for (int trial = 0; trial < 15; ++trial) {
        const Topology topo = tu::random_connected_topology(rng);
        const CouplingSpec spec = tu::random_psd_spec(rng, topo);

        std::vector<int> perm(static_cast<std::size_t>(topo.agent_count));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto [rtopo, rspec] = tu::relabel(topo, spec, perm);

        const AnalysisReport a = predict(topo, spec);
        const AnalysisReport b = predict(rtopo, rspec);
        CHECK(a.regime == b.regime);
        CHECK(a.cluster_bound == b.cluster_bound);
        for (std::size_t p = 0; p < a.topic_graphs.size(); ++p) {
            auto mapped = a.topic_graphs[p].components;
            for (auto& group : mapped) {
                for (int& v : group) v = perm[static_cast<std::size_t>(v)];
                std::sort(group.begin(), group.end());
            }
            std::sort(mapped.begin(), mapped.end());
            auto actual = b.topic_graphs[p].components;
            std::sort(actual.begin(), actual.end());
            CHECK(mapped == actual);
        }
    }
}

TEST_CASE("kernel always contains the agreement directions") {
    tu::Rng rng(5003);
    for (int trial = 0; trial < 10; ++trial) {
        const Topology topo = tu::random_connected_topology(rng);
        const CouplingSpec spec = tu::random_psd_spec(rng, topo);
        const OpinionState state = tu::random_state(rng, topo);

        const Eigen::MatrixXd lap = assemble_laplacian(topo, spec, exact_config(), state);
        for (int p = 0; p < topo.topic_count; ++p) {
            Eigen::VectorXd direction = Eigen::VectorXd::Zero(topo.state_size());
            for (int i = 0; i < topo.agent_count; ++i) direction(i * topo.topic_count + p) = 1.0;
            CHECK((lap * direction).cwiseAbs().maxCoeff() < 1e-12);
        }

        const NullspaceInfo info =
            laplacian_nullspace(topo, spec, exact_config(), state);
        CHECK(info.dimension >= topo.topic_count);
    }
}

TEST_CASE("strictly positive definite couplings leave only the agreement kernel") {
    tu::Rng rng(5006);
    FeedbackConfig exact = exact_config();
    for (int trial = 0; trial < 10; ++trial) {
        const Topology topo = tu::random_connected_topology(rng);
        CouplingSpec spec;
        for (int k = 0; k < topo.edge_count(); ++k) {
            // PSD plus an identity bump: positive definite, entries nonnegative.
            spec.per_edge.push_back(CouplingMatrix::from_dense(
                tu::random_psd_coupling(rng, topo.topic_count) +
                Eigen::MatrixXd::Identity(topo.topic_count, topo.topic_count)));
        }
        const OpinionState state = tu::random_state(rng, topo);
        const NullspaceInfo info = laplacian_nullspace(topo, spec, exact, state);
        CHECK(info.dimension == topo.topic_count);
    }
}

TEST_CASE("nonsingular but indefinite couplings give no guarantee") {
    // A hard-sign flip coupling: eigenvalues -1 and 1, no kernel, still no
    // consensus conclusion.
    const Topology topo = make_topology(2, 2, {{0, 1}});
    CouplingSpec spec;
    spec.per_edge.emplace_back(2);
    spec.per_edge[0].set_symmetric(0, 1, 1.0);
    const AnalysisReport report = predict(topo, spec);
    CHECK(report.spectral.per_edge[0].definiteness == Definiteness::Indefinite);
    CHECK(report.regime == Regime::NoGuarantee);
    CHECK_FALSE(report.cluster_bound.has_value());
}

TEST_CASE("complete consensus is only declared under its structural conditions") {
    tu::Rng rng(5007);
    for (int trial = 0; trial < 30; ++trial) {
        const Topology topo = tu::random_connected_topology(rng);
        const CouplingSpec spec = trial % 2 == 0 ? tu::random_psd_spec(rng, topo)
                                                 : tu::random_cooperative_spec(rng, topo);
        const AnalysisReport report = predict(topo, spec);
        if (report.regime == Regime::CompleteConsensus) {
            const bool psd_route =
                report.spectral.all_psd &&
                std::all_of(report.topic_graphs.begin(), report.topic_graphs.end(),
                            [](const TopicConsensusGraph& g) { return g.connected(); });
            CHECK((psd_route || report.classification.all_topic_coupled));
        }
    }
}

TEST_CASE("kernel dimension matches a singular-value oracle") {
    tu::Rng rng(5004);
    const Topology topo = tu::five_agent_topology();
    const CouplingSpec spec = tu::spec_from(tu::psd_coupling_set());
    for (int trial = 0; trial < 10; ++trial) {
        const OpinionState state = tu::random_state(rng, topo);
        const NullspaceInfo info = laplacian_nullspace(topo, spec, exact_config(), state);

        const Eigen::MatrixXd lap = assemble_laplacian(topo, spec, exact_config(), state);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(lap);
        const Eigen::VectorXd& sigma = svd.singularValues();
        const double threshold = 1e-9 * std::max(1.0, sigma.maxCoeff());
        int kernel = 0;
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
            if (sigma(i) <= threshold) ++kernel;
        }
        CHECK(info.dimension == kernel);

        // The reported basis really is annihilated.
        for (int c = 0; c < info.dimension; ++c) {
            CHECK((lap * info.basis.col(c)).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("kernel picks up the untouched topic of a block coupling") {
    const Topology topo = make_topology(2, 5, {{0, 1}});
    CouplingSpec spec;
    spec.per_edge.push_back(CouplingMatrix::from_dense(tu::block_psd_example()));

    OpinionState state(2, 5);
    state(1, 2) = 4.0;  // only topic 3 differs across the edge
    const NullspaceInfo info = laplacian_nullspace(topo, spec, exact_config(), state);
    CHECK(info.warnings.empty());

    // The difference direction (zero everywhere except topic 3 of agent 2)
    // must lie in the span of the kernel basis.
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(10);
    direction(7) = 1.0;
    const Eigen::VectorXd residual =
        direction - info.basis * (info.basis.transpose() * direction);
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("kernel warns when couplings are not PSD") {
    const Topology topo = make_topology(2, 5, {{0, 1}});
    CouplingSpec spec;
    spec.per_edge.push_back(CouplingMatrix::from_dense(tu::block_indefinite_example()));
    const NullspaceInfo info =
        laplacian_nullspace(topo, spec, exact_config(), OpinionState(2, 5));
    CHECK_FALSE(info.warnings.empty());
}

TEST_CASE("cross-only couplings produce negative eigenvalues at generic states") {
    tu::Rng rng(5005);
    int specs_checked = 0;
    while (specs_checked < 10) {
        const Topology topo = tu::random_connected_topology(rng);
        if (topo.topic_count < 2) continue;
        ++specs_checked;
        const CouplingSpec spec = tu::random_adjacency_only_spec(rng, topo);
        double most_negative = 0.0;
        for (int s = 0; s < 10; ++s) {
            const OpinionState state = tu::random_state(rng, topo);
            const Eigen::MatrixXd lap = assemble_laplacian(topo, spec, exact_config(), state);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
            most_negative = std::min(most_negative, solver.eigenvalues().minCoeff());
        }
        CHECK(most_negative < -1e-6);
    }
}
