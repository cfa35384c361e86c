#include "opinionet/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace opinionet {

namespace {

std::string edge_label(int i, int j) {
    std::ostringstream os;
    os << "edge (" << i + 1 << "," << j + 1 << ")";
    return os.str();
}

}  // namespace

bool Topology::has_edge(int i, int j) const {
    const int a = std::min(i, j);
    const int b = std::max(i, j);
    return std::any_of(edges.begin(), edges.end(),
                       [&](const Edge& e) { return e.tail == a && e.head == b; });
}

std::vector<int> Topology::neighbors(int agent) const {
    std::vector<int> out;
    for (const Edge& e : edges) {
        if (e.tail == agent) out.push_back(e.head);
        if (e.head == agent) out.push_back(e.tail);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Topology make_topology(int agent_count, int topic_count,
                       const std::vector<std::pair<int, int>>& pairs) {
    if (agent_count < 1) throw std::invalid_argument("agent count must be >= 1");
    if (topic_count < 1) throw std::invalid_argument("topic count must be >= 1");

    Topology topo;
    topo.agent_count = agent_count;
    topo.topic_count = topic_count;
    std::set<std::pair<int, int>> seen;
    for (const auto& [i, j] : pairs) {
        if (i == j) {
            throw std::invalid_argument("self-loop on agent " + std::to_string(i + 1));
        }
        if (i < 0 || j < 0 || i >= agent_count || j >= agent_count) {
            throw std::invalid_argument("agent index out of range in " + edge_label(i, j));
        }
        const auto key = std::minmax(i, j);
        if (!seen.insert(key).second) {
            throw std::invalid_argument("duplicate " + edge_label(i, j));
        }
        topo.edges.push_back(Edge{key.first, key.second});
    }
    return topo;
}

CouplingMatrix CouplingMatrix::from_dense(const Eigen::MatrixXd& values) {
    if (values.rows() != values.cols()) {
        throw std::invalid_argument("coupling matrix must be square");
    }
    CouplingMatrix k(static_cast<int>(values.rows()));
    for (int p = 0; p < k.dim_; ++p) {
        for (int q = 0; q < k.dim_; ++q) {
            const double v = values(p, q);
            k.set_entry(p, q, std::abs(v), v < 0.0);
        }
    }
    return k;
}

void CouplingMatrix::set_entry(int p, int q, double gain, bool anti) {
    gain_(p, q) = gain;
    anti_[static_cast<std::size_t>(p) * dim_ + q] = anti ? 1 : 0;
}

void CouplingMatrix::set_symmetric(int p, int q, double gain, bool anti) {
    set_entry(p, q, gain, anti);
    set_entry(q, p, gain, anti);
}

bool CouplingMatrix::cooperative() const {
    for (int p = 0; p < dim_; ++p) {
        for (int q = 0; q < dim_; ++q) {
            if (anti(p, q) && gain_(p, q) != 0.0) return false;
        }
    }
    return true;
}

Eigen::MatrixXd CouplingMatrix::signed_dense() const {
    Eigen::MatrixXd out(dim_, dim_);
    for (int p = 0; p < dim_; ++p) {
        for (int q = 0; q < dim_; ++q) out(p, q) = signed_gain(p, q);
    }
    return out;
}

bool CouplingSpec::cooperative() const {
    return std::all_of(per_edge.begin(), per_edge.end(),
                       [](const CouplingMatrix& k) { return k.cooperative(); });
}

CouplingSpec make_coupling_spec(const std::vector<Eigen::MatrixXd>& matrices) {
    CouplingSpec spec;
    spec.per_edge.reserve(matrices.size());
    for (const auto& m : matrices) spec.per_edge.push_back(CouplingMatrix::from_dense(m));
    return spec;
}

void check_feedback(const FeedbackConfig& config) {
    if (config.mode == FeedbackMode::Proportional && !(config.c0 > 0.0)) {
        throw std::invalid_argument("proportional feedback requires c0 > 0");
    }
    if (config.c1 < 0.0 || config.c2 < 0.0) {
        throw std::invalid_argument("denominator constants c1, c2 must be nonnegative");
    }
    if (config.smoothing == SignSmoothing::Sigmoid &&
        !(config.sigmoid_gain > 0.0 && std::isfinite(config.sigmoid_gain))) {
        throw std::invalid_argument("sigmoid gain must be positive and finite");
    }
    if (config.smoothing == SignSmoothing::Signum &&
        !(config.signum_exponent > 0.0 && config.signum_exponent < 1.0)) {
        throw std::invalid_argument("signum exponent must lie in (0, 1)");
    }
}

OpinionState::OpinionState(int agent_count, int topic_count, Eigen::VectorXd values)
    : agents_(agent_count), topics_(topic_count), values_(std::move(values)) {
    if (values_.size() != static_cast<Eigen::Index>(agents_) * topics_) {
        throw std::invalid_argument("opinion vector size does not match agents * topics");
    }
}

std::vector<Violation> validate(const Topology& topology, const CouplingSpec& spec) {
    std::vector<Violation> out;
    const int n = topology.agent_count;
    const int d = topology.topic_count;

    if (n < 1) out.push_back({"agent-count", "agent count must be >= 1"});
    if (d < 1) out.push_back({"topic-count", "topic count must be >= 1"});

    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < topology.edges.size(); ++k) {
        const Edge& e = topology.edges[k];
        if (e.tail == e.head) {
            out.push_back({"self-loop", edge_label(e.tail, e.head)});
            continue;
        }
        if (e.tail < 0 || e.head < 0 || e.tail >= n || e.head >= n) {
            out.push_back({"agent-index-range", edge_label(e.tail, e.head)});
            continue;
        }
        const auto key = std::minmax(e.tail, e.head);
        if (!seen.insert(key).second) {
            out.push_back({"duplicate-edge", edge_label(e.tail, e.head)});
        }
    }

    if (spec.per_edge.size() != topology.edges.size()) {
        out.push_back({"edge-coupling-count",
                       "expected " + std::to_string(topology.edges.size()) +
                           " coupling matrices, got " + std::to_string(spec.per_edge.size())});
        return out;
    }

    for (std::size_t k = 0; k < spec.per_edge.size(); ++k) {
        const CouplingMatrix& K = spec.per_edge[k];
        const Edge& e = topology.edges[k];
        const std::string where = edge_label(e.tail, e.head);
        if (K.topic_count() != d) {
            out.push_back({"matrix-dimension",
                           where + ": coupling matrix is " + std::to_string(K.topic_count()) +
                               "x" + std::to_string(K.topic_count()) + ", topology has d=" +
                               std::to_string(d)});
            continue;
        }
        for (int p = 0; p < d; ++p) {
            for (int q = 0; q < d; ++q) {
                const double g = K.gain(p, q);
                if (!std::isfinite(g)) {
                    out.push_back({"non-finite-gain",
                                   where + " entry (" + std::to_string(p + 1) + "," +
                                       std::to_string(q + 1) + ")"});
                }
                if (g < 0.0) {
                    out.push_back({"negative-gain",
                                   where + " entry (" + std::to_string(p + 1) + "," +
                                       std::to_string(q + 1) +
                                       "): magnitudes must be nonnegative (use the anti flag)"});
                }
                if (q > p) {
                    if (K.gain(p, q) != K.gain(q, p)) {
                        out.push_back({"intra-edge-symmetry",
                                       where + " entries (" + std::to_string(p + 1) + "," +
                                           std::to_string(q + 1) + ") vs (" +
                                           std::to_string(q + 1) + "," + std::to_string(p + 1) +
                                           ")"});
                    }
                    if (K.anti(p, q) != K.anti(q, p) && K.gain(p, q) != 0.0) {
                        out.push_back({"anti-flag-symmetry",
                                       where + " entries (" + std::to_string(p + 1) + "," +
                                           std::to_string(q + 1) + ") vs (" +
                                           std::to_string(q + 1) + "," + std::to_string(p + 1) +
                                           ")"});
                    }
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd incidence_matrix(const Topology& topology) {
    const int m = topology.edge_count();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, topology.agent_count);
    for (int k = 0; k < m; ++k) {
        H(k, topology.edges[k].tail) = -1.0;
        H(k, topology.edges[k].head) = 1.0;
    }
    return H;
}

Eigen::MatrixXd stacked_incidence(const Topology& topology) {
    const int d = topology.topic_count;
    const Eigen::MatrixXd H = incidence_matrix(topology);
    Eigen::MatrixXd Hbar = Eigen::MatrixXd::Zero(H.rows() * d, H.cols() * d);
    for (Eigen::Index r = 0; r < H.rows(); ++r) {
        for (Eigen::Index c = 0; c < H.cols(); ++c) {
            if (H(r, c) != 0.0) {
                Hbar.block(r * d, c * d, d, d) =
                    H(r, c) * Eigen::MatrixXd::Identity(d, d);
            }
        }
    }
    return Hbar;
}

namespace {

// Union-find over vertex indices.
class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

private:
    std::vector<int> parent_;
};

}  // namespace

std::vector<std::vector<int>> connected_components(int vertex_count,
                                                   const std::vector<Edge>& edges) {
    DisjointSets sets(vertex_count);
    for (const Edge& e : edges) sets.unite(e.tail, e.head);

    std::vector<std::vector<int>> by_root(vertex_count);
    for (int v = 0; v < vertex_count; ++v) by_root[sets.find(v)].push_back(v);

    std::vector<std::vector<int>> out;
    for (auto& group : by_root) {
        if (!group.empty()) out.push_back(std::move(group));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

CouplingClassification classify(const Topology& topology, const CouplingSpec& spec) {
    const int d = topology.topic_count;
    CouplingClassification c;
    c.topic_coupled.assign(d, false);
    c.no_direct_coupling = true;
    c.fully_cross_coupled = true;

    for (int p = 0; p < d; ++p) {
        std::vector<Edge> direct_edges;
        for (std::size_t k = 0; k < topology.edges.size(); ++k) {
            if (spec.per_edge[k].gain(p, p) != 0.0) direct_edges.push_back(topology.edges[k]);
        }
        c.topic_coupled[p] =
            connected_components(topology.agent_count, direct_edges).size() == 1;
    }
    c.all_topic_coupled = std::all_of(c.topic_coupled.begin(), c.topic_coupled.end(),
                                      [](bool b) { return b; });

    for (const CouplingMatrix& K : spec.per_edge) {
        for (int p = 0; p < d; ++p) {
            if (K.gain(p, p) != 0.0) c.no_direct_coupling = false;
            for (int q = 0; q < d; ++q) {
                if (p != q && K.gain(p, q) == 0.0) c.fully_cross_coupled = false;
            }
        }
    }

    c.homogeneous = true;
    for (std::size_t k = 1; k < spec.per_edge.size(); ++k) {
        for (int p = 0; p < d && c.homogeneous; ++p) {
            for (int q = 0; q < d; ++q) {
                const bool a = spec.per_edge[0].gain(p, q) != 0.0;
                const bool b = spec.per_edge[k].gain(p, q) != 0.0;
                if (a != b) {
                    c.homogeneous = false;
                    break;
                }
            }
        }
    }
    return c;
}

}  // namespace opinionet
