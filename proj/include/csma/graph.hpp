// graph.hpp — bipartite interference graphs, hard-core configurations, state spaces
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace csma {

using VertexId = std::uint32_t;

// A joint activity state as a bit-vector over vertex ids. Vertex ids are
// dense 0..n-1 with all of U first, which fixes the bit layout shared by
// every module (state indices must be reproducible across runs).
using ConfigMask = std::uint64_t;

inline constexpr std::size_t kMaxVertices = 64;  // ConfigMask width

class BipartiteGraph {
public:
    BipartiteGraph(std::vector<std::string> u_labels,
                   std::vector<std::string> v_labels,
                   std::vector<std::pair<VertexId, VertexId>> edges)
        : u_labels_(std::move(u_labels)),
          v_labels_(std::move(v_labels)),
          edges_(std::move(edges)) {
        if (u_labels_.empty() || v_labels_.empty())
            throw std::invalid_argument("BipartiteGraph: both parts must be nonempty");
        if (num_vertices() > kMaxVertices)
            throw std::invalid_argument("BipartiteGraph: more than 64 vertices not supported");
        neighbor_mask_.assign(num_vertices(), 0);
        std::vector<char> seen;
        for (auto [a, b] : edges_) {
            if (a >= num_vertices() || b >= num_vertices())
                throw std::invalid_argument("BipartiteGraph: edge endpoint out of range");
            bool a_in_u = a < num_u(), b_in_u = b < num_u();
            if (a_in_u == b_in_u)
                throw std::invalid_argument("BipartiteGraph: edge does not cross the bipartition");
            neighbor_mask_[a] |= bit(b);
            neighbor_mask_[b] |= bit(a);
        }
        // reject duplicates: recount from masks
        std::size_t mask_edges = 0;
        for (VertexId i = 0; i < num_u(); ++i) mask_edges += std::popcount(neighbor_mask_[i]);
        if (mask_edges != edges_.size())
            throw std::invalid_argument("BipartiteGraph: duplicate edge");
    }

    std::size_t num_u() const { return u_labels_.size(); }
    std::size_t num_v() const { return v_labels_.size(); }
    std::size_t num_vertices() const { return num_u() + num_v(); }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }
    const std::string& label(VertexId i) const { return i < num_u() ? u_labels_[i] : v_labels_[i - num_u()]; }
    bool in_u(VertexId i) const { return i < num_u(); }

    ConfigMask neighbors(VertexId i) const { return neighbor_mask_[i]; }
    std::size_t degree(VertexId i) const { return std::popcount(neighbor_mask_[i]); }

    static constexpr ConfigMask bit(VertexId i) { return ConfigMask{1} << i; }

    ConfigMask u_mask() const { return (num_u() == 64) ? ~ConfigMask{0} : (bit(VertexId(num_u())) - 1); }
    ConfigMask v_mask() const { return full_mask() & ~u_mask(); }
    ConfigMask full_mask() const {
        return (num_vertices() == 64) ? ~ConfigMask{0} : (bit(VertexId(num_vertices())) - 1);
    }

    bool is_complete_bipartite() const { return num_edges() == num_u() * num_v(); }

private:
    std::vector<std::string> u_labels_, v_labels_;
    std::vector<std::pair<VertexId, VertexId>> edges_;
    std::vector<ConfigMask> neighbor_mask_;
};

struct HardCoreConfig {
    ConfigMask active = 0;
    std::uint32_t n_vertices = 0;
};

inline bool is_independent(const BipartiteGraph& g, ConfigMask subset) {
    if (subset & ~g.full_mask())
        throw std::invalid_argument("is_independent: subset indexes vertices outside the graph");
    ConfigMask rest = subset;
    while (rest) {
        VertexId i = VertexId(std::countr_zero(rest));
        rest &= rest - 1;
        if (subset & g.neighbors(i)) return false;
    }
    return true;
}

// x <= y in the activity order: x has at least the U-activity of y and at
// most its V-activity. u (all of U on) is the minimum, v the maximum.
inline bool partial_order_leq(const BipartiteGraph& g, ConfigMask x, ConfigMask y) {
    ConfigMask um = g.u_mask(), vm = g.v_mask();
    return ((y & um) & ~(x & um)) == 0 && ((x & vm) & ~(y & vm)) == 0;
}

inline bool partial_order_leq(const BipartiteGraph& g, const HardCoreConfig& x, const HardCoreConfig& y) {
    if (x.n_vertices != g.num_vertices() || y.n_vertices != g.num_vertices())
        throw std::invalid_argument("partial_order_leq: configurations belong to a different graph");
    return partial_order_leq(g, x.active, y.active);
}

inline BipartiteGraph make_complete_bipartite(std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("make_complete_bipartite: sizes must be positive");
    std::vector<std::string> ul(m), vl(n);
    for (std::size_t i = 0; i < m; ++i) ul[i] = "u" + std::to_string(i);
    for (std::size_t j = 0; j < n; ++j) vl[j] = "v" + std::to_string(j);
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            edges.emplace_back(VertexId(i), VertexId(m + j));
    return BipartiteGraph(std::move(ul), std::move(vl), std::move(edges));
}

// Torus Z_m x Z_n with nearest-neighbour edges and wraparound; m, n even so
// the coordinate-parity split is a proper bipartition. Wraparound duplicate
// edges (m == 2 or n == 2) collapse to simple edges.
inline BipartiteGraph make_even_torus(std::size_t m, std::size_t n) {
    if (m % 2 != 0 || n % 2 != 0) throw std::invalid_argument("make_even_torus: m and n must be even");
    if (m * n < 4) throw std::invalid_argument("make_even_torus: torus too small");
    std::vector<std::string> ul, vl;
    std::vector<VertexId> id(m * n);
    VertexId next_u = 0;
    std::size_t n_sites = m * n;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i + j) % 2 == 0) {
                id[i * n + j] = next_u++;
                ul.push_back(std::to_string(i) + "," + std::to_string(j));
            }
    VertexId next_v = next_u;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i + j) % 2 == 1) {
                id[i * n + j] = next_v++;
                vl.push_back(std::to_string(i) + "," + std::to_string(j));
            }
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<std::pair<VertexId, VertexId>> seen;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            VertexId a = id[i * n + j];
            std::size_t nb[2] = {((i + 1) % m) * n + j, i * n + (j + 1) % n};
            for (std::size_t s : nb) {
                VertexId b = id[s];
                VertexId lo = std::min(a, b), hi = std::max(a, b);
                if (std::find(seen.begin(), seen.end(), std::make_pair(lo, hi)) == seen.end())
                    seen.emplace_back(lo, hi);
            }
        }
    }
    (void)n_sites;
    for (auto [lo, hi] : seen) {
        // orient as (u, v)
        if (lo < next_u) edges.emplace_back(lo, hi);
        else edges.emplace_back(hi, lo);
    }
    std::sort(edges.begin(), edges.end());
    return BipartiteGraph(std::move(ul), std::move(vl), std::move(edges));
}

inline BipartiteGraph from_edge_list(const std::vector<std::string>& u_labels,
                                     const std::vector<std::string>& v_labels,
                                     const std::vector<std::pair<std::string, std::string>>& edge_labels) {
    std::unordered_map<std::string, VertexId> index;
    for (std::size_t i = 0; i < u_labels.size(); ++i) {
        if (!index.emplace(u_labels[i], VertexId(i)).second)
            throw std::invalid_argument("from_edge_list: duplicate label: " + u_labels[i]);
    }
    for (std::size_t j = 0; j < v_labels.size(); ++j) {
        if (!index.emplace(v_labels[j], VertexId(u_labels.size() + j)).second)
            throw std::invalid_argument("from_edge_list: duplicate label: " + v_labels[j]);
    }
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(edge_labels.size());
    for (const auto& [a, b] : edge_labels) {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end()) throw std::invalid_argument("from_edge_list: unknown label: " + a);
        if (ib == index.end()) throw std::invalid_argument("from_edge_list: unknown label: " + b);
        VertexId va = ia->second, vb = ib->second;
        bool a_in_u = va < u_labels.size(), b_in_u = vb < u_labels.size();
        if (a_in_u == b_in_u)
            throw std::invalid_argument("from_edge_list: edge (" + a + "," + b + ") stays inside one part");
        edges.emplace_back(a_in_u ? va : vb, a_in_u ? vb : va);
    }
    return BipartiteGraph(u_labels, v_labels, std::move(edges));
}

// Enumerated configuration space. Configurations are indexed by total
// activity count ascending, then by bitmask value; this ordering is part of
// the on-disk contract (golden files refer to these indices).
struct StateSpace {
    BipartiteGraph graph;
    std::vector<ConfigMask> configs;
    std::unordered_map<ConfigMask, std::int32_t> index_of;
    std::vector<std::uint8_t> count_u;  // a(x): active vertices in U
    std::vector<std::uint8_t> count_v;  // b(x): active vertices in V
    std::int32_t idx_empty = -1, idx_u = -1, idx_v = -1;

    std::size_t size() const { return configs.size(); }

    std::int32_t index(ConfigMask m) const {
        auto it = index_of.find(m);
        return it == index_of.end() ? -1 : it->second;
    }
};

class StateSpaceTooLarge : public std::runtime_error {
public:
    explicit StateSpaceTooLarge(std::size_t cap)
        : std::runtime_error("state space exceeds enumeration cap of " + std::to_string(cap) +
                             " configurations; exact oracles refuse graphs this large") {}
};

inline StateSpace enumerate_configs(const BipartiteGraph& g, std::size_t cap = std::size_t{1} << 24) {
    std::vector<ConfigMask> out;
    std::size_t n = g.num_vertices();
    // depth-first over vertices; a vertex activates only against already
    // placed lower-id vertices, so each independent set appears once
    std::vector<std::pair<VertexId, ConfigMask>> stack;
    stack.emplace_back(0, 0);
    while (!stack.empty()) {
        auto [i, mask] = stack.back();
        stack.pop_back();
        if (i == n) {
            out.push_back(mask);
            if (out.size() > cap) throw StateSpaceTooLarge(cap);
            continue;
        }
        if ((g.neighbors(i) & mask) == 0) stack.emplace_back(i + 1, mask | BipartiteGraph::bit(i));
        stack.emplace_back(i + 1, mask);
    }
    std::sort(out.begin(), out.end(), [](ConfigMask a, ConfigMask b) {
        int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    StateSpace space{g, std::move(out), {}, {}, {}, -1, -1, -1};
    space.count_u.resize(space.configs.size());
    space.count_v.resize(space.configs.size());
    ConfigMask um = g.u_mask(), vm = g.v_mask();
    for (std::size_t k = 0; k < space.configs.size(); ++k) {
        ConfigMask c = space.configs[k];
        space.index_of.emplace(c, std::int32_t(k));
        space.count_u[k] = std::uint8_t(std::popcount(c & um));
        space.count_v[k] = std::uint8_t(std::popcount(c & vm));
    }
    space.idx_empty = space.index(0);
    space.idx_u = space.index(um);
    space.idx_v = space.index(vm);
    if (space.idx_empty < 0 || space.idx_u < 0 || space.idx_v < 0)
        throw std::logic_error("enumerate_configs: missing distinguished configuration");
    return space;
}

} // namespace csma
