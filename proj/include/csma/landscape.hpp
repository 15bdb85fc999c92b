// landscape.hpp — order-of-magnitude arithmetic and energy-landscape quantities
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "csma/graph.hpp"
#include "csma/rational.hpp"

namespace csma {

struct Betas {
    Rational beta_u, beta_v;
};

// The exact exponent d with quantity ~ lambda^d, stored as the rational
// value of a*beta_U + b*beta_V together with the integer witness (a, b).
// Adding degrees multiplies quantities; the degree of a sum is the max.
struct AsymptoticDegree {
    Rational value;
    std::int32_t a = 0, b = 0;

    static AsymptoticDegree from_counts(std::int32_t a, std::int32_t b, const Betas& betas) {
        return {Rational(a) * betas.beta_u + Rational(b) * betas.beta_v, a, b};
    }

    friend AsymptoticDegree operator+(const AsymptoticDegree& x, const AsymptoticDegree& y) {
        return {x.value + y.value, x.a + y.a, x.b + y.b};
    }
    friend AsymptoticDegree operator-(const AsymptoticDegree& x, const AsymptoticDegree& y) {
        return {x.value - y.value, x.a - y.a, x.b - y.b};
    }
    AsymptoticDegree operator-() const { return {-value, -a, -b}; }

    friend bool operator==(const AsymptoticDegree& x, const AsymptoticDegree& y) { return x.value == y.value; }
    friend bool operator!=(const AsymptoticDegree& x, const AsymptoticDegree& y) { return !(x == y); }
    friend bool operator<(const AsymptoticDegree& x, const AsymptoticDegree& y) { return x.value < y.value; }
    friend bool operator>(const AsymptoticDegree& x, const AsymptoticDegree& y) { return y < x; }
    friend bool operator<=(const AsymptoticDegree& x, const AsymptoticDegree& y) { return !(y < x); }
    friend bool operator>=(const AsymptoticDegree& x, const AsymptoticDegree& y) { return !(x < y); }

    std::string str() const {
        return value.str() + " (" + std::to_string(a) + "*bU + " + std::to_string(b) + "*bV)";
    }
};

namespace detail {

// weight degree of a configuration: a(x) beta_U + b(x) beta_V
inline AsymptoticDegree weight_degree(const StateSpace& space, std::int32_t x, const Betas& betas) {
    return AsymptoticDegree::from_counts(space.count_u[std::size_t(x)], space.count_v[std::size_t(x)], betas);
}

inline AsymptoticDegree partition_degree(const StateSpace& space, const Betas& betas) {
    AsymptoticDegree best = weight_degree(space, 0, betas);
    for (std::size_t i = 1; i < space.size(); ++i)
        best = std::max(best, weight_degree(space, std::int32_t(i), betas),
                        [](const AsymptoticDegree& p, const AsymptoticDegree& q) { return p < q; });
    return best;
}

} // namespace detail

inline AsymptoticDegree pi_degree(const StateSpace& space, std::int32_t x, const Betas& betas) {
    return detail::weight_degree(space, x, betas) - detail::partition_degree(space, betas);
}

// degree of K(x, y): U-birth lambda_U/gamma, V-birth lambda_V/gamma, death
// 1/gamma, with gamma ~ lambda^{beta_V} (beta_V > beta_U).
inline AsymptoticDegree kernel_degree(const StateSpace& space, std::int32_t x, std::int32_t y,
                                      const Betas& betas) {
    ConfigMask cx = space.configs[std::size_t(x)], cy = space.configs[std::size_t(y)];
    ConfigMask diff = cx ^ cy;
    if (std::popcount(diff) != 1)
        throw std::invalid_argument("kernel_degree: states are not a single-site move apart");
    VertexId i = VertexId(std::countr_zero(diff));
    bool birth = (cy & diff) != 0;
    if (!birth) return AsymptoticDegree::from_counts(0, -1, betas);             // 1/gamma
    if (space.graph.in_u(i)) return AsymptoticDegree::from_counts(1, -1, betas); // lambda_U/gamma
    return AsymptoticDegree::from_counts(0, 0, betas);                           // lambda_V/gamma
}

// degree of the edge resistance r(x,y) = 1/(pi(x) K(x,y)); symmetric by
// detailed balance, computed here from the x side.
inline AsymptoticDegree resistance_degree(const StateSpace& space, std::int32_t x, std::int32_t y,
                                          const Betas& betas) {
    return -(pi_degree(space, x, betas) + kernel_degree(space, x, y, betas));
}

// J^-(x): states with strictly larger stationary degree (prefactors are
// invisible at degree level, so ties are excluded).
inline std::vector<std::int32_t> j_minus(const StateSpace& space, std::int32_t x, const Betas& betas) {
    AsymptoticDegree dx = detail::weight_degree(space, x, betas);
    std::vector<std::int32_t> out;
    for (std::size_t y = 0; y < space.size(); ++y)
        if (dx < detail::weight_degree(space, std::int32_t(y), betas)) out.push_back(std::int32_t(y));
    return out;
}

namespace detail {

struct ConfigEdge {
    std::int32_t x, y;
    AsymptoticDegree r;
};

inline std::vector<ConfigEdge> resistance_edges(const StateSpace& space, const Betas& betas) {
    std::vector<ConfigEdge> edges;
    AsymptoticDegree z = partition_degree(space, betas);
    for (std::size_t xi = 0; xi < space.size(); ++xi) {
        ConfigMask x = space.configs[xi];
        for (VertexId i = 0; i < space.graph.num_vertices(); ++i) {
            ConfigMask b = BipartiteGraph::bit(i);
            if (x & b) continue;
            if (x & space.graph.neighbors(i)) continue;
            std::int32_t yi = space.index(x | b);
            if (yi < 0) continue;
            // conductance degree from the lower endpoint (birth move)
            AsymptoticDegree pix = weight_degree(space, std::int32_t(xi), betas) - z;
            AsymptoticDegree k = space.graph.in_u(i) ? AsymptoticDegree::from_counts(1, -1, betas)
                                                     : AsymptoticDegree::from_counts(0, 0, betas);
            edges.push_back({std::int32_t(xi), yi, -(pix + k)});
        }
    }
    return edges;
}

inline bool connects_under_threshold(const StateSpace& space, const std::vector<ConfigEdge>& edges,
                                     const std::vector<std::int32_t>& from,
                                     const std::vector<char>& target, const AsymptoticDegree& thr) {
    std::vector<char> seen(space.size(), 0);
    std::deque<std::int32_t> queue;
    std::vector<std::vector<std::pair<std::int32_t, const AsymptoticDegree*>>> adj(space.size());
    for (const auto& e : edges) {
        if (thr < e.r) continue;
        adj[std::size_t(e.x)].emplace_back(e.y, &e.r);
        adj[std::size_t(e.y)].emplace_back(e.x, &e.r);
    }
    for (std::int32_t s : from) {
        if (target[std::size_t(s)]) return true;
        if (!seen[std::size_t(s)]) { seen[std::size_t(s)] = 1; queue.push_back(s); }
    }
    while (!queue.empty()) {
        std::int32_t x = queue.front();
        queue.pop_front();
        for (auto [y, r] : adj[std::size_t(x)]) {
            if (seen[std::size_t(y)]) continue;
            if (target[std::size_t(y)]) return true;
            seen[std::size_t(y)] = 1;
            queue.push_back(y);
        }
    }
    return false;
}

} // namespace detail

class UnreachableSubset : public std::runtime_error {
public:
    UnreachableSubset() : std::runtime_error("critical_resistance_degree: no path between the subsets") {}
};

// Psi(A, B): minimax edge-resistance degree over paths in the configuration
// graph — binary search on the sorted distinct edge degrees, connectivity
// checked by breadth-first search.
inline AsymptoticDegree critical_resistance_degree(const StateSpace& space,
                                                   const std::vector<std::int32_t>& a_set,
                                                   const std::vector<std::int32_t>& b_set,
                                                   const Betas& betas) {
    if (a_set.empty() || b_set.empty())
        throw std::invalid_argument("critical_resistance_degree: empty subset");
    std::vector<char> target(space.size(), 0);
    for (std::int32_t b : b_set) target[std::size_t(b)] = 1;
    for (std::int32_t a : a_set)
        if (target[std::size_t(a)])
            throw std::invalid_argument("critical_resistance_degree: subsets must be disjoint");
    auto edges = detail::resistance_edges(space, betas);
    std::vector<AsymptoticDegree> levels;
    levels.reserve(edges.size());
    for (const auto& e : edges) levels.push_back(e.r);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::size_t lo = 0, hi = levels.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (detail::connects_under_threshold(space, edges, a_set, target, levels[mid])) hi = mid;
        else lo = mid + 1;
    }
    if (lo == levels.size()) throw UnreachableSubset();
    return levels[lo];
}

// Gamma = pi(u) Psi(u, v): the hill from u to v.
inline AsymptoticDegree gamma_barrier(const StateSpace& space, const Betas& betas) {
    return pi_degree(space, space.idx_u, betas) +
           critical_resistance_degree(space, {space.idx_u}, {space.idx_v}, betas);
}

// Gamma_check, the deepest well outside {u, v}, in its two guises:
// target {u, v} and target J^-(x). The two are compared, never assumed
// equal.
struct GammaCheckBarrier {
    AsymptoticDegree via_uv;
    AsymptoticDegree via_j_minus;
    bool forms_agree = false;
    std::int32_t argmax_uv = -1;
    std::int32_t argmax_j_minus = -1;
};

inline GammaCheckBarrier gamma_check_barrier(const StateSpace& space, const Betas& betas) {
    if (space.size() < 3)
        throw std::invalid_argument("gamma_check_barrier: state space has no states outside {u, v}");
    GammaCheckBarrier out;
    bool have_uv = false, have_j = false;
    for (std::size_t x = 0; x < space.size(); ++x) {
        std::int32_t xi = std::int32_t(x);
        if (xi == space.idx_u || xi == space.idx_v) continue;
        AsymptoticDegree px = pi_degree(space, xi, betas);
        AsymptoticDegree cand = px + critical_resistance_degree(
                                         space, {xi}, {space.idx_u, space.idx_v}, betas);
        if (!have_uv || out.via_uv < cand) { out.via_uv = cand; out.argmax_uv = xi; have_uv = true; }
        auto jm = j_minus(space, xi, betas);
        if (!jm.empty()) {
            AsymptoticDegree cand_j = px + critical_resistance_degree(space, {xi}, jm, betas);
            if (!have_j || out.via_j_minus < cand_j) {
                out.via_j_minus = cand_j;
                out.argmax_j_minus = xi;
                have_j = true;
            }
        }
    }
    if (!have_uv || !have_j)
        throw std::runtime_error("gamma_check_barrier: no admissible interior state");
    out.forms_agree = out.via_uv == out.via_j_minus;
    return out;
}

// Assumption report. The no-deep-well criterion uses strict degree
// inequality; a log gamma factor is not expressible in power degrees, and
// strict inequality of rational exponents subsumes it.
struct AssumptionReport {
    bool complete_bipartite_u_gt_1 = false;  // Assumption (a)
    bool weight_inequality = false;          // beta_U |U| < beta_V |V|
    bool no_deep_well = false;               // deg Gamma_check < deg Gamma
    bool energy_barrier = false;             // 2 deg Gamma_check < deg Gamma
    bool cbg_beta_condition = false;         // beta_V < (|U|+1) beta_U
    AsymptoticDegree gamma_degree;
    GammaCheckBarrier gamma_check;
    std::string note;
};

inline AssumptionReport check_assumptions(const StateSpace& space, const BipartiteGraph& g,
                                          const Betas& betas) {
    AssumptionReport r;
    r.complete_bipartite_u_gt_1 = g.is_complete_bipartite() && g.num_u() > 1;
    r.weight_inequality =
        betas.beta_u * Rational(std::int64_t(g.num_u())) < betas.beta_v * Rational(std::int64_t(g.num_v()));
    r.gamma_degree = gamma_barrier(space, betas);
    r.gamma_check = gamma_check_barrier(space, betas);
    r.no_deep_well = r.gamma_check.via_uv < r.gamma_degree;
    r.energy_barrier = r.gamma_check.via_uv.value + r.gamma_check.via_uv.value < r.gamma_degree.value;
    r.cbg_beta_condition =
        betas.beta_v < Rational(std::int64_t(g.num_u() + 1)) * betas.beta_u;
    if (r.complete_bipartite_u_gt_1 && !r.cbg_beta_condition)
        r.note = "beta_V >= (|U|+1) beta_U: on a complete bipartite graph beta_V "
                 "can be lowered without changing the crossover law";
    return r;
}

} // namespace csma
