// exact.hpp — frozen-time oracles on the enumerated state space: kernel,
// stationary law, hitting probabilities, mean hitting times, effective resistance
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "csma/graph.hpp"
#include "csma/linalg.hpp"
#include "csma/rates.hpp"

namespace csma {

// Tolerance on the backward error of every oracle solve; a solve that
// cannot reach it raises instead of returning a silently bad number.
inline constexpr double kSolveResidualTol = 1e-10;

struct TransitionKernel {
    std::size_t n = 0;
    std::vector<double> matrix;  // row-major, row-stochastic
    double frozen_time = 0.0;
    double gamma = 0.0;

    double at(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return matrix[i * n + j]; }
};

// One-step kernel of the discrete chain with constant parameters (lu, lv):
// lu/gamma per unblocked U-activation, lv/gamma per unblocked V-activation,
// 1/gamma per deactivation, diagonal completing each row to 1 (blocked
// activations and death ticks at inactive sites land there).
inline TransitionKernel kernel_from_params(const StateSpace& space, double lu, double lv) {
    if (lu < 0 || lv <= 0) throw std::invalid_argument("kernel_from_params: need lu >= 0 and lv > 0");
    const BipartiteGraph& g = space.graph;
    const std::size_t n = space.size();
    const double gamma = (1.0 + lu) * double(g.num_u()) + (1.0 + lv) * double(g.num_v());
    TransitionKernel k{n, std::vector<double>(n * n, 0.0), 0.0, gamma};
    for (std::size_t xi = 0; xi < n; ++xi) {
        ConfigMask x = space.configs[xi];
        double off = 0.0;
        for (VertexId i = 0; i < g.num_vertices(); ++i) {
            ConfigMask b = BipartiteGraph::bit(i);
            if (x & b) {
                std::int32_t yi = space.index(x & ~b);
                k.at(xi, std::size_t(yi)) = 1.0 / gamma;
                off += 1.0 / gamma;
            } else if ((x & g.neighbors(i)) == 0) {
                double rate = g.in_u(i) ? lu : lv;
                if (rate == 0.0) continue;
                std::int32_t yi = space.index(x | b);
                k.at(xi, std::size_t(yi)) = rate / gamma;
                off += rate / gamma;
            }
        }
        k.at(xi, xi) = 1.0 - off;
    }
    return k;
}

inline TransitionKernel kernel_at(const StateSpace& space, const RateSchedule& s, double t) {
    TransitionKernel k = kernel_from_params(space, s.lambda_u_at(t), s.lambda_v_at(t));
    k.frozen_time = t;
    return k;
}

struct StationaryDistribution {
    std::vector<double> probs;
    double lu = 0.0, lv = 0.0;
};

// pi(x) proportional to lu^{a(x)} lv^{b(x)}; this is the reversible law of
// the frozen kernel (checked in tests via detailed balance).
inline StationaryDistribution stationary(const StateSpace& space, double lu, double lv) {
    if (lu < 0 || lv <= 0) throw std::invalid_argument("stationary: need lu >= 0 and lv > 0");
    StationaryDistribution d{std::vector<double>(space.size()), lu, lv};
    // weights in log space; lu = 0 contributes only to states with a(x) = 0
    double z = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        double w;
        if (lu == 0.0 && space.count_u[i] > 0) w = 0.0;
        else w = std::pow(lu == 0.0 ? 1.0 : lu, double(space.count_u[i])) *
                 std::pow(lv, double(space.count_v[i]));
        d.probs[i] = w;
        z += w;
    }
    for (double& p : d.probs) p /= z;
    return d;
}

namespace detail {

// Absorbing solve: h(x) = P_x(chain hits `to` before `avoid`), with the
// convention that any self-loop step outside {to, avoid} keeps the trial
// running. Returns h over all states.
inline std::vector<double> hit_probability_vector(const StateSpace& space, const TransitionKernel& k,
                                                  std::int32_t to, std::int32_t avoid) {
    const std::size_t n = space.size();
    std::vector<std::size_t> inner;
    std::vector<std::int32_t> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (std::int32_t(i) != to && std::int32_t(i) != avoid) {
            pos[i] = std::int32_t(inner.size());
            inner.push_back(i);
        }
    const std::size_t m = inner.size();
    std::vector<double> a(m * m, 0.0), b(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t x = inner[r];
        for (std::size_t y = 0; y < n; ++y) {
            double kxy = k.at(x, y);
            if (kxy == 0.0) continue;
            if (std::int32_t(y) == to) b[r] += kxy;
            else if (std::int32_t(y) == avoid) continue;
            else a[r * m + std::size_t(pos[y])] -= kxy;
        }
        a[r * m + r] += 1.0;
    }
    double residual = 0.0;
    std::vector<double> h;
    try {
        h = detail::lu_solve(std::move(a), std::move(b), &residual);
    } catch (const detail::SingularSystem&) {
        throw std::runtime_error("hitting solve: singular system (disconnected state space?)");
    }
    if (residual > kSolveResidualTol)
        throw std::runtime_error("hitting solve: backward error " + std::to_string(residual) +
                                 " above tolerance");
    std::vector<double> full(n, 0.0);
    full[std::size_t(to)] = 1.0;
    for (std::size_t r = 0; r < m; ++r) full[inner[r]] = h[r];
    return full;
}

} // namespace detail

// eps_check = P_u(T_v < return to u), where a return is any clock tick that
// leaves the state at u — including a self-loop tick at u itself. Under this
// convention eps_check * pi(u) * R_eff(u, v) = 1 exactly.
inline double hitting_prob_before_return(const StateSpace& space, double lu, double lv) {
    TransitionKernel k = kernel_from_params(space, lu, lv);
    std::vector<double> h = detail::hit_probability_vector(space, k, space.idx_v, space.idx_u);
    double eps = 0.0;
    for (std::size_t y = 0; y < space.size(); ++y) {
        if (std::int32_t(y) == space.idx_u) continue;  // tick staying at u = failed trial
        eps += k.at(std::size_t(space.idx_u), y) * h[y];
    }
    return eps;
}

// Mean continuous-time hitting time: expected discrete steps to absorption
// divided by gamma (holding times are iid exponential(gamma), independent of
// the jump chain).
inline double expected_hitting_time(const StateSpace& space, double lu, double lv,
                                    std::int32_t from, std::int32_t to) {
    if (from == to) throw std::invalid_argument("expected_hitting_time: from == to");
    TransitionKernel k = kernel_from_params(space, lu, lv);
    const std::size_t n = space.size();
    std::vector<std::size_t> inner;
    std::vector<std::int32_t> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (std::int32_t(i) != to) {
            pos[i] = std::int32_t(inner.size());
            inner.push_back(i);
        }
    const std::size_t m = inner.size();
    std::vector<double> a(m * m, 0.0), b(m, 1.0);
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t x = inner[r];
        for (std::size_t y = 0; y < n; ++y) {
            double kxy = k.at(x, y);
            if (kxy == 0.0 || std::int32_t(y) == to) continue;
            a[r * m + std::size_t(pos[y])] -= kxy;
        }
        a[r * m + r] += 1.0;
    }
    double residual = 0.0;
    std::vector<double> steps;
    try {
        steps = detail::lu_solve(std::move(a), std::move(b), &residual);
    } catch (const detail::SingularSystem&) {
        throw std::runtime_error("expected_hitting_time: singular system (target unreachable?)");
    }
    if (residual > kSolveResidualTol)
        throw std::runtime_error("expected_hitting_time: backward error above tolerance");
    return steps[std::size_t(pos[std::size_t(from)])] / k.gamma;
}

// Effective resistance between configurations a and b of the electrical
// network with conductances c(x,y) = pi(x) K(x,y). Returns +infinity when a
// and b are not connected.
inline double effective_resistance(const StateSpace& space, double lu, double lv,
                                   std::int32_t a, std::int32_t b) {
    if (a == b) throw std::invalid_argument("effective_resistance: a == b");
    TransitionKernel k = kernel_from_params(space, lu, lv);
    StationaryDistribution pi = stationary(space, lu, lv);
    const std::size_t n = space.size();

    auto cond = [&](std::size_t x, std::size_t y) { return pi.probs[x] * k.at(x, y); };

    // harmonic voltage with phi(a) = 0, phi(b) = 1
    std::vector<std::size_t> inner;
    std::vector<std::int32_t> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (std::int32_t(i) != a && std::int32_t(i) != b) {
            pos[i] = std::int32_t(inner.size());
            inner.push_back(i);
        }
    const std::size_t m = inner.size();
    std::vector<double> mat(m * m, 0.0), rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t x = inner[r];
        double total = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            double c = cond(x, y);
            if (c == 0.0) continue;
            total += c;
            if (std::int32_t(y) == b) rhs[r] += c;
            else if (std::int32_t(y) == a) continue;
            else mat[r * m + std::size_t(pos[y])] -= c;
        }
        mat[r * m + r] += total;
    }
    std::vector<double> phi_inner;
    double residual = 0.0;
    if (m > 0) {
        try {
            phi_inner = detail::lu_solve(std::move(mat), std::move(rhs), &residual);
        } catch (const detail::SingularSystem&) {
            return std::numeric_limits<double>::infinity();
        }
        if (residual > kSolveResidualTol)
            throw std::runtime_error("effective_resistance: backward error above tolerance");
    }
    std::vector<double> phi(n, 0.0);
    phi[std::size_t(b)] = 1.0;
    for (std::size_t r = 0; r < m; ++r) phi[inner[r]] = phi_inner[r];

    // current measured at the grounded terminal a, where every term is
    // c(a,y) * phi(y) >= 0: the sum at b would cancel catastrophically when
    // the neighbours of b sit at potential 1 - epsilon
    double current = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
        if (std::int32_t(y) == a) continue;
        double c = cond(std::size_t(a), y);
        if (c > 0.0) current += c * phi[y];
    }
    if (current <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / current;
}

// Instantaneous crossover rate nu_check(t) = eps_check(t) * gamma(t) with the
// parameters frozen at time t.
inline double nu_check(const StateSpace& space, const RateSchedule& s, double t) {
    double lu = s.lambda_u_at(t), lv = s.lambda_v_at(t);
    double eps = hitting_prob_before_return(space, lu, lv);
    return eps * gamma_at(s, space.graph, t);
}

} // namespace csma
