// predict.hpp — crossover-law predictions: nu_check-driven time-varying
// exponential survival, regime classification, and the complete-bipartite
// and torus closed forms
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "csma/exact.hpp"
#include "csma/graph.hpp"
#include "csma/rates.hpp"

namespace csma {

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

struct RegimeCall {
    Regime regime = Regime::Critical;
    double product = 0.0;  // M * nu_check(0), reported raw: the asymptotic
                           // comparison is not decidable at one finite lambda
};

inline RegimeCall regime_classify(double m_scale, double nu0, double tol_low = 0.1,
                                  double tol_high = 10.0) {
    if (!(tol_low < tol_high)) throw std::invalid_argument("regime_classify: need tol_low < tol_high");
    RegimeCall c;
    c.product = m_scale * nu0;
    if (c.product > tol_high) c.regime = Regime::Supercritical;
    else if (c.product < tol_low) c.regime = Regime::Subcritical;
    else c.regime = Regime::Critical;
    return c;
}

struct SurvivalPrediction {
    std::vector<double> tau_grid;
    std::vector<double> survival;
    Regime regime = Regime::Critical;
    double m_scale = 0.0;
    double nu0 = 0.0;
    double tau_star = 0.0;  // (c_U/mu_U)(lambda/M), the scenario-(ii) truncation point
};

namespace detail {

// adaptive Simpson on [a, b]
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace detail

// Critical-regime survival P(T_v/M > tau) = exp(-int_0^tau M nu_check(M sigma)
// d sigma), with nu_check evaluated by the exact oracle at frozen times.
// The (1 - eps_check(0)) prefactor of the time-0 trial is 1 - o(1) and is
// dropped, so the curve equals 1 at tau = 0. Past the depletion of lambda_U
// the crossover completes in O(1) time, so the curve is clamped to 0 a
// little past tau* (the integrand is ~M|U| there and the exponential would
// underflow anyway).
inline SurvivalPrediction predicted_survival(const StateSpace& space, const RateSchedule& sched,
                                             double m_scale, const std::vector<double>& tau_grid,
                                             double rel_tol = 1e-6) {
    if (!(m_scale > 0)) throw std::invalid_argument("predicted_survival: M must be positive");
    for (std::size_t i = 0; i + 1 < tau_grid.size(); ++i)
        if (!(tau_grid[i] < tau_grid[i + 1]))
            throw std::invalid_argument("predicted_survival: tau grid must be strictly increasing");
    SurvivalPrediction out;
    out.m_scale = m_scale;
    out.nu0 = nu_check(space, sched, 0.0);
    out.regime = regime_classify(m_scale, out.nu0).regime;
    out.tau_star = sched.u_depletion_time() / m_scale;

    const double post_depletion_slack = 30.0;  // exp(-|U| * 30) is already 0 for doubles
    const bool can_deplete = sched.depletes();
    double sigma_cap = can_deplete ? (sched.u_depletion_time() + post_depletion_slack) / m_scale
                                   : std::numeric_limits<double>::infinity();

    auto integrand = [&](double sigma) { return m_scale * nu_check(space, sched, m_scale * sigma); };

    double acc = 0.0;
    double prev = 0.0;
    out.tau_grid = tau_grid;
    for (double tau : tau_grid) {
        if (tau < 0) throw std::invalid_argument("predicted_survival: tau must be nonnegative");
        if (tau == 0.0) {
            out.survival.push_back(1.0);
            continue;
        }
        if (can_deplete && tau >= sigma_cap) {
            out.survival.push_back(0.0);
            prev = tau;
            continue;
        }
        double lo = prev, hi = std::min(tau, sigma_cap);
        // keep the kink at the depletion time out of a single panel
        double sigma_dep = sched.u_depletion_time() / m_scale;
        double seg_tol = rel_tol * std::max(1.0, acc);
        if (lo < sigma_dep && sigma_dep < hi) {
            acc += detail::integrate(integrand, lo, sigma_dep, seg_tol);
            acc += detail::integrate(integrand, sigma_dep, hi, seg_tol);
        } else {
            acc += detail::integrate(integrand, lo, hi, seg_tol);
        }
        double s = std::exp(-acc);
        if (can_deplete && m_scale * tau >= sched.u_depletion_time() + post_depletion_slack) s = 0.0;
        out.survival.push_back(s);
        prev = tau;
    }
    return out;
}

// Complete-bipartite closed form: survival
// exp(-int_0^tau M (c_U lambda - mu_U M sigma)^{-p} d sigma) with
// p = (|U|-1) beta_U, through the analytic antiderivative. Constant
// prefactors are deliberately dropped (they are bounded); comparisons
// against the exact predictor fold them into an effective rate.
inline double cbg_closed_form_survival(std::size_t m, double beta_u, double c_u, double mu_u,
                                       double lambda, double m_scale, double tau) {
    double p = double(m - 1) * beta_u;
    if (m < 2 || !(p > 0))
        throw std::invalid_argument("cbg_closed_form_survival: need |U| >= 2 and beta_U > 0");
    if (!(c_u > 0 && mu_u > 0 && lambda > 0 && m_scale > 0))
        throw std::invalid_argument("cbg_closed_form_survival: parameters must be positive");
    if (tau < 0) throw std::invalid_argument("cbg_closed_form_survival: tau must be nonnegative");
    if (tau == 0.0) return 1.0;
    double tau_star = (c_u / mu_u) * (lambda / m_scale);
    if (tau >= tau_star) return 0.0;
    double w0 = c_u * lambda;
    double w1 = c_u * lambda - mu_u * m_scale * tau;
    double integral;
    if (p == 1.0) integral = std::log(w0 / w1) / mu_u;
    else integral = (std::pow(w1, 1.0 - p) - std::pow(w0, 1.0 - p)) / (mu_u * (p - 1.0));
    return std::exp(-integral);
}

// M_critical estimate: the scale at which M nu_check(0) = 1.
inline double critical_timescale(const StateSpace& space, const RateSchedule& sched) {
    double nu0 = nu_check(space, sched, 0.0);
    if (!(nu0 > 0)) throw std::runtime_error("critical_timescale: nu_check(0) is not positive");
    return 1.0 / nu0;
}

// Leading-order mean crossover time on the complete bipartite graph:
// lambda_U^{|U|-1} / |U|.
inline double cbg_mean_crossover(std::size_t m, double lambda_u) {
    if (m < 2) throw std::invalid_argument("cbg_mean_crossover: need |U| >= 2");
    if (!(lambda_u > 0)) throw std::invalid_argument("cbg_mean_crossover: lambda_U must be positive");
    return std::pow(lambda_u, double(m - 1)) / double(m);
}

// Leading-order mean crossover time on the even torus Z_m x Z_n for
// 0 < alpha < 1, with critical droplet size l* = ceil(1/alpha).
inline double torus_mean_crossover(std::size_t m, std::size_t n, double lambda_u, double lambda_v,
                                   double alpha) {
    if (!(alpha > 0 && alpha < 1))
        throw std::invalid_argument("torus_mean_crossover: formula requires 0 < alpha < 1");
    if (m % 2 != 0 || n % 2 != 0)
        throw std::invalid_argument("torus_mean_crossover: m and n must be even");
    if (!(lambda_u > 0 && lambda_v > 0))
        throw std::invalid_argument("torus_mean_crossover: rates must be positive");
    double lstar = std::ceil(1.0 / alpha);
    return std::pow(lambda_u, lstar * (lstar + 1.0) + 1.0) /
           (4.0 * double(m) * double(n) * lstar * std::pow(lambda_v, lstar * (lstar - 1.0)));
}

} // namespace csma
