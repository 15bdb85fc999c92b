// rates.hpp — time-varying activation-rate schedules and the total clock rate
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "csma/graph.hpp"
#include "csma/rational.hpp"

namespace csma {

// Parameter tuple for lambda_U(t) = ([c_U*lambda - mu_U*t]^+)^{beta_U} and
// lambda_V(t) = (c_V*lambda + mu_V*t)^{beta_V}, with both rates held constant
// from freeze_time onward when a freeze is set. Time is measured in mean
// activity durations (deactivation rate 1).
struct RateSchedule {
    double lambda;
    double c_u, c_v;
    double mu_u, mu_v;
    Rational beta_u, beta_v;
    std::optional<double> freeze_time;

    RateSchedule(double lambda_, double c_u_, double c_v_, double mu_u_, double mu_v_,
                 Rational beta_u_, Rational beta_v_,
                 std::optional<double> freeze_time_ = std::nullopt)
        : lambda(lambda_), c_u(c_u_), c_v(c_v_), mu_u(mu_u_), mu_v(mu_v_),
          beta_u(beta_u_), beta_v(beta_v_), freeze_time(freeze_time_) {
        if (!(lambda > 0 && c_u > 0 && c_v > 0 && mu_u > 0 && mu_v > 0))
            throw std::invalid_argument("RateSchedule: lambda, c_U, c_V, mu_U, mu_V must be positive");
        if (!(Rational(0) < beta_u && beta_u < beta_v))
            throw std::invalid_argument("RateSchedule: need beta_V > beta_U > 0");
        if (freeze_time && *freeze_time < 0)
            throw std::invalid_argument("RateSchedule: freeze_time must be nonnegative");
        beta_u_d_ = beta_u.to_double();
        beta_v_d_ = beta_v.to_double();
    }

    // Constant rates lu, lv from time 0 (freeze at 0). Used wherever the
    // time-homogeneous process is needed.
    static RateSchedule homogeneous(double lu, double lv) {
        if (!(lu > 0 && lv > 0))
            throw std::invalid_argument("RateSchedule::homogeneous: rates must be positive");
        double scale = std::max(lu, 1.0);
        return RateSchedule(scale, lu / scale, std::sqrt(lv) / scale, 1.0, 1.0,
                            Rational(1), Rational(2), 0.0);
    }

    double clamp_time(double t) const { return freeze_time ? std::min(t, *freeze_time) : t; }

    double lambda_u_at(double t) const {
        double tt = clamp_time(t);
        double base = c_u * lambda - mu_u * tt;
        if (base <= 0) return 0.0;
        return fast_pow(base, beta_u_d_);
    }

    double lambda_v_at(double t) const {
        double tt = clamp_time(t);
        return fast_pow(c_v * lambda + mu_v * tt, beta_v_d_);
    }

    // log lambda_V / log lambda_U - 1 in the limit
    double alpha() const { return (beta_v / beta_u - Rational(1)).to_double(); }
    Rational alpha_rational() const { return beta_v / beta_u - Rational(1); }

    // first time lambda_U reaches 0 (ignoring any freeze)
    double u_depletion_time() const { return c_u * lambda / mu_u; }

    // true when the U-rate actually hits 0 before being frozen
    bool depletes() const { return !freeze_time || *freeze_time >= u_depletion_time(); }

private:
    // powers are evaluated billions of times inside the simulator; the
    // common small exponents bypass std::pow
    static double fast_pow(double base, double e) {
        if (e == 1.0) return base;
        if (e == 2.0) return base * base;
        if (e == 0.5) return std::sqrt(base);
        if (e == 1.5) return base * std::sqrt(base);
        return std::pow(base, e);
    }

    double beta_u_d_ = 0.0, beta_v_d_ = 0.0;
};

inline double gamma_at(const RateSchedule& s, const BipartiteGraph& g, double t) {
    return (1.0 + s.lambda_u_at(t)) * double(g.num_u()) + (1.0 + s.lambda_v_at(t)) * double(g.num_v());
}

// Upper bound of gamma on [t0, t1]; valid because lambda_U is nonincreasing
// and lambda_V nondecreasing.
inline double gamma_sup(const RateSchedule& s, const BipartiteGraph& g, double t0, double t1) {
    if (!(0 <= t0 && t0 <= t1)) throw std::invalid_argument("gamma_sup: need 0 <= t0 <= t1");
    return (1.0 + s.lambda_u_at(t0)) * double(g.num_u()) + (1.0 + s.lambda_v_at(t1)) * double(g.num_v());
}

} // namespace csma
