// simulate.hpp — event-driven simulation of the time-inhomogeneous hard-core
// process: hitting-time sampling, regeneration logging, monotone couplings,
// and the colored-Poisson first-success sub-simulator
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "csma/graph.hpp"
#include "csma/rates.hpp"
#include "csma/rng.hpp"

namespace csma {

// One regeneration trial: started at a clock tick with the state at u,
// ended at the next tick back at u (failure) or at the first visit to v
// (success). `ticks` counts clock ticks in (start, start + duration].
struct RegenRecord {
    double start = 0.0;
    double duration = 0.0;
    std::uint64_t ticks = 0;
    bool success = false;
};

struct RegenSummary {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t failed_ticks = 0;   // sum of L over failed trials
    std::uint64_t failed_trials = 0;
    bool has_success = false;
    double first_success_start = std::numeric_limits<double>::quiet_NaN();     // S
    double first_success_duration = std::numeric_limits<double>::quiet_NaN();  // deltaT(S)

    double mean_success() const { return trials ? double(successes) / double(trials) : 0.0; }
    double mean_failed_ticks() const {
        return failed_trials ? double(failed_ticks) / double(failed_trials) : 0.0;
    }
};

struct HittingSample {
    double t_v = 0.0;      // hitting time, or t_max when timed out
    bool timed_out = false;
    std::uint64_t n_events = 0;  // accepted clock ticks (thinning rejections excluded)
    std::uint64_t seed = 0;
    std::optional<RegenSummary> regen;
    std::vector<RegenRecord> regen_log;  // filled only when full logging is on
};

struct CoupledEvent {
    double time;
    ConfigMask state_lower, state_upper;
};

struct CouplingSample {
    std::uint64_t order_violations = 0;
    std::uint64_t n_events = 0;
    double t_v_lower = 0.0, t_v_upper = 0.0;  // first visit to v per copy
    bool timed_out_lower = false, timed_out_upper = false;
    std::vector<CoupledEvent> events;  // filled only when event recording is on
};

namespace detail {

inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

// Piecewise-constant thinning windows. Envelopes are refreshed on a fixed
// grid fine enough to keep the acceptance ratio near 1 for the monotone
// schedules; once the schedule is frozen the rates are constant and one
// window covers the rest of the run.
inline double window_step(const RateSchedule& s, double t_max) {
    double mu_max = std::max(s.mu_u, s.mu_v);
    return std::min(t_max / 64.0, s.lambda / (8.0 * mu_max));
}

inline double next_window_end(const RateSchedule& s, double w_start, double step, double t_max) {
    if (s.freeze_time && w_start >= *s.freeze_time) return t_max;
    double end = w_start + step;
    if (s.freeze_time && *s.freeze_time < end) end = *s.freeze_time;
    return std::min(end, t_max);
}

struct SiteStreams {
    std::vector<CounterRng> death, birth;
    std::vector<double> next_death, next_prop;

    void init(std::size_t n, std::uint64_t seed) {
        death.clear(); birth.clear();
        death.reserve(n); birth.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            death.emplace_back(mix_key(seed, i, 0));
            birth.emplace_back(mix_key(seed, i, 1));
        }
        next_death.assign(n, 0.0);
        next_prop.assign(n, kInfTime);
        for (std::size_t i = 0; i < n; ++i) next_death[i] = death[i].next_exponential();
    }

    void propose_all(const BipartiteGraph& g, double w_start, double env_u, double env_v) {
        for (std::size_t i = 0; i < next_prop.size(); ++i) {
            double env = g.in_u(VertexId(i)) ? env_u : env_v;
            next_prop[i] = env > 0.0 ? w_start + birth[i].next_exponential() / env : kInfTime;
        }
    }
};

enum class EventKind { Window, Death, Proposal };

// smallest pending event; deaths scanned before proposals, lower site first
inline EventKind pick_event(const SiteStreams& st, double window_end, double& t, std::size_t& site) {
    EventKind kind = EventKind::Window;
    t = window_end;
    site = 0;
    for (std::size_t i = 0; i < st.next_death.size(); ++i)
        if (st.next_death[i] < t) { t = st.next_death[i]; kind = EventKind::Death; site = i; }
    for (std::size_t i = 0; i < st.next_prop.size(); ++i)
        if (st.next_prop[i] < t) { t = st.next_prop[i]; kind = EventKind::Proposal; site = i; }
    return kind;
}

} // namespace detail

struct SimulateOptions {
    bool track_regen = false;
    bool full_regen_log = false;  // implies track_regen
};

// Site-level construction of the process: every site carries an always-on
// death clock (rate 1; ticks at inactive sites are null moves) and a birth
// clock at lambda_U(t) or lambda_V(t) realized by thinning against the
// window envelope. Birth ticks at active or blocked sites are null moves.
// The union of these clocks reproduces the global clock with rate gamma(t)
// and the frozen kernel at each tick.
inline HittingSample simulate_hitting(const BipartiteGraph& g, const RateSchedule& sched,
                                      ConfigMask x0, ConfigMask target, std::uint64_t seed,
                                      double t_max, const SimulateOptions& opts = {}) {
    if (t_max <= 0) throw std::invalid_argument("simulate_hitting: t_max must be positive");
    if (!is_independent(g, x0)) throw std::invalid_argument("simulate_hitting: infeasible start state");
    if (!is_independent(g, target)) throw std::invalid_argument("simulate_hitting: infeasible target");

    HittingSample out;
    out.seed = seed;
    const bool regen = opts.track_regen || opts.full_regen_log;
    const ConfigMask u_cfg = g.u_mask(), v_cfg = g.v_mask();
    if (regen && (x0 != u_cfg || target != v_cfg))
        throw std::invalid_argument("regeneration logging requires start u and target v");
    if (regen) out.regen.emplace();

    if (x0 == target) { out.t_v = 0.0; return out; }

    const std::size_t n = g.num_vertices();
    detail::SiteStreams st;
    st.init(n, seed);

    ConfigMask state = x0;
    const double step = detail::window_step(sched, t_max);
    double w_start = 0.0;
    double w_end = detail::next_window_end(sched, 0.0, step, t_max);
    double env_u = sched.lambda_u_at(w_start), env_v = sched.lambda_v_at(w_end);
    st.propose_all(g, 0.0, env_u, env_v);

    // trial bookkeeping; X(0) = u counts as a trial start (the time-0 tick)
    bool trial_open = regen;
    double trial_start = 0.0;
    std::uint64_t trial_ticks = 0;

    auto close_trial = [&](double t, bool success) {
        RegenSummary& rs = *out.regen;
        rs.trials += 1;
        if (success) {
            rs.successes += 1;
            if (!rs.has_success) {
                rs.has_success = true;
                rs.first_success_start = trial_start;
                rs.first_success_duration = t - trial_start;
            }
        } else {
            rs.failed_trials += 1;
            rs.failed_ticks += trial_ticks;
        }
        if (opts.full_regen_log)
            out.regen_log.push_back({trial_start, t - trial_start, trial_ticks, success});
        trial_open = false;
    };

    while (true) {
        double t;
        std::size_t site;
        detail::EventKind kind = detail::pick_event(st, w_end, t, site);
        if (t >= t_max) { out.t_v = t_max; out.timed_out = true; return out; }
        if (kind == detail::EventKind::Window) {
            w_start = w_end;
            w_end = detail::next_window_end(sched, w_start, step, t_max);
            env_u = sched.lambda_u_at(w_start);
            env_v = sched.lambda_v_at(w_end);
            st.propose_all(g, w_start, env_u, env_v);
            continue;
        }

        bool ticked = false;
        if (kind == detail::EventKind::Death) {
            st.next_death[site] = t + st.death[site].next_exponential();
            ConfigMask b = BipartiteGraph::bit(VertexId(site));
            if (state & b) state &= ~b;
            ticked = true;  // every death-clock tick is a clock tick
        } else {
            bool in_u = g.in_u(VertexId(site));
            double env = in_u ? env_u : env_v;
            double rate = in_u ? sched.lambda_u_at(t) : sched.lambda_v_at(t);
            double mark = st.birth[site].next_uniform();
            st.next_prop[site] = env > 0.0 ? t + st.birth[site].next_exponential() / env
                                           : detail::kInfTime;
            if (mark * env <= rate) {
                ConfigMask b = BipartiteGraph::bit(VertexId(site));
                if (!(state & b) && !(state & g.neighbors(VertexId(site)))) state |= b;
                ticked = true;  // accepted birth-clock tick, possibly a null move
            }
        }
        if (!ticked) continue;

        out.n_events += 1;
        if (regen) {
            if (trial_open) trial_ticks += 1;
            if (state == v_cfg) {
                if (trial_open) close_trial(t, true);
            } else if (state == u_cfg) {
                if (trial_open) close_trial(t, false);
                trial_open = true;
                trial_start = t;
                trial_ticks = 0;
            }
        }
        if (state == target) { out.t_v = t; return out; }
    }
}

// Convenience wrapper: u -> v run with regeneration records.
inline HittingSample regeneration_log(const BipartiteGraph& g, const RateSchedule& sched,
                                      std::uint64_t seed, double t_max, bool full_log = true) {
    SimulateOptions opts;
    opts.track_regen = true;
    opts.full_regen_log = full_log;
    return simulate_hitting(g, sched, g.u_mask(), g.v_mask(), seed, t_max, opts);
}

namespace detail {

inline void check_rate_domination(const BipartiteGraph& g, const RateSchedule& lower,
                                  const RateSchedule& upper, double t_max) {
    (void)g;
    std::vector<double> ts;
    const int grid = 1024;
    for (int i = 0; i <= grid; ++i) ts.push_back(t_max * double(i) / grid);
    for (const RateSchedule* s : {&lower, &upper}) {
        ts.push_back(std::min(s->u_depletion_time(), t_max));
        if (s->freeze_time) ts.push_back(std::min(*s->freeze_time, t_max));
    }
    for (double t : ts) {
        if (lower.lambda_u_at(t) < upper.lambda_u_at(t) ||
            lower.lambda_v_at(t) > upper.lambda_v_at(t))
            throw std::invalid_argument(
                "simulate_coupled: rate schedules are not ordered (need lambda_U >= lambda_U' "
                "and lambda_V <= lambda_V' pointwise)");
    }
}

} // namespace detail

// Monotone coupling: both copies share every death clock and every birth
// proposal stream; the copy with the smaller birth rate accepts a nested
// subset of the other's marks. With lambda_U >= lambda_U', lambda_V <=
// lambda_V' and x0 below x0' in the activity order, the lower copy stays
// below the upper copy at every event time; violations are counted, not
// thrown, so the invariant itself is observable in tests.
inline CouplingSample simulate_coupled(const BipartiteGraph& g, const RateSchedule& sched_lower,
                                       const RateSchedule& sched_upper, ConfigMask x0_lower,
                                       ConfigMask x0_upper, std::uint64_t seed, double t_max,
                                       bool record_events = false) {
    if (t_max <= 0) throw std::invalid_argument("simulate_coupled: t_max must be positive");
    if (!is_independent(g, x0_lower) || !is_independent(g, x0_upper))
        throw std::invalid_argument("simulate_coupled: infeasible start state");
    if (!partial_order_leq(g, x0_lower, x0_upper))
        throw std::invalid_argument("simulate_coupled: start states are not ordered");
    detail::check_rate_domination(g, sched_lower, sched_upper, t_max);

    CouplingSample out;
    const ConfigMask v_cfg = g.v_mask();
    const std::size_t n = g.num_vertices();
    detail::SiteStreams st;
    st.init(n, seed);

    ConfigMask a = x0_lower, b = x0_upper;
    bool hit_a = (a == v_cfg), hit_b = (b == v_cfg);
    if (hit_a) out.t_v_lower = 0.0;
    if (hit_b) out.t_v_upper = 0.0;

    // window envelopes: U side dominated by the lower copy's schedule,
    // V side by the upper copy's
    const double step = std::min(detail::window_step(sched_lower, t_max),
                                 detail::window_step(sched_upper, t_max));
    auto window_end_of = [&](double ws) {
        return std::min(detail::next_window_end(sched_lower, ws, step, t_max),
                        detail::next_window_end(sched_upper, ws, step, t_max));
    };
    double w_start = 0.0, w_end = window_end_of(0.0);
    double env_u = sched_lower.lambda_u_at(w_start), env_v = sched_upper.lambda_v_at(w_end);
    st.propose_all(g, 0.0, env_u, env_v);

    if (record_events) out.events.push_back({0.0, a, b});

    while (true) {
        double t;
        std::size_t site;
        detail::EventKind kind = detail::pick_event(st, w_end, t, site);
        if (t >= t_max) {
            out.timed_out_lower = !hit_a;
            out.timed_out_upper = !hit_b;
            if (!hit_a) out.t_v_lower = t_max;
            if (!hit_b) out.t_v_upper = t_max;
            return out;
        }
        if (kind == detail::EventKind::Window) {
            w_start = w_end;
            w_end = window_end_of(w_start);
            env_u = sched_lower.lambda_u_at(w_start);
            env_v = sched_upper.lambda_v_at(w_end);
            st.propose_all(g, w_start, env_u, env_v);
            continue;
        }

        bool ticked = false;
        ConfigMask bit = BipartiteGraph::bit(VertexId(site));
        if (kind == detail::EventKind::Death) {
            st.next_death[site] = t + st.death[site].next_exponential();
            if (a & bit) a &= ~bit;
            if (b & bit) b &= ~bit;
            ticked = true;
        } else {
            bool in_u = g.in_u(VertexId(site));
            double env = in_u ? env_u : env_v;
            double rate_a = in_u ? sched_lower.lambda_u_at(t) : sched_lower.lambda_v_at(t);
            double rate_b = in_u ? sched_upper.lambda_u_at(t) : sched_upper.lambda_v_at(t);
            double mark = st.birth[site].next_uniform();
            st.next_prop[site] = env > 0.0 ? t + st.birth[site].next_exponential() / env
                                           : detail::kInfTime;
            bool attempt_a = mark * env <= rate_a;
            bool attempt_b = mark * env <= rate_b;
            if (attempt_a && !(a & bit) && !(a & g.neighbors(VertexId(site)))) a |= bit;
            if (attempt_b && !(b & bit) && !(b & g.neighbors(VertexId(site)))) b |= bit;
            ticked = attempt_a || attempt_b;
        }
        if (!ticked) continue;

        out.n_events += 1;
        if (!partial_order_leq(g, a, b)) out.order_violations += 1;
        if (record_events) out.events.push_back({t, a, b});
        if (!hit_a && a == v_cfg) { hit_a = true; out.t_v_lower = t; }
        if (!hit_b && b == v_cfg) { hit_b = true; out.t_v_upper = t; }
        if (hit_a && hit_b) return out;
    }
}

struct FirstSuccess {
    double time = 0.0;
    bool timed_out = false;
};

// First-success time of Bernoulli trials riding on an inhomogeneous Poisson
// clock, including a trial at time 0: the survival function is
// (1 - eps(0)) exp(-int_0^t eps gamma). The clock is realized by thinning
// against the constant bound `gamma_bound`, which must dominate gamma on
// [0, t_max].
inline FirstSuccess colored_poisson_trial(const std::function<double(double)>& gamma,
                                          double gamma_bound,
                                          const std::function<double(double)>& eps,
                                          std::uint64_t seed, double t_max) {
    if (!(gamma_bound > 0)) throw std::invalid_argument("colored_poisson_trial: need gamma_bound > 0");
    if (t_max <= 0) throw std::invalid_argument("colored_poisson_trial: t_max must be positive");
    CounterRng rng(mix_key(seed, 0xC01Du));
    auto coin = [&](double s) {
        double e = eps(s);
        if (e < 0.0 || e > 1.0)
            throw std::invalid_argument("colored_poisson_trial: eps(s) outside [0, 1]");
        return rng.next_uniform() <= e;
    };
    if (coin(0.0)) return {0.0, false};
    double t = 0.0;
    while (true) {
        t += rng.next_exponential() / gamma_bound;
        if (t > t_max) return {t_max, true};
        double gt = gamma(t);
        if (gt > gamma_bound)
            throw std::invalid_argument("colored_poisson_trial: gamma exceeds its stated bound");
        if (rng.next_uniform() * gamma_bound > gt) continue;  // thinned proposal
        if (coin(t)) return {t, false};
    }
}

struct SurvivalPoint {
    double tau = 0.0;
    double probability = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

struct SurvivalCurve {
    std::vector<SurvivalPoint> points;
    bool censored_excluded = false;  // some grid points lay beyond a timeout horizon
};

// Empirical survival of T_v / M on a tau grid. Timed-out samples are
// right-censored: they count as "> M tau" wherever M tau is below their
// horizon and are excluded (with a warning flag) beyond it.
inline SurvivalCurve estimate_survival(const std::vector<HittingSample>& samples, double m_scale,
                                       const std::vector<double>& tau_grid) {
    if (samples.empty()) throw std::invalid_argument("estimate_survival: no samples");
    if (!(m_scale > 0)) throw std::invalid_argument("estimate_survival: M must be positive");
    SurvivalCurve curve;
    for (double tau : tau_grid) {
        double horizon = m_scale * tau;
        std::size_t n = 0, above = 0;
        for (const HittingSample& s : samples) {
            if (s.timed_out) {
                if (horizon <= s.t_v) { ++n; ++above; }
                else curve.censored_excluded = true;
            } else {
                ++n;
                if (s.t_v > horizon) ++above;
            }
        }
        SurvivalPoint p;
        p.tau = tau;
        p.n = n;
        p.probability = n ? double(above) / double(n) : 0.0;
        p.std_error = n ? std::sqrt(p.probability * (1.0 - p.probability) / double(n)) : 0.0;
        curve.points.push_back(p);
    }
    return curve;
}

} // namespace csma
