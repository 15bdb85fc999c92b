// harness.hpp — experiment configs, statistical verification of the
// crossover law, sweeps, and CSV/JSON emission
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "csma/exact.hpp"
#include "csma/graph.hpp"
#include "csma/landscape.hpp"
#include "csma/predict.hpp"
#include "csma/rates.hpp"
#include "csma/rng.hpp"
#include "csma/simulate.hpp"

namespace csma {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- graphs --

inline BipartiteGraph graph_from_json(const json& j) {
    try {
        std::vector<std::string> u = j.at("u").get<std::vector<std::string>>();
        std::vector<std::string> v = j.at("v").get<std::vector<std::string>>();
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ConfigError("graph: each edge must be a pair");
            edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
        return from_edge_list(u, v, edges);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("graph json: ") + ex.what());
    }
}

// "complete:m,n" | "torus:m,n" | "file:PATH"
inline BipartiteGraph graph_from_spec_string(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("graph spec: expected kind:args, got " + spec);
    std::string kind = spec.substr(0, colon), args = spec.substr(colon + 1);
    if (kind == "file") {
        std::ifstream in(args);
        if (!in) throw ConfigError("graph file not readable: " + args);
        json j;
        in >> j;
        return graph_from_json(j);
    }
    auto comma = args.find(',');
    if (comma == std::string::npos) throw ConfigError("graph spec: expected two sizes in " + spec);
    std::size_t m = 0, n = 0;
    try {
        m = std::stoul(args.substr(0, comma));
        n = std::stoul(args.substr(comma + 1));
    } catch (const std::exception&) {
        throw ConfigError("graph spec: bad sizes in " + spec);
    }
    try {
        if (kind == "complete") return make_complete_bipartite(m, n);
        if (kind == "torus") return make_even_torus(m, n);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("graph spec: ") + ex.what());
    }
    throw ConfigError("graph spec: unknown kind " + kind);
}

inline BipartiteGraph graph_from_config(const json& j) {
    if (j.is_string()) return graph_from_spec_string(j.get<std::string>());
    if (j.is_object()) return graph_from_json(j);
    throw ConfigError("graph: expected spec string or object");
}

// ------------------------------------------------------------- schedules --

inline Rational rational_from_json(const json& j, const char* field) {
    try {
        if (j.is_string()) return Rational::parse(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
        if (j.is_number_float()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
            return Rational::parse(buf);
        }
    } catch (const std::exception& ex) {
        throw ConfigError(std::string(field) + ": " + ex.what());
    }
    throw ConfigError(std::string(field) + ": expected number or rational string");
}

inline RateSchedule schedule_from_json(const json& j) {
    try {
        std::optional<double> freeze;
        if (j.contains("freeze_time") && !j.at("freeze_time").is_null())
            freeze = j.at("freeze_time").get<double>();
        return RateSchedule(j.at("lambda").get<double>(), j.at("c_u").get<double>(),
                            j.at("c_v").get<double>(), j.at("mu_u").get<double>(),
                            j.at("mu_v").get<double>(), rational_from_json(j.at("beta_u"), "beta_u"),
                            rational_from_json(j.at("beta_v"), "beta_v"), freeze);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("schedule json: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("schedule: ") + ex.what());
    }
}

// ------------------------------------------------------------------ M ------

// Time scale: a number, "critical" (1/nu_check(0)), a multiple of the
// critical scale, or a power law coef * lambda^power.
struct MSpec {
    enum class Kind { Absolute, CriticalMultiple, PowerLaw } kind = Kind::Absolute;
    double value = 1.0;  // absolute value or critical multiple
    double coef = 1.0, power = 1.0;

    static MSpec from_json(const json& j) {
        MSpec m;
        if (j.is_number()) {
            m.kind = Kind::Absolute;
            m.value = j.get<double>();
        } else if (j.is_string() && j.get<std::string>() == "critical") {
            m.kind = Kind::CriticalMultiple;
            m.value = 1.0;
        } else if (j.is_object() && j.contains("critical_multiple")) {
            m.kind = Kind::CriticalMultiple;
            m.value = j.at("critical_multiple").get<double>();
        } else if (j.is_object() && j.contains("power")) {
            m.kind = Kind::PowerLaw;
            m.power = j.at("power").get<double>();
            m.coef = j.value("coef", 1.0);
        } else {
            throw ConfigError("M: expected number, \"critical\", {critical_multiple}, or {power, coef}");
        }
        return m;
    }

    double resolve(double nu0, double lambda) const {
        double m = 0.0;
        switch (kind) {
            case Kind::Absolute: m = value; break;
            case Kind::CriticalMultiple: m = value / nu0; break;
            case Kind::PowerLaw: m = coef * std::pow(lambda, power); break;
        }
        if (!(m > 0)) throw ConfigError("M resolved to a non-positive value");
        return m;
    }
};

// ----------------------------------------------------------------- config --

struct ExperimentConfig {
    json graph_spec;
    RateSchedule schedule;
    MSpec m_spec;
    std::size_t replicates = 1;
    std::uint64_t base_seed = 1;
    std::vector<double> tau_grid;
    std::optional<double> t_max;  // default: M * max(tau)
    double tolerance = 0.05;
    std::size_t jobs = 1;
    std::string out_dir;
    std::size_t enumeration_cap = std::size_t{1} << 24;

    static ExperimentConfig from_json(const json& j) {
        try {
            ExperimentConfig c{j.at("graph"), schedule_from_json(j.at("schedule")),
                               MSpec::from_json(j.at("M"))};
            c.replicates = j.value("replicates", std::size_t{1});
            if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
            c.base_seed = j.value("seed", std::uint64_t{1});
            c.tau_grid = j.at("tau_grid").get<std::vector<double>>();
            if (c.tau_grid.empty()) throw ConfigError("tau_grid must be nonempty");
            for (std::size_t i = 0; i + 1 < c.tau_grid.size(); ++i)
                if (!(c.tau_grid[i] < c.tau_grid[i + 1]))
                    throw ConfigError("tau_grid must be strictly increasing");
            if (j.contains("t_max")) c.t_max = j.at("t_max").get<double>();
            c.tolerance = j.value("tolerance", 0.05);
            c.jobs = j.value("jobs", std::size_t{1});
            c.out_dir = j.value("out", std::string{});
            return c;
        } catch (const json::exception& ex) {
            throw ConfigError(std::string("experiment config: ") + ex.what());
        }
    }
};

// ------------------------------------------------------------ KS distance --

// Two-sided Kolmogorov–Smirnov statistic of samples against a cdf.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample set");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::fabs(double(i + 1) / n - f));
        d = std::max(d, std::fabs(double(i) / n - f));
    }
    return d;
}

// ------------------------------------------------------------------ report --

struct VerificationReport {
    bool pass = false;
    std::string error;  // nonempty when a stage failed
    double sup_distance = 0.0;
    double tolerance = 0.05;
    double nu0 = 0.0;
    double m_scale = 0.0;
    Regime regime = Regime::Critical;
    double censored_fraction = 0.0;
    bool assumptions_ok = false;
    AssumptionReport assumptions;
    SurvivalCurve empirical;
    SurvivalPrediction predicted;
    double runtime_seconds = 0.0;
    std::string out_dir;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// atomically replace path with content (write temp, then rename)
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace detail

inline std::string samples_csv(const std::vector<HittingSample>& samples) {
    std::string out = "replicate,seed,t_v,n_events,timeout\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const HittingSample& s = samples[i];
        out += std::to_string(i) + "," + std::to_string(s.seed) + "," + detail::fmt_double(s.t_v) +
               "," + std::to_string(s.n_events) + "," + (s.timed_out ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string survival_csv(const SurvivalCurve& emp, const SurvivalPrediction& pred) {
    std::string out = "tau,empirical,se,predicted\n";
    for (std::size_t i = 0; i < emp.points.size(); ++i) {
        out += detail::fmt_double(emp.points[i].tau) + "," +
               detail::fmt_double(emp.points[i].probability) + "," +
               detail::fmt_double(emp.points[i].std_error) + "," +
               detail::fmt_double(pred.survival[i]) + "\n";
    }
    return out;
}

inline json degree_json(const AsymptoticDegree& d) {
    return json{{"value", d.value.str()},
                {"value_float", d.value.to_double()},
                {"witness_a", d.a},
                {"witness_b", d.b}};
}

inline json landscape_report_json(const StateSpace& space, const BipartiteGraph& g, const Betas& betas) {
    AssumptionReport r = check_assumptions(space, g, betas);
    json degrees_pi = json::object();
    degrees_pi["u"] = degree_json(pi_degree(space, space.idx_u, betas));
    degrees_pi["v"] = degree_json(pi_degree(space, space.idx_v, betas));
    degrees_pi["empty"] = degree_json(pi_degree(space, space.idx_empty, betas));
    json out{
        {"beta_u", betas.beta_u.str()},
        {"beta_v", betas.beta_v.str()},
        {"num_states", space.size()},
        {"gamma_degree", degree_json(r.gamma_degree)},
        {"gamma_check_degree", degree_json(r.gamma_check.via_uv)},
        {"gamma_check_degree_j_minus", degree_json(r.gamma_check.via_j_minus)},
        {"gamma_check_forms_agree", r.gamma_check.forms_agree},
        {"pi_degrees", degrees_pi},
        {"assumptions",
         {{"complete_bipartite_u_gt_1", r.complete_bipartite_u_gt_1},
          {"weight_inequality", r.weight_inequality},
          {"no_deep_well", r.no_deep_well},
          {"energy_barrier", r.energy_barrier},
          {"cbg_beta_condition", r.cbg_beta_condition}}},
    };
    if (!r.note.empty()) out["note"] = r.note;
    if (!r.gamma_check.forms_agree)
        out["warning"] = "the two Gamma_check forms disagree on this graph";
    return out;
}

inline json report_json(const VerificationReport& r) {
    json emp = json::array(), pred = json::array();
    for (const auto& p : r.empirical.points)
        emp.push_back({{"tau", p.tau}, {"survival", p.probability}, {"se", p.std_error}, {"n", p.n}});
    for (std::size_t i = 0; i < r.predicted.survival.size(); ++i)
        pred.push_back({{"tau", r.predicted.tau_grid[i]}, {"survival", r.predicted.survival[i]}});
    json out{
        {"pass", r.pass},
        {"sup_distance", r.sup_distance},
        {"tolerance", r.tolerance},
        {"nu0", r.nu0},
        {"M", r.m_scale},
        {"regime", regime_name(r.regime)},
        {"censored_fraction", r.censored_fraction},
        {"assumptions_ok", r.assumptions_ok},
        {"assumptions",
         {{"complete_bipartite_u_gt_1", r.assumptions.complete_bipartite_u_gt_1},
          {"weight_inequality", r.assumptions.weight_inequality},
          {"no_deep_well", r.assumptions.no_deep_well},
          {"energy_barrier", r.assumptions.energy_barrier},
          {"cbg_beta_condition", r.assumptions.cbg_beta_condition}}},
        {"gamma_degree", degree_json(r.assumptions.gamma_degree)},
        {"gamma_check_degree", degree_json(r.assumptions.gamma_check.via_uv)},
        {"empirical", emp},
        {"predicted", pred},
        {"runtime_seconds", r.runtime_seconds},
    };
    if (!r.error.empty()) out["error"] = r.error;
    return out;
}

// --------------------------------------------------------------- running --

// Replicates fan out over `jobs` threads; sample i always uses
// replicate_seed(base_seed, i), so the result is independent of scheduling.
inline std::vector<HittingSample> run_replicates(const BipartiteGraph& g, const RateSchedule& sched,
                                                 std::size_t replicates, std::uint64_t base_seed,
                                                 double t_max, std::size_t jobs,
                                                 const SimulateOptions& opts = {}) {
    std::vector<HittingSample> samples(replicates);
    ConfigMask u = g.u_mask(), v = g.v_mask();
    if (jobs <= 1) {
        for (std::size_t i = 0; i < replicates; ++i)
            samples[i] = simulate_hitting(g, sched, u, v, replicate_seed(base_seed, i), t_max, opts);
        return samples;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= replicates || failed.load()) return;
                try {
                    samples[i] =
                        simulate_hitting(g, sched, u, v, replicate_seed(base_seed, i), t_max, opts);
                } catch (const std::exception& ex) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    error = ex.what();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (failed.load()) throw std::runtime_error("replicate failed: " + error);
    return samples;
}

inline VerificationReport run_experiment(const ExperimentConfig& cfg) {
    VerificationReport report;
    report.tolerance = cfg.tolerance;
    report.out_dir = cfg.out_dir;
    auto started = std::chrono::steady_clock::now();
    auto finish = [&]() {
        report.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return report;
    };
    std::vector<HittingSample> samples;
    try {
        BipartiteGraph g = graph_from_config(cfg.graph_spec);
        StateSpace space = enumerate_configs(g, cfg.enumeration_cap);
        Betas betas{cfg.schedule.beta_u, cfg.schedule.beta_v};
        report.assumptions = check_assumptions(space, g, betas);

        report.nu0 = nu_check(space, cfg.schedule, 0.0);
        report.m_scale = cfg.m_spec.resolve(report.nu0, cfg.schedule.lambda);
        RegimeCall rc = regime_classify(report.m_scale, report.nu0);
        report.regime = rc.regime;

        // Assumption 1.2 always; the energy-barrier assumption only in the
        // critical (middle) case of the law.
        bool assumption_12 =
            report.assumptions.complete_bipartite_u_gt_1 || report.assumptions.weight_inequality;
        report.assumptions_ok = assumption_12 && (report.regime != Regime::Critical ||
                                                  report.assumptions.energy_barrier);

        double t_max = cfg.t_max ? *cfg.t_max : report.m_scale * cfg.tau_grid.back();
        samples = run_replicates(g, cfg.schedule, cfg.replicates, cfg.base_seed, t_max, cfg.jobs);

        report.empirical = estimate_survival(samples, report.m_scale, cfg.tau_grid);
        report.predicted = predicted_survival(space, cfg.schedule, report.m_scale, cfg.tau_grid);

        double sup = 0.0;
        for (std::size_t i = 0; i < cfg.tau_grid.size(); ++i)
            sup = std::max(sup,
                           std::fabs(report.empirical.points[i].probability - report.predicted.survival[i]));
        report.sup_distance = sup;

        std::size_t censored = 0;
        for (const auto& s : samples) censored += s.timed_out ? 1 : 0;
        report.censored_fraction = double(censored) / double(samples.size());

        report.pass = report.assumptions_ok && report.sup_distance <= report.tolerance;
    } catch (const std::exception& ex) {
        report.error = ex.what();
        report.pass = false;
        return finish();
    }

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::filesystem::path dir(cfg.out_dir);
        detail::write_file_atomic(dir / "samples.csv", samples_csv(samples));
        detail::write_file_atomic(dir / "survival.csv", survival_csv(report.empirical, report.predicted));
        finish();
        detail::write_file_atomic(dir / "report.json", report_json(report).dump(2) + "\n");
        return report;
    }
    return finish();
}

// ----------------------------------------------------------------- sweeps --

struct SweepPoint {
    double axis_value = 0.0;
    VerificationReport report;
};

// Independent runs along an axis over lambda, M, or beta_V; point i uses
// base seed + i. Per-point failures are recorded and the sweep continues.
inline std::vector<SweepPoint> sweep(const json& config_template, const std::string& axis,
                                     const std::vector<json>& values) {
    if (values.empty()) throw ConfigError("sweep: empty axis");
    if (axis != "lambda" && axis != "M" && axis != "beta_v")
        throw ConfigError("sweep: axis must be lambda, M, or beta_v");
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        json cfg = config_template;
        if (axis == "lambda") cfg["schedule"]["lambda"] = values[i];
        else if (axis == "M") cfg["M"] = values[i];
        else cfg["schedule"]["beta_v"] = values[i];
        cfg["seed"] = cfg.value("seed", std::uint64_t{1}) + i;
        if (cfg.contains("out") && cfg["out"].is_string())
            cfg["out"] = cfg["out"].get<std::string>() + "/point" + std::to_string(i);
        SweepPoint point;
        try {
            point.axis_value = values[i].is_number() ? values[i].get<double>() : 0.0;
            point.report = run_experiment(ExperimentConfig::from_json(cfg));
        } catch (const std::exception& ex) {
            point.report.error = ex.what();
            point.report.pass = false;
        }
        out.push_back(std::move(point));
    }
    return out;
}

inline std::string sweep_csv(const std::string& axis, const std::vector<SweepPoint>& points) {
    std::string out = axis + ",nu0,M,regime,sup_distance,censored_fraction,pass,error\n";
    for (const auto& p : points) {
        out += detail::fmt_double(p.axis_value) + "," + detail::fmt_double(p.report.nu0) + "," +
               detail::fmt_double(p.report.m_scale) + "," + regime_name(p.report.regime) + "," +
               detail::fmt_double(p.report.sup_distance) + "," +
               detail::fmt_double(p.report.censored_fraction) + "," +
               (p.report.pass ? "1" : "0") + "," + p.report.error + "\n";
    }
    return out;
}

} // namespace csma
