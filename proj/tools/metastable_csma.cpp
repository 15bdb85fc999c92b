// metastable-csma — CLI for exact oracles, trajectory simulation, crossover-law
// predictions, verification runs, and parameter sweeps
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "csma/exact.hpp"
#include "csma/graph.hpp"
#include "csma/harness.hpp"
#include "csma/landscape.hpp"
#include "csma/predict.hpp"
#include "csma/rates.hpp"
#include "csma/simulate.hpp"

namespace {

using csma::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw csma::ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw csma::ConfigError("config parse error in " + path + ": " + ex.what());
    }
    return j;
}

// --schedule accepts a path or inline JSON (first non-space char '{')
json load_schedule_arg(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t");
    if (first != std::string::npos && arg[first] == '{') {
        try {
            return json::parse(arg);
        } catch (const json::exception& ex) {
            throw csma::ConfigError(std::string("inline schedule: ") + ex.what());
        }
    }
    return load_json_file(arg);
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    csma::detail::write_file_atomic(path, content);
}

struct CommonArgs {
    std::string config_path;
    std::string graph_spec;
    std::string schedule_arg;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 0;
};

json merged_config(const CommonArgs& args) {
    json cfg = args.config_path.empty() ? json::object() : load_json_file(args.config_path);
    if (!args.graph_spec.empty()) cfg["graph"] = args.graph_spec;
    if (!args.schedule_arg.empty()) cfg["schedule"] = load_schedule_arg(args.schedule_arg);
    if (args.seed) cfg["seed"] = *args.seed;
    if (args.jobs > 0) cfg["jobs"] = args.jobs;
    return cfg;
}

int cmd_exact(const CommonArgs& args) {
    json cfg = merged_config(args);
    if (!cfg.contains("graph") || !cfg.contains("schedule"))
        throw csma::ConfigError("exact: needs graph and schedule (config file or flags)");
    csma::BipartiteGraph g = csma::graph_from_config(cfg.at("graph"));
    csma::RateSchedule sched = csma::schedule_from_json(cfg.at("schedule"));
    std::vector<double> times = cfg.value("times", std::vector<double>{0.0});
    csma::StateSpace space = csma::enumerate_configs(g);

    std::string out = "t,lambda_u,lambda_v,gamma,eps_check,nu_check,mean_T_uv\n";
    for (double t : times) {
        double lu = sched.lambda_u_at(t), lv = sched.lambda_v_at(t);
        double gamma = csma::gamma_at(sched, g, t);
        double eps = csma::hitting_prob_before_return(space, lu, lv);
        double mean = csma::expected_hitting_time(space, lu, lv, space.idx_u, space.idx_v);
        out += csma::detail::fmt_double(t) + "," + csma::detail::fmt_double(lu) + "," +
               csma::detail::fmt_double(lv) + "," + csma::detail::fmt_double(gamma) + "," +
               csma::detail::fmt_double(eps) + "," + csma::detail::fmt_double(eps * gamma) + "," +
               csma::detail::fmt_double(mean) + "\n";
    }
    write_output(args.out, out);
    return 0;
}

int cmd_simulate(const CommonArgs& args, std::size_t replicates_flag, double t_max_flag,
                 bool regen_log) {
    json cfg = merged_config(args);
    if (!cfg.contains("graph") || !cfg.contains("schedule"))
        throw csma::ConfigError("simulate: needs graph and schedule (config file or flags)");
    csma::BipartiteGraph g = csma::graph_from_config(cfg.at("graph"));
    csma::RateSchedule sched = csma::schedule_from_json(cfg.at("schedule"));
    std::size_t replicates = replicates_flag ? replicates_flag : cfg.value("replicates", std::size_t{1});
    std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
    double t_max = t_max_flag > 0 ? t_max_flag : cfg.value("t_max", 0.0);
    if (!(t_max > 0)) throw csma::ConfigError("simulate: needs a positive --t-max");
    std::size_t jobs = cfg.value("jobs", std::size_t{1});

    csma::SimulateOptions opts;
    opts.track_regen = regen_log;
    opts.full_regen_log = regen_log;
    auto samples = csma::run_replicates(g, sched, replicates, seed, t_max, jobs, opts);
    write_output(args.out, csma::samples_csv(samples));
    if (regen_log) {
        std::string regen_out = "replicate,trial_start,duration,ticks,success\n";
        for (std::size_t i = 0; i < samples.size(); ++i)
            for (const auto& r : samples[i].regen_log)
                regen_out += std::to_string(i) + "," + csma::detail::fmt_double(r.start) + "," +
                             csma::detail::fmt_double(r.duration) + "," + std::to_string(r.ticks) +
                             "," + (r.success ? "1" : "0") + "\n";
        std::string path = args.out.empty() || args.out == "-"
                               ? std::string("-")
                               : (std::filesystem::path(args.out).parent_path() / "regen.csv").string();
        if (path == "-") std::cout << regen_out;
        else write_output(path, regen_out);
    }
    return 0;
}

int cmd_predict(const CommonArgs& args) {
    json cfg = merged_config(args);
    csma::ExperimentConfig::from_json(cfg);  // validate shape early (replicates unused)
    csma::BipartiteGraph g = csma::graph_from_config(cfg.at("graph"));
    csma::RateSchedule sched = csma::schedule_from_json(cfg.at("schedule"));
    csma::StateSpace space = csma::enumerate_configs(g);
    double nu0 = csma::nu_check(space, sched, 0.0);
    double m_scale = csma::MSpec::from_json(cfg.at("M")).resolve(nu0, sched.lambda);
    std::vector<double> tau_grid = cfg.at("tau_grid").get<std::vector<double>>();
    csma::SurvivalPrediction pred = csma::predicted_survival(space, sched, m_scale, tau_grid);

    std::string out = "tau,survival_predicted,regime,M,nu0\n";
    for (std::size_t i = 0; i < pred.survival.size(); ++i)
        out += csma::detail::fmt_double(pred.tau_grid[i]) + "," +
               csma::detail::fmt_double(pred.survival[i]) + "," + csma::regime_name(pred.regime) +
               "," + csma::detail::fmt_double(pred.m_scale) + "," +
               csma::detail::fmt_double(pred.nu0) + "\n";
    write_output(args.out, out);
    return 0;
}

int cmd_verify(const CommonArgs& args, bool landscape_only) {
    json cfg = merged_config(args);
    if (landscape_only) {
        if (!cfg.contains("graph") || !cfg.contains("schedule"))
            throw csma::ConfigError("verify --landscape: needs graph and schedule");
        csma::BipartiteGraph g = csma::graph_from_config(cfg.at("graph"));
        csma::RateSchedule sched = csma::schedule_from_json(cfg.at("schedule"));
        csma::StateSpace space = csma::enumerate_configs(g);
        csma::Betas betas{sched.beta_u, sched.beta_v};
        write_output(args.out, csma::landscape_report_json(space, g, betas).dump(2) + "\n");
        return 0;
    }
    if (!args.out.empty()) cfg["out"] = args.out;
    csma::ExperimentConfig ec = csma::ExperimentConfig::from_json(cfg);
    csma::VerificationReport report = csma::run_experiment(ec);
    if (ec.out_dir.empty()) std::cout << csma::report_json(report).dump(2) << "\n";
    else std::cerr << (report.pass ? "PASS" : "FAIL") << " sup_distance="
                   << report.sup_distance << " tolerance=" << report.tolerance << "\n";
    if (!report.error.empty()) {
        std::cerr << "error: " << report.error << "\n";
        return 1;
    }
    return report.pass ? 0 : 1;
}

int cmd_sweep(const CommonArgs& args) {
    json cfg = merged_config(args);
    if (!cfg.contains("sweep")) throw csma::ConfigError("sweep: config needs a sweep block");
    std::string axis = cfg.at("sweep").value("axis", std::string{});
    std::vector<json> values;
    for (const auto& v : cfg.at("sweep").at("values")) values.push_back(v);
    json tmpl = cfg;
    tmpl.erase("sweep");
    if (!args.out.empty()) tmpl["out"] = args.out;
    auto points = csma::sweep(tmpl, axis, values);
    std::string csv = csma::sweep_csv(axis, points);
    if (!args.out.empty())
        csma::detail::write_file_atomic(std::filesystem::path(args.out) / "sweep.csv", csv);
    else
        std::cout << csv;
    bool all_ok = true;
    for (const auto& p : points) all_ok = all_ok && p.report.error.empty();
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hard-core crossover dynamics on bipartite interference graphs"};
    app.require_subcommand(1);

    CommonArgs args;
    std::size_t replicates = 0;
    double t_max = 0.0;
    bool regen_log = false;
    bool landscape_only = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON experiment config");
        sub->add_option("--graph", args.graph_spec, "graph spec: complete:m,n | torus:m,n | file:PATH");
        sub->add_option("--schedule", args.schedule_arg, "schedule JSON file or inline JSON");
        sub->add_option("--out", args.out, "output file or directory");
        sub->add_option("--seed", args.seed, "base seed override");
        sub->add_option("--jobs", args.jobs, "parallel replicate workers");
    };

    CLI::App* exact = app.add_subcommand("exact", "frozen-time oracle table (CSV)");
    add_common(exact);
    CLI::App* simulate = app.add_subcommand("simulate", "sample crossover times (CSV)");
    add_common(simulate);
    simulate->add_option("--replicates", replicates, "number of replicates");
    simulate->add_option("--t-max", t_max, "simulation horizon");
    simulate->add_flag("--regen-log", regen_log, "emit per-trial regeneration records");
    CLI::App* predict = app.add_subcommand("predict", "predicted survival curve (CSV)");
    add_common(predict);
    CLI::App* verify = app.add_subcommand("verify", "run the verification experiment");
    add_common(verify);
    verify->add_flag("--landscape", landscape_only, "emit the landscape/assumption report only");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (exact->parsed()) return cmd_exact(args);
        if (simulate->parsed()) return cmd_simulate(args, replicates, t_max, regen_log);
        if (predict->parsed()) return cmd_predict(args);
        if (verify->parsed()) return cmd_verify(args, landscape_only);
        if (sweep_cmd->parsed()) return cmd_sweep(args);
    } catch (const csma::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
