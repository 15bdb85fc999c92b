#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csma/harness.hpp"

using namespace csma;

namespace {

json small_experiment_json(const std::string& out_dir = "") {
    // frozen K11 with lambda_U = 30, lambda_V = 900: the exponential law
    // already holds to ~1e-3 here (eps*gamma*E = 931/930)
    json j{
        {"graph", "complete:1,1"},
        {"schedule",
         {{"lambda", 30.0}, {"c_u", 1.0}, {"c_v", 1.0}, {"mu_u", 1.0}, {"mu_v", 1.0},
          {"beta_u", 1}, {"beta_v", 2}, {"freeze_time", 0.0}}},
        {"M", "critical"},
        {"replicates", 400},
        {"seed", 2024},
        {"tau_grid", {0.25, 0.5, 1.0, 2.0}},
        {"t_max", 1000.0},
        {"tolerance", 0.08},
    };
    if (!out_dir.empty()) j["out"] = out_dir;
    return j;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("ks distance formula") {
    auto uniform = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    CHECK(ks_distance({0.1, 0.2, 0.3}, uniform) == doctest::Approx(0.7).epsilon(1e-15));

    // samples placed exactly at the quantiles (i - 0.5)/n
    std::vector<double> quantiles;
    const std::size_t n = 10;
    for (std::size_t i = 1; i <= n; ++i) quantiles.push_back((double(i) - 0.5) / n);
    CHECK(ks_distance(quantiles, uniform) == doctest::Approx(0.05).epsilon(1e-12));

    CHECK(ks_distance({0.5}, uniform) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(ks_distance({}, uniform), std::invalid_argument);
}

TEST_CASE("config parsing: schedules, graphs, M resolution") {
    json sj{{"lambda", 100.0}, {"c_u", 1.0}, {"c_v", 1.0}, {"mu_u", 1.0}, {"mu_v", 1.0},
            {"beta_u", "1/2"}, {"beta_v", 0.75}};
    RateSchedule s = schedule_from_json(sj);
    CHECK(s.beta_u == Rational(1, 2));
    CHECK(s.beta_v == Rational(3, 4));
    CHECK_FALSE(s.freeze_time.has_value());

    sj["beta_v"] = "1/3";  // violates beta_V > beta_U
    CHECK_THROWS_AS(schedule_from_json(sj), ConfigError);

    BipartiteGraph g = graph_from_spec_string("complete:3,2");
    CHECK(g.num_u() == 3);
    CHECK(graph_from_spec_string("torus:2,4").num_edges() == 12);
    CHECK_THROWS_AS(graph_from_spec_string("ladder:2,2"), ConfigError);
    CHECK_THROWS_AS(graph_from_spec_string("complete:nope"), ConfigError);

    json inline_graph{{"u", {"a"}}, {"v", {"b", "c"}}};
    inline_graph["edges"] = json::array({json::array({"a", "b"}), json::array({"a", "c"})});
    CHECK(graph_from_config(inline_graph).num_edges() == 2);

    CHECK(MSpec::from_json(json(12.5)).resolve(1.0, 100) == doctest::Approx(12.5));
    CHECK(MSpec::from_json(json("critical")).resolve(0.25, 100) == doctest::Approx(4.0));
    CHECK(MSpec::from_json(json{{"critical_multiple", 100}}).resolve(0.5, 100) ==
          doctest::Approx(200.0));
    CHECK(MSpec::from_json(json{{"power", 2.0}, {"coef", 3.0}}).resolve(1.0, 10) ==
          doctest::Approx(300.0));
    CHECK_THROWS_AS(MSpec::from_json(json("banana")), ConfigError);

    json bad = small_experiment_json();
    bad["tau_grid"] = {0.5, 0.5};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);
}

TEST_CASE("run_experiment on a tiny frozen instance") {
    ExperimentConfig cfg = ExperimentConfig::from_json(small_experiment_json());
    VerificationReport r = run_experiment(cfg);
    REQUIRE(r.error.empty());
    // frozen K11 at lambda_U = 30, lambda_V = 900: nu0 = 900/930
    CHECK(r.nu0 == doctest::Approx(900.0 / 930).epsilon(1e-10));
    CHECK(r.m_scale == doctest::Approx(930.0 / 900).epsilon(1e-10));
    CHECK(r.regime == Regime::Critical);
    CHECK(r.empirical.points.size() == 4);
    CHECK(r.sup_distance <= 0.08);  // the law holds to ~1e-3 plus sampling noise
    CHECK(r.pass);
}

TEST_CASE("run_experiment reports structured errors") {
    json j = small_experiment_json();
    j["graph"] = "complete:12,12";  // 8390655 states: fine to enumerate? no — cap it
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    cfg.enumeration_cap = 100;
    VerificationReport r = run_experiment(cfg);
    CHECK_FALSE(r.error.empty());
    CHECK_FALSE(r.pass);
}

TEST_CASE("emitted CSVs are deterministic and reproduce the report math") {
    std::filesystem::path dir1 = std::filesystem::temp_directory_path() / "csma_test_run1";
    std::filesystem::path dir2 = std::filesystem::temp_directory_path() / "csma_test_run2";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    json j = small_experiment_json(dir1.string());
    j["replicates"] = 150;
    VerificationReport r1 = run_experiment(ExperimentConfig::from_json(j));
    REQUIRE(r1.error.empty());
    j["out"] = dir2.string();
    run_experiment(ExperimentConfig::from_json(j));

    std::string samples1 = slurp(dir1 / "samples.csv");
    CHECK(samples1 == slurp(dir2 / "samples.csv"));
    std::string survival1 = slurp(dir1 / "survival.csv");
    CHECK(survival1 == slurp(dir2 / "survival.csv"));

    // recompute the sup distance from the emitted file; %.17g round-trips
    std::istringstream in(survival1);
    std::string line;
    std::getline(in, line);
    CHECK(line == "tau,empirical,se,predicted");
    double sup = 0.0;
    while (std::getline(in, line)) {
        double tau, emp, se, pred;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &tau, &emp, &se, &pred) == 4);
        sup = std::max(sup, std::fabs(emp - pred));
    }
    CHECK(sup == r1.sup_distance);

    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("parallel replicates give the same samples as sequential") {
    BipartiteGraph g = make_complete_bipartite(1, 1);
    RateSchedule s = RateSchedule::homogeneous(2, 4);
    auto seq = run_replicates(g, s, 64, 7, 100.0, 1);
    auto par = run_replicates(g, s, 64, 7, 100.0, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].t_v == par[i].t_v);
        CHECK(seq[i].n_events == par[i].n_events);
        CHECK(seq[i].seed == par[i].seed);
    }
}

TEST_CASE("sweep runs every point and keeps going after failures") {
    json tmpl = small_experiment_json();
    tmpl["replicates"] = 50;
    auto points = sweep(tmpl, "lambda", {json(4.0), json(9.0), json(16.0)});
    REQUIRE(points.size() == 3);
    for (const auto& p : points) CHECK(p.report.error.empty());
    // seeds derive from base + index: different lambda, different nu0
    CHECK(points[0].report.nu0 != points[1].report.nu0);

    CHECK_THROWS_AS(sweep(tmpl, "lambda", {}), ConfigError);
    CHECK_THROWS_AS(sweep(tmpl, "c_u", {json(1.0)}), ConfigError);

    // a failing point is recorded, the sweep continues
    json bad_tmpl = small_experiment_json();
    auto mixed = sweep(bad_tmpl, "M", {json(-1.0), json(1.0)});
    REQUIRE(mixed.size() == 2);
    CHECK_FALSE(mixed[0].report.error.empty());
    CHECK(mixed[1].report.error.empty());

    std::string csv = sweep_csv("M", mixed);
    CHECK(csv.find("M,nu0") == 0);
}

TEST_CASE("sweeping M through the critical scale orders the survival curves") {
    json tmpl = small_experiment_json();
    tmpl["replicates"] = 400;
    tmpl["tau_grid"] = {1.0};
    auto points = sweep(tmpl, "M",
                        {json{{"critical_multiple", 1e-3}}, json{{"critical_multiple", 1.0}},
                         json{{"critical_multiple", 100.0}}});
    REQUIRE(points.size() == 3);
    for (const auto& p : points) REQUIRE(p.report.error.empty());
    CHECK(points[0].report.regime == Regime::Subcritical);
    CHECK(points[1].report.regime == Regime::Critical);
    CHECK(points[2].report.regime == Regime::Supercritical);
    double sub = points[0].report.empirical.points[0].probability;
    double crit = points[1].report.empirical.points[0].probability;
    double super = points[2].report.empirical.points[0].probability;
    CHECK(sub > crit);
    CHECK(crit > super);
    CHECK(sub > 0.95);
    CHECK(super < 0.05);
}
