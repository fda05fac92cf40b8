#include <doctest.h>

#include <cmath>
#include <limits>

#include "eabf/errors.hpp"
#include "eabf/optimizer.hpp"

using namespace eabf;

namespace {

SweepRow row(double p, std::int64_t t, double ps, double delay, double energy) {
    MetricsReport m;
    m.success_probability = ps;
    m.mean_access_delay_ms = delay;
    m.mean_cycle_energy_j = energy;
    return SweepRow{{p, t}, m, {}};
}

SweepRow failed(double p, std::int64_t t) { return SweepRow{{p, t}, std::nullopt, "cap"}; }

GridSpec small_grid() {
    GridSpec g;
    g.barring_factor_step = 0.05;
    g.barring_factor_low = 0.05;
    g.barring_factor_high = 0.5;
    g.backoff_min_ms = 100;
    g.backoff_max_ms = 1000;
    g.backoff_step_ms = 100;
    return g;
}

Scenario small_scenario() {
    Scenario s;
    s.profile.population = 3000;
    return s;
}

}  // namespace

TEST_CASE("default grid layout") {
    const GridSpec g;
    const auto p = g.barring_factors();
    REQUIRE(p.size() == 100);
    CHECK(p.front() == 0.01);
    CHECK(p[6] == 0.07);
    CHECK(p.back() == 1.0);
    const auto t = g.backoffs();
    REQUIRE(t.size() == 200);
    CHECK(t.front() == 100);
    CHECK(t.back() == 20000);
    const auto s = g.settings();
    REQUIRE(s.size() == 20000);
    CHECK(s[0] == BarringSetting{0.01, 100});
    CHECK(s[1] == BarringSetting{0.01, 200});
    CHECK(s[200] == BarringSetting{0.02, 100});
    CHECK(s.back() == BarringSetting{1.0, 20000});
    CHECK_NOTHROW(g.validate(Scenario{}));
}

TEST_CASE("grid validation") {
    const Scenario scenario;
    GridSpec g;
    g.backoff_step_ms = 7;
    CHECK_THROWS_AS(g.validate(scenario), DomainError);
    g = GridSpec{};
    g.barring_factor_step = 0.0;
    CHECK_THROWS_AS(g.validate(scenario), DomainError);
    g = GridSpec{};
    g.backoff_max_ms = 50;
    CHECK_THROWS_AS(g.validate(scenario), DomainError);
    g = GridSpec{};
    g.barring_factor_high = 0.0;
    CHECK_THROWS_AS(g.validate(scenario), DomainError);
}

TEST_CASE("streamed evaluation equals the stored trace") {
    const Scenario scenario;
    const EnergyConfig energy;
    for (BarringSetting s : {BarringSetting{0.7, 8000}, BarringSetting{0.17, 100}}) {
        const auto trace = run_recursion(s, scenario);
        auto expected = qos_metrics(trace, s, scenario);
        expected.mean_cycle_energy_j = cycle_energy(trace, energy);
        CHECK(evaluate_setting(s, scenario, energy) == expected);
    }
}

TEST_CASE("one-point grid") {
    GridSpec g;
    g.barring_factor_low = g.barring_factor_high = 0.3;
    g.backoff_min_ms = g.backoff_max_ms = 200;
    const auto scenario = small_scenario();
    const auto table = sweep_grid(g, scenario, EnergyConfig{});
    REQUIRE(table.size() == 1);
    REQUIRE(table[0].ok());
    CHECK(*table[0].metrics == evaluate_setting({0.3, 200}, scenario, EnergyConfig{}));
    const std::vector<double> p_min = {0.0};
    const auto curve = tradeoff_curve(table, p_min, std::numeric_limits<double>::infinity());
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].setting == BarringSetting{0.3, 200});
    CHECK(curve[0].min_energy_j == table[0].metrics->mean_cycle_energy_j);
    CHECK(curve[0].feasible);
}

TEST_CASE("tie-breaking and feasibility") {
    const SweepTable table = {
        row(0.2, 100, 0.50, 1000.0, 10.0),
        row(0.1, 100, 0.60, 1000.0, 10.0),  // same energy, higher P_S
        row(0.3, 300, 0.60, 900.0, 10.0),   // same energy and P_S, lower delay
        row(0.4, 200, 0.60, 900.0, 10.0),   // full tie with the row above except T
        row(0.5, 100, 0.90, 5000.0, 20.0),
        failed(0.6, 100),
    };
    const auto best = minimize_energy(table, ConstraintSpec{0.0, 1e9});
    CHECK(best.setting == BarringSetting{0.4, 200});
    CHECK(best.feasible);

    const auto strict = minimize_energy(table, ConstraintSpec{0.8, 1e9});
    CHECK(strict.setting == BarringSetting{0.5, 100});
    CHECK(strict.feasible);

    // Nothing meets both bounds: best effort prefers rows within the delay bound.
    const auto none = minimize_energy(table, ConstraintSpec{0.95, 2000.0});
    CHECK_FALSE(none.feasible);
    CHECK(none.max_success_probability == 0.60);
    CHECK(none.setting == BarringSetting{0.4, 200});

    const auto nothing = minimize_energy(table, ConstraintSpec{0.95, 100.0});
    CHECK_FALSE(nothing.feasible);
    CHECK(nothing.setting == BarringSetting{0.5, 100});

    CHECK_THROWS_AS(minimize_energy(SweepTable{}, ConstraintSpec{}), DomainError);
    CHECK_THROWS_AS(minimize_energy(SweepTable{failed(0.1, 100)}, ConstraintSpec{}), DomainError);
    CHECK_THROWS_AS(minimize_energy(table, ConstraintSpec{1.5, 100.0}), DomainError);
}

TEST_CASE("order of the table does not change the optimum") {
    SweepTable table = {row(0.2, 100, 0.5, 1000.0, 10.0), row(0.1, 100, 0.5, 1000.0, 10.0),
                        row(0.3, 100, 0.7, 1000.0, 11.0)};
    const auto a = minimize_energy(table, ConstraintSpec{});
    std::reverse(table.begin(), table.end());
    CHECK(minimize_energy(table, ConstraintSpec{}) == a);
    CHECK(a.setting == BarringSetting{0.1, 100});
}

TEST_CASE("sweep is deterministic and cached") {
    const auto scenario = small_scenario();
    Evaluator evaluator(scenario, EnergyConfig{});
    const auto a = sweep_grid(small_grid(), evaluator, SweepOptions{1});
    CHECK(evaluator.cached() == a.size());
    const auto b = sweep_grid(small_grid(), evaluator, SweepOptions{4});
    CHECK(a == b);
    const auto c = sweep_grid(small_grid(), scenario, EnergyConfig{}, SweepOptions{3});
    CHECK(a == c);
    REQUIRE(a.size() == 100);
    CHECK(a[0].setting == BarringSetting{0.05, 100});
    CHECK(a[10].setting == BarringSetting{0.1, 100});
}

TEST_CASE("trade-off curve is energy monotone and feasible records hold up") {
    const auto scenario = small_scenario();
    const auto table = sweep_grid(small_grid(), scenario, EnergyConfig{});
    std::vector<double> p_min;
    for (int k = 0; k <= 100; ++k) p_min.push_back(k / 100.0);
    const auto curve = tradeoff_curve(table, p_min, 50000.0);
    REQUIRE(curve.size() == p_min.size());
    double previous = 0.0;
    for (const auto& r : curve) {
        if (!r.feasible) continue;
        CHECK(r.min_energy_j >= previous);
        previous = r.min_energy_j;
        const auto fresh = evaluate_setting(r.setting, scenario, EnergyConfig{});
        CHECK(r.constraint.satisfied_by(fresh));
        CHECK(fresh.mean_cycle_energy_j == r.min_energy_j);
    }
    const std::vector<double> unsorted = {0.5, 0.1};
    CHECK_THROWS_AS(tradeoff_curve(table, unsorted, 1000.0), DomainError);
}

TEST_CASE("gains against a baseline") {
    const auto m = evaluate_setting({0.3, 200}, small_scenario(), EnergyConfig{});
    OptimumRecord record{{0.3, 200}, m.mean_cycle_energy_j, m.success_probability, m.mean_access_delay_ms,
                         ConstraintSpec{}, true};
    const std::vector<OptimumRecord> records = {record};
    const std::vector<Baseline> baselines = {{{0.3, 200}, m}};
    const auto gains = gains_vs_baseline(records, baselines);
    REQUIRE(gains.size() == 1);
    CHECK(gains[0].success_gain == 0.0);
    CHECK(gains[0].energy_gain == 0.0);
    CHECK(gains[0].delay_gain == 0.0);

    MetricsReport worse = m;
    worse.mean_cycle_energy_j *= 2.0;
    worse.mean_access_delay_ms *= 4.0;
    const std::vector<Baseline> other = {{{0.5, 1000}, worse}};
    const auto g = gains_vs_baseline(records, other);
    CHECK(g[0].energy_gain == doctest::Approx(0.5));
    CHECK(g[0].delay_gain == doctest::Approx(0.75));
    CHECK(g[0].baseline == BarringSetting{0.5, 1000});
}

TEST_CASE("standard settings") {
    const auto s = standard_settings();
    REQUIRE(s.size() == 3);
    CHECK(s[0] == BarringSetting{0.5, 16000});
    CHECK(s[1] == BarringSetting{0.7, 8000});
    CHECK(s[2] == BarringSetting{0.9, 4000});
}

TEST_CASE("non-converging points are recorded, not thrown") {
    EvaluationOptions options;
    options.recursion.slot_cap = 1000;
    Evaluator evaluator(Scenario{}, EnergyConfig{}, options);
    const auto r = evaluator.evaluate({0.7, 8000});
    CHECK_FALSE(r.ok());
    CHECK(r.error.find("cap") != std::string::npos);
    CHECK_THROWS_AS(evaluate_setting({0.7, 8000}, Scenario{}, EnergyConfig{}, options), NonConvergenceError);
}
