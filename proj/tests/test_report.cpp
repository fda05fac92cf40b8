#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eabf/config.hpp"
#include "eabf/report.hpp"

using namespace eabf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

RunConfig small_config(const std::string& dir) {
    auto c = parse_config(R"(
[scenario]
population = 300
activation_span_ms = 1000
[eab]
settings = 0.7:100, 1:5
baselines = 0.5:200
[grid]
p_step = 0.1
p_low = 0.1
p_high = 0.5
t_min_ms = 100
t_max_ms = 400
t_step_ms = 100
[sim]
replications = 3
master_seed = 7
[constraints]
p_min = 0:1:0.25
)");
    c.output_dir = std::string(EABF_TEST_TMP) + "/" + dir;
    fs::remove_all(c.output_dir);
    return c;
}

using Command = CommandResult (*)(const RunConfig&, std::ostream&);

void check_rerun_identical(Command command, const std::string& name) {
    std::ostringstream log;
    const auto a = command(small_config(name + "_a"), log);
    const auto b = command(small_config(name + "_b"), log);
    CHECK(a.exit_code() == 0);
    REQUIRE(a.files.size() == b.files.size());
    REQUIRE_FALSE(a.files.empty());
    for (std::size_t k = 0; k < a.files.size(); ++k) {
        CHECK(fs::path(a.files[k]).filename() == fs::path(b.files[k]).filename());
        CHECK(slurp(a.files[k]) == slurp(b.files[k]));
    }
}

}  // namespace

TEST_CASE("reruns are byte-identical") {
    check_rerun_identical(cmd_analyze, "analyze");
    check_rerun_identical(cmd_simulate, "simulate");
    check_rerun_identical(cmd_optimize, "optimize");
    check_rerun_identical(cmd_compare, "compare");
}

TEST_CASE("headers carry the hash and seed") {
    const auto config = small_config("headers");
    std::ostringstream log;
    const auto result = cmd_simulate(config, log);
    const auto expected = "# eabf simulate config_hash=" + config_hash(config) + " master_seed=7";
    for (const auto& f : result.files) CHECK(lines(f).front() == expected);
}

TEST_CASE("analyze output") {
    auto config = small_config("analyze_out");
    std::ostringstream log;
    const auto result = cmd_analyze(config, log);
    CHECK(result.exit_code() == 0);
    const auto summary = lines(config.output_dir + "/analyze_summary.csv");
    REQUIRE(summary.size() == 4);
    CHECK(summary[1] == "p_eab,t_eab_ms,p_s,mean_attempts,delay_ms,energy_j,slots,status");
    CHECK(summary[2].rfind("0.7,100,", 0) == 0);
    CHECK(fs::exists(config.output_dir + "/analyze_trace_p0.7_t100.csv"));
    CHECK(lines(config.output_dir + "/analyze_trace_p1_t5.csv")[1] ==
          "slot,attempts,collisions,successes,cumulative_successes");
}

TEST_CASE("single device, no barring: one-row trace") {
    auto config = small_config("single");
    config.scenario.profile.population = 1;
    config.scenario.profile.activation_span_ms = 5.0;
    config.settings = {{1.0, 5}};
    std::ostringstream log;
    CHECK(cmd_analyze(config, log).exit_code() == 0);
    CHECK(lines(config.output_dir + "/analyze_trace_p1_t5.csv").size() == 3);
}

TEST_CASE("optimize output layout") {
    const auto config = small_config("optimize_out");
    std::ostringstream log;
    const auto result = cmd_optimize(config, log);
    CHECK(result.exit_code() == 0);
    const auto sweep = lines(config.output_dir + "/sweep.csv");
    CHECK(sweep[1] == "p_eab,t_eab_ms,p_s,delay_ms,energy_j,feasible");
    CHECK(sweep.size() == 2 + 20);
    const auto tradeoff = lines(config.output_dir + "/tradeoff.csv");
    CHECK(tradeoff[1] == "P_min,P_S_max,delay_min_ms,energy_min_j,P_hat,T_hat_ms,feasible");
    CHECK(tradeoff.size() == 2 + 5);
    const auto gains = lines(config.output_dir + "/gains.csv");
    CHECK(gains.size() == 2 + 5);
}

TEST_CASE("failures set the exit status") {
    auto config = small_config("failing");
    config.evaluation.recursion.slot_cap = 3;
    config.sim.options.slot_cap = 3;
    std::ostringstream log;
    const auto analyzed = cmd_analyze(config, log);
    CHECK(analyzed.exit_code() == 1);
    CHECK(analyzed.failures.size() == 2);
    const auto summary = lines(config.output_dir + "/analyze_summary.csv");
    CHECK(summary[2] == "0.7,100,,,,,,error");
    const auto simulated = cmd_simulate(config, log);
    CHECK(simulated.exit_code() == 1);
    CHECK(simulated.failures.front().find("seed") != std::string::npos);
    // Grid points past the cap are infeasible rows, not failures; the
    // baseline cannot be evaluated, which is.
    const auto optimized = cmd_optimize(config, log);
    CHECK(optimized.exit_code() == 1);
    for (const auto& l : lines(config.output_dir + "/sweep.csv"))
        if (l[0] != '#' && l[0] != 'p') CHECK(l.substr(l.size() - 2) == ",0");
}

TEST_CASE("deviation bookkeeping") {
    SlotTrace trace;
    trace.rows = {{1, 2.0, 0.0, 2.0, 2.0}, {2, 1.0, 0.0, 1.0, 3.0}};
    MonteCarloReport mc;
    mc.replications = 10;
    mc.attempts = {{2.0, 1.0, 0.5}, {0.0, 0.5, 0.1}};
    mc.collisions = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    mc.successes = {{2.0, 1.0, 0.5}, {0.0, 0.5, 0.1}};
    const auto d = slot_deviations(trace, mc);
    REQUIRE(d.size() == 3);
    CHECK(d[0].z[0] == 0.0);
    CHECK(d[2].analytic[0] == 0.0);
    CHECK(d[2].z[0] == doctest::Approx(-5.0));  // 0.5 below, scale max(0.1, 1/10)
    const auto a = agreement(d);
    CHECK(a.slots == 3);
    CHECK(a.fraction[0] == doctest::Approx(2.0 / 3.0));
    CHECK(a.fraction[1] == 1.0);
    CHECK(deviation_scale(0.0, 500) == 0.002);
    CHECK(deviation_scale(0.3, 500) == 0.3);
}
