#include "eabf/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <optional>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "eabf/analytic.hpp"
#include "eabf/errors.hpp"
#include "eabf/optimizer.hpp"

namespace eabf {

namespace fs = std::filesystem;

namespace {

std::string num(double x) { return fmt::format("{}", x); }
std::string num(std::int64_t x) { return fmt::format("{}", x); }

class CsvWriter {
public:
    CsvWriter(const RunConfig& config, const std::string& command, const std::string& name,
              const std::vector<std::string>& columns, CommandResult& result)
        : path_((fs::path(config.output_dir) / name).string()), out_(path_, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error(fmt::format("cannot write '{}'", path_));
        out_ << fmt::format("# eabf {} config_hash={} master_seed={}\n", command, config_hash(config),
                            config.sim.master_seed);
        row(columns);
        result.files.push_back(path_);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ',';
            out_ << cells[k];
        }
        out_ << '\n';
    }

    ~CsvWriter() { out_.flush(); }

private:
    std::string path_;
    std::ofstream out_;
};

void prepare_output(const RunConfig& config) {
    config.validate();
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec || !fs::is_directory(config.output_dir))
        throw ConfigError("output.dir", fmt::format("cannot create directory '{}'", config.output_dir));
}

struct AnalyticResult {
    SlotTrace trace;
    MetricsReport metrics;
};

AnalyticResult analyze_setting(const BarringSetting& setting, const RunConfig& config) {
    AnalyticResult r;
    r.trace = run_recursion(setting, config.scenario, config.evaluation.recursion);
    r.metrics = qos_metrics(r.trace, setting, config.scenario);
    r.metrics.mean_cycle_energy_j = cycle_energy(r.trace, config.energy, config.evaluation.energy);
    return r;
}

MonteCarloReport simulate_setting(const BarringSetting& setting, const RunConfig& config) {
    return run_monte_carlo(setting, config.scenario, config.energy, config.sim.options, config.sim.replications,
                           config.sim.master_seed);
}

std::vector<std::string> blanks(std::size_t n) { return std::vector<std::string>(n); }

}  // namespace

std::string setting_tag(const BarringSetting& setting) {
    return fmt::format("p{}_t{}", setting.barring_factor, setting.backoff_ms);
}

double deviation_scale(double standard_error, std::int64_t replications) {
    return std::max(standard_error, 1.0 / static_cast<double>(std::max<std::int64_t>(replications, 1)));
}

std::vector<SlotDeviation> slot_deviations(const SlotTrace& analytic, const MonteCarloReport& simulated) {
    const auto n = std::max(analytic.size(), simulated.slot_count());
    const std::array<const SlotCurve*, 3> curves = {&simulated.attempts, &simulated.collisions,
                                                    &simulated.successes};
    std::vector<SlotDeviation> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto& d = out[k];
        d.slot = static_cast<std::int64_t>(k) + 1;
        if (k < analytic.size()) {
            const auto& row = analytic.rows[k];
            d.analytic = {row.attempts, row.collisions, row.successes};
        }
        for (std::size_t q = 0; q < 3; ++q) {
            if (k < curves[q]->mean.size()) {
                d.simulated[q] = curves[q]->mean[k];
                d.standard_error[q] = curves[q]->standard_error[k];
            }
            d.z[q] = (d.analytic[q] - d.simulated[q]) / deviation_scale(d.standard_error[q], simulated.replications);
        }
    }
    return out;
}

Agreement agreement(const std::vector<SlotDeviation>& deviations, double k) {
    Agreement a;
    a.slots = static_cast<std::int64_t>(deviations.size());
    if (deviations.empty()) return a;
    std::array<std::int64_t, 3> within{};
    for (const auto& d : deviations)
        for (std::size_t q = 0; q < 3; ++q)
            if (std::abs(d.z[q]) <= k) ++within[q];
    for (std::size_t q = 0; q < 3; ++q)
        a.fraction[q] = static_cast<double>(within[q]) / static_cast<double>(a.slots);
    return a;
}

CommandResult cmd_analyze(const RunConfig& config, std::ostream& log) {
    CommandResult result;
    prepare_output(config);
    CsvWriter summary(config, "analyze", "analyze_summary.csv",
                      {"p_eab", "t_eab_ms", "p_s", "mean_attempts", "delay_ms", "energy_j", "slots", "status"},
                      result);
    for (const auto& setting : config.settings) {
        std::vector<std::string> row = {num(setting.barring_factor), num(setting.backoff_ms)};
        try {
            const auto r = analyze_setting(setting, config);
            CsvWriter trace(config, "analyze", fmt::format("analyze_trace_{}.csv", setting_tag(setting)),
                            {"slot", "attempts", "collisions", "successes", "cumulative_successes"}, result);
            for (const auto& s : r.trace.rows)
                trace.row({num(s.slot), num(s.attempts), num(s.collisions), num(s.successes),
                           num(s.cumulative_successes)});
            const auto& m = r.metrics;
            row.insert(row.end(), {num(m.success_probability), num(m.mean_attempts), num(m.mean_access_delay_ms),
                                   num(m.mean_cycle_energy_j), num(m.slot_count), "ok"});
            fmt::print(log, "{}: P_S {:.4f}  delay {:.2f} s  energy {:.3f} kJ  slots {}\n", to_string(setting),
                       m.success_probability, m.mean_access_delay_ms / 1000.0, m.mean_cycle_energy_j / 1000.0,
                       m.slot_count);
        } catch (const std::exception& e) {
            const auto b = blanks(5);
            row.insert(row.end(), b.begin(), b.end());
            row.push_back("error");
            result.failures.push_back(fmt::format("{}: {}", to_string(setting), e.what()));
        }
        summary.row(row);
    }
    return result;
}

CommandResult cmd_simulate(const RunConfig& config, std::ostream& log) {
    CommandResult result;
    prepare_output(config);
    CsvWriter summary(config, "simulate", "simulate_summary.csv",
                      {"p_eab", "t_eab_ms", "p_s", "p_s_se", "delay_ms", "delay_se_ms", "energy_j", "energy_se_j",
                       "replications", "master_seed", "status"},
                      result);
    for (const auto& setting : config.settings) {
        std::vector<std::string> row = {num(setting.barring_factor), num(setting.backoff_ms)};
        try {
            const auto mc = simulate_setting(setting, config);
            CsvWriter curve(config, "simulate", fmt::format("simulate_curve_{}.csv", setting_tag(setting)),
                            {"slot", "mean_attempts", "mean_collisions", "mean_successes", "se_attempts",
                             "se_collisions", "se_successes"},
                            result);
            for (std::size_t k = 0; k < mc.slot_count(); ++k)
                curve.row({num(static_cast<std::int64_t>(k) + 1), num(mc.attempts.mean[k]),
                           num(mc.collisions.mean[k]), num(mc.successes.mean[k]), num(mc.attempts.standard_error[k]),
                           num(mc.collisions.standard_error[k]), num(mc.successes.standard_error[k])});
            row.insert(row.end(),
                       {num(mc.success_probability.mean), num(mc.success_probability.standard_error),
                        num(mc.mean_access_delay_ms.mean), num(mc.mean_access_delay_ms.standard_error),
                        num(mc.cycle_energy_j.mean), num(mc.cycle_energy_j.standard_error), num(mc.replications),
                        fmt::format("{}", mc.master_seed), "ok"});
            fmt::print(log, "{}: P_S {:.4f} +/- {:.4f}  delay {:.2f} s  energy {:.3f} kJ  ({} replications)\n",
                       to_string(setting), mc.success_probability.mean, mc.success_probability.standard_error,
                       mc.mean_access_delay_ms.mean / 1000.0, mc.cycle_energy_j.mean / 1000.0, mc.replications);
        } catch (const std::exception& e) {
            const auto b = blanks(6);
            row.insert(row.end(), b.begin(), b.end());
            row.insert(row.end(), {num(config.sim.replications), fmt::format("{}", config.sim.master_seed), "error"});
            result.failures.push_back(fmt::format("{}: {}", to_string(setting), e.what()));
        }
        summary.row(row);
    }
    return result;
}

CommandResult cmd_optimize(const RunConfig& config, std::ostream& log) {
    CommandResult result;
    prepare_output(config);
    const auto grid = config.effective_grid();
    Evaluator evaluator(config.scenario, config.energy, config.evaluation);
    const auto table = sweep_grid(grid, evaluator, SweepOptions{config.sim.options.threads});

    std::int64_t converged = 0;
    {
        CsvWriter sweep(config, "optimize", "sweep.csv",
                        {"p_eab", "t_eab_ms", "p_s", "delay_ms", "energy_j", "feasible"}, result);
        for (const auto& row : table) {
            if (row.ok()) {
                ++converged;
                const auto& m = *row.metrics;
                sweep.row({num(row.setting.barring_factor), num(row.setting.backoff_ms), num(m.success_probability),
                           num(m.mean_access_delay_ms), num(m.mean_cycle_energy_j), "1"});
            } else {
                sweep.row({num(row.setting.barring_factor), num(row.setting.backoff_ms), "", "", "", "0"});
            }
        }
    }
    fmt::print(log, "grid: {} points, {} converged\n", table.size(), converged);

    std::vector<OptimumRecord> records;
    try {
        records = tradeoff_curve(table, config.constraints.p_min_values, config.constraints.max_delay_ms);
    } catch (const std::exception& e) {
        result.failures.push_back(fmt::format("trade-off: {}", e.what()));
    }
    {
        CsvWriter tradeoff(config, "optimize", "tradeoff.csv",
                           {"P_min", "P_S_max", "delay_min_ms", "energy_min_j", "P_hat", "T_hat_ms", "feasible"},
                           result);
        for (const auto& r : records) {
            tradeoff.row({num(r.constraint.min_success_probability), num(r.max_success_probability),
                          num(r.min_delay_ms), num(r.min_energy_j), num(r.setting.barring_factor),
                          num(r.setting.backoff_ms), r.feasible ? "1" : "0"});
        }
    }

    std::vector<Baseline> baselines;
    for (const auto& setting : config.baselines) {
        const auto row = evaluator.evaluate(setting);
        if (row.ok())
            baselines.push_back({setting, *row.metrics});
        else
            result.failures.push_back(fmt::format("baseline {}: {}", to_string(setting), row.error));
    }
    const auto gains = gains_vs_baseline(records, baselines);
    CsvWriter out(config, "optimize", "gains.csv",
                  {"P_min", "P_S_max", "delay_min_ms", "energy_min_j", "baseline_p_eab", "baseline_t_eab_ms",
                   "baseline_p_s", "baseline_delay_ms", "baseline_energy_j", "success_gain", "delay_gain",
                   "energy_gain"},
                  result);
    for (std::size_t k = 0; k < gains.size(); ++k) {
        const auto& g = gains[k];
        const auto& base = baselines[k % baselines.size()].metrics;
        out.row({num(g.record.constraint.min_success_probability), num(g.record.max_success_probability),
                 num(g.record.min_delay_ms), num(g.record.min_energy_j), num(g.baseline.barring_factor),
                 num(g.baseline.backoff_ms), num(base.success_probability), num(base.mean_access_delay_ms),
                 num(base.mean_cycle_energy_j), num(g.success_gain), num(g.delay_gain), num(g.energy_gain)});
    }
    for (const auto& r : records)
        fmt::print(log, "P_min {:.2f}: P_S {:.4f}  delay {:.2f} s  energy {:.3f} kJ  at {}{}\n",
                   r.constraint.min_success_probability, r.max_success_probability, r.min_delay_ms / 1000.0,
                   r.min_energy_j / 1000.0, to_string(r.setting), r.feasible ? "" : "  (infeasible, best effort)");
    return result;
}

CommandResult cmd_compare(const RunConfig& config, std::ostream& log) {
    CommandResult result;
    prepare_output(config);
    CsvWriter summary(config, "compare", "compare_summary.csv",
                      {"p_eab", "t_eab_ms", "analytic_p_s", "sim_p_s", "sim_p_s_se", "delta_p_s",
                       "analytic_delay_ms", "sim_delay_ms", "sim_delay_se_ms", "delta_delay_ms", "analytic_energy_j",
                       "sim_energy_j", "sim_energy_se_j", "agree_attempts", "agree_collisions", "agree_successes",
                       "slots", "replications", "master_seed", "status"},
                      result);
    for (const auto& setting : config.settings) {
        std::vector<std::string> row = {num(setting.barring_factor), num(setting.backoff_ms)};
        try {
            const auto a = analyze_setting(setting, config);
            const auto mc = simulate_setting(setting, config);
            const auto deviations = slot_deviations(a.trace, mc);
            const auto agree = agreement(deviations);
            CsvWriter dev(config, "compare", fmt::format("compare_deviation_{}.csv", setting_tag(setting)),
                          {"slot", "analytic_attempts", "sim_attempts", "se_attempts", "z_attempts",
                           "analytic_collisions", "sim_collisions", "se_collisions", "z_collisions",
                           "analytic_successes", "sim_successes", "se_successes", "z_successes"},
                          result);
            for (const auto& d : deviations) {
                std::vector<std::string> cells = {num(d.slot)};
                for (std::size_t q = 0; q < 3; ++q)
                    cells.insert(cells.end(),
                                 {num(d.analytic[q]), num(d.simulated[q]), num(d.standard_error[q]), num(d.z[q])});
                dev.row(cells);
            }
            const auto& m = a.metrics;
            row.insert(row.end(),
                       {num(m.success_probability), num(mc.success_probability.mean),
                        num(mc.success_probability.standard_error),
                        num(m.success_probability - mc.success_probability.mean), num(m.mean_access_delay_ms),
                        num(mc.mean_access_delay_ms.mean), num(mc.mean_access_delay_ms.standard_error),
                        num(m.mean_access_delay_ms - mc.mean_access_delay_ms.mean), num(m.mean_cycle_energy_j),
                        num(mc.cycle_energy_j.mean), num(mc.cycle_energy_j.standard_error), num(agree.fraction[0]),
                        num(agree.fraction[1]), num(agree.fraction[2]), num(agree.slots), num(mc.replications),
                        fmt::format("{}", mc.master_seed), "ok"});
            fmt::print(log,
                       "{}: P_S {:.4f} vs {:.4f}  delay {:.2f} s vs {:.2f} s  slots within 3 SE: "
                       "{:.1f}% / {:.1f}% / {:.1f}%\n",
                       to_string(setting), m.success_probability, mc.success_probability.mean,
                       m.mean_access_delay_ms / 1000.0, mc.mean_access_delay_ms.mean / 1000.0,
                       100.0 * agree.fraction[0], 100.0 * agree.fraction[1], 100.0 * agree.fraction[2]);
        } catch (const std::exception& e) {
            const auto b = blanks(15);
            row.insert(row.end(), b.begin(), b.end());
            row.insert(row.end(), {num(config.sim.replications), fmt::format("{}", config.sim.master_seed), "error"});
            result.failures.push_back(fmt::format("{}: {}", to_string(setting), e.what()));
        }
        summary.row(row);
    }
    return result;
}

}  // namespace eabf
