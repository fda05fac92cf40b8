// eabf: analytic, simulated and optimized EAB barring-factor runs.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "eabf/config.hpp"
#include "eabf/errors.hpp"
#include "eabf/report.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> replications;
    std::optional<int> threads;
    std::optional<std::string> rar_truncation;
};

eabf::RunConfig resolve(const Overrides& o) {
    auto config = o.config_path.empty() ? eabf::default_config() : eabf::load_config(o.config_path);
    if (o.out) config.output_dir = *o.out;
    if (o.seed) config.sim.master_seed = *o.seed;
    if (o.replications) config.sim.replications = *o.replications;
    if (o.threads) config.sim.options.threads = *o.threads;
    if (o.rar_truncation) config.sim.options.rar_window_truncation = *o.rar_truncation == "on";
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EAB barring-factor random access: analysis, simulation and energy optimization"};
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--out", o.out, "output directory");
        cmd->add_option("--seed", o.seed, "master seed");
        cmd->add_option("--replications", o.replications, "Monte Carlo replications")->check(CLI::PositiveNumber);
        cmd->add_option("--threads", o.threads, "worker threads (0 = all)")->check(CLI::NonNegativeNumber);
        cmd->add_option("--rar-truncation", o.rar_truncation, "cap simulated successes at the RAR window capacity")
            ->check(CLI::IsMember({"on", "off"}));
    };

    using Command = eabf::CommandResult (*)(const eabf::RunConfig&, std::ostream&);
    Command command = nullptr;
    auto add = [&](const char* name, const char* help, Command fn) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd);
        cmd->callback([&command, fn] { command = fn; });
    };
    add("analyze", "analytic recursion, QoS metrics and cycle energy per setting", eabf::cmd_analyze);
    add("simulate", "Monte Carlo simulation per setting", eabf::cmd_simulate);
    add("optimize", "grid sweep, energy-minimizing trade-off and gains over baselines", eabf::cmd_optimize);
    add("compare", "per-slot analysis vs simulation deviations", eabf::cmd_compare);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = resolve(o);
        const auto result = command(config, std::cout);
        for (const auto& f : result.files) fmt::print("wrote {}\n", f);
        for (const auto& f : result.failures) fmt::print(std::cerr, "error: {}\n", f);
        return result.exit_code();
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 1;
    }
}
