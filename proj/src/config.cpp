#include "eabf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "eabf/errors.hpp"

namespace eabf {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

template <typename T>
T parse_number(const std::string& raw, const std::string& field) {
    const auto text = trim(raw);
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(field, fmt::format("expected a number, got '{}'", raw));
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError(field, fmt::format("value must be finite, got '{}'", raw));
    }
    return value;
}

bool parse_bool(const std::string& raw, const std::string& field) {
    auto text = trim(raw);
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "off" || text == "no" || text == "0") return false;
    throw ConfigError(field, fmt::format("expected on/off, got '{}'", raw));
}

// One INI section; tracks which keys were consumed so leftovers can be reported.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return child->data();
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }

    template <typename T>
    void number(const std::string& key, T& target) {
        if (auto v = raw(key)) target = parse_number<T>(*v, field(key));
    }

    void flag(const std::string& key, bool& target) {
        if (auto v = raw(key)) target = parse_bool(*v, field(key));
    }

    void finish() const {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_) {
            if (!used_.count(key)) throw ConfigError(field(key), "unknown key");
            if (!child.empty()) throw ConfigError(field(key), "nested keys are not allowed");
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> used_;
};

const std::vector<std::string> kSections = {"scenario", "energy", "eab", "grid", "sim", "constraints", "output"};

template <typename F>
void wrap_domain(const std::string& field, F&& f) {
    try {
        f();
    } catch (const DomainError& e) {
        throw ConfigError(field, e.what());
    }
}

}  // namespace

std::vector<BarringSetting> parse_settings(const std::string& text, const std::string& field) {
    std::vector<BarringSetting> out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError(field, fmt::format("expected 'P_eab:T_eab_ms', got '{}'", item));
        out.push_back({parse_number<double>(item.substr(0, colon), field),
                       parse_number<std::int64_t>(item.substr(colon + 1), field)});
    }
    return out;
}

std::vector<double> parse_value_list(const std::string& text, const std::string& field) {
    const auto body = trim(text);
    if (body.find(':') != std::string::npos) {
        const auto parts = split(body, ':');
        if (parts.size() != 3) throw ConfigError(field, fmt::format("expected 'low:high:step', got '{}'", text));
        const double low = parse_number<double>(parts[0], field);
        const double high = parse_number<double>(parts[1], field);
        const double step = parse_number<double>(parts[2], field);
        if (!(step > 0.0) || high < low) throw ConfigError(field, fmt::format("empty range '{}'", text));
        std::vector<double> out;
        const auto count = static_cast<std::int64_t>(std::floor((high - low) / step + 1e-9)) + 1;
        for (std::int64_t k = 0; k < count; ++k)
            out.push_back(std::round((low + static_cast<double>(k) * step) * 1e12) / 1e12);
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split(body, ','))
        if (!item.empty()) out.push_back(parse_number<double>(item, field));
    return out;
}

RunConfig default_config() {
    RunConfig config;
    config.settings = {{0.5, 16000}, {0.7, 8000}, {0.9, 4000}, {0.08, 500}};
    config.baselines = standard_settings();
    config.constraints.p_min_values = parse_value_list("0:1:0.01", "constraints.p_min");
    return config;
}

void RunConfig::validate() const {
    wrap_domain("scenario", [&] { scenario.validate(); });
    wrap_domain("energy", [&] { energy.validate(); });
    if (settings.empty()) throw ConfigError("eab.settings", "at least one setting is required");
    for (const auto& s : settings) wrap_domain("eab.settings", [&] { eabf::validate(s, scenario); });
    for (const auto& s : baselines) wrap_domain("eab.baselines", [&] { eabf::validate(s, scenario); });
    if (!(evaluation.recursion.termination_residual > 0.0))
        throw ConfigError("eab.termination_residual", "must be positive");
    if (evaluation.recursion.slot_cap < 1) throw ConfigError("eab.slot_cap", "must be positive");
    if (grid) wrap_domain("grid", [&] { grid->validate(scenario); });
    for (double p : constraints.p_min_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("constraints.p_min", fmt::format("bound {} outside [0, 1]", p));
    if (!std::is_sorted(constraints.p_min_values.begin(), constraints.p_min_values.end()))
        throw ConfigError("constraints.p_min", "bounds must be ascending");
    if (!(constraints.max_delay_ms > 0.0)) throw ConfigError("constraints.t_max_ms", "must be positive");
    if (sim.replications < 1) throw ConfigError("sim.replications", "must be at least 1");
    if (sim.options.slot_cap < 1) throw ConfigError("sim.slot_cap", "must be positive");
    if (!(sim.options.contention_window_ms >= 0.0))
        throw ConfigError("sim.contention_window_ms", "must be nonnegative");
    if (sim.options.threads < 0) throw ConfigError("sim.threads", "must be nonnegative");
    if (output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

RunConfig parse_config(const std::string& text) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", fmt::format("line {}: {}", e.line(), e.message()));
    }
    // The parser drops empty sections, so check the headers directly too.
    {
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
            line = trim(line);
            if (line.size() < 2 || line.front() != '[' || line.back() != ']') continue;
            const auto name = trim(line.substr(1, line.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
                throw ConfigError(name, "unknown section");
        }
    }
    for (const auto& [name, child] : root) {
        if (child.empty() && !child.data().empty()) throw ConfigError(name, "key outside of any section");
        if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
            throw ConfigError(name, "unknown section");
    }
    auto section = [&](const std::string& name) {
        auto child = root.get_child_optional(pt::ptree::path_type(name, '\0'));
        return Section(child ? &*child : nullptr, name);
    };

    RunConfig config = default_config();

    auto sc = section("scenario");
    auto& scenario = config.scenario;
    sc.number("population", scenario.profile.population);
    sc.number("alpha", scenario.profile.alpha);
    sc.number("beta", scenario.profile.beta_shape);
    sc.number("activation_span_ms", scenario.profile.activation_span_ms);
    sc.number("rach_period_ms", scenario.rach_period_ms);
    sc.number("collision_backoff_window_ms", scenario.collision_backoff_window_ms);
    sc.number("preamble_count", scenario.preamble_count);
    sc.number("mean_rach_time_ms", scenario.mean_rach_time_ms);
    sc.number("collision_realization_ms", scenario.collision_realization_ms);
    sc.finish();

    auto en = section("energy");
    auto& energy = config.energy;
    en.number("bandwidth_mhz", energy.bandwidth_mhz);
    en.number("mcs_rate", energy.mcs_rate);
    en.number("data_symbols_per_prb", energy.data_symbols_per_prb);
    en.number("prb_per_subframe", energy.prb_per_subframe);
    en.number("rar_window_subframes", energy.rar_window_subframes);
    en.number("fixed_power_w", energy.fixed_power_w);
    en.number("prb_transmit_power_w", energy.prb_transmit_power_w);
    en.number("pa_efficiency", energy.pa_efficiency);
    en.flag("round_successes", config.evaluation.energy.round_successes);
    en.finish();

    auto eab = section("eab");
    if (auto v = eab.raw("settings")) config.settings = parse_settings(*v, eab.field("settings"));
    if (auto v = eab.raw("baselines")) config.baselines = parse_settings(*v, eab.field("baselines"));
    eab.number("termination_residual", config.evaluation.recursion.termination_residual);
    eab.number("slot_cap", config.evaluation.recursion.slot_cap);
    if (auto v = eab.raw("q_indexing")) {
        const auto mode = trim(*v);
        if (mode == "interval")
            config.evaluation.recursion.indexing = QIndexing::interval;
        else if (mode == "floor_ratio")
            config.evaluation.recursion.indexing = QIndexing::floor_ratio;
        else
            throw ConfigError(eab.field("q_indexing"), fmt::format("expected interval or floor_ratio, got '{}'", *v));
    }
    eab.flag("literal_sum", config.evaluation.recursion.literal_sum);
    eab.finish();

    if (root.get_child_optional("grid")) {
        auto gr = section("grid");
        GridSpec grid;
        gr.number("p_step", grid.barring_factor_step);
        gr.number("p_low", grid.barring_factor_low);
        gr.number("p_high", grid.barring_factor_high);
        gr.number("t_min_ms", grid.backoff_min_ms);
        gr.number("t_max_ms", grid.backoff_max_ms);
        gr.number("t_step_ms", grid.backoff_step_ms);
        gr.finish();
        config.grid = grid;
    }

    auto sim = section("sim");
    sim.number("replications", config.sim.replications);
    sim.number("master_seed", config.sim.master_seed);
    sim.flag("rar_truncation", config.sim.options.rar_window_truncation);
    if (auto v = sim.raw("contention_timing")) {
        const auto mode = trim(*v);
        if (mode == "mean")
            config.sim.options.contention_timing = ContentionTiming::mean;
        else if (mode == "sampled")
            config.sim.options.contention_timing = ContentionTiming::sampled;
        else
            throw ConfigError(sim.field("contention_timing"), fmt::format("expected mean or sampled, got '{}'", *v));
    }
    sim.number("contention_window_ms", config.sim.options.contention_window_ms);
    sim.number("slot_cap", config.sim.options.slot_cap);
    sim.number("threads", config.sim.options.threads);
    sim.finish();

    auto co = section("constraints");
    if (auto v = co.raw("p_min")) config.constraints.p_min_values = parse_value_list(*v, co.field("p_min"));
    co.number("t_max_ms", config.constraints.max_delay_ms);
    co.finish();

    auto out = section("output");
    if (auto v = out.raw("dir")) config.output_dir = trim(*v);
    out.finish();

    config.validate();
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", fmt::format("cannot open config file '{}'", path));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string canonical_text(const RunConfig& c) {
    std::string out;
    auto line = [&](const char* key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
    auto settings = [](const std::vector<BarringSetting>& list) {
        std::string s;
        for (const auto& x : list) s += fmt::format("{}{}:{}", s.empty() ? "" : ",", x.barring_factor, x.backoff_ms);
        return s;
    };
    const auto& sc = c.scenario;
    line("scenario.population", sc.profile.population);
    line("scenario.alpha", sc.profile.alpha);
    line("scenario.beta", sc.profile.beta_shape);
    line("scenario.activation_span_ms", sc.profile.activation_span_ms);
    line("scenario.rach_period_ms", sc.rach_period_ms);
    line("scenario.collision_backoff_window_ms", sc.collision_backoff_window_ms);
    line("scenario.preamble_count", sc.preamble_count);
    line("scenario.mean_rach_time_ms", sc.mean_rach_time_ms);
    line("scenario.collision_realization_ms", sc.collision_realization_ms);
    const auto& en = c.energy;
    line("energy.bandwidth_mhz", en.bandwidth_mhz);
    line("energy.mcs_rate", en.mcs_rate);
    line("energy.data_symbols_per_prb", en.data_symbols_per_prb);
    line("energy.prb_per_subframe", en.prb_per_subframe);
    line("energy.rar_window_subframes", en.rar_window_subframes);
    line("energy.fixed_power_w", en.fixed_power_w);
    line("energy.prb_transmit_power_w", en.prb_transmit_power_w);
    line("energy.pa_efficiency", en.pa_efficiency);
    line("energy.round_successes", c.evaluation.energy.round_successes);
    line("eab.settings", settings(c.settings));
    line("eab.baselines", settings(c.baselines));
    line("eab.termination_residual", c.evaluation.recursion.termination_residual);
    line("eab.slot_cap", c.evaluation.recursion.slot_cap);
    line("eab.q_indexing", c.evaluation.recursion.indexing == QIndexing::interval ? "interval" : "floor_ratio");
    line("eab.literal_sum", c.evaluation.recursion.literal_sum);
    const auto grid = c.effective_grid();
    line("grid.p_step", grid.barring_factor_step);
    line("grid.p_low", grid.barring_factor_low);
    line("grid.p_high", grid.barring_factor_high);
    line("grid.t_min_ms", grid.backoff_min_ms);
    line("grid.t_max_ms", grid.backoff_max_ms);
    line("grid.t_step_ms", grid.backoff_step_ms);
    line("sim.replications", c.sim.replications);
    line("sim.master_seed", c.sim.master_seed);
    line("sim.rar_truncation", c.sim.options.rar_window_truncation);
    line("sim.contention_timing", c.sim.options.contention_timing == ContentionTiming::mean ? "mean" : "sampled");
    line("sim.contention_window_ms", c.sim.options.contention_window_ms);
    line("sim.slot_cap", c.sim.options.slot_cap);
    line("constraints.p_min", fmt::format("{}", fmt::join(c.constraints.p_min_values, ",")));
    line("constraints.t_max_ms", c.constraints.max_delay_ms);
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace eabf
