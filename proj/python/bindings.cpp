#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eabf/analytic.hpp"
#include "eabf/arrival.hpp"
#include "eabf/config.hpp"
#include "eabf/energy.hpp"
#include "eabf/errors.hpp"
#include "eabf/optimizer.hpp"
#include "eabf/simulator.hpp"

namespace py = pybind11;
using namespace eabf;

namespace {

py::dict trace_dict(const SlotTrace& trace) {
    std::vector<std::int64_t> slot;
    std::vector<double> attempts, collisions, successes, cumulative;
    for (const auto& r : trace.rows) {
        slot.push_back(r.slot);
        attempts.push_back(r.attempts);
        collisions.push_back(r.collisions);
        successes.push_back(r.successes);
        cumulative.push_back(r.cumulative_successes);
    }
    py::dict d;
    d["slot"] = slot;
    d["attempts"] = attempts;
    d["collisions"] = collisions;
    d["successes"] = successes;
    d["cumulative_successes"] = cumulative;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "EAB barring-factor random access: analytic recursion, energy model, simulator, optimizer";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    py::class_<ActivationProfile>(m, "ActivationProfile")
        .def(py::init<>())
        .def_readwrite("alpha", &ActivationProfile::alpha)
        .def_readwrite("beta", &ActivationProfile::beta_shape)
        .def_readwrite("activation_span_ms", &ActivationProfile::activation_span_ms)
        .def_readwrite("population", &ActivationProfile::population);

    py::class_<BarringSetting>(m, "BarringSetting")
        .def(py::init<>())
        .def(py::init([](double p, std::int64_t t) { return BarringSetting{p, t}; }), py::arg("barring_factor"),
             py::arg("backoff_ms"))
        .def_readwrite("barring_factor", &BarringSetting::barring_factor)
        .def_readwrite("backoff_ms", &BarringSetting::backoff_ms)
        .def("__repr__", [](const BarringSetting& s) { return to_string(s); })
        .def(py::self == py::self);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("profile", &Scenario::profile)
        .def_readwrite("rach_period_ms", &Scenario::rach_period_ms)
        .def_readwrite("collision_backoff_window_ms", &Scenario::collision_backoff_window_ms)
        .def_readwrite("preamble_count", &Scenario::preamble_count)
        .def_readwrite("mean_rach_time_ms", &Scenario::mean_rach_time_ms)
        .def_readwrite("collision_realization_ms", &Scenario::collision_realization_ms)
        .def("validate", &Scenario::validate);

    py::class_<EnergyConfig>(m, "EnergyConfig")
        .def(py::init<>())
        .def_readwrite("bandwidth_mhz", &EnergyConfig::bandwidth_mhz)
        .def_readwrite("mcs_rate", &EnergyConfig::mcs_rate)
        .def_readwrite("data_symbols_per_prb", &EnergyConfig::data_symbols_per_prb)
        .def_readwrite("prb_per_subframe", &EnergyConfig::prb_per_subframe)
        .def_readwrite("rar_window_subframes", &EnergyConfig::rar_window_subframes)
        .def_readwrite("fixed_power_w", &EnergyConfig::fixed_power_w)
        .def_readwrite("prb_transmit_power_w", &EnergyConfig::prb_transmit_power_w)
        .def_readwrite("pa_efficiency", &EnergyConfig::pa_efficiency)
        .def("validate", &EnergyConfig::validate);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def(py::init<>())
        .def_readonly("success_probability", &MetricsReport::success_probability)
        .def_readonly("collision_probability", &MetricsReport::collision_probability)
        .def_readonly("mean_attempts", &MetricsReport::mean_attempts)
        .def_readonly("mean_access_delay_ms", &MetricsReport::mean_access_delay_ms)
        .def_readonly("mean_cycle_energy_j", &MetricsReport::mean_cycle_energy_j)
        .def_readonly("slot_count", &MetricsReport::slot_count);

    m.def("access_intensities", &access_intensities, py::arg("profile"), py::arg("rach_period_ms"));
    m.def("expected_collisions", &expected_collisions, py::arg("attempts"), py::arg("preamble_count"));
    m.def("max_rars_per_subframe", &max_rars_per_subframe, py::arg("energy"));
    m.def("rar_burst_energy", &rar_burst_energy, py::arg("successes"), py::arg("energy"));

    m.def(
        "run_recursion",
        [](const BarringSetting& s, const Scenario& sc) { return trace_dict(run_recursion(s, sc)); },
        py::arg("setting"), py::arg("scenario"),
        "Per-slot expected attempts, collisions and successes as a dict of lists.");
    m.def(
        "evaluate_setting",
        [](const BarringSetting& s, const Scenario& sc, const EnergyConfig& e) {
            py::gil_scoped_release release;
            return evaluate_setting(s, sc, e);
        },
        py::arg("setting"), py::arg("scenario") = Scenario{}, py::arg("energy") = EnergyConfig{});

    py::enum_<ContentionTiming>(m, "ContentionTiming")
        .value("mean", ContentionTiming::mean)
        .value("sampled", ContentionTiming::sampled);

    py::class_<SimOptions>(m, "SimOptions")
        .def(py::init<>())
        .def_readwrite("rar_window_truncation", &SimOptions::rar_window_truncation)
        .def_readwrite("contention_timing", &SimOptions::contention_timing)
        .def_readwrite("contention_window_ms", &SimOptions::contention_window_ms)
        .def_readwrite("slot_cap", &SimOptions::slot_cap)
        .def_readwrite("threads", &SimOptions::threads);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("mean", &Estimate::mean)
        .def_readonly("standard_error", &Estimate::standard_error)
        .def("__repr__", [](const Estimate& e) {
            return "Estimate(" + std::to_string(e.mean) + " +/- " + std::to_string(e.standard_error) + ")";
        });

    py::class_<SlotCurve>(m, "SlotCurve")
        .def_readonly("mean", &SlotCurve::mean)
        .def_readonly("standard_error", &SlotCurve::standard_error);

    py::class_<MonteCarloReport>(m, "MonteCarloReport")
        .def_readonly("replications", &MonteCarloReport::replications)
        .def_readonly("master_seed", &MonteCarloReport::master_seed)
        .def_readonly("attempts", &MonteCarloReport::attempts)
        .def_readonly("collisions", &MonteCarloReport::collisions)
        .def_readonly("successes", &MonteCarloReport::successes)
        .def_readonly("success_probability", &MonteCarloReport::success_probability)
        .def_readonly("mean_access_delay_ms", &MonteCarloReport::mean_access_delay_ms)
        .def_readonly("cycle_energy_j", &MonteCarloReport::cycle_energy_j);

    m.def(
        "run_monte_carlo",
        [](const BarringSetting& s, const Scenario& sc, const EnergyConfig& e, const SimOptions& o,
           std::int64_t replications, std::uint64_t seed) {
            py::gil_scoped_release release;
            return run_monte_carlo(s, sc, e, o, replications, seed);
        },
        py::arg("setting"), py::arg("scenario") = Scenario{}, py::arg("energy") = EnergyConfig{},
        py::arg("options") = SimOptions{}, py::arg("replications") = 10, py::arg("seed") = 1);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("barring_factor_step", &GridSpec::barring_factor_step)
        .def_readwrite("barring_factor_low", &GridSpec::barring_factor_low)
        .def_readwrite("barring_factor_high", &GridSpec::barring_factor_high)
        .def_readwrite("backoff_min_ms", &GridSpec::backoff_min_ms)
        .def_readwrite("backoff_max_ms", &GridSpec::backoff_max_ms)
        .def_readwrite("backoff_step_ms", &GridSpec::backoff_step_ms)
        .def("settings", &GridSpec::settings);

    py::class_<ConstraintSpec>(m, "ConstraintSpec")
        .def(py::init<>())
        .def(py::init([](double p, double t) { return ConstraintSpec{p, t}; }), py::arg("min_success_probability"),
             py::arg("max_delay_ms"))
        .def_readwrite("min_success_probability", &ConstraintSpec::min_success_probability)
        .def_readwrite("max_delay_ms", &ConstraintSpec::max_delay_ms);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("setting", &SweepRow::setting)
        .def_readonly("metrics", &SweepRow::metrics)
        .def_readonly("error", &SweepRow::error)
        .def("ok", &SweepRow::ok);

    py::class_<OptimumRecord>(m, "OptimumRecord")
        .def_readonly("setting", &OptimumRecord::setting)
        .def_readonly("min_energy_j", &OptimumRecord::min_energy_j)
        .def_readonly("max_success_probability", &OptimumRecord::max_success_probability)
        .def_readonly("min_delay_ms", &OptimumRecord::min_delay_ms)
        .def_readonly("constraint", &OptimumRecord::constraint)
        .def_readonly("feasible", &OptimumRecord::feasible);

    m.def(
        "sweep_grid",
        [](const GridSpec& g, const Scenario& sc, const EnergyConfig& e, int threads) {
            py::gil_scoped_release release;
            return sweep_grid(g, sc, e, SweepOptions{threads});
        },
        py::arg("grid"), py::arg("scenario") = Scenario{}, py::arg("energy") = EnergyConfig{},
        py::arg("threads") = 0);
    m.def("minimize_energy", &minimize_energy, py::arg("table"), py::arg("constraint"));
    m.def(
        "tradeoff_curve",
        [](const SweepTable& t, const std::vector<double>& p_min, double max_delay_ms) {
            return tradeoff_curve(t, p_min, max_delay_ms);
        },
        py::arg("table"), py::arg("p_min_values"), py::arg("max_delay_ms"));
    m.def("standard_settings", &standard_settings);

    m.def(
        "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"),
        "Hash of the resolved configuration parsed from INI text.");
}
