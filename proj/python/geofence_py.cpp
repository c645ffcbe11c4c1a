#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "geofence/config.hpp"

namespace py = pybind11;
using namespace geofence;
using nlohmann::json;

namespace {

ExperimentConfig from_text(const std::string& config_json) { return parse_config(json::parse(config_json)); }

std::string run_one(const std::string& config_json) {
    const ExperimentConfig cfg = from_text(config_json);
    RunResult r;
    {
        py::gil_scoped_release release;
        r = run_with_training(cfg.sim);
    }
    std::ostringstream out;
    write_metrics_json(out, r.metrics);
    return out.str();
}

std::string sweep_csv(const std::string& config_json) {
    const ExperimentConfig cfg = from_text(config_json);
    std::vector<CellResult> rows;
    {
        py::gil_scoped_release release;
        rows = sweep(cfg.sweep, cfg.exec);
    }
    std::ostringstream out;
    write_sweep_csv(out, rows, cfg.sim.tti_duration_s);
    return out.str();
}

py::object nmin(const std::string& config_json, Tti tau, const std::string& policy) {
    const ExperimentConfig cfg = from_text(config_json);
    NminSpec s = cfg.nmin;
    s.tau = tau;
    s.policy = parse_policy(policy);
    NminResult r;
    {
        py::gil_scoped_release release;
        r = find_nmin(s, cfg.exec);
    }
    if (r.n_min) return py::int_(*r.n_min);
    return py::none();
}

std::string energy_table_csv(const std::string& config_json) {
    const ExperimentConfig cfg = from_text(config_json);
    std::vector<EnergyTableRow> rows;
    {
        py::gil_scoped_release release;
        rows = energy_table(cfg.sim);
    }
    std::ostringstream out;
    write_energy_table_csv(out, rows);
    return out.str();
}

SensorPose make_pose(std::pair<double, double> position, double theta_min, double fov, double r_max, double eta) {
    SensorPose p;
    p.position = {position.first, position.second};
    p.theta_min = theta_min;
    p.fov = fov;
    p.r_max = r_max;
    p.eta = eta;
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Energy-aware geofencing simulator";

    py::register_exception<std::invalid_argument>(m, "ConfigError", PyExc_ValueError);

    m.def("run_one", &run_one, py::arg("config_json"),
          "Run one simulation (training first for RL) and return its metrics as JSON text.");
    m.def("sweep_csv", &sweep_csv, py::arg("config_json"), "Sweep CSV for the config's sweep section.");
    m.def("nmin", &nmin, py::arg("config_json"), py::arg("tau"), py::arg("policy") = "grid",
          "Minimum device count meeting the config's nmin target, or None.");
    m.def("energy_table_csv", &energy_table_csv, py::arg("config_json"));
    m.def("expand_config", [](const std::string& j) { return to_json(from_text(j)).dump(); }, py::arg("config_json"),
          "Config with every default filled in, as JSON text.");

    m.def(
        "sensing_power",
        [](std::pair<double, double> sensor, double theta_min, std::pair<double, double> target, double fov,
           double r_max, double eta) {
            return sensing_power(make_pose(sensor, theta_min, fov, r_max, eta), {target.first, target.second});
        },
        py::arg("sensor"), py::arg("theta_min"), py::arg("target"), py::arg("fov") = 60.0, py::arg("r_max") = 3.0,
        py::arg("eta") = 1.0);
    m.def(
        "object_error",
        [](std::optional<Tti> t_det, Tti t_g, double mu1) {
            OutcomeWeights w;
            w.mu1 = mu1;
            return object_error(t_det, t_g, w);
        },
        py::arg("t_det"), py::arg("t_g"), py::arg("mu1") = 0.5);
    m.def(
        "reward",
        [](int active, int n, double coverage, double resolved_error, double alpha, double mu2, double mu3) {
            OutcomeWeights w;
            w.mu2 = mu2;
            w.mu3 = mu3;
            return reward(active, n, coverage, resolved_error, alpha, w);
        },
        py::arg("active"), py::arg("n"), py::arg("coverage"), py::arg("resolved_error") = 0.0, py::arg("alpha") = 0.0,
        py::arg("mu2") = 0.5, py::arg("mu3") = 1.0);
    m.def(
        "grid_placement",
        [](int n) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : grid_placement(n, GeofenceLayout{})) out.emplace_back(p.position.x, p.position.y, p.theta_min);
            return out;
        },
        py::arg("n"), "(x, y, theta_min) of the default-layout grid placement.");
}
