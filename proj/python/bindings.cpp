#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pseudomarket/errors.hpp"
#include "pseudomarket/experiment.hpp"
#include "pseudomarket/ideal.hpp"
#include "pseudomarket/simulator.hpp"

namespace py = pybind11;
using namespace pseudomarket;

namespace {

using TypeTriples = std::vector<std::tuple<double, int, double>>;

TypeSpace make_type_space(const TypeTriples& triples) {
    TypeSpace ts;
    ts.types.reserve(triples.size());
    for (const auto& [value, duration, probability] : triples)
        ts.types.push_back({value, duration, probability});
    return ts;
}

py::dict ideal_report(const TypeTriples& types, double cap, bool oracle) {
    const TypeSpace ts = make_type_space(types);
    const LPInstance lp = build_ideal_lp(ts, cap);
    const LPSolution sol = solve_lp(lp);
    const RequestPolicy pol = f_to_x(sol, ts);

    py::dict d;
    d["cap"] = cap;
    d["f"] = sol.f;
    d["x"] = pol.x;
    d["request_prob"] = pol.request_prob;
    d["v_star"] = pol.stats.v_star;
    d["beta"] = pol.stats.beta;
    d["q"] = pol.stats.q;
    if (pol.stats.kappa_defined)
        d["kappa"] = pol.stats.kappa;
    else
        d["kappa"] = py::none();
    if (oracle)
        d["oracle_gap"] = std::abs(vertex_enumeration_oracle(lp).objective - sol.objective);
    return d;
}

py::dict simulate_solo(const TypeTriples& types, double cap, std::int64_t horizon,
                       std::uint64_t seed) {
    const TypeSpace ts = make_type_space(types);
    const RequestPolicy pol = ideal_policy(ts, cap);
    const RenewalEstimate est = simulate_no_competition(pol, ts, horizon, seed);
    py::dict d;
    d["utility_rate"] = est.utility_rate;
    d["utilization"] = est.utilization;
    d["v_star"] = pol.stats.v_star;
    d["beta"] = pol.stats.beta;
    return d;
}

py::dict hardness_profile_py(int n, int k_max) {
    const HardnessProfile prof = hardness_instance(n, k_max);
    py::dict d;
    d["p"] = prof.p;
    d["p_prime"] = prof.p_prime;
    d["fraction"] = prof.fraction;
    return d;
}

py::object summary_to_py(const ExperimentSummary& summary) {
    const py::object loads = py::module_::import("json").attr("loads");
    return loads(summary_json(summary));
}

py::object finish_run(ExperimentSpec spec, int jobs,
                      const std::optional<std::string>& csv_path) {
    ExperimentSummary summary;
    {
        py::gil_scoped_release release;
        summary = monte_carlo(spec, jobs);
        if (csv_path) write_text_file(*csv_path, to_csv(summary));
    }
    return summary_to_py(summary);
}

py::object run_preset_py(const std::string& name, std::optional<int> n, std::optional<int> k_max,
                         std::optional<double> reserve, std::optional<std::int64_t> horizon,
                         std::optional<int> units, std::optional<int> trials,
                         std::optional<std::uint64_t> seed,
                         const std::optional<std::string>& strategy, int jobs,
                         const std::optional<std::string>& csv_path) {
    PresetOverrides ov;
    ov.n = n;
    ov.k_max = k_max;
    ov.reserve = reserve;
    ov.horizon = horizon;
    ov.units = units;
    ov.trials = trials;
    ov.seed = seed;
    ov.strategy = strategy;
    return finish_run(make_preset(name, ov), jobs, csv_path);
}

py::object run_experiment_py(const std::string& text, int jobs,
                             const std::optional<std::string>& csv_path) {
    return finish_run(parse_experiment_text(text), jobs, csv_path);
}

py::object run_experiment_file_py(const std::string& path, int jobs,
                                  const std::optional<std::string>& csv_path) {
    return finish_run(load_experiment_file(path), jobs, csv_path);
}

}  // namespace

PYBIND11_MODULE(_pseudomarket, m) {
    m.doc() = "Artificial-currency market simulator: ideal request rates, first-price "
              "auction runs, and analytic performance bounds.";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const SolverError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("ideal_report", &ideal_report, py::arg("types"), py::arg("cap"),
          py::arg("oracle") = false,
          "Solve the single-agent rate program for a type space. Types are\n"
          "(value, duration, probability) triples; cap is the capacity share in (0, 1].\n"
          "Returns f, x, request_prob, v_star, beta, q, kappa; with oracle=True also the\n"
          "objective gap against an exhaustive vertex enumeration.");

    m.def("simulate_no_competition", &simulate_solo, py::arg("types"), py::arg("cap"),
          py::arg("horizon") = 1000000, py::arg("seed") = 0,
          "Run the solved request policy alone against its own type stream and report the\n"
          "realized utility rate and utilization next to their analytic targets.");

    m.def("guarantee_lower_bound", &guarantee_lower_bound, py::arg("v_star"),
          py::arg("horizon"), py::arg("reserve"), py::arg("alpha"), py::arg("beta"),
          py::arg("k_max"), py::arg("multi") = false, py::arg("slack_const") = 3.0,
          "Worst-case utility floor for the reserve-price bidder.");

    m.def("impossibility_upper_bound", &impossibility_upper_bound, py::arg("v_star"),
          py::arg("horizon"), py::arg("reserve"), py::arg("alpha"), py::arg("k_max"),
          "Utility ceiling no strategy can beat against adversarial blocking.");

    m.def("hardness_profile", &hardness_profile_py, py::arg("n"), py::arg("k_max"),
          "Symmetric congestion instance: request probability p, arrival rate p', and the\n"
          "allocated-round fraction of a greedy omniscient allocator.");

    m.def("run_preset", &run_preset_py, py::arg("name"), py::kw_only(),
          py::arg("n") = py::none(), py::arg("k_max") = py::none(),
          py::arg("reserve") = py::none(), py::arg("horizon") = py::none(),
          py::arg("units") = py::none(), py::arg("trials") = py::none(),
          py::arg("seed") = py::none(), py::arg("strategy") = py::none(), py::arg("jobs") = 1,
          py::arg("csv_path") = py::none(),
          "Run a named experiment preset (ideal, guarantee, impossibility, hardness,\n"
          "multi, roundrobin) and return its summary as a dict; optionally write the\n"
          "per-trial CSV.");

    m.def("run_experiment", &run_experiment_py, py::arg("text"), py::kw_only(),
          py::arg("jobs") = 1, py::arg("csv_path") = py::none(),
          "Run an experiment described by a JSON document string.");

    m.def("run_experiment_file", &run_experiment_file_py, py::arg("path"), py::kw_only(),
          py::arg("jobs") = 1, py::arg("csv_path") = py::none(),
          "Run an experiment from a JSON config file.");

    m.attr("__version__") = "1.0.0";
}
