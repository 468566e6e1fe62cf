#include "lppl/dates.hpp"
#include "lppl/ensemble.hpp"
#include "lppl/errors.hpp"
#include "lppl/model.hpp"
#include "lppl/optimizer.hpp"
#include "lppl/serialize.hpp"
#include "lppl/synth.hpp"
#include "lppl/timeseries.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>

namespace py = pybind11;
using namespace lppl;

namespace {

// Aggregates cross the boundary as plain python objects via their canonical
// JSON form, so the module and the CLI expose one schema.
py::object json_to_py(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

OscForm osc_of(bool literal_cos) {
    return literal_cos ? OscForm::LogOmegaTau : OscForm::OmegaLogTau;
}

FitConfig make_fit_config(std::uint64_t seed, int n_candidates, bool literal_cos,
                          int taboo_evals_per_region, int taboo_regions, int lm_max_iters) {
    FitConfig fc;
    fc.seed = seed;
    fc.n_candidates = n_candidates;
    fc.osc = osc_of(literal_cos);
    fc.taboo.evals_per_region = taboo_evals_per_region;
    fc.taboo.regions = taboo_regions;
    fc.lm.max_iters = lm_max_iters;
    return fc;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "log-periodic power law calibration toolkit";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init([](std::vector<double> times, std::vector<double> values,
                         std::string label) {
                 TimeSeries s{std::move(times), std::move(values), std::move(label)};
                 s.validate();
                 return s;
             }),
             py::arg("times"), py::arg("values"), py::arg("label") = "")
        .def_readonly("times", &TimeSeries::times)
        .def_readonly("values", &TimeSeries::values)
        .def_readonly("label", &TimeSeries::label)
        .def("__len__", &TimeSeries::size)
        .def("median_spacing", &TimeSeries::median_spacing);

    py::class_<Window>(m, "Window")
        .def(py::init<double, double>(), py::arg("t1"), py::arg("t2"))
        .def_readwrite("t1", &Window::t1)
        .def_readwrite("t2", &Window::t2);

    py::class_<NonlinearParams>(m, "NonlinearParams")
        .def(py::init<double, double, double, double>(), py::arg("tc"), py::arg("m"),
             py::arg("omega"), py::arg("phi"))
        .def_readwrite("tc", &NonlinearParams::tc)
        .def_readwrite("m", &NonlinearParams::m)
        .def_readwrite("omega", &NonlinearParams::omega)
        .def_readwrite("phi", &NonlinearParams::phi);

    py::class_<LinearParams>(m, "LinearParams")
        .def(py::init<double, double, double>(), py::arg("A"), py::arg("B"), py::arg("C"))
        .def_readwrite("A", &LinearParams::A)
        .def_readwrite("B", &LinearParams::B)
        .def_readwrite("C", &LinearParams::C);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("window", &FitResult::window)
        .def_readonly("nl", &FitResult::nl)
        .def_readonly("lin", &FitResult::lin)
        .def_readonly("ssr", &FitResult::ssr)
        .def_readonly("n_obs", &FitResult::n_obs)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("seed", &FitResult::seed)
        .def("to_dict", [](const FitResult& f) { return json_to_py(to_json(f)); });

    m.def("to_decimal_years",
          [](const std::string& iso) { return to_decimal_years(parse_iso_date(iso)); },
          py::arg("iso_date"), "decimal-year time of an ISO-8601 date");
    m.def("from_decimal_years",
          [](double t) { return format_iso_date(from_decimal_years(t)); },
          py::arg("decimal_year"), "nearest ISO-8601 date of a decimal-year time");

    m.def("parse_csv",
          [](const std::string& text, const std::string& date_column,
             const std::string& value_column, const std::string& delimiter) {
              if (delimiter.size() != 1) throw ValidationError("delimiter must be one character");
              return parse_csv(text, CsvSpec{date_column, value_column, delimiter[0]});
          },
          py::arg("text"), py::arg("date_column") = "date", py::arg("value_column") = "value",
          py::arg("delimiter") = ",");
    m.def("parse_csv_file",
          [](const std::string& path, const std::string& date_column,
             const std::string& value_column, const std::string& delimiter) {
              if (delimiter.size() != 1) throw ValidationError("delimiter must be one character");
              return parse_csv_file(path, CsvSpec{date_column, value_column, delimiter[0]});
          },
          py::arg("path"), py::arg("date_column") = "date", py::arg("value_column") = "value",
          py::arg("delimiter") = ",");
    m.def("moving_average", &moving_average, py::arg("series"), py::arg("window_len") = 13);
    m.def("slice", &slice, py::arg("series"), py::arg("window"));

    m.def("lppl_value",
          [](const NonlinearParams& nl, const LinearParams& lin, double t, bool literal_cos) {
              return lppl_value(nl, lin, t, osc_of(literal_cos));
          },
          py::arg("nl"), py::arg("lin"), py::arg("t"), py::arg("literal_cos") = false);
    m.def("slave_linear",
          [](const NonlinearParams& nl, const TimeSeries& data, bool literal_cos) {
              return slave_linear(nl, data, osc_of(literal_cos)).lin;
          },
          py::arg("nl"), py::arg("data"), py::arg("literal_cos") = false);
    m.def("objective",
          [](const NonlinearParams& nl, const TimeSeries& data, bool literal_cos) {
              return objective(nl, data, osc_of(literal_cos));
          },
          py::arg("nl"), py::arg("data"), py::arg("literal_cos") = false);

    m.def("fit_window",
          [](const TimeSeries& data, double t1, double t2, std::uint64_t seed, int n_candidates,
             bool literal_cos, int taboo_evals_per_region, int taboo_regions, int lm_max_iters) {
              return fit_window(data, Window{t1, t2},
                                make_fit_config(seed, n_candidates, literal_cos,
                                                taboo_evals_per_region, taboo_regions,
                                                lm_max_iters));
          },
          py::arg("data"), py::arg("t1"), py::arg("t2"), py::arg("seed") = 0,
          py::arg("n_candidates") = 10, py::arg("literal_cos") = false,
          py::arg("taboo_evals_per_region") = 2000, py::arg("taboo_regions") = 3,
          py::arg("lm_max_iters") = 500);

    m.def("run_ensemble",
          [](const TimeSeries& data, double t2, double span_min_months, double span_max_months,
             double t1_step_days, std::vector<double> probs, bool negative_b,
             double horizon_months, int density_grid, int jobs, std::uint64_t seed,
             int n_candidates, bool literal_cos, int taboo_evals_per_region, int taboo_regions,
             int lm_max_iters) {
              EnsembleConfig cfg;
              cfg.fit = make_fit_config(seed, n_candidates, literal_cos, taboo_evals_per_region,
                                        taboo_regions, lm_max_iters);
              cfg.span_min = span_min_months * kYearsPerMonth;
              cfg.span_max = span_max_months * kYearsPerMonth;
              cfg.t1_step = t1_step_days * kYearsPerDay;
              cfg.probs = std::move(probs);
              cfg.require_negative_b = negative_b;
              cfg.extrap_horizon = horizon_months * kYearsPerMonth;
              cfg.density_grid_size = density_grid;
              cfg.jobs = jobs;
              return json_to_py(to_json(run_ensemble(data, t2, cfg)));
          },
          py::arg("data"), py::arg("t2"), py::arg("span_min_months") = 6.0,
          py::arg("span_max_months") = 18.0, py::arg("t1_step_days") = 7.0,
          py::arg("probs") = std::vector<double>{0.05, 0.20, 0.50, 0.80, 0.95},
          py::arg("negative_b") = false, py::arg("horizon_months") = 6.0,
          py::arg("density_grid") = 201, py::arg("jobs") = 1, py::arg("seed") = 0,
          py::arg("n_candidates") = 10, py::arg("literal_cos") = false,
          py::arg("taboo_evals_per_region") = 2000, py::arg("taboo_regions") = 3,
          py::arg("lm_max_iters") = 500);

    m.def("tc_quantiles", &tc_quantiles, py::arg("tcs"), py::arg("probs"));

    m.def("generate",
          [](double tc, double mm, double omega, double phi, double A, double B, double C,
             double start, double end, double spacing_days, double noise_sigma,
             std::uint64_t seed, bool literal_cos) {
              SynthSpec spec;
              spec.nl = {tc, mm, omega, phi};
              spec.lin = {A, B, C};
              spec.start = start;
              spec.end = end;
              spec.spacing = spacing_days * kYearsPerDay;
              spec.noise_sigma = noise_sigma;
              spec.seed = seed;
              spec.osc = osc_of(literal_cos);
              return generate(spec);
          },
          py::arg("tc"), py::arg("m"), py::arg("omega"), py::arg("phi"), py::arg("A"),
          py::arg("B"), py::arg("C"), py::arg("start"), py::arg("end"),
          py::arg("spacing_days") = 7.0, py::arg("noise_sigma") = 0.0, py::arg("seed") = 0,
          py::arg("literal_cos") = false);
}
