#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "gibbstf/experiment.hpp"

namespace py = pybind11;
using namespace gibbstf;

namespace {

Window make_window(const std::vector<double>& lower, const std::vector<double>& upper) {
    if (lower.size() != upper.size() || lower.empty() || lower.size() > 3) {
        throw ConfigError("lower and upper need the same number (1..3) of coordinates");
    }
    Position a{0, 0, 0}, b{0, 0, 0};
    for (std::size_t i = 0; i < lower.size(); ++i) {
        a[i] = lower[i];
        b[i] = upper[i];
    }
    return Window(static_cast<int>(lower.size()), a, b);
}

Configuration make_configuration(const py::array_t<double, py::array::c_style | py::array::forcecast>& xy,
                                 const Window& carrier) {
    if (xy.ndim() != 2 || (xy.shape(0) > 0 && xy.shape(1) != carrier.dim())) {
        throw ConfigError("points must be an (n, d) array matching the window dimension");
    }
    std::vector<MarkedPoint> pts;
    auto r = xy.unchecked<2>();
    for (py::ssize_t i = 0; i < r.shape(0); ++i) {
        MarkedPoint p;
        for (int a = 0; a < carrier.dim(); ++a) p.position[a] = r(i, a);
        pts.push_back(p);
    }
    return Configuration(carrier, std::move(pts));
}

py::array_t<double> to_array(const Configuration& cfg) {
    const int d = cfg.dim();
    py::array_t<double> out({static_cast<py::ssize_t>(cfg.size()), static_cast<py::ssize_t>(d)});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        for (int a = 0; a < d; ++a) w(static_cast<py::ssize_t>(i), a) = cfg[i].position[a];
    }
    return out;
}

std::vector<double> corner(const Position& p, int d) { return {p.begin(), p.begin() + d}; }

Window estimation_window(const Configuration& phi, const GibbsModel& model, std::optional<std::vector<double>> lower,
                         std::optional<std::vector<double>> upper, std::optional<double> erode) {
    if (lower && upper) return make_window(*lower, *upper);
    return phi.carrier().eroded(erode.value_or(model.range()));
}

std::vector<TestFunction> method_h(const std::string& method, const std::string& h_json, const GibbsModel& model) {
    if (method == "explicit") return {h_strauss_indicator(model, 1), h_strauss_indicator(model, 2)};
    if (method == "mple") return h_gradV(model);
    if (method != "tf") throw ConfigError("method must be tf, mple or explicit");
    if (h_json.empty()) throw ConfigError("method tf needs test functions");
    return build_test_functions(hspecs_from_json(Json::parse(h_json)), model);
}

QuadratureScheme quadrature_for(const Window& w, const GibbsModel& model, double spacing) {
    if (spacing > 0.0) return QuadratureScheme::grid_spacing(w, spacing);
    if (model.range() > 0.0) return QuadratureScheme::grid_spacing(w, model.range() / 4.0);
    return QuadratureScheme::grid(4096);
}

}  // namespace

PYBIND11_MODULE(_gibbstf, m) {
    m.doc() = "Gibbs point process simulation and Takacs-Fiksel estimation";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DegenerateCounts>(m, "DegenerateCounts", PyExc_ArithmeticError);
    py::register_exception<CollarMissing>(m, "CollarMissing", PyExc_ValueError);
    py::register_exception<SingularE>(m, "SingularE", PyExc_ArithmeticError);
    py::register_exception<TooFewBlocks>(m, "TooFewBlocks", PyExc_ValueError);
    py::register_exception<ModelMismatch>(m, "ModelMismatch", PyExc_ValueError);

    m.def("sample_poisson",
          [](double intensity, const std::vector<double>& lower, const std::vector<double>& upper, std::uint64_t seed) {
              return to_array(sample_poisson(make_window(lower, upper), intensity, seed));
          },
          py::arg("intensity"), py::arg("lower"), py::arg("upper"), py::arg("seed") = 0);

    m.def("simulate",
          [](const std::string& model_json, const Vector& theta, const std::vector<double>& lower,
             const std::vector<double>& upper, std::uint64_t seed, std::uint64_t burn_in, double steps_per_point,
             std::optional<std::size_t> max_points) {
              const auto model = model_from_json(Json::parse(model_json));
              SamplerConfig cfg;
              cfg.seed = seed;
              cfg.burn_in = burn_in;
              cfg.steps_per_point = steps_per_point;
              cfg.max_points = max_points;
              Configuration phi(make_window(lower, upper));
              {
                  py::gil_scoped_release release;
                  phi = sample_gibbs(model, theta, make_window(lower, upper), cfg);
              }
              return to_array(phi);
          },
          py::arg("model_json"), py::arg("theta"), py::arg("lower"), py::arg("upper"), py::arg("seed") = 0,
          py::arg("burn_in") = 10000, py::arg("steps_per_point") = 200.0, py::arg("max_points") = py::none());

    m.def("estimate",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points, const std::vector<double>& lower,
             const std::vector<double>& upper, const std::string& model_json, const std::string& method,
             const std::string& h_json, std::optional<std::vector<double>> window_lower,
             std::optional<std::vector<double>> window_upper, std::optional<double> erode, double spacing) {
              const auto model = model_from_json(Json::parse(model_json));
              const auto phi = make_configuration(points, make_window(lower, upper));
              const Window w = estimation_window(phi, *model, window_lower, window_upper, erode);
              const auto q = quadrature_for(w, *model, spacing);
              py::gil_scoped_release release;
              ContrastReport r;
              if (method == "explicit") {
                  const auto* s = dynamic_cast<const StraussModel*>(model.get());
                  if (!s) throw ConfigError("method explicit needs the strauss model");
                  r = fit_strauss_explicit(phi, w, s->interaction_radius());
              } else if (method == "mple") {
                  r = fit_mple(phi, w, *model, model->box(), q);
              } else {
                  const auto h = method_h(method, h_json, *model);
                  FitOptions o;
                  o.quadrature = q;
                  r = fit_tf(phi, w, h, *model, model->box(), o);
              }
              return to_json(r).dump();
          },
          py::arg("points"), py::arg("lower"), py::arg("upper"), py::arg("model_json"), py::arg("method") = "tf",
          py::arg("h_json") = "", py::arg("window_lower") = py::none(), py::arg("window_upper") = py::none(),
          py::arg("erode") = py::none(), py::arg("spacing") = 0.0);

    m.def("covariance",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points, const std::vector<double>& lower,
             const std::vector<double>& upper, const std::string& model_json, const Vector& theta,
             const std::string& method, const std::string& h_json, std::optional<double> erode,
             std::optional<double> D_block, double spacing) {
              const auto model = model_from_json(Json::parse(model_json));
              const auto phi = make_configuration(points, make_window(lower, upper));
              const Window w = estimation_window(phi, *model, std::nullopt, std::nullopt, erode);
              const auto h = method_h(method, h_json, *model);
              const auto q = quadrature_for(w, *model, spacing);
              py::gil_scoped_release release;
              return to_json(estimate_covariance(phi, w, h, *model, theta, D_block, q)).dump();
          },
          py::arg("points"), py::arg("lower"), py::arg("upper"), py::arg("model_json"), py::arg("theta"),
          py::arg("method") = "explicit", py::arg("h_json") = "", py::arg("erode") = py::none(),
          py::arg("D_block") = py::none(), py::arg("spacing") = 0.0);

    m.def("read_pattern",
          [](const std::string& path, const std::string& window_path) {
              const auto phi = read_pattern(path, window_path);
              const int d = phi.dim();
              return py::make_tuple(to_array(phi), corner(phi.carrier().lower(), d), corner(phi.carrier().upper(), d));
          },
          py::arg("path"), py::arg("window_path") = "");

    m.def("write_pattern",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points, const std::vector<double>& lower,
             const std::vector<double>& upper, const std::string& path) {
              write_pattern(make_configuration(points, make_window(lower, upper)), path);
          },
          py::arg("points"), py::arg("lower"), py::arg("upper"), py::arg("path"));

    m.def("theta_from_beta_gamma", &theta_from_beta_gamma, py::arg("beta"), py::arg("gamma"));
}
