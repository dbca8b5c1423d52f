#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "distortion/cli.hpp"
#include "distortion/foliation.hpp"
#include "distortion/map_json.hpp"
#include "distortion/spheres.hpp"
#include "distortion/witness.hpp"

namespace py = pybind11;
using namespace distortion;

namespace {

Point to_point(const std::vector<double>& v) {
  Point p(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

std::vector<double> from_point(const Point& p) {
  std::vector<double> v(p.dim());
  for (int i = 0; i < p.dim(); ++i) v[i] = to_double(p[i]);
  return v;
}

std::optional<Point> opt_point(const std::optional<std::vector<double>>& v) {
  if (!v) return std::nullopt;
  return to_point(*v);
}

MonotonePL profile(const std::vector<double>& xs, const std::vector<double>& ys) {
  return MonotonePL(std::vector<Real>(xs.begin(), xs.end()),
                    std::vector<Real>(ys.begin(), ys.end()));
}

py::dict demo_dict(const DemoResult& r) {
  py::list rows;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    py::dict d;
    d["n"] = row.n;
    d["p"] = row.p;
    d["k"] = row.k;
    d["reduced_len"] = row.reduced_len;
    d["ratio"] = row.ratio;
    d["sup_err"] = to_double(row.sup_err);
    d["passed"] = row.passed;
    d["word"] = to_string(r.words[i]);
    rows.append(d);
  }
  py::dict out;
  out["rows"] = rows;
  out["charts"] = r.charts;
  out["all_passed"] = r.all_passed;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distortion witnesses for groups of homeomorphisms";

  py::register_exception<Error>(m, "Error");

  py::class_<MapExpr>(m, "MapExpr")
      .def_property_readonly("dim", &MapExpr::dim)
      .def_property_readonly("kind", [](const MapExpr& f) { return std::string(to_string(f.kind())); })
      .def_property_readonly("support_radius", [](const MapExpr& f) { return to_double(f.support_radius()); })
      .def("is_identity", &MapExpr::is_identity)
      .def("__call__", [](const MapExpr& f, const std::vector<double>& x) {
        return from_point(eval(f, to_point(x)));
      })
      .def("inverse_at", [](const MapExpr& f, const std::vector<double>& y) {
        return from_point(eval_inverse(f, to_point(y)));
      })
      .def("to_json", [](const MapExpr& f) { return serialize_map(f); })
      .def("__repr__", [](const MapExpr& f) {
        return "<MapExpr " + std::string(to_string(f.kind())) + " dim=" + std::to_string(f.dim()) + ">";
      });

  m.def("identity", &identity, py::arg("dim") = 0);
  m.def("radial", [](int dim, const std::vector<double>& xs, const std::vector<double>& ys,
                     std::optional<std::vector<double>> center) {
    return radial(dim, profile(xs, ys), opt_point(center));
  }, py::arg("dim"), py::arg("xs"), py::arg("ys"), py::arg("center") = py::none());
  m.def("localized_translation", [](const std::vector<double>& a, double r_in, double r_out,
                                    std::optional<std::vector<double>> center) {
    return localized_translation(to_point(a), Ramp{r_in, r_out}, opt_point(center));
  }, py::arg("a"), py::arg("r_in"), py::arg("r_out"), py::arg("center") = py::none());
  m.def("axis_push", [](int dim, int axis, const std::vector<double>& xs,
                        const std::vector<double>& ys, double r_in, double r_out) {
    return axis_push(dim, axis, profile(xs, ys), Ramp{r_in, r_out});
  }, py::arg("dim"), py::arg("axis"), py::arg("xs"), py::arg("ys"), py::arg("r_in"), py::arg("r_out"));
  m.def("twist", [](int dim, int i, int j, double angle, double r_in, double r_out,
                    std::optional<std::vector<double>> center) {
    return twist(dim, i, j, angle, Ramp{r_in, r_out}, opt_point(center));
  }, py::arg("dim"), py::arg("i"), py::arg("j"), py::arg("angle"), py::arg("r_in"),
        py::arg("r_out"), py::arg("center") = py::none());
  m.def("compose", &compose);
  m.def("inverse", &inverse);
  m.def("power_exact", &power_exact);
  m.def("parse_map", [](const std::string& text) { return parse_map(text); });
  m.def("random_perturbation", &random_perturbation, py::arg("dim"), py::arg("amplitude"),
        py::arg("seed"), py::arg("twists") = 3);

  m.def("plan_table", [](int dim, int nmax, double lambda) {
    GeneratorParams p{dim, lambda, {}};
    WitnessPlan plan = build_plan(p, nmax);
    py::list rows;
    for (int n = 0; n < plan.n_max(); ++n) {
      py::dict d;
      d["n"] = n;
      d["l"] = plan.slots[n].l;
      d["l_tilde"] = plan.slots[n].l_tilde;
      d["k"] = k_bound(plan, n);
      rows.append(d);
    }
    return rows;
  }, py::arg("dim") = 2, py::arg("nmax") = 6, py::arg("lambda_") = 0.5);

  m.def("witnesses", [](const std::string& session_json, int samples, std::uint64_t seed,
                        double tol) {
    Session s = session_from_json(parse_json_text(session_json));
    const int nmax = std::max<int>(s.nmax, static_cast<int>(s.targets.size()));
    auto plan = std::make_shared<const WitnessPlan>(build_plan(s.params, nmax));
    WitnessMachinery mach(plan);
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
      if (auto p = std::get_if<CommutatorPair>(&s.targets[i]))
        mach.set_pair(static_cast<int>(i), *p);
      else
        mach.set_homeo(static_cast<int>(i), std::get<PlainHomeo>(s.targets[i]).h);
    }
    mach.build();
    py::list out;
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
      Witness w = mach.witness(static_cast<int>(i), VerifyOptions{samples, 2.5L, seed, tol});
      py::dict d;
      d["n"] = w.n;
      d["kind"] = w.kind;
      d["k_bound"] = w.k_bound;
      d["reduced_len"] = w.report.reduced_len;
      d["sup_err"] = to_double(w.report.sup_err);
      d["passed"] = w.report.passed;
      d["word"] = to_string(w.word);
      out.append(d);
    }
    return out;
  }, py::arg("session_json"), py::arg("samples") = 1000, py::arg("seed") = 1,
        py::arg("tol") = 1e-6);

  m.def("circle_demo", [](double alpha, int nmax, int samples, std::uint64_t seed) {
    DemoOptions o;
    o.n_max = nmax;
    o.samples = samples;
    o.seed = seed;
    return demo_dict(sphere_distortion_demo(circle_rotation(alpha), o));
  }, py::arg("alpha"), py::arg("nmax") = 6, py::arg("samples") = 500, py::arg("seed") = 1);
  m.def("sphere_demo", [](double theta, int nmax, int samples, std::uint64_t seed) {
    DemoOptions o;
    o.n_max = nmax;
    o.samples = samples;
    o.seed = seed;
    return demo_dict(sphere_distortion_demo(sphere_rotation(theta), o));
  }, py::arg("theta"), py::arg("nmax") = 4, py::arg("samples") = 500, py::arg("seed") = 1);

  m.def("foliation_decompose", [](const MapExpr& f, int grid, double tol) {
    FoliationOptions o;
    o.grid = grid;
    o.tol = tol;
    DecompositionReport r = foliation_decompose(f, o);
    py::dict d;
    d["sup_error"] = to_double(r.sup_error);
    std::vector<double> margins, proj;
    for (Real x : r.margins) margins.push_back(to_double(x));
    for (Real x : r.projection_errors) proj.push_back(to_double(x));
    d["margins"] = margins;
    d["projection_errors"] = proj;
    d["grid_points"] = r.grid_points;
    d["passed"] = r.passed;
    return d;
  }, py::arg("f"), py::arg("grid") = 17, py::arg("tol") = 1e-6);

  m.def("run", [](const std::vector<std::string>& args) {
    std::vector<std::string> all{"distortion"};
    all.insert(all.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : all) argv.push_back(s.c_str());
    std::ostringstream out, err;
    int code;
    try {
      code = run_command(parse_args(static_cast<int>(argv.size()), argv.data()), out, err);
    } catch (const ParseError& e) {
      err << "parse error: " << e.what() << "\n";
      code = kExitUsage;
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs a CLI command in process; returns (exit_code, stdout, stderr).");
}
