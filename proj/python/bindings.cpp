#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "periscope/frobenius.hpp"
#include "periscope/geometry.hpp"
#include "periscope/scenario.hpp"
#include "periscope/trace.hpp"

namespace py = pybind11;
using namespace periscope;

namespace {

using DVec = std::vector<double>;

Vec to_vec(const DVec& v) { return Vec(v); }
DVec from_vec(const Vec& v) { return v.components(); }

py::dict residuals_dict(const std::map<std::string, double>& residuals) {
    py::dict d;
    for (const auto& [name, value] : residuals) d[name.c_str()] = value;
    return d;
}

py::dict trace_dict(const TraceResult& tr) {
    py::dict d;
    d["P"] = from_vec(tr.P);
    d["Q"] = from_vec(tr.Q);
    d["out_origin"] = from_vec(tr.out_ray.origin);
    d["out_direction"] = from_vec(tr.out_ray.direction);
    d["path_length"] = tr.path_length;
    d["residuals"] = residuals_dict(tr.residuals);
    return d;
}

py::dict report_dict(const VerifyReport& rep) {
    py::dict d;
    d["points"] = rep.points;
    d["traced"] = rep.traced;
    d["failed"] = rep.failed;
    py::dict res;
    for (const auto& [name, stats] : rep.residuals) {
        py::dict s;
        s["max"] = stats.max;
        s["mean"] = stats.mean;
        s["worst_point"] = from_vec(stats.worst_point);
        res[name.c_str()] = s;
    }
    d["residuals"] = res;
    return d;
}

py::dict run_result_dict(const RunResult& result) {
    py::dict d;
    d["pass"] = result.pass;
    d["points"] = result.points;
    d["failures"] = result.failures;
    d["csv_path"] = result.csv_path;
    d["summary_path"] = result.summary_path;
    py::dict checks;
    for (const auto& [name, outcome] : result.checks) {
        py::dict c;
        c["pass"] = outcome.pass;
        c["tolerance"] = outcome.tolerance;
        c["max_residuals"] = residuals_dict(outcome.max_residuals);
        checks[name.c_str()] = c;
    }
    d["checks"] = checks;
    return d;
}

} // namespace

PYBIND11_MODULE(_periscope, m) {
    m.doc() = "Two-mirror periscope synthesis, ray-trace verification and "
              "Frobenius analysis";

    py::register_exception<Error>(m, "PeriscopeError");

    // Scalar fields.
    py::class_<ScalarField>(m, "ScalarField")
        .def_static("constant", [](std::size_t dim, double value) {
            return ScalarField::constant(dim, value);
        })
        .def_static("affine", [](double offset, const DVec& coeffs) {
            return ScalarField::affine(offset, to_vec(coeffs));
        })
        .def_static("quadratic", [](double offset, const DVec& linear, const DVec& quad) {
            return ScalarField::quadratic(offset, to_vec(linear), quad);
        })
        .def_static("gaussian_bump",
                    [](double offset, double amplitude, const DVec& center, double sigma) {
                        return ScalarField::gaussian_bump(offset, amplitude, to_vec(center), sigma);
                    })
        .def_static("sum_of_bumps",
                    [](std::size_t dim, double offset,
                       const std::vector<std::tuple<double, DVec, double>>& bumps) {
                        std::vector<Bump> bs;
                        for (const auto& [amplitude, center, sigma] : bumps)
                            bs.push_back(Bump{amplitude, to_vec(center), sigma});
                        return ScalarField::sum_of_bumps(dim, offset, std::move(bs));
                    })
        .def("with_fd_gradient", &ScalarField::with_fd_gradient)
        .def("dim", &ScalarField::dim)
        .def("__call__", [](const ScalarField& f, const DVec& p) { return f(to_vec(p)); })
        .def("gradient", [](const ScalarField& f, const DVec& p) {
            return from_vec(f.gradient(to_vec(p)));
        })
        .def("analytic_gradient", [](const ScalarField& f, const DVec& p) {
            return from_vec(f.analytic_gradient(to_vec(p)));
        });

    // Core geometry.
    m.def("reflect_direction", [](const DVec& d, const DVec& n) {
        return from_vec(reflect_direction(to_vec(d), to_vec(n)));
    });
    m.def("tangential_gradient", [](const ScalarField& f, const DVec& x) {
        return from_vec(tangential_gradient(f, to_vec(x)));
    });
    m.def("sphere_exp", [](const DVec& x, const DVec& v, double t) {
        return from_vec(sphere_exp(to_vec(x), to_vec(v), t));
    });
    m.def("geodesic_direction", [](const DVec& x, const DVec& y) {
        return from_vec(geodesic_direction(to_vec(x), to_vec(y)));
    });
    m.def("fd_gradient", [](const ScalarField& f, const DVec& p, double h) {
        return from_vec(fd_gradient(f, to_vec(p), h));
    });

    // Spherical periscope.
    py::class_<spherical::Synthesis>(m, "SphericalSynthesis")
        .def_property_readonly("x", [](const spherical::Synthesis& s) { return from_vec(s.x); })
        .def_property_readonly("y", [](const spherical::Synthesis& s) { return from_vec(s.y); })
        .def_readonly("e_f", &spherical::Synthesis::e_f)
        .def_readonly("e_g", &spherical::Synthesis::e_g)
        .def_property_readonly("grad_f",
                               [](const spherical::Synthesis& s) { return from_vec(s.grad_f); })
        .def_property_readonly("grad_g",
                               [](const spherical::Synthesis& s) { return from_vec(s.grad_g); })
        .def_readonly("grad_f_mag", &spherical::Synthesis::grad_f_mag)
        .def_readonly("grad_g_mag", &spherical::Synthesis::grad_g_mag)
        .def_readonly("alpha", &spherical::Synthesis::alpha)
        .def_readonly("beta", &spherical::Synthesis::beta)
        .def_readonly("S", &spherical::Synthesis::S)
        .def_readonly("d", &spherical::Synthesis::d)
        .def_readonly("antipodal", &spherical::Synthesis::antipodal);

    py::class_<spherical::Spec>(m, "SphericalSpec")
        .def(py::init([](const ScalarField& f, double C, const DVec& base, double radius) {
                 return spherical::Spec(f, C, spherical::Patch{to_vec(base), radius});
             }),
             py::arg("f"), py::arg("C"), py::arg("patch_base"), py::arg("patch_radius"))
        .def_property_readonly("C", &spherical::Spec::C)
        .def("synthesize", [](const spherical::Spec& spec, const DVec& x) {
            return spherical::synthesize(spec, to_vec(x));
        })
        .def("mirror_point", [](const spherical::Spec& spec, const DVec& x) {
            return from_vec(spherical::mirror_point(spec, to_vec(x)));
        })
        .def("mirror_normal", [](const spherical::Spec& spec, const DVec& x) {
            return from_vec(spherical::mirror_normal(spec, to_vec(x)));
        })
        .def("grad_g_magnitude", [](const spherical::Spec& spec, const DVec& x) {
            return spherical::grad_g_magnitude(spec, to_vec(x));
        })
        .def("second_radius", [](const spherical::Spec& spec, const DVec& x) {
            return spherical::second_radius(spec, to_vec(x));
        })
        .def("geodesic_distance", [](const spherical::Spec& spec, const DVec& x) {
            return spherical::geodesic_distance(spec, to_vec(x));
        })
        .def("periscope_map", [](const spherical::Spec& spec, const DVec& x) {
            return spherical::periscope_map(spec, to_vec(x));
        })
        .def("second_mirror_gradient", [](const spherical::Spec& spec, const DVec& x) {
            return from_vec(spherical::second_mirror_gradient(spec, to_vec(x)));
        })
        .def("map_field", [](const spherical::Spec& spec, const DVec& x) {
            return from_vec(spherical::map_field(spec, to_vec(x)));
        })
        .def("trace", [](const spherical::Spec& spec, const DVec& x) {
            return trace_dict(trace_spherical(spec, to_vec(x)));
        })
        .def("grid_verify",
             [](const spherical::Spec& spec, const std::vector<std::size_t>& counts,
                std::size_t jobs) { return report_dict(grid_verify(spec, counts, jobs)); },
             py::arg("counts"), py::arg("jobs") = 1);

    // Reversed periscope.
    py::class_<reversed::Synthesis>(m, "ReversedSynthesis")
        .def_property_readonly("x", [](const reversed::Synthesis& s) { return from_vec(s.x); })
        .def_property_readonly("y", [](const reversed::Synthesis& s) { return from_vec(s.y); })
        .def_readonly("f_val", &reversed::Synthesis::f_val)
        .def_readonly("g_val", &reversed::Synthesis::g_val)
        .def_property_readonly(
            "displacement", [](const reversed::Synthesis& s) { return from_vec(s.displacement); })
        .def_readonly("grad_f_mag", &reversed::Synthesis::grad_f_mag)
        .def_readonly("alpha", &reversed::Synthesis::alpha)
        .def_readonly("path_length", &reversed::Synthesis::path_length);

    py::class_<reversed::Spec>(m, "ReversedSpec")
        .def(py::init([](const ScalarField& f, double C, const DVec& lo, const DVec& hi) {
                 return reversed::Spec(f, C, reversed::Box{to_vec(lo), to_vec(hi)});
             }),
             py::arg("f"), py::arg("C"), py::arg("domain_min"), py::arg("domain_max"))
        .def_property_readonly("C", &reversed::Spec::C)
        .def("synthesize", [](const reversed::Spec& spec, const DVec& x) {
            return reversed::synthesize(spec, to_vec(x));
        })
        .def("second_height", [](const reversed::Spec& spec, const DVec& x) {
            return reversed::second_height(spec, to_vec(x));
        })
        .def("displacement", [](const reversed::Spec& spec, const DVec& x) {
            return from_vec(reversed::displacement(spec, to_vec(x)));
        })
        .def("periscope_map", [](const reversed::Spec& spec, const DVec& x) {
            return from_vec(reversed::periscope_map(spec, to_vec(x)));
        })
        .def("second_gradient", [](const reversed::Spec& spec, const DVec& x) {
            return from_vec(reversed::second_gradient(spec, to_vec(x)));
        })
        .def("second_height_at",
             [](const reversed::Spec& spec, const DVec& y, std::optional<DVec> seed) {
                 std::optional<Vec> s;
                 if (seed) s = to_vec(*seed);
                 return reversed::second_height_at(spec, to_vec(y), s);
             },
             py::arg("y"), py::arg("seed") = py::none())
        .def("trace",
             [](const reversed::Spec& spec, const DVec& x, bool intersect_second_mirror) {
                 ReversedTraceOptions options;
                 options.intersect_second_mirror = intersect_second_mirror;
                 return trace_dict(trace_reversed(spec, to_vec(x), options));
             },
             py::arg("x"), py::arg("intersect_second_mirror") = false)
        .def("grid_verify",
             [](const reversed::Spec& spec, const std::vector<std::size_t>& counts,
                std::size_t jobs) { return report_dict(grid_verify(spec, counts, jobs)); },
             py::arg("counts"), py::arg("jobs") = 1);

    // Frobenius analysis.
    py::class_<VectorField3>(m, "VectorField3")
        .def("__call__", [](const VectorField3& f, const DVec& p) { return from_vec(f(to_vec(p))); });
    m.def("vector_field", [](std::function<DVec(DVec)> fn) {
        VectorField3 field;
        field.eval = [fn = std::move(fn)](const Vec& p) { return to_vec(fn(from_vec(p))); };
        return field;
    });
    m.def("contact_field", &contact_field);
    m.def("dual_one_form", [](const VectorField3& f, const DVec& p, const DVec& v) {
        return dual_one_form(f, to_vec(p), to_vec(v));
    });
    m.def("frobenius_defect", [](const VectorField3& f, const DVec& p, double h) {
        return frobenius_defect(f, to_vec(p), h);
    });
    m.def("frobenius_report", [](const VectorField3& f, const DVec& p, double h) {
        FrobeniusReport rep = frobenius_report(f, to_vec(p), h);
        py::dict d;
        d["point"] = from_vec(rep.point);
        d["defect"] = rep.defect;
        d["scale_invariant_defect"] = rep.scale_invariant_defect;
        return d;
    });

    py::class_<GnomonicChart>(m, "GnomonicChart")
        .def(py::init([](const DVec& base, double radius) {
                 return GnomonicChart(to_vec(base), radius);
             }),
             py::arg("base"), py::arg("radius"))
        .def("to_sphere",
             [](const GnomonicChart& c, const DVec& u) { return from_vec(c.to_sphere(to_vec(u))); })
        .def("max_angle", &GnomonicChart::max_angle);
    m.def("periscope_field_pullback", &periscope_field_pullback);
    m.def("reversed_displacement_field", &reversed_displacement_field);

    // Scenario runner.
    m.def("run_scenario_file",
          [](const std::string& path, std::optional<std::string> out, std::size_t jobs) {
              ScenarioConfig config = load_scenario(path);
              RunOptions options;
              options.output_override = std::move(out);
              options.jobs = jobs;
              return run_result_dict(run_scenario(config, options));
          },
          py::arg("path"), py::arg("out") = py::none(), py::arg("jobs") = 1);
    m.def("run_demo",
          [](const std::string& name, const std::string& out_dir, std::size_t jobs) {
              std::ostringstream text;
              RunResult result = run_demo(name, out_dir, text, jobs);
              py::dict d = run_result_dict(result);
              d["text"] = text.str();
              return d;
          },
          py::arg("name"), py::arg("out_dir"), py::arg("jobs") = 1);
    m.def("demo_names", [] { return demo_names(); });
}
