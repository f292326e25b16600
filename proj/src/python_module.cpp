#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pseudorot/anosovkatok.hpp"
#include "pseudorot/centralizer.hpp"
#include "pseudorot/displacement.hpp"
#include "pseudorot/rotation.hpp"
#include "pseudorot/torusmap.hpp"

namespace py = pybind11;
using namespace pseudorot;

namespace {

RatVec2 rat_vec(const std::string& x, const std::string& y) {
    return {rat_from_string(x), rat_from_string(y)};
}

} // namespace

PYBIND11_MODULE(_pseudorot, m) {
    m.doc() = "area-preserving torus map toolkit (C++ core bindings)";

    py::register_exception<BudgetExceeded>(m, "BudgetExceededError");

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
        });

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](int resolution) {
                 return GridSpec{resolution, {0.0, 0.0}};
             }),
             py::arg("resolution") = 64)
        .def_readwrite("resolution", &GridSpec::resolution);

    py::class_<AreaPreservingMap>(m, "Map")
        .def_static("identity", &AreaPreservingMap::identity)
        .def_static(
            "translation",
            [](double x, double y) { return AreaPreservingMap::translation(Vec2{x, y}); },
            py::arg("x"), py::arg("y"))
        .def_static(
            "translation_exact",
            [](const std::string& x, const std::string& y) {
                return AreaPreservingMap::translation(rat_vec(x, y));
            },
            py::arg("x"), py::arg("y"), "translation by exact rationals, e.g. ('1/100', '1/10')")
        .def("evaluate",
             [](const AreaPreservingMap& f, double x, double y) {
                 Vec2 r = f.evaluate_lift(Vec2{x, y});
                 return py::make_tuple(r.x - std::floor(r.x), r.y - std::floor(r.y));
             })
        .def("evaluate_lift",
             [](const AreaPreservingMap& f, double x, double y) {
                 Vec2 r = f.evaluate_lift(Vec2{x, y});
                 return py::make_tuple(r.x, r.y);
             })
        .def("after", &AreaPreservingMap::after, "composition: (f.after(g))(x) = f(g(x))")
        .def("inverse", &AreaPreservingMap::inverse)
        .def("lip_bound", &AreaPreservingMap::lip_bound)
        .def("isotopic_to_identity", &AreaPreservingMap::isotopic_to_identity)
        .def("serialize", [](const AreaPreservingMap& f) { return serialize(f); })
        .def_static("deserialize", [](const std::string& text) { return deserialize(text); })
        .def("__len__", [](const AreaPreservingMap& f) { return f.generators().size(); });

    m.def("conjugate", &conjugate, py::arg("f"), py::arg("h"), "h o f o h^-1");

    m.def(
        "rotation_vector",
        [](const AreaPreservingMap& f, int samples, int N, std::uint64_t seed) {
            auto est = estimate_rotation_vector(f, samples, N, seed);
            return py::make_tuple(py::make_tuple(est.rho.x, est.rho.y), est.residual);
        },
        py::arg("map"), py::arg("samples") = 8, py::arg("N") = 200, py::arg("seed") = 0,
        "returns ((rho_x, rho_y), residual)");

    m.def(
        "deviation",
        [](const AreaPreservingMap& f, double rho_x, double rho_y, int samples, int N,
           std::uint64_t seed) {
            auto dev = deviation_series(f, Vec2{rho_x, rho_y}, samples, N,
                                        Vec2{rho_x, rho_y}, seed);
            py::dict out;
            out["kappa_hat"] = dev.kappa_hat;
            out["kappa_hat_v"] = dev.kappa_hat_v;
            out["csv"] = deviation_series_csv(dev);
            return out;
        },
        py::arg("map"), py::arg("rho_x"), py::arg("rho_y"), py::arg("samples") = 8,
        py::arg("N") = 200, py::arg("seed") = 0);

    m.def(
        "rotation_set",
        [](const AreaPreservingMap& f, int samples, int N, std::uint64_t seed) {
            auto est = estimate_rotation_set(f, samples, N, seed);
            py::dict out;
            out["diameter"] = est.diameter;
            out["pseudo_rotation"] = est.pseudo_rotation;
            return out;
        },
        py::arg("map"), py::arg("samples") = 8, py::arg("N") = 200, py::arg("seed") = 0);

    m.def(
        "build_counterexample",
        [](int stages, int grid_resolution, std::uint64_t seed) {
            ConstructionParams params;
            params.grid_resolution = grid_resolution;
            params.seed = seed;
            auto res = counterexample(stages, params);
            py::dict out;
            out["map"] = res.f;
            out["report"] = res.report;
            out["all_pass"] = res.all_pass;
            out["q_digits"] = res.state.q.str().size();
            return out;
        },
        py::arg("stages"), py::arg("grid_resolution") = 64, py::arg("seed") = 0,
        "staged conjugated-translation construction; raises BudgetExceededError "
        "when q_n exceeds the budget");

    m.def(
        "c0_bound",
        [](const AreaPreservingMap& f, double kappa, int grid) {
            auto res = c0_bound_check(f, kappa, GridSpec{grid, {0.0, 0.0}});
            py::dict out;
            out["lhs"] = res.lhs;
            out["rhs"] = res.rhs;
            out["pass"] = res.pass;
            out["hypothesis_ok"] = res.hypothesis_ok;
            return out;
        },
        py::arg("map"), py::arg("kappa"), py::arg("grid") = 64);

    m.def(
        "commutator_defect",
        [](const AreaPreservingMap& f, const AreaPreservingMap& g, int grid) {
            auto res = commutator_defect(f, g, GridSpec{grid, {0.0, 0.0}});
            return py::make_tuple(res.defect, res.commutes);
        },
        py::arg("f"), py::arg("g"), py::arg("grid") = 16);

    m.def(
        "rotation_homomorphism",
        [](const AreaPreservingMap& g, int grid) {
            auto est = phi1(g, GridSpec{grid, {0.0, 0.0}});
            return py::make_tuple(py::make_tuple(est.value.x, est.value.y), est.error);
        },
        py::arg("map"), py::arg("grid") = 64, "phi1: mean lift displacement mod Z^2");

    m.def(
        "uniform_bound",
        [](const AreaPreservingMap& f, double kappa, const AreaPreservingMap& g, int N,
           int grid, double tolerance) {
            auto res = verify_uniform_bound(f, kappa, g, N, GridSpec{grid, {0.0, 0.0}},
                                            tolerance);
            py::dict out;
            out["max_spread"] = res.max_spread;
            out["bound"] = res.bound;
            out["pass"] = res.pass;
            out["csv"] = spread_csv(res);
            return out;
        },
        py::arg("f"), py::arg("kappa"), py::arg("g"), py::arg("N") = 20, py::arg("grid") = 16,
        py::arg("tolerance") = 1e-6);
}
