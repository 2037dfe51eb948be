#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pathdep/continuity.hpp"
#include "pathdep/generator.hpp"
#include "pathdep/maf.hpp"
#include "pathdep/projectors.hpp"
#include "pathdep/skorokhod.hpp"

namespace py = pybind11;
using namespace pathdep;

namespace {

// python-facing handle around the shared immutable grid
struct PyGrid {
    GridPtr p;
};

CadlagPath path_from_array(const PyGrid& grid,
                           py::array_t<double, py::array::c_style | py::array::forcecast> values) {
    const auto buf = values.request();
    int dim = 1;
    std::size_t rows = 0;
    if (buf.ndim == 1) {
        rows = static_cast<std::size_t>(buf.shape[0]);
    } else if (buf.ndim == 2) {
        rows = static_cast<std::size_t>(buf.shape[0]);
        dim = static_cast<int>(buf.shape[1]);
    } else {
        throw std::invalid_argument("path values must be 1- or 2-dimensional");
    }
    if (rows != grid.p->size())
        throw std::invalid_argument("path values must have one row per grid node");
    const double* ptr = static_cast<const double*>(buf.ptr);
    return CadlagPath(grid.p, dim, std::vector<double>(ptr, ptr + rows * dim));
}

Model model_from_kwargs(int dim, double horizon, double mesh,
                        const CoefficientConfig& coeffs,
                        const std::vector<std::pair<std::vector<double>, double>>& atoms) {
    Model model;
    model.grid = TimeGrid::uniform(horizon, mesh);
    model.jumps = JumpMeasure::none(dim);
    for (const auto& [y, mass] : atoms) model.jumps.add_atom(y, mass);
    CoefficientConfig cfg = coeffs;
    cfg.dim = dim;
    model.coeffs = make_coefficients(cfg, model.jumps);
    return model;
}

} // namespace

PYBIND11_MODULE(_pathdep, m) {
    m.doc() = "simulation and verification toolkit for path-dependent SDEs with jumps";

    py::class_<PyGrid>(m, "TimeGrid")
        .def(py::init([](std::vector<double> times) {
                 return PyGrid{std::make_shared<const TimeGrid>(std::move(times))};
             }),
             py::arg("times"))
        .def_static("uniform",
                    [](double horizon, double mesh) {
                        return PyGrid{TimeGrid::uniform(horizon, mesh)};
                    },
                    py::arg("horizon"), py::arg("mesh"))
        .def("__len__", [](const PyGrid& g) { return g.p->size(); })
        .def_property_readonly("horizon", [](const PyGrid& g) { return g.p->horizon(); })
        .def_property_readonly("mesh", [](const PyGrid& g) { return g.p->mesh(); })
        .def_property_readonly("times", [](const PyGrid& g) { return g.p->times(); })
        .def("index_at", [](const PyGrid& g, double t) { return g.p->index_at(t); })
        .def("is_node", [](const PyGrid& g, double t) { return g.p->is_node(t); });

    py::class_<CadlagPath>(m, "CadlagPath")
        .def(py::init(&path_from_array), py::arg("grid"), py::arg("values"))
        .def_static("constant",
                    [](const PyGrid& g, const std::vector<double>& x) {
                        return CadlagPath::constant(g.p, x);
                    },
                    py::arg("grid"), py::arg("value"))
        .def_property_readonly("dim", &CadlagPath::dim)
        .def_property_readonly("grid",
                               [](const CadlagPath& p) { return PyGrid{p.grid_ptr()}; })
        .def("evaluate", [](const CadlagPath& p, double t) { return p.evaluate(t); })
        .def("stopped", &CadlagPath::stopped)
        .def("values",
             [](const CadlagPath& p) {
                 py::array_t<double> out({p.nodes(), static_cast<std::size_t>(p.dim())});
                 std::copy(p.values().begin(), p.values().end(),
                           static_cast<double*>(out.request().ptr));
                 return out;
             })
        .def("__eq__", [](const CadlagPath& a, const CadlagPath& b) { return a == b; });

    m.def("concat", &concat, py::arg("eta"), py::arg("s"), py::arg("omega"));

    py::class_<CoefficientConfig>(m, "CoefficientConfig")
        .def(py::init<>())
        .def_readwrite("preset", &CoefficientConfig::preset)
        .def_readwrite("beta0", &CoefficientConfig::beta0)
        .def_readwrite("sigma0", &CoefficientConfig::sigma0)
        .def_readwrite("jump_scale", &CoefficientConfig::jump_scale)
        .def_readwrite("kappa", &CoefficientConfig::kappa)
        .def_readwrite("tau", &CoefficientConfig::tau)
        .def_readwrite("clip", &CoefficientConfig::clip);

    py::class_<Model>(m, "Model")
        .def(py::init(&model_from_kwargs), py::arg("dim"), py::arg("horizon"),
             py::arg("mesh"), py::arg("coefficients"),
             py::arg("jump_atoms") = std::vector<std::pair<std::vector<double>, double>>{})
        .def_property_readonly("grid", [](const Model& m_) { return PyGrid{m_.grid}; });

    m.def(
        "simulate",
        [](const Model& model, double s, const std::vector<double>& eta0,
           std::size_t n_paths, std::uint64_t seed, int workers) {
            const InitialCondition init =
                InitialCondition::from_value(s, eta0, model.grid);
            const PathEnsemble ens = simulate(model, init, n_paths, seed, workers);
            const std::size_t nodes = model.grid->size();
            const auto dim = static_cast<std::size_t>(ens.dim);
            py::array_t<double> out({n_paths, nodes, dim});
            std::copy(ens.data.begin(), ens.data.end(),
                      static_cast<double*>(out.request().ptr));
            return out;
        },
        py::arg("model"), py::arg("s"), py::arg("eta0"), py::arg("n_paths"),
        py::arg("seed"), py::arg("workers") = 1,
        "Euler ensemble from (s, eta); returns an (n, nodes, dim) array");

    m.def(
        "oscillation",
        [](const CadlagPath& p, double a, double b) {
            return oscillation(p.view(), a, b);
        },
        py::arg("path"), py::arg("a"), py::arg("b"));
    m.def(
        "modulus_w",
        [](const CadlagPath& p, double n, double theta) {
            return modulus_w(p.view(), n, theta);
        },
        py::arg("path"), py::arg("window_end"), py::arg("theta"));
    m.def(
        "modulus_wprime",
        [](const CadlagPath& p, double n, double theta) {
            const auto rep = modulus_wprime(p.view(), n, theta);
            py::dict d;
            d["wprime"] = rep.wprime_value;
            d["w"] = rep.w_value;
            d["subdivision"] = rep.subdivision;
            return d;
        },
        py::arg("path"), py::arg("window_end"), py::arg("theta"));
    m.def("skorokhod_distance", &skorokhod_distance, py::arg("p"), py::arg("q"));

    m.def(
        "trig_generator",
        [](const Model& model, const std::vector<double>& theta, double t,
           const CadlagPath& path, bool use_sin) {
            const auto fam = trig_family({theta});
            return apply_generator(model, fam[use_sin ? 1 : 0], t, path.view());
        },
        py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("path"),
        py::arg("use_sin") = false,
        "generator applied to cos(theta.x) (or sin with use_sin=True)");

    m.def(
        "estimate_projector_terminal",
        [](const Model& model, double s, const std::vector<double>& eta0,
           const std::string& kind, std::size_t n_paths, std::uint64_t seed) {
            PathRandomVariable z;
            const double T = model.grid->horizon();
            z.bound = 1.0;
            if (kind == "cos") {
                z.name = "cos(X_T)";
                z.z = [T](const PathView& p) { return std::cos(p.at(T, 0)); };
            } else if (kind == "sin") {
                z.name = "sin(X_T)";
                z.z = [T](const PathView& p) { return std::sin(p.at(T, 0)); };
            } else {
                throw std::invalid_argument("kind must be 'cos' or 'sin'");
            }
            const InitialCondition init =
                InitialCondition::from_value(s, eta0, model.grid);
            const auto est = estimate_projector(model, init, z, n_paths, seed, 1);
            return py::make_tuple(est.value, est.stderr_, est.n);
        },
        py::arg("model"), py::arg("s"), py::arg("eta0"), py::arg("kind"),
        py::arg("n_paths"), py::arg("seed"),
        "Monte Carlo projector estimate of cos/sin(X_T): (value, stderr, n)");

    m.def(
        "rn_density",
        [](const std::function<double(double, double)>& increment,
           const CadlagPath& path, std::size_t window_n) {
            AdditiveFunctional a{"py", [increment](double t, double u, const PathView&) {
                                     return increment(t, u);
                                 }};
            const auto dens = rn_density(a, [](double t) { return t; }, path.view(),
                                         window_n);
            return py::make_tuple(dens.times, dens.h);
        },
        py::arg("increment"), py::arg("path"), py::arg("window_n"),
        "density of a deterministic increment field against the identity clock");

    m.def(
        "quadratic_variation",
        [](const std::function<double(double, double)>& increment,
           const CadlagPath& path, double t, double u, std::size_t max_levels) {
            AdditiveFunctional a{"py", [increment](double tt, double uu, const PathView&) {
                                     return increment(tt, uu);
                                 }};
            const auto scheme = PartitionScheme::dyadic(path.grid(), t, u, max_levels);
            return quadratic_variation(a, scheme, path.view());
        },
        py::arg("increment"), py::arg("path"), py::arg("t"), py::arg("u"),
        py::arg("max_levels") = 16,
        "per-level sums of squared increments over dyadic refinements");

    m.attr("__version__") = "0.1.0";
}
