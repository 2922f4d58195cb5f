#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qfd/equilibrium.hpp"
#include "qfd/pauli.hpp"
#include "qfd/purestate.hpp"
#include "qfd/qfde1d.hpp"
#include "qfd/qfde2d.hpp"
#include "qfd/quadrature.hpp"

namespace py = pybind11;
using namespace qfd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix2 to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2 || a.shape(0) != 2 || a.shape(1) != 2) {
    throw std::invalid_argument("expected a 2x2 complex array");
  }
  auto m = a.unchecked<2>();
  return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

ComplexArray from_matrix(const ComplexMatrix2& M) {
  ComplexArray out({2, 2});
  auto m = out.mutable_unchecked<2>();
  m(0, 0) = M.m11;
  m(0, 1) = M.m12;
  m(1, 0) = M.m21;
  m(1, 1) = M.m22;
  return out;
}

Array rows4(const std::vector<Moments4>& v) {
  Array out({static_cast<py::ssize_t>(v.size()), py::ssize_t{4}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t s = 0; s < 4; ++s) m(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(s)) = v[i][s];
  return out;
}

std::vector<Moments4> to_rows4(const Array& a, const char* what) {
  if (a.ndim() != 2 || a.shape(1) != 4) {
    throw std::invalid_argument(std::string(what) + ": expected an (N, 4) array");
  }
  auto m = a.unchecked<2>();
  std::vector<Moments4> v(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t s = 0; s < 4; ++s) v[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = m(i, s);
  return v;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1D array");
  return {a.data(), a.data() + a.size()};
}

Array closure_array(const ClosureTensor& L) {
  Array out({3, 2, 2});
  auto m = out.mutable_unchecked<3>();
  for (int s = 1; s <= 3; ++s)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) m(s - 1, i, k) = L(s, i, k);
  return out;
}

// Field1D <-> (N, 4) arrays of n and J.
Array field1d_get(const Field1D& f, bool current) {
  std::vector<Moments4> v;
  v.reserve(f.cells.size());
  for (const auto& c : f.cells) v.push_back(current ? c.J : c.n);
  return rows4(v);
}

void field1d_set(Field1D& f, const Array& a, bool current) {
  const auto v = to_rows4(a, current ? "J" : "n");
  if (v.size() != f.cells.size()) throw std::invalid_argument("array length must equal the cell count");
  for (std::size_t i = 0; i < v.size(); ++i) (current ? f.cells[i].J : f.cells[i].n) = v[i];
}

// Field2D <-> n (ny, nx, 4) and J (ny, nx, 4, 2).
Array field2d_n(const Field2D& f) {
  Array out({f.grid.ny, f.grid.nx, 4});
  auto m = out.mutable_unchecked<3>();
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i)
      for (int s = 0; s < 4; ++s) m(j, i, s) = f.at(i, j).n[static_cast<std::size_t>(s)];
  return out;
}

Array field2d_J(const Field2D& f) {
  Array out({f.grid.ny, f.grid.nx, 4, 2});
  auto m = out.mutable_unchecked<4>();
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i)
      for (int s = 0; s < 4; ++s)
        for (int k = 0; k < 2; ++k)
          m(j, i, s, k) = f.at(i, j).J[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
  return out;
}

Field2D field2d_from_arrays(const Grid2D& grid, const Array& n, const Array& J) {
  grid.validate();
  if (n.ndim() != 3 || n.shape(0) != grid.ny || n.shape(1) != grid.nx || n.shape(2) != 4) {
    throw std::invalid_argument("n: expected shape (ny, nx, 4)");
  }
  if (J.ndim() != 4 || J.shape(0) != grid.ny || J.shape(1) != grid.nx || J.shape(2) != 4 ||
      J.shape(3) != 2) {
    throw std::invalid_argument("J: expected shape (ny, nx, 4, 2)");
  }
  auto mn = n.unchecked<3>();
  auto mJ = J.unchecked<4>();
  Field2D f = Field2D::uniform(grid, MomentState{});
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      for (int s = 0; s < 4; ++s) {
        const auto ss = static_cast<std::size_t>(s);
        f.at(i, j).n[ss] = mn(j, i, s);
        f.at(i, j).J[ss] = {mJ(j, i, s, 0), mJ(j, i, s, 1)};
      }
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moment hydrodynamics of graphene electrons: C++ core bindings";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<PhysParams>(m, "PhysParams")
      .def(py::init([](double hbar, double vF, double mass, double theta) {
             PhysParams p{hbar, vF, mass, theta};
             p.validate();
             return p;
           }),
           py::arg("hbar") = 1.0, py::arg("vF") = 1.0, py::arg("m") = 1.0, py::arg("theta") = 1.0)
      .def_readwrite("hbar", &PhysParams::hbar)
      .def_readwrite("vF", &PhysParams::v_F)
      .def_readwrite("m", &PhysParams::m)
      .def_readwrite("theta", &PhysParams::theta)
      .def_property_readonly("omega", &PhysParams::omega)
      .def("validate", &PhysParams::validate)
      .def("__repr__", [](const PhysParams& p) {
        return "PhysParams(hbar=" + py::repr(py::float_(p.hbar)).cast<std::string>() +
               ", vF=" + py::repr(py::float_(p.v_F)).cast<std::string>() +
               ", m=" + py::repr(py::float_(p.m)).cast<std::string>() +
               ", theta=" + py::repr(py::float_(p.theta)).cast<std::string>() + ")";
      });

  // Pauli algebra
  m.def("pauli_matrix", [](int s) { return from_matrix(pauli_matrix(s)); }, py::arg("s"));
  m.def("decompose", [](const ComplexArray& M) { return decompose(to_matrix(M)).c; },
        py::arg("M"), "Pauli components c_s = tr(sigma_s M) / 2 of a Hermitian 2x2 matrix.");
  m.def("compose", [](const std::array<double, 4>& c) { return from_matrix(compose(PauliComponents{c})); },
        py::arg("c"));
  m.def("levi_civita", &levi_civita, py::arg("s"), py::arg("k"), py::arg("j"));

  // Quadrature
  m.def("gauss_hermite", [](int order) {
    const GaussHermiteRule r = gauss_hermite(order);
    return py::make_tuple(py::array(py::cast(r.nodes)), py::array(py::cast(r.weights)));
  }, py::arg("order"), "Nodes and weights for the weight exp(-x^2).");

  // Equilibrium
  py::class_<MomentState>(m, "MomentState")
      .def(py::init([](const std::array<double, 4>& n, const std::array<Vec2, 4>& J) {
             MomentState s;
             s.n = n;
             s.J = J;
             return s;
           }),
           py::arg("n"), py::arg("J") = std::array<Vec2, 4>{})
      .def_readwrite("n", &MomentState::n)
      .def_readwrite("J", &MomentState::J)
      .def("velocity", &MomentState::velocity, py::arg("s"));

  py::class_<MixednessReport>(m, "MixednessReport")
      .def_readonly("ratio", &MixednessReport::ratio)
      .def_readonly("kinetic", &MixednessReport::kinetic)
      .def_readonly("bound", &MixednessReport::bound)
      .def_readonly("margin", &MixednessReport::margin)
      .def("strongly_mixed", &MixednessReport::strongly_mixed,
           py::arg("factor") = MixednessReport::kDefaultFactor);

  m.def("c_of_lambda", &c_of_lambda, py::arg("lam"));
  m.def("closure_tensor", [](const MomentState& s, const PhysParams& p) {
    return closure_array(closure_tensor(s, p));
  }, py::arg("state"), py::arg("params"), "L[s-1, i, k] for s = 1..3.");
  m.def("equilibrium_strongly_mixed", [](const MomentState& s, const PhysParams& p, const Vec2& q) {
    return equilibrium_strongly_mixed(s, p, q).c;
  }, py::arg("state"), py::arg("params"), py::arg("p"));
  m.def("equilibrium_moments", [](const MomentState& s, const PhysParams& p, int order) {
    const MomentTable t = moments_via_quadrature(
        [&](const Vec2& q) { return equilibrium_strongly_mixed(s, p, q); }, quadrature_for(s, p, order));
    Array Q2({4, 2, 2});
    auto q = Q2.mutable_unchecked<3>();
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k)
          q(static_cast<py::ssize_t>(a), static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(k)) = t.Q2[a][i][k];
    py::dict d;
    d["n"] = t.n;
    d["J"] = t.J;
    d["Q2"] = Q2;
    return d;
  }, py::arg("state"), py::arg("params"), py::arg("order") = 20,
        "Gauss-Hermite moments of the strongly-mixed equilibrium.");
  m.def("mixedness_check", &mixedness_check, py::arg("state"), py::arg("params"));
  m.def("entropy_semiclassical",
        [](const std::function<std::array<double, 4>(std::size_t, const Vec2&)>& w,
           const std::vector<double>& weights, const PhysParams& p, int order, const Vec2& center,
           double scale) {
          QuadratureSpec q{order, center, scale};
          return entropy_semiclassical(
              [&](std::size_t x, const Vec2& k) { return PauliComponents{w(x, k)}; }, weights, p, q);
        },
        py::arg("w"), py::arg("spatial_weights"), py::arg("params"), py::arg("order") = 20,
        py::arg("center") = Vec2{0.0, 0.0}, py::arg("scale") = 1.0,
        "w(x_index, (p1, p2)) -> (w0, w1, w2, w3).");

  // Pure states
  m.def("transmission", &transmission, py::arg("phi"), py::arg("q_phase"));
  m.def("moments_from_spinor",
        [](const Array& r, const ComplexArray& psi1, const ComplexArray& psi2,
           std::optional<ComplexArray> dpsi1, std::optional<ComplexArray> dpsi2,
           const PhysParams& p) {
          SpinorField1D f;
          f.r = to_vector(r);
          f.psi1.assign(psi1.data(), psi1.data() + psi1.size());
          f.psi2.assign(psi2.data(), psi2.data() + psi2.size());
          if (dpsi1.has_value() != dpsi2.has_value()) {
            throw std::invalid_argument("pass both derivatives or neither");
          }
          if (dpsi1) {
            f.dpsi1.assign(dpsi1->data(), dpsi1->data() + dpsi1->size());
            f.dpsi2.assign(dpsi2->data(), dpsi2->data() + dpsi2->size());
          }
          f.validate();
          const SpinorMoments sm = moments_from_spinor(f, p);
          return py::make_tuple(rows4(sm.n), rows4(sm.J));
        },
        py::arg("r"), py::arg("psi1"), py::arg("psi2"), py::arg("dpsi1") = py::none(),
        py::arg("dpsi2") = py::none(), py::arg("params") = PhysParams{},
        "Returns (n, J), each of shape (N, 4).");
  m.def("pure_state_identity_residual",
        [](const Array& r, const Array& n, const Array& J, const PhysParams& p) {
          const auto rv = to_vector(r);
          const auto res = pure_state_identity_residual(rv, to_rows4(n, "n"), to_rows4(J, "J"), p);
          Array out({static_cast<py::ssize_t>(res.size()), py::ssize_t{3}});
          auto o = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < res.size(); ++i)
            for (std::size_t s = 0; s < 3; ++s) o(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(s)) = res[i][s];
          return out;
        },
        py::arg("r"), py::arg("n"), py::arg("J"), py::arg("params") = PhysParams{});

  py::class_<KleinState>(m, "KleinState")
      .def(py::init<double, double, double, double, const PhysParams&>(), py::arg("energy"),
           py::arg("v0"), py::arg("a"), py::arg("b"), py::arg("params") = PhysParams{})
      .def_property_readonly("energy", &KleinState::energy)
      .def_property_readonly("v0", &KleinState::barrier_height)
      .def_property_readonly("a", &KleinState::a)
      .def_property_readonly("b", &KleinState::b)
      .def_property_readonly("k", &KleinState::k)
      .def_property_readonly("q", &KleinState::q)
      .def_property_readonly("s", &KleinState::s)
      .def_property_readonly("s_prime", &KleinState::s_prime)
      .def_property_readonly("alpha", &KleinState::alpha)
      .def_property_readonly("beta", &KleinState::beta)
      .def_property_readonly("t", &KleinState::t)
      .def_property_readonly("T", &KleinState::transmission_probability)
      .def("potential", &KleinState::potential, py::arg("x"))
      .def("psi", &KleinState::psi, py::arg("x"))
      .def("dpsi", &KleinState::dpsi, py::arg("x"))
      .def("moments", [](const KleinState& ks, double r, const PhysParams& p) {
        return klein_moments(ks, r, p);
      }, py::arg("r"), py::arg("params") = PhysParams{});

  // 1D solver
  py::enum_<BoundaryCondition>(m, "BoundaryCondition")
      .value("periodic", BoundaryCondition::periodic)
      .value("outflow", BoundaryCondition::outflow);
  py::enum_<Splitting>(m, "Splitting").value("strang", Splitting::strang).value("lie", Splitting::lie);
  py::enum_<RotationIntegrator>(m, "RotationIntegrator")
      .value("exact_frozen", RotationIntegrator::exact_frozen)
      .value("rk4", RotationIntegrator::rk4);

  py::class_<Grid1D>(m, "Grid1D")
      .def(py::init([](double r_min, double r_max, int cells) {
             Grid1D g{r_min, r_max, cells};
             g.validate();
             return g;
           }),
           py::arg("r_min"), py::arg("r_max"), py::arg("cells"))
      .def_readonly("r_min", &Grid1D::r_min)
      .def_readonly("r_max", &Grid1D::r_max)
      .def_readonly("cells", &Grid1D::cells)
      .def_property_readonly("dr", &Grid1D::dr)
      .def("centers", [](const Grid1D& g) { return py::array(py::cast(g.centers())); });

  py::class_<Field1D>(m, "Field1D")
      .def(py::init([](const Grid1D& g, const Array& n, const Array& J, BoundaryCondition bc) {
             Field1D f = Field1D::uniform(g, bc, Cell1D{});
             field1d_set(f, n, false);
             field1d_set(f, J, true);
             return f;
           }),
           py::arg("grid"), py::arg("n"), py::arg("J"), py::arg("bc") = BoundaryCondition::periodic)
      .def_readonly("grid", &Field1D::grid)
      .def_readonly("bc", &Field1D::bc)
      .def_property("n", [](const Field1D& f) { return field1d_get(f, false); },
                    [](Field1D& f, const Array& a) { field1d_set(f, a, false); })
      .def_property("J", [](const Field1D& f) { return field1d_get(f, true); },
                    [](Field1D& f, const Array& a) { field1d_set(f, a, true); })
      .def("total_mass", &total_mass);

  py::class_<Barrier>(m, "Barrier")
      .def(py::init([](double v0, double a, double b) { return Barrier{v0, a, b}; }), py::arg("v0"),
           py::arg("a"), py::arg("b"))
      .def_readonly("v0", &Barrier::v0)
      .def_readonly("a", &Barrier::a)
      .def_readonly("b", &Barrier::b)
      .def("faces", &Barrier::faces, py::arg("grid"));

  py::class_<Potential1D>(m, "Potential1D")
      .def(py::init([](const Array& V, const Array& dV) { return Potential1D{to_vector(V), to_vector(dV)}; }),
           py::arg("V"), py::arg("dV"))
      .def_static("zero", &Potential1D::zero, py::arg("grid"));

  py::class_<SolverConfig1D>(m, "SolverConfig1D")
      .def(py::init([](double cfl, double t_end, Splitting sp, RotationIntegrator rot, int stride) {
             SolverConfig1D c{cfl, t_end, sp, rot, stride};
             c.validate();
             return c;
           }),
           py::arg("cfl") = 0.9, py::arg("t_end") = 1.0, py::arg("splitting") = Splitting::strang,
           py::arg("rotation") = RotationIntegrator::exact_frozen, py::arg("output_stride") = 0)
      .def_readwrite("cfl", &SolverConfig1D::cfl)
      .def_readwrite("t_end", &SolverConfig1D::t_end)
      .def_readwrite("splitting", &SolverConfig1D::splitting)
      .def_readwrite("rotation", &SolverConfig1D::rotation)
      .def_readwrite("output_stride", &SolverConfig1D::output_stride);

  py::class_<Trajectory1D>(m, "Trajectory1D")
      .def_readonly("times", &Trajectory1D::times)
      .def_readonly("snapshots", &Trajectory1D::snapshots)
      .def_readonly("dt", &Trajectory1D::dt)
      .def_readonly("steps", &Trajectory1D::steps)
      .def_readonly("mass_drift", &Trajectory1D::mass_drift)
      .def_readonly("max_jump_residual", &Trajectory1D::max_jump_residual);

  m.def("stable_dt", &stable_dt, py::arg("field"), py::arg("V"), py::arg("config"), py::arg("params"));
  m.def("step", &step, py::arg("field"), py::arg("V"), py::arg("dt"), py::arg("config"), py::arg("params"));
  m.def("step_barrier", &step_barrier, py::arg("field"), py::arg("barrier"), py::arg("dt"),
        py::arg("config"), py::arg("params"));
  m.def("run_smooth", &run_smooth, py::arg("field"), py::arg("V"), py::arg("config"), py::arg("params"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_barrier", &run_barrier, py::arg("field"), py::arg("barrier"), py::arg("config"),
        py::arg("params"), py::call_guard<py::gil_scoped_release>());
  m.def("piecewise_constant", &piecewise_constant, py::arg("beta0"), py::arg("beta1"), py::arg("n0"),
        py::arg("n1"), py::arg("barrier"), py::arg("grid"), py::arg("bc"), py::arg("params"));
  m.def("jump_residual", [](const Field1D& f, const Barrier& b, const PhysParams& p) {
    return jump_residual(f, b, p).values;
  }, py::arg("field"), py::arg("barrier"), py::arg("params"));
  m.def("energy_density", &energy_density, py::arg("n0"), py::arg("J1"), py::arg("V"), py::arg("params"));

  // 2D solver
  py::class_<Grid2D>(m, "Grid2D")
      .def(py::init([](double x_min, double x_max, double y_min, double y_max, int nx, int ny) {
             Grid2D g{x_min, x_max, y_min, y_max, nx, ny};
             g.validate();
             return g;
           }),
           py::arg("x_min"), py::arg("x_max"), py::arg("y_min"), py::arg("y_max"), py::arg("nx"),
           py::arg("ny"))
      .def_readonly("nx", &Grid2D::nx)
      .def_readonly("ny", &Grid2D::ny)
      .def_property_readonly("dx", &Grid2D::dx)
      .def_property_readonly("dy", &Grid2D::dy)
      .def("center", &Grid2D::center, py::arg("i"), py::arg("j"));

  py::class_<Field2D>(m, "Field2D")
      .def(py::init(&field2d_from_arrays), py::arg("grid"), py::arg("n"), py::arg("J"))
      .def_static("uniform", &Field2D::uniform, py::arg("grid"), py::arg("state"))
      .def_readonly("grid", &Field2D::grid)
      .def_property_readonly("n", &field2d_n)
      .def_property_readonly("J", &field2d_J)
      .def("at", [](const Field2D& f, int i, int j) { return f.at(i, j); }, py::arg("i"), py::arg("j"));

  py::class_<Potential2D>(m, "Potential2D").def_static("zero", &Potential2D::zero, py::arg("grid"));

  py::class_<SolverConfig2D>(m, "SolverConfig2D")
      .def(py::init([](double cfl, double t_end, int stride) {
             SolverConfig2D c{cfl, t_end, stride};
             c.validate();
             return c;
           }),
           py::arg("cfl") = 0.9, py::arg("t_end") = 1.0, py::arg("output_stride") = 0)
      .def_readwrite("cfl", &SolverConfig2D::cfl)
      .def_readwrite("t_end", &SolverConfig2D::t_end)
      .def_readwrite("output_stride", &SolverConfig2D::output_stride);

  py::class_<Trajectory2D>(m, "Trajectory2D")
      .def_readonly("times", &Trajectory2D::times)
      .def_readonly("snapshots", &Trajectory2D::snapshots)
      .def_readonly("dt", &Trajectory2D::dt)
      .def_readonly("steps", &Trajectory2D::steps)
      .def_readonly("mass_drift", &Trajectory2D::mass_drift)
      .def_readonly("mixedness_warnings", &Trajectory2D::mixedness_warnings)
      .def_readonly("worst_margin", &Trajectory2D::worst_margin);

  m.def("uniform_ode_rhs", &uniform_ode_rhs, py::arg("state"), py::arg("params"));
  m.def("stable_dt_2d", &stable_dt_2d, py::arg("field"), py::arg("V"), py::arg("config"), py::arg("params"));
  m.def("step_2d", &step_2d, py::arg("field"), py::arg("V"), py::arg("dt"), py::arg("config"),
        py::arg("params"));
  m.def("run_2d", &run_2d, py::arg("field"), py::arg("V"), py::arg("config"), py::arg("params"),
        py::call_guard<py::gil_scoped_release>());
  m.def("conserved_totals", [](const Field2D& f) {
    const ConservedTotals t = conserved_totals(f);
    return py::make_tuple(t.mass, t.momentum);
  }, py::arg("field"), "(mass, (P_x, P_y)).");
}
