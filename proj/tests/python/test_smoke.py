import math

import numpy as np
import pytest

import qfd


def test_pauli_round_trip():
    rng = np.random.default_rng(3)
    c = rng.normal(size=4)
    M = qfd.compose(c)
    assert np.allclose(M, M.conj().T)
    sigma = [qfd.pauli_matrix(s) for s in range(4)]
    assert np.allclose([0.5 * np.trace(s @ M).real for s in sigma], c, atol=1e-14)
    assert np.allclose(qfd.decompose(M), c, atol=1e-14)
    with pytest.raises(ValueError):
        qfd.decompose(np.array([[0, 1], [0, 0]], dtype=complex))


def test_gauss_hermite_moments():
    x, w = qfd.gauss_hermite(10)
    assert math.isclose(w.sum(), math.sqrt(math.pi), rel_tol=1e-13)
    assert math.isclose((w * x**2).sum(), math.sqrt(math.pi) / 2, rel_tol=1e-13)


def test_closure_matches_formula_and_quadrature():
    p = qfd.PhysParams(m=1.3, theta=0.7)
    st = qfd.MomentState([1.2, 0.1, -0.05, 0.07],
                         [(0.3, -0.1), (0.02, 0.05), (-0.04, 0.01), (0.06, -0.02)])
    n = np.array(st.n)
    J = np.array(st.J)
    mt = p.m * p.theta
    expected = np.array([
        n[s] * (mt * np.eye(2) - np.outer(J[0], J[0]) / n[0] ** 2)
        + (np.outer(J[0], J[s]) + np.outer(J[s], J[0])) / n[0]
        for s in range(1, 4)
    ])
    L = qfd.closure_tensor(st, p)
    assert np.allclose(L, expected, rtol=1e-13, atol=1e-15)
    mom = qfd.equilibrium_moments(st, p, 20)
    assert np.allclose(mom["n"], n, rtol=1e-12)
    assert np.allclose(mom["J"], J, atol=1e-12)
    assert np.allclose(mom["Q2"][1:], L, rtol=1e-10, atol=1e-13)


def test_entropy_of_unit_maxwellian():
    def w(_x, p):
        g = math.exp(-0.5 * (p[0] ** 2 + p[1] ** 2)) / (2 * math.pi)
        return (g, 0.0, 0.0, 0.0)

    S = qfd.entropy_semiclassical(w, [1.0], qfd.PhysParams())
    assert abs(S + math.log(2 * math.pi)) <= 1e-6
    assert qfd.c_of_lambda(0.0) == 0.0
    assert abs(qfd.c_of_lambda(1 - 1e-10) - math.log(2)) <= 1e-6


def test_mixedness_worked_example():
    st = qfd.MomentState([1.0, 0.1, 0.0, 0.0], [(0, 0), (0.1, 0), (0, 0), (0, 0)])
    r = qfd.mixedness_check(st, qfd.PhysParams())
    assert abs(r.bound - 0.75) <= 1e-12
    assert abs(r.ratio - 0.01) <= 1e-15
    with pytest.raises(qfd.DomainError):
        qfd.mixedness_check(qfd.MomentState([0.0, 0, 0, 0]), qfd.PhysParams())


def test_klein_state_and_spinor_moments():
    ks = qfd.KleinState(2.0, 1.0, 0.0, 1.0)
    assert (ks.k, ks.q, ks.s, ks.s_prime) == (2.0, 1.0, 1, 1)
    assert abs(ks.T - 1.0) <= 1e-14
    r = np.linspace(-2, 3, 101)
    psi = np.array([ks.psi(x) for x in r])
    dpsi = np.array([ks.dpsi(x) for x in r])
    n, J = qfd.moments_from_spinor(r, psi[:, 0], psi[:, 1], dpsi[:, 0], dpsi[:, 1])
    closed = [ks.moments(x) for x in r]
    assert np.allclose(n, [c[0] for c in closed], atol=1e-12)
    assert np.allclose(J, [c[1] for c in closed], atol=1e-12)
    V = np.where((r > 0) & (r < 1), 1.0, 0.0)
    assert np.allclose(J[:, 1], 2.0 - V, atol=1e-12)
    with pytest.raises(qfd.DomainError):
        qfd.KleinState(1.0, 1.0, 0.0, 1.0)


def test_pure_state_residual_converges():
    k, kappa, eps, shift = 1.5, 0.8, 0.6, 0.5
    res = []
    for npts in (128, 256, 512):
        r = np.linspace(-4, 4, npts)
        a = np.exp(-r**2 / 2 + 1j * k * r)
        b = eps * np.exp(-((r - shift) ** 2) / 2 + 1j * kappa * r)
        n, J = qfd.moments_from_spinor(r, a, b, (-r + 1j * k) * a, (-(r - shift) + 1j * kappa) * b)
        assert np.allclose(np.linalg.norm(n[:, 1:], axis=1), n[:, 0], atol=1e-12)
        res.append(np.abs(qfd.pure_state_identity_residual(r, n, J)).max())
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(orders >= 1.9), orders


def test_1d_wave_conserves_mass():
    grid = qfd.Grid1D(0.0, 1.0, 128)
    r = grid.centers()
    s = 0.1 * np.sin(2 * np.pi * r)
    n = np.stack([1 + s, s, 0 * s, 0 * s], axis=1)
    f = qfd.Field1D(grid, n, np.zeros_like(n))
    traj = qfd.run_smooth(f, qfd.Potential1D.zero(grid), qfd.SolverConfig1D(t_end=0.5), qfd.PhysParams())
    assert traj.mass_drift <= 1e-12
    out = traj.snapshots[-1]
    exact = 1 + 0.1 * np.sin(2 * np.pi * (r - 0.5))
    assert np.abs(out.n[:, 0] - exact).mean() < 0.02
    assert np.all(out.n[:, 2:] == 0) and np.all(out.J[:, 2:] == 0)


def test_barrier_steady_state():
    p = qfd.PhysParams()
    grid = qfd.Grid1D(-2.0, 3.0, 125)
    barrier = qfd.Barrier(1.0, 0.0, 1.0)
    f = qfd.piecewise_constant(2.0, 2.0, 1.0, 1.0, barrier, grid, qfd.BoundaryCondition.outflow, p)
    assert max(abs(x) for x in qfd.jump_residual(f, barrier, p)) <= 1e-14
    traj = qfd.run_barrier(f, barrier, qfd.SolverConfig1D(t_end=2.0), p)
    assert np.abs(traj.snapshots[-1].n - f.n).max() <= 2e-10
    assert np.abs(traj.snapshots[-1].J - f.J).max() <= 2e-10


def test_2d_homogeneous_matches_ode():
    p = qfd.PhysParams()
    st = qfd.MomentState([1.0, 0.1, -0.05, 0.08],
                         [(0.3, -0.2), (0.05, 0.02), (-0.03, 0.04), (0.01, -0.06)])
    grid = qfd.Grid2D(0, 100, 0, 100, 8, 8)
    f = qfd.Field2D.uniform(grid, st)
    cfg = qfd.SolverConfig2D()
    V = qfd.Potential2D.zero(grid)
    for _ in range(100):
        f = qfd.step_2d(f, V, 1e-2, cfg, p)

    def rhs(u):
        s = qfd.MomentState(list(u[:4]), [tuple(u[4 + 2 * k: 6 + 2 * k]) for k in range(4)])
        d = qfd.uniform_ode_rhs(s, p)
        return np.concatenate([d.n, np.ravel(d.J)])

    u = np.concatenate([st.n, np.ravel(st.J)])
    h = 1e-3
    for _ in range(1000):
        k1 = rhs(u)
        k2 = rhs(u + h / 2 * k1)
        k3 = rhs(u + h / 2 * k2)
        k4 = rhs(u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.abs(f.n[0, 0] - u[:4]).max() <= 1e-8
    assert np.abs(f.J[3, 5].ravel() - u[4:]).max() <= 1e-8
    mass, momentum = qfd.conserved_totals(f)
    assert math.isclose(mass, 1e4, rel_tol=1e-12)


def test_invalid_inputs_raise():
    with pytest.raises(ValueError, match="theta"):
        qfd.PhysParams(theta=0.0)
    with pytest.raises(ValueError):
        qfd.Grid1D(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        qfd.SolverConfig1D(cfl=2.0)
