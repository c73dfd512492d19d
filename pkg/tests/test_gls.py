import numpy as np
import pytest

from pnppr.gls import (
    COMPLEX_PLANE, REAL_PLANE, GlsState, gls_solve, gls_sweep, init_state, project, u_update,
)
from pnppr.noise import GAUSSIAN, POISSON, NoiseModel, PhaselessData
from pnppr.operators import CdpOperator, PtychoOperator, zone_plate_probe


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def dense(op):
    n = op.image_shape[0] * op.image_shape[1]
    cols = []
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = 1
        cols.append(op.forward(e.reshape(op.image_shape)).ravel())
    return np.array(cols).T


OPS = [
    CdpOperator.octanary((4, 4), 2, seed=3),
    PtychoOperator(zone_plate_probe(3, 1.5, 0.2), [(0, 0), (1, 2), (2, 1), (3, 3)], (4, 4)),
]


@pytest.mark.parametrize("op", OPS)
def test_complex_u_update_matches_dense_solve(op):
    rng = np.random.default_rng(0)
    A = dense(op)
    z, lam = crandn(rng, op.m), crandn(rng, op.m)
    g = crandn(rng, op.image_shape)
    r, eta = 0.7, 2.3
    lhs = eta * A.conj().T @ A + r * np.eye(A.shape[1])
    rhs = A.conj().T @ (eta * z + lam) + r * g.ravel()
    expect = np.linalg.solve(lhs, rhs).reshape(op.image_shape)
    got = u_update(op, z.reshape(op.spectrum_shape), lam.reshape(op.spectrum_shape), g, r, eta)
    np.testing.assert_allclose(got, expect, atol=1e-12)


@pytest.mark.parametrize("op", OPS)
def test_real_u_update_matches_real_least_squares(op):
    rng = np.random.default_rng(1)
    A = dense(op)
    z, lam = crandn(rng, op.m), crandn(rng, op.m)
    g = crandn(rng, op.image_shape)
    r, eta = 0.4, 1.7
    M = np.vstack([A.real, A.imag])
    zh = z + lam / eta
    b = np.concatenate([zh.real, zh.imag])
    lhs = eta * M.T @ M + r * np.eye(M.shape[1])
    expect = np.linalg.solve(lhs, eta * M.T @ b + r * g.real.ravel()).reshape(op.image_shape)
    got = u_update(op, z.reshape(op.spectrum_shape), lam.reshape(op.spectrum_shape), g, r, eta,
                   REAL_PLANE)
    np.testing.assert_allclose(got.real, expect, atol=1e-12)
    assert np.all(got.imag == 0)


def test_u_update_without_data_weight_returns_anchor():
    op = OPS[0]
    g = np.full(op.image_shape, 2 + 1j)
    z = np.zeros(op.spectrum_shape, dtype=complex)
    np.testing.assert_array_equal(u_update(op, z, z, g, 1.0, 0.0), g)
    np.testing.assert_array_equal(u_update(op, z, z, g, 1.0, 0.0, REAL_PLANE), g.real)


def test_project():
    u = np.array([[1 + 2j]])
    assert project(u, COMPLEX_PLANE) is u
    assert project(u, REAL_PLANE)[0, 0] == 1
    with pytest.raises(ValueError):
        project(u, "box")


def noiseless(op, u, kind):
    h = np.abs(op.forward(u)).ravel() ** 2
    return PhaselessData(h, NoiseModel(kind, 1.0 if kind == POISSON else float("inf")))


@pytest.mark.parametrize("kind", [POISSON, GAUSSIAN])
@pytest.mark.parametrize("constraint", [COMPLEX_PLANE, REAL_PLANE])
def test_exact_solution_is_a_fixed_point(kind, constraint):
    rng = np.random.default_rng(4)
    op = CdpOperator.octanary((6, 6), 2, seed=2)
    u = rng.uniform(0.2, 1.0, (6, 6)) + (0 if constraint == REAL_PLANE else 1j * rng.uniform(size=(6, 6)))
    data = noiseless(op, u, kind)
    st = gls_solve(op, data, u, r=0.5, eta=1.0, constraint=constraint, inner_iters=20)
    np.testing.assert_allclose(st.u, u, atol=1e-12)
    np.testing.assert_allclose(st.z, op.forward(u), atol=1e-12)
    assert np.max(np.abs(st.lam)) < 1e-12


def test_primal_residual_shrinks_on_noiseless_data():
    rng = np.random.default_rng(5)
    op = CdpOperator.octanary((8, 8), 2, seed=1)
    u = rng.uniform(0, 1, (8, 8))
    data = noiseless(op, u, POISSON)
    g = u + 0.3 * rng.standard_normal(u.shape)
    st = init_state(op, g)
    first = None
    for _ in range(50):
        gls_sweep(st, op, data, g, 1e-2, 0.5, REAL_PLANE)
        res = np.linalg.norm(st.z - op.forward(st.u))
        first = res if first is None else first
    assert res < first


def test_warm_start_continues_the_same_trajectory():
    rng = np.random.default_rng(6)
    op = CdpOperator.octanary((5, 5), 2, seed=0)
    u = rng.uniform(0, 1, (5, 5))
    data = noiseless(op, u, GAUSSIAN)
    g = rng.uniform(0, 1, (5, 5)).astype(complex)
    once = gls_solve(op, data, g, 0.3, 1.5, inner_iters=6)
    half = gls_solve(op, data, g, 0.3, 1.5, inner_iters=3)
    twice = gls_solve(op, data, g, 0.3, 1.5, inner_iters=3, warm=half.copy())
    np.testing.assert_allclose(twice.u, once.u, atol=1e-14)
    assert twice.iteration == once.iteration == 6


def test_state_copy_is_deep():
    st = GlsState(np.zeros(2), np.zeros(2), np.zeros(2))
    c = st.copy()
    c.u[0] = 1
    assert st.u[0] == 0


def test_gls_rejects_nonpositive_penalties():
    op = OPS[0]
    data = noiseless(op, np.ones((4, 4)), POISSON)
    with pytest.raises(ValueError):
        gls_solve(op, data, np.ones((4, 4)), r=0.0, eta=1.0)
    with pytest.raises(ValueError):
        gls_solve(op, data, np.ones((4, 4)), r=1.0, eta=0.0)
