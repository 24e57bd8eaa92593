import numpy as np
import pytest

from shiftsolve import (
    GridSpec,
    resolvent_cap,
    resolvent_norm_reference,
    schur,
    spectral_cloud,
    spectral_portrait,
    spectral_window,
)
from shiftsolve.generators import grcar, jordan
from shiftsolve.pseudospectra import portrait_window

from conftest import crandn


@pytest.fixture(scope="module")
def grcar100_t():
    return schur(grcar(100)).t


def test_reference_examples(oracles):
    assert resolvent_norm_reference(np.diag([1.0, 3.0]), 2) == pytest.approx(1, rel=1e-15)
    assert resolvent_norm_reference(jordan(2), 1) == pytest.approx(oracles["jordan2_at_1"], rel=1e-14)
    assert resolvent_norm_reference(np.triu(np.ones((4, 4))), 1e6) == pytest.approx(1e-6, rel=1e-4)


def test_reference_singular_is_cap():
    T = np.array([[1.0, 5], [0, 2]])
    assert resolvent_norm_reference(T, 2.0) == resolvent_cap(T)
    assert resolvent_cap(T) == 1 / (np.finfo(float).eps * 6)


def test_cloud_examples():
    res = spectral_cloud(np.diag([1.0]), [3])
    assert res.values[0] == 0.5 and res.iterations[0] == 1 and res.converged[0]
    res = spectral_cloud(np.diag([1.0, 3.0]), [2, 0])
    np.testing.assert_allclose(res.values, [1, 1], rtol=1e-12)


def test_cloud_matches_frozen_oracle(oracles):
    T = schur(grcar(30)).t
    pts = np.array([complex(a, b) for a, b, _ in oracles["grcar30"]])
    want = np.array([v for *_, v in oracles["grcar30"]])
    res = spectral_cloud(T, pts)
    assert res.converged.all()
    np.testing.assert_allclose(res.values, want, rtol=1e-6)


def test_jordan4_frozen_oracle(oracles):
    pts = np.array([complex(a, b) for a, b, _ in oracles["jordan4"]])
    want = np.array([v for *_, v in oracles["jordan4"]])
    res = spectral_cloud(jordan(4), pts)
    np.testing.assert_allclose(res.values, want, rtol=1e-6)
    ref = [resolvent_norm_reference(jordan(4), z) for z in pts]
    np.testing.assert_allclose(ref, want, rtol=1e-12)


def test_grcar_25_shifts(grcar100_t):
    rng = np.random.default_rng(3)
    z = 1 + 2.5 * rng.uniform(-1, 1, 25) + 3.0j * rng.uniform(-1, 1, 25)
    res = spectral_cloud(grcar100_t, z)
    ref = np.array([resolvent_norm_reference(grcar100_t, p) for p in z])
    ok = res.converged
    assert ok.mean() == 1
    np.testing.assert_allclose(res.values[ok], ref[ok], rtol=1e-6)


@pytest.mark.parametrize("m", [20, 200])
def test_oracle_equivalence_random(m):
    rng = np.random.default_rng(m)
    T = np.triu(crandn(rng, m, m)) / np.sqrt(m)
    z = crandn(rng, 6) * 0.8
    tol = 1e-6
    res = spectral_cloud(T, z, tol=tol)
    ref = np.array([resolvent_norm_reference(T, p) for p in z])
    ok = res.converged
    assert np.all(np.abs(res.values[ok] - ref[ok]) <= 10 * tol * ref[ok])


def test_eigenvalue_shift_gives_cap(grcar100_t):
    T = grcar100_t
    d = np.diagonal(T)[[0, 17, 99]]
    res = spectral_cloud(T, d)
    assert np.all(np.isfinite(res.values))
    np.testing.assert_array_equal(res.values, resolvent_cap(T))
    res = spectral_cloud(jordan(5), [0.0])
    assert res.values[0] == resolvent_cap(jordan(5))


def test_monotone_history(grcar100_t):
    z = np.linspace(-1, 3, 9) + 1.2j
    res = spectral_cloud(grcar100_t, z, history=True)
    for h, k in zip(res.history, res.iterations):
        seq = h[:k]
        assert not np.isnan(seq).any() and np.isnan(h[k:]).all()
        assert np.all(np.diff(seq) >= -1e-10 * seq[1:])
    np.testing.assert_array_equal(res.values, [h[k - 1] for h, k in zip(res.history, res.iterations)])


def test_batching_does_not_change_results(grcar100_t):
    z = 0.5 + 2.0 * crandn(np.random.default_rng(1), 40)
    a = spectral_cloud(grcar100_t, z)
    b = spectral_cloud(grcar100_t, z, batch_max=1)
    c = spectral_cloud(grcar100_t, z, batch_max=7)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-10)
    np.testing.assert_allclose(a.values, c.values, rtol=1e-10)
    np.testing.assert_array_equal(a.iterations, b.iterations)


def test_deflation_does_not_disturb_survivors(grcar100_t):
    # the first point converges in a couple of steps; the second keeps going
    z = np.array([0.8 + 1.9j, -2.0 + 0j])
    both = spectral_cloud(grcar100_t, z, history=True)
    alone = spectral_cloud(grcar100_t, z[1:], history=True)
    assert both.iterations[0] < both.iterations[1]
    k = both.iterations[1]
    np.testing.assert_allclose(both.history[1, :k], alone.history[0, :k], rtol=1e-10)


def test_unconverged_flag():
    T = schur(grcar(60)).t
    res = spectral_cloud(T, [0.9 + 0.3j], tol=1e-15, maxit=2)
    assert not res.converged[0] and res.iterations[0] == 2
    assert res.values[0] > 0


def test_seed_determinism(grcar100_t):
    z = [1.0 + 1j, 0.3 - 2j]
    a = spectral_cloud(grcar100_t, z, seed=5)
    b = spectral_cloud(grcar100_t, z, seed=5)
    np.testing.assert_array_equal(a.values, b.values)


def test_grid_points():
    g = GridSpec(0, 4, 1, 3, 1)
    np.testing.assert_allclose(g.points(), [[-4 / 3, 0, 4 / 3]])
    g = GridSpec(1 + 1j, 2, 4, 2, 2)
    np.testing.assert_allclose(g.points(), [[0.5 + 0j, 1.5 + 0j], [0.5 + 2j, 1.5 + 2j]])
    with pytest.raises(ValueError):
        GridSpec(0, 1, 1, 0, 1)
    with pytest.raises(ValueError):
        GridSpec(0, -1, 1, 1, 1)


def test_window_examples(grcar100_t):
    T = grcar100_t
    f = spectral_window(T, GridSpec(1 + 1j, 1, 1, 1, 1))
    assert f.values[0, 0] == spectral_cloud(T, [1 + 1j]).values[0]
    f = spectral_window(np.zeros((1, 1)), GridSpec(0, 4, 1, 3, 1))
    np.testing.assert_allclose(f.values[0], [0.75, resolvent_cap(np.zeros((1, 1))), 0.75])


def test_window_conjugate_symmetry():
    T = np.triu(np.random.default_rng(2).standard_normal((30, 30)))
    f = spectral_window(T, GridSpec(0.1, 4, 3, 9, 6))
    np.testing.assert_allclose(f.values, f.values[::-1], rtol=1e-8)


def test_portrait_window_contains_spectrum():
    g = portrait_window(np.diag([-1.0, 1.0]), 10, 10)
    pts = g.points()
    assert pts.real.min() < -1 and pts.real.max() > 1
    f = spectral_portrait(np.diag([-1.0, 1.0]), 10)
    assert f.values.shape == (10, 10)


def test_portrait_invariant_under_schur(rng):
    A = crandn(rng, 25, 25)
    T = schur(A).t
    g = portrait_window(T, 12, 9)
    fa = spectral_portrait(A, grid=g)
    ft = spectral_portrait(T, grid=g)
    np.testing.assert_allclose(fa.values, ft.values, rtol=1e-8)


@pytest.mark.slow
def test_grcar_portrait_converges():
    f = spectral_portrait(grcar(100), 100, 100, maxit=99)
    assert f.converged.all()
    assert np.all(f.values > 0) and np.all(np.isfinite(f.values))
