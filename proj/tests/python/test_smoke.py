import math
from pathlib import Path

import pytest

np = pytest.importorskip("numpy")
hullas = pytest.importorskip("hullas")

DATA = Path(__file__).resolve().parents[2] / "data"


def ridge(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=8)
    a /= np.linalg.norm(a)
    x = rng.uniform(-1.0, 1.0, size=(n, 8))
    t = x @ a
    return a, x, t**3 + t, (3 * t**2 + 1)[:, None] * a[None, :]


def test_exact_ridge_subspace():
    a, _, _, g = ridge(104, 1)
    lam, w = hullas.eigendecompose(hullas.covariance(g))
    assert np.all(np.diff(lam) <= 0)
    assert lam[1] / lam[0] <= 1e-10
    assert abs(abs(w[:, 0] @ a) - 1.0) <= 1e-10
    assert hullas.suggest_dim(lam) == 1
    # Independent check against numpy's symmetric eigensolver.
    ref = np.linalg.eigvalsh(g.T @ g / len(g))[::-1]
    assert np.allclose(lam, np.clip(ref, 0, None), atol=1e-12 * ref[0])


def test_local_linear_gradients_reproduce_linear_functions():
    rng = np.random.default_rng(4)
    x = rng.uniform(-1, 1, size=(40, 3))
    f = 3 * x[:, 0] - 2 * x[:, 1] + 0.5
    g = hullas.local_linear_gradients(x, f, k=10)
    assert np.allclose(g, [3.0, -2.0, 0.0], atol=1e-10)


def test_bootstrap_intervals_contain_estimates():
    _, x, f, _ = ridge(104, 2)
    g = hullas.local_linear_gradients(x, f)
    b = hullas.bootstrap_eigenvalues(g, replicates=200, seed=5)
    assert np.all(b["lower"] <= b["estimate"]) and np.all(b["estimate"] <= b["upper"])
    assert b["upper"][1] < b["lower"][0]


def test_surface_fit_and_error_matrix():
    rng = np.random.default_rng(7)
    y = rng.uniform(-1, 1, size=(30, 1))
    f = 1 + y[:, 0] - 2 * y[:, 0] ** 3
    s = hullas.fit_surface(y, f, 3)
    assert np.allclose(s.coefficients, [1, 1, 0, -2], atol=1e-10)
    assert s.relative_rmse(y, f) <= 1e-12
    assert hullas.graded_exponents(2, 1) == [[0, 0], [1, 0], [0, 1]]

    _, x, f, g = ridge(120, 3)
    em = hullas.error_matrix(x, f, dims=[1], degrees=[1, 3], repetitions=2, gradients=g)
    assert em.shape == (1, 2)
    assert em[0, 1] <= 1e-8 < em[0, 0]


def test_steady_value():
    t = np.arange(3001) * 0.01
    y = 50 + 10 * np.exp(-0.2 * t) * np.cos(4 * t)
    assert abs(hullas.steady_value(t, y) - 50) / 50 <= 1e-3


def test_geometry_and_deformation(tmp_path):
    v, tri = hullas.icosphere(1.0, 3)
    assert abs(hullas.signed_volume(v, tri) - 4 * math.pi / 3) / (4 * math.pi / 3) < 0.02
    h = hullas.hydrostatic_equilibrium(v, tri, 998.0 * 2 * math.pi / 3)
    assert abs(h["sinkage"]) < 0.1

    hv, ht = hullas.default_hull()
    same_v, same_t = hullas.deform_hull(hv, ht, [0.0] * 6)
    assert np.array_equal(same_v, hv) and np.array_equal(same_t, ht)
    moved, _ = hullas.deform_hull(hv, ht, [0.1, 0.0, 0.0, 0.0, 0.2, 0.0])
    assert not np.array_equal(moved, hv)

    path = tmp_path / "hull.stl"
    hullas.write_stl(hv, ht, path)
    rv, rt = hullas.read_stl(path)
    assert rv.shape == hv.shape and rt.shape == ht.shape

    with pytest.raises(hullas.ValidationError):
        hullas.deform_hull(hv, ht, [5.0, 0, 0, 0, 0, 0])


def test_study_is_deterministic(tmp_path):
    kwargs = dict(config=DATA / "configs" / "ridge_exact.json", oracle=DATA / "oracles" / "ridge.json", seed=9)
    r1 = hullas.run_study(tmp_path / "a", **kwargs)
    r2 = hullas.run_study(tmp_path / "b", **kwargs)
    assert r1["suggested_dim"] == 1
    for name in ("dataset.csv", "bootstrap.csv", "error_matrix.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert np.array_equal(r1["eigenvalues"], r2["eigenvalues"])
