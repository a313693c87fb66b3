import numpy as np
import pytest

from ndcwt.selfsim import (
    FbmSpec,
    fbm_covariance_2d,
    fgn_autocovariance,
    replicate_seeds,
    simulate_fbm_1d,
    simulate_fbm_2d,
    simulate_fgn,
)


def test_spec_validation():
    for h in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            FbmSpec(h, 16)
    with pytest.raises(ValueError):
        FbmSpec(0.5, 0)


def test_fgn_autocovariance_lag0():
    assert fgn_autocovariance(0.7, [0])[0] == pytest.approx(1.0)
    np.testing.assert_allclose(fgn_autocovariance(0.5, [1, 2, 5]), 0.0, atol=1e-15)


def test_brownian_increments_uncorrelated():
    m = 4096
    y = simulate_fbm_1d(FbmSpec(0.5, m, seed=9))
    x = np.diff(np.concatenate([[0.0], y]))
    r1 = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert abs(r1) < 3 / np.sqrt(m)


def test_increment_variance_h07():
    v = [np.var(np.diff(simulate_fbm_1d(FbmSpec(0.7, 4096, seed=s)))) for s in replicate_seeds(1, 100)]
    assert abs(np.mean(v) - 1) < 0.05


def test_fgn_lag_covariances_h05():
    rng = np.random.default_rng(3)
    x = np.array([simulate_fgn(0.5, 512, rng) for _ in range(200)])
    for lag in (1, 2, 5):
        c = np.mean(x[:, :-lag] * x[:, lag:])
        assert abs(c) < 4 / np.sqrt(200 * (512 - lag))


def test_1d_deterministic():
    a = simulate_fbm_1d(FbmSpec(0.3, 1000, seed=42))
    b = simulate_fbm_1d(FbmSpec(0.3, 1000, seed=42))
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, simulate_fbm_1d(FbmSpec(0.3, 1000, seed=43)))


def test_replicate_seeds_stable():
    assert replicate_seeds(0, 3) == replicate_seeds(0, 3)
    assert len(set(replicate_seeds(0, 50))) == 50


@pytest.mark.parametrize("method", ["cholesky", "embedding"])
def test_2d_origin_and_determinism(method):
    spec = FbmSpec(0.6, 20, 24, seed=5)
    A = simulate_fbm_2d(spec, method)
    assert A.shape == (20, 24) and A[0, 0] == 0.0
    assert simulate_fbm_2d(spec, method).tobytes() == A.tobytes()


@pytest.mark.parametrize("method", ["cholesky", "embedding"])
def test_2d_unit_lag_variogram(method):
    v = []
    for s in replicate_seeds(8, 50):
        A = simulate_fbm_2d(FbmSpec(0.5, 32, 32, seed=s), method)
        v.append(0.5 * (np.mean(np.diff(A, axis=0) ** 2) + np.mean(np.diff(A, axis=1) ** 2)))
    assert abs(np.mean(v) - 1.0) < 0.1


def test_2d_covariance_formula():
    pts = np.array([[0, 0], [1, 0], [0, 2]], float)
    C = fbm_covariance_2d(0.5, pts)
    # 0.5 (|s|^2H + |t|^2H - |s-t|^2H), unit-lag variance 1
    assert C[1, 1] == pytest.approx(1.0)
    assert C[1, 2] == pytest.approx(0.5 * (1 + 2 - np.sqrt(5)))
    assert C[0, 0] == 0.0


def test_2d_size_limit():
    with pytest.raises(ValueError):
        simulate_fbm_2d(FbmSpec(0.5, 1024, 1024))
