"""Exact Gaussian simulation of 1-D and 2-D fractional Brownian motion.

Random numbers come from numpy's PCG64 generator, seeded with the 64-bit
``seed`` of an :class:`FbmSpec`.  Replicate ``i`` of a batch seeded with ``S``
uses ``np.random.SeedSequence(S).spawn(n)[i]`` (see :func:`replicate_seeds`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

__all__ = [
    "EmbeddingError",
    "FbmSpec",
    "MAX_2D_SIZE",
    "fbm_covariance_2d",
    "fgn_autocovariance",
    "replicate_seeds",
    "simulate_fbm_1d",
    "simulate_fbm_2d",
    "simulate_fgn",
]

MAX_2D_SIZE = 2 ** 18
# 2-D shapes up to this many points use a Cholesky factor of the exact covariance.
CHOLESKY_MAX = 1024
NEG_EIG_TOL = 1e-9


class EmbeddingError(RuntimeError):
    pass


@dataclass(frozen=True)
class FbmSpec:
    hurst: float
    m: int
    n: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"Hurst exponent must lie in (0, 1), got {self.hurst}")
        if self.m < 1 or (self.n is not None and self.n < 1):
            raise ValueError("sizes must be positive")

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


def replicate_seeds(seed: int, n: int) -> list:
    """Independent child seeds for ``n`` replicates (documented seed stream)."""
    return [int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def fgn_autocovariance(hurst: float, lags) -> np.ndarray:
    k = np.abs(np.asarray(lags, dtype=float))
    a = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** a - 2 * k ** a + np.abs(k - 1) ** a)


def _fgn_eigenvalues(hurst, m, size):
    gamma = fgn_autocovariance(hurst, np.arange(size + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    return np.fft.fft(row).real


def simulate_fgn(hurst: float, m: int, rng: np.random.Generator) -> np.ndarray:
    """Fractional Gaussian noise (unit variance) by circulant embedding."""
    size = max(m, 1)
    for _ in range(8):
        lam = _fgn_eigenvalues(hurst, m, size)
        if lam.min() >= -NEG_EIG_TOL * max(1.0, lam.max()):
            break
        size *= 2
    else:
        raise EmbeddingError(f"circulant embedding of fGn(H={hurst}) not nonnegative")
    N = len(lam)
    lam = np.clip(lam, 0.0, None)
    z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    w = np.fft.fft(np.sqrt(lam / N) * z)
    return w.real[:m]


def simulate_fbm_1d(spec: FbmSpec) -> np.ndarray:
    """Cumulative sum of ``spec.m`` fGn increments."""
    return np.cumsum(simulate_fgn(spec.hurst, spec.m, spec.rng()))


def fbm_covariance_2d(hurst: float, pts_a, pts_b=None) -> np.ndarray:
    """``0.5 * (|u|^2H + |v|^2H - |u - v|^2H)`` for point arrays of shape (k, 2)."""
    pts_a = np.asarray(pts_a, dtype=float)
    pts_b = pts_a if pts_b is None else np.asarray(pts_b, dtype=float)
    a = 2.0 * hurst
    ra = np.hypot(pts_a[:, 0], pts_a[:, 1]) ** a
    rb = np.hypot(pts_b[:, 0], pts_b[:, 1]) ** a
    diff = pts_a[:, None, :] - pts_b[None, :, :]
    return 0.5 * (ra[:, None] + rb[None, :] - np.hypot(diff[..., 0], diff[..., 1]) ** a)


def _grid(m, n):
    i, j = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
    return np.column_stack([i.ravel(), j.ravel()]).astype(float)


def _fbm2d_cholesky(hurst, m, n, rng):
    pts = _grid(m, n)[1:]  # origin is pinned to 0
    cov = fbm_covariance_2d(hurst, pts)
    L = linalg.cholesky(cov + 1e-12 * np.eye(len(pts)), lower=True)
    out = np.zeros(m * n)
    out[1:] = L @ rng.standard_normal(len(pts))
    return out.reshape(m, n)


def _stein_covariance(r, alpha, R):
    """Stationary covariance whose intrinsic part matches ``-r**alpha`` on r <= 1."""
    if alpha <= 1.5:
        beta, c2 = 0.0, alpha / 2
        c0 = 1 - alpha / 2
    else:
        beta = alpha * (2 - alpha) / (3 * R * (R ** 2 - 1))
        c2 = (alpha - beta * (R - 1) ** 2 * (R + 2)) / 2
        c0 = beta * (R - 1) ** 3 + 1 - c2
    out = np.zeros_like(r)
    inner = r <= 1
    out[inner] = c0 - r[inner] ** alpha + c2 * r[inner] ** 2
    if beta > 0:
        mid = (r > 1) & (r <= R)
        out[mid] = beta * (R - r[mid]) ** 3 / r[mid]
    return out, c2


def _fbm2d_embedding(hurst, m, n, rng):
    # Stein (2002): exact embedding on [0, R]^2, R = 1 for 2H <= 1.5 else 2.
    alpha = 2.0 * hurst
    R = 1.0 if alpha <= 1.5 else 2.0
    N = max(m, n)
    K = N if R == 1.0 else 2 * N
    delta = R / K
    x = np.arange(K + 1) * delta
    r = np.hypot(x[:, None], x[None, :])
    rows, c2 = _stein_covariance(r, alpha, R)
    circ = np.block([[rows, rows[:, -2:0:-1]], [rows[-2:0:-1, :], rows[-2:0:-1, -2:0:-1]]])
    lam = np.fft.fft2(circ).real
    if lam.min() < -NEG_EIG_TOL * lam.max():
        raise EmbeddingError(f"2-D embedding not nonnegative (min eigenvalue {lam.min():.3e})")
    lam = np.clip(lam, 0.0, None) / circ.size
    z = rng.standard_normal(circ.shape) + 1j * rng.standard_normal(circ.shape)
    field = np.fft.fft2(np.sqrt(lam) * z).real[:m, :n]
    field = field - field[0, 0]
    ti = np.arange(m)[:, None] * delta
    tj = np.arange(n)[None, :] * delta
    z1, z2 = rng.standard_normal(2)
    field = field + np.sqrt(2 * c2) * (ti * z1 + tj * z2)
    # the construction has twice the fBm covariance at grid spacing delta
    return field / math.sqrt(2.0) * delta ** (-hurst)


def simulate_fbm_2d(spec: FbmSpec, method: str = "auto") -> np.ndarray:
    """Isotropic 2-D fBm on an ``m x n`` unit-spaced grid with ``B(0, 0) = 0``.

    The variance of a unit-lag increment is 1.  ``method`` is ``"cholesky"``,
    ``"embedding"`` or ``"auto"`` (Cholesky for at most ``CHOLESKY_MAX`` points).
    """
    m, n = spec.m, spec.n if spec.n is not None else spec.m
    if m * n > MAX_2D_SIZE:
        raise ValueError(f"{m}x{n} exceeds the 2-D simulation limit of {MAX_2D_SIZE} points")
    if method == "auto":
        method = "cholesky" if m * n <= CHOLESKY_MAX else "embedding"
    rng = spec.rng()
    if method == "cholesky":
        return _fbm2d_cholesky(spec.hurst, m, n, rng)
    if method == "embedding":
        return _fbm2d_embedding(spec.hurst, m, n, rng)
    raise ValueError(f"unknown method {method!r}")
