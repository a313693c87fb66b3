"""Matrix-based non-decimated complex wavelet transform of 1-D signals.

The transform matrix ``W`` stacks ``p + 1`` square blocks of size ``m``:

    [ smooth at J-p | detail J-p | detail J-p+1 | ... | detail J-1 ]

Each block is a product of periodic (wrapped-index) filtering matrices, one per
cascade step, with the step-``l`` filters dilated by ``2**(l-1)``.  Because all
blocks are circulant, the same transform can be computed with FFTs; long
signals use that route instead of a dense matrix.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .filters import ComplexFilterPair, get_filter

__all__ = [
    "Coefficients1D",
    "DepthError",
    "LengthMismatchError",
    "SignalTooShortError",
    "TransformPlan1D",
    "build_plan_1d",
    "forward_1d",
    "inverse_1d",
    "max_depth",
    "weight_diagonal",
]

# Dense W is kept only while it fits in this many bytes.
DENSE_BUDGET = 256 * 2 ** 20


class DepthError(ValueError):
    pass


class SignalTooShortError(ValueError):
    pass


class LengthMismatchError(ValueError):
    pass


def max_depth(m: int) -> int:
    """``J = ceil(log2 m)``; also the largest admissible depth."""
    if m < 1:
        raise SignalTooShortError("signal length must be positive")
    return int(math.ceil(math.log2(m))) if m > 1 else 0


def weight_diagonal(m: int, p: int) -> np.ndarray:
    """Diagonal of the weight matrix T: 1/2**p for 2m entries, then 1/2**(p-1) ... 1/2."""
    w = [np.full(2 * m, 0.5 ** p)]
    w += [np.full(m, 0.5 ** l) for l in range(p - 1, 0, -1)]
    return np.concatenate(w)


def _tap_positions(taps, offset, dilation, m):
    """Column shifts (mod m) of the taps of a dilated filter."""
    return (dilation * (np.arange(len(taps)) + offset)) % m


def level_matrix(taps, offset: int, step: int, m: int) -> sp.csr_matrix:
    """Periodic filtering matrix for cascade step ``step`` (1 = finest).

    ``(C x)[k] = sum_i taps[i] * x[(k - 2**(step-1) * (i + offset)) mod m]``;
    taps that wrap onto the same column are summed.
    """
    dil = 2 ** (step - 1)
    shifts = _tap_positions(taps, offset, dil, m)
    rows = np.repeat(np.arange(m), len(taps))
    cols = (rows - np.tile(shifts, m)) % m
    vals = np.tile(np.asarray(taps, dtype=np.complex128), m)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))


def level_eigenvalues(taps, offset: int, step: int, m: int) -> np.ndarray:
    """DFT eigenvalues of :func:`level_matrix` (first column, transformed)."""
    col = np.zeros(m, dtype=np.complex128)
    np.add.at(col, _tap_positions(taps, offset, 2 ** (step - 1), m), taps)
    return np.fft.fft(col)


@dataclass(frozen=True, eq=False)
class TransformPlan1D:
    """Everything needed to transform length-``m`` signals to depth ``p``.

    ``W`` is ``None`` when the dense matrix would exceed the memory budget;
    ``eigs`` (shape ``(p+1, m)``) always holds the circulant eigenvalues of
    every block, in the same order as the rows of ``W``.
    """

    m: int
    p: int
    filter: ComplexFilterPair
    J: int
    weights: np.ndarray
    eigs: np.ndarray
    W: np.ndarray | None = None

    @property
    def J0(self) -> int:
        return self.J - self.p

    @property
    def dense(self) -> bool:
        return self.W is not None

    @property
    def levels(self) -> list:
        """Detail levels, coarsest first (block order)."""
        return list(range(self.J0, self.J))

    @property
    def block_weights(self) -> np.ndarray:
        return self.weights[:: self.m]

    @property
    def T(self) -> np.ndarray:
        return np.diag(self.weights)

    def block_of(self, j: int) -> int:
        if not self.J0 <= j < self.J:
            raise KeyError(f"level {j} outside {self.J0}..{self.J - 1}")
        return j - self.J0 + 1

    def matrix(self) -> np.ndarray:
        """Dense W, built on demand if the plan uses the FFT route."""
        if self.W is not None:
            return self.W
        return _dense_from_eigs(self.eigs)


def _dense_from_eigs(eigs):
    p1, m = eigs.shape
    cols = np.fft.ifft(eigs, axis=1)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return np.concatenate([c[idx] for c in cols])


def _build_dense(flt: ComplexFilterPair, m: int, p: int) -> np.ndarray:
    W = np.empty(((p + 1) * m, m), dtype=np.complex128)
    prefix = np.eye(m, dtype=np.complex128)
    for step in range(1, p + 1):
        G = level_matrix(flt.g, flt.g_offset, step, m)
        H = level_matrix(flt.h, flt.h_offset, step, m)
        b = p + 1 - step
        W[b * m:(b + 1) * m] = G @ prefix
        prefix = H @ prefix
    W[:m] = prefix
    return W


def _build_eigs(flt: ComplexFilterPair, m: int, p: int) -> np.ndarray:
    eigs = np.empty((p + 1, m), dtype=np.complex128)
    prefix = np.ones(m, dtype=np.complex128)
    for step in range(1, p + 1):
        eigs[p + 1 - step] = level_eigenvalues(flt.g, flt.g_offset, step, m) * prefix
        prefix = prefix * level_eigenvalues(flt.h, flt.h_offset, step, m)
    eigs[0] = prefix
    return eigs


@functools.lru_cache(maxsize=32)
def _cached_plan(m, p, flt, dense):
    J = max_depth(m)
    eigs = _build_eigs(flt, m, p)
    eigs.setflags(write=False)
    W = None
    if dense:
        W = _build_dense(flt, m, p)
        W.setflags(write=False)
    weights = weight_diagonal(m, p)
    weights.setflags(write=False)
    return TransformPlan1D(m, p, flt, J, weights, eigs, W)


def build_plan_1d(m: int, p: int, filter="cdaub6", dense: bool | None = None) -> TransformPlan1D:
    """Build (or fetch from cache) the transform plan for length ``m``, depth ``p``.

    ``dense=None`` picks the dense matrix when it fits in ``DENSE_BUDGET``.
    """
    flt = get_filter(filter)
    m, p = int(m), int(p)
    if m < max(flt.length, 2):
        raise SignalTooShortError(
            f"signal length {m} is shorter than the {flt.length}-tap filter {flt.name!r}"
        )
    J = max_depth(m)
    if p < 1 or p > J:
        raise DepthError(f"depth {p} outside 1..{J} (ceil(log2 {m}))")
    if dense is None:
        dense = (p + 1) * m * m * 16 <= DENSE_BUDGET
    return _cached_plan(m, p, flt, bool(dense))


@dataclass(frozen=True, eq=False)
class Coefficients1D:
    """Stacked coefficients, ``data[0]`` smooth then details coarsest to finest."""

    data: np.ndarray
    m: int
    p: int
    filter: str
    J: int

    @property
    def J0(self) -> int:
        return self.J - self.p

    @property
    def levels(self) -> list:
        return list(range(self.J0, self.J))

    @property
    def smooth(self) -> np.ndarray:
        return self.data[0]

    @property
    def detail(self) -> dict:
        return {j: self.data[j - self.J0 + 1] for j in self.levels}

    def level(self, j: int) -> np.ndarray:
        return self.data[j - self.J0 + 1]

    @property
    def size(self) -> int:
        return self.data.size

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    def meta(self) -> dict:
        return {"m": self.m, "p": self.p, "filter": self.filter, "J": self.J, "J0": self.J0}

    @classmethod
    def from_flat(cls, d, plan: TransformPlan1D) -> "Coefficients1D":
        d = np.asarray(d)
        if d.shape != ((plan.p + 1) * plan.m,):
            raise LengthMismatchError(
                f"expected {(plan.p + 1) * plan.m} coefficients, got shape {d.shape}"
            )
        return cls(d.reshape(plan.p + 1, plan.m), plan.m, plan.p, plan.filter.name, plan.J)


def analyze(plan: TransformPlan1D, y) -> np.ndarray:
    """Raw forward transform: returns an array of shape ``(p+1, m) + y.shape[1:]``.

    ``y`` may carry trailing batch axes (signals along axis 0).
    """
    y = np.asarray(y)
    if y.shape[:1] != (plan.m,):
        raise LengthMismatchError(f"signal length {y.shape[:1]} does not match plan length {plan.m}")
    if plan.W is not None:
        d = plan.W @ y
        return d.reshape((plan.p + 1, plan.m) + y.shape[1:])
    Y = np.fft.fft(y, axis=0)
    e = plan.eigs.reshape(plan.eigs.shape + (1,) * (y.ndim - 1))
    return np.fft.ifft(e * Y[None], axis=1)


def synthesize(plan: TransformPlan1D, d) -> np.ndarray:
    """Raw inverse: ``W^H T d`` for ``d`` of shape ``(p+1, m) + batch``."""
    d = np.asarray(d)
    if d.shape[:2] != (plan.p + 1, plan.m):
        raise LengthMismatchError(
            f"coefficient shape {d.shape[:2]} does not match plan ({plan.p + 1}, {plan.m})"
        )
    bw = plan.block_weights.reshape((-1,) + (1,) * (d.ndim - 1))
    wd = bw * d
    if plan.W is not None:
        flat = wd.reshape(((plan.p + 1) * plan.m,) + d.shape[2:])
        # W^H x == conj(W^T conj(x)); avoids materialising W^H
        return (plan.W.T @ flat.conj()).conj()
    e = plan.eigs.reshape(plan.eigs.shape + (1,) * (d.ndim - 2))
    return np.fft.ifft(np.sum(e.conj() * np.fft.fft(wd, axis=1), axis=0), axis=0)


def forward_1d(plan: TransformPlan1D, y) -> Coefficients1D:
    """``d = W y`` split into smooth and per-level detail vectors."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise LengthMismatchError(f"expected a 1-D signal, got shape {y.shape}")
    d = analyze(plan, y)
    return Coefficients1D(d, plan.m, plan.p, plan.filter.name, plan.J)


def inverse_1d(plan: TransformPlan1D, coeffs) -> np.ndarray:
    """Perfect reconstruction ``y = W^H T d``."""
    if isinstance(coeffs, Coefficients1D):
        if (coeffs.m, coeffs.p) != (plan.m, plan.p):
            raise LengthMismatchError(
                f"coefficients (m={coeffs.m}, p={coeffs.p}) do not match plan "
                f"(m={plan.m}, p={plan.p})"
            )
        d = coeffs.data
    else:
        d = np.asarray(coeffs)
        if d.ndim == 1:
            d = Coefficients1D.from_flat(d, plan).data
    return synthesize(plan, d)
