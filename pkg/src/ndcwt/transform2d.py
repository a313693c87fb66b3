"""Scale-mixing 2-D non-decimated complex wavelet transform.

``B = W_m A W_n^H`` for an ``m x n`` image ``A``; the result has
``(p1 + 1) m`` rows and ``(p2 + 1) n`` columns.  Row block ``a`` and column
block ``b`` index the pair of scales (smooth or detail level per axis), so the
``(j1, j2)`` detail block is ``B[rows of j1, cols of j2]``.

Levels are labelled ``j = J - step`` on both axes with
``J = ceil(log2(min(m, n)))``, so equal labels mean equal dilation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filters import get_filter
from .transform1d import LengthMismatchError, TransformPlan1D, build_plan_1d

__all__ = [
    "Coefficients2D",
    "ShiftRangeError",
    "TransformPlan2D",
    "build_plan_2d",
    "diagonal_blocks",
    "forward_2d",
    "inverse_2d",
]


class ShiftRangeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TransformPlan2D:
    m: int
    n: int
    p1: int
    p2: int
    row_plan: TransformPlan1D
    col_plan: TransformPlan1D

    @property
    def J(self) -> int:
        return int(math.ceil(math.log2(min(self.m, self.n))))

    @property
    def shape(self) -> tuple:
        return ((self.p1 + 1) * self.m, (self.p2 + 1) * self.n)

    @property
    def filter_name(self) -> str:
        a, b = self.row_plan.filter.name, self.col_plan.filter.name
        return a if a == b else f"{a}/{b}"


def build_plan_2d(m, n, p1, p2, filter="cdaub6", col_filter=None, dense=None) -> TransformPlan2D:
    """Compose two 1-D plans; ``col_filter`` defaults to the row filter."""
    flt = get_filter(filter)
    cflt = flt if col_filter is None else get_filter(col_filter)
    row_plan = build_plan_1d(m, p1, flt, dense=dense)
    col_plan = build_plan_1d(n, p2, cflt, dense=dense)
    return TransformPlan2D(int(m), int(n), int(p1), int(p2), row_plan, col_plan)


@dataclass(frozen=True, eq=False)
class Coefficients2D:
    """Coefficient matrix ``B`` with an explicit block index.

    ``index`` maps ``(row_key, col_key)`` to ``(row_slice, col_slice)``; a key
    is ``"smooth"`` or a detail level ``j``.
    """

    B: np.ndarray
    m: int
    n: int
    p1: int
    p2: int
    filter: str
    J: int
    index: dict

    @property
    def J01(self) -> int:
        return self.J - self.p1

    @property
    def J02(self) -> int:
        return self.J - self.p2

    @property
    def row_levels(self) -> list:
        return list(range(self.J01, self.J))

    @property
    def col_levels(self) -> list:
        return list(range(self.J02, self.J))

    def block(self, r, c) -> np.ndarray:
        rs, cs = self.index[(r, c)]
        return self.B[rs, cs]

    def meta(self) -> dict:
        return {
            "m": self.m, "n": self.n, "p1": self.p1, "p2": self.p2,
            "filter": self.filter, "J": self.J, "J01": self.J01, "J02": self.J02,
        }


def _block_index(m, n, p1, p2, J):
    def keys(p):
        return ["smooth"] + list(range(J - p, J))

    index = {}
    for a, rk in enumerate(keys(p1)):
        for b, ck in enumerate(keys(p2)):
            index[(rk, ck)] = (slice(a * m, (a + 1) * m), slice(b * n, (b + 1) * n))
    return index


def _left(plan: TransformPlan1D, A):
    """``W A`` as a dense ``((p+1) m, k)`` array."""
    if plan.W is not None:
        return plan.W @ A
    X = np.fft.fft(A, axis=0)
    out = np.fft.ifft(plan.eigs[:, :, None] * X[None], axis=1)
    return out.reshape((plan.p + 1) * plan.m, -1)


def _right_h(plan: TransformPlan1D, X):
    """``X W^H`` for ``X`` of shape ``(k, n)``."""
    if plan.W is not None:
        return X @ plan.W.conj().T
    F = np.fft.fft(X.conj(), axis=1)
    out = np.fft.ifft(plan.eigs[:, None, :] * F[None], axis=2).conj()
    return np.concatenate(list(out), axis=1)


def forward_2d(plan: TransformPlan2D, A) -> Coefficients2D:
    A = np.asarray(A)
    if A.shape != (plan.m, plan.n):
        raise LengthMismatchError(f"image shape {A.shape} does not match plan ({plan.m}, {plan.n})")
    B = _right_h(plan.col_plan, _left(plan.row_plan, A))
    J = plan.J
    return Coefficients2D(
        B, plan.m, plan.n, plan.p1, plan.p2, plan.filter_name, J,
        _block_index(plan.m, plan.n, plan.p1, plan.p2, J),
    )


def inverse_2d(plan: TransformPlan2D, coeffs) -> np.ndarray:
    """``A = W_m^H T_m B T_n W_n``."""
    B = coeffs.B if isinstance(coeffs, Coefficients2D) else np.asarray(coeffs)
    if B.shape != plan.shape:
        raise LengthMismatchError(f"coefficient shape {B.shape} does not match plan {plan.shape}")
    rp, cp = plan.row_plan, plan.col_plan
    X = (rp.weights[:, None] * B) * cp.weights[None, :]
    # W_m^H X: row synthesis on each column of X
    Y = _synth_left(rp, X)
    # Y W_n = (W_n^H Y^H)^H
    return _synth_left(cp, Y.conj().T).conj().T


def _synth_left(plan: TransformPlan1D, X):
    if plan.W is not None:
        return (plan.W.T @ X.conj()).conj()
    d = X.reshape(plan.p + 1, plan.m, -1)
    F = np.fft.fft(d, axis=1)
    return np.fft.ifft(np.sum(plan.eigs.conj()[:, :, None] * F, axis=0), axis=0)


def diagonal_blocks(coeffs: Coefficients2D, s: int = 0) -> list:
    """``[(j, d_(j, j+s))]`` ordered finest to coarsest."""
    s = int(s)
    out = []
    for j in reversed(coeffs.row_levels):
        if coeffs.J02 <= j + s < coeffs.J:
            out.append((j, coeffs.block(j, j + s)))
    if not out:
        raise ShiftRangeError(
            f"shift {s} leaves no (j, j+s) pair within rows {coeffs.J01}..{coeffs.J - 1} "
            f"and columns {coeffs.J02}..{coeffs.J - 1}"
        )
    return out
