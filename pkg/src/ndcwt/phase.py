"""Per-level phase averages of complex wavelet coefficients.

The phase of a coefficient is its four-quadrant angle on ``(-pi, pi]`` and the
level descriptor is the plain arithmetic mean of those angles over all
coefficients of the level.  Exact zeros get phase 0 and are counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transform1d import Coefficients1D

__all__ = [
    "PhaseSummary",
    "coefficient_phase",
    "phase_averages",
    "phase_averages_1d",
    "phase_averages_2d",
    "phases",
]


def phases(z) -> tuple:
    """Elementwise phase on ``(-pi, pi]`` and a boolean mask of zero coefficients."""
    z = np.asarray(z)
    zero = z == 0
    ang = np.angle(z)
    # np.angle gives -pi for (-x, -0.0); fold onto the closed end of the branch
    ang = np.where(ang == -np.pi, np.pi, ang)
    return np.where(zero, 0.0, ang), zero


def coefficient_phase(z) -> tuple:
    """``(angle, degenerate)`` for a single complex number."""
    ang, zero = phases(complex(z))
    return float(ang), bool(zero)


@dataclass
class PhaseSummary:
    levels: np.ndarray
    means: np.ndarray
    counts: np.ndarray
    zero_counts: np.ndarray
    mode: str = "1d"
    shift: int | None = None
    statistic: str = "arithmetic"

    @property
    def per_level(self) -> dict:
        return {int(j): float(v) for j, v in zip(self.levels, self.means)}

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "shift": self.shift,
            "statistic": self.statistic,
            "levels": [
                {"level": int(j), "mean": float(v), "count": int(c), "zero_flags": int(z)}
                for j, v, c, z in zip(self.levels, self.means, self.counts, self.zero_counts)
            ],
        }


def _level_mean(block, statistic):
    ang, zero = phases(block)
    if statistic == "arithmetic":
        return ang.mean(), int(zero.sum())
    if statistic == "circular":
        return float(np.angle(np.mean(np.exp(1j * ang)))), int(zero.sum())
    raise ValueError(f"unknown phase statistic {statistic!r}")


def _summary(levels, blocks, count, mode, shift, statistic):
    res = [_level_mean(b, statistic) for b in blocks]
    return PhaseSummary(
        levels=np.asarray(levels),
        means=np.array([r[0] for r in res]),
        counts=np.full(len(levels), count),
        zero_counts=np.array([r[1] for r in res]),
        mode=mode,
        shift=shift,
        statistic=statistic,
    )


def phase_averages_1d(coeffs: Coefficients1D, statistic: str = "arithmetic") -> PhaseSummary:
    """Mean phase of every detail level, coarsest level first."""
    levels = coeffs.levels
    return _summary(levels, [coeffs.level(j) for j in levels], coeffs.m, "1d", None, statistic)


def phase_averages_2d(coeffs, s: int = 0, statistic: str = "arithmetic") -> PhaseSummary:
    from .transform2d import diagonal_blocks

    blocks = diagonal_blocks(coeffs, s)[::-1]
    return _summary(
        [j for j, _ in blocks], [b for _, b in blocks], coeffs.m * coeffs.n, "2d", s, statistic
    )


def phase_averages(coeffs, s: int = 0, statistic: str = "arithmetic") -> PhaseSummary:
    if isinstance(coeffs, Coefficients1D):
        return phase_averages_1d(coeffs, statistic)
    return phase_averages_2d(coeffs, s, statistic)
