"""Modulus-based wavelet spectra (2nd-order logscale diagrams) and Hurst estimates.

For each detail level ``j`` the diagram holds ``log2(mean(|d_j|**2))``.  A line
fitted to ``(j, S(j))`` has slope ``-(2H + 1)`` for 1-D self-similar signals and
``-(2H + 2)`` on the main diagonal of the scale-mixing 2-D transform.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .transform1d import Coefficients1D

__all__ = [
    "DegenerateSpectrumWarning",
    "InsufficientLevelsError",
    "LogscaleDiagram",
    "SpectrumFit",
    "fit_spectrum",
    "hurst_from_slope",
    "logscale_1d",
    "logscale_2d",
    "parse_level_range",
    "spectrum",
]

FIT_METHODS = ("ols", "wls", "robust")
_ALIASES = {"weighted": "wls", "theil-sen": "robust", "theilsen": "robust"}


class InsufficientLevelsError(ValueError):
    pass


class DegenerateSpectrumWarning(RuntimeWarning):
    pass


@dataclass
class LogscaleDiagram:
    levels: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    mode: str = "1d"
    shift: int | None = None
    J: int | None = None
    q: int = 2

    @property
    def points(self) -> list:
        return [(int(j), float(s)) for j, s in zip(self.levels, self.values)]

    @property
    def usable(self) -> np.ndarray:
        return np.isfinite(self.values)

    @property
    def degenerate_levels(self) -> list:
        return [int(j) for j in self.levels[~self.usable]]

    def effective_counts(self) -> np.ndarray:
        """Coefficient counts deflated by the redundancy of each level."""
        if self.J is None:
            return self.counts.astype(float)
        dim = 1 if self.mode == "1d" else 2
        return self.counts / 2.0 ** (dim * (self.J - self.levels))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "shift": self.shift,
            "q": self.q,
            "points": [
                {"level": j, "log2_energy": (s if np.isfinite(s) else None), "count": int(c)}
                for (j, s), c in zip(self.points, self.counts)
            ],
        }


@dataclass
class SpectrumFit:
    slope: float
    intercept: float
    hurst: float
    level_range: tuple
    method: str
    mode: str
    levels: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "hurst": self.hurst,
            "level_range": list(self.level_range),
            "method": self.method,
            "mode": self.mode,
            "residuals": {int(j): float(r) for j, r in zip(self.levels, self.residuals)},
        }


def hurst_from_slope(slope: float, mode: str = "1d") -> float:
    if mode == "1d":
        return -(slope + 1.0) / 2.0
    return -(slope + 2.0) / 2.0


# Level energies below this fraction of the mean energy of the whole
# coefficient stack count as zero (round-off on constant inputs).
ZERO_ENERGY_RTOL = 1e-24


def _log2_energy(blocks, reference):
    energy = np.array([np.mean(np.abs(b) ** 2) for b in blocks])
    energy[energy <= ZERO_ENERGY_RTOL * reference] = 0.0
    with np.errstate(divide="ignore"):
        return np.log2(energy)


def logscale_1d(coeffs: Coefficients1D) -> LogscaleDiagram:
    levels = np.array(coeffs.levels)
    blocks = [coeffs.level(j) for j in levels]
    return LogscaleDiagram(
        levels=levels,
        values=_log2_energy(blocks, np.mean(np.abs(coeffs.data) ** 2)),
        counts=np.full(len(levels), coeffs.m),
        mode="1d",
        J=coeffs.J,
    )


def logscale_2d(coeffs, s: int = 0) -> LogscaleDiagram:
    """Diagram over the ``(j, j + s)`` hierarchy of a 2-D coefficient set."""
    from .transform2d import diagonal_blocks

    blocks = diagonal_blocks(coeffs, s)[::-1]  # coarsest first
    levels = np.array([j for j, _ in blocks])
    return LogscaleDiagram(
        levels=levels,
        values=_log2_energy([b for _, b in blocks], np.mean(np.abs(coeffs.B) ** 2)),
        counts=np.full(len(levels), coeffs.m * coeffs.n),
        mode="2d",
        shift=s,
        J=coeffs.J,
    )


def parse_level_range(text):
    """``"a:b"`` -> ``(a, b)``; either end may be empty."""
    if text is None or text == "":
        return None
    lo, sep, hi = str(text).partition(":")
    if not sep:
        raise ValueError(f"level range {text!r} must look like 'a:b'")
    return (int(lo) if lo.strip() else None, int(hi) if hi.strip() else None)


def fit_spectrum(diagram: LogscaleDiagram, level_range=None, method: str = "ols") -> SpectrumFit:
    """Regress ``S(j)`` on ``j`` over ``level_range`` (inclusive) and map slope to H."""
    method = _ALIASES.get(method, method)
    if method not in FIT_METHODS:
        raise ValueError(f"unknown fit method {method!r}; choose from {', '.join(FIT_METHODS)}")
    lo, hi = level_range if level_range is not None else (None, None)
    lo = diagram.levels.min() if lo is None else lo
    hi = diagram.levels.max() if hi is None else hi
    sel = (diagram.levels >= lo) & (diagram.levels <= hi)
    dropped = sel & ~diagram.usable
    if dropped.any():
        warnings.warn(
            f"zero-energy levels {diagram.levels[dropped].tolist()} excluded from fit",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    sel &= diagram.usable
    x = diagram.levels[sel].astype(float)
    y = diagram.values[sel]
    if len(x) < 2:
        raise InsufficientLevelsError(
            f"need at least 2 usable levels in {lo}..{hi}, have {len(x)}"
        )

    if method == "ols":
        slope, intercept = np.polyfit(x, y, 1)
    elif method == "wls":
        # np.polyfit weights multiply residuals, so pass sqrt of the variance weights
        w = np.sqrt(diagram.effective_counts()[sel])
        slope, intercept = np.polyfit(x, y, 1, w=w)
    else:
        res = stats.theilslopes(y, x)
        slope, intercept = res[0], res[1]
    slope, intercept = float(slope), float(intercept)
    return SpectrumFit(
        slope=slope,
        intercept=intercept,
        hurst=hurst_from_slope(slope, diagram.mode),
        level_range=(int(lo), int(hi)),
        method=method,
        mode=diagram.mode,
        levels=x.astype(int),
        residuals=y - (slope * x + intercept),
    )


def spectrum(coeffs, level_range=None, method="ols", s=0):
    """Diagram and fit in one call; picks the 1-D or 2-D diagram from ``coeffs``."""
    if isinstance(coeffs, Coefficients1D):
        diagram = logscale_1d(coeffs)
    else:
        diagram = logscale_2d(coeffs, s)
    return diagram, fit_spectrum(diagram, level_range, method)
