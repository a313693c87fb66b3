"""Complex scaling/wavelet filter pairs.

Filters are stored as tap arrays together with the integer index of their
first tap (``support_offset``), so the quadrature-mirror relation

    g[k] = (-1)**k * conj(h[1 - k])

can be evaluated on true indices instead of array positions.  Low-pass taps
are normalised so that ``sum(h) == sqrt(2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ComplexFilterPair",
    "FilterError",
    "UnknownFilterError",
    "available_filters",
    "check_invariants",
    "derive_highpass",
    "dilate_filter",
    "get_filter",
    "load_filter_file",
    "make_pair",
    "register_filter",
]

SQRT2 = np.sqrt(2.0)


class FilterError(ValueError):
    """Raised when a filter pair violates one of the QMF invariants."""


class UnknownFilterError(KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(
            f"unknown filter {name!r}; available: {', '.join(available_filters())}"
        )

    def __str__(self):
        return self.args[0]


@dataclass(frozen=True, eq=False)
class ComplexFilterPair:
    """Low-pass ``h`` and high-pass ``g`` taps of an orthonormal complex wavelet.

    ``h_offset`` / ``g_offset`` are the integer indices of ``h[0]`` / ``g[0]``.
    ``support_offset`` is an alias for ``h_offset``.
    """

    name: str
    h: np.ndarray
    g: np.ndarray
    h_offset: int = 0
    g_offset: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        h = np.array(self.h, dtype=np.complex128)
        g = np.array(self.g, dtype=np.complex128)
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    @property
    def support_offset(self) -> int:
        return self.h_offset

    @property
    def length(self) -> int:
        return len(self.h)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.h.imag == 0) and np.all(self.g.imag == 0))

    def h_indices(self) -> np.ndarray:
        return np.arange(len(self.h)) + self.h_offset

    def g_indices(self) -> np.ndarray:
        return np.arange(len(self.g)) + self.g_offset

    def conj(self) -> "ComplexFilterPair":
        return ComplexFilterPair(
            self.name + "*", self.h.conj(), self.g.conj(), self.h_offset, self.g_offset
        )


def derive_highpass(h, offset: int = 0):
    """Return ``(g, g_offset)`` with ``g[k] = (-1)**k * conj(h[1 - k])``.

    ``offset`` is the index of ``h[0]``.  For taps on ``offset .. offset+L-1``
    the high-pass lives on ``2 - offset - L .. 1 - offset``.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.size == 0:
        raise ValueError("empty filter")
    L = len(h)
    g_offset = 2 - offset - L
    k = np.arange(L) + g_offset
    # h index 1 - k runs backwards through the stored taps
    g = (-1.0) ** (k % 2) * np.conj(h[(1 - k) - offset])
    return g, g_offset


def dilate_filter(f, level: int) -> np.ndarray:
    """Insert ``2**level - 1`` zeros between consecutive taps."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    f = np.asarray(f)
    if level == 0 or len(f) <= 1:
        return f.copy()
    step = 2 ** level
    out = np.zeros((len(f) - 1) * step + 1, dtype=f.dtype)
    out[::step] = f
    return out


def check_invariants(pair: ComplexFilterPair, tol: float = 1e-10) -> dict:
    """Evaluate the five QMF invariants; returns the worst residual of each.

    Raises ``FilterError`` if any residual is above tolerance (``1e-12`` for
    the high-pass relation, ``tol`` for the rest).
    """
    h, g = pair.h, pair.g
    res = {}
    res["length"] = float(abs(len(h) - len(g)))
    g_expected, g_off = derive_highpass(h, pair.h_offset)
    if len(g) != len(g_expected) or g_off != pair.g_offset:
        res["highpass"] = np.inf
    else:
        res["highpass"] = float(np.max(np.abs(g - g_expected)))
    res["lowpass_sum"] = float(abs(h.sum() - SQRT2))
    L = len(h)
    worst = 0.0
    for shift in range(-(L // 2), L // 2 + 1):
        lo, hi = max(0, -2 * shift), min(L, L - 2 * shift)
        s = np.sum(h[lo:hi] * np.conj(h[lo + 2 * shift:hi + 2 * shift])) if hi > lo else 0.0
        worst = max(worst, abs(s - (1.0 if shift == 0 else 0.0)))
    res["orthonormality"] = float(worst)
    res["highpass_sum"] = float(abs(g.sum()))

    bad = [k for k, v in res.items() if v > (1e-12 if k == "highpass" else tol)]
    if bad:
        raise FilterError(f"filter {pair.name!r} fails invariants: {', '.join(bad)} ({res})")
    return res


def make_pair(name: str, h, offset: int = 0, meta=None) -> ComplexFilterPair:
    """Build a pair from low-pass taps and validate it."""
    g, g_offset = derive_highpass(h, offset)
    pair = ComplexFilterPair(name, h, g, offset, g_offset, dict(meta or {}))
    check_invariants(pair)
    return pair


def _haar():
    return make_pair("haar", [1 / SQRT2, 1 / SQRT2], meta={"id": 1})


def _cdaub6():
    # Symmetric complex Daubechies, 6 taps (3 vanishing moments), in closed form.
    s = np.sqrt(15.0)
    taps = np.array([-3 - 1j * s, 5 - 1j * s, 30 + 2j * s,
                     30 + 2j * s, 5 - 1j * s, -3 - 1j * s]) / (32 * SQRT2)
    return make_pair("cdaub6", taps, meta={"id": 2, "vanishing_moments": 3})


_REGISTRY: dict = {}
_FACTORIES = {"haar": _haar, "cdaub6": _cdaub6}


def available_filters():
    return sorted(set(_FACTORIES) | set(_REGISTRY))


def register_filter(pair: ComplexFilterPair) -> None:
    check_invariants(pair)
    _REGISTRY[pair.name] = pair


def get_filter(name) -> ComplexFilterPair:
    if isinstance(name, ComplexFilterPair):
        return name
    key = str(name).lower()
    if key not in _REGISTRY:
        if key not in _FACTORIES:
            raise UnknownFilterError(name)
        _REGISTRY[key] = _FACTORIES[key]()
    return _REGISTRY[key]


def load_filter_file(path, name=None, offset: int = 0) -> ComplexFilterPair:
    """Read low-pass taps from a text file of ``re im`` pairs, one per line."""
    taps = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) == 1:
                parts.append("0")
            if len(parts) != 2:
                raise FilterError(f"{path}:{lineno}: expected 're im', got {line!r}")
            try:
                taps.append(complex(float(parts[0]), float(parts[1])))
            except ValueError:
                raise FilterError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not taps:
        raise FilterError(f"{path}: no taps")
    if name is None:
        import os

        name = os.path.splitext(os.path.basename(str(path)))[0]
    return make_pair(name, taps, offset, meta={"source": str(path)})
