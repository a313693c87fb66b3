"""Reference implementations used to cross-check the matrix transforms.

These are deliberately naive: a time-domain à-trous cascade with explicit
dilated filters and ``np.roll``, and a 2-D version made of sequential 1-D
passes.  They share no code with the matrix or FFT routes.
"""

import numpy as np

from .filters import dilate_filter, get_filter


def _circular_filter(x, taps, offset, step):
    """``out[k] = sum_i taps[i] * x[k - 2**(step-1) * (i + offset)]`` along axis 0."""
    dil = 2 ** (step - 1)
    f = dilate_filter(np.asarray(taps), step - 1)
    out = np.zeros(x.shape, dtype=np.complex128)
    for pos, tap in enumerate(f):
        if tap != 0:
            out += tap * np.roll(x, dil * offset + pos, axis=0)
    return out


def atrous_1d(y, filter, p):
    """Stacked ``(p+1, m, ...)`` coefficients: smooth, then details coarsest first."""
    flt = get_filter(filter)
    c = np.asarray(y, dtype=np.complex128)
    details = []
    for step in range(1, p + 1):
        details.append(_circular_filter(c, flt.g, flt.g_offset, step))
        c = _circular_filter(c, flt.h, flt.h_offset, step)
    return np.stack([c] + details[::-1])


def sequential_2d(A, filter, p1, p2, col_filter=None):
    """``W_m A W_n^H`` from a column cascade followed by a conjugated row cascade."""
    A = np.asarray(A)
    m, n = A.shape
    X = atrous_1d(A, filter, p1).reshape((p1 + 1) * m, n)
    # X W^H row by row: conj(W conj(x)) for each row x
    Y = atrous_1d(X.conj().T, col_filter or filter, p2).conj()  # (p2+1, n, rows)
    return np.concatenate([blk.T for blk in Y], axis=1)
