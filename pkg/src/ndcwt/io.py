"""File formats: CSV signals/matrices, PGM images, JSON results, binary coefficients.

Binary 2-D coefficient file (all fields little-endian)::

    offset  size  field
    0       8     magic  b"NDCWT2D\\0"
    8       4     uint32 format version (1)
    12      4     uint32 m      (image rows)
    16      4     uint32 n      (image columns)
    20      4     uint32 p1     (row depth)
    24      4     uint32 p2     (column depth)
    28      2     uint16 filter id (0 custom, 1 haar, 2 cdaub6)
    30      2     uint16 bytes per complex value (8 = complex64, 16 = complex128)
    32      ...   payload, row-major ((p1+1) m) x ((p2+1) n) complex values
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

MAGIC = b"NDCWT2D\0"
HEADER = struct.Struct("<8sIIIIIHH")
FORMAT_VERSION = 1
FILTER_IDS = {"haar": 1, "cdaub6": 2}
CONFIG_PREFIX = "# ndcwt-config: "


class FormatError(ValueError):
    pass


def atomic_write(path, data, mode="w"):
    """Write ``data`` to a temporary file next to ``path`` and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ndcwt-", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _finite(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def write_json(path, obj):
    text = json.dumps(_finite(json.loads(json.dumps(obj, default=_json_default))), indent=2)
    atomic_write(path, text + "\n")


def complex_pairs(z) -> list:
    z = np.asarray(z)
    return np.column_stack([z.real, z.imag]).tolist()


def _data_lines(path):
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                yield line


def read_signal(path) -> np.ndarray:
    """One sample per line, either ``x`` or ``re,im``."""
    rows = [line.replace(";", ",").split(",") for line in _data_lines(path)]
    if not rows:
        raise FormatError(f"{path}: no samples")
    try:
        if all(len(r) == 1 for r in rows):
            return np.array([float(r[0]) for r in rows])
        if all(len(r) == 2 for r in rows):
            return np.array([complex(float(a), float(b)) for a, b in rows])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    raise FormatError(f"{path}: expected one value or an 're,im' pair per line")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    for line in _data_lines(path):
        parts = line.replace(",", " ").split()
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: rows must be non-empty and of equal length")
    return np.array(rows)


def _pgm_tokens(buf, count, pos):
    tokens = []
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if buf[pos:pos + 1] == b"#":
            while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(buf[start:pos])
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """8- or 16-bit PGM (binary P5 or ASCII P2) as a float matrix."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic = buf[:2]
    if magic not in (b"P5", b"P2"):
        raise FormatError(f"{path}: not a PGM file")
    (w, h, maxval), pos = _pgm_tokens(buf, 3, 2)
    w, h, maxval = int(w), int(h), int(maxval)
    if magic == b"P2":
        vals, _ = _pgm_tokens(buf, w * h, pos)
        return np.array([int(v) for v in vals], dtype=float).reshape(h, w)
    pos += 1  # single whitespace after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = w * h * dtype.itemsize
    if len(buf) - pos < need:
        raise FormatError(f"{path}: truncated PGM payload")
    return np.frombuffer(buf, dtype=dtype, count=w * h, offset=pos).reshape(h, w).astype(float)


def write_pgm(path, img, maxval=None):
    img = np.asarray(img)
    maxval = int(maxval or max(int(img.max()), 1))
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode()
    atomic_write(path, header + np.clip(img, 0, maxval).astype(dtype).tobytes(), "wb")


def read_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head in (b"P5", b"P2"):
        return read_pgm(path)
    return read_matrix_csv(path)


def write_signal_csv(path, y, config=None):
    y = np.asarray(y)
    lines = []
    if config is not None:
        lines.append(CONFIG_PREFIX + json.dumps(config, default=_json_default, sort_keys=True))
    if np.iscomplexobj(y):
        lines += [f"{v.real!r},{v.imag!r}" for v in y.tolist()]
    else:
        lines += [repr(float(v)) for v in y]
    atomic_write(path, "\n".join(lines) + "\n")


def write_matrix_csv(path, A, config=None):
    lines = []
    if config is not None:
        lines.append(CONFIG_PREFIX + json.dumps(config, default=_json_default, sort_keys=True))
    lines += [",".join(repr(float(v)) for v in row) for row in np.asarray(A)]
    atomic_write(path, "\n".join(lines) + "\n")


def read_config(path):
    """Embedded config of a CSV written by this package, or ``None``."""
    with open(path) as fh:
        first = fh.readline()
    if first.startswith(CONFIG_PREFIX):
        return json.loads(first[len(CONFIG_PREFIX):])
    return None


def coeffs_to_bytes(B, m, n, p1, p2, filter_name, itemsize=16) -> bytes:
    if itemsize not in (8, 16):
        raise ValueError("itemsize must be 8 (complex64) or 16 (complex128)")
    B = np.asarray(B)
    if B.shape != ((p1 + 1) * m, (p2 + 1) * n):
        raise ValueError(f"coefficient shape {B.shape} inconsistent with header")
    header = HEADER.pack(MAGIC, FORMAT_VERSION, m, n, p1, p2, FILTER_IDS.get(filter_name, 0), itemsize)
    dtype = np.dtype("<c8") if itemsize == 8 else np.dtype("<c16")
    return header + np.ascontiguousarray(B, dtype=dtype).tobytes()


def write_coeffs_bin(path, coeffs, itemsize=16):
    data = coeffs_to_bytes(coeffs.B, coeffs.m, coeffs.n, coeffs.p1, coeffs.p2, coeffs.filter, itemsize)
    atomic_write(path, data, "wb")


def read_coeffs_bin(path) -> dict:
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < HEADER.size:
        raise FormatError(f"{path}: too short for a coefficient header")
    magic, version, m, n, p1, p2, fid, itemsize = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    if itemsize not in (8, 16):
        raise FormatError(f"{path}: bad item size {itemsize}")
    shape = ((p1 + 1) * m, (p2 + 1) * n)
    dtype = np.dtype("<c8") if itemsize == 8 else np.dtype("<c16")
    if len(buf) - HEADER.size != shape[0] * shape[1] * itemsize:
        raise FormatError(f"{path}: payload size does not match header")
    B = np.frombuffer(buf, dtype=dtype, offset=HEADER.size).reshape(shape)
    names = {v: k for k, v in FILTER_IDS.items()}
    return {"B": B, "m": m, "n": n, "p1": p1, "p2": p2,
            "filter": names.get(fid, "custom"), "filter_id": fid, "itemsize": itemsize}
