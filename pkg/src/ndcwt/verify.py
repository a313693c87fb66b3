"""Self-checks shipped with the library (``ndcwt verify``)."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .filters import available_filters, check_invariants, get_filter
from .oracles import atrous_1d, sequential_2d
from .transform1d import _cached_plan, build_plan_1d, forward_1d, inverse_1d, max_depth
from .transform2d import build_plan_2d, forward_2d, inverse_2d


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing suite is a failed suite
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail, time.perf_counter() - t0)


def _rel(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def filter_identities():
    worst = {}
    for name in available_filters():
        res = check_invariants(get_filter(name))
        worst[name] = max(res.values())
    return True, ", ".join(f"{k} max residual {v:.1e}" for k, v in worst.items())


def roundtrip_1d(lengths, trials=3, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in available_filters():
        for m in lengths:
            for p in range(1, max_depth(m) + 1):
                plan = build_plan_1d(m, p, name)
                for _ in range(trials):
                    y = rng.standard_normal(m)
                    worst = max(worst, _rel(inverse_1d(plan, forward_1d(plan, y)), y))
    return worst < 1e-8, f"max relative error {worst:.2e} over m={list(lengths)}"


def roundtrip_2d(shapes, depths=(1, 3), seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in available_filters():
        for m, n in shapes:
            for p in depths:
                p1, p2 = min(p, max_depth(m)), min(p, max_depth(n))
                plan = build_plan_2d(m, n, p1, p2, name)
                A = rng.standard_normal((m, n))
                worst = max(worst, _rel(inverse_2d(plan, forward_2d(plan, A)), A))
    return worst < 1e-8, f"max relative error {worst:.2e} over {len(shapes)} shapes"


def oracle_1d(lengths, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in available_filters():
        for m in lengths:
            for p in range(1, max_depth(m) + 1):
                y = rng.standard_normal(m)
                for dense in (True, False):
                    d = forward_1d(build_plan_1d(m, p, name, dense=dense), y).data
                    worst = max(worst, float(np.max(np.abs(d - atrous_1d(y, name, p)))))
    return worst < 1e-10, f"max abs difference vs a-trous cascade {worst:.2e}"


def oracle_2d(shapes, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in available_filters():
        for m, n in shapes:
            p1, p2 = min(3, max_depth(m)), min(2, max_depth(n))
            A = rng.standard_normal((m, n))
            B = forward_2d(build_plan_2d(m, n, p1, p2, name), A).B
            worst = max(worst, float(np.max(np.abs(B - sequential_2d(A, name, p1, p2)))))
    return worst < 1e-10, f"max abs difference vs sequential 1-D passes {worst:.2e}"


def run_suites(quick=True) -> list:
    if quick:
        lens, shapes = (16, 37, 64), [(16, 24), (33, 20)]
    else:
        lens, shapes = (64, 100, 1000, 4096), [(33, 47), (64, 64), (100, 60), (256, 256)]
    olens = (16, 37, 64) if quick else (64, 100, 256)
    oshapes = shapes if quick else [(33, 47), (64, 64), (100, 60), (128, 128)]
    return [
        _timed("filter identities", filter_identities),
        _timed("perfect reconstruction 1-D", lambda: roundtrip_1d(lens)),
        _timed("perfect reconstruction 2-D", lambda: roundtrip_2d(shapes)),
        _timed("oracle equivalence 1-D", lambda: oracle_1d(olens)),
        _timed("oracle equivalence 2-D", lambda: oracle_2d(oshapes)),
    ]


def bench(size_1d=1024, size_2d=1024, depth=4, wavelet="cdaub6", repeats=5) -> dict:
    """Wall-clock timings (seconds) of the 1-D and 2-D forward transforms."""
    rng = np.random.default_rng(0)
    out = {}
    _cached_plan.cache_clear()  # time cold plan construction
    t0 = time.perf_counter()
    plan = build_plan_1d(size_1d, depth, wavelet)
    out["plan_1d"] = time.perf_counter() - t0
    y = rng.standard_normal(size_1d)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        forward_1d(plan, y)
        times.append(time.perf_counter() - t0)
    out["forward_1d"] = min(times)
    t0 = time.perf_counter()
    plan2 = build_plan_2d(size_2d, size_2d, depth, depth, wavelet)
    out["plan_2d"] = time.perf_counter() - t0
    A = rng.standard_normal((size_2d, size_2d))
    t0 = time.perf_counter()
    coeffs = forward_2d(plan2, A)
    out["forward_2d"] = time.perf_counter() - t0
    del coeffs
    return out
