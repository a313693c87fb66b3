"""Acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line that is printed in the pytest
terminal summary (and to stdout when the file is run as a script).
"""

import time
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ndcwt.features import (
    FeatureSettings,
    NestedDesign,
    detrend_endpoints,
    extract_features,
    feature_matrix,
    repeated_split_accuracy,
    subject_adjust,
)
from ndcwt.filters import available_filters, check_invariants, get_filter
from ndcwt.phase import phase_averages
from ndcwt.selfsim import FbmSpec, replicate_seeds, simulate_fbm_1d, simulate_fbm_2d
from ndcwt.spectra import fit_spectrum, logscale_1d, logscale_2d
from ndcwt.transform1d import build_plan_1d, forward_1d
from ndcwt.transform2d import build_plan_2d, forward_2d
from ndcwt.verify import bench, oracle_1d, oracle_2d, roundtrip_1d, roundtrip_2d

# single-run slopes and estimates reported for m = 4096, H = 0.3 / 0.5 / 0.7
REPORTED_SLOPES = {0.3: -1.53007, 0.5: -2.01486, 0.7: -2.45532}
REPORTED_HURST = {0.3: 0.2650, 0.5: 0.5074, 0.7: 0.7277}


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def test_01_filter_identities():
    t0 = time.perf_counter()
    worst = {}
    for name in ("haar", "cdaub6"):
        res = check_invariants(get_filter(name))
        ok = res["highpass"] < 1e-12 and max(res["lowpass_sum"], res["orthonormality"], res["highpass_sum"]) < 1e-10
        worst[name] = (ok, max(res.values()))
    dt = time.perf_counter() - t0
    passed = all(ok for ok, _ in worst.values()) and dt < 1.0
    detail = ", ".join(f"{k} max residual {v:.1e}" for k, (_, v) in worst.items()) + f"; {dt:.3f} s (< 1 s)"
    record(1, "filter identities", passed, detail)


def test_02_perfect_reconstruction():
    t0 = time.perf_counter()
    ok1, d1 = roundtrip_1d((64, 100, 1000, 4096))
    ok2, d2 = roundtrip_2d([(33, 47), (64, 64), (100, 60), (256, 256)])
    dt = time.perf_counter() - t0
    record(2, "perfect reconstruction", ok1 and ok2 and dt < 30,
           f"1-D {d1}; 2-D {d2}; {dt:.1f} s (< 30 s)")


def test_03_oracle_equivalence():
    ok1, d1 = oracle_1d((16, 37, 64, 100, 200, 256))
    ok2, d2 = oracle_2d([(16, 24), (33, 47), (64, 64), (100, 60), (128, 128), (256, 256)])
    record(3, "oracle equivalence (tol 1e-10, m,n <= 256)", ok1 and ok2, f"1-D {d1}; 2-D {d2}")


def _hurst_1d(h, reps=100, m=4096):
    plan = build_plan_1d(m, 8, "cdaub6")
    slopes, hs = [], []
    for s in replicate_seeds(int(h * 1000), reps):
        y = detrend_endpoints(simulate_fbm_1d(FbmSpec(h, m, seed=s)))
        fit = fit_spectrum(logscale_1d(forward_1d(plan, y)), (None, plan.J - 2))
        slopes.append(fit.slope)
        hs.append(fit.hurst)
    return np.array(slopes), np.array(hs)


def test_04_hurst_1d():
    t0 = time.perf_counter()
    parts, passed = [], True
    for h in (0.3, 0.5, 0.7):
        slopes, hs = _hurst_1d(h)
        mean_ok = abs(hs.mean() - h) <= 0.05
        in_range = (slopes.min() <= REPORTED_SLOPES[h] <= slopes.max()
                    and hs.min() <= REPORTED_HURST[h] <= hs.max())
        passed &= mean_ok and in_range
        parts.append(f"H={h}: mean {hs.mean():.3f} (sd {hs.std():.3f}), range [{hs.min():.3f}, {hs.max():.3f}]"
                     f" {'contains' if in_range else 'MISSES'} reported {REPORTED_HURST[h]}")
    dt = time.perf_counter() - t0
    passed &= dt < 120
    record(4, "1-D Hurst recovery (100 replicates, m=4096)", passed, "; ".join(parts) + f"; {dt:.1f} s")


def test_05_hurst_2d():
    t0 = time.perf_counter()
    plan = build_plan_2d(256, 256, 6, 6, "cdaub6")
    parts, passed = [], True
    for h in (0.3, 0.5, 0.7):
        hs = []
        for s in replicate_seeds(int(h * 1000) + 1, 50):
            A = simulate_fbm_2d(FbmSpec(h, 256, 256, seed=s))
            hs.append(fit_spectrum(logscale_2d(forward_2d(plan, A), 0), (None, 6)).hurst)
        hs = np.array(hs)
        passed &= abs(hs.mean() - h) <= 0.10
        parts.append(f"H={h}: mean {hs.mean():.3f} (sd {hs.std():.3f})")
    dt = time.perf_counter() - t0
    passed &= dt < 600
    record(5, "2-D Hurst recovery (50 replicates, 256x256, s=0)", passed, "; ".join(parts) + f"; {dt:.1f} s")


def test_06_scale_invariance():
    r = np.random.default_rng(6)
    y = simulate_fbm_1d(FbmSpec(0.4, 1000, seed=6))
    A = simulate_fbm_2d(FbmSpec(0.6, 96, 80, seed=6))
    p1 = build_plan_1d(1000, 6, "cdaub6")
    p2 = build_plan_2d(96, 80, 4, 4, "cdaub6")
    worst_s = worst_slope = worst_phase = 0.0
    for a in np.concatenate([[1e-6, 0.37, 2.0, 1e5], r.uniform(0.01, 100, 4)]):
        for x, tf, diag in ((y, lambda v: forward_1d(p1, v), logscale_1d),
                            (A, lambda v: forward_2d(p2, v), lambda c: logscale_2d(c, 0))):
            c0, c1 = tf(x), tf(a * x)
            d0, d1 = diag(c0), diag(c1)
            worst_s = max(worst_s, np.max(np.abs(d1.values - d0.values - 2 * np.log2(a))))
            worst_slope = max(worst_slope, abs(fit_spectrum(d1).slope - fit_spectrum(d0).slope))
            worst_phase = max(worst_phase, np.max(np.abs(phase_averages(c1).means - phase_averages(c0).means)))
    passed = worst_s < 1e-12 and worst_slope < 1e-12 and worst_phase < 1e-12
    record(6, "scale invariance", passed,
           f"max |dS - 2 log2 a| {worst_s:.1e}, max |d slope| {worst_slope:.1e}, max |d phase| {worst_phase:.1e}")


def test_07_nested_anova():
    design = NestedDesign(
        ["A"] * 4 + ["B"] * 4,
        ["a1", "a1", "a2", "a2", "b1", "b1", "b2", "b2"],
        [1, 3, 5, 7, 10, 12, 6, 8],
    )
    t = subject_adjust(design).table
    # hand computation: SS 50 / 32 / 8 / 90, df 1 / 2 / 4, MS 50 / 16 / 2, F 25 / 8
    hand = {"group": (50, 1, 50, 25), "subject": (32, 2, 16, 8), "error": (8, 4, 2, None)}
    err = 0.0
    for k, (ss, df, ms, F) in hand.items():
        err = max(err, abs(t[k]["ss"] - ss), abs(t[k]["df"] - df), abs(t[k]["ms"] - ms))
        if F is not None:
            err = max(err, abs(t[k]["F"] - F))
    err = max(err, abs(t["total"]["ss"] - 90))
    r = np.random.default_rng(7)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(1000):
            a = int(r.integers(2, 6))
            groups, subjects, sid = [], [], 0
            for i in range(a):
                for _ in range(int(r.integers(1, 5))):
                    k = int(r.integers(1, 6))
                    groups += [i] * k
                    subjects += [sid] * k
                    sid += 1
            y = r.normal(r.uniform(-100, 100), r.uniform(0.01, 50), len(groups))
            tt = subject_adjust(NestedDesign(groups, subjects, y)).table
            s = tt["group"]["ss"] + tt["subject"]["ss"] + tt["error"]["ss"]
            worst = max(worst, abs(s - tt["total"]["ss"]) / tt["total"]["ss"])
    record(7, "nested ANOVA", err < 1e-9 and worst < 1e-9,
           f"hand design max abs error {err:.1e}; SS identity max rel error {worst:.1e} over 1000 designs")


def test_08_classification():
    settings = FeatureSettings(wavelet="cdaub6", depth=4)
    vecs, labels = [], []
    for h in (0.3, 0.7):
        for s in replicate_seeds(int(h * 100), 200):
            vecs.append(extract_features(simulate_fbm_1d(FbmSpec(h, 1024, seed=s)), settings))
            labels.append(h)
    labels = np.array(labels)
    acc = {}
    for mask in ("Slope", "∠d_j", "Slope + ∠d_j"):
        acc[mask] = repeated_split_accuracy(feature_matrix(vecs, mask), labels, repeats=100, seed=8).mean()
    passed = acc["Slope + ∠d_j"] >= 0.90 and acc["Slope + ∠d_j"] >= acc["Slope"]
    record(8, "synthetic classification (nearest centroid, 100 x 75/25 splits)", passed,
           ", ".join(f"{k} {v:.4f}" for k, v in acc.items()))


def test_09_performance():
    times = bench()
    passed = times["forward_1d"] < 0.05 and times["forward_2d"] < 30
    record(9, "performance", passed,
           f"1-D 1024 p=4 forward {times['forward_1d'] * 1e3:.2f} ms (< 50 ms, plan {times['plan_1d'] * 1e3:.0f} ms); "
           f"2-D 1024x1024 p=4 forward {times['forward_2d']:.2f} s (< 30 s, plan {times['plan_2d']:.2f} s)")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
