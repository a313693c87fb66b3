"""Feature vectors (spectral slope + per-level phase means), subject-effect
adjustment under a two-way nested ANOVA, and a nearest-centroid classifier.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .phase import phase_averages
from .spectra import InsufficientLevelsError, fit_spectrum, logscale_1d, logscale_2d
from .transform1d import build_plan_1d, forward_1d
from .transform2d import build_plan_2d, forward_2d

__all__ = [
    "AdjustmentResult",
    "ClassificationResult",
    "FeatureSettings",
    "FeatureVector",
    "MASKS",
    "NestedDesign",
    "adjust_feature_vectors",
    "detrend_endpoints",
    "extract_batch",
    "extract_features",
    "feature_matrix",
    "nearest_centroid_classify",
    "repeated_split_accuracy",
    "segment",
    "subject_adjust",
]

# Column selections named after the comparison rows of the classification tables.
MASKS = {
    "Slope": ("slope",),
    "∠d_j": ("phase",),
    "Slope + ∠d_j": ("slope", "phase"),
}
_MASK_ALIASES = {
    "slope": "Slope",
    "phase": "∠d_j",
    "slope+phase": "Slope + ∠d_j",
    "slope + phase": "Slope + ∠d_j",
}


def _mask_name(mask):
    return _MASK_ALIASES.get(str(mask).lower(), mask) if mask not in MASKS else mask


@dataclass(frozen=True)
class FeatureSettings:
    wavelet: str = "cdaub6"
    depth: int = 4
    depth_cols: int | None = None
    level_range: tuple | None = None
    fit: str = "ols"
    shift: int = 0
    detrend: str = "none"
    phase_statistic: str = "arithmetic"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["level_range"] = list(self.level_range) if self.level_range else None
        return d


@dataclass
class FeatureVector:
    slope: float
    hurst: float
    phase_means: np.ndarray
    levels: np.ndarray
    mode: str = "1d"
    degenerate: bool = False
    source: str | None = None
    group: object = None
    subject: object = None
    settings: dict = field(default_factory=dict)

    def values(self, mask="Slope + ∠d_j") -> np.ndarray:
        parts = []
        for part in MASKS[_mask_name(mask)]:
            if part == "slope":
                parts.append([self.slope])
            else:
                parts.append(self.phase_means)
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])


def detrend_endpoints(y) -> np.ndarray:
    """Subtract the straight line through the first and last samples.

    Removes the jump a non-stationary path makes when wrapped periodically.
    """
    y = np.asarray(y, dtype=float)
    k = np.arange(len(y))
    return y - (y[0] + k / (len(y) - 1) * (y[-1] - y[0]))


def segment(signal, window: int = 1024, step: int = 100) -> list:
    """Overlapping windows starting every ``step`` samples (full windows only)."""
    signal = np.asarray(signal)
    if window < 1 or step < 1:
        raise ValueError("window and step must be positive")
    return [signal[s:s + window] for s in range(0, len(signal) - window + 1, step)]


def extract_features(x, settings: FeatureSettings | None = None, **meta) -> FeatureVector:
    """Transform, fit the spectrum and average phases for one signal or image."""
    settings = settings or FeatureSettings()
    x = np.asarray(x)
    if x.ndim == 1:
        if settings.detrend == "endpoints":
            x = detrend_endpoints(x)
        elif settings.detrend != "none":
            raise ValueError(f"unknown detrend mode {settings.detrend!r}")
        plan = build_plan_1d(len(x), settings.depth, settings.wavelet)
        coeffs = forward_1d(plan, x)
        diagram = logscale_1d(coeffs)
        mode = "1d"
    elif x.ndim == 2:
        p2 = settings.depth_cols or settings.depth
        plan = build_plan_2d(x.shape[0], x.shape[1], settings.depth, p2, settings.wavelet)
        coeffs = forward_2d(plan, x)
        diagram = logscale_2d(coeffs, settings.shift)
        mode = "2d"
    else:
        raise ValueError(f"expected a signal or an image, got {x.ndim} dimensions")
    ph = phase_averages(coeffs, settings.shift, settings.phase_statistic)

    degenerate = bool(diagram.degenerate_levels)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fit = fit_spectrum(diagram, settings.level_range, settings.fit)
        slope, hurst = fit.slope, fit.hurst
    except InsufficientLevelsError:
        slope = hurst = float("nan")
        degenerate = True
    return FeatureVector(
        slope=slope,
        hurst=hurst,
        phase_means=ph.means,
        levels=ph.levels,
        mode=mode,
        degenerate=degenerate,
        settings=settings.to_dict(),
        **meta,
    )


def extract_batch(items, settings=None, window=None, step=100) -> list:
    """Feature vectors for ``(source, group, subject, array)`` items.

    With ``window`` set, 1-D signals are cut by :func:`segment` first and each
    segment's source id gets a ``#k`` suffix.
    """
    out = []
    for source, group, subject, x in items:
        parts = segment(x, window, step) if window and np.ndim(x) == 1 else [x]
        if not parts:
            raise ValueError(f"{source}: shorter than one {window}-sample segment")
        for k, part in enumerate(parts):
            sid = f"{source}#{k}" if window and np.ndim(x) == 1 else source
            out.append(extract_features(part, settings, source=sid, group=group, subject=subject))
    return out


def feature_matrix(vectors, mask="Slope + ∠d_j") -> np.ndarray:
    return np.array([v.values(mask) for v in vectors])


# --------------------------------------------------------------------------
# two-way nested ANOVA


@dataclass
class NestedDesign:
    """Observations ``y_ijk``: group ``i``, subject ``j`` within ``i``, replicate ``k``.

    Subject labels are global: a subject may appear in only one group.
    """

    groups: np.ndarray
    subjects: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.groups = np.asarray(self.groups)
        self.subjects = np.asarray(self.subjects)
        self.values = np.asarray(self.values, dtype=float)
        if not len(self.groups) == len(self.subjects) == len(self.values):
            raise ValueError("groups, subjects and values must have equal length")
        if len(self.values) == 0:
            raise ValueError("empty design")
        owner = {}
        for g, s in zip(self.groups.tolist(), self.subjects.tolist()):
            if owner.setdefault(s, g) != g:
                raise ValueError(f"subject {s!r} appears in groups {owner[s]!r} and {g!r}")

    @classmethod
    def from_records(cls, records):
        g, s, y = zip(*[(r[0], r[1], r[-1]) for r in records])
        return cls(g, s, y)


@dataclass
class AdjustmentResult:
    adjusted: np.ndarray
    grand_mean: float
    alpha: dict
    beta: dict
    table: dict

    def anova_rows(self) -> list:
        return [dict(source=k, **v) for k, v in self.table.items()]


def subject_adjust(design: NestedDesign) -> AdjustmentResult:
    """``y* = y - beta_j(i)`` with ``beta_j(i) = mean_ij - mean_i``, plus the ANOVA table."""
    y = design.values
    N = len(y)
    grand = y.mean()
    group_keys = list(dict.fromkeys(design.groups.tolist()))
    subj_keys = list(dict.fromkeys(design.subjects.tolist()))
    g_idx = np.array([group_keys.index(g) for g in design.groups.tolist()])
    s_idx = np.array([subj_keys.index(s) for s in design.subjects.tolist()])

    n_g = np.bincount(g_idx, minlength=len(group_keys))
    n_s = np.bincount(s_idx, minlength=len(subj_keys))
    mean_g = np.bincount(g_idx, y, len(group_keys)) / n_g
    mean_s = np.bincount(s_idx, y, len(subj_keys)) / n_s
    s_group = np.zeros(len(subj_keys), dtype=int)
    s_group[s_idx] = g_idx

    beta = mean_s - mean_g[s_group]
    alpha = mean_g - grand
    adjusted = y - beta[s_idx]

    for gi, g in enumerate(group_keys):
        if np.sum(s_group == gi) == 1:
            warnings.warn(f"group {g!r} has a single subject; its nested effect is 0", stacklevel=2)

    ss_group = float(np.sum(n_g * (mean_g - grand) ** 2))
    ss_subject = float(np.sum(n_s * beta ** 2))
    ss_error = float(np.sum((y - mean_s[s_idx]) ** 2))
    ss_total = float(np.sum((y - grand) ** 2))
    df_group = len(group_keys) - 1
    df_subject = len(subj_keys) - len(group_keys)
    df_error = N - len(subj_keys)

    def ms(ss, df):
        return ss / df if df > 0 else float("nan")

    ms_error = ms(ss_error, df_error)

    def row(ss, df):
        m = ms(ss, df)
        if df > 0 and df_error > 0 and ms_error > 0:
            F = m / ms_error
            p = float(stats.f.sf(F, df, df_error))
        else:
            F = p = float("nan")
        return {"ss": ss, "df": df, "ms": m, "F": F, "p": p}

    table = {
        "group": row(ss_group, df_group),
        "subject": row(ss_subject, df_subject),
        "error": {"ss": ss_error, "df": df_error, "ms": ms_error, "F": float("nan"), "p": float("nan")},
        "total": {"ss": ss_total, "df": N - 1, "ms": float("nan"), "F": float("nan"), "p": float("nan")},
    }
    return AdjustmentResult(
        adjusted=adjusted,
        grand_mean=float(grand),
        alpha={g: float(a) for g, a in zip(group_keys, alpha)},
        beta={(group_keys[s_group[k]], s): float(b) for k, (s, b) in enumerate(zip(subj_keys, beta))},
        table=table,
    )


def adjust_feature_vectors(vectors) -> list:
    """Apply :func:`subject_adjust` to the slope, Hurst and every phase column."""
    groups = [v.group for v in vectors]
    subjects = [v.subject for v in vectors]
    cols = {
        "slope": np.array([v.slope for v in vectors]),
        "hurst": np.array([v.hurst for v in vectors]),
    }
    phase = np.array([v.phase_means for v in vectors])
    adj = {k: subject_adjust(NestedDesign(groups, subjects, c)).adjusted for k, c in cols.items()}
    adj_phase = np.column_stack(
        [subject_adjust(NestedDesign(groups, subjects, phase[:, i])).adjusted for i in range(phase.shape[1])]
    )
    out = []
    for k, v in enumerate(vectors):
        out.append(
            FeatureVector(
                slope=float(adj["slope"][k]),
                hurst=float(adj["hurst"][k]),
                phase_means=adj_phase[k],
                levels=v.levels,
                mode=v.mode,
                degenerate=v.degenerate,
                source=v.source,
                group=v.group,
                subject=v.subject,
                settings=dict(v.settings, adjusted=True),
            )
        )
    return out


# --------------------------------------------------------------------------
# nearest-centroid classification


@dataclass
class ClassificationResult:
    predictions: np.ndarray
    classes: list
    confusion: np.ndarray  # rows: true class, columns: predicted class
    accuracy: float
    sensitivity: dict
    specificity: dict


def _as_matrix(data, mask):
    if len(data) and isinstance(data[0], FeatureVector):
        return feature_matrix(data, mask), [v.group for v in data]
    return np.asarray(data, dtype=float), None


def nearest_centroid_classify(train, test, mask="Slope + ∠d_j", train_labels=None, test_labels=None):
    """Assign each test vector to the nearest class centroid in z-scored space.

    ``train``/``test`` are FeatureVectors (labels from ``.group``) or arrays
    with explicit labels.  Exact distance ties go to the lowest class id.
    """
    Xtr, ltr = _as_matrix(train, mask)
    Xte, lte = _as_matrix(test, mask)
    ytr = np.asarray(train_labels if train_labels is not None else ltr)
    yte = test_labels if test_labels is not None else lte
    Xtr = Xtr.reshape(len(Xtr), -1)
    Xte = Xte.reshape(len(Xte), -1)
    classes = sorted(set(ytr.tolist()))
    if not classes:
        raise ValueError("empty training set")
    mu = Xtr.mean(axis=0)
    sd = Xtr.std(axis=0)
    sd[sd == 0] = 1.0
    Ztr = (Xtr - mu) / sd
    Zte = (Xte - mu) / sd
    cents = []
    for c in classes:
        members = Ztr[ytr == c]
        if len(members) == 0:
            raise ValueError(f"class {c!r} has no training vectors")
        cents.append(members.mean(axis=0))
    dist = ((Zte[:, None, :] - np.array(cents)[None]) ** 2).sum(axis=-1)
    pred = np.array(classes, dtype=object)[dist.argmin(axis=1)]

    k = len(classes)
    conf = np.zeros((k, k), dtype=int)
    acc = float("nan")
    sens, spec = {}, {}
    if yte is not None:
        yte = np.asarray(yte)
        pos = {c: i for i, c in enumerate(classes)}
        for t, p in zip(yte.tolist(), pred.tolist()):
            if t in pos:
                conf[pos[t], pos[p]] += 1
        acc = float(np.mean(pred == yte))
        total = conf.sum()
        for i, c in enumerate(classes):
            tp = conf[i, i]
            fn = conf[i].sum() - tp
            fp = conf[:, i].sum() - tp
            tn = total - tp - fn - fp
            sens[c] = tp / (tp + fn) if tp + fn else float("nan")
            spec[c] = tn / (tn + fp) if tn + fp else float("nan")
    return ClassificationResult(pred, classes, conf, acc, sens, spec)


def repeated_split_accuracy(X, labels, repeats=100, train_frac=0.75, seed=0) -> np.ndarray:
    """Accuracies of nearest-centroid over repeated random train/test splits."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    n_train = int(round(train_frac * len(labels)))
    accs = []
    for _ in range(repeats):
        perm = rng.permutation(len(labels))
        tr, te = perm[:n_train], perm[n_train:]
        res = nearest_centroid_classify(X[tr], X[te], train_labels=labels[tr], test_labels=labels[te])
        accs.append(res.accuracy)
    return np.array(accs)
