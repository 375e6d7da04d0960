"""Verification scoring: cosine trial scores, ROC/EER/accuracy, fusion.

Threshold conventions are fixed here and mirrored by the test oracles:
a trial is accepted when its score is >= the threshold, so FAR(t) is the
fraction of mismatched trials with score >= t and FRR(t) the fraction of
matched trials with score < t. The EER is read off the FAR/FRR crossing,
linearly interpolated between adjacent thresholds when no threshold hits
it exactly. Accuracy is the best achievable over the same threshold set.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateNormalization,
    IndexOutOfRange,
    LengthMismatch,
    NonFiniteValue,
    SingleClass,
    ZeroVector,
)
from .vecmath import as_dataset, cosine_score

NORMALIZATIONS = ("minmax", "zscore", "none")


@dataclass
class TrialList:
    """Index pairs to compare plus their matched/mismatched ground truth."""

    pairs: np.ndarray  # (m, 2) int64
    matched: np.ndarray  # (m,) bool

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.matched = np.asarray(self.matched, dtype=bool).reshape(-1)
        if self.pairs.shape[0] != self.matched.shape[0]:
            raise LengthMismatch(
                f"{self.pairs.shape[0]} pairs but {self.matched.shape[0]} labels"
            )

    def __len__(self) -> int:
        return self.pairs.shape[0]


@dataclass
class ScoreSet:
    """Per-trial scores aligned to a TrialList, with a provenance tag."""

    scores: np.ndarray
    source: str = ""

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.scores)):
            raise NonFiniteValue(f"score set {self.source!r} contains NaN or Inf")

    def __len__(self) -> int:
        return self.scores.shape[0]


@dataclass
class EvalReport:
    eer: float
    eer_threshold: float
    accuracy: float
    roc: np.ndarray = field(repr=False)  # (T, 3) columns: far, frr, threshold


@dataclass
class FusionConfig:
    """Convex weights and per-set normalization for score-level fusion."""

    w1: float
    w2: float
    normalization: str = "minmax"

    def __post_init__(self):
        if self.w1 < 0.0 or self.w2 < 0.0:
            raise ValueError(f"weights must be >= 0, got {self.w1}, {self.w2}")
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {self.w1} + {self.w2}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )


def score_trials(embeddings, trials: TrialList, source: str = "cosine") -> ScoreSet:
    """Cosine-score every trial pair against the embedding set."""
    emb = as_dataset(embeddings)
    n = emb.shape[0]
    if len(trials) and (trials.pairs.min() < 0 or trials.pairs.max() >= n):
        raise IndexOutOfRange(f"trial index outside [0, {n})")
    scores = np.empty(len(trials))
    for t in range(len(trials)):
        a, b = trials.pairs[t]
        try:
            scores[t] = cosine_score(emb[a], emb[b])
        except ZeroVector as e:
            raise ZeroVector(f"trial {t}: {e}") from e
    return ScoreSet(scores, source=source)


def _scores_array(s) -> np.ndarray:
    arr = s.scores if isinstance(s, ScoreSet) else np.asarray(s, dtype=np.float64)
    return np.asarray(arr, dtype=np.float64).reshape(-1)


def compute_eer(s, trials: TrialList) -> EvalReport:
    """ROC sweep over all distinct scores; EER from the FAR/FRR crossing.

    FAR uses >= and FRR uses < at each threshold (accept on tie). The
    sweep appends one sentinel threshold above the maximum score so the
    ROC always runs from (FAR=1, FRR=0) to (FAR=0, FRR=1).
    """
    scores = _scores_array(s)
    matched = trials.matched
    if scores.shape[0] != matched.shape[0]:
        raise LengthMismatch(f"{scores.shape[0]} scores but {matched.shape[0]} trials")
    if matched.all() or not matched.any():
        raise SingleClass("need at least one matched and one mismatched trial")

    pos = np.sort(scores[matched])
    neg = np.sort(scores[~matched])
    thresholds = np.unique(scores)
    thresholds = np.append(thresholds, thresholds[-1] + 1.0)

    # count >= t via sorted-array insertion points
    far = (neg.size - np.searchsorted(neg, thresholds, side="left")) / neg.size
    frr = np.searchsorted(pos, thresholds, side="left") / pos.size
    roc = np.column_stack([far, frr, thresholds])

    diff = far - frr  # non-increasing: starts at 1, ends at -1
    cross = int(np.argmax(diff <= 0.0))
    if diff[cross] == 0.0:
        eer = float(far[cross])
        eer_threshold = float(thresholds[cross])
    else:
        lo, hi = cross - 1, cross
        alpha = diff[lo] / (diff[lo] - diff[hi])
        eer = float(far[lo] + alpha * (far[hi] - far[lo]))
        eer_threshold = float(thresholds[lo] + alpha * (thresholds[hi] - thresholds[lo]))

    tp = pos.size - np.searchsorted(pos, thresholds, side="left")
    tn = np.searchsorted(neg, thresholds, side="left")
    accuracy = float(np.max(tp + tn) / scores.size)
    return EvalReport(eer=eer, eer_threshold=eer_threshold, accuracy=accuracy, roc=roc)


def _normalize_scores(scores: np.ndarray, how: str, source: str) -> np.ndarray:
    if how == "none":
        return scores
    if how == "minmax":
        lo = scores.min()
        hi = scores.max()
        if hi == lo:
            raise DegenerateNormalization(f"score set {source!r} is constant under minmax")
        return (scores - lo) / (hi - lo)
    if how == "zscore":
        sd = scores.std()
        if sd == 0.0:
            raise DegenerateNormalization(f"score set {source!r} is constant under zscore")
        return (scores - scores.mean()) / sd
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {how!r}")


def fuse_scores(s1: ScoreSet, s2: ScoreSet, cfg: FusionConfig) -> ScoreSet:
    """Weighted sum of two independently normalized, trial-aligned score sets."""
    a = _scores_array(s1)
    b = _scores_array(s2)
    if a.shape[0] != b.shape[0]:
        raise LengthMismatch(f"score sets differ in length: {a.shape[0]} vs {b.shape[0]}")
    na = _normalize_scores(a, cfg.normalization, getattr(s1, "source", ""))
    nb = _normalize_scores(b, cfg.normalization, getattr(s2, "source", ""))
    fused = cfg.w1 * na + cfg.w2 * nb
    tag1 = getattr(s1, "source", "a") or "a"
    tag2 = getattr(s2, "source", "b") or "b"
    return ScoreSet(fused, source=f"fuse({cfg.w1:g}*{tag1} + {cfg.w2:g}*{tag2})")


def render_report(report: EvalReport) -> str:
    """Aligned plain-text rendering; the first line is always `EER <value>`."""
    return "\n".join(
        [
            f"EER {report.eer:.4f}",
            f"EER threshold {report.eer_threshold:.6f}",
            f"Best accuracy {report.accuracy:.4f}",
        ]
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "eer": report.eer,
        "eer_threshold": report.eer_threshold,
        "accuracy": report.accuracy,
        "roc": [[float(v) for v in row] for row in report.roc],
    }


def sweep_report(results) -> str:
    """Text table of (label, EvalReport) rows, one line per sweep value.

    Rows render in input order so the caller controls presentation.
    """
    header = f"{'param':<12} {'eer':>8} {'eer_thr':>10} {'accuracy':>10}"
    lines = [header, "-" * len(header)]
    for label, rep in results:
        lines.append(
            f"{str(label):<12} {rep.eer:>8.4f} {rep.eer_threshold:>10.6f} {rep.accuracy:>10.4f}"
        )
    return "\n".join(lines)
