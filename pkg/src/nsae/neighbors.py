"""Label-free neighbor selection and training-pair expansion.

Each training vector gets a list of similar vectors picked from the
pairwise cosine matrix, either the fixed top-k per row or everything above
a threshold. The diagonal is always masked: a vector scoring itself 1.0
would make every vector its own nearest neighbor and collapse the method
to a plain autoencoder. Selected rows then expand into (input, target)
index pairs for training.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidK, InvalidThreshold, TooFewVectors

logger = logging.getLogger(__name__)

FALLBACKS = ("top1", "self")
COUNT_CONVENTIONS = ("n_times_k", "n_times_k_minus_1")


@dataclass
class NeighborMap:
    """Per-vector neighbor indices, ordered by descending score.

    ``mode`` is "topk" or "threshold" and ``param`` the k or threshold used.
    ``top1`` holds the single best neighbor per row when the map was built
    from a similarity matrix; maps loaded from disk have ``top1=None``.
    """

    neighbors: list
    mode: str
    param: float
    top1: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.neighbors)


def _checked_sim(sim) -> np.ndarray:
    s = np.asarray(sim, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"similarity matrix must be square, got shape {s.shape}")
    return s


def _ranked_rows(s: np.ndarray) -> np.ndarray:
    """Column indices of each row sorted by descending score, self last.

    Ties break by ascending index (stable sort on the negated scores), so
    selection is deterministic across runs and platforms.
    """
    masked = s.copy()
    np.fill_diagonal(masked, -np.inf)
    return np.argsort(-masked, axis=1, kind="stable")


def select_topk(sim, k: int) -> NeighborMap:
    """Pick the min(k, n-1) highest-scoring neighbors for every row."""
    s = _checked_sim(sim)
    n = s.shape[0]
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    if n < 2:
        raise TooFewVectors(f"need at least 2 vectors, got {n}")
    kk = min(int(k), n - 1)
    order = _ranked_rows(s)
    rows = [order[i, :kk].tolist() for i in range(n)]
    return NeighborMap(rows, "topk", float(k), top1=order[:, 0].copy())


def select_threshold(sim, t: float) -> NeighborMap:
    """Pick every neighbor scoring at least t; rows may differ in length."""
    s = _checked_sim(sim)
    n = s.shape[0]
    if not -1.0 <= t <= 1.0:
        raise InvalidThreshold(f"threshold must lie in [-1, 1], got {t}")
    if n < 2:
        raise TooFewVectors(f"need at least 2 vectors, got {n}")
    order = _ranked_rows(s)
    masked = s.copy()
    np.fill_diagonal(masked, -np.inf)
    counts = (masked >= t).sum(axis=1)
    rows = [order[i, : counts[i]].tolist() for i in range(n)]
    return NeighborMap(rows, "threshold", float(t), top1=order[:, 0].copy())


def build_training_pairs(
    nmap: NeighborMap,
    fallback: str = "top1",
    count_convention: str = "n_times_k",
) -> np.ndarray:
    """Expand a neighbor map into an (m, 2) array of (input, target) indices.

    Pairs are concatenated in row order. Rows with no neighbors (possible
    under threshold selection) contribute per ``fallback``: "self" emits a
    plain self-reconstruction pair (i, i), "top1" emits the row's single
    best-scoring neighbor regardless of threshold.

    ``count_convention`` "n_times_k" keeps every selected neighbor;
    "n_times_k_minus_1" drops the last-ranked neighbor of each row first.
    """
    if fallback not in FALLBACKS:
        raise ValueError(f"fallback must be one of {FALLBACKS}, got {fallback!r}")
    if count_convention not in COUNT_CONVENTIONS:
        raise ValueError(
            f"count_convention must be one of {COUNT_CONVENTIONS}, got {count_convention!r}"
        )
    out = []
    fell_back = []
    for i, js in enumerate(nmap.neighbors):
        if count_convention == "n_times_k_minus_1":
            js = js[:-1]
        for j in js:
            if j == i:
                raise ValueError(f"neighbor map row {i} contains a self-loop")
            out.append((i, j))
        if not js:
            fell_back.append(i)
            if fallback == "self":
                out.append((i, i))
            else:
                if nmap.top1 is None:
                    raise ValueError(
                        f"row {i} is empty and the map carries no scores for the top1 "
                        "fallback; rebuild the map from a similarity matrix or use "
                        "fallback='self'"
                    )
                out.append((i, int(nmap.top1[i])))
    if fell_back:
        logger.warning(
            "%d/%d rows had no neighbors; applied %s fallback (rows %s%s)",
            len(fell_back), nmap.n, fallback,
            fell_back[:10], "..." if len(fell_back) > 10 else "",
        )
    return np.asarray(out, dtype=np.int64).reshape(-1, 2)


def self_pairs(n: int) -> np.ndarray:
    """The (i, i) pairs of a conventional self-reconstruction autoencoder."""
    idx = np.arange(n, dtype=np.int64)
    return np.stack([idx, idx], axis=1)
