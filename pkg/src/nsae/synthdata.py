"""Deterministic synthetic identity clusters for desk-scale experiments.

Each identity is a random unit direction; each sample adds per-coordinate
Gaussian session noise to its identity's centroid and renormalizes.
Normals come from an explicit Box-Muller transform over a counter-based
Philox stream, so the same config yields bit-identical datasets on every
platform. Labels exist solely for building evaluation trials -- neighbor
selection and training have no way to receive them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientPairs
from .evaluate import TrialList
from .vecmath import ZERO_NORM_EPS

@dataclass
class SynthConfig:
    n_identities: int
    samples_per_identity: int
    dim: int
    session_noise: float
    seed: int

    def __post_init__(self):
        if self.n_identities < 2:
            raise ValueError(f"need >= 2 identities, got {self.n_identities}")
        if self.samples_per_identity < 2:
            raise ValueError(f"need >= 2 samples per identity, got {self.samples_per_identity}")
        if self.dim < 2:
            raise ValueError(f"need dim >= 2, got {self.dim}")
        if self.session_noise < 0.0:
            raise ValueError(f"session_noise must be >= 0, got {self.session_noise}")


@dataclass
class LabeledDataset:
    vectors: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64 identity ids

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normals via Box-Muller on uniform pairs from ``rng``."""
    half = (size + 1) // 2
    u = rng.random((half, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # log(1-u), u in [0,1) -> finite
    angle = 2.0 * np.pi * u[:, 1]
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:size]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.sqrt(np.dot(v, v))


def generate(cfg: SynthConfig) -> LabeledDataset:
    """Build the labeled dataset described by ``cfg``; pure given the seed."""
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    centroids = np.empty((cfg.n_identities, cfg.dim))
    for i in range(cfg.n_identities):
        c = box_muller(rng, cfg.dim)
        while np.sqrt(np.dot(c, c)) < ZERO_NORM_EPS:  # vanishing draw, practically never
            c = box_muller(rng, cfg.dim)
        centroids[i] = _unit(c)

    n = cfg.n_identities * cfg.samples_per_identity
    vectors = np.empty((n, cfg.dim))
    labels = np.empty(n, dtype=np.int64)
    row = 0
    for ident in range(cfg.n_identities):
        for _ in range(cfg.samples_per_identity):
            x = centroids[ident] + cfg.session_noise * box_muller(rng, cfg.dim)
            vectors[row] = _unit(x)
            labels[row] = ident
            row += 1
    return LabeledDataset(vectors, labels)


def make_trials(ds: LabeledDataset, n_matched: int, n_mismatched: int, seed: int) -> TrialList:
    """Sample matched and mismatched index pairs uniformly without replacement.

    Matched trials come first, then mismatched. Deterministic given seed.
    """
    labels = ds.labels
    i_idx, j_idx = np.triu_indices(ds.n, k=1)
    same = labels[i_idx] == labels[j_idx]
    same_pairs = np.stack([i_idx[same], j_idx[same]], axis=1)
    diff_pairs = np.stack([i_idx[~same], j_idx[~same]], axis=1)
    if same_pairs.shape[0] < n_matched:
        raise InsufficientPairs(
            f"only {same_pairs.shape[0]} matched pairs available, need {n_matched}"
        )
    if diff_pairs.shape[0] < n_mismatched:
        raise InsufficientPairs(
            f"only {diff_pairs.shape[0]} mismatched pairs available, need {n_mismatched}"
        )
    rng = np.random.Generator(np.random.Philox(seed))
    take_same = rng.choice(same_pairs.shape[0], size=n_matched, replace=False)
    take_diff = rng.choice(diff_pairs.shape[0], size=n_mismatched, replace=False)
    pairs = np.concatenate([same_pairs[take_same], diff_pairs[take_diff]])
    matched = np.concatenate([np.ones(n_matched, dtype=bool), np.zeros(n_mismatched, dtype=bool)])
    return TrialList(pairs, matched)
