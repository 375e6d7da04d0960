"""Dense vector primitives and cosine-similarity kernels.

Everything here accepts array-likes and computes in float64: dot products
and norms accumulate at 64-bit precision regardless of the storage dtype,
which matters once vectors reach image-flattening dimensions. Zero-norm
vectors are a hard error everywhere -- they indicate corrupt input, and
silently scoring them 0 would distort neighbor selection downstream.
"""

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue, ZeroVector

# Euclidean norms below this count as zero.
ZERO_NORM_EPS = 1e-12


def as_vector(values) -> np.ndarray:
    """Coerce to a finite 1-D float64 vector, validating as we go."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue("vector contains NaN or Inf entries")
    return v


def as_dataset(vectors) -> np.ndarray:
    """Coerce a sequence of equal-length vectors to a finite (n, d) float64 array."""
    m = np.asarray(vectors, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.shape[1] == 0:
        raise DimensionMismatch(f"expected an (n, d) array with d >= 1, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue("dataset contains NaN or Inf entries")
    return m


def cosine_score(a, b) -> float:
    """Cosine similarity dot(a, b) / (|a| * |b|), clipped to [-1, 1].

    Raises DimensionMismatch if lengths differ and ZeroVector if either
    norm is below ZERO_NORM_EPS. Bit-identical inputs score exactly 1.0
    (the general formula can land one ulp away for duplicated vectors).
    """
    a = as_vector(a)
    b = as_vector(b)
    if a.size != b.size:
        raise DimensionMismatch(f"vector dims differ: {a.size} vs {b.size}")
    na = float(np.sqrt(np.dot(a, a)))
    nb = float(np.sqrt(np.dot(b, b)))
    if na < ZERO_NORM_EPS:
        raise ZeroVector(f"first vector has norm {na:.3e}")
    if nb < ZERO_NORM_EPS:
        raise ZeroVector(f"second vector has norm {nb:.3e}")
    if np.array_equal(a, b):
        return 1.0
    score = float(np.dot(a, b)) / (na * nb)
    return min(1.0, max(-1.0, score))


def l2_normalize(a) -> np.ndarray:
    """Scale a vector to unit Euclidean norm."""
    a = as_vector(a)
    norm = float(np.sqrt(np.dot(a, a)))
    if norm < ZERO_NORM_EPS:
        raise ZeroVector(f"cannot normalize vector with norm {norm:.3e}")
    return a / norm


def pairwise_cosine(dataset) -> np.ndarray:
    """All-pairs cosine similarity matrix for an (n, d) dataset.

    Computes the upper triangle and mirrors it, so the result is symmetric
    by construction. Entries are clipped to [-1, 1]. A zero-norm row raises
    ZeroVector naming the offending index.
    """
    vs = as_dataset(dataset)
    norms = np.sqrt(np.einsum("ij,ij->i", vs, vs))
    bad = np.flatnonzero(norms < ZERO_NORM_EPS)
    if bad.size:
        raise ZeroVector(f"vector {bad[0]} has zero norm")
    unit = vs / norms[:, None]
    sim = unit @ unit.T
    sim = np.triu(sim) + np.triu(sim, 1).T
    np.clip(sim, -1.0, 1.0, out=sim)
    return sim
