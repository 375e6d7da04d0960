"""Brute-force reference implementations used only by tests.

Everything here is written with the simplest possible scalar algorithm
(plain Python loops, no vectorization) so the oracles share no code with
the library paths they check. Conventions that must agree with the
library (tie-breaking, accept-on-tie thresholds, EER interpolation) are
restated here independently.
"""

import math


def oracle_cosine(a, b) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    return dot / (math.sqrt(na) * math.sqrt(nb))


def oracle_pairwise(vectors):
    n = len(vectors)
    return [[oracle_cosine(vectors[i], vectors[j]) for j in range(n)] for i in range(n)]


def oracle_topk(sim, k: int):
    """Per row: full sort of the off-diagonal by (-score, index), take k."""
    n = len(sim)
    rows = []
    for i in range(n):
        candidates = [(-(sim[i][j]), j) for j in range(n) if j != i]
        candidates.sort()
        rows.append([j for _, j in candidates[: min(k, n - 1)]])
    return rows


def oracle_threshold(sim, t: float):
    n = len(sim)
    rows = []
    for i in range(n):
        candidates = [(-(sim[i][j]), j) for j in range(n) if j != i and sim[i][j] >= t]
        candidates.sort()
        rows.append([j for _, j in candidates])
    return rows


def oracle_forward(weights, biases, activations, x):
    """Scalar-loop forward pass; returns every layer's activation list."""
    acts = [list(x)]
    a = list(x)
    for w, b, kind in zip(weights, biases, activations):
        z = []
        for row in range(len(w)):
            s = b[row]
            for col in range(len(a)):
                s += w[row][col] * a[col]
            z.append(s)
        if kind == "relu":
            a = [v if v > 0.0 else 0.0 for v in z]
        else:
            a = z
        acts.append(a)
    return acts


def oracle_mse(x_hat, target) -> float:
    return sum((p - q) ** 2 for p, q in zip(x_hat, target)) / len(x_hat)


def oracle_eer(scores, matched):
    """Exhaustive threshold enumeration with accept-on-tie and linear
    interpolation at the FAR/FRR crossing. Returns (eer, accuracy)."""
    pos = [s for s, m in zip(scores, matched) if m]
    neg = [s for s, m in zip(scores, matched) if not m]
    thresholds = sorted(set(scores))
    thresholds.append(thresholds[-1] + 1.0)

    points = []
    for t in thresholds:
        far = sum(1 for s in neg if s >= t) / len(neg)
        frr = sum(1 for s in pos if s < t) / len(pos)
        points.append((far, frr))

    best_correct = 0
    for t in thresholds:
        correct = sum(1 for s in pos if s >= t) + sum(1 for s in neg if s < t)
        best_correct = max(best_correct, correct)
    accuracy = best_correct / (len(pos) + len(neg))

    for i, (far, frr) in enumerate(points):
        d = far - frr
        if d == 0.0:
            return far, accuracy
        if d < 0.0:
            far0, frr0 = points[i - 1]
            d0 = far0 - frr0
            alpha = d0 / (d0 - d)
            return far0 + alpha * (far - far0), accuracy
    raise AssertionError("no FAR/FRR crossing found")
