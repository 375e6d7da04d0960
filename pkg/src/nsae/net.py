"""Fully connected autoencoder built from scratch: init, forward, loss,
backprop, SGD, and learning-rate schedules.

Conventions, fixed so the numeric tests have something exact to check:

- ``weights[l]`` has shape (fan_out, fan_in) and maps activations
  ``a[l]`` to pre-activations ``z[l+1] = a[l] @ W.T + b``.
- Hidden layers apply ReLU, the output layer is linear. The ReLU
  derivative at exactly 0 is taken as 0.
- Per-pair loss is the mean over coordinates of the squared error, so for
  the output layer ``dL/dz = 2/d * (reconstruction - target)``. Batch
  gradients are the mean of per-pair gradients, making magnitudes
  batch-size independent.
- Everything is float64.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricArchitecture,
    BadLayerSize,
    DimensionMismatch,
    EpochOutOfRange,
    NonFiniteActivation,
    ShapeMismatch,
)
from .vecmath import as_vector

ACT_RELU = "relu"
ACT_LINEAR = "linear"

# Reference architecture for 112x112 flattened image vectors. Desk-scale
# work uses much smaller symmetric stacks like (64, 32, 16, 32, 64).
DEFAULT_LAYER_SIZES = (12544, 800, 300, 800, 12544)


@dataclass(eq=False)
class AutoencoderParams:
    """Weights and biases of a symmetric encoder-decoder stack."""

    layer_sizes: tuple
    weights: list  # (fan_out, fan_in) float64 per layer
    biases: list  # (fan_out,) float64 per layer
    activations: tuple  # one tag per weight layer, last is "linear"
    bottleneck_index: int  # position of the encoder output in layer_sizes

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def bottleneck_dim(self) -> int:
        return self.layer_sizes[self.bottleneck_index]


@dataclass
class Gradients:
    """Loss gradients, shape-congruent with AutoencoderParams."""

    weights: list
    biases: list


@dataclass
class LogDecay:
    """Learning rate decaying log-linearly from ``start`` to ``end``.

    ``total_epochs`` is the nominal span; training runs may override it
    with their own epoch count.
    """

    start: float
    end: float
    total_epochs: int

    def __post_init__(self):
        if not self.start > self.end > 0.0:
            raise ValueError(f"need start > end > 0, got start={self.start}, end={self.end}")
        if self.total_epochs < 1:
            raise ValueError(f"total_epochs must be >= 1, got {self.total_epochs}")


@dataclass
class ConstantWithDecay:
    """Inverse-time decay lr0 / (1 + decay * epoch)."""

    lr0: float
    decay: float

    def __post_init__(self):
        if self.lr0 <= 0.0:
            raise ValueError(f"lr0 must be > 0, got {self.lr0}")
        if self.decay < 0.0:
            raise ValueError(f"decay must be >= 0, got {self.decay}")


def init_autoencoder(layer_sizes, seed: int) -> AutoencoderParams:
    """Deterministically initialize a symmetric autoencoder.

    Weights are drawn uniformly from [-s, s] with s = sqrt(6 / (fan_in +
    fan_out)) per layer; biases start at zero. The bottleneck is the
    smallest layer (the center, when the center attains the minimum).
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 3:
        raise BadLayerSize(f"need at least 3 layer sizes (input, bottleneck, output), got {sizes}")
    if any(s < 1 for s in sizes):
        raise BadLayerSize(f"layer sizes must be >= 1, got {sizes}")
    if sizes != sizes[::-1]:
        raise AsymmetricArchitecture(f"layer sizes must read the same reversed, got {sizes}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    activations = tuple([ACT_RELU] * (len(sizes) - 2) + [ACT_LINEAR])
    center = (len(sizes) - 1) // 2
    bottleneck = center if sizes[center] == min(sizes) else int(np.argmin(sizes))
    return AutoencoderParams(sizes, weights, biases, activations, bottleneck)


def _run_layers(p: AutoencoderParams, x_batch: np.ndarray):
    """Forward a (B, d) batch; returns per-layer pre-activations and activations."""
    a = x_batch
    zs = []
    acts = [a]
    for w, b, kind in zip(p.weights, p.biases, p.activations):
        z = a @ w.T + b
        a = np.maximum(z, 0.0) if kind == ACT_RELU else z
        zs.append(z)
        acts.append(a)
    return zs, acts


def _check_input(p: AutoencoderParams, x_batch: np.ndarray):
    if x_batch.shape[1] != p.input_dim:
        raise DimensionMismatch(
            f"input dim {x_batch.shape[1]} does not match network input {p.input_dim}"
        )


def forward(p: AutoencoderParams, x):
    """Run one vector through the network.

    Returns ``(bottleneck, reconstruction)``: the encoder output and the
    decoder output.
    """
    x = as_vector(x)
    xb = x.reshape(1, -1)
    _check_input(p, xb)
    _, acts = _run_layers(p, xb)
    return acts[p.bottleneck_index][0], acts[-1][0]


def forward_batch(p: AutoencoderParams, x_batch: np.ndarray):
    """Batch forward; returns (bottlenecks, reconstructions) as (B, .) arrays."""
    x_batch = np.asarray(x_batch, dtype=np.float64)
    _check_input(p, x_batch)
    _, acts = _run_layers(p, x_batch)
    return acts[p.bottleneck_index], acts[-1]


def mse_loss(x_hat, target) -> float:
    """Mean over coordinates of the squared difference."""
    x_hat = as_vector(x_hat)
    target = as_vector(target)
    if x_hat.size != target.size:
        raise DimensionMismatch(f"vector dims differ: {x_hat.size} vs {target.size}")
    diff = x_hat - target
    return float(np.dot(diff, diff)) / x_hat.size


def backward_batch(p: AutoencoderParams, x_batch: np.ndarray, target_batch: np.ndarray):
    """Mean loss and mean gradients over a (B, d) batch of (input, target) rows."""
    x_batch = np.asarray(x_batch, dtype=np.float64)
    target_batch = np.asarray(target_batch, dtype=np.float64)
    _check_input(p, x_batch)
    if target_batch.shape != (x_batch.shape[0], p.layer_sizes[-1]):
        raise DimensionMismatch(
            f"target shape {target_batch.shape} does not match "
            f"({x_batch.shape[0]}, {p.layer_sizes[-1]})"
        )
    zs, acts = _run_layers(p, x_batch)
    for layer, z in enumerate(zs):
        if not np.all(np.isfinite(z)):
            raise NonFiniteActivation(f"non-finite pre-activation in layer {layer}")
    batch, d_out = target_batch.shape
    recon = acts[-1]
    resid = recon - target_batch
    loss = float(np.einsum("ij,ij->", resid, resid)) / (batch * d_out)

    n_layers = len(p.weights)
    g_w = [None] * n_layers
    g_b = [None] * n_layers
    delta = (2.0 / (batch * d_out)) * resid  # dL/dz at the linear output
    for layer in range(n_layers - 1, -1, -1):
        g_w[layer] = delta.T @ acts[layer]
        g_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = delta @ p.weights[layer]
            if p.activations[layer - 1] == ACT_RELU:
                delta = delta * (zs[layer - 1] > 0.0)
    return loss, Gradients(g_w, g_b)


def backward(p: AutoencoderParams, x, target):
    """Loss and gradients for a single (input, target) pair."""
    x = as_vector(x)
    target = as_vector(target)
    return backward_batch(p, x.reshape(1, -1), target.reshape(1, -1))


def sgd_step(p: AutoencoderParams, g: Gradients, lr: float) -> AutoencoderParams:
    """Plain gradient step: every parameter moves by -lr * gradient."""
    if lr <= 0.0:
        raise ValueError(f"learning rate must be > 0, got {lr}")
    if len(g.weights) != len(p.weights) or len(g.biases) != len(p.biases):
        raise ShapeMismatch("gradient layer count does not match parameters")
    for w, gw, b, gb in zip(p.weights, g.weights, p.biases, g.biases):
        if w.shape != gw.shape or b.shape != gb.shape:
            raise ShapeMismatch(
                f"gradient shapes {gw.shape}/{gb.shape} do not match {w.shape}/{b.shape}"
            )
    new_w = [w - lr * gw for w, gw in zip(p.weights, g.weights)]
    new_b = [b - lr * gb for b, gb in zip(p.biases, g.biases)]
    return AutoencoderParams(p.layer_sizes, new_w, new_b, p.activations, p.bottleneck_index)


def lr_at(schedule, epoch: int, total_epochs: int | None = None) -> float:
    """Learning rate at a given epoch.

    For LogDecay the rate moves log-linearly from start (epoch 0) to end
    (last epoch) over ``total_epochs`` (the schedule's own span unless
    overridden). ConstantWithDecay ignores the span.
    """
    if isinstance(schedule, LogDecay):
        total = int(total_epochs) if total_epochs is not None else schedule.total_epochs
        if not 0 <= epoch < total:
            raise EpochOutOfRange(f"epoch {epoch} outside [0, {total})")
        if total == 1:
            return schedule.start
        frac = epoch / (total - 1)
        lo = math.log10(schedule.start)
        hi = math.log10(schedule.end)
        return 10.0 ** (lo + frac * (hi - lo))
    if isinstance(schedule, ConstantWithDecay):
        if epoch < 0 or (total_epochs is not None and epoch >= total_epochs):
            raise EpochOutOfRange(f"epoch {epoch} outside [0, {total_epochs})")
        return schedule.lr0 / (1.0 + schedule.decay * epoch)
    raise TypeError(f"unknown schedule type {type(schedule).__name__}")
