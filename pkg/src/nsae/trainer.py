"""Training loop: shuffled mini-batch SGD over (input, target) index pairs.

In neighbor mode each pair (i, j) asks the network to reconstruct vector j
from vector i; self mode degenerates to a conventional autoencoder with
pairs (i, i). Epochs are strictly sequential; the shuffle for epoch e is
seeded from (seed, e) so a run resumed at epoch e replays the original
stream.
"""

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, EmptyPairs, IndexOutOfRange, NonFiniteLoss
from .neighbors import self_pairs
from .net import LogDecay, backward_batch, init_autoencoder, lr_at, sgd_step
from .vecmath import as_dataset

logger = logging.getLogger(__name__)

# An epoch "improves" only if its loss beats the best so far by this much.
EARLY_STOP_TOLERANCE = 1e-7

MODES = ("neighbor", "self")


@dataclass
class TrainConfig:
    epochs: int = 400
    batch_size: int = 100
    schedule: object | None = None  # None -> LogDecay(1e-2, 1e-8, epochs)
    seed: int = 0
    patience: int = 20
    mode: str = "neighbor"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    def resolved_schedule(self):
        return self.schedule if self.schedule is not None else LogDecay(1e-2, 1e-8, self.epochs)


@dataclass
class TrainReport:
    loss_per_epoch: list = field(default_factory=list)
    epochs_run: int = 0
    stopped_early: bool = False
    final_lr: float = 0.0


def epoch_shuffle(seed: int, epoch: int, n: int) -> np.ndarray:
    """Deterministic permutation of range(n) for one epoch, keyed by (seed, epoch)."""
    return np.random.default_rng((seed, epoch)).permutation(n)


def config_fingerprint(arch, cfg: TrainConfig) -> str:
    """Short stable hash of a training configuration, stored in checkpoints."""
    sched = cfg.resolved_schedule()
    blob = json.dumps(
        {
            "arch": [int(a) for a in arch],
            "epochs": cfg.epochs,
            "batch_size": cfg.batch_size,
            "schedule": [type(sched).__name__] + [float(v) for v in vars(sched).values()],
            "seed": cfg.seed,
            "patience": cfg.patience,
            "mode": cfg.mode,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _checked_pairs(pairs, n: int) -> np.ndarray:
    p = np.asarray(pairs, dtype=np.int64)
    if p.size == 0:
        raise EmptyPairs("no training pairs")
    if p.ndim != 2 or p.shape[1] != 2:
        raise DimensionMismatch(f"pairs must be an (m, 2) array, got shape {p.shape}")
    if p.min() < 0 or p.max() >= n:
        raise IndexOutOfRange(f"pair index outside [0, {n})")
    return p


def train_nsae(dataset, pairs, arch, cfg: TrainConfig,
               checkpoint_dir: str | None = None, checkpoint_every: int = 50):
    """Train an autoencoder on neighbor-reconstruction pairs.

    Per epoch: shuffle the pairs with the (seed, epoch) RNG, split into
    batches of ``cfg.batch_size`` (last batch may be smaller), take one SGD
    step per batch at the scheduled rate, and record the pair-weighted mean
    loss. Stops after ``cfg.epochs`` epochs, or earlier once the best epoch
    loss has not improved by EARLY_STOP_TOLERANCE for ``cfg.patience``
    consecutive epochs.

    With ``cfg.mode == "self"`` the given pairs are ignored and every
    vector reconstructs itself (``pairs`` may then be None).

    Returns ``(params, TrainReport)``.
    """
    vs = as_dataset(dataset)
    n = vs.shape[0]
    arch = [int(a) for a in arch]
    if vs.shape[1] != arch[0]:
        raise DimensionMismatch(f"dataset dim {vs.shape[1]} does not match input layer {arch[0]}")
    if cfg.mode == "self":
        p = self_pairs(n)
    else:
        p = _checked_pairs(pairs, n)
    inputs_idx = p[:, 0]
    targets_idx = p[:, 1]
    m = p.shape[0]

    params = init_autoencoder(arch, cfg.seed)
    schedule = cfg.resolved_schedule()
    fingerprint = config_fingerprint(arch, cfg)

    report = TrainReport()
    best = math.inf
    stale = 0
    lr = lr_at(schedule, 0, cfg.epochs)
    for epoch in range(cfg.epochs):
        lr = lr_at(schedule, epoch, cfg.epochs)
        perm = epoch_shuffle(cfg.seed, epoch, m)
        loss_sum = 0.0
        for batch_no, start in enumerate(range(0, m, cfg.batch_size)):
            idx = perm[start : start + cfg.batch_size]
            loss, grads = backward_batch(params, vs[inputs_idx[idx]], vs[targets_idx[idx]])
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"epoch {epoch} batch {batch_no}: loss is {loss}")
            params = sgd_step(params, grads, lr)
            loss_sum += loss * idx.size
        epoch_loss = loss_sum / m
        report.loss_per_epoch.append(epoch_loss)
        report.epochs_run = epoch + 1
        report.final_lr = lr

        if checkpoint_dir is not None and checkpoint_every > 0 and (epoch + 1) % checkpoint_every == 0:
            _write_checkpoint(checkpoint_dir, f"epoch{epoch + 1:05d}", params, epoch + 1, cfg, fingerprint)

        if epoch_loss < best - EARLY_STOP_TOLERANCE:
            best = epoch_loss
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                report.stopped_early = True
                logger.info("early stop at epoch %d (no improvement for %d epochs)",
                            epoch, cfg.patience)
                break

    if checkpoint_dir is not None:
        _write_checkpoint(checkpoint_dir, "final", params, report.epochs_run, cfg, fingerprint)
    return params, report


def train_baseline(dataset, arch, cfg: TrainConfig,
                   checkpoint_dir: str | None = None, checkpoint_every: int = 50):
    """Conventional self-reconstruction training; identical to train_nsae
    with pairs (i, i)."""
    return train_nsae(dataset, None, arch, replace(cfg, mode="self"),
                      checkpoint_dir=checkpoint_dir, checkpoint_every=checkpoint_every)


def _write_checkpoint(directory, tag, params, epoch, cfg, fingerprint):
    from . import io as nio  # deferred: io imports net

    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"checkpoint_{tag}.nsc")
    nio.save_checkpoint(path, params, epoch=epoch, seed=cfg.seed, config_hash=fingerprint)
