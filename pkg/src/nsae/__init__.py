"""Neighbor-reconstruction autoencoder toolkit.

Train an autoencoder to reconstruct each vector's most cosine-similar
neighbors instead of the vector itself, extract embeddings from the
trained network, and evaluate verification trials with cosine scoring,
EER, and score-level fusion. No labels are used anywhere in training.
"""

__version__ = "0.1.0"

from .embed import extract_all, extract_embedding
from .evaluate import (
    EvalReport,
    FusionConfig,
    ScoreSet,
    TrialList,
    compute_eer,
    fuse_scores,
    render_report,
    score_trials,
    sweep_report,
)
from .neighbors import NeighborMap, build_training_pairs, select_threshold, select_topk, self_pairs
from .net import (
    AutoencoderParams,
    ConstantWithDecay,
    Gradients,
    LogDecay,
    backward,
    backward_batch,
    forward,
    forward_batch,
    init_autoencoder,
    lr_at,
    mse_loss,
    sgd_step,
)
from .synthdata import LabeledDataset, SynthConfig, generate, make_trials
from .trainer import TrainConfig, TrainReport, train_baseline, train_nsae
from .vecmath import cosine_score, l2_normalize, pairwise_cosine

__all__ = [
    "AutoencoderParams",
    "ConstantWithDecay",
    "EvalReport",
    "FusionConfig",
    "Gradients",
    "LabeledDataset",
    "LogDecay",
    "NeighborMap",
    "ScoreSet",
    "SynthConfig",
    "TrainConfig",
    "TrainReport",
    "TrialList",
    "backward",
    "backward_batch",
    "build_training_pairs",
    "compute_eer",
    "cosine_score",
    "extract_all",
    "extract_embedding",
    "forward",
    "forward_batch",
    "fuse_scores",
    "generate",
    "init_autoencoder",
    "l2_normalize",
    "lr_at",
    "make_trials",
    "mse_loss",
    "pairwise_cosine",
    "render_report",
    "score_trials",
    "select_threshold",
    "select_topk",
    "self_pairs",
    "sgd_step",
    "sweep_report",
    "train_baseline",
    "train_nsae",
]
