"""Embedding extraction from a trained autoencoder.

Two taps are available: "bottleneck" (the encoder output, the default)
and "output" (the decoder reconstruction, same dimension as the input).
Embeddings are L2-normalized by default since downstream scoring is
cosine; pass normalize=False to read the raw activations.
"""

import numpy as np

from .errors import NsaeError
from .net import AutoencoderParams, forward
from .vecmath import as_dataset, l2_normalize

TAPS = ("bottleneck", "output")


def _check_tap(tap: str):
    if tap not in TAPS:
        raise ValueError(f"tap must be one of {TAPS}, got {tap!r}")


def extract_embedding(p: AutoencoderParams, x, tap: str = "bottleneck",
                      normalize: bool = True) -> np.ndarray:
    """Convert one vector into its learned representation."""
    _check_tap(tap)
    bottleneck, reconstruction = forward(p, x)
    emb = bottleneck if tap == "bottleneck" else reconstruction
    return l2_normalize(emb) if normalize else emb


def extract_all(p: AutoencoderParams, dataset, tap: str = "bottleneck",
                normalize: bool = True) -> np.ndarray:
    """Elementwise extract_embedding over a dataset, order preserved.

    Failures are re-raised naming the first offending index.
    """
    _check_tap(tap)
    data = np.asarray(dataset, dtype=np.float64)
    out_dim = p.bottleneck_dim if tap == "bottleneck" else p.layer_sizes[-1]
    if data.size == 0:
        return np.zeros((0, out_dim))
    vs = as_dataset(data)
    rows = []
    for i in range(vs.shape[0]):
        try:
            rows.append(extract_embedding(p, vs[i], tap=tap, normalize=normalize))
        except NsaeError as e:
            raise type(e)(f"vector {i}: {e}") from e
    return np.stack(rows)
