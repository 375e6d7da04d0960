"""File formats: vectors, checkpoints, neighbor maps, trials, scores, labels.

Binary formats are little-endian and fixed-width with a magic string and
an explicit version byte; loaders refuse rather than guess on anything
malformed, naming the byte offset or line number. Text formats are
tab-separated with no quoting so external tooling can consume them.

Vector file (binary), offsets in bytes::

    0   magic   b"NSVEC"
    5   version uint8 (currently 1)
    6   dtype   uint8 (1 = float64)
    7   n       uint64
    15  dim     uint64
    23  payload n*dim float64, row-major

Checkpoint file (binary)::

    0   magic     b"NSCKP"
    5   version   uint8 (currently 1)
    6   n_sizes   uint32
    10  sizes     uint32 * n_sizes
    .   acts      uint8 * (n_sizes - 1)   (0 = linear, 1 = relu)
    .   bottleneck uint32
    .   epoch     uint32
    .   seed      int64
    .   hash_len  uint16, then hash_len bytes of utf-8 config hash
    .   per layer: weight matrix float64 row-major, then bias vector

Text formats: vectors as CSV (one vector per line, %.17g), neighbor maps
as ``i: j1,j2,...`` under a ``# mode: ...`` header, trials as
``a<TAB>b<TAB>{1|0}``, scores as ``a<TAB>b<TAB>{1|0}<TAB>score`` under a
``# source: ...`` header, labels as one integer per line, and training
logs as ``epoch<TAB>loss<TAB>lr``.
"""

import os
import struct
import tempfile

import numpy as np

from .errors import (
    CorruptHeader,
    DimInconsistent,
    FormatVersionMismatch,
    IndexOutOfRange,
    LengthMismatch,
    NonFiniteValue,
    ParseError,
    TruncatedPayload,
)
from .evaluate import ScoreSet, TrialList
from .neighbors import NeighborMap
from .net import ACT_LINEAR, ACT_RELU, AutoencoderParams
from .trainer import TrainReport
from .vecmath import as_dataset

VECTOR_MAGIC = b"NSVEC"
CHECKPOINT_MAGIC = b"NSCKP"
FORMAT_VERSION = 1
DTYPE_FLOAT64 = 1

_ACT_TAGS = {ACT_LINEAR: 0, ACT_RELU: 1}
_ACT_NAMES = {v: k for k, v in _ACT_TAGS.items()}


def atomic_write_bytes(path: str, data: bytes):
    """Write via a temp file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


# -- vectors --------------------------------------------------------------------

def save_vectors(path: str, vectors, fmt: str = "binary"):
    vs = as_dataset(vectors)
    if fmt == "binary":
        header = struct.pack("<5sBBQQ", VECTOR_MAGIC, FORMAT_VERSION, DTYPE_FLOAT64,
                             vs.shape[0], vs.shape[1])
        atomic_write_bytes(path, header + np.ascontiguousarray(vs, dtype="<f8").tobytes())
    elif fmt == "csv":
        lines = [",".join(f"{x:.17g}" for x in row) for row in vs]
        atomic_write_text(path, "\n".join(lines) + "\n")
    else:
        raise ValueError(f"fmt must be 'binary' or 'csv', got {fmt!r}")


def load_vectors(path: str) -> np.ndarray:
    """Load a vector file, sniffing binary by magic, else parsing as CSV."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) == 0:
        raise CorruptHeader(f"{path}: empty file")
    if blob[:5] == VECTOR_MAGIC:
        return _parse_binary_vectors(path, blob)
    return _parse_csv_vectors(path, blob)


def _parse_binary_vectors(path: str, blob: bytes) -> np.ndarray:
    header_size = struct.calcsize("<5sBBQQ")
    if len(blob) < header_size:
        raise CorruptHeader(f"{path}: header truncated at byte {len(blob)} of {header_size}")
    _, version, dtype, n, dim = struct.unpack_from("<5sBBQQ", blob)
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"{path}: version {version}, expected {FORMAT_VERSION}")
    if dtype != DTYPE_FLOAT64:
        raise CorruptHeader(f"{path}: unknown dtype tag {dtype} at byte 6")
    if dim < 1:
        raise CorruptHeader(f"{path}: dim must be >= 1, got {dim}")
    expected = header_size + n * dim * 8
    if len(blob) < expected:
        raise TruncatedPayload(f"{path}: payload ends at byte {len(blob)}, expected {expected}")
    if len(blob) > expected:
        raise CorruptHeader(f"{path}: {len(blob) - expected} trailing bytes after byte {expected}")
    vs = np.frombuffer(blob, dtype="<f8", offset=header_size).reshape(n, dim).copy()
    if not np.all(np.isfinite(vs)):
        raise NonFiniteValue(f"{path}: payload contains NaN or Inf")
    return vs


def _parse_csv_vectors(path: str, blob: bytes) -> np.ndarray:
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorruptHeader(f"{path}: not a vector file (bad magic, not utf-8)") from e
    rows = []
    dim = None
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if dim is None:
            dim = len(fields)
        elif len(fields) != dim:
            raise DimInconsistent(f"{path}: line {ln}: expected {dim} values, got {len(fields)}")
        try:
            rows.append([float(x) for x in fields])
        except ValueError as e:
            raise ParseError(f"{path}: line {ln}: {e}") from e
    if not rows:
        raise CorruptHeader(f"{path}: no vector rows found")
    vs = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(vs)):
        raise NonFiniteValue(f"{path}: contains NaN or Inf")
    return vs


# -- checkpoints ------------------------------------------------------------------

def save_checkpoint(path: str, params: AutoencoderParams, epoch: int = 0, seed: int = 0,
                    config_hash: str = ""):
    sizes = params.layer_sizes
    hash_bytes = config_hash.encode("utf-8")
    parts = [
        struct.pack("<5sBI", CHECKPOINT_MAGIC, FORMAT_VERSION, len(sizes)),
        struct.pack(f"<{len(sizes)}I", *sizes),
        struct.pack(f"<{len(sizes) - 1}B", *(_ACT_TAGS[a] for a in params.activations)),
        struct.pack("<IIqH", params.bottleneck_index, epoch, seed, len(hash_bytes)),
        hash_bytes,
    ]
    for w, b in zip(params.weights, params.biases):
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    atomic_write_bytes(path, b"".join(parts))


def load_checkpoint(path: str):
    """Load a checkpoint; returns (AutoencoderParams, metadata dict)."""
    with open(path, "rb") as f:
        blob = f.read()

    def need(offset, count, what):
        if len(blob) < offset + count:
            raise TruncatedPayload(f"{path}: {what} truncated at byte {len(blob)}, "
                                   f"expected {offset + count}")

    need(0, 10, "header")
    magic, version, n_sizes = struct.unpack_from("<5sBI", blob)
    if magic != CHECKPOINT_MAGIC:
        raise CorruptHeader(f"{path}: bad magic {magic!r} at byte 0")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"{path}: version {version}, expected {FORMAT_VERSION}")
    if n_sizes < 3:
        raise CorruptHeader(f"{path}: need >= 3 layer sizes, got {n_sizes}")
    off = 10
    need(off, 4 * n_sizes, "layer sizes")
    sizes = struct.unpack_from(f"<{n_sizes}I", blob, off)
    off += 4 * n_sizes
    need(off, n_sizes - 1, "activation tags")
    tags = struct.unpack_from(f"<{n_sizes - 1}B", blob, off)
    off += n_sizes - 1
    if any(t not in _ACT_NAMES for t in tags):
        raise CorruptHeader(f"{path}: unknown activation tag near byte {off}")
    need(off, 18, "metadata")
    bottleneck, epoch, seed, hash_len = struct.unpack_from("<IIqH", blob, off)
    off += 18
    need(off, hash_len, "config hash")
    config_hash = blob[off : off + hash_len].decode("utf-8")
    off += hash_len

    if sizes != sizes[::-1]:
        raise CorruptHeader(f"{path}: layer sizes {sizes} are not symmetric")
    if bottleneck >= n_sizes:
        raise CorruptHeader(f"{path}: bottleneck index {bottleneck} out of range")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        need(off, fan_out * fan_in * 8, "weight matrix")
        w = np.frombuffer(blob, dtype="<f8", count=fan_out * fan_in, offset=off)
        weights.append(w.reshape(fan_out, fan_in).copy())
        off += fan_out * fan_in * 8
        need(off, fan_out * 8, "bias vector")
        biases.append(np.frombuffer(blob, dtype="<f8", count=fan_out, offset=off).copy())
        off += fan_out * 8
    if len(blob) != off:
        raise CorruptHeader(f"{path}: {len(blob) - off} trailing bytes after byte {off}")
    for arr in weights + biases:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"{path}: parameters contain NaN or Inf")
    params = AutoencoderParams(
        tuple(int(s) for s in sizes), weights, biases,
        tuple(_ACT_NAMES[t] for t in tags), int(bottleneck),
    )
    return params, {"epoch": int(epoch), "seed": int(seed), "config_hash": config_hash}


# -- neighbor maps -----------------------------------------------------------------

def save_neighbor_map(path: str, nmap: NeighborMap):
    param = f"{int(nmap.param)}" if nmap.mode == "topk" else f"{nmap.param:.17g}"
    lines = [f"# mode: {nmap.mode} {param}"]
    for i, js in enumerate(nmap.neighbors):
        tail = ",".join(str(j) for j in js)
        lines.append(f"{i}: {tail}" if tail else f"{i}:")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_neighbor_map(path: str) -> NeighborMap:
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith("# mode: "):
        raise ParseError(f"{path}: line 1: expected '# mode: <topk|threshold> <param>' header")
    try:
        mode, param_text = lines[0][len("# mode: "):].split()
        param = float(param_text)
    except ValueError as e:
        raise ParseError(f"{path}: line 1: malformed mode header") from e
    if mode not in ("topk", "threshold"):
        raise ParseError(f"{path}: line 1: unknown mode {mode!r}")

    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        head, _, tail = line.partition(":")
        try:
            idx = int(head)
        except ValueError as e:
            raise ParseError(f"{path}: line {ln}: bad row index {head!r}") from e
        if idx != len(rows):
            raise ParseError(f"{path}: line {ln}: expected row {len(rows)}, got {idx}")
        tail = tail.strip()
        try:
            js = [int(t) for t in tail.split(",")] if tail else []
        except ValueError as e:
            raise ParseError(f"{path}: line {ln}: bad neighbor list") from e
        if idx in js:
            raise ParseError(f"{path}: line {ln}: self-loop {idx}")
        if len(set(js)) != len(js):
            raise ParseError(f"{path}: line {ln}: duplicate neighbor index")
        rows.append(js)
    n = len(rows)
    if n < 2:
        raise ParseError(f"{path}: need at least 2 rows, got {n}")
    for ln, js in enumerate(rows):
        for j in js:
            if not 0 <= j < n:
                raise IndexOutOfRange(f"{path}: line {ln + 2}: neighbor {j} outside [0, {n})")
    if mode == "topk":
        want = min(int(param), n - 1)
        for ln, js in enumerate(rows):
            if len(js) != want:
                raise ParseError(
                    f"{path}: line {ln + 2}: topk row has {len(js)} neighbors, expected {want}"
                )
    return NeighborMap(rows, mode, param, top1=None)


# -- trials and scores ----------------------------------------------------------

def save_trials(path: str, trials: TrialList):
    lines = [f"{a}\t{b}\t{1 if m else 0}"
             for (a, b), m in zip(trials.pairs, trials.matched)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_trial_fields(path, ln, fields, n):
    try:
        a, b = int(fields[0]), int(fields[1])
    except ValueError as e:
        raise ParseError(f"{path}: line {ln}: bad trial indices") from e
    if fields[2] not in ("0", "1"):
        raise ParseError(f"{path}: line {ln}: label must be 0 or 1, got {fields[2]!r}")
    if n is not None and not (0 <= a < n and 0 <= b < n):
        raise IndexOutOfRange(f"{path}: line {ln}: trial index outside [0, {n})")
    return a, b, fields[2] == "1"


def load_trials(path: str, n: int | None = None) -> TrialList:
    """Load a trial file; validates indices against ``n`` when given."""
    pairs, matched = [], []
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(f"{path}: line {ln}: expected 3 tab-separated fields")
            a, b, m = _parse_trial_fields(path, ln, fields, n)
            pairs.append((a, b))
            matched.append(m)
    if not pairs:
        raise ParseError(f"{path}: no trials found")
    return TrialList(np.asarray(pairs), np.asarray(matched))


def save_scores(path: str, scores: ScoreSet, trials: TrialList):
    if len(scores) != len(trials):
        raise LengthMismatch(f"{len(scores)} scores but {len(trials)} trials")
    lines = [f"# source: {scores.source}"]
    for (a, b), m, s in zip(trials.pairs, trials.matched, scores.scores):
        lines.append(f"{a}\t{b}\t{1 if m else 0}\t{s:.17g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_scores(path: str):
    """Load a score file; returns (ScoreSet, TrialList)."""
    source = ""
    pairs, matched, scores = [], [], []
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("# source: "):
                source = line[len("# source: "):]
                continue
            if line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ParseError(f"{path}: line {ln}: expected 4 tab-separated fields")
            a, b, m = _parse_trial_fields(path, ln, fields[:3], None)
            try:
                s = float(fields[3])
            except ValueError as e:
                raise ParseError(f"{path}: line {ln}: bad score {fields[3]!r}") from e
            pairs.append((a, b))
            matched.append(m)
            scores.append(s)
    if not scores:
        raise ParseError(f"{path}: no score rows found")
    return (ScoreSet(np.asarray(scores), source=source),
            TrialList(np.asarray(pairs), np.asarray(matched)))


# -- labels and training logs ------------------------------------------------------

def save_labels(path: str, labels):
    atomic_write_text(path, "\n".join(str(int(x)) for x in labels) + "\n")


def load_labels(path: str) -> np.ndarray:
    out = []
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                out.append(int(line))
            except ValueError as e:
                raise ParseError(f"{path}: line {ln}: bad label {line.strip()!r}") from e
    if not out:
        raise ParseError(f"{path}: no labels found")
    return np.asarray(out, dtype=np.int64)


def save_train_log(path: str, report: TrainReport, schedule, total_epochs: int):
    """Write the per-epoch log as epoch<TAB>loss<TAB>lr lines."""
    from .net import lr_at

    lines = [
        f"{epoch}\t{loss:.17g}\t{lr_at(schedule, epoch, total_epochs):.17g}"
        for epoch, loss in enumerate(report.loss_per_epoch)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")
