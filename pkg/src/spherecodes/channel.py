"""The noisy channel: mixture sampling with hidden ground-truth labels.

Each sample is Y = X_label + sigma * Z with a uniform hidden label and
standard Gaussian noise. Labels stay attached to the batch for evaluation
and for the genie baseline, but algorithm code must go through
observations(), which never exposes them. privileged_labels() is the
deliberate, greppable escape hatch for evaluation code only.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook

_MAGIC = b"SPHBAT01"
_VERSION = 1


@dataclass(frozen=True)
class GmmBatch:
    """n channel outputs with hidden labels.

    sigma2 is the per-coordinate noise variance actually used (0 for
    noiseless batches). codebook_id ties the batch to its generator for
    bookkeeping; it is not used numerically.
    """

    _samples: np.ndarray  # (n, d)
    _labels: np.ndarray  # (n,) ints in [0, k)
    sigma2: float
    codebook_id: int = field(default=0)

    def __post_init__(self):
        s = np.ascontiguousarray(np.asarray(self._samples, dtype=np.float64))
        l = np.ascontiguousarray(np.asarray(self._labels, dtype=np.int64))
        if s.ndim != 2 or l.ndim != 1 or s.shape[0] != l.shape[0]:
            raise ValueError("samples and labels must be (n, d) and (n,)")
        if s.shape[0] < 1:
            raise ValueError("batch must contain at least one sample")
        object.__setattr__(self, "_samples", s)
        object.__setattr__(self, "_labels", l)

    @property
    def n(self) -> int:
        return self._samples.shape[0]

    @property
    def d(self) -> int:
        return self._samples.shape[1]

    def observations(self) -> np.ndarray:
        """Read-only (n, d) view of the samples. No labels."""
        v = self._samples.view()
        v.flags.writeable = False
        return v

    def privileged_labels(self) -> np.ndarray:
        """Ground-truth labels. Evaluation and genie baseline ONLY."""
        v = self._labels.view()
        v.flags.writeable = False
        return v


def _draw_labels(k: int, n: int, rng: np.random.Generator, stratified: bool) -> np.ndarray:
    if stratified:
        if n % k != 0:
            raise ValueError(f"stratified batch needs k | n, got n={n}, k={k}")
        return np.repeat(np.arange(k, dtype=np.int64), n // k)
    return rng.integers(0, k, size=n, dtype=np.int64)


def sample_gmm(
    cb: Codebook,
    sigma2: float,
    n: int,
    rng: np.random.Generator,
    stratified: bool = False,
) -> GmmBatch:
    """n draws of Y = X_label + sigma * Z.

    Labels uniform on [k] (or exactly n/k each in stratified mode), noise
    standard Gaussian, independent of the labels. Deterministic given the
    rng state.

    Args:
        stratified: exact per-label balance, for the genie baseline.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if sigma2 <= 0:
        raise ValueError(
            f"sigma2 must be > 0, got {sigma2}; use sample_noiseless for sigma=0"
        )
    labels = _draw_labels(cb.k, n, rng, stratified)
    noise = rng.standard_normal((n, cb.d))
    samples = cb.centers[labels] + np.sqrt(sigma2) * noise
    return GmmBatch(samples, labels, float(sigma2), codebook_id=id(cb))


def sample_noiseless(
    cb: Codebook, n: int, rng: np.random.Generator, stratified: bool = False
) -> GmmBatch:
    """Degenerate sigma = 0 batch: every sample equals its center exactly."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    labels = _draw_labels(cb.k, n, rng, stratified)
    return GmmBatch(cb.centers[labels].copy(), labels, 0.0, codebook_id=id(cb))


def dump_batch(batch: GmmBatch, path: str, label_path: str | None = None) -> None:
    """Binary dump in the codebook container layout, labels in a side file."""
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<QQQ", _VERSION, batch.d, batch.n))
        f.write(batch.observations().astype("<f8").tobytes(order="C"))
    if label_path is not None:
        with open(label_path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<QQQ", _VERSION, 1, batch.n))
            f.write(batch.privileged_labels().astype("<i8").tobytes(order="C"))


def load_batch(path: str, label_path: str, sigma2: float) -> GmmBatch:
    with open(path, "rb") as f:
        if f.read(8) != _MAGIC:
            raise ValueError(f"bad magic in {path!r}")
        version, d, n = struct.unpack("<QQQ", f.read(24))
        if version != _VERSION:
            raise ValueError(f"unsupported container version {version}")
        samples = np.frombuffer(f.read(8 * d * n), dtype="<f8").reshape(n, d)
    with open(label_path, "rb") as f:
        if f.read(8) != _MAGIC:
            raise ValueError(f"bad magic in {label_path!r}")
        version, one, n2 = struct.unpack("<QQQ", f.read(24))
        if version != _VERSION or one != 1 or n2 != n:
            raise ValueError("label side-file does not match batch")
        labels = np.frombuffer(f.read(8 * n), dtype="<i8").astype(np.int64)
    return GmmBatch(samples.astype(np.float64), labels, float(sigma2))
