"""IDX image/label ingestion and deterministic data splits.

The IDX container stores big-endian int32 header fields followed by a
uint8 payload: images carry magic 0x00000803 and (count, rows, cols),
labels carry magic 0x00000801 and (count,). Files may be plain or
gzip-compressed (detected by the .gz suffix). Pixels are scaled to
[0, 1] as float64 and flattened; labels stay integer class ids.

The experiment protocol holds out a validation set sampled once from the
training set (same size as the test set); the split is a function of the
experiment's global seed, never of the repetition, so every repetition
sees identical data.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "IMAGE_MAGIC",
    "LABEL_MAGIC",
    "IdxError",
    "IdxMagicError",
    "IdxCountMismatchError",
    "Dataset",
    "load_idx",
    "read_idx_images",
    "read_idx_labels",
    "write_idx_images",
    "write_idx_labels",
    "split",
    "dataset_paths",
    "load_named_dataset",
]

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

DATASET_NAMES = ("mnist", "fmnist")

_IDX_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


class IdxError(Exception):
    """Base class for IDX ingestion failures."""


class IdxMagicError(IdxError):
    """File does not start with the expected IDX magic number."""


class IdxCountMismatchError(IdxError):
    """Image and label files disagree on the number of samples."""


@dataclass(frozen=True)
class Dataset:
    """Flat features in [0, 1] plus integer labels."""

    features: np.ndarray  # (n, d) float64
    labels: np.ndarray    # (n,) int64

    def __post_init__(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise IdxCountMismatchError(
                f"{self.features.shape[0]} feature rows vs {self.labels.shape[0]} labels"
            )

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx])


def _open(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_be32(f, path, what: str) -> int:
    raw = f.read(4)
    if len(raw) != 4:
        raise IdxError(f"{path}: truncated while reading {what}")
    return struct.unpack(">i", raw)[0]


def read_idx_images(path) -> np.ndarray:
    """Raw (count, rows, cols) uint8 image cube from an IDX file."""
    with _open(path) as f:
        magic = _read_be32(f, path, "magic")
        if magic != IMAGE_MAGIC:
            raise IdxMagicError(f"{path}: image magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}")
        count = _read_be32(f, path, "count")
        rows = _read_be32(f, path, "rows")
        cols = _read_be32(f, path, "cols")
        payload = f.read()
    if len(payload) != count * rows * cols:
        raise IdxError(
            f"{path}: payload holds {len(payload)} bytes, header declares {count * rows * cols}"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols).copy()


def read_idx_labels(path) -> np.ndarray:
    """Raw (count,) uint8 label vector from an IDX file."""
    with _open(path) as f:
        magic = _read_be32(f, path, "magic")
        if magic != LABEL_MAGIC:
            raise IdxMagicError(f"{path}: label magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}")
        count = _read_be32(f, path, "count")
        payload = f.read()
    if len(payload) != count:
        raise IdxError(f"{path}: payload holds {len(payload)} labels, header declares {count}")
    return np.frombuffer(payload, dtype=np.uint8).copy()


def write_idx_images(path, images: np.ndarray) -> None:
    """Write a (count, rows, cols) uint8 cube in IDX image format."""
    arr = np.ascontiguousarray(images, dtype=np.uint8)
    if arr.ndim != 3:
        raise ValueError("images must be (count, rows, cols)")
    with _open_w(path) as f:
        f.write(struct.pack(">iiii", IMAGE_MAGIC, *arr.shape))
        f.write(arr.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    """Write a (count,) uint8 vector in IDX label format."""
    arr = np.ascontiguousarray(labels, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("labels must be 1-D")
    with _open_w(path) as f:
        f.write(struct.pack(">ii", LABEL_MAGIC, arr.shape[0]))
        f.write(arr.tobytes())


def _open_w(path):
    path = Path(path)
    if path.suffix == ".gz":
        # fixed mtime so identical content gives identical bytes
        return gzip.GzipFile(path, "wb", mtime=0)
    return open(path, "wb")


def load_idx(images_path, labels_path) -> Dataset:
    """Load an image/label IDX pair into flat [0, 1] features."""
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IdxCountMismatchError(
            f"{images_path} has {images.shape[0]} images but "
            f"{labels_path} has {labels.shape[0]} labels"
        )
    feats = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    return Dataset(feats, labels.astype(np.int64))


def split(dataset: Dataset, test_size: int, rng) -> tuple[Dataset, Dataset]:
    """Partition a dataset into (train, validation) with |validation| = test_size.

    The partition is disjoint and exhaustive, drawn from `rng` (an
    RngStream or numpy Generator); both sides keep ascending original
    order so the training shuffle alone controls presentation order.
    """
    gen = getattr(rng, "generator", rng)
    test_size = int(test_size)
    if test_size < 0:
        raise ValueError("test_size must be >= 0")
    if test_size >= dataset.n:
        raise ValueError(f"test_size {test_size} must be < dataset size {dataset.n}")
    perm = gen.permutation(dataset.n)
    val_idx = np.sort(perm[:test_size])
    train_idx = np.sort(perm[test_size:])
    return dataset.subset(train_idx), dataset.subset(val_idx)


def dataset_paths(data_dir, name: str) -> dict[str, Path]:
    """Resolve the four IDX files for a named dataset under data_dir/name/.

    Falls back to data_dir/ itself, and to .gz variants, so both layouts
    `<dir>/mnist/train-images-idx3-ubyte` and `<dir>/train-images-idx3-ubyte.gz`
    work.
    """
    if name not in DATASET_NAMES:
        raise ValueError(f"unknown dataset {name!r}, expected one of {DATASET_NAMES}")
    roots = [Path(data_dir) / name, Path(data_dir)]
    out = {}
    for key, fname in _IDX_FILES.items():
        for root in roots:
            for candidate in (root / fname, root / (fname + ".gz")):
                if candidate.exists():
                    out[key] = candidate
                    break
            if key in out:
                break
        if key not in out:
            raise FileNotFoundError(
                f"{fname}[.gz] not found under {roots[0]} or {roots[1]}"
            )
    return out


def load_named_dataset(data_dir, name: str) -> tuple[Dataset, Dataset]:
    """Load (train, test) for a named dataset from IDX files on disk."""
    paths = dataset_paths(data_dir, name)
    train = load_idx(paths["train_images"], paths["train_labels"])
    test = load_idx(paths["test_images"], paths["test_labels"])
    return train, test
