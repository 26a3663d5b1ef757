"""From-scratch fully connected training under a fixed simple schedule.

The network is an MLP with ReLU hidden layers and a softmax
cross-entropy output, trained by mini-batch SGD with momentum and a
cosine learning-rate schedule annealed to zero (no restarts), updated
once per epoch. Weights come from the repository's initializers (plus
optional rewiring); biases start at zero and are excluded from strength
computation and rewiring throughout.

Randomness is strictly partitioned: weights draw from the per-layer
per-repetition streams, while the batch shuffle draws from a stream
derived from the global seed alone, so every repetition of an experiment
sees the same data order and differs only in its weights.

Per epoch the harness records end-of-epoch train accuracy, validation
accuracy and loss, the learning rate used, and (optionally) the mean
absolute weight gradient per layer averaged over the epoch's batches.
The final model is the epoch with the highest validation accuracy
(earliest epoch wins ties); test accuracy is evaluated once, there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .initializers import METHODS, InitSpec, init
from .rewiring import RewireConfig, pa_rewire, variance_search
from .rng import BATCH_ORDER_DOMAIN, derive_stream, harness_generator

__all__ = [
    "MlpArch",
    "TrainConfig",
    "RunMetrics",
    "TrainingDivergedError",
    "REWIRE_MODES",
    "parse_rewire_mode",
    "cosine_lr",
    "build_layer_weights",
    "train",
    "gradient_flow",
    "evaluate",
]

REWIRE_MODES = ("none", "pa-bidirectional", "pa-input", "var-min", "var-max")

_EVAL_CHUNK = 8192


@dataclass(frozen=True)
class MlpArch:
    """Layer widths from input to output, e.g. (784, 64, 64, 10)."""

    layer_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2:
            raise ValueError("an MLP needs at least input and output sizes")
        if any(s < 1 for s in sizes):
            raise ValueError(f"all layer sizes must be >= 1, got {sizes}")

    @property
    def n_weight_layers(self) -> int:
        return len(self.layer_sizes) - 1


def parse_rewire_mode(mode: str) -> tuple[str, int | None]:
    """Split a rewire-mode string into (kind, K).

    Accepts "none", "pa" / "pa-bidirectional", "pa-input", and
    "var-min:K" / "var-max:K" with integer K >= 1.
    """
    mode = str(mode)
    if mode in ("none", "pa-bidirectional", "pa-input"):
        return mode, None
    if mode == "pa":
        return "pa-bidirectional", None
    for kind in ("var-min", "var-max"):
        if mode == kind or mode.startswith(kind + ":"):
            k = mode[len(kind) + 1 :] if ":" in mode else ""
            if not k:
                raise ValueError(f"{kind} needs a candidate count, e.g. {kind}:50")
            k = int(k)
            if k < 1:
                raise ValueError(f"{kind} candidate count must be >= 1, got {k}")
            return kind, k
    raise ValueError(f"unknown rewire mode {mode!r}")


@dataclass(frozen=True)
class TrainConfig:
    """Everything one training repetition depends on."""

    arch: MlpArch
    epochs: int = 100
    batch_size: int = 128
    lr0: float = 0.01
    momentum: float = 0.9
    global_seed: int = 0
    repetition_index: int = 0
    init_method: str = "kaiming-uniform"
    init_gain: float = 1.0
    rewire: str = "none"
    log_gradients: bool = True

    def __post_init__(self):
        if self.init_method not in METHODS:
            raise ValueError(f"unknown init method {self.init_method!r}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.lr0 <= 0.0:
            raise ValueError(f"lr0 must be > 0, got {self.lr0}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        parse_rewire_mode(self.rewire)


@dataclass
class RunMetrics:
    """Per-epoch trace plus the final selection of one training run."""

    repetition_index: int
    epochs: int
    train_acc: list[float] = field(default_factory=list)
    val_acc: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    lr: list[float] = field(default_factory=list)
    grad_abs_mean: list[list[float]] | None = None
    convergence_epoch: int = 0
    test_acc: float = 0.0

    def summary(self) -> dict:
        return {
            "type": "summary",
            "repetition": self.repetition_index,
            "epoch1_train_acc": self.train_acc[0],
            "epoch1_val_acc": self.val_acc[0],
            "convergence_epoch": self.convergence_epoch,
            "test_acc": self.test_acc,
        }

    def epoch_records(self) -> list[dict]:
        records = []
        for e in range(len(self.train_acc)):
            rec = {
                "type": "epoch",
                "epoch": e + 1,
                "train_acc": self.train_acc[e],
                "val_acc": self.val_acc[e],
                "val_loss": self.val_loss[e],
                "lr": self.lr[e],
            }
            if self.grad_abs_mean is not None:
                rec["grad_abs_mean"] = self.grad_abs_mean[e]
            records.append(rec)
        return records


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite; carries where it happened."""

    def __init__(self, epoch: int, batch: int, loss: float):
        super().__init__(f"non-finite loss {loss} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
        self.loss = loss


def cosine_lr(epoch: int, total_epochs: int, lr0: float) -> float:
    """Cosine schedule: lr0 at epoch 0, lr0/2 halfway, exactly 0 at the end."""
    return lr0 * (1.0 + math.cos(math.pi * epoch / total_epochs)) / 2.0


def build_layer_weights(cfg: TrainConfig) -> list[np.ndarray]:
    """Initialize (and optionally rewire) every weight matrix of a config.

    Layer l draws from derive_stream(global_seed, l, repetition_index);
    rewiring continues on the same stream, so a baseline run and its
    rewired treatment start from identical pre-rewiring weights.
    """
    kind, k = parse_rewire_mode(cfg.rewire)
    sizes = cfg.arch.layer_sizes
    weights = []
    for l in range(cfg.arch.n_weight_layers):
        stream = derive_stream(cfg.global_seed, l, cfg.repetition_index)
        spec = InitSpec(cfg.init_method, sizes[l], sizes[l + 1], gain=cfg.init_gain)
        if kind == "none":
            w = init(spec, stream)
        elif kind == "pa-bidirectional":
            w = pa_rewire(init(spec, stream), RewireConfig(rng=stream, passes="bidirectional"))
        elif kind == "pa-input":
            w = pa_rewire(init(spec, stream), RewireConfig(rng=stream, passes="input-only"))
        elif kind == "var-min":
            w = variance_search(spec, k, "min", stream)
        elif kind == "var-max":
            w = variance_search(spec, k, "max", stream)
        else:
            raise AssertionError(kind)
        weights.append(w)
    return weights


def _forward_collect(weights, biases, x):
    """Forward pass keeping pre- and post-activation values for backprop."""
    pre = []
    acts = [x]
    a = x
    last = len(weights) - 1
    for l, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w + b
        pre.append(z)
        a = np.maximum(z, 0.0) if l < last else z
        acts.append(a)
    return pre, acts


def _softmax_ce(logits, labels):
    """Mean cross-entropy and the softmax probabilities, numerically stable."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    lse = np.log(exp.sum(axis=1)) + logits.max(axis=1)
    loss = float(np.mean(lse - logits[np.arange(labels.shape[0]), labels]))
    return loss, probs


def _backward(weights, pre, acts, probs, labels):
    """Mean-reduced gradients for every weight matrix and bias vector."""
    batch = labels.shape[0]
    delta = probs.copy()
    delta[np.arange(batch), labels] -= 1.0
    delta /= batch
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    for l in range(len(weights) - 1, -1, -1):
        grads_w[l] = acts[l].T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ weights[l].T
            delta[pre[l - 1] <= 0.0] = 0.0
    return grads_w, grads_b


def evaluate(weights, biases, features, labels, chunk: int = _EVAL_CHUNK):
    """Accuracy (percent) and mean loss of a model over a dataset."""
    n = features.shape[0]
    correct = 0
    loss_sum = 0.0
    for start in range(0, n, chunk):
        x = features[start : start + chunk]
        y = labels[start : start + chunk]
        a = x
        last = len(weights) - 1
        for l, (w, b) in enumerate(zip(weights, biases)):
            a = a @ w + b
            if l < last:
                a = np.maximum(a, 0.0)
        loss, _ = _softmax_ce(a, y)
        loss_sum += loss * x.shape[0]
        correct += int(np.count_nonzero(a.argmax(axis=1) == y))
    return 100.0 * correct / n, loss_sum / n


def train(cfg: TrainConfig, train_ds: Dataset, val_ds: Dataset, test_ds: Dataset) -> RunMetrics:
    """Run one full training repetition and return its metric trace.

    Deterministic: identical (cfg, data) gives an identical RunMetrics.
    Raises TrainingDivergedError if the batch loss ever goes non-finite.
    """
    if val_ds.n < 1 or test_ds.n < 1:
        raise ValueError("validation and test sets must be nonempty")
    n_features = cfg.arch.layer_sizes[0]
    if train_ds.features.shape[1] != n_features:
        raise ValueError(
            f"architecture expects {n_features} input features, "
            f"dataset has {train_ds.features.shape[1]}"
        )
    weights = build_layer_weights(cfg)
    biases = [np.zeros(s) for s in cfg.arch.layer_sizes[1:]]
    vel_w = [np.zeros_like(w) for w in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    batch_gen = harness_generator(cfg.global_seed, BATCH_ORDER_DOMAIN)

    metrics = RunMetrics(repetition_index=cfg.repetition_index, epochs=cfg.epochs)
    if cfg.log_gradients:
        metrics.grad_abs_mean = []

    x_train, y_train = train_ds.features, train_ds.labels
    n = train_ds.n
    best_val = -1.0
    best_weights = None
    best_biases = None

    for epoch in range(cfg.epochs):
        lr = cosine_lr(epoch, cfg.epochs, cfg.lr0)
        perm = batch_gen.permutation(n)
        grad_sums = np.zeros(len(weights))
        n_batches = 0
        for batch_i, start in enumerate(range(0, n, cfg.batch_size)):
            idx = perm[start : start + cfg.batch_size]
            xb, yb = x_train[idx], y_train[idx]
            # a diverging run overflows before the loss check catches it;
            # the check is the detector, so keep the overflow quiet
            with np.errstate(over="ignore", invalid="ignore"):
                pre, acts = _forward_collect(weights, biases, xb)
                loss, probs = _softmax_ce(pre[-1], yb)
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch + 1, batch_i + 1, loss)
            grads_w, grads_b = _backward(weights, pre, acts, probs, yb)
            if cfg.log_gradients:
                for l, g in enumerate(grads_w):
                    grad_sums[l] += float(np.abs(g).mean())
            n_batches += 1
            for l in range(len(weights)):
                vel_w[l] = cfg.momentum * vel_w[l] + grads_w[l]
                vel_b[l] = cfg.momentum * vel_b[l] + grads_b[l]
                weights[l] -= lr * vel_w[l]
                biases[l] -= lr * vel_b[l]

        train_acc, _ = evaluate(weights, biases, x_train, y_train)
        val_acc, val_loss = evaluate(weights, biases, val_ds.features, val_ds.labels)
        metrics.train_acc.append(train_acc)
        metrics.val_acc.append(val_acc)
        metrics.val_loss.append(val_loss)
        metrics.lr.append(lr)
        if cfg.log_gradients:
            metrics.grad_abs_mean.append([float(s / n_batches) for s in grad_sums])
        if val_acc > best_val:
            best_val = val_acc
            best_weights = [w.copy() for w in weights]
            best_biases = [b.copy() for b in biases]
            metrics.convergence_epoch = epoch + 1

    test_acc, _ = evaluate(best_weights, best_biases, test_ds.features, test_ds.labels)
    metrics.test_acc = test_acc
    return metrics


def gradient_flow(metrics: RunMetrics) -> list[tuple[int, int, float]]:
    """Flatten the logged gradient trace to (epoch, layer, mean |grad|) rows.

    One row per epoch and weight matrix, epochs and layers both starting
    at 1 and 0 respectively. Raises if the run logged no gradients.
    """
    if metrics.grad_abs_mean is None:
        raise ValueError("gradient logging was disabled for this run")
    rows = []
    for e, per_layer in enumerate(metrics.grad_abs_mean):
        for l, v in enumerate(per_layer):
            rows.append((e + 1, l, v))
    return rows
