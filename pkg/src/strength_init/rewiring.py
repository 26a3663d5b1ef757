"""Preferential-attachment rewiring of initialized weight matrices.

Randomly initialized layers develop hub neurons: a few strengths far out
in the tails of an (approximately normal) strength distribution whose
spread only grows with layer size. The rewiring below reorganizes the
already-sampled weights of a layer so that every neuron's strength
collapses toward zero, without changing a single weight value: each
column of the result is a permutation of the same column of the input.

One pass walks the output neurons left to right, keeping a running
strength s of every input neuron over the columns visited so far
(column 0 is the seed and is never modified). At column t, selection
scores

    P(i) = (s(i) + |min_j s(j)| + 1) / sum_j (s(j) + |min_j s(j)| + 1)

turn the running strengths into a valid distribution: every neuron keeps
a positive chance, and the most positive strength gets the largest score.
All n_in input neurons are then drawn sequentially without replacement
under P, and column t's weights are handed out in ascending order: the
first neuron drawn receives the most negative weight, the last one drawn
the most positive. Strength hubs therefore tend to draw early and absorb
the negative tail, while negative-strength neurons draw late and absorb
the positive tail.

A pass drives the input-side strengths toward zero and leaves the
output-side sums untouched; running the same pass on the transpose of the
result ("bidirectional") collapses both sides.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .initializers import InitSpec, init
from .matrix_io import conv_from_2d, conv_to_2d, validate_conv, validate_matrix
from .rng import RngStream
from .strength import strengths

__all__ = [
    "PASS_MODES",
    "RewireConfig",
    "attachment_scores",
    "weighted_draw_order",
    "pa_pass",
    "pa_rewire",
    "pa_rewire_conv",
    "variance_search",
    "rewire_cost_probe",
    "fit_loglog_slope",
]

PASS_MODES = ("input-only", "bidirectional")


@dataclass
class RewireConfig:
    """How to rewire: which passes to run and which stream feeds the draws."""

    rng: RngStream
    passes: str = "bidirectional"

    def __post_init__(self):
        if self.passes not in PASS_MODES:
            raise ValueError(f"passes must be one of {PASS_MODES}, got {self.passes!r}")


def attachment_scores(s: np.ndarray) -> np.ndarray:
    """Selection probabilities from a running-strength vector.

    Shifts all strengths positive, adds 1 so no neuron is ever excluded,
    and normalizes. The result is strictly positive and sums to 1.
    """
    p = s + abs(s.min()) + 1.0
    p /= p.sum()
    return p


def weighted_draw_order(p: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Draw all indices sequentially, without replacement, weighted by `p`.

    Implemented as an exponential race: index i gets an Exp(1)/p[i] arrival
    time and the draw order is the arrival order. The minimum of
    independent exponentials with rates p[i] lands on i with probability
    p[i]/sum(p), and by memorylessness the remaining arrivals replay the
    same race on the survivors, which is exactly sequential weighted sampling with
    renormalization after each draw, in O(n log n).
    """
    keys = gen.standard_exponential(p.shape[0]) / p
    return np.argsort(keys)


def pa_pass(m, rng: RngStream) -> np.ndarray:
    """One input-side rewiring pass over all columns but the first.

    Returns a new matrix; every column of the output is a permutation of
    the same column of the input. Degenerate shapes (single row or single
    column) are returned unchanged and consume no randomness.
    """
    w = validate_matrix(m)
    n_in, n_out = w.shape
    if n_in == 1 or n_out == 1:
        return w.copy()
    gen = rng.generator
    # Work on the transpose so each processed column is a contiguous row,
    # and pre-sort all columns up front: column t is untouched until its
    # own iteration, so its sorted values never change before they are
    # needed.
    wt = np.ascontiguousarray(w.T)
    sorted_cols = np.sort(wt[1:], axis=1)
    s = wt[0].copy()
    for t in range(1, n_out):
        p = attachment_scores(s)
        targets = weighted_draw_order(p, gen)
        row = wt[t]
        row[targets] = sorted_cols[t - 1]
        s += row
    return np.ascontiguousarray(wt.T)


def pa_rewire(m, cfg: RewireConfig) -> np.ndarray:
    """Rewire a layer: one input-side pass, or both sides in sequence.

    The bidirectional mode runs the input-side pass, repeats it on the
    transpose of the result, and transposes back, so both strength
    distributions collapse. The multiset of weight values is preserved
    exactly in every mode.
    """
    out = pa_pass(m, cfg.rng)
    if cfg.passes == "bidirectional":
        out = np.ascontiguousarray(pa_pass(out.T, cfg.rng).T)
    return out


def pa_rewire_conv(t, cfg: RewireConfig) -> np.ndarray:
    """Rewire a (w, h, z, o) filter bank through its 2-D form."""
    arr = validate_conv(t)
    w, h, z, _ = arr.shape
    return conv_from_2d(pa_rewire(conv_to_2d(arr), cfg), (w, h, z))


def variance_search(spec: InitSpec, k: int, mode: str, rng: RngStream) -> np.ndarray:
    """Random-search baseline: draw `k` candidate layers, keep one extreme.

    Selects the candidate with the smallest (mode="min") or largest
    (mode="max") input-side strength variance; ties keep the earliest
    candidate. This isolates the effect of strength variance without
    touching the weight distribution's shape.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    best = None
    best_var = None
    for _ in range(k):
        cand = init(spec, rng)
        var = float(strengths(cand, "input").var())
        if best is None or (mode == "min" and var < best_var) or (mode == "max" and var > best_var):
            best, best_var = cand, var
    return best


def rewire_cost_probe(sizes, reps: int = 3, passes: str = "bidirectional", seed: int = 0):
    """Wall-time of pa_rewire on square n-by-n layers, one row per size.

    `sizes` must be ascending. Each size is timed `reps` times on the same
    matrix and the minimum is kept, after one small warmup call, so
    allocator and frequency-scaling noise does not distort the scaling
    fit. Returns a list of (n, seconds) tuples.
    """
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly ascending")
    warm = RngStream(seed, 0, 0)
    pa_rewire(init(InitSpec("kaiming-uniform", 64, 64), warm), RewireConfig(rng=warm, passes=passes))
    table = []
    for idx, n in enumerate(sizes):
        stream = RngStream(seed, idx, 0)
        w = init(InitSpec("kaiming-uniform", n, n), stream)
        best = float("inf")
        for rep in range(max(1, reps)):
            cfg = RewireConfig(rng=RngStream(seed, idx, rep + 1), passes=passes)
            t0 = time.perf_counter()
            pa_rewire(w, cfg)
            best = min(best, time.perf_counter() - t0)
        table.append((n, best))
    return table


def fit_loglog_slope(table) -> float:
    """Least-squares slope of log(time) against log(n) for a probe table."""
    rows = [(n, t) for n, t in table]
    if len(rows) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    x = np.log([n for n, _ in rows])
    y = np.log([t for _, t in rows])
    return float(np.polyfit(x, y, 1)[0])
