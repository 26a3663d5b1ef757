"""Neuronal strength (weighted degree) and its distribution statistics.

The strength of a neuron is the sum of its incident connection weights.
For a weight matrix of shape (n_in, n_out), input-side strengths are the
row sums (length n_in) and output-side strengths are the column sums
(length n_out). Because a strength is a sum of many independent weights,
its distribution is approximately normal with variance equal to the
per-weight variance times the fan (the sum-of-variances law), and its
tails grow with layer size even when the weights themselves are bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .initializers import InitSpec, init
from .matrix_io import validate_matrix
from .rng import RngStream

__all__ = [
    "SIDES",
    "strengths",
    "StrengthStats",
    "stats_from_strengths",
    "strength_stats",
    "predicted_strength_variance",
    "model_strength_summary",
    "max_strength_scaling",
    "SweepRow",
]

SIDES = ("input", "output")


def strengths(m, side: str = "input") -> np.ndarray:
    """Strength vector of one side of a layer: row sums or column sums.

    numpy's fixed (pairwise, ascending-index) summation makes the result
    reproducible for a given matrix.
    """
    arr = validate_matrix(m)
    if side == "input":
        return arr.sum(axis=1)
    if side == "output":
        return arr.sum(axis=0)
    raise ValueError(f"side must be one of {SIDES}, got {side!r}")


@dataclass(frozen=True)
class StrengthStats:
    """Population moments of one strength vector (denominator n)."""

    n: int
    mean: float
    variance: float
    fourth_central_moment: float
    max_abs: float
    skewness: float
    excess_kurtosis: float

    def to_dict(self) -> dict:
        return asdict(self)


def stats_from_strengths(s) -> StrengthStats:
    """Moments of a strength vector; skewness/kurtosis are 0 for a constant vector."""
    v = np.asarray(s, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("strength vector must be 1-D and nonempty")
    mu = float(v.mean())
    if v.max() == v.min():
        # exactly constant: all central moments are 0, not rounding noise
        return StrengthStats(
            n=int(v.size),
            mean=mu,
            variance=0.0,
            fourth_central_moment=0.0,
            max_abs=float(np.abs(v).max()),
            skewness=0.0,
            excess_kurtosis=0.0,
        )
    d = v - mu
    m2 = float(np.mean(d * d))
    m3 = float(np.mean(d * d * d))
    m4 = float(np.mean(d * d * d * d))
    if m2 > 0.0:
        skew = m3 / m2**1.5
        exk = m4 / (m2 * m2) - 3.0
    else:
        skew = 0.0
        exk = 0.0
    return StrengthStats(
        n=int(v.size),
        mean=mu,
        variance=m2,
        fourth_central_moment=m4,
        max_abs=float(np.abs(v).max()),
        skewness=skew,
        excess_kurtosis=exk,
    )


def strength_stats(m, side: str = "input") -> StrengthStats:
    """Strength-distribution summary for one side of a layer."""
    return stats_from_strengths(strengths(m, side))


def predicted_strength_variance(weight_variance: float, n_l: int) -> float:
    """Variance the sum-of-variances law predicts for strengths: var(W) * n_l."""
    if weight_variance < 0.0:
        raise ValueError("weight_variance must be >= 0")
    return float(weight_variance) * int(n_l)


def model_strength_summary(layers) -> tuple[float, float]:
    """Input-side strength variance and fourth central moment, averaged
    over a model's layers. Used to place whole models on the
    variance/tail-mass plane that correlates with final accuracy."""
    layers = list(layers)
    if not layers:
        raise ValueError("model_strength_summary needs at least one layer")
    stats = [strength_stats(m, "input") for m in layers]
    avg_var = float(np.mean([st.variance for st in stats]))
    avg_mu4 = float(np.mean([st.fourth_central_moment for st in stats]))
    return avg_var, avg_mu4


@dataclass(frozen=True)
class SweepRow:
    """Max-|strength| statistics for one layer size, before/after rewiring."""

    size: int
    base_mean: float
    base_std: float
    rewired_mean: float | None = None
    rewired_std: float | None = None


def max_strength_scaling(
    method: str,
    sizes,
    trials: int,
    rng: RngStream,
    rewire: bool = True,
    gain: float = 1.0,
) -> list[SweepRow]:
    """How the largest |strength| of a square n-by-n layer grows with n.

    For each size, `trials` layers are generated from the given stream and
    the maximum absolute input-side strength is recorded, optionally also
    after bidirectional rewiring of the same layers. Literature
    initializers show a max|s| that keeps growing with size; rewiring
    pushes it down at every size.
    """
    # imported here: rewiring depends on this module at import time
    from .rewiring import RewireConfig, pa_rewire

    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for n in sizes:
        base_max = np.empty(trials)
        rew_max = np.empty(trials) if rewire else None
        for k in range(trials):
            w = init(InitSpec(method, n, n, gain=gain), rng)
            base_max[k] = np.abs(w.sum(axis=1)).max()
            if rewire:
                r = pa_rewire(w, RewireConfig(rng=rng))
                rew_max[k] = np.abs(r.sum(axis=1)).max()
        if rewire:
            rows.append(
                SweepRow(
                    size=n,
                    base_mean=float(base_max.mean()),
                    base_std=float(base_max.std()),
                    rewired_mean=float(rew_max.mean()),
                    rewired_std=float(rew_max.std()),
                )
            )
        else:
            rows.append(
                SweepRow(size=n, base_mean=float(base_max.mean()), base_std=float(base_max.std()))
            )
    return rows


def sweep_rows_to_csv(rows) -> str:
    """Render SweepRows as the CSV the sweep CLI emits."""
    lines = ["size,base_mean,base_std,rewired_mean,rewired_std"]
    for r in rows:
        if r.rewired_mean is None:
            lines.append(f"{r.size},{r.base_mean:.17g},{r.base_std:.17g},,")
        else:
            lines.append(
                f"{r.size},{r.base_mean:.17g},{r.base_std:.17g},"
                f"{r.rewired_mean:.17g},{r.rewired_std:.17g}"
            )
    return "\n".join(lines) + "\n"
