"""Evaluation metrics: relative error norms, write energy/latency aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UndefinedMetricError(ValueError):
    """Raised when a relative error is requested against a zero ground truth."""


@dataclass
class RunMetrics:
    err_l2: float
    err_linf: float
    e_w: float              # J
    l_w: float              # s
    reps: int = 1
    normalization: int = 1

    def as_dict(self) -> dict:
        return {
            "err_l2": self.err_l2,
            "err_linf": self.err_linf,
            "e_w": self.e_w,
            "l_w": self.l_w,
            "reps": self.reps,
            "normalization": self.normalization,
        }


def relative_error(y, b, p) -> float:
    """``||y - b||_p / ||b||_p`` for p in {2, inf}."""
    y = np.asarray(y, dtype=float)
    b = np.asarray(b, dtype=float)
    if y.shape != b.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {b.shape}")
    if p == 2:
        ref = float(np.linalg.norm(b))
        dev = float(np.linalg.norm(y - b))
    elif np.isinf(p):
        ref = float(np.max(np.abs(b))) if b.size else 0.0
        dev = float(np.max(np.abs(y - b))) if b.size else 0.0
    else:
        raise ValueError(f"unsupported norm selector: {p!r}")
    if ref == 0.0:
        raise UndefinedMetricError("relative error undefined: ground truth has zero norm")
    return dev / ref


def aggregate_tile_metrics(per_mca, normalization: int = 1):
    """Mean write energy/latency across MCAs, divided by the reuse factor.

    ``per_mca`` is a nonempty sequence of ``(e_w, l_w)`` pairs; returns
    ``(E_w, L_w)``.  ``normalization`` is 1 except in strong-scaling reports.
    """
    rows = list(per_mca)
    if not rows:
        raise ValueError("per-MCA metric list is empty")
    if normalization < 1:
        raise ValueError("normalization must be >= 1")
    e = float(np.mean([r[0] for r in rows])) / normalization
    l = float(np.mean([r[1] for r in rows])) / normalization
    return e, l


def replication_summary(runs) -> RunMetrics:
    """Fieldwise arithmetic mean across replications; ``reps`` is the count."""
    runs = list(runs)
    if not runs:
        raise ValueError("no replications to summarize")
    mean_norm = float(np.mean([r.normalization for r in runs]))
    return RunMetrics(
        err_l2=float(np.mean([r.err_l2 for r in runs])),
        err_linf=float(np.mean([r.err_linf for r in runs])),
        e_w=float(np.mean([r.e_w for r in runs])),
        l_w=float(np.mean([r.l_w for r in runs])),
        reps=len(runs),
        normalization=int(mean_norm) if mean_norm.is_integer() else mean_norm,
    )
