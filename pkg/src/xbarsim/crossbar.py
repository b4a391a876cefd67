"""One memory crossbar array (MCA): encoding, write-and-verify, analog MVM.

Real values are stored magnitude-only: a chunk-wide scale factor maps the
largest magnitude onto ``g_max`` and each nonzero entry is programmed to
``scale * |v|`` (clamped to the window, then level-snapped).  Signs live in a
lossless side plane, abstracting a differential pair per column, which keeps
the stored-value error purely multiplicative: ``v~ = v * (1 + eps)``.  Exact
zeros occupy an idealized off-state (conductance 0.0) and cost no pulses.

Readout is ideal: no read noise or ADC quantization is modelled, so all error
originates in programming.  This is a documented limitation of the model.

Energy/latency accounting for an array write assumes cells within a row are
pulsed concurrently and rows are programmed sequentially: energy is the total
pulse count times ``e_pulse``; latency is the per-row maximum pulse count
summed over rows, times ``t_pulse``.

A ``Crossbar`` is single-owner mutable state.  Distinct crossbars may be
driven fully in parallel; nothing here shares mutation across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceProfile, program_cells


@dataclass
class EncodingMap:
    """Affine magnitude map of one stored chunk: ``v~ = sign * g / scale``."""

    scale: float              # conductance per value unit; 1.0 for all-zero chunks
    signs: np.ndarray         # int8 sign plane of the encoded region, {-1, 0, +1}

    @property
    def shape(self):
        return self.signs.shape


class Crossbar:
    """An r x c grid of RRAM cells with cumulative write-cost counters."""

    def __init__(self, rows: int, cols: int, profile: DeviceProfile):
        if rows < 1 or cols < 1:
            raise ValueError("crossbar dimensions must be positive")
        if rows < cols:
            raise ValueError(f"crossbar requires rows >= cols, got {rows} x {cols}")
        self.rows = rows
        self.cols = cols
        self.profile = profile
        self.cells = np.zeros((rows, cols))   # 0.0 == idealized off-state
        self.energy_acc = 0.0                 # J, non-decreasing
        self.latency_acc = 0.0                # s, non-decreasing
        self._encoding: EncodingMap | None = None

    @property
    def encoding(self) -> EncodingMap | None:
        """Encoding map of the most recent write, if any."""
        return self._encoding


def _as_region(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"values must be 1-D or 2-D, got ndim={arr.ndim}")
    return arr


def mca_set_weights(xbar: Crossbar, values, rng=None) -> EncodingMap:
    """Program a real-valued chunk into the array and return its encoding map.

    Programming is incremental: each cell is pulsed from its current
    conductance toward the new target, so re-invoking with the same values
    refines the previous write.  Cells in the off-state enter the window at
    ``g_min``.  Zero values are forced to the off-state at no pulse cost.
    """
    vals = _as_region(values)
    m, n = vals.shape
    if m > xbar.rows or n > xbar.cols:
        raise ValueError(
            f"chunk {m} x {n} exceeds array {xbar.rows} x {xbar.cols}; pre-partition it"
        )
    prof = xbar.profile
    max_abs = np.max(np.abs(vals)) if vals.size else 0.0
    scale = prof.g_max / max_abs if max_abs > 0.0 else 1.0
    signs = np.sign(vals).astype(np.int8)

    region = xbar.cells[:m, :n]
    nz = vals != 0.0
    if np.any(nz):
        targets = np.clip(scale * np.abs(vals[nz]), prof.g_min, prof.g_max)
        starts = region[nz]
        starts = np.where(starts == 0.0, prof.g_min, starts)
        g_final, pulses = program_cells(starts, targets, prof, rng)
        region[nz] = g_final
        xbar.energy_acc += float(pulses.sum()) * prof.e_pulse
        row_idx = np.nonzero(nz)[0]
        row_max = np.zeros(m, dtype=np.int64)
        np.maximum.at(row_max, row_idx, pulses)
        xbar.latency_acc += float(row_max.sum()) * prof.t_pulse
    region[~nz] = 0.0

    emap = EncodingMap(scale=scale, signs=signs)
    xbar._encoding = emap
    return emap


def decode(xbar: Crossbar) -> np.ndarray:
    """Read back the stored values of the active encoding."""
    if xbar.encoding is None:
        raise ValueError("crossbar holds no encoded chunk")
    m, n = xbar.encoding.shape
    return xbar.encoding.signs * xbar.cells[:m, :n] / xbar.encoding.scale


def entrywise_norm(arr, p) -> float:
    """Vectorized entrywise p-norm used by the verify step (p in {2, inf})."""
    flat = np.asarray(arr, dtype=float).ravel()
    if p == 2:
        return float(np.linalg.norm(flat))
    if np.isinf(p):
        return float(np.max(np.abs(flat))) if flat.size else 0.0
    raise ValueError(f"unsupported norm selector: {p!r}")


def _write_and_verify(values, eps, n_verify, p, xbar, rng):
    if eps < 0.0:
        raise ValueError("eps must be >= 0")
    if n_verify < 0:
        raise ValueError("max verify iterations must be >= 0")
    vals = np.asarray(values, dtype=float)
    mca_set_weights(xbar, vals, rng)
    realized = decode(xbar).reshape(vals.shape)
    delta = entrywise_norm(realized - vals, p)
    k = 0
    while k < n_verify and delta > eps:
        k += 1
        mca_set_weights(xbar, vals, rng)
        realized = decode(xbar).reshape(vals.shape)
        delta = entrywise_norm(realized - vals, p)
    return realized, k, delta


def adjustable_mat_write_and_verify(A, eps, n_verify, p, xbar: Crossbar, rng=None):
    """Write a matrix, then re-write while the residual norm exceeds ``eps``.

    Returns ``(A_realized, k, delta)`` where ``k`` is the number of verify
    iterations actually used (``n_verify = 0`` means a single unverified
    write) and ``delta = ||A_realized - A||_p`` entrywise.  Non-convergence is
    reported through ``delta > eps``, never raised.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be 2-D")
    return _write_and_verify(A, eps, n_verify, p, xbar, rng)


def adjustable_vec_write_and_verify(x, eps, n_verify, p, xbar: Crossbar, rng=None):
    """Vector variant of the write-and-verify loop, laid out along one row."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be 1-D")
    return _write_and_verify(x, eps, n_verify, p, xbar, rng)


def analog_mvm(xbar: Crossbar, input_vector) -> np.ndarray:
    """Multiply the stored chunk with an input vector under ideal readout."""
    x = np.asarray(input_vector, dtype=float)
    stored = decode(xbar)
    if x.ndim != 1 or x.shape[0] != stored.shape[1]:
        raise ValueError(
            f"input length {x.shape} does not match encoded column count {stored.shape[1]}"
        )
    return stored @ x
