"""Two-stage error correction for in-memory matrix-vector products.

Stage one forms three products from one encoded matrix/vector pair and
combines them so every term linear in the encoding noise cancels:

    p = A~ x - A~ x~ + A x~   =>   p_i = sum_j a_ij x_j (1 - eps_a_ij eps_x_j)

leaving only the second-order residual.  Stage two attenuates that residual
with a regularized least-squares denoiser whose closed form is
``y = (I + lambda * L^T L)^{-1} p``, where ``L`` is the square first-order
difference operator (unit diagonal, ``h`` on the superdiagonal).

``A x~`` is computed host-side as the exact matrix times the realized vector.
The circuit realization would write a replicated-row matrix of x-copies and
feed rows of ``A`` as inputs; that is algebraically identical, and the
simulation deliberately avoids charging an extra n x n write whose noise the
cancellation algebra ignores anyway.

Everything here is stateless given its crossbar arguments; parallel callers
must use disjoint crossbars and random streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solveh_banded

from .crossbar import (
    Crossbar,
    adjustable_mat_write_and_verify,
    adjustable_vec_write_and_verify,
    analog_mvm,
    mca_set_weights,
)
from .metrics import RunMetrics, UndefinedMetricError, relative_error


@dataclass
class TriProduct:
    """The three readouts feeding first-order cancellation."""

    u: np.ndarray   # A  x~
    v: np.ndarray   # A~ x
    y: np.ndarray   # A~ x~

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if not (self.u.shape == self.v.shape == self.y.shape) or self.u.ndim != 1:
            raise ValueError("u, v, y must be 1-D vectors of identical length")


@dataclass
class DenoiseConfig:
    lam: float = 1e-12      # regularization weight; 0 is an identity passthrough
    h: int = -1             # superdiagonal value of the difference operator

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError("lambda must be >= 0")


@dataclass
class EcConfig:
    """Knobs for one corrected MVM: verify loop plus denoiser."""

    enabled: bool = True
    eps: float = 0.0                # verify tolerance; 0 forces all iterations
    n_verify: int = 0               # max verify iterations (the sweep variable k)
    norm_p: float = 2               # 2 or inf, for the verify residual
    denoise: DenoiseConfig = field(default_factory=DenoiseConfig)
    denoise_mode: str = "exact"     # "exact" | "encoded"


def first_order_combine(t: TriProduct) -> np.ndarray:
    """Combine the three products so first-order noise terms cancel."""
    return t.v - t.y + t.u


def build_differential_matrix(n: int, h: int = -1) -> np.ndarray:
    """Square first-order difference operator: 1 on the diagonal, h above it."""
    if n < 1:
        raise ValueError("n must be >= 1")
    L = np.eye(n)
    if n > 1:
        L[np.arange(n - 1), np.arange(1, n)] = h
    return L


def _denoise_bands(m: int, lam: float, h: int) -> np.ndarray:
    # Upper-banded form of I + lam * L^T L, which is tridiagonal:
    #   diag:      1 + lam * (1 + h^2 * [j >= 1])
    #   off-diag:  lam * h
    ab = np.zeros((2, m))
    ab[1, :] = 1.0 + lam
    ab[1, 1:] += lam * h * h
    ab[0, 1:] = lam * h
    return ab


def denoise_least_square(p, cfg: DenoiseConfig, mode: str = "exact",
                         xbar: Crossbar | None = None, rng=None) -> np.ndarray:
    """Solve ``(I + lambda L^T L) y = p`` for the smoothed vector ``y``.

    ``exact`` mode uses a symmetric banded solve (the system is tridiagonal
    and positive definite for any lambda >= 0).  ``encoded`` mode inverts the
    system host-side, writes the inverse to the supplied crossbar with a
    single unverified write, and multiplies in-memory; it exists for fidelity
    studies of the denoiser itself.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("p must be a nonempty 1-D vector")
    if not np.all(np.isfinite(p)):
        raise ValueError("p contains non-finite entries")
    if cfg.lam == 0.0:
        return p.copy()
    m = p.size
    if mode == "exact":
        if m == 1:
            return p / (1.0 + cfg.lam)
        return solveh_banded(_denoise_bands(m, cfg.lam, cfg.h), p)
    if mode == "encoded":
        if xbar is None:
            raise ValueError("encoded denoise mode needs a crossbar")
        if m > xbar.rows or m > xbar.cols:
            raise ValueError(f"denoise matrix {m} x {m} does not fit the crossbar")
        L = build_differential_matrix(m, cfg.h)
        inv = np.linalg.inv(np.eye(m) + cfg.lam * (L.T @ L))
        mca_set_weights(xbar, inv, rng)
        return analog_mvm(xbar, p)
    raise ValueError(f"unknown denoise mode: {mode!r}")


def corrected_mat_vec_mul(A, x, cfg: EcConfig, xbar: Crossbar, rng=None):
    """Encode, multiply, and (optionally) error-correct one MVM on one array.

    Writes the vector first (one row), reads back its realization, then writes
    the matrix over the same array, mirroring the circuit flow in which the
    matrix replaces the previously stored vector copies.  With correction
    disabled the plain in-memory product ``A~ x~`` is returned.

    Returns ``(b_hat, RunMetrics)``; energy/latency are this call's deltas on
    the crossbar's accumulators.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    if A.ndim != 2 or x.ndim != 1 or A.shape[1] != x.shape[0]:
        raise ValueError(f"inconsistent shapes: A {A.shape}, x {x.shape}")
    e0, l0 = xbar.energy_acc, xbar.latency_acc

    x_real, _, _ = adjustable_vec_write_and_verify(
        x, cfg.eps, cfg.n_verify, cfg.norm_p, xbar, rng)
    _, _, _ = adjustable_mat_write_and_verify(
        A, cfg.eps, cfg.n_verify, cfg.norm_p, xbar, rng)

    y = analog_mvm(xbar, x_real)                 # A~ x~
    if cfg.enabled:
        v = analog_mvm(xbar, x)                  # A~ x
        u = A @ x_real                           # A  x~ (replicated-row emulation)
        p_vec = first_order_combine(TriProduct(u=u, v=v, y=y))
        b_hat = denoise_least_square(p_vec, cfg.denoise, mode=cfg.denoise_mode,
                                     xbar=xbar, rng=rng)
    else:
        b_hat = y

    b_true = A @ x
    try:
        err2 = relative_error(b_hat, b_true, 2)
        errinf = relative_error(b_hat, b_true, np.inf)
    except UndefinedMetricError:
        # All-zero ground truth (e.g. a padding chunk) carries no error signal.
        err2 = errinf = 0.0
    metrics = RunMetrics(err_l2=err2, err_linf=errinf,
                         e_w=xbar.energy_acc - e0, l_w=xbar.latency_acc - l0)
    return b_hat, metrics
