"""Scripting interface to the crossbar MVM engine.

Exposes corrected and distributed in-memory matrix-vector multiplication plus
profile/matrix loading to host scripts, as a plain-function facade over the
``xbarsim`` core.  No numerical logic lives here: every call delegates to the
core, so results are identical to the command-line harness for identical
configurations and seeds (the equivalence test pins this digit for digit).

Config mappings accept a subset of the core's configuration keys:

    device        profile name (default "taox-hfox")
    profiles      path to a profile TOML replacing the shipped set
    grid          [R, C, r, c] tile grid (distributed_mvm only)
    ec            bool, error correction on/off (default True)
    k             max write-and-verify iterations (default 0)
    eps           verify tolerance (default 0.0)
    norm          verify norm selector: 2 or "inf" (default 2)
    lam           denoiser regularization weight (default 1e-12)
    h             denoiser superdiagonal value (default -1)
    denoise_mode  "exact" | "encoded" (default "exact")
    seed          master seed (default 0)
    workers       worker threads (default 1)

Unknown keys raise :class:`BindingError` naming the offending key.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from xbarsim.correction import DenoiseConfig, EcConfig
from xbarsim.device import DeviceProfile
from xbarsim.device import load_profiles as _load_profiles
from xbarsim.io import MatrixRecord
from xbarsim.io import load_matrix_market as _load_matrix_market
from xbarsim.tiling import TileGrid, distributed_mat_vec_mul

__version__ = "0.1.0"

__all__ = ["BindingError", "corrected_mvm", "distributed_mvm",
           "load_profile", "load_matrix_market"]


class BindingError(ValueError):
    """Raised for invalid binding configs and surfaced core failures."""


_KNOWN_KEYS = frozenset({"device", "profiles", "grid", "ec", "k", "eps",
                         "norm", "lam", "h", "denoise_mode", "seed", "workers"})

_DEFAULTS = {"device": "taox-hfox", "profiles": None, "grid": None, "ec": True,
             "k": 0, "eps": 0.0, "norm": 2, "lam": 1e-12, "h": -1,
             "denoise_mode": "exact", "seed": 0, "workers": 1}


def _check_config(config) -> dict:
    config = dict(config or {})
    for key in config:
        if key not in _KNOWN_KEYS:
            raise BindingError(f"unknown config key: {key!r}")
    merged = dict(_DEFAULTS)
    merged.update(config)
    return merged


def _norm_selector(value):
    if value in (2, 2.0, "2"):
        return 2.0
    if value in (float("inf"), "inf"):
        return float("inf")
    raise BindingError(f"norm must be 2 or 'inf', got {value!r}")


def _as_matrix(matrix):
    if isinstance(matrix, MatrixRecord):
        return matrix.to_csr()
    if sp.issparse(matrix):
        return matrix
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2:
        raise BindingError(f"matrix must be 2-D, got ndim={arr.ndim}")
    return arr


def _profile(cfg) -> DeviceProfile:
    profiles = _load_profiles(cfg["profiles"])
    try:
        return profiles[cfg["device"]]
    except KeyError:
        raise BindingError(f"unknown device profile: {cfg['device']!r}; "
                           f"available: {sorted(profiles)}") from None


def _execute(matrix, vector, cfg, grid_dims):
    A = _as_matrix(matrix)
    x = np.asarray(vector, dtype=float)
    ec_cfg = EcConfig(enabled=bool(cfg["ec"]), eps=float(cfg["eps"]),
                      n_verify=int(cfg["k"]), norm_p=_norm_selector(cfg["norm"]),
                      denoise=DenoiseConfig(lam=float(cfg["lam"]), h=int(cfg["h"])),
                      denoise_mode=cfg["denoise_mode"])
    R, C, r, c = grid_dims
    try:
        grid = TileGrid(R, C, r, c, _profile(cfg))
        b_hat, mets = distributed_mat_vec_mul(A, x, grid, ec_cfg,
                                              int(cfg["seed"]),
                                              workers=int(cfg["workers"]))
    except BindingError:
        raise
    except ValueError as exc:
        raise BindingError(str(exc)) from exc
    metrics = {"err_l2": mets.err_l2, "err_linf": mets.err_linf,
               "e_w_joules": mets.e_w, "l_w_seconds": mets.l_w,
               "normalization": mets.normalization, "seed": int(cfg["seed"])}
    return b_hat, metrics


def corrected_mvm(matrix, vector, config=None):
    """Error-corrected MVM on a single array sized to the matrix.

    Mirrors the command line's default single-array path: the array is
    ``max(m, n) x n`` and the chunk stream derives from ``seed`` exactly as in
    the distributed layer, so results match the CLI bit for bit.  Returns
    ``(result, metrics)`` with metrics as a plain mapping.
    """
    cfg = _check_config(config)
    if cfg["grid"] is not None:
        raise BindingError("corrected_mvm runs on a single array; "
                           "use distributed_mvm for a tile grid")
    A = _as_matrix(matrix)
    m, n = A.shape
    return _execute(A, vector, cfg, (1, 1, max(m, n), n))


def distributed_mvm(matrix, vector, config=None):
    """Tiled MVM over an R x C grid of r x c arrays (``grid`` config key)."""
    cfg = _check_config(config)
    if cfg["grid"] is None:
        raise BindingError("distributed_mvm needs a 'grid' config entry [R, C, r, c]")
    grid_dims = tuple(int(v) for v in cfg["grid"])
    if len(grid_dims) != 4:
        raise BindingError(f"grid must be [R, C, r, c], got {cfg['grid']!r}")
    return _execute(matrix, vector, cfg, grid_dims)


def load_profile(name, path=None) -> DeviceProfile:
    """Load one device profile by name from the shipped (or given) TOML."""
    profiles = _load_profiles(path)
    try:
        return profiles[name]
    except KeyError:
        raise BindingError(f"unknown device profile: {name!r}; "
                           f"available: {sorted(profiles)}") from None


def load_matrix_market(path) -> MatrixRecord:
    """Parse a Matrix Market file into the core's coordinate record."""
    try:
        return _load_matrix_market(path)
    except FileNotFoundError:
        raise BindingError(f"matrix file not found: {path}") from None
    except ValueError as exc:
        raise BindingError(str(exc)) from exc
