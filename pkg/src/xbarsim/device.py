"""Pulse-programming model of a single RRAM cell.

A cell's conductance moves along a saturating exponential update curve, one
programming pulse at a time.  Potentiation follows

    G(P) = g_min + (g_max - g_min) * (1 - exp(-nl * P / p_max)) / (1 - exp(-nl))

for pulse position ``P`` in ``[0, p_max]`` and nonlinearity ``nl``; depression
is the mirrored form measured down from ``g_max`` with its own nonlinearity.
``nl -> 0`` degenerates to a linear staircase of ``p_max`` equal steps.  The
nonlinearity may carry either sign; positive values make the curve concave
(large steps near the start of the range), negative values convex.

Each pulse's nominal step is scaled by ``(1 + xi)`` with
``xi ~ Normal(0, sigma_c2c^2)`` modelling cycle-to-cycle variation, then the
result is clamped to the programmable window.  One :func:`program_cell` call
is a single write: a constant-polarity train of whole curve steps plus a
final amplitude-trimmed pulse, planned so the nominal trajectory lands on the
level-snapped target, then issued open-loop.  A noiseless write is therefore
exact, while a noisy one accumulates per-pulse noise across the train;
closing the loop across repeated writes is the verify protocol's job, one
layer up.

All functions are pure given their arguments plus an injected random stream;
concurrent use is safe as long as each worker owns its stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

POTENTIATE = "potentiate"
DEPRESS = "depress"

# Below this magnitude the exponential curve is numerically indistinguishable
# from (and is replaced by) the exact linear limit.
_LINEAR_NL = 1e-9

# Level grids at least this fine are below float64 resolution; snapping would
# be the identity anyway, so it is skipped.
_UNQUANTIZED = 1 << 53

_PULSE_BUDGET_FACTOR = 2  # per-call budget = 2 * p_max pulses


@dataclass(frozen=True)
class DeviceProfile:
    """Calibration constants for one RRAM material system.

    The shipped profiles are calibration inputs, not measured truths: the
    public literature reports nonlinearity pairs and relative device
    orderings, but not per-device ``p_max``, ``n_levels`` or ``sigma_c2c``.
    """

    name: str
    g_min: float            # S, bottom of the programmable window
    g_max: float            # S, top of the programmable window
    n_levels: int           # quantized conductance levels across the window
    nl_ltp: float           # potentiation nonlinearity
    nl_ltd: float           # depression nonlinearity (sign may differ)
    sigma_c2c: float        # per-pulse cycle-to-cycle std-dev (dimensionless)
    e_pulse: float          # J per write pulse
    t_pulse: float          # s per write pulse
    p_max: int              # pulses to traverse the full window

    def __post_init__(self):
        if not (self.g_max > self.g_min > 0.0):
            raise ValueError(f"{self.name}: requires g_max > g_min > 0")
        if self.n_levels < 2:
            raise ValueError(f"{self.name}: n_levels must be >= 2")
        if self.p_max < 1:
            raise ValueError(f"{self.name}: p_max must be >= 1")
        if self.sigma_c2c < 0.0:
            raise ValueError(f"{self.name}: sigma_c2c must be >= 0")
        if self.e_pulse <= 0.0 or self.t_pulse <= 0.0:
            raise ValueError(f"{self.name}: e_pulse and t_pulse must be > 0")

    @property
    def g_range(self) -> float:
        return self.g_max - self.g_min

    @property
    def level_spacing(self) -> float:
        return self.g_range / (self.n_levels - 1)

    def snap(self, g):
        """Snap conductance(s) to the nearest of the uniform level grid."""
        if self.n_levels >= _UNQUANTIZED:
            return np.asarray(g, dtype=float) if not np.isscalar(g) else float(g)
        h = self.level_spacing
        snapped = self.g_min + np.round((np.asarray(g, dtype=float) - self.g_min) / h) * h
        return float(snapped) if np.isscalar(g) else snapped


def _gain_fraction(u, nl):
    """Fraction of the window gained after a fraction ``u`` of p_max pulses."""
    if abs(nl) < _LINEAR_NL:
        return u
    return np.expm1(-nl * u) / np.expm1(-nl)


def _gain_fraction_inv(y, nl):
    """Inverse of :func:`_gain_fraction` on [0, 1]."""
    if abs(nl) < _LINEAR_NL:
        return y
    return np.log1p(y * np.expm1(-nl)) / (-nl)


def conductance_at(pos, profile: DeviceProfile, direction: str):
    """Conductance at continuous pulse position ``pos`` on a direction's curve."""
    u = np.asarray(pos, dtype=float) / profile.p_max
    if direction == POTENTIATE:
        return profile.g_min + profile.g_range * _gain_fraction(u, profile.nl_ltp)
    if direction == DEPRESS:
        return profile.g_max - profile.g_range * _gain_fraction(u, profile.nl_ltd)
    raise ValueError(f"unknown pulse direction: {direction!r}")


def position_of(g, profile: DeviceProfile, direction: str):
    """Continuous pulse position of conductance ``g`` on a direction's curve."""
    if direction == POTENTIATE:
        y = (np.asarray(g, dtype=float) - profile.g_min) / profile.g_range
        return profile.p_max * _gain_fraction_inv(np.clip(y, 0.0, 1.0), profile.nl_ltp)
    if direction == DEPRESS:
        y = (profile.g_max - np.asarray(g, dtype=float)) / profile.g_range
        return profile.p_max * _gain_fraction_inv(np.clip(y, 0.0, 1.0), profile.nl_ltd)
    raise ValueError(f"unknown pulse direction: {direction!r}")


def _check_window(g, profile: DeviceProfile):
    arr = np.asarray(g, dtype=float)
    if np.any(arr < profile.g_min) or np.any(arr > profile.g_max):
        raise ValueError(
            f"conductance outside [{profile.g_min}, {profile.g_max}]: corrupted cell state"
        )
    return arr


def apply_pulse(g, direction: str, profile: DeviceProfile, rng=None):
    """Apply one full programming pulse and return the new conductance.

    The nominal step is the curve increment from the cell's current position,
    scaled by ``(1 + xi)`` under cycle-to-cycle noise, and the result is
    clamped to the window.  At the saturated end of the curve the step is zero.
    """
    arr = _check_window(g, profile)
    pos = position_of(arr, profile, direction)
    nominal = conductance_at(np.minimum(pos + 1.0, profile.p_max), profile, direction) - arr
    if profile.sigma_c2c > 0.0:
        if rng is None:
            raise ValueError("a random generator is required when sigma_c2c > 0")
        nominal = nominal * (1.0 + profile.sigma_c2c * rng.standard_normal(arr.shape))
    out = np.clip(arr + nominal, profile.g_min, profile.g_max)
    return float(out) if np.isscalar(g) else out


def program_cells(g_start, targets, profile: DeviceProfile, rng=None):
    """Program many cells toward level-snapped targets, one pulse train each.

    A call plans, per cell, the constant-polarity train that nominally crosses
    or reaches the snapped target from the start state: whole curve steps
    followed by one amplitude-trimmed pulse aimed exactly at the target.  The
    train is issued open-loop; cycle-to-cycle noise scales every planned step
    by ``(1 + xi)`` independently, so the achieved conductance deviates from
    the target by the accumulated pulse noise.  There is no feedback within a
    call: re-invoking from the achieved state (the verify loop's job) is what
    closes the loop, shrinking the residual geometrically.  Plans are capped
    at the per-call budget of ``2 * p_max`` pulses; a noiseless plan lands on
    the target exactly.

    Returns ``(g_final, pulses)`` as arrays matching the input shape.
    """
    g0 = _check_window(np.array(g_start, dtype=float, copy=True), profile)
    t = profile.snap(_check_window(targets, profile))
    g0, t = np.broadcast_arrays(g0, t)
    shape = g0.shape
    g = np.ascontiguousarray(g0, dtype=float).reshape(-1)
    t = np.ascontiguousarray(t, dtype=float).reshape(-1)
    pulses = np.zeros(g.shape, dtype=np.int64)
    budget = _PULSE_BUDGET_FACTOR * profile.p_max

    pot = t > g
    dep = t < g
    pos0 = np.zeros_like(g)
    pos1 = np.zeros_like(g)
    if np.any(pot):
        pos0[pot] = position_of(g[pot], profile, POTENTIATE)
        pos1[pot] = position_of(t[pot], profile, POTENTIATE)
    if np.any(dep):
        pos0[dep] = position_of(g[dep], profile, DEPRESS)
        pos1[dep] = position_of(t[dep], profile, DEPRESS)
    moving = pot | dep
    plan = np.zeros(g.shape, dtype=np.int64)
    # ceil with a tolerance so integer-length plans stay exact in float.
    plan[moving] = np.maximum(np.ceil(pos1[moving] - pos0[moving] - 1e-9), 1).astype(np.int64)
    plan = np.minimum(plan, budget)
    pulses[:] = plan

    if profile.sigma_c2c == 0.0:
        out = np.where(moving, t, g)
        return out.reshape(shape), pulses.reshape(shape)

    if rng is None:
        raise ValueError("a random generator is required when sigma_c2c > 0")

    # Accumulate per-pulse noise along the nominal trajectory of each plan.
    # Cells are sorted by plan length so the active set is always a suffix.
    idx = np.flatnonzero(moving)
    idx = idx[np.argsort(plan[idx], kind="stable")]
    plan_sorted = plan[idx]
    drift = np.zeros(g.shape)
    n_steps = int(plan_sorted[-1]) if idx.size else 0
    for step_no in range(n_steps):
        start = int(np.searchsorted(plan_sorted, step_no + 1))
        act = idx[start:]
        sel_pot = pot[act]
        pos_now = np.minimum(pos0[act] + step_no, float(profile.p_max))
        pos_next = np.minimum(pos_now + 1.0, float(profile.p_max))
        here = np.empty(act.size)
        nxt = np.empty(act.size)
        for mask, direction in ((sel_pot, POTENTIATE), (~sel_pot, DEPRESS)):
            if np.any(mask):
                here[mask] = conductance_at(pos_now[mask], profile, direction)
                nxt[mask] = conductance_at(pos_next[mask], profile, direction)
        nominal = nxt - here
        # The final pulse of each plan is trimmed to land on the target.
        last = plan_sorted[start:] == (step_no + 1)
        nominal[last] = t[act[last]] - here[last]
        xi = profile.sigma_c2c * rng.standard_normal(act.size)
        drift[act] += nominal * xi
    out = np.where(moving, t + drift, g)
    np.clip(out, profile.g_min, profile.g_max, out=out)
    return out.reshape(shape), pulses.reshape(shape)


def program_cell(g_start: float, target: float, profile: DeviceProfile, rng=None):
    """Program one cell; returns ``(g_final, pulses, energy_J, latency_s)``."""
    g, n = program_cells(np.asarray([g_start]), np.asarray([target]), profile, rng)
    count = int(n[0])
    return float(g[0]), count, count * profile.e_pulse, count * profile.t_pulse


def _default_profiles_path() -> Path:
    return Path(str(resources.files("xbarsim").joinpath("data/devices.toml")))


def load_profiles(path=None) -> dict[str, DeviceProfile]:
    """Load device profiles from a TOML file (one table per device).

    Table keys are exactly the :class:`DeviceProfile` field names; the table
    name doubles as the profile name when no ``name`` key is given.
    """
    p = Path(path) if path is not None else _default_profiles_path()
    with open(p, "rb") as fh:
        raw = tomllib.load(fh)
    profiles = {}
    for table_name, fields in raw.items():
        if not isinstance(fields, dict):
            raise ValueError(f"device profile file: top-level key {table_name!r} is not a table")
        fields = dict(fields)
        fields.setdefault("name", table_name)
        try:
            profiles[table_name] = DeviceProfile(**fields)
        except TypeError as exc:
            raise ValueError(f"device profile {table_name!r}: {exc}") from exc
    return profiles
