"""Command-line benchmark harness.

Subcommands: ``run`` (one MVM), ``bench-ec`` (verify-iteration sweep),
``bench-weak`` (fixed problem, growing cell size), ``bench-strong`` (fixed
hardware, growing matrices), ``profiles list``.

Settings resolve as explicit flag > config file (``--config``, TOML) >
built-in default; ``[experiment]`` keys mirror the flag names (``k`` for the
verify-iteration count), ``[grid]`` holds ``R``, ``C``, ``r``, ``c`` and
``workers``, and ``[device.<name>]`` tables define custom profiles.  Every
command validates its full configuration before any simulation work starts,
so a bad flag or missing file never leaves partial artifacts.

All randomness derives from the master seed: replication ``i`` uses the
stream seed ``derive_seed(seed, i)``, which also seeds that replication's
input vector (unless ``--fixed-vector``), so published CSVs are reproducible
byte for byte for any worker count.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .correction import DenoiseConfig, EcConfig
from .device import DeviceProfile, load_profiles
from .io import (
    REGISTRY,
    ConfigError,
    ResultRow,
    default_fixtures_dir,
    emit_results,
    generate_iperturb,
    load_experiment_config,
    load_matrix_market,
    registry_matrix_path,
    sample_input_vector,
)
from .metrics import replication_summary
from .seeds import derive_seed
from .tiling import TileGrid, distributed_mat_vec_mul, reassignment_factor

WORKERS_ENV = "XBARSIM_WORKERS"

ALL_DEVICES = "epiram,ag-asi,alox-hfo2,taox-hfox"
WEAK_CELL_SIZES = "32,64,128,256,512,1024"


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _grid_spec(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("grid spec must be R,C,r,c")
    return tuple(_positive_int(p) for p in parts)


def build_parser():
    ap = argparse.ArgumentParser(prog="xbarsim", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"xbarsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="TOML experiment config")
        p.add_argument("--profiles", default=None, help="device profile TOML (default: shipped)")
        p.add_argument("--fixtures", default=None, help="matrix fixtures directory")
        p.add_argument("--workers", type=_positive_int, default=None,
                       help=f"worker threads (or ${WORKERS_ENV}; default: CPU count)")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        p.add_argument("--out", default=None, help="output directory")

    def ec_knobs(p, k_default):
        p.add_argument("-k", "--verify-iters", dest="k", type=int, default=None,
                       help=f"max write-and-verify iterations (default {k_default})")
        p.add_argument("--eps", type=float, default=None, help="verify tolerance (default 0)")
        p.add_argument("--norm", default=None, help="verify norm: 2 or inf (default 2)")
        p.add_argument("--lam", "--lambda", dest="lam", type=float, default=None,
                       help="denoiser regularization weight (default 1e-12)")
        p.add_argument("--h", type=int, default=None,
                       help="denoiser superdiagonal value (default -1)")

    run = sub.add_parser("run", help="one (distributed) matrix-vector multiply")
    common(run)
    src = run.add_mutually_exclusive_group()
    src.add_argument("--matrix", default=None, help="Matrix Market file path")
    src.add_argument("--registry", default=None, help="bundled benchmark matrix name")
    src.add_argument("--iperturb", type=_positive_int, default=None,
                     help="generate a perturbed identity of this size")
    run.add_argument("--kappa", type=float, default=None,
                     help="condition target for --iperturb (default 1.2342)")
    run.add_argument("--device", default=None, help="device profile (default taox-hfox)")
    run.add_argument("--grid", type=_grid_spec, default=None,
                     help="R,C,r,c (default: one array fitting the matrix)")
    run.add_argument("--ec", action=argparse.BooleanOptionalAction, default=None,
                     help="error correction (default on)")
    ec_knobs(run, 2)
    run.add_argument("--denoise-mode", choices=("exact", "encoded"), default=None)
    run.add_argument("--vector-seed", type=int, default=None,
                     help="input vector seed (default: derived from the master seed)")

    ec = sub.add_parser("bench-ec", help="verify-iteration sweep on one 66 x 66 benchmark")
    common(ec)
    ec.add_argument("--matrix", choices=("bcsstk02", "iperturb"), default=None)
    ec.add_argument("--kappa", type=float, default=None)
    ec.add_argument("--devices", default=None, help=f"comma list (default {ALL_DEVICES})")
    ec.add_argument("--k-max", type=int, default=None, help="sweep upper bound (default 20)")
    ec.add_argument("--reps", type=_positive_int, default=None,
                    help="replications per point (default 100)")
    ec.add_argument("--ec", choices=("on", "off"), default=None)
    ec.add_argument("--eps", type=float, default=None)
    ec.add_argument("--norm", default=None)
    ec.add_argument("--lam", "--lambda", dest="lam", type=float, default=None)
    ec.add_argument("--h", type=int, default=None)
    ec.add_argument("--fixed-vector", action="store_true", default=None,
                    help="reuse replication 0's input vector for every replication")
    ec.add_argument("--allow-epiram-ec", action="store_true", default=None,
                    help="include EpiRAM in EC-on sweeps (it is the uncorrected benchmark)")

    weak = sub.add_parser("bench-weak", help="fixed add32 problem, growing cell sizes")
    common(weak)
    weak.add_argument("--devices", default=None)
    weak.add_argument("--tile", type=_positive_int, nargs=2, default=None,
                      metavar=("R", "C"), help="tile grid (default 8 8)")
    weak.add_argument("--cell-sizes", default=None,
                      help=f"comma list of powers of two (default {WEAK_CELL_SIZES})")
    weak.add_argument("--reps", type=_positive_int, default=None)
    ec_knobs(weak, 5)

    strong = sub.add_parser("bench-strong", help="fixed 8x8x1024^2 system, growing matrices")
    common(strong)
    strong.add_argument("--devices", default=None)
    strong.add_argument("--matrices", default=None,
                        help="comma list (default: desk-scale registry subset)")
    strong.add_argument("--include-large", action="store_true", default=None,
                        help="add the opt-in large registry entries to the default set")
    strong.add_argument("--tile", type=_positive_int, nargs=2, default=None,
                        metavar=("R", "C"), help="tile grid (default 8 8)")
    strong.add_argument("--cell", type=_positive_int, nargs=2, default=None,
                        metavar=("r", "c"), help="cells per array (default 1024 1024)")
    strong.add_argument("--reps", type=_positive_int, default=None)
    ec_knobs(strong, 2)
    strong.add_argument("--norm-override", type=_positive_int, default=None,
                        help="override the reassignment normalization factor")

    profiles = sub.add_parser("profiles", help="device profile utilities")
    psub = profiles.add_subparsers(dest="profiles_command", required=True)
    plist = psub.add_parser("list", help="list shipped (or custom) device profiles")
    plist.add_argument("--profiles", default=None)

    return ap


# --- config plumbing ---------------------------------------------------------

class Settings:
    """Flag > config-file > default resolution for one command invocation."""

    def __init__(self, args):
        self.args = args
        cfg = (load_experiment_config(args.config) if getattr(args, "config", None)
               else {"grid": {}, "device": {}, "experiment": {}})
        self.grid_cfg = cfg["grid"]
        self.device_cfg = cfg["device"]
        self.exp = cfg["experiment"]

    def get(self, key, default=None, flag=None):
        value = getattr(self.args, flag or key, None)
        if value is None:
            value = self.exp.get(key, default)
        return value

    def norm(self):
        value = self.get("norm", 2)
        if value in (2, 2.0, "2"):
            return 2.0
        if value in (float("inf"), "inf"):
            return float("inf")
        raise ConfigError(f"norm must be 2 or inf, got {value!r}")

    def seed(self) -> int:
        return int(self.get("seed", 0))

    def workers(self) -> int:
        if self.args.workers:
            return self.args.workers
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                value = int(env)
            except ValueError as exc:
                raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
            if value < 1:
                raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {value}")
            return value
        if self.grid_cfg.get("workers"):
            return int(self.grid_cfg["workers"])
        return os.cpu_count() or 1

    def profiles(self) -> dict:
        profiles = load_profiles(self.args.profiles)
        for name, fields in self.device_cfg.items():
            fields = dict(fields)
            fields.setdefault("name", name)
            profiles[name] = DeviceProfile(**fields)
        return profiles

    def devices(self, profiles) -> list:
        names_csv = self.get("devices", ALL_DEVICES)
        names = [n.strip() for n in str(names_csv).split(",") if n.strip()]
        unknown = [n for n in names if n not in profiles]
        if unknown:
            raise ConfigError(f"unknown device profile(s): {unknown}; "
                              f"available: {sorted(profiles)}")
        return names

    def ec_config(self, enabled, k_default, n_verify=None) -> EcConfig:
        k = int(self.get("k", k_default)) if n_verify is None else n_verify
        eps = float(self.get("eps", 0.0))
        lam = float(self.get("lam", 1e-12))
        h = int(self.get("h", -1))
        if k < 0:
            raise ConfigError("verify iterations must be >= 0")
        if eps < 0:
            raise ConfigError("eps must be >= 0")
        if lam < 0:
            raise ConfigError("lambda must be >= 0")
        mode = self.get("denoise_mode", "exact")
        if mode not in ("exact", "encoded"):
            raise ConfigError(f"denoise_mode must be exact or encoded, got {mode!r}")
        return EcConfig(enabled=enabled, eps=eps, n_verify=k, norm_p=self.norm(),
                        denoise=DenoiseConfig(lam=lam, h=h), denoise_mode=mode)

    def fixtures_dir(self) -> Path:
        value = self.get("fixtures")
        return Path(value) if value else default_fixtures_dir()

    def out_dir(self, default_name) -> Path:
        return Path(self.get("out", default_name))

    def tile(self, default=(8, 8)):
        if self.args.tile is not None:
            return tuple(self.args.tile)
        if "R" in self.grid_cfg or "C" in self.grid_cfg:
            return int(self.grid_cfg.get("R", default[0])), int(self.grid_cfg.get("C", default[1]))
        return default


def _config_echo(resolved):
    return {k: (str(v) if isinstance(v, Path) else v)
            for k, v in sorted(resolved.items()) if v is not None}


def _summary_rows(rows_by_key):
    """Replication means per (device, matrix, k) key, in first-seen order."""
    out = []
    for key, pairs in rows_by_key.items():
        device, matrix, m, n, k, ec_enabled, normalization = key
        summary = replication_summary([metrics for metrics, _ in pairs])
        out.append(ResultRow(device=device, matrix=matrix, m=m, n=n, k=k,
                             ec_enabled=ec_enabled,
                             err_l2=summary.err_l2, err_linf=summary.err_linf,
                             e_w_joules=summary.e_w, l_w_seconds=summary.l_w,
                             normalization=normalization, seed=None))
    return out


# --- subcommands --------------------------------------------------------------

def cmd_run(args) -> int:
    st = Settings(args)
    workers = st.workers()
    profiles = st.profiles()
    seed = st.seed()

    device = st.get("device", "taox-hfox")
    if device not in profiles:
        raise ConfigError(f"unknown device profile: {device!r}; available: {sorted(profiles)}")
    profile = profiles[device]

    if args.matrix:
        path = Path(args.matrix)
        if not path.exists():
            raise ConfigError(f"matrix file not found: {path}")
        record = load_matrix_market(path)
    elif args.iperturb:
        record = generate_iperturb(args.iperturb, seed, float(st.get("kappa", 1.2342)))
    else:
        name = args.registry or st.get("matrix", "bcsstk02")
        path = registry_matrix_path(name, st.fixtures_dir())
        if not path.exists():
            raise ConfigError(f"matrix file not found: {path}")
        record = load_matrix_market(path)
    A = record.to_csr()
    m, n = A.shape

    if args.grid:
        R, C, r, c = args.grid
    elif st.grid_cfg:
        g = st.grid_cfg
        try:
            R, C, r, c = int(g["R"]), int(g["C"]), int(g["r"]), int(g["c"])
        except KeyError as exc:
            raise ConfigError(f"[grid] section missing key: {exc}") from exc
    else:
        R, C, r, c = 1, 1, max(m, n), n
    grid = TileGrid(R, C, r, c, profile)

    ec_enabled = st.get("ec", True, flag="ec")
    k = int(st.get("k", 2))
    ec_cfg = st.ec_config(bool(ec_enabled), 2)
    vector_seed = st.get("vector_seed")
    vector_seed = int(vector_seed) if vector_seed is not None else derive_seed(seed, 1)
    x = sample_input_vector(n, vector_seed)

    b_hat, mets = distributed_mat_vec_mul(A, x, grid, ec_cfg, seed, workers=workers)

    out = st.out_dir("xbarsim-out")
    out.mkdir(parents=True, exist_ok=True)
    row = ResultRow(device=device, matrix=record.name, m=m, n=n,
                    k=k, ec_enabled=bool(ec_enabled),
                    err_l2=mets.err_l2, err_linf=mets.err_linf,
                    e_w_joules=mets.e_w, l_w_seconds=mets.l_w,
                    normalization=1, seed=seed)
    echo = _config_echo({
        "command": "run", "device": device, "matrix": record.name,
        "grid": [R, C, r, c], "ec": bool(ec_enabled), "k": k,
        "eps": ec_cfg.eps, "norm": "inf" if ec_cfg.norm_p == float("inf") else 2,
        "lam": ec_cfg.denoise.lam, "h": ec_cfg.denoise.h,
        "denoise_mode": ec_cfg.denoise_mode, "seed": seed,
        "vector_seed": vector_seed, "workers": workers, "out": out})
    emit_results([row], csv_path=out / "metrics.csv", json_path=out / "result.json",
                 config_echo=echo)
    with open(out / "bhat.txt", "w") as fh:
        for value in b_hat:
            fh.write(repr(float(value)) + "\n")
    print(f"run: {device} on {record.name} ({m} x {n}), err_l2={mets.err_l2:.6g}, "
          f"E_w={mets.e_w:.6g} J, L_w={mets.l_w:.6g} s -> {out}")
    return 0


def _run_single_array(A, n_cols, profile, ec_cfg, rep_seed, fixed_seed):
    """One replication on a single array sized to the matrix (1x1 grid)."""
    m = A.shape[0]
    grid = TileGrid(1, 1, max(m, n_cols), n_cols, profile)
    x = sample_input_vector(n_cols, fixed_seed if fixed_seed is not None else rep_seed)
    _, mets = distributed_mat_vec_mul(A, x, grid, ec_cfg, rep_seed, workers=1)
    return mets


def cmd_bench_ec(args) -> int:
    st = Settings(args)
    workers = st.workers()
    profiles = st.profiles()
    devices = st.devices(profiles)
    seed = st.seed()
    k_max = int(st.get("k_max", 20))
    reps = int(st.get("reps", 100))
    if k_max < 0:
        raise ConfigError("k-max must be >= 0")
    if reps < 1:
        raise ConfigError("reps must be >= 1")
    ec_on = str(st.get("ec", "on", flag="ec")) == "on"
    if ec_on and not st.get("allow_epiram_ec", False):
        devices = [d for d in devices if d != "epiram"]
        if not devices:
            raise ConfigError("no devices left to run: EpiRAM is EC-off only "
                              "(pass --allow-epiram-ec to override)")

    matrix = st.get("matrix", "bcsstk02")
    if matrix == "bcsstk02":
        path = registry_matrix_path("bcsstk02", st.fixtures_dir())
        if not path.exists():
            raise ConfigError(f"matrix file not found: {path}")
        record = load_matrix_market(path)
    else:
        record = generate_iperturb(66, seed, float(st.get("kappa", 1.2342)))
    A = record.to_csr()
    m, n = A.shape

    fixed_seed = derive_seed(seed, 0) if st.get("fixed_vector", False) else None
    tasks = [(d, k, rep) for d in devices for k in range(k_max + 1)
             for rep in range(reps)]

    def one(task):
        device, k, rep = task
        rep_seed = derive_seed(seed, rep)
        ec_cfg = st.ec_config(ec_on, 0, n_verify=k)
        mets = _run_single_array(A, n, profiles[device], ec_cfg, rep_seed, fixed_seed)
        return task, (mets, rep_seed)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = dict(pool.map(one, tasks))

    rep_rows, by_key = [], {}
    for task in tasks:
        device, k, rep = task
        mets, rep_seed = results[task]
        rep_rows.append(ResultRow(device=device, matrix=record.name, m=m, n=n, k=k,
                                  ec_enabled=ec_on, err_l2=mets.err_l2,
                                  err_linf=mets.err_linf, e_w_joules=mets.e_w,
                                  l_w_seconds=mets.l_w, normalization=1,
                                  seed=rep_seed))
        by_key.setdefault((device, record.name, m, n, k, ec_on, 1), []).append(
            (mets, rep_seed))

    out = st.out_dir("xbarsim-ec")
    out.mkdir(parents=True, exist_ok=True)
    echo = _config_echo({
        "command": "bench-ec", "matrix": record.name, "devices": devices,
        "k_max": k_max, "reps": reps, "ec": "on" if ec_on else "off",
        "seed": seed, "workers": workers, "out": out,
        "fixed_vector": bool(st.get("fixed_vector", False))})
    emit_results(rep_rows, csv_path=out / "ec_reps.csv",
                 json_path=out / "ec_reps.json", config_echo=echo)
    emit_results(_summary_rows(by_key), csv_path=out / "ec_summary.csv",
                 json_path=out / "ec_summary.json", config_echo=echo)
    print(f"bench-ec: {len(rep_rows)} replication rows, "
          f"{len(by_key)} summary rows -> {out}")
    return 0


def _parse_cell_sizes(text):
    sizes = []
    for token in str(text).split(","):
        token = token.strip()
        if not token:
            continue
        size = int(token)
        if size < 32 or size > 1024 or (size & (size - 1)) != 0:
            raise ConfigError(f"cell sizes must be powers of two in [32, 1024], got {size}")
        sizes.append(size)
    if not sizes:
        raise ConfigError("no cell sizes given")
    return sizes


def cmd_bench_weak(args) -> int:
    st = Settings(args)
    workers = st.workers()
    profiles = st.profiles()
    devices = st.devices(profiles)
    seed = st.seed()
    reps = int(st.get("reps", 3))
    k = int(st.get("k", 5))
    sizes = _parse_cell_sizes(st.get("cell_sizes", WEAK_CELL_SIZES))
    R, C = st.tile()

    path = registry_matrix_path("add32", st.fixtures_dir())
    if not path.exists():
        raise ConfigError(f"matrix file not found: {path}")
    record = load_matrix_market(path)
    A = record.to_csr()
    m, n = A.shape
    ec_cfg = st.ec_config(True, 5)

    rep_rows, by_key = [], {}
    for device in devices:
        for size in sizes:
            label = f"{record.name}@{R}x{C}x{size}x{size}"
            for rep in range(reps):
                rep_seed = derive_seed(seed, rep)
                grid = TileGrid(R, C, size, size, profiles[device])
                x = sample_input_vector(n, rep_seed)
                _, mets = distributed_mat_vec_mul(A, x, grid, ec_cfg, rep_seed,
                                                  workers=workers)
                rep_rows.append(ResultRow(device=device, matrix=label, m=m, n=n,
                                          k=k, ec_enabled=True,
                                          err_l2=mets.err_l2, err_linf=mets.err_linf,
                                          e_w_joules=mets.e_w, l_w_seconds=mets.l_w,
                                          normalization=1, seed=rep_seed))
                by_key.setdefault((device, label, m, n, k, True, 1),
                                  []).append((mets, rep_seed))

    out = st.out_dir("xbarsim-weak")
    out.mkdir(parents=True, exist_ok=True)
    echo = _config_echo({
        "command": "bench-weak", "devices": devices, "tile": [R, C],
        "cell_sizes": sizes, "reps": reps, "k": k, "seed": seed,
        "workers": workers, "out": out})
    emit_results(rep_rows, csv_path=out / "weak_reps.csv",
                 json_path=out / "weak_reps.json", config_echo=echo)
    emit_results(_summary_rows(by_key), csv_path=out / "weak_summary.csv",
                 json_path=out / "weak_summary.json", config_echo=echo)
    print(f"bench-weak: {len(rep_rows)} replication rows -> {out}")
    return 0


def cmd_bench_strong(args) -> int:
    st = Settings(args)
    workers = st.workers()
    profiles = st.profiles()
    devices = st.devices(profiles)
    seed = st.seed()
    reps = int(st.get("reps", 3))
    k = int(st.get("k", 2))
    R, C = st.tile()
    if args.cell is not None:
        r, c = args.cell
    elif "r" in st.grid_cfg or "c" in st.grid_cfg:
        r, c = int(st.grid_cfg.get("r", 1024)), int(st.grid_cfg.get("c", 1024))
    else:
        r, c = 1024, 1024

    names_csv = st.get("matrices")
    if names_csv:
        names = [t.strip() for t in str(names_csv).split(",") if t.strip()]
        unknown = [n for n in names if n not in REGISTRY]
        if unknown:
            raise ConfigError(f"unknown registry matrices: {unknown}")
    else:
        include_large = bool(st.get("include_large", False))
        names = [e.name for e in REGISTRY.values() if e.default or include_large]

    fixtures = st.fixtures_dir()
    missing = [name for name in names
               if not registry_matrix_path(name, fixtures).exists()]
    if missing:
        raise ConfigError("missing matrix files: "
                          + ", ".join(str(registry_matrix_path(n, fixtures))
                                      for n in missing))
    ec_cfg = st.ec_config(True, 2)

    rep_rows, summary_rows = [], []
    for name in names:
        record = load_matrix_market(registry_matrix_path(name, fixtures))
        A = record.to_csr()
        m, n = A.shape
        for device in devices:
            grid_probe = TileGrid(R, C, r, c, profiles[device])
            factor = args.norm_override or reassignment_factor((m, n), grid_probe)
            per_rep = []
            for rep in range(reps):
                rep_seed = derive_seed(seed, rep)
                grid = TileGrid(R, C, r, c, profiles[device])
                x = sample_input_vector(n, rep_seed)
                _, mets = distributed_mat_vec_mul(A, x, grid, ec_cfg, rep_seed,
                                                  workers=workers)
                per_rep.append(mets)
                rep_rows.append(ResultRow(device=device, matrix=name, m=m, n=n,
                                          k=k, ec_enabled=True,
                                          err_l2=mets.err_l2, err_linf=mets.err_linf,
                                          e_w_joules=mets.e_w, l_w_seconds=mets.l_w,
                                          normalization=1, seed=rep_seed))
            summary = replication_summary(per_rep)
            summary_rows.append(ResultRow(device=device, matrix=name, m=m, n=n,
                                          k=k, ec_enabled=True,
                                          err_l2=summary.err_l2,
                                          err_linf=summary.err_linf,
                                          e_w_joules=summary.e_w / factor,
                                          l_w_seconds=summary.l_w / factor,
                                          normalization=factor, seed=None))

    out = st.out_dir("xbarsim-strong")
    out.mkdir(parents=True, exist_ok=True)
    echo = _config_echo({
        "command": "bench-strong", "devices": devices, "matrices": names,
        "tile": [R, C], "cell": [r, c], "reps": reps, "k": k, "seed": seed,
        "norm_override": args.norm_override, "workers": workers, "out": out})
    emit_results(rep_rows, csv_path=out / "strong_reps.csv",
                 json_path=out / "strong_reps.json", config_echo=echo)
    emit_results(summary_rows, csv_path=out / "strong_summary.csv",
                 json_path=out / "strong_summary.json", config_echo=echo)
    print(f"bench-strong: {len(rep_rows)} replication rows, "
          f"{len(summary_rows)} summary rows -> {out}")
    return 0


def cmd_profiles_list(args) -> int:
    profiles = load_profiles(args.profiles)
    header = (f"{'name':<12} {'g_min':>9} {'g_max':>9} {'levels':>8} "
              f"{'nl_ltp':>7} {'nl_ltd':>7} {'sigma':>6} {'e_pulse':>9} "
              f"{'t_pulse':>9} {'p_max':>6}")
    print(header)
    for name, p in profiles.items():
        print(f"{name:<12} {p.g_min:>9.2e} {p.g_max:>9.2e} {p.n_levels:>8d} "
              f"{p.nl_ltp:>7.2f} {p.nl_ltd:>7.2f} {p.sigma_c2c:>6.3f} "
              f"{p.e_pulse:>9.2e} {p.t_pulse:>9.2e} {p.p_max:>6d}")
    return 0


_COMMANDS = {
    "run": cmd_run,
    "bench-ec": cmd_bench_ec,
    "bench-weak": cmd_bench_weak,
    "bench-strong": cmd_bench_strong,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "profiles":
            return cmd_profiles_list(args)
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
