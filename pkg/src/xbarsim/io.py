"""Matrix ingestion, synthetic generators, config loading, result serialization.

Matrices are kept in coordinate (Matrix Market) form and materialized densely
only a chunk at a time, so collection-scale inputs fit desk memory.  The
benchmark registry mirrors the published collection entries by name and
dimension; the bundled ``.mtx`` fixtures are deterministic, structure-matched
stand-ins (same dimensions, symmetry, and conditioning/scale targets), since
downloading the originals is out of scope.  Real files with the same names can
be dropped into a fixtures directory to replace them.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse as sp

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .seeds import make_rng


class MatrixMarketError(ValueError):
    """Base class for Matrix Market parse failures."""


class MalformedBannerError(MatrixMarketError):
    """Banner or size line is structurally invalid."""


class UnsupportedQualifierError(MatrixMarketError):
    """Banner qualifier outside coordinate/general/symmetric support."""


class NonRealFieldError(MatrixMarketError):
    """Field qualifier or value token is not a real number."""


class EntryOutOfRangeError(MatrixMarketError):
    """Coordinate entry indexes outside the declared dimensions."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class MatrixRecord:
    """A named coordinate-form matrix as stored on disk (0-based indices)."""

    name: str
    m: int
    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    symmetry: str = "general"          # "general" | "symmetric"
    provenance: str = ""

    @property
    def shape(self):
        return (self.m, self.n)

    @property
    def nnz_stored(self) -> int:
        return int(self.vals.size)

    def to_csr(self) -> sp.csr_matrix:
        """Expand to full form (mirroring off-diagonal symmetric entries)."""
        rows, cols, vals = self.rows, self.cols, self.vals
        if self.symmetry == "symmetric":
            off = rows != cols
            rows = np.concatenate([rows, cols[off]])
            cols = np.concatenate([cols, self.rows[off]])
            vals = np.concatenate([vals, vals[off]])
        return sp.coo_matrix((vals, (rows, cols)), shape=(self.m, self.n)).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()


def parse_matrix_market(data, name: str = "") -> MatrixRecord:
    """Parse coordinate/real Matrix Market text (general or symmetric)."""
    if isinstance(data, bytes):
        data = data.decode("ascii", errors="replace")
    lines = data.splitlines()
    if not lines:
        raise MalformedBannerError("empty input")
    banner = lines[0].strip().split()
    if len(banner) != 5 or banner[0].lower() != "%%matrixmarket":
        raise MalformedBannerError(f"malformed banner: {lines[0]!r}")
    obj, fmt, fld, sym = (t.lower() for t in banner[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise UnsupportedQualifierError(f"unsupported object/format: {obj} {fmt}")
    if fld != "real":
        raise NonRealFieldError(f"unsupported field type: {fld}")
    if sym not in ("general", "symmetric"):
        raise UnsupportedQualifierError(f"unsupported symmetry: {sym}")

    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MalformedBannerError("missing size line")
    size_tokens = body[0].split()
    if len(size_tokens) != 3:
        raise MalformedBannerError(f"malformed size line: {body[0]!r}")
    try:
        m, n, nnz = (int(t) for t in size_tokens)
    except ValueError as exc:
        raise MalformedBannerError(f"malformed size line: {body[0]!r}") from exc
    if m < 1 or n < 1 or nnz < 0:
        raise MalformedBannerError(f"invalid dimensions: {m} {n} {nnz}")
    entries = body[1:]
    if len(entries) != nnz:
        raise MatrixMarketError(f"declared {nnz} entries, found {len(entries)}")

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=float)
    for k, ln in enumerate(entries):
        tokens = ln.split()
        if len(tokens) != 3:
            raise MatrixMarketError(f"entry {k + 1}: expected 'i j value', got {ln!r}")
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise MatrixMarketError(f"entry {k + 1}: bad indices in {ln!r}") from exc
        if not (1 <= i <= m and 1 <= j <= n):
            raise EntryOutOfRangeError(f"entry {k + 1}: ({i}, {j}) outside {m} x {n}")
        try:
            v = float(tokens[2])
        except ValueError as exc:
            raise NonRealFieldError(f"entry {k + 1}: non-real value {tokens[2]!r}") from exc
        rows[k], cols[k], vals[k] = i - 1, j - 1, v
    return MatrixRecord(name=name, m=m, n=n, rows=rows, cols=cols, vals=vals,
                        symmetry=sym, provenance=name or "matrix-market")


def load_matrix_market(path) -> MatrixRecord:
    path = Path(path)
    return parse_matrix_market(path.read_text(), name=path.stem)


def write_matrix_market(record: MatrixRecord, path) -> None:
    """Write a record back out; %.17g keeps the round trip value-exact."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate real {record.symmetry}\n")
        fh.write(f"{record.m} {record.n} {record.nnz_stored}\n")
        for i, j, v in zip(record.rows, record.cols, record.vals):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


def sample_input_vector(n: int, seed: int) -> np.ndarray:
    """I.i.d. standard normal input vector, deterministic under the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return make_rng(seed, 0x7EC).standard_normal(n)


_IPERTURB_BUDGET = 80


def generate_iperturb(n: int, seed: int, target_kappa: float) -> MatrixRecord:
    """Identity plus dense Gaussian perturbation, scaled to a 2-norm condition target.

    The perturbation direction is drawn once from the seed; its amplitude is
    bisected until the measured condition number lands within 10% of the
    target.  The achieved value is recorded in the provenance string.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if target_kappa < 1.0:
        raise ValueError("target_kappa must be >= 1")
    eye = np.eye(n)
    if target_kappa == 1.0:
        A = eye
        achieved = 1.0
    else:
        direction = make_rng(seed, 0x1BE4).standard_normal((n, n))

        def kappa(sigma):
            return float(np.linalg.cond(eye + sigma * direction, 2))

        lo, hi = 0.0, 1.0 / math.sqrt(n)
        tries = 0
        while kappa(hi) < target_kappa:
            hi *= 2.0
            tries += 1
            if tries > _IPERTURB_BUDGET:
                raise RuntimeError("iperturb bisection failed to bracket the target")
        for _ in range(_IPERTURB_BUDGET):
            mid = 0.5 * (lo + hi)
            if kappa(mid) < target_kappa:
                lo = mid
            else:
                hi = mid
        sigma = hi
        achieved = kappa(sigma)
        if not (0.9 * target_kappa <= achieved <= 1.1 * target_kappa):
            raise RuntimeError(
                f"iperturb bisection missed: achieved {achieved:.4f} vs target {target_kappa:.4f}"
            )
        A = eye + sigma * direction
    rows, cols = np.nonzero(A)
    return MatrixRecord(name="iperturb", m=n, n=n,
                        rows=rows, cols=cols, vals=A[rows, cols],
                        symmetry="general",
                        provenance=f"iperturb(seed={seed}, kappa={achieved:.6g})")


# --- benchmark registry -----------------------------------------------------

@dataclass(frozen=True)
class RegistryEntry:
    name: str
    n: int                       # square dimension
    symmetric: bool
    norm2: float                 # spectral-norm target for the stand-in fixture
    kappa: float                 # condition-number target (0 = unspecified)
    default: bool                # part of the desk-scale default subset
    nnz_per_row: int             # stand-in sparsity (0 = dense)


REGISTRY = {
    e.name: e for e in [
        RegistryEntry("bcsstk02", 66, True, 1.822575e4, 4.324971e3, True, 0),
        RegistryEntry("wang2", 2903, False, 4.138078, 2.305543e4, True, 5),
        RegistryEntry("add32", 4960, False, 5.749318e-2, 1.366769e2, True, 4),
        RegistryEntry("c-38", 8127, True, 6.083484e2, 1.530683e4, True, 5),
        RegistryEntry("Dubcova1", 16129, True, 4.796329, 9.971199, True, 5),
        RegistryEntry("helm3d01", 32226, True, 5.052177e-1, 2.451897e5, False, 6),
        RegistryEntry("Dubcova2", 65025, True, 4.8, 0.0, False, 5),
    ]
}

_FIXTURE_SEED = 20240 + 517


def default_fixtures_dir() -> Path:
    return Path(str(resources.files("xbarsim").joinpath("data/matrices")))


def registry_matrix_path(name: str, fixtures_dir=None) -> Path:
    if name not in REGISTRY:
        raise KeyError(f"unknown registry matrix: {name!r}")
    base = Path(fixtures_dir) if fixtures_dir is not None else default_fixtures_dir()
    return base / f"{name}.mtx"


def synthesize_registry_matrix(name: str, seed: int = _FIXTURE_SEED) -> MatrixRecord:
    """Deterministic structure-matched stand-in for a registry entry.

    Dense symmetric entries are built from a random orthogonal basis with
    log-spaced eigenvalues, hitting the spectral-norm and condition targets
    essentially exactly.  Sparse entries use a diagonally dominant random
    pattern scaled to the spectral-norm target; their condition numbers are
    not controlled.
    """
    entry = REGISTRY[name]
    rng = make_rng(seed, entry.n)
    n = entry.n
    if entry.nnz_per_row == 0:
        # Dense symmetric via eigendecomposition; exact norm and conditioning.
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eigs = np.geomspace(entry.norm2 / entry.kappa, entry.norm2, n)
        A = (Q * eigs) @ Q.T
        A = 0.5 * (A + A.T)
        iu = np.triu_indices(n)
        # Store the upper triangle of the symmetric matrix (i <= j).
        return MatrixRecord(name=name, m=n, n=n, rows=iu[0], cols=iu[1],
                            vals=A[iu], symmetry="symmetric",
                            provenance=f"synthetic stand-in (seed={seed})")

    k = entry.nnz_per_row
    diag = rng.uniform(1.0, 2.0, size=n)
    r_off = rng.integers(0, n, size=k * n)
    c_off = rng.integers(0, n, size=k * n)
    keep = r_off != c_off
    r_off, c_off = r_off[keep], c_off[keep]
    v_off = rng.uniform(-0.3, 0.3, size=r_off.size) / k
    A = sp.coo_matrix((v_off, (r_off, c_off)), shape=(n, n)).tocsr()
    if entry.symmetric:
        A = 0.5 * (A + A.T)
    else:
        # Pattern-symmetric but numerically asymmetric off-diagonals.
        A = A + 0.3 * A.T
    A = A + sp.diags(diag)
    est = sp.linalg.norm(A, 1)  # cheap upper-bound proxy for the 2-norm
    A = A * (entry.norm2 / est)
    coo = A.tocoo()
    if entry.symmetric:
        keep = coo.row <= coo.col
        return MatrixRecord(name=name, m=n, n=n, rows=coo.row[keep],
                            cols=coo.col[keep], vals=coo.data[keep],
                            symmetry="symmetric",
                            provenance=f"synthetic stand-in (seed={seed})")
    return MatrixRecord(name=name, m=n, n=n, rows=coo.row, cols=coo.col,
                        vals=coo.data, symmetry="general",
                        provenance=f"synthetic stand-in (seed={seed})")


# --- result serialization ----------------------------------------------------

RESULT_COLUMNS = ("device", "matrix", "m", "n", "k", "ec_enabled", "err_l2",
                  "err_linf", "e_w_joules", "l_w_seconds", "normalization", "seed")


@dataclass
class ResultRow:
    """One experiment record: a replication or a replication summary."""

    device: str
    matrix: str
    m: int
    n: int
    k: int
    ec_enabled: bool
    err_l2: float
    err_linf: float
    e_w_joules: float
    l_w_seconds: float
    normalization: int = 1
    seed: int | None = None     # None marks a summary row

    def as_csv_fields(self):
        return (self.device, self.matrix, str(self.m), str(self.n), str(self.k),
                "true" if self.ec_enabled else "false",
                repr(float(self.err_l2)), repr(float(self.err_linf)),
                repr(float(self.e_w_joules)), repr(float(self.l_w_seconds)),
                str(self.normalization),
                "" if self.seed is None else str(self.seed))

    def as_json_obj(self):
        return {c: getattr(self, c) for c in RESULT_COLUMNS}


def emit_results(records, csv_path=None, json_path=None, config_echo=None):
    """Serialize experiment rows to CSV and/or JSON with a stable column order.

    The CSV body is byte-stable for identical inputs: floats are rendered with
    ``repr`` (shortest round-trip form) and no timestamps are written.  The
    JSON artifact mirrors the CSV semantics and adds the config echo.
    """
    records = list(records)
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RESULT_COLUMNS)
            for rec in records:
                writer.writerow(rec.as_csv_fields())
    if json_path is not None:
        payload = {
            "config": dict(config_echo) if config_echo else {},
            "columns": list(RESULT_COLUMNS),
            "rows": [rec.as_json_obj() for rec in records],
        }
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")


def read_results(csv_path) -> list[ResultRow]:
    """Parse a results CSV back into rows (exact inverse of emit_results)."""
    out = []
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RESULT_COLUMNS:
            raise ConfigError(f"unexpected results header: {header}")
        for fields in reader:
            out.append(ResultRow(
                device=fields[0], matrix=fields[1], m=int(fields[2]),
                n=int(fields[3]), k=int(fields[4]),
                ec_enabled=fields[5] == "true",
                err_l2=float(fields[6]), err_linf=float(fields[7]),
                e_w_joules=float(fields[8]), l_w_seconds=float(fields[9]),
                normalization=int(fields[10]),
                seed=None if fields[11] == "" else int(fields[11])))
    return out


# --- experiment configuration -------------------------------------------------

def load_experiment_config(path) -> dict:
    """Load a TOML experiment config with [grid], [device.<name>], [experiment]."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    known = {"grid", "device", "experiment"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return {"grid": dict(raw.get("grid", {})),
            "device": {k: dict(v) for k, v in raw.get("device", {}).items()},
            "experiment": dict(raw.get("experiment", {}))}
