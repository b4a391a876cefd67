"""Virtualization and distribution of MVMs over a fixed grid of crossbars.

A problem larger than the physical system is padded to a whole number of
system-sized blocks, every (padded) block is split into an R x C set of
r x c chunks, and chunk (p, q) of each block always lands on MCA (p, q).
Partial chunk outputs are summed across chunk columns within a block row,
block-row results are summed across block columns, block rows are
concatenated, and the padding rows are stripped; this is the unique
aggregation rule under which the tiled product equals the dense one.

Chunk tasks are independent: each owns its crossbar and random stream for
the task's duration.  One worker drives all blocks of a given MCA in a fixed
order, so results are bit-identical for any worker count; the random stream
of a chunk is derived solely from (master_seed, block row, block col, p, q).
The MPI deployment this mirrors is replaced by in-process workers honoring
the same ownership contract.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .correction import EcConfig, corrected_mat_vec_mul
from .crossbar import Crossbar
from .device import DeviceProfile
from .metrics import RunMetrics, UndefinedMetricError, aggregate_tile_metrics, relative_error
from .seeds import make_rng


class TileGrid:
    """An R x C array of r x c crossbars acting as one compute fabric."""

    def __init__(self, R: int, C: int, r: int, c: int, profile: DeviceProfile):
        if min(R, C, r, c) < 1:
            raise ValueError("grid dimensions must be positive")
        if R < C:
            raise ValueError(f"tile grid requires R >= C, got {R} x {C}")
        if r < c:
            raise ValueError(f"crossbars require r >= c, got {r} x {c}")
        self.R, self.C, self.r, self.c = R, C, r, c
        self.profile = profile
        self.mcas = [[Crossbar(r, c, profile) for _ in range(C)] for _ in range(R)]
        self.reassign_count = np.zeros((R, C), dtype=np.int64)

    @property
    def row_capacity(self) -> int:
        return self.R * self.r

    @property
    def col_capacity(self) -> int:
        return self.C * self.c

    def per_mca_costs(self):
        """Flattened (energy, latency) accumulator pairs, row-major."""
        return [(m.energy_acc, m.latency_acc) for row in self.mcas for m in row]


@dataclass(frozen=True)
class ChunkPlan:
    """Index bookkeeping for one partitioned problem on one grid shape.

    Every original entry maps to exactly one (block, chunk, cell) address and
    the concatenation of chunk ranges tiles the padded index space exactly.
    """

    m: int
    n: int
    m_pad: int
    n_pad: int
    block_rows: int
    block_cols: int
    R: int
    C: int
    r: int
    c: int

    def mat_chunk_range(self, bi: int, bj: int, p: int, q: int):
        """Padded-coordinate (row0, row1, col0, col1) of chunk (p, q) of block (bi, bj)."""
        row0 = bi * self.R * self.r + p * self.r
        col0 = bj * self.C * self.c + q * self.c
        return row0, row0 + self.r, col0, col0 + self.c

    def vec_chunk_range(self, bj: int, q: int):
        """Padded-coordinate (col0, col1) of the vector chunk aligned to column chunk q."""
        col0 = bj * self.C * self.c + q * self.c
        return col0, col0 + self.c

    def address_of(self, i: int, j: int):
        """Map original entry (i, j) to its (bi, bj, p, q, l, h) cell address."""
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"entry ({i}, {j}) outside {self.m} x {self.n}")
        bi, ri = divmod(i, self.R * self.r)
        bj, cj = divmod(j, self.C * self.c)
        p, l = divmod(ri, self.r)
        q, h = divmod(cj, self.c)
        return bi, bj, p, q, l, h

    def iter_chunks(self):
        for bi in range(self.block_rows):
            for bj in range(self.block_cols):
                for p in range(self.R):
                    for q in range(self.C):
                        yield bi, bj, p, q


def zero_padding(m: int, n: int, grid: TileGrid):
    """Padded dims: the smallest whole number of system-sized blocks covering (m, n)."""
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    m_pad = math.ceil(m / grid.row_capacity) * grid.row_capacity
    n_pad = math.ceil(n / grid.col_capacity) * grid.col_capacity
    return m_pad, n_pad


def block_partition(dims, grid: TileGrid):
    """Split (m, n) into system-sized blocks; returns per-axis index ranges.

    Returns ``(row_ranges, col_ranges)`` in original coordinates; the last
    range on each axis may be partial and is padded downstream.
    """
    m, n = dims
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    m_hat = math.ceil(m / grid.row_capacity)
    n_hat = math.ceil(n / grid.col_capacity)
    row_ranges = [(i * grid.row_capacity, min((i + 1) * grid.row_capacity, m))
                  for i in range(m_hat)]
    col_ranges = [(j * grid.col_capacity, min((j + 1) * grid.col_capacity, n))
                  for j in range(n_hat)]
    return row_ranges, col_ranges


def generate_mat_chunks_set(A, grid: TileGrid) -> ChunkPlan:
    """Build the chunk plan for ``A`` and record one reassignment per block on every MCA."""
    m, n = A.shape
    m_pad, n_pad = zero_padding(m, n, grid)
    row_ranges, col_ranges = block_partition((m, n), grid)
    plan = ChunkPlan(m=m, n=n, m_pad=m_pad, n_pad=n_pad,
                     block_rows=len(row_ranges), block_cols=len(col_ranges),
                     R=grid.R, C=grid.C, r=grid.r, c=grid.c)
    grid.reassign_count += plan.block_rows * plan.block_cols
    return plan


def generate_vec_chunks_set(x, grid: TileGrid, plan: ChunkPlan) -> dict:
    """Pad and split the input vector so chunk (bj, q) aligns with matrix column chunks."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != plan.n:
        raise ValueError(f"vector length {x.shape} does not match plan n={plan.n}")
    x_pad = np.zeros(plan.n_pad)
    x_pad[:plan.n] = x
    chunks = {}
    for bj in range(plan.block_cols):
        for q in range(plan.C):
            c0, c1 = plan.vec_chunk_range(bj, q)
            chunks[(bj, q)] = x_pad[c0:c1]
    return chunks


def extract_mat_chunk(A, plan: ChunkPlan, bi: int, bj: int, p: int, q: int) -> np.ndarray:
    """Materialize one r x c dense chunk (zero-padded where it overhangs A)."""
    r0, r1, c0, c1 = plan.mat_chunk_range(bi, bj, p, q)
    rows = slice(r0, min(r1, plan.m))
    cols = slice(c0, min(c1, plan.n))
    chunk = np.zeros((plan.r, plan.c))
    if rows.start < rows.stop and cols.start < cols.stop:
        sub = A[rows, cols]
        sub = sub.toarray() if sp.issparse(sub) else np.asarray(sub, dtype=float)
        chunk[:sub.shape[0], :sub.shape[1]] = sub
    return chunk


def reassignment_factor(dims, grid: TileGrid) -> int:
    """Per-MCA reuse multiplier used to normalize strong-scaling energy/latency.

    The ceiling of the worse axis ratio; 1 when the problem fits physically.
    """
    m, n = dims
    return max(1, math.ceil(max(m / grid.row_capacity, n / grid.col_capacity)))


def _run_mca_tasks(A, plan, vec_chunks, grid, ec_cfg, master_seed, p, q):
    """Run all blocks assigned to MCA (p, q), in fixed block order."""
    xbar = grid.mcas[p][q]
    out = []
    for bi in range(plan.block_rows):
        for bj in range(plan.block_cols):
            chunk = extract_mat_chunk(A, plan, bi, bj, p, q)
            rng = make_rng(master_seed, bi, bj, p, q)
            b_chunk, _ = corrected_mat_vec_mul(chunk, vec_chunks[(bj, q)],
                                               ec_cfg, xbar, rng)
            out.append((bi, bj, b_chunk))
    return p, q, out


def distributed_mat_vec_mul(A, x, grid: TileGrid, ec_cfg: EcConfig,
                            master_seed: int, workers: int | None = None):
    """Tile, execute, and aggregate one (optionally corrected) MVM on the grid.

    ``A`` may be dense or scipy-sparse; chunks are materialized densely one at
    a time.  Returns ``(b_hat, RunMetrics)`` where energy/latency are the mean
    of this run's per-MCA costs (normalization 1).
    """
    A = sp.csr_matrix(A) if not sp.issparse(A) else A.tocsr()
    x = np.asarray(x, dtype=float)
    if A.shape[1] != x.shape[0]:
        raise ValueError(f"inconsistent shapes: A {A.shape}, x {x.shape}")

    cost0 = grid.per_mca_costs()
    plan = generate_mat_chunks_set(A, grid)
    vec_chunks = generate_vec_chunks_set(x, grid, plan)

    coords = [(p, q) for p in range(grid.R) for q in range(grid.C)]
    if workers is None or workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda pq: _run_mca_tasks(A, plan, vec_chunks, grid, ec_cfg,
                                          master_seed, *pq),
                coords))
    else:
        results = [_run_mca_tasks(A, plan, vec_chunks, grid, ec_cfg,
                                  master_seed, p, q) for p, q in coords]

    # Deterministic reduce: sum partials in (bi, bj, p, q) order, concatenate
    # block rows through the padded output, then strip the padding.
    partials = {}
    for p, q, items in results:
        for bi, bj, b_chunk in items:
            partials[(bi, bj, p, q)] = b_chunk
    out_pad = np.zeros(plan.m_pad)
    for (bi, bj, p, q) in sorted(partials):
        row0 = bi * grid.R * grid.r + p * grid.r
        out_pad[row0:row0 + grid.r] += partials[(bi, bj, p, q)]
    b_hat = out_pad[:plan.m]

    b_true = A @ x
    try:
        err2 = relative_error(b_hat, b_true, 2)
        errinf = relative_error(b_hat, b_true, np.inf)
    except UndefinedMetricError:
        err2 = errinf = 0.0
    cost1 = grid.per_mca_costs()
    run_costs = [(e1 - e0, l1 - l0)
                 for (e0, l0), (e1, l1) in zip(cost0, cost1)]
    e_w, l_w = aggregate_tile_metrics(run_costs, normalization=1)
    return b_hat, RunMetrics(err_l2=err2, err_linf=errinf, e_w=e_w, l_w=l_w)
