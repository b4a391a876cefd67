import numpy as np
import pytest
import scipy.sparse as sp

from xbarsim.correction import EcConfig, corrected_mat_vec_mul
from xbarsim.crossbar import Crossbar
from xbarsim.device import load_profiles
from xbarsim.seeds import make_rng
from xbarsim.tiling import (
    TileGrid,
    block_partition,
    distributed_mat_vec_mul,
    extract_mat_chunk,
    generate_mat_chunks_set,
    generate_vec_chunks_set,
    reassignment_factor,
    zero_padding,
)

PROFILES = load_profiles()
IDEAL = PROFILES["ideal"]
TAOX = PROFILES["taox-hfox"]


def reassemble(A, grid, plan):
    """Oracle: paste every chunk back and compare against the padded matrix."""
    out = np.zeros((plan.m_pad, plan.n_pad))
    for bi, bj, p, q in plan.iter_chunks():
        r0, r1, c0, c1 = plan.mat_chunk_range(bi, bj, p, q)
        out[r0:r1, c0:c1] = extract_mat_chunk(A, plan, bi, bj, p, q)
    return out


class TestPaddingAndBlocks:
    def test_exact_fit_needs_no_padding(self):
        grid = TileGrid(2, 2, 4, 4, IDEAL)
        assert zero_padding(8, 8, grid) == (8, 8)

    def test_padding_arithmetic(self):
        grid = TileGrid(8, 8, 1024, 1024, IDEAL)
        m_pad, n_pad = zero_padding(4960, 4960, grid)
        assert (m_pad - 4960, n_pad - 4960) == (3232, 3232)

    def test_single_tile_padding(self):
        grid = TileGrid(1, 1, 1024, 1024, IDEAL)
        assert zero_padding(66, 66, grid) == (1024, 1024)

    def test_block_partition_counts(self):
        big = TileGrid(8, 8, 1024, 1024, IDEAL)
        rows, cols = block_partition((66, 66), big)
        assert len(rows) == 1 and len(cols) == 1
        rows, cols = block_partition((4960, 4960), big)
        assert len(rows) == 1 and len(cols) == 1
        rows, cols = block_partition((16129, 16129), big)
        assert len(rows) == 2 and len(cols) == 2
        assert rows[1] == (8192, 16129)

    def test_grid_shape_invariants(self):
        with pytest.raises(ValueError):
            TileGrid(2, 3, 4, 4, IDEAL)
        with pytest.raises(ValueError):
            TileGrid(2, 2, 3, 4, IDEAL)


class TestChunkPlan:
    def test_chunk_counts_and_reassignment(self):
        grid = TileGrid(8, 8, 1024, 1024, IDEAL)
        plan = generate_mat_chunks_set(sp.csr_matrix((8192, 8192)), grid)
        assert plan.block_rows == plan.block_cols == 1
        assert sum(1 for _ in plan.iter_chunks()) == 64
        assert np.all(grid.reassign_count == 1)

    def test_multi_block_reassignment(self):
        grid = TileGrid(8, 8, 1024, 1024, IDEAL)
        plan = generate_mat_chunks_set(sp.csr_matrix((16129, 16129)), grid)
        assert plan.block_rows == plan.block_cols == 2
        assert sum(1 for _ in plan.iter_chunks()) == 4 * 64
        assert np.all(grid.reassign_count == 4)

    def test_one_by_one_matrix(self):
        grid = TileGrid(2, 2, 3, 3, IDEAL)
        plan = generate_mat_chunks_set(np.array([[5.0]]), grid)
        chunk = extract_mat_chunk(np.array([[5.0]]), plan, 0, 0, 0, 0)
        assert chunk[0, 0] == 5.0 and np.count_nonzero(chunk) == 1
        assert plan.address_of(0, 0) == (0, 0, 0, 0, 0, 0)

    def test_partition_reassembly_is_identity(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            m, n = rng.integers(1, 301, size=2)
            C = int(rng.integers(1, 4))
            R = int(rng.integers(C, 5))
            c = int(rng.integers(1, 41))
            r = int(rng.integers(c, 61))
            grid = TileGrid(R, C, r, c, IDEAL)
            A = rng.standard_normal((m, n))
            plan = generate_mat_chunks_set(A, grid)
            out = reassemble(A, grid, plan)
            assert np.array_equal(out[:m, :n], A)
            assert not np.any(out[m:, :]) and not np.any(out[:, n:])

    def test_every_entry_has_unique_address(self):
        grid = TileGrid(2, 2, 3, 2, IDEAL)
        A = np.arange(7 * 5, dtype=float).reshape(7, 5)
        plan = generate_mat_chunks_set(A, grid)
        seen = set()
        for i in range(7):
            for j in range(5):
                bi, bj, p, q, l, h = plan.address_of(i, j)
                r0, r1, c0, c1 = plan.mat_chunk_range(bi, bj, p, q)
                assert (r0 + l, c0 + h) == (i, j)
                seen.add((bi, bj, p, q, l, h))
        assert len(seen) == 35
        with pytest.raises(IndexError):
            plan.address_of(7, 0)

    def test_vector_chunks_align_and_reassemble(self):
        grid = TileGrid(2, 2, 4, 3, IDEAL)
        x = np.arange(10, dtype=float)
        plan = generate_mat_chunks_set(np.zeros((10, 10)), grid)
        chunks = generate_vec_chunks_set(x, grid, plan)
        x_pad = np.zeros(plan.n_pad)
        x_pad[:10] = x
        for (bj, q), chunk in chunks.items():
            c0, c1 = plan.vec_chunk_range(bj, q)
            assert np.array_equal(chunk, x_pad[c0:c1])
        rebuilt = np.concatenate([chunks[k] for k in sorted(chunks)])
        assert np.array_equal(rebuilt, x_pad)

    def test_vector_chunk_arithmetic_at_scale(self):
        # 4960 entries over one 8 x 1024 block column: 8 chunks, zero tail.
        grid = TileGrid(8, 8, 1024, 1024, IDEAL)
        x = np.arange(4960, dtype=float)
        plan = generate_mat_chunks_set(sp.csr_matrix((4960, 4960)), grid)
        chunks = generate_vec_chunks_set(x, grid, plan)
        assert len(chunks) == 8
        assert all(chunk.shape == (1024,) for chunk in chunks.values())
        tail = chunks[(0, 7)]
        assert np.array_equal(tail[:4960 - 7 * 1024], x[7 * 1024:])
        assert not np.any(tail[4960 - 7 * 1024:])

    def test_vector_exact_fit_has_no_padding(self):
        grid = TileGrid(2, 2, 4, 4, IDEAL)
        plan = generate_mat_chunks_set(np.zeros((8, 8)), grid)
        chunks = generate_vec_chunks_set(np.arange(8.0), grid, plan)
        assert len(chunks) == 2
        assert np.array_equal(np.concatenate([chunks[(0, 0)], chunks[(0, 1)]]),
                              np.arange(8.0))

    def test_vector_length_mismatch(self):
        grid = TileGrid(1, 1, 4, 4, IDEAL)
        plan = generate_mat_chunks_set(np.zeros((3, 3)), grid)
        with pytest.raises(ValueError):
            generate_vec_chunks_set(np.ones(4), grid, plan)


class TestReassignmentFactor:
    def test_fits_physically(self):
        grid = TileGrid(8, 8, 1024, 1024, IDEAL)
        assert reassignment_factor((4960, 4960), grid) == 1

    def test_published_factor_cases(self):
        grid = TileGrid(8, 8, 1024, 1024, IDEAL)
        assert reassignment_factor((16129, 16129), grid) == 2
        assert reassignment_factor((32226, 32226), grid) == 4


class TestDistributedMvm:
    def test_noiseless_matches_dense_small(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            m, n = rng.integers(1, 120, size=2)
            C = int(rng.integers(1, 3))
            R = int(rng.integers(C, 4))
            c = int(rng.integers(1, 25))
            r = int(rng.integers(c, 33))
            grid = TileGrid(R, C, r, c, IDEAL)
            A = rng.standard_normal((m, n))
            x = rng.standard_normal(n)
            b, mets = distributed_mat_vec_mul(A, x, grid, EcConfig(enabled=False),
                                              master_seed=0, workers=2)
            ref = sp.csr_matrix(A) @ x
            assert np.linalg.norm(b - ref) <= 1e-12 * max(np.linalg.norm(ref), 1e-300)

    def test_identity_matrix_roundtrip(self):
        grid = TileGrid(2, 2, 16, 16, IDEAL)
        x = np.random.default_rng(3).standard_normal(30)
        A = sp.eye(30, format="csr")
        b, _ = distributed_mat_vec_mul(A, x, grid, EcConfig(enabled=False), 1)
        assert b == pytest.approx(x, rel=1e-13)

    def test_single_mca_equals_direct_call(self):
        # One chunk on a 1x1 grid must follow the exact same code path as
        # calling the corrected multiply directly with the derived stream.
        A = make_rng(10).standard_normal((12, 12))
        x = make_rng(11).standard_normal(12)
        cfg = EcConfig(enabled=True, n_verify=3)
        grid = TileGrid(1, 1, 12, 12, TAOX)
        b_grid, mets_grid = distributed_mat_vec_mul(A, x, grid, cfg, master_seed=77)
        xb = Crossbar(12, 12, TAOX)
        b_direct, mets_direct = corrected_mat_vec_mul(A, x, cfg, xb, make_rng(77, 0, 0, 0, 0))
        assert np.array_equal(b_grid, b_direct)
        assert mets_grid.e_w == pytest.approx(mets_direct.e_w)
        assert mets_grid.l_w == pytest.approx(mets_direct.l_w)

    def test_deterministic_across_worker_counts(self):
        A = make_rng(30).standard_normal((40, 40))
        x = make_rng(31).standard_normal(40)
        cfg = EcConfig(enabled=True, n_verify=2)
        outs = []
        for workers in (1, 4, 8):
            grid = TileGrid(2, 2, 16, 16, TAOX)
            b, mets = distributed_mat_vec_mul(A, x, grid, cfg, master_seed=5,
                                              workers=workers)
            outs.append((b, mets.e_w, mets.l_w, mets.err_l2))
        for b, e, l, err in outs[1:]:
            assert np.array_equal(b, outs[0][0])
            assert (e, l, err) == (outs[0][1], outs[0][2], outs[0][3])

    def test_padding_contributes_nothing(self):
        # Same matrix on an exact-fit grid and on a padded grid: the padded
        # region must add zero pulses and zero output.
        A = make_rng(40).standard_normal((8, 8))
        x = make_rng(41).standard_normal(8)
        cfg = EcConfig(enabled=False)
        exact = TileGrid(1, 1, 8, 8, IDEAL)
        padded = TileGrid(1, 1, 32, 32, IDEAL)
        b1, m1 = distributed_mat_vec_mul(A, x, exact, cfg, 9)
        b2, m2 = distributed_mat_vec_mul(A, x, padded, cfg, 9)
        assert np.array_equal(b1, b2)
        assert m1.e_w == m2.e_w

    def test_reassign_counter_accumulates_per_run(self):
        grid = TileGrid(2, 2, 4, 4, IDEAL)
        A = np.ones((9, 9))
        x = np.ones(9)
        distributed_mat_vec_mul(A, x, grid, EcConfig(enabled=False), 0)
        assert np.all(grid.reassign_count == 4)  # 2 x 2 blocks
        distributed_mat_vec_mul(A, x, grid, EcConfig(enabled=False), 0)
        assert np.all(grid.reassign_count == 8)

    def test_shape_mismatch(self):
        grid = TileGrid(1, 1, 4, 4, IDEAL)
        with pytest.raises(ValueError):
            distributed_mat_vec_mul(np.ones((3, 3)), np.ones(4), grid,
                                    EcConfig(enabled=False), 0)
