"""Acceptance suite: one test per gate criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  The binding-equivalence criterion lives in the separate
``bindings`` package's test suite; this suite runs with no bindings built.
"""

import filecmp
import time

import numpy as np
import scipy.sparse as sp

from xbarsim.cli import main as cli_main
from xbarsim.correction import (
    DenoiseConfig,
    EcConfig,
    TriProduct,
    build_differential_matrix,
    denoise_least_square,
    first_order_combine,
)
from xbarsim.device import load_profiles
from xbarsim.io import (
    generate_iperturb,
    load_matrix_market,
    registry_matrix_path,
    sample_input_vector,
)
from xbarsim.seeds import derive_seed
from xbarsim.tiling import (
    TileGrid,
    distributed_mat_vec_mul,
    generate_mat_chunks_set,
    reassignment_factor,
)

PROFILES = load_profiles()
IDEAL = PROFILES["ideal"]
NOISY_DEVICES = ("epiram", "ag-asi", "alox-hfo2", "taox-hfox")


def record(name, ok, detail=""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
          + (f"  [{detail}]" if detail else ""))
    assert ok, f"{name}: {detail}"


def run_single(A, profile, k, ec, master, rep, n):
    x = sample_input_vector(n, derive_seed(master, rep))
    grid = TileGrid(1, 1, n, n, profile)
    cfg = EcConfig(enabled=ec, eps=0.0, n_verify=k)
    _, mets = distributed_mat_vec_mul(A, x, grid, cfg, derive_seed(master, rep),
                                      workers=1)
    return mets


def test_first_order_cancellation_oracle():
    # 1000 random cases up to 8 x 8 with fixed per-element noises; the
    # combination must equal the brute-force sum within 1e-12 relative.
    t0 = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        m, n = rng.integers(1, 9, size=2)
        A = rng.standard_normal((m, n))
        x = rng.standard_normal(n)
        eps_a = rng.uniform(-0.5, 0.5, (m, n))
        eps_x = rng.uniform(-0.5, 0.5, n)
        u = A @ (x * (1 + eps_x))
        v = (A * (1 + eps_a)) @ x
        y = (A * (1 + eps_a)) @ (x * (1 + eps_x))
        p = first_order_combine(TriProduct(u=u, v=v, y=y))
        oracle = np.array([
            sum(A[i, j] * x[j] * (1.0 - eps_a[i, j] * eps_x[j]) for j in range(n))
            for i in range(m)])
        denom = max(float(np.linalg.norm(oracle)), 1e-300)
        worst = max(worst, float(np.linalg.norm(p - oracle)) / denom)
    elapsed = time.time() - t0
    record("first-order-cancellation-oracle",
           worst <= 1e-12 and elapsed < 1.0,
           f"worst rel dev {worst:.2e}, {elapsed:.2f}s")


def test_error_order_scaling():
    # Median corrected error scales as O(delta^2), uncorrected as O(delta).
    t0 = time.time()
    rng = np.random.default_rng(202)
    deltas = 10.0 ** np.arange(-3.0, -0.9, 0.5)   # 1e-3 .. 1e-1
    med_corr, med_unc = [], []
    for delta in deltas:
        corr, unc = [], []
        for _ in range(200):
            A = rng.standard_normal((66, 66))
            x = rng.standard_normal(66)
            eps_a = rng.uniform(-delta, delta, (66, 66))
            eps_x = rng.uniform(-delta, delta, 66)
            b = A @ x
            u = A @ (x * (1 + eps_x))
            v = (A * (1 + eps_a)) @ x
            y = (A * (1 + eps_a)) @ (x * (1 + eps_x))
            p = first_order_combine(TriProduct(u=u, v=v, y=y))
            nb = np.linalg.norm(b)
            corr.append(np.linalg.norm(p - b) / nb)
            unc.append(np.linalg.norm(y - b) / nb)
        med_corr.append(np.median(corr))
        med_unc.append(np.median(unc))
    slope_corr = float(np.polyfit(np.log10(deltas), np.log10(med_corr), 1)[0])
    slope_unc = float(np.polyfit(np.log10(deltas), np.log10(med_unc), 1)[0])
    elapsed = time.time() - t0
    record("error-order-scaling",
           abs(slope_corr - 2.0) <= 0.3 and abs(slope_unc - 1.0) <= 0.2
           and elapsed < 60.0,
           f"slopes corrected {slope_corr:.3f}, uncorrected {slope_unc:.3f}, "
           f"{elapsed:.1f}s")


def test_ec_error_reduction_90_percent():
    # TaOx-HfOx on bcsstk02, k = 20: corrected mean err_l2 is at most one
    # tenth of the uncorrected mean over 100 replications.
    t0 = time.time()
    A = load_matrix_market(registry_matrix_path("bcsstk02")).to_csr()
    prof = PROFILES["taox-hfox"]
    on, off = [], []
    for rep in range(100):
        off.append(run_single(A, prof, 20, False, 7001, rep, 66).err_l2)
        on.append(run_single(A, prof, 20, True, 7001, rep, 66).err_l2)
    mean_on, mean_off = float(np.mean(on)), float(np.mean(off))
    elapsed = time.time() - t0
    record("ec-error-reduction-90pct",
           mean_on <= 0.1 * mean_off and elapsed < 300.0,
           f"corrected {mean_on:.4f} vs uncorrected {mean_off:.4f} "
           f"(ratio {mean_on / mean_off:.3f}), {elapsed:.1f}s")


def test_energy_latency_ratio_reproduction():
    # EpiRAM (its uncorrected benchmark role) vs TaOx-HfOx with EC on the
    # bcsstk02 configuration: energy ratio >= 1e3, latency ratio >= 1e2.
    t0 = time.time()
    A = load_matrix_market(registry_matrix_path("bcsstk02")).to_csr()
    epi = [run_single(A, PROFILES["epiram"], 20, False, 7002, rep, 66)
           for rep in range(20)]
    tao = [run_single(A, PROFILES["taox-hfox"], 20, True, 7002, rep, 66)
           for rep in range(20)]
    e_ratio = np.mean([m.e_w for m in epi]) / np.mean([m.e_w for m in tao])
    l_ratio = np.mean([m.l_w for m in epi]) / np.mean([m.l_w for m in tao])
    elapsed = time.time() - t0
    record("energy-latency-ratio",
           e_ratio >= 1e3 and l_ratio >= 1e2 and elapsed < 300.0,
           f"energy ratio {e_ratio:.0f}, latency ratio {l_ratio:.0f}, {elapsed:.1f}s")


def test_denoiser_exactness():
    hand = denoise_least_square(np.array([1.0, 1.0]), DenoiseConfig(lam=1.0, h=-1))
    hand_ok = np.max(np.abs(hand - np.array([0.8, 0.6]))) <= 1e-12
    p = np.random.default_rng(3).standard_normal(257)
    ident_ok = np.array_equal(denoise_least_square(p, DenoiseConfig(lam=0.0)), p)
    solve_ok = True
    for lam in (1e-12, 1e-6, 1.0):
        for m in (1, 2, 66, 4960):
            vec = np.random.default_rng(m).standard_normal(m)
            out = denoise_least_square(vec, DenoiseConfig(lam=lam))
            L = build_differential_matrix(m, -1) if m <= 66 else None
            if L is not None:
                ref = np.linalg.solve(np.eye(m) + lam * (L.T @ L), vec)
                solve_ok &= bool(np.allclose(out, ref, rtol=1e-9, atol=1e-12))
            solve_ok &= bool(np.all(np.isfinite(out)))
    record("denoiser-exactness", hand_ok and ident_ok and solve_ok,
           f"hand case dev {np.max(np.abs(hand - [0.8, 0.6])):.1e}")


def test_tiled_equals_dense():
    t0 = time.time()
    # Full-scale case: add32 on an 8x8 grid of 1024^2 noiseless arrays.
    A = load_matrix_market(registry_matrix_path("add32")).to_csr()
    x = sample_input_vector(4960, 404)
    grid = TileGrid(8, 8, 1024, 1024, IDEAL)
    b, _ = distributed_mat_vec_mul(A, x, grid, EcConfig(enabled=False), 404,
                                   workers=2)
    ref = A @ x
    err_add32 = float(np.linalg.norm(b - ref) / np.linalg.norm(ref))
    del grid

    # 500 random small instances cycling ideal / non-ideal / multi-block.
    rng = np.random.default_rng(505)
    worst = 0.0
    for case in range(500):
        C = int(rng.integers(1, 3))
        R = int(rng.integers(C, 4))
        c = int(rng.integers(1, 13))
        r = int(rng.integers(c, 17))
        if case % 3 == 0:        # ideal: exact fit
            m, n = R * r, C * c
        elif case % 3 == 1:      # non-ideal: needs padding
            m = int(rng.integers(1, R * r + 1))
            n = int(rng.integers(1, C * c + 1))
        else:                    # large-scale: multiple blocks
            m = int(rng.integers(R * r + 1, 3 * R * r))
            n = int(rng.integers(C * c + 1, 3 * C * c))
        A_s = rng.standard_normal((m, n))
        x_s = rng.standard_normal(n)
        grid = TileGrid(R, C, r, c, IDEAL)
        b_s, _ = distributed_mat_vec_mul(A_s, x_s, grid, EcConfig(enabled=False),
                                         case, workers=2)
        ref_s = sp.csr_matrix(A_s) @ x_s
        denom = max(float(np.linalg.norm(ref_s)), 1e-300)
        worst = max(worst, float(np.linalg.norm(b_s - ref_s)) / denom)
    elapsed = time.time() - t0
    record("tiled-equals-dense",
           err_add32 <= 1e-12 and worst <= 1e-12 and elapsed < 120.0,
           f"add32 rel err {err_add32:.2e}, worst random-case {worst:.2e}, "
           f"{elapsed:.1f}s")


def test_virtualization_accounting():
    grid = TileGrid(8, 8, 1024, 1024, IDEAL)
    f_add32 = reassignment_factor((4960, 4960), grid)
    f_dub = reassignment_factor((16129, 16129), grid)
    f_helm = reassignment_factor((32226, 32226), grid)

    g1 = TileGrid(8, 8, 1024, 1024, IDEAL)
    plan1 = generate_mat_chunks_set(sp.csr_matrix((8192, 8192)), g1)
    chunks1 = sum(1 for _ in plan1.iter_chunks())
    g2 = TileGrid(8, 8, 1024, 1024, IDEAL)
    plan2 = generate_mat_chunks_set(sp.csr_matrix((16129, 16129)), g2)
    chunks2 = sum(1 for _ in plan2.iter_chunks())

    ok = (f_add32, f_dub, f_helm) == (1, 2, 4)
    ok &= chunks1 == 64 and bool(np.all(g1.reassign_count == 1))
    ok &= chunks2 == 256 and bool(np.all(g2.reassign_count == 4))
    ok &= plan2.block_rows * plan2.block_cols == 4
    record("virtualization-accounting", ok,
           f"factors {(f_add32, f_dub, f_helm)}, chunks {(chunks1, chunks2)}")


def test_benchmark_determinism(tmp_path):
    # Byte-identical CSV bodies across repeated runs and worker counts.
    t0 = time.time()
    outs = []
    for tag, workers in (("a", 1), ("b", 4), ("c", 8), ("d", 1)):
        out = tmp_path / tag
        code = cli_main(["bench-ec", "--reps", "5", "--k-max", "3", "--ec", "off",
                         "--seed", "99", "--workers", str(workers),
                         "--out", str(out)])
        assert code == 0
        outs.append(out)
    same = all(
        filecmp.cmp(outs[0] / name, other / name, shallow=False)
        for other in outs[1:]
        for name in ("ec_reps.csv", "ec_summary.csv"))
    elapsed = time.time() - t0
    record("benchmark-determinism", same,
           f"4 sweeps x 2 files byte-compared, {elapsed:.1f}s")


def test_write_and_verify_trend():
    # On the perturbed identity, the k = 20 mean error is no worse than the
    # k = 0 mean error (EC off) for every shipped noisy profile; 100 reps.
    t0 = time.time()
    A = generate_iperturb(66, 6006, 1.2342).to_csr()
    details = []
    ok = True
    for device in NOISY_DEVICES:
        prof = PROFILES[device]
        k0 = np.mean([run_single(A, prof, 0, False, 6006, rep, 66).err_l2
                      for rep in range(100)])
        k20 = np.mean([run_single(A, prof, 20, False, 6006, rep, 66).err_l2
                       for rep in range(100)])
        ok &= bool(k20 <= k0)
        details.append(f"{device}: {k0:.4f} -> {k20:.4f}")
    elapsed = time.time() - t0
    record("write-and-verify-trend", ok and elapsed < 300.0,
           "; ".join(details) + f", {elapsed:.1f}s")
