"""Acceptance gate: eleven pinned checks, one printed pass line each.

Each check prints ``criterion N PASS: ...`` with its measured margin after
its assertions hold, and asserts a wall-clock budget. Monte-Carlo checks
run at desk scale (100-200 trials) under master seed 20250821 so their
margins are reproducible.
"""

import io
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from ampctls.bench.presets import build_preset, fig2_trace
from ampctls.bench.runner import run_experiment
from ampctls.cli import main as cli_main
from ampctls.ctls import assemble_H, real_constrained_u
from ampctls.dictionary import HarmonicDictionary, LinearDictionary, RsfDictionary
from ampctls.ije import IjeConfig, ije_refine
from ampctls.numerics import least_squares_solve

MASTER_SEED = 20250821


def _crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _summary_index(result):
    """(sweep_value, solver, metric) -> row dict."""
    return {(row["sweep_value"], row["solver"], row["metric"]): row
            for row in result.summary}


def test_criterion_01_mismatch_factorization_identity():
    t0 = time.monotonic()
    rng = np.random.default_rng(MASTER_SEED)
    worst = 0.0
    for _ in range(1000):
        m = 8
        n = int(rng.integers(1, 4))
        arity = int(rng.integers(1, 3))
        p = arity * n
        cols = _crandn(rng, p, m)
        g_stacked = np.zeros((m, p * n), dtype=complex)
        for j in range(p):
            g_stacked[:, j * n + j % n] = cols[j]
        d = np.diag(rng.uniform(0.5, 2.0, size=p)).astype(complex)
        x = _crandn(rng, n)
        dg = _crandn(rng, p)
        h = assemble_H(g_stacked, d, x)
        lhs = h @ (d @ dg)
        rhs = sum(cols[j] * x[j % n] * dg[j] for j in range(p))
        rel = np.linalg.norm(lhs - rhs) / (np.linalg.norm(x) * np.linalg.norm(dg))
        worst = max(worst, rel)
        assert rel <= 1e-12
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    print(f"criterion 1 PASS: factorization identity, 1000 instances, "
          f"worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_derivative_oracle():
    t0 = time.monotonic()
    rng = np.random.default_rng(MASTER_SEED)
    h = 1e-7
    worst = 0.0

    def fd_max_rel(dic, grid):
        nonlocal worst
        bundle = dic.bundle(grid)
        n = grid.shape[0]
        for c in range(dic.arity):
            for i in range(n):
                gp = grid.copy()
                gm = grid.copy()
                gp[i, c] += h
                gm[i, c] -= h
                fd = (dic.atoms(gp)[:, i] - dic.atoms(gm)[:, i]) / (2 * h)
                ana = bundle.deriv_cols[c * n + i]
                rel = np.linalg.norm(fd - ana) / np.linalg.norm(ana)
                worst = max(worst, rel)
                assert rel <= 1e-5

    harmonic = HarmonicDictionary(32)
    for _ in range(50):
        fd_max_rel(harmonic, rng.uniform(0.05, 0.95, size=(2, 1)))
    code = rng.permutation(32)
    rsf = RsfDictionary(32, code)
    for _ in range(50):
        fd_max_rel(rsf, rng.uniform(0.05, 0.95, size=(2, 2)))
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    print(f"criterion 2 PASS: finite-difference derivative oracle, 100 points x "
          f"both models, worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_03_linear_model_monotone_residual():
    t0 = time.monotonic()
    rng = np.random.default_rng(MASTER_SEED)
    worst_rise = -np.inf
    for _ in range(100):
        m, n = 12, 2
        atoms0 = _crandn(rng, m, n)
        cols = 0.5 * _crandn(rng, n, m)
        g0 = rng.uniform(size=(n, 1))
        dic = LinearDictionary(atoms0, cols, g0)
        g_true = g0 + rng.uniform(-0.3, 0.3, size=(n, 1))
        y = dic.atoms(g_true) @ _crandn(rng, n) + 0.1 * _crandn(rng, m)
        res = ije_refine(y, dic, g0, IjeConfig(rel_residual_tol=0.0))
        trace = np.asarray(res.residual_norm_trace)
        rise = float(np.max(np.diff(trace))) if len(trace) > 1 else 0.0
        worst_rise = max(worst_rise, rise)
        assert rise <= 1e-10
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    print(f"criterion 3 PASS: exactly-linear model residual trace non-increasing, "
          f"100 instances, worst step {worst_rise:.2e}, {elapsed:.2f}s")


def test_criterion_04_halfcell_convergence_trace():
    t0 = time.monotonic()
    rows = fig2_trace()
    ok_loop = None
    for row in rows:
        if row["residual_ratio"] < 1e-3 and row["grid_error_ratio"] < 1e-3:
            ok_loop = row["loop"]
            break
    elapsed = time.monotonic() - t0
    assert ok_loop is not None and ok_loop <= 10
    assert elapsed < 1.0
    print(f"criterion 4 PASS: half-cell tone, residual and grid error below 1e-3 "
          f"at loop {ok_loop}, {elapsed:.2f}s")


def test_criterion_05_offset_sweep_vs_baseline_and_bound():
    t0 = time.monotonic()
    result = run_experiment(build_preset("fig1", trials=200, seed=MASTER_SEED))
    idx = _summary_index(result)
    offsets = sorted({row["sweep_value"] for row in result.summary})
    worst_gap = -np.inf
    for off in offsets:
        amp = idx[(off, "amp_ctls", "f1")]
        baseline = idx[(off, "omp_32", "f1")]
        if 0.2 <= off <= 0.8:
            assert amp["mse_db"] < baseline["mse_db"]
            gap = amp["mse_db"] - amp["crb_db"]
            worst_gap = max(worst_gap, gap)
            assert gap <= 3.0
    floor_db = 10 * np.log10((0.5 / 32) ** 2)
    mid = idx[(0.5, "omp_32", "f1")]["mse_db"]
    assert abs(mid - floor_db) <= 2.0
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(f"criterion 5 PASS: offset sweep, refined MSE below baseline and within "
          f"{worst_gap:.2f} dB of bound on [0.2,0.8]; baseline at 0.5 is "
          f"{mid - floor_db:+.2f} dB off the quantization floor, {elapsed:.1f}s")


def test_criterion_06_attraction_basin():
    t0 = time.monotonic()
    result = run_experiment(build_preset("fig3", trials=200, seed=MASTER_SEED))
    idx = _summary_index(result)
    worst_near = -np.inf
    worst_far = 0.0
    for row in result.summary:
        if row["metric"] != "f1":
            continue
        d = row["sweep_value"]
        if d <= 0.5:
            gap = row["mse_db"] - row["crb_db"]
            worst_near = max(worst_near, gap)
            assert gap <= 3.0
        elif d >= 1.2:
            stay_db = 10 * np.log10((d / 32) ** 2)
            dev = abs(row["mse_db"] - stay_db)
            worst_far = max(worst_far, dev)
            assert dev <= 3.0
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(f"criterion 6 PASS: basin of attraction, near-start gap to bound "
          f"{worst_near:.2f} dB, far-start deviation from squared initial "
          f"distance {worst_far:.2f} dB, {elapsed:.1f}s")


def test_criterion_07_overestimated_sparsity():
    t0 = time.monotonic()
    result = run_experiment(build_preset("fig4_7", trials=200, seed=MASTER_SEED))
    idx = _summary_index(result)
    worst_ratio = 0.0
    for kq in (4.0, 5.0, 6.0):
        ratio = idx[(kq, "amp_ctls", "spurious_ratio")]["value"]
        worst_ratio = max(worst_ratio, ratio)
        assert ratio < 0.2
    drift = abs(idx[(6.0, "amp_ctls", "f3")]["mse_db"]
                - idx[(3.0, "amp_ctls", "f3")]["mse_db"])
    assert drift <= 2.0
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    print(f"criterion 7 PASS: overestimated sparsity, spurious amplitude ratio "
          f"max {worst_ratio:.3f}, weak-component MSE drift {drift:.2f} dB, "
          f"{elapsed:.1f}s")


def test_criterion_08_weak_component_masking():
    t0 = time.monotonic()
    result = run_experiment(build_preset("fig8", trials=100, seed=MASTER_SEED))
    idx = _summary_index(result)
    amp_hit = idx[(5.0, "amp_ctls", "hit3")]["value"]
    omp_hit = idx[(5.0, "omp_64", "hit3")]["value"]
    assert amp_hit >= 0.8
    assert omp_hit <= 0.3
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    print(f"criterion 8 PASS: masked weak component recovered in {amp_hit:.0%} "
          f"of trials (refined) vs {omp_hit:.0%} (fixed grid), {elapsed:.1f}s")


def test_criterion_09_radar_snr_sweep():
    t0 = time.monotonic()
    result = run_experiment(build_preset("fig9", trials=200, seed=MASTER_SEED,
                                         solvers=("amp_ctls",)))
    idx = _summary_index(result)
    worst = -np.inf
    for snr in (4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0):
        for metric in ("p3", "q3"):
            row = idx[(snr, "amp_ctls", metric)]
            gap = row["mse_db"] - row["crb_db"]
            worst = max(worst, gap)
            assert gap <= 3.0
    elapsed = time.monotonic() - t0
    assert elapsed < 600.0
    print(f"criterion 9 PASS: permuted-carrier radar sweep, weak-target "
          f"range/velocity MSE within {worst:.2f} dB of bound for SNR >= 4 dB, "
          f"{elapsed:.1f}s")


def _kkt_min_norm(w1, w2, z):
    # real-stacked least-norm solution with u1 constrained real
    a = np.block([
        [w1.real, w2.real, -w2.imag],
        [w1.imag, w2.imag, w2.real],
    ])
    b = np.concatenate([z.real, z.imag])
    u = a.T @ np.linalg.solve(a @ a.T, b)
    n1, n2 = w1.shape[1], w2.shape[1]
    return u[:n1], u[n1:n1 + n2] + 1j * u[n1 + n2:]


def test_criterion_10_real_constrained_oracle():
    t0 = time.monotonic()
    rng = np.random.default_rng(MASTER_SEED)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(3, 9))
        n1 = int(rng.integers(0, m))  # tall-thin mismatch block, possibly empty
        n2 = m + int(rng.integers(1, 4))
        w1 = _crandn(rng, m, n1)
        w2 = _crandn(rng, m, n2)
        z = _crandn(rng, m)
        u1, u2, _ = real_constrained_u(w1, w2, z)
        assert u1.dtype.kind == "f"
        r1, r2 = _kkt_min_norm(w1, w2, z)
        err = max(np.max(np.abs(u1 - r1)) if n1 else 0.0, np.max(np.abs(u2 - r2)))
        feas = np.max(np.abs(w1 @ u1 + w2 @ u2 - z))
        worst = max(worst, err, feas)
        assert err <= 1e-9 and feas <= 1e-9
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    print(f"criterion 10 PASS: real-constrained correction vs stacked-KKT oracle, "
          f"100 instances, worst deviation {worst:.2e}, {elapsed:.2f}s")


def test_criterion_11_cli_determinism(tmp_path):
    args = ["preset", "fig1", "--trials", "10", "--seed", "7"]
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        with redirect_stdout(io.StringIO()):
            code = cli_main(args + ["--out", str(out)])
        assert code == 0
        outs.append(out)
    for name in ("fig1_trials.csv", "fig1_summary.csv"):
        ba = (outs[0] / name).read_bytes()
        bb = (outs[1] / name).read_bytes()
        assert ba and ba == bb
    print("criterion 11 PASS: repeated preset run produces byte-identical CSVs")
