"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its measured runtime (run with ``pytest -s`` to see
them inline)."""

import time

import numpy as np
import pytest

from bdris import cli
from bdris.channel import ScenarioChannels
from bdris.metrics import LinkBudget, v2v_spectral_efficiency
from bdris.optimizer import (
    OptimizerSettings,
    alternating_optimize,
    brute_force_oracle,
    wirtinger_gradient,
)
from bdris.scattering import (
    Architecture,
    Mode,
    RisConfig,
    ScatteringMatrix,
    project_feasible,
    random_feasible,
    sparsity_mask,
    validate,
)
from bdris.scenario import SweepConfig, run_sweep, trial_seed
from bdris.seeding import substream

SINGLE, FULLY, GROUP = (
    Architecture.SINGLE_CONNECTED,
    Architecture.FULLY_CONNECTED,
    Architecture.GROUP_CONNECTED,
)


def crandn(rng, *shape):
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.sqrt(2.0)


def synthetic_channels(n, seed, interference=1.0):
    rng = substream(seed)
    return ScenarioChannels(
        h_d=complex(crandn(rng)),
        h_t=crandn(rng, n),
        g_r=crandn(rng, n),
        f_d=interference * complex(crandn(rng)),
        f_t=interference * crandn(rng, n),
        q_d=interference * complex(crandn(rng)),
        q_r=interference * crandn(rng, n),
    )


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"\n[{criterion}] {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def default_sweep():
    """The case-study sweep at the published parameters: RSU 10 W, V2V 1 W,
    noise 1e-4, 3.5 GHz carrier, N in 16..64, 500 trials."""
    cfg = SweepConfig()
    assert cfg.budget.p_c == 10.0 and cfg.budget.p_v == 1.0
    assert cfg.budget.sigma2 == 1e-4 and cfg.geometry.carrier_hz == 3.5e9
    assert cfg.n_values == (16, 24, 32, 40, 48, 56, 64) and cfg.trials == 500
    start = time.monotonic()
    records, aggregates = run_sweep(cfg, workers=1)
    elapsed = time.monotonic() - start
    return cfg, records, aggregates, elapsed


def test_criterion_1_characteristics_table_exact(capsys):
    start = time.monotonic()
    assert cli.main(["table1", "--n", "16,32,64", "--g", "2,4,8", "--sectors", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    table = [line.split() for line in lines[1:] if line.strip()]

    mismatches = []
    seen = 0
    for row in table:
        n = int(row[0])
        arch = row[1]
        got = tuple(int(v) for v in row[2:])
        if arch == "single_connected":
            want = (n, 1, 1, n, n, n, 3 * n // 2, 2 * n)
        elif arch == "fully_connected":
            c = (n + 1) * n // 2
            want = (1, n, n * n, n * n, c, c, c, c)
        else:
            g = got[0]
            d = n // g
            c = (d + 1) * n // 2
            want = (g, d, d * d, g * d * d, c, c, c, c)
        seen += 1
        if got != want:
            mismatches.append((n, arch, got, want))
    elapsed = time.monotonic() - start
    ok = not mismatches and seen == 3 * (2 + 3) and elapsed < 1.0
    report(
        "criterion 1",
        ok,
        f"{seen} table rows exact against hand-evaluated formulas in {elapsed:.2f}s",
    )
    assert not mismatches, mismatches
    assert seen == 15
    assert elapsed < 1.0


def test_criterion_2_constraint_suite():
    start = time.monotonic()
    n, groups, sectors = 12, 3, 3
    worst_residual = 0.0
    worst_sparsity = 0.0
    worst_drift = 0.0
    combos = 0
    for arch in (SINGLE, FULLY, GROUP):
        for mode in Mode:
            kwargs = {}
            if arch is GROUP:
                kwargs["n_groups"] = groups
            if mode is Mode.MULTI_SECTOR:
                kwargs["n_sectors"] = sectors
            config = RisConfig(arch, mode, n, **kwargs)
            off = ~sparsity_mask(config)
            rng = substream(20_000, combos)
            combos += 1
            for _ in range(1000):
                raw = rng.standard_normal(
                    (config.n_blocks, n, n)
                ) + 1j * rng.standard_normal((config.n_blocks, n, n))
                m = project_feasible(raw, config)
                rep = validate(m)
                worst_residual = max(worst_residual, rep.residual)
                if off.any():
                    worst_sparsity = max(
                        worst_sparsity,
                        max(float(np.abs(b[off]).max()) for b in m.blocks),
                    )
                again = project_feasible(np.stack(m.blocks), config)
                worst_drift = max(
                    worst_drift,
                    max(float(np.abs(a - b).max()) for a, b in zip(m.blocks, again.blocks)),
                )
    elapsed = time.monotonic() - start
    ok = (
        worst_residual <= 1e-10
        and worst_sparsity == 0.0
        and worst_drift <= 1e-12
        and elapsed < 30.0
    )
    report(
        "criterion 2",
        ok,
        f"{combos}x1000 projections: residual {worst_residual:.2e}, "
        f"sparsity {worst_sparsity:.1e}, idempotence drift {worst_drift:.2e}, {elapsed:.1f}s",
    )
    assert worst_residual <= 1e-10
    assert worst_sparsity == 0.0
    assert worst_drift <= 1e-12
    assert elapsed < 30.0


def test_criterion_3_oracle_equivalence():
    start = time.monotonic()
    settings = OptimizerSettings(n_restarts=32)
    worst = -np.inf
    for i in range(50):
        if i < 25:
            config, n = RisConfig(FULLY, Mode.REFLECTIVE, 2), 2
        elif i < 40:
            config, n = RisConfig(SINGLE, Mode.REFLECTIVE, 2), 2
        else:
            config, n = RisConfig(SINGLE, Mode.REFLECTIVE, 3), 3
        ch = synthetic_channels(n, 500 + i, interference=0.6)
        b = LinkBudget(p_v=1.0, p_c=2.0, sigma2=0.5, i_max=0.8 if i % 3 == 0 else 5.0)
        result = alternating_optimize(ch, config, b, p_max=1.0, settings=settings)
        se_oracle, _ = brute_force_oracle(ch, config, b, p_max=1.0)
        worst = max(worst, abs(se_oracle - result.se))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-2 and elapsed < 120.0
    report(
        "criterion 3",
        ok,
        f"50 instances, worst |optimizer - grid optimum| = {worst:.2e} bits/s/Hz, {elapsed:.1f}s",
    )
    assert worst <= 1e-2
    assert elapsed < 120.0


def test_criterion_4_gradient_correctness():
    start = time.monotonic()
    h = 1e-6
    worst = 0.0
    b = LinkBudget(p_v=1.0, p_c=1.0, sigma2=0.5, i_max=1e9)
    for i in range(100):
        n = 2 if i < 50 else 4
        ch = synthetic_channels(n, 40_000 + i)
        config = RisConfig(FULLY, Mode.REFLECTIVE, n)
        m = random_feasible(config, 41_000 + i)
        grad = wirtinger_gradient(ch, m, b)

        def se(block):
            return v2v_spectral_efficiency(ch, ScatteringMatrix((block,), config), b)

        fd = np.zeros((n, n), dtype=np.complex128)
        base = np.array(m.blocks[0])
        for r in range(n):
            for c in range(n):
                for unit in (1.0, 1j):
                    up, dn = base.copy(), base.copy()
                    up[r, c] += h * unit
                    dn[r, c] -= h * unit
                    fd[r, c] += 0.5 * (se(up) - se(dn)) / (2.0 * h) * unit
        worst = max(worst, float(np.linalg.norm(grad - fd) / np.linalg.norm(fd)))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-5 and elapsed < 60.0
    report(
        "criterion 4",
        ok,
        f"100 instances at N in (2,4): max relative FD error {worst:.2e}, {elapsed:.1f}s",
    )
    assert worst <= 1e-5
    assert elapsed < 60.0


def test_criterion_5_case_study_reproduction(default_sweep):
    cfg, records, aggregates, elapsed = default_sweep
    by = {(a.scheme, a.n): a for a in aggregates}
    worst_z = np.inf
    ordering_ok = True
    for n in cfg.n_values:
        f, s, o = by[("fully_connected", n)], by[("single_connected", n)], by[("no_ris", n)]
        z_fs = (f.se_mean - s.se_mean) / np.hypot(f.se_stderr, s.se_stderr)
        z_so = (s.se_mean - o.se_mean) / np.hypot(s.se_stderr, max(o.se_stderr, 1e-300))
        worst_z = min(worst_z, z_fs, z_so)
        ordering_ok &= f.se_mean > s.se_mean > o.se_mean
    rising_ok = True
    for scheme in ("fully_connected", "single_connected"):
        rows = sorted((a for a in aggregates if a.scheme == scheme), key=lambda a: a.n)
        for lo, hi in zip(rows, rows[1:]):
            rising_ok &= hi.se_mean > lo.se_mean or hi.se_mean >= lo.se_mean - lo.se_stderr
    flat = [by[("no_ris", n)] for n in cfg.n_values]
    grand = float(np.mean([a.se_mean for a in flat]))
    stderr = max(max(a.se_stderr for a in flat), 1e-300)
    flat_dev = max(abs(a.se_mean - grand) for a in flat)
    flat_ok = flat_dev <= stderr
    ok = ordering_ok and worst_z > 3.0 and rising_ok and flat_ok and elapsed < 300.0
    report(
        "criterion 5",
        ok,
        f"ordering gaps worst z={worst_z:.2f} (>3), RIS curves nondecreasing={rising_ok}, "
        f"baseline flat dev={flat_dev:.2e} (<=1 stderr), sweep {elapsed:.0f}s",
    )
    assert ordering_ok
    assert worst_z > 3.0
    assert rising_ok
    assert flat_ok
    assert elapsed < 300.0


def test_criterion_6_monotone_ascent_and_convergence(default_sweep):
    cfg, records, _, _ = default_sweep
    start = time.monotonic()
    ris_records = [r for r in records if r.scheme != "no_ris"]
    converged = float(np.mean([r.converged for r in ris_records]))
    within_limit = all(r.iterations <= cfg.optimizer.max_outer_iters for r in ris_records)

    # traces re-checked explicitly on a slice of default trials (the result
    # type also asserts monotonicity at construction on every run above)
    from bdris.channel import sample_scenario

    worst_drop = 0.0
    for trial in range(30):
        seed = trial_seed(cfg.base_seed, 16, trial)
        ch = sample_scenario(cfg.geometry, cfg.fading, 16, seed, cfg.ris_interference)
        res = alternating_optimize(
            ch, RisConfig(FULLY, Mode.REFLECTIVE, 16), cfg.budget,
            p_max=cfg.budget.p_v, settings=cfg.optimizer,
        )
        diffs = np.diff(np.asarray(res.trace))
        if diffs.size:
            worst_drop = min(worst_drop, float(diffs.min()))
    elapsed = time.monotonic() - start
    ok = converged >= 0.99 and within_limit and worst_drop >= 0.0
    report(
        "criterion 6",
        ok,
        f"converged {100 * converged:.1f}% of {len(ris_records)} optimizer runs "
        f"(need >=99%), worst trace step {worst_drop:.1e} (exact nondecrease), {elapsed:.1f}s",
    )
    assert converged >= 0.99
    assert within_limit
    assert worst_drop >= 0.0


def test_criterion_7_sweep_determinism(tmp_path):
    import json

    start = time.monotonic()
    config = {
        "n_values": [4, 8],
        "schemes": ["no_ris", "single_connected", "fully_connected"],
        "trials": 3,
        "base_seed": 11,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    assert cli.main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "a")]) == 0
    manifest = str(tmp_path / "a" / "manifest.json")
    assert cli.main(
        ["sweep", "--config", manifest, "--out", str(tmp_path / "b"), "--threads", "1"]
    ) == 0
    assert cli.main(
        ["sweep", "--config", manifest, "--out", str(tmp_path / "c"), "--threads", "4"]
    ) == 0
    first = (tmp_path / "a" / "records.csv").read_bytes()
    identical = (
        first == (tmp_path / "b" / "records.csv").read_bytes()
        and first == (tmp_path / "c" / "records.csv").read_bytes()
    )
    elapsed = time.monotonic() - start
    report(
        "criterion 7",
        identical,
        f"records.csv byte-identical across reruns and worker counts, {elapsed:.1f}s",
    )
    assert identical
