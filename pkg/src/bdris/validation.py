"""Self-check battery behind the ``validate`` CLI command.

Runs the structural invariants (projection feasibility, sparsity,
idempotence), the counting-formula identities, the gradient
finite-difference comparison, the alignment dominance chain, the power-cap
property, and (outside quick mode) the small-instance oracle comparison.
Each check reports pass/fail plus a one-line numeric detail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scattering
from .channel import ScenarioChannels
from .metrics import LinkBudget, cellular_interference, v2v_spectral_efficiency
from .optimizer import (
    OptimizerSettings,
    alternating_optimize,
    brute_force_oracle,
    closed_form_align,
    optimal_power,
    wirtinger_gradient,
)
from .scattering import Architecture, Mode, RisConfig, ScatteringMatrix, validate
from .seeding import substream

PROJECTION_TOL = 1e-10
IDEMPOTENCE_TOL = 1e-12
GRADIENT_TOL = 1e-5
ORACLE_TOL = 1e-2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _combo_configs(n: int = 12, groups: int = 3, sectors: int = 3) -> list[RisConfig]:
    configs = []
    for arch in Architecture:
        for mode in Mode:
            kwargs = {}
            if arch is Architecture.GROUP_CONNECTED:
                kwargs["n_groups"] = groups
            if mode is Mode.MULTI_SECTOR:
                kwargs["n_sectors"] = sectors
            configs.append(RisConfig(arch, mode, n, **kwargs))
    return configs


def random_channels(n: int, seed: int, interference: float = 1.0) -> ScenarioChannels:
    """Unit-scale synthetic realization for gradient and oracle checks."""
    rng = substream(seed, 0xC0DE)

    def draw(size=None):
        shape = () if size is None else (size,)
        z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        return z if size is not None else complex(z)

    return ScenarioChannels(
        h_d=draw(),
        h_t=draw(n),
        g_r=draw(n),
        f_d=interference * draw(),
        f_t=interference * draw(n),
        q_d=interference * draw(),
        q_r=interference * draw(n),
    )


def projection_checks(
    draws: int, project_fn=None, seed: int = 7
) -> tuple[CheckResult, CheckResult, CheckResult]:
    """Residual, sparsity, and idempotence over random projections."""
    project = project_fn or scattering.project_feasible
    worst_residual = 0.0
    worst_sparsity = 0.0
    worst_drift = 0.0
    for combo, config in enumerate(_combo_configs()):
        rng = substream(seed, combo)
        shape = (config.n_blocks, config.n_elements, config.n_elements)
        for _ in range(draws):
            raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            m = project(raw, config)
            report = validate(m)
            worst_residual = max(worst_residual, report.residual)
            worst_sparsity = max(worst_sparsity, report.sparsity_violation)
            again = project(np.stack(m.blocks), config)
            drift = max(
                float(np.abs(a - b).max()) for a, b in zip(m.blocks, again.blocks)
            )
            worst_drift = max(worst_drift, drift)
    return (
        CheckResult(
            "unitarity residual",
            worst_residual <= PROJECTION_TOL,
            f"max residual {worst_residual:.3e} (tol {PROJECTION_TOL:.0e})",
        ),
        CheckResult(
            "sparsity exactness",
            worst_sparsity == 0.0,
            f"max off-pattern magnitude {worst_sparsity:.3e} (must be 0)",
        ),
        CheckResult(
            "projection idempotence",
            worst_drift <= IDEMPOTENCE_TOL,
            f"max reprojection drift {worst_drift:.3e} (tol {IDEMPOTENCE_TOL:.0e})",
        ),
    )


def counting_checks() -> CheckResult:
    """Exact identities of the element and impedance-component counts."""
    problems = []
    expected = {
        (Architecture.SINGLE_CONNECTED, Mode.REFLECTIVE, 16): (16, 16),
        (Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, 16): (256, 136),
        (Architecture.SINGLE_CONNECTED, Mode.HYBRID, 16): (16, 24),
    }
    for (arch, mode, n), (nz, hw) in expected.items():
        config = RisConfig(arch, mode, n)
        if scattering.nonzero_count(config) != nz:
            problems.append(f"nonzeros({arch.value},{n}) != {nz}")
        if scattering.hardware_complexity(config) != hw:
            problems.append(f"complexity({arch.value},{mode.value},{n}) != {hw}")
    group = RisConfig(Architecture.GROUP_CONNECTED, Mode.REFLECTIVE, 16, n_groups=4)
    if scattering.nonzero_count(group) != 64 or scattering.hardware_complexity(group) != 40:
        problems.append("group-connected N=16 G=4 counts wrong")
    for n in (16, 24, 36):
        single = RisConfig(Architecture.SINGLE_CONNECTED, Mode.REFLECTIVE, n)
        fully = RisConfig(Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, n)
        as_single = RisConfig(Architecture.GROUP_CONNECTED, Mode.REFLECTIVE, n, n_groups=n)
        as_fully = RisConfig(Architecture.GROUP_CONNECTED, Mode.REFLECTIVE, n, n_groups=1)
        if scattering.nonzero_count(single) != scattering.nonzero_count(as_single):
            problems.append(f"G=N nonzero identity fails at N={n}")
        if scattering.nonzero_count(fully) != scattering.nonzero_count(as_fully):
            problems.append(f"G=1 nonzero identity fails at N={n}")
        if scattering.hardware_complexity(fully) != scattering.hardware_complexity(as_fully):
            problems.append(f"G=1 complexity identity fails at N={n}")
        divisors = [g for g in range(1, n + 1) if n % g == 0]
        counts = [
            scattering.hardware_complexity(
                RisConfig(Architecture.GROUP_CONNECTED, Mode.REFLECTIVE, n, n_groups=g)
            )
            for g in divisors
        ]
        if any(a < b for a, b in zip(counts, counts[1:])):
            problems.append(f"complexity not nonincreasing in G at N={n}")
    return CheckResult(
        "counting formulas",
        not problems,
        problems[0] if problems else "all identities exact",
    )


def gradient_check(instances: int, seed: int = 11) -> CheckResult:
    """Analytic Wirtinger gradient versus central finite differences."""
    h = 1e-6
    worst = 0.0
    for i in range(instances):
        n = 2 if i % 2 == 0 else 4
        ch = random_channels(n, seed + i)
        config = RisConfig(Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, n)
        m = scattering.random_feasible(config, seed + 1000 + i)
        b = LinkBudget(p_v=1.0, p_c=1.0, sigma2=0.5, i_max=1e9)
        grad = wirtinger_gradient(ch, m, b)

        def se_at(block):
            probe = ScatteringMatrix((block,), config)
            return v2v_spectral_efficiency(ch, probe, b)

        # conjugate-coordinate gradient from real-coordinate central
        # differences: G = (df/dx + j df/dy) / 2
        fd = np.zeros((n, n), dtype=np.complex128)
        base = np.array(m.blocks[0])
        for r in range(n):
            for c in range(n):
                for unit in (1.0, 1j):
                    up, dn = base.copy(), base.copy()
                    up[r, c] += h * unit
                    dn[r, c] -= h * unit
                    deriv = (se_at(up) - se_at(dn)) / (2.0 * h)
                    fd[r, c] += 0.5 * deriv * unit
        rel = float(np.linalg.norm(fd - grad) / max(np.linalg.norm(fd), 1e-300))
        worst = max(worst, rel)
    return CheckResult(
        "gradient finite differences",
        worst <= GRADIENT_TOL,
        f"max relative error {worst:.3e} (tol {GRADIENT_TOL:.0e})",
    )


def alignment_dominance_check(draws: int, seed: int = 13) -> CheckResult:
    """Aligned channel magnitude must grow with connectivity."""
    worst = 0.0
    for i in range(draws):
        ch = random_channels(8, seed + i)
        gains = {}
        for arch, kwargs in (
            (Architecture.SINGLE_CONNECTED, {}),
            (Architecture.GROUP_CONNECTED, {"n_groups": 2}),
            (Architecture.FULLY_CONNECTED, {}),
        ):
            config = RisConfig(arch, Mode.REFLECTIVE, 8, **kwargs)
            m = closed_form_align(ch, config)
            gains[arch] = abs(ch.h_d + np.vdot(ch.g_r, m.blocks[0] @ ch.h_t))
        worst = max(
            worst,
            gains[Architecture.SINGLE_CONNECTED] - gains[Architecture.GROUP_CONNECTED],
            gains[Architecture.GROUP_CONNECTED] - gains[Architecture.FULLY_CONNECTED],
        )
    return CheckResult(
        "alignment dominance",
        worst <= 1e-9,
        f"max chain violation {worst:.3e}",
    )


def power_cap_check(draws: int, seed: int = 17) -> CheckResult:
    """Power returned by the exact update always respects the cap."""
    worst = 0.0
    for i in range(draws):
        ch = random_channels(4, seed + i)
        config = RisConfig(Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, 4)
        m = scattering.random_feasible(config, seed + i)
        b = LinkBudget(p_v=1.0, p_c=1.0, sigma2=0.1, i_max=0.2)
        p = optimal_power(ch, m, b, p_max=5.0)
        worst = max(worst, cellular_interference(ch, m, p) / b.i_max - 1.0)
    return CheckResult(
        "power cap",
        worst <= 1e-12,
        f"max relative cap excess {worst:.3e}",
    )


def oracle_check(instances: int, seed: int = 19) -> CheckResult:
    """Alternating optimizer versus brute-force grid optimum."""
    worst = 0.0
    settings = OptimizerSettings(n_restarts=16)
    for i in range(instances):
        if i % 2 == 0:
            config = RisConfig(Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, 2)
        else:
            config = RisConfig(Architecture.SINGLE_CONNECTED, Mode.REFLECTIVE, 2)
        ch = random_channels(2, seed + i, interference=0.6)
        b = LinkBudget(p_v=1.0, p_c=2.0, sigma2=0.5, i_max=1.0)
        result = alternating_optimize(ch, config, b, p_max=1.0, settings=settings)
        oracle_se, _ = brute_force_oracle(ch, config, b, p_max=1.0)
        worst = max(worst, oracle_se - result.se)
    return CheckResult(
        "oracle agreement",
        worst <= ORACLE_TOL,
        f"max shortfall vs grid optimum {worst:.3e} (tol {ORACLE_TOL:.0e})",
    )


def run_validation(quick: bool = False, project_fn=None) -> list[CheckResult]:
    draws = 25 if quick else 200
    results = list(projection_checks(draws, project_fn=project_fn))
    results.append(counting_checks())
    results.append(gradient_check(10 if quick else 40))
    results.append(alignment_dominance_check(100 if quick else 1000))
    results.append(power_cap_check(50 if quick else 200))
    if not quick:
        results.append(oracle_check(4))
    return results
