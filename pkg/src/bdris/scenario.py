"""Monte Carlo assembly of the V2V underlay case study.

A sweep evaluates every requested scheme (fully-, group-, single-connected
RIS, and the RIS-free baseline) over a grid of element counts and seeded
channel realizations, then aggregates per-(scheme, N) statistics.  For a
fixed (N, trial) all schemes consume the identical channel realization, so
cross-scheme comparisons are paired; architectures are solved in nesting
order and warm-started from the previous solution, which makes the
per-trial efficiency ordering of nested feasible sets mechanical.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import FadingConfig, GeometryConfig, ScenarioChannels, sample_scenario
from .metrics import LinkBudget
from .optimizer import OptimizerSettings, alternating_optimize
from .scattering import Architecture, Mode, RisConfig
from .seeding import derive_seed

#: Recognised scheme names, in feasible-set nesting order.
SCHEME_ORDER = ("no_ris", "single_connected", "group_connected", "fully_connected")


@dataclass(frozen=True)
class SweepConfig:
    """Full configuration of one element-count sweep."""

    n_values: tuple[int, ...] = (16, 24, 32, 40, 48, 56, 64)
    schemes: tuple[str, ...] = ("no_ris", "single_connected", "fully_connected")
    trials: int = 500
    base_seed: int = 1234
    group_dim: int = 4
    ris_interference: bool = True
    budget: LinkBudget = LinkBudget()
    geometry: GeometryConfig = GeometryConfig()
    fading: FadingConfig | None = None
    optimizer: OptimizerSettings = OptimizerSettings()

    def __post_init__(self) -> None:
        if not self.n_values:
            raise ValueError("n_values must not be empty")
        if any(n < 1 for n in self.n_values):
            raise ValueError("n_values must be positive")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ValueError("n_values must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.schemes:
            raise ValueError("schemes must not be empty")
        unknown = set(self.schemes) - set(SCHEME_ORDER)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError("schemes must not repeat")
        if self.group_dim < 1:
            raise ValueError("group_dim must be positive")
        if "group_connected" in self.schemes:
            bad = [n for n in self.n_values if n % self.group_dim]
            if bad:
                raise ValueError(f"group_dim={self.group_dim} does not divide n_values {bad}")
        if self.fading is None:
            object.__setattr__(
                self, "fading", FadingConfig.for_carrier(self.geometry.carrier_hz)
            )


@dataclass(frozen=True)
class SweepRecord:
    """One (scheme, N, trial) outcome of the sweep."""

    scheme: str
    n: int
    trial: int
    seed: int
    se: float
    p_v_opt: float
    converged: bool
    iterations: int

    def __post_init__(self) -> None:
        if self.se < 0:
            raise ValueError("se must be nonnegative")


@dataclass(frozen=True)
class AggregateRow:
    scheme: str
    n: int
    trials: int
    se_mean: float
    se_stderr: float
    p_v_mean: float
    converged_rate: float
    iterations_mean: float


def trial_seed(base_seed: int, n: int, trial: int) -> int:
    """Channel seed for one trial, identical for every scheme.

    The seed deliberately does not vary with ``n``: scalar links (which
    are element-count independent) then reuse the exact same draws across
    the sweep, so the RIS-free baseline is exactly flat in N and the RIS
    curves are compared on common random numbers.
    """
    del n
    return derive_seed(base_seed, trial)


def _scheme_config(scheme: str, n: int, cfg: SweepConfig) -> RisConfig | None:
    if scheme == "no_ris":
        return None
    if scheme == "single_connected":
        return RisConfig(Architecture.SINGLE_CONNECTED, Mode.REFLECTIVE, n)
    if scheme == "group_connected":
        return RisConfig(
            Architecture.GROUP_CONNECTED, Mode.REFLECTIVE, n, n_groups=n // cfg.group_dim
        )
    if scheme == "fully_connected":
        return RisConfig(Architecture.FULLY_CONNECTED, Mode.REFLECTIVE, n)
    raise ValueError(f"unknown scheme {scheme!r}")


def _chain(
    ch: ScenarioChannels,
    n: int,
    seed: int,
    trial: int,
    cfg: SweepConfig,
    upto: str | None = None,
) -> list[SweepRecord]:
    """Solve the trial's schemes in nesting order with warm-started inits."""
    wanted = [s for s in SCHEME_ORDER if s in cfg.schemes or s == upto]
    if upto is not None:
        wanted = wanted[: wanted.index(upto) + 1]
    records = []
    warm = None
    for scheme in wanted:
        result = alternating_optimize(
            ch,
            _scheme_config(scheme, n, cfg),
            cfg.budget,
            p_max=cfg.budget.p_v,
            settings=cfg.optimizer,
            warm_start=warm,
        )
        if result.matrix_opt is not None:
            warm = result.matrix_opt
        records.append(
            SweepRecord(
                scheme, n, trial, seed, result.se, result.p_v_opt,
                result.converged, result.iterations,
            )
        )
    return records


def run_trial(
    scheme: str, n: int, seed: int, cfg: SweepConfig, trial: int = 0
) -> SweepRecord:
    """Evaluate a single scheme on one seeded channel realization.

    Identical (n, seed) inputs reuse identical channels across schemes.
    The warm-start chain through any lower schemes listed in the config is
    replayed, so the record matches what :func:`run_sweep` would emit.
    """
    if scheme not in SCHEME_ORDER:
        raise ValueError(f"unknown scheme {scheme!r}")
    ch = sample_scenario(cfg.geometry, cfg.fading, n, seed, cfg.ris_interference)
    return _chain(ch, n, seed, trial, cfg, upto=scheme)[-1]


def _sweep_task(args: tuple[SweepConfig, int, int]) -> list[SweepRecord]:
    cfg, n, trial = args
    seed = trial_seed(cfg.base_seed, n, trial)
    ch = sample_scenario(cfg.geometry, cfg.fading, n, seed, cfg.ris_interference)
    return _chain(ch, n, seed, trial, cfg)


def aggregate(records: list[SweepRecord]) -> list[AggregateRow]:
    """Per-(scheme, N) mean and standard error, folded in sorted order."""
    groups: dict[tuple[str, int], list[SweepRecord]] = {}
    for r in sorted(records, key=lambda r: (r.scheme, r.n, r.trial)):
        groups.setdefault((r.scheme, r.n), []).append(r)
    rows = []
    for (scheme, n), rs in sorted(groups.items()):
        se = np.array([r.se for r in rs])
        stderr = float(se.std(ddof=1) / np.sqrt(se.size)) if se.size > 1 else 0.0
        rows.append(
            AggregateRow(
                scheme=scheme,
                n=n,
                trials=len(rs),
                se_mean=float(se.mean()),
                se_stderr=stderr,
                p_v_mean=float(np.mean([r.p_v_opt for r in rs])),
                converged_rate=float(np.mean([r.converged for r in rs])),
                iterations_mean=float(np.mean([r.iterations for r in rs])),
            )
        )
    return rows


def run_sweep(
    cfg: SweepConfig, workers: int = 1
) -> tuple[list[SweepRecord], list[AggregateRow]]:
    """Run every (scheme, N, trial) combination of the sweep.

    Trials are independent, so they may be fanned out over a process pool;
    records are sorted by (scheme, n, trial) and aggregated sequentially,
    which makes the output identical for any worker count.
    """
    tasks = [(cfg, n, trial) for n in cfg.n_values for trial in range(cfg.trials)]
    if workers > 1:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_task = list(pool.map(_sweep_task, tasks, chunksize=chunk))
    else:
        per_task = [_sweep_task(t) for t in tasks]
    records = [r for recs in per_task for r in recs]
    records.sort(key=lambda r: (r.scheme, r.n, r.trial))
    return records, aggregate(records)
