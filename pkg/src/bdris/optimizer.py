"""Joint transmit-power / scattering-matrix optimization for the V2V case study.

The problem is to maximize V2V spectral efficiency over the transmit
power and the reflective scattering matrix, subject to the architecture's
constraint set and an interference cap protecting the cellular user.  The
solver alternates a closed-form power update (efficiency is increasing in
power, so the optimum is the cap or the budget, whichever binds first)
with projected-gradient ascent on the matrix, starting from a closed-form
phase/subspace alignment.  Brute-force grid oracles for small instances
are provided for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ScenarioChannels
from .metrics import (
    LinkBudget,
    cellular_interference,
    effective_channel,
    v2v_spectral_efficiency,
)
from .scattering import (
    Mode,
    RisConfig,
    ScatteringMatrix,
    project_feasible,
    random_feasible,
    tangent_project,
)
from .seeding import derive_seed

_LN2 = math.log(2.0)
_ARMIJO_C = 1e-4
_MAX_BACKTRACKS = 30


@dataclass(frozen=True)
class OptimizerSettings:
    max_outer_iters: int = 200
    inner_grad_iters: int = 50
    step_init: float = 0.1
    backtrack_factor: float = 0.5
    tol_delta_se: float = 1e-6
    seed: int = 0
    n_restarts: int = 0

    def __post_init__(self) -> None:
        if self.max_outer_iters < 1 or self.inner_grad_iters < 1:
            raise ValueError("iteration limits must be positive")
        if self.step_init <= 0 or self.tol_delta_se <= 0:
            raise ValueError("step_init and tol_delta_se must be positive")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if self.n_restarts < 0:
            raise ValueError("n_restarts must be nonnegative")


@dataclass(frozen=True)
class OptimizeResult:
    """Solution of one optimization run.

    The trace holds the efficiency after each outer iteration (index 0 is
    the initialization) and is nondecreasing by the ascent contract, which
    is asserted exactly at construction.
    """

    p_v_opt: float
    matrix_opt: ScatteringMatrix | None
    se: float
    trace: tuple[float, ...]
    converged: bool
    iterations: int

    def __post_init__(self) -> None:
        if not self.trace:
            raise ValueError("trace must not be empty")
        diffs = np.diff(np.asarray(self.trace))
        if diffs.size and float(diffs.min()) < 0.0:
            raise ValueError("monotone ascent violated: trace is decreasing")
        if self.se != self.trace[-1]:
            raise ValueError("se must equal the last trace entry")


def optimal_power(
    ch: ScenarioChannels, m: ScatteringMatrix | None, b: LinkBudget, p_max: float
) -> float:
    """Exact power update: efficiency is increasing in power, so the best
    feasible power is the budget unless the interference cap binds first."""
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    leak_unit = cellular_interference(ch, m, 1.0)
    if leak_unit == 0.0:
        return float(p_max)
    return float(min(p_max, b.i_max / leak_unit))


def _complete_unitary(first_col: np.ndarray) -> np.ndarray:
    """Unitary matrix whose first column is the given unit vector.

    Remaining columns come from Gram-Schmidt over the canonical basis in
    index order (deterministic tie-breaking), with re-orthogonalisation.
    """
    n = first_col.shape[0]
    cols = [np.asarray(first_col, dtype=np.complex128)]
    for k in range(n):
        if len(cols) == n:
            break
        v = np.zeros(n, dtype=np.complex128)
        v[k] = 1.0
        for _ in range(2):
            for c in cols:
                v = v - c * np.vdot(c, v)
        norm = np.linalg.norm(v)
        if norm > 1e-7:
            cols.append(v / norm)
    if len(cols) != n:
        raise RuntimeError("unitary completion failed")
    return np.stack(cols, axis=1)


def closed_form_align(ch: ScenarioChannels, config: RisConfig) -> ScatteringMatrix:
    """Interference-blind alignment maximizing |h_d + g_r^H Phi h_t|.

    Single-connected: each diagonal phase rotates its term onto the phase
    of the direct channel, achieving |h_d| + sum_n |g_n||h_n|.  Fully- and
    group-connected: per group, a rank-one map from the incoming to the
    outgoing channel direction completed to a unitary, achieving
    |h_d| + sum_g ||g_(g)|| ||h_(g)||.
    """
    if config.mode is not Mode.REFLECTIVE:
        raise ValueError("closed-form alignment applies to reflective mode only")
    h, g = ch.h_t, ch.g_r
    if not np.any(h) or not np.any(g):
        raise ValueError("alignment requires nonzero incoming and outgoing channels")
    n = config.n_elements
    theta = float(np.angle(ch.h_d))  # angle(0) = 0 aligns terms on the real axis
    if config.group_dim == 1:
        block = np.diag(np.exp(1j * (theta + np.angle(g) - np.angle(h))))
    else:
        block = np.zeros((n, n), dtype=np.complex128)
        rot = np.exp(1j * theta)
        d = config.group_dim
        for sl in config.group_slices():
            h_g, g_g = h[sl], g[sl]
            nh, ng = np.linalg.norm(h_g), np.linalg.norm(g_g)
            if nh == 0.0 or ng == 0.0:
                block[sl, sl] = np.eye(d)  # group carries no energy; any unitary works
                continue
            u = _complete_unitary(g_g / ng)
            v = _complete_unitary(h_g / nh)
            block[sl, sl] = rot * (u @ v.conj().T)
    return ScatteringMatrix((block,), config)


def _se_gradient_fixed_power(
    ch: ScenarioChannels, m: ScatteringMatrix, b: LinkBudget, p_v: float
) -> np.ndarray:
    """Wirtinger gradient of log2(1 + SINR) at fixed transmit power."""
    s = effective_channel(ch.h_d, ch.h_t, ch.g_r, m)
    u = effective_channel(ch.f_d, ch.f_t, ch.g_r, m)
    den = b.p_c * abs(u) ** 2 + b.sigma2
    gamma = p_v * abs(s) ** 2 / den
    pref = p_v / (_LN2 * (1.0 + gamma) * den)
    grad = pref * s * np.outer(ch.g_r, ch.h_t.conj())
    grad -= (pref * abs(s) ** 2 * b.p_c / den) * u * np.outer(ch.g_r, ch.f_t.conj())
    return grad


def _leakage_gradient(ch: ScenarioChannels, m: ScatteringMatrix, p_v: float) -> np.ndarray:
    """Wirtinger gradient of the cellular interference power."""
    leak = effective_channel(ch.q_d, ch.h_t, ch.q_r, m)
    return p_v * leak * np.outer(ch.q_r, ch.h_t.conj())


def wirtinger_gradient(
    ch: ScenarioChannels,
    m: ScatteringMatrix,
    b: LinkBudget,
    objective: str = "se",
    p_v: float | None = None,
) -> np.ndarray:
    """Conjugate-coordinate gradient of the named objective at the matrix.

    ``objective="se"``: spectral efficiency with the transmit power held
    fixed (``p_v`` or ``b.p_v``).  ``objective="leakage"``: interference
    power at the cellular user.  The returned array G is the derivative
    with respect to the conjugate entries of the reflective block, so the
    real-coordinate derivatives are 2 Re(G) and 2 Im(G) and G is the
    steepest-ascent direction.
    """
    if m.config.mode is not Mode.REFLECTIVE:
        raise ValueError("gradients are defined for reflective mode only")
    power = b.p_v if p_v is None else p_v
    if objective == "se":
        return _se_gradient_fixed_power(ch, m, b, power)
    if objective == "leakage":
        return _leakage_gradient(ch, m, power)
    raise ValueError(f"unknown objective {objective!r}")


def _ascent_direction(
    ch: ScenarioChannels,
    m: ScatteringMatrix,
    b: LinkBudget,
    p_now: float,
    p_max: float | None,
) -> np.ndarray:
    """Ascent direction for the (possibly power-coupled) efficiency.

    When the interference cap binds (p_now < p_max), the achievable power
    scales as i_max over the leakage, so the composite efficiency gains an
    extra -d(log leakage) term.
    """
    grad = _se_gradient_fixed_power(ch, m, b, p_now)
    if p_max is None or p_now >= p_max * (1.0 - 1e-12):
        return grad
    s = effective_channel(ch.h_d, ch.h_t, ch.g_r, m)
    u = effective_channel(ch.f_d, ch.f_t, ch.g_r, m)
    den = b.p_c * abs(u) ** 2 + b.sigma2
    gamma = p_now * abs(s) ** 2 / den
    scale = gamma / ((1.0 + gamma) * _LN2)
    leak = effective_channel(ch.q_d, ch.h_t, ch.q_r, m)
    leak_pow = abs(leak) ** 2
    grad -= (scale / leak_pow) * leak * np.outer(ch.q_r, ch.h_t.conj())
    return grad


def projected_gradient_ascent(
    ch: ScenarioChannels,
    m0: ScatteringMatrix,
    b: LinkBudget,
    config: RisConfig,
    settings: OptimizerSettings,
    p_max: float | None = None,
) -> ScatteringMatrix:
    """Backtracking projected-gradient ascent on the scattering matrix.

    With ``p_max=None`` the objective is the efficiency at the fixed power
    ``b.p_v``.  With ``p_max`` given, every candidate is scored after
    re-optimizing the transmit power under the interference cap, so the
    step never trades away joint-problem progress.  The returned matrix is
    feasible and its objective never falls below the starting value.
    """
    if config.mode is not Mode.REFLECTIVE:
        raise ValueError("gradient ascent applies to reflective mode only")

    def score(m: ScatteringMatrix) -> float:
        if p_max is None:
            return v2v_spectral_efficiency(ch, m, b)
        p = optimal_power(ch, m, b, p_max)
        return v2v_spectral_efficiency(ch, m, b.with_power(p))

    m = m0
    f_cur = score(m0)
    step = settings.step_init
    for _ in range(settings.inner_grad_iters):
        p_now = b.p_v if p_max is None else optimal_power(ch, m, b, p_max)
        grad = _ascent_direction(ch, m, b, p_now, p_max)
        slope = 2.0 * float(np.sum(np.abs(tangent_project(m, [grad])[0]) ** 2))
        if slope <= 1e-30:
            break
        step = step * 2.0  # optimistic growth, trimmed by backtracking
        accepted = False
        f_cand = f_cur
        for _ in range(_MAX_BACKTRACKS):
            if step * slope < 1e-3 * settings.tol_delta_se:
                break  # largest attainable gain along this direction is noise
            cand = project_feasible([m.blocks[0] + step * grad], config)
            f_cand = score(cand)
            if f_cand >= f_cur + _ARMIJO_C * step * slope:
                accepted = True
                break
            step *= settings.backtrack_factor
        if not accepted:
            break
        gain = f_cand - f_cur
        m, f_cur = cand, f_cand
        if gain < settings.tol_delta_se:
            break
    return m


def alternating_optimize(
    ch: ScenarioChannels,
    config: RisConfig | None,
    b: LinkBudget,
    p_max: float,
    settings: OptimizerSettings | None = None,
    warm_start: ScatteringMatrix | None = None,
) -> OptimizeResult:
    """Alternate exact power updates with matrix ascent until convergence.

    ``config=None`` solves the RIS-free baseline (power update only).
    ``warm_start`` may carry a feasible matrix from a less-connected
    architecture; it competes with the closed-form alignment (and any
    random restarts) as the initial point, which makes the efficiency of
    nested architectures mechanically nondecreasing.
    """
    settings = settings or OptimizerSettings()

    def objective(m: ScatteringMatrix | None) -> tuple[float, float]:
        p = optimal_power(ch, m, b, p_max)
        return v2v_spectral_efficiency(ch, m, b.with_power(p)), p

    if config is None:
        se, p = objective(None)
        return OptimizeResult(p, None, se, (se,), True, 0)
    if config.mode is not Mode.REFLECTIVE:
        raise ValueError("the case-study optimizer supports reflective mode only")

    starts = [closed_form_align(ch, config)]
    if warm_start is not None:
        starts.append(ScatteringMatrix(warm_start.blocks, config))
    for r in range(settings.n_restarts):
        starts.append(random_feasible(config, derive_seed(settings.seed, r)))

    best: OptimizeResult | None = None
    for m0 in starts:
        f_cur, p_cur = objective(m0)
        m = m0
        trace = [f_cur]
        converged = False
        iterations = 0
        for _ in range(settings.max_outer_iters):
            iterations += 1
            m = projected_gradient_ascent(
                ch, m, b.with_power(p_cur), config, settings, p_max=p_max
            )
            f_new, p_new = objective(m)
            trace.append(f_new)
            delta = f_new - f_cur
            f_cur, p_cur = f_new, p_new
            if delta < settings.tol_delta_se:
                converged = True
                break
        result = OptimizeResult(p_cur, m, f_cur, tuple(trace), converged, iterations)
        if best is None or result.se > best.se:
            best = result
    return best


def _capped_se(signal, interf, leak, b: LinkBudget, p_max: float):
    """Efficiency with the per-point optimal power, vectorized over grids."""
    leak_pow = np.abs(leak) ** 2
    p = np.full(np.shape(leak_pow), float(p_max))
    binding = leak_pow * p_max > b.i_max
    if np.any(binding):
        p = np.where(binding, b.i_max / np.where(binding, leak_pow, 1.0), p)
    sinr = p * np.abs(signal) ** 2 / (b.p_c * np.abs(interf) ** 2 + b.sigma2)
    return np.log2(1.0 + sinr)


def _diag_se_grid(ch, b, p_max, grids: list[np.ndarray]):
    """Efficiency over the Cartesian product of per-element phase grids."""
    n = len(grids)
    t_s = ch.g_r.conj() * ch.h_t
    t_u = ch.g_r.conj() * ch.f_t
    t_l = ch.q_r.conj() * ch.h_t
    shape = [g.size for g in grids]
    signal = np.full(shape, complex(ch.h_d))
    interf = np.full(shape, complex(ch.f_d))
    leak = np.full(shape, complex(ch.q_d))
    for i, g in enumerate(grids):
        axes = [1] * n
        axes[i] = g.size
        phase = np.exp(1j * g).reshape(axes)
        signal = signal + t_s[i] * phase
        interf = interf + t_u[i] * phase
        leak = leak + t_l[i] * phase
    return _capped_se(signal, interf, leak, b, p_max)


def _oracle_single(ch, config, b, p_max, points: int):
    """Exhaustive (hierarchically refined for N=3) per-element phase search."""
    n = config.n_elements
    fine = 2.0 * np.pi / points
    if n <= 2:
        stages = [(2.0 * np.pi / points, None)]
    else:
        # full scan at 64 points per element, then fine grids around the
        # best coarse basins; the objective is a degree-2 trigonometric
        # polynomial per phase, far below the coarse Nyquist rate
        stages = [(2.0 * np.pi / 64, None), (fine, 2.0 * np.pi / 64)]
    centers = [np.zeros(n)]
    best_se, best_phases = -np.inf, None
    for step, radius in stages:
        candidates = []
        for center in centers:
            if radius is None:
                grids = [np.arange(0.0, 2.0 * np.pi, step) for _ in range(n)]
            else:
                offsets = np.arange(-radius, radius + step / 2, step)
                grids = [center[i] + offsets for i in range(n)]
            se = _diag_se_grid(ch, b, p_max, grids)
            flat = se.ravel()
            take = min(16, flat.size)
            for idx in np.argpartition(flat, -take)[-take:]:
                pos = np.unravel_index(int(idx), se.shape)
                candidates.append(
                    (float(flat[idx]), np.array([grids[i][pos[i]] for i in range(n)]))
                )
        candidates.sort(key=lambda c: c[0], reverse=True)
        centers = [phases for _, phases in candidates[:16]]
        if candidates[0][0] > best_se:
            best_se, best_phases = candidates[0]
    block = np.diag(np.exp(1j * best_phases))
    return best_se, ScatteringMatrix((block,), config)


def _u2(alpha: float, theta: float, beta: float, gamma: float) -> np.ndarray:
    ct, st = np.cos(theta), np.sin(theta)
    return np.exp(1j * alpha) * np.array(
        [
            [ct * np.exp(1j * beta), st * np.exp(1j * gamma)],
            [-st * np.exp(-1j * gamma), ct * np.exp(-1j * beta)],
        ]
    )


def _u2_form_coeffs(outgoing, incoming):
    w, v = outgoing, incoming
    return (
        w[0].conj() * v[0],
        w[1].conj() * v[1],
        w[0].conj() * v[1],
        w[1].conj() * v[0],
    )


def _oracle_fully_2(ch, config, b, p_max, resolution: float):
    """Grid search over U(2) = e^{ja} [[cos t e^{jb}, sin t e^{jg}],
    [-sin t e^{-jg}, cos t e^{-jb}]], refined down to ``resolution`` rad."""
    forms = {
        "s": (complex(ch.h_d), _u2_form_coeffs(ch.g_r, ch.h_t)),
        "u": (complex(ch.f_d), _u2_form_coeffs(ch.g_r, ch.f_t)),
        "l": (complex(ch.q_d), _u2_form_coeffs(ch.q_r, ch.h_t)),
    }

    def scan(alphas, thetas, betas, gammas):
        cores = {}
        for key, (_, (c1, c2, c3, c4)) in forms.items():
            a_beta = c1 * np.exp(1j * betas) + c2 * np.exp(-1j * betas)
            b_gamma = c3 * np.exp(1j * gammas) - c4 * np.exp(-1j * gammas)
            cores[key] = (
                np.cos(thetas)[:, None, None] * a_beta[None, :, None]
                + np.sin(thetas)[:, None, None] * b_gamma[None, None, :]
            )
        found = []
        for alpha in alphas:
            rot = np.exp(1j * alpha)
            se = _capped_se(
                forms["s"][0] + rot * cores["s"],
                forms["u"][0] + rot * cores["u"],
                forms["l"][0] + rot * cores["l"],
                b,
                p_max,
            )
            flat = se.ravel()
            take = min(4, flat.size)
            for idx in np.argpartition(flat, -take)[-take:]:
                it, ib, ig = np.unravel_index(int(idx), se.shape)
                found.append(
                    (float(flat[idx]), (alpha, thetas[it], betas[ib], gammas[ig]))
                )
        found.sort(key=lambda c: c[0], reverse=True)
        return found

    coarse = 0.1
    found = scan(
        np.arange(0.0, 2.0 * np.pi, coarse),
        np.arange(0.0, np.pi / 2 + coarse, coarse),
        np.arange(0.0, 2.0 * np.pi, coarse),
        np.arange(0.0, 2.0 * np.pi, coarse),
    )
    best_se, best_angles = found[0]
    offsets = np.arange(-1.2 * coarse, 1.2 * coarse + resolution / 2, resolution)
    for _, center in found[:16]:
        refined = scan(*[c + offsets for c in center])
        if refined[0][0] > best_se:
            best_se, best_angles = refined[0]
    return best_se, ScatteringMatrix((_u2(*best_angles),), config)


def brute_force_oracle(
    ch: ScenarioChannels,
    config: RisConfig,
    b: LinkBudget,
    p_max: float,
    grid_resolution: float | int | None = None,
):
    """Grid-search reference optimum for small instances (tests only).

    Diagonal constraint sets (N <= 3) take an integer number of phase
    points per element (default 1024); the N = 2 unitary set takes the
    final angular step in radians (default 0.02).  Each grid point is
    scored at its own optimal feasible power.  Returns ``(se, matrix)``.
    """
    if config.mode is not Mode.REFLECTIVE:
        raise ValueError("the oracle supports reflective mode only")
    n = config.n_elements
    diagonal = config.group_dim == 1
    if diagonal or n == 1:
        if n > 3:
            raise ValueError(f"diagonal oracle supports N <= 3, got N={n}")
        points = 1024 if grid_resolution is None else int(grid_resolution)
        return _oracle_single(ch, config, b, p_max, points)
    if config.group_count == 1 and n == 2:
        resolution = 0.02 if grid_resolution is None else float(grid_resolution)
        return _oracle_fully_2(ch, config, b, p_max, resolution)
    raise ValueError(
        f"instance too large for brute force: {config.architecture.value} with N={n}"
    )
