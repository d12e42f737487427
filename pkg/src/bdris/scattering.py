"""Scattering-matrix constraint sets for beyond-diagonal RIS architectures.

An N-element reconfigurable surface is described by one complex N x N
scattering block per radiating sector: a single block in reflective or
transmissive mode, two blocks (reflect then transmit) in hybrid mode, and
S blocks in multi-sector mode.  The reconfigurable impedance network
behind the surface fixes both a sparsity pattern and a lossless-scattering
constraint on the blocks:

  single-connected  diagonal blocks; per element the sector coefficients
                    satisfy sum_s |phi_{s,n}|^2 = 1
  fully-connected   dense blocks; the sector-stacked response
                    [Phi_1; ...; Phi_S] is semi-unitary
  group-connected   block-diagonal with G groups of dimension N/G; each
                    group's sector-stacked response is semi-unitary

Single- and fully-connected surfaces are the G = N and G = 1 special
cases, so every operation here reduces to per-group work on the stacked
sector blocks.  All types are immutable and all operations are pure
functions; concurrent evaluation needs no coordination.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .seeding import substream

#: Residual below which a projected matrix is considered feasible.
FEASIBILITY_TOL = 1e-10


class Architecture(str, Enum):
    SINGLE_CONNECTED = "single_connected"
    FULLY_CONNECTED = "fully_connected"
    GROUP_CONNECTED = "group_connected"


class Mode(str, Enum):
    REFLECTIVE = "reflective"
    TRANSMISSIVE = "transmissive"
    HYBRID = "hybrid"
    MULTI_SECTOR = "multi_sector"


class RankDeficientBlockError(ValueError):
    """Raised when a block has no unique nearest (semi-)unitary factor."""


@dataclass(frozen=True)
class RisConfig:
    """Architecture, operating mode, and size of one surface.

    ``n_groups`` is required for the group-connected architecture and must
    divide ``n_elements``; ``n_sectors`` is required for multi-sector mode
    and must be at least 2 (S = 2 coincides with hybrid mode).
    """

    architecture: Architecture
    mode: Mode
    n_elements: int
    n_groups: int | None = None
    n_sectors: int | None = None

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be positive, got {self.n_elements}")
        if self.architecture is Architecture.GROUP_CONNECTED:
            if self.n_groups is None or self.n_groups < 1:
                raise ValueError("group-connected architecture requires a positive n_groups")
            if self.n_elements % self.n_groups != 0:
                raise ValueError(
                    f"n_groups={self.n_groups} does not divide n_elements={self.n_elements}"
                )
        elif self.n_groups is not None:
            raise ValueError("n_groups only applies to the group-connected architecture")
        if self.mode is Mode.MULTI_SECTOR:
            if self.n_sectors is None or self.n_sectors < 2:
                raise ValueError("multi-sector mode requires n_sectors >= 2")
        elif self.n_sectors is not None:
            raise ValueError("n_sectors only applies to multi-sector mode")

    @property
    def group_count(self) -> int:
        if self.architecture is Architecture.SINGLE_CONNECTED:
            return self.n_elements
        if self.architecture is Architecture.FULLY_CONNECTED:
            return 1
        return self.n_groups  # type: ignore[return-value]

    @property
    def group_dim(self) -> int:
        return self.n_elements // self.group_count

    @property
    def n_blocks(self) -> int:
        """Number of scattering blocks (sectors) carried by a matrix."""
        if self.mode in (Mode.REFLECTIVE, Mode.TRANSMISSIVE):
            return 1
        if self.mode is Mode.HYBRID:
            return 2
        return self.n_sectors  # type: ignore[return-value]

    def group_slices(self) -> tuple[slice, ...]:
        d = self.group_dim
        return tuple(slice(g * d, (g + 1) * d) for g in range(self.group_count))


def sparsity_mask(config: RisConfig) -> np.ndarray:
    """Boolean mask of entries that may be nonzero under the architecture."""
    n = config.n_elements
    mask = np.zeros((n, n), dtype=bool)
    for sl in config.group_slices():
        mask[sl, sl] = True
    return mask


@dataclass(frozen=True)
class ScatteringMatrix:
    """Sector-ordered scattering blocks together with their configuration.

    Construction checks shapes only; whether the blocks actually satisfy
    the architecture constraints is the job of :func:`validate`.  Blocks
    are stored as read-only complex arrays.
    """

    blocks: tuple[np.ndarray, ...]
    config: RisConfig

    def __post_init__(self) -> None:
        n = self.config.n_elements
        if len(self.blocks) != self.config.n_blocks:
            raise ValueError(
                f"expected {self.config.n_blocks} blocks for mode "
                f"{self.config.mode.value}, got {len(self.blocks)}"
            )
        frozen = []
        for b in self.blocks:
            arr = np.array(b, dtype=np.complex128)
            if arr.shape != (n, n):
                raise ValueError(f"block shape {arr.shape} does not match N={n}")
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "blocks", tuple(frozen))


@dataclass(frozen=True)
class ConstraintReport:
    """Result of checking one matrix against its constraint set.

    ``residual`` is the largest per-group defect: Frobenius norm of
    sum_s Phi_{s,g}^H Phi_{s,g} - I over the group's diagonal block, which
    for single-connected surfaces reduces to max_n |sum_s |phi_{s,n}|^2 - 1|.
    ``sparsity_violation`` is the largest magnitude found outside the
    allowed pattern and must be exactly zero to pass.
    """

    residual: float
    group_residuals: tuple[float, ...]
    sparsity_violation: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        ok = self.residual <= self.tol and self.sparsity_violation == 0.0
        object.__setattr__(self, "passed", bool(ok))


def _as_blocks(raw, config: RisConfig) -> list[np.ndarray]:
    """Normalise a matrix, stack, or block sequence to a list of N x N arrays."""
    n = config.n_elements
    if isinstance(raw, ScatteringMatrix):
        raw = raw.blocks
    arr = np.asarray(raw, dtype=np.complex128) if not isinstance(raw, (list, tuple)) else None
    if arr is not None and arr.ndim == 2:
        blocks = [arr]
    elif arr is not None and arr.ndim == 3:
        blocks = list(arr)
    else:
        blocks = [np.asarray(b, dtype=np.complex128) for b in raw]
    if len(blocks) != config.n_blocks:
        raise ValueError(
            f"expected {config.n_blocks} blocks for mode {config.mode.value}, got {len(blocks)}"
        )
    for b in blocks:
        if b.shape != (n, n):
            raise ValueError(f"block shape {b.shape} does not match N={n}")
    return [b.copy() for b in blocks]


def project_feasible(raw, config: RisConfig, symmetric: bool = False) -> ScatteringMatrix:
    """Project a raw complex stack onto the architecture's feasible set.

    Entries outside the sparsity pattern are zeroed exactly; each group's
    sector-stacked block is then replaced by the unitary factor of its
    polar decomposition, which is the Frobenius-nearest semi-unitary
    matrix.  For single-connected surfaces this reduces to normalising
    each element's sector coefficients to a unit 2-norm (unit modulus in
    reflective or transmissive mode).

    With ``symmetric=True`` the blocks are symmetrised (Phi -> (Phi +
    Phi^T)/2) before projection.  This is a heuristic for reciprocal
    impedance networks, not an exact nearest-point map onto the symmetric
    feasible set; it is off by default.

    Raises :class:`RankDeficientBlockError` when a group's stacked block
    is rank deficient (the polar factor is then not unique), including the
    single-connected case of a zero diagonal entry.
    """
    blocks = _as_blocks(raw, config)
    if symmetric:
        blocks = [0.5 * (b + b.T) for b in blocks]
    mask = sparsity_mask(config)
    out = [np.where(mask, b, 0.0 + 0.0j) for b in blocks]

    if config.group_dim == 1:
        diags = np.stack([np.diagonal(b) for b in out])  # (S, N)
        norms = np.sqrt(np.sum(np.abs(diags) ** 2, axis=0))
        bad = np.flatnonzero(norms == 0.0)
        if bad.size:
            raise RankDeficientBlockError(
                f"diagonal element {bad[0]} has zero magnitude across all sectors"
            )
        scaled = diags / norms
        for k, b in enumerate(out):
            np.fill_diagonal(b, scaled[k])
    else:
        d = config.group_dim
        eps = np.finfo(np.float64).eps
        for g, sl in enumerate(config.group_slices()):
            stacked = np.vstack([b[sl, sl] for b in out])
            u, s, vh = np.linalg.svd(stacked, full_matrices=False)
            if s[0] == 0.0 or s[-1] <= s[0] * stacked.shape[0] * eps:
                raise RankDeficientBlockError(f"group {g} block is rank deficient")
            q = u @ vh
            for k, b in enumerate(out):
                b[sl, sl] = q[k * d : (k + 1) * d, :]
    return ScatteringMatrix(tuple(out), config)


def validate(m: ScatteringMatrix, tol: float = FEASIBILITY_TOL) -> ConstraintReport:
    """Check a matrix against its architecture and mode constraints.

    Returns per-group residuals (see :class:`ConstraintReport`); the
    matrix passes iff the largest residual is within ``tol`` and every
    entry outside the sparsity pattern is exactly zero.
    """
    config = m.config
    n = config.n_elements
    mask = sparsity_mask(config)
    violation = 0.0
    if not mask.all():
        off = ~mask
        violation = max(float(np.abs(b[off]).max()) for b in m.blocks)

    if config.group_dim == 1:
        diags = np.stack([np.diagonal(b) for b in m.blocks])
        defect = np.abs(np.sum(np.abs(diags) ** 2, axis=0) - 1.0)
        group_residuals = tuple(float(v) for v in defect)
    else:
        d = config.group_dim
        eye = np.eye(d)
        group_residuals = []
        for sl in config.group_slices():
            acc = np.zeros((d, d), dtype=np.complex128)
            for b in m.blocks:
                sub = b[sl, sl]
                acc += sub.conj().T @ sub
            group_residuals.append(float(np.linalg.norm(acc - eye)))
        group_residuals = tuple(group_residuals)

    residual = max(group_residuals) if group_residuals else 0.0
    if n != m.blocks[0].shape[0]:  # defensive; construction already checks
        raise ValueError("matrix dimensions inconsistent with config")
    return ConstraintReport(residual, group_residuals, violation, tol)


def random_feasible(config: RisConfig, seed: int) -> ScatteringMatrix:
    """Feasible matrix from projecting a complex Gaussian draw.

    Deterministic in ``seed``.  For unitary-constrained blocks the
    projection of a Ginibre draw is Haar-like on the (semi-)unitary group.
    """
    rng = substream(seed, 0x5CA7)
    shape = (config.n_blocks, config.n_elements, config.n_elements)
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return project_feasible(raw, config)


def tangent_project(m: ScatteringMatrix, directions) -> tuple[np.ndarray, ...]:
    """Project a Euclidean direction stack onto the feasible set's tangent space.

    Off-pattern entries are zeroed; per group the stacked direction Z is
    mapped to Z - U (U^H Z + Z^H U)/2 with U the current stacked block.
    Used for first-order stationarity diagnostics and step-size control.
    """
    config = m.config
    dirs = _as_blocks(directions, config)
    mask = sparsity_mask(config)
    out = [np.where(mask, z, 0.0 + 0.0j) for z in dirs]
    d = config.group_dim
    for sl in config.group_slices():
        u = np.vstack([b[sl, sl] for b in m.blocks])
        z = np.vstack([b[sl, sl] for b in out])
        sym = u.conj().T @ z
        sym = 0.5 * (sym + sym.conj().T)
        t = z - u @ sym
        for k, b in enumerate(out):
            b[sl, sl] = t[k * d : (k + 1) * d, :]
    return tuple(out)


def _ceil_half(numerator: int, what: str) -> int:
    """Exact numerator/2 as an integer, rounding up with a warning if odd."""
    if numerator % 2:
        warnings.warn(
            f"{what} count {numerator}/2 is not an integer; rounding up",
            stacklevel=3,
        )
        return numerator // 2 + 1
    return numerator // 2


def hardware_complexity(config: RisConfig) -> int:
    """Number of tunable impedance components required by the architecture.

    Single-connected surfaces need N components in reflective or
    transmissive mode, 3N/2 in hybrid mode, and (S+1)N/2 in multi-sector
    mode (hybrid is the S = 2 case).  Fully- and group-connected surfaces
    need (Nhat+1)N/2 components with Nhat the group dimension, independent
    of mode.  Non-integer hybrid/multi-sector counts (odd N) are rounded
    up with a warning.
    """
    n = config.n_elements
    if config.architecture is Architecture.SINGLE_CONNECTED:
        if config.mode in (Mode.REFLECTIVE, Mode.TRANSMISSIVE):
            return n
        sectors = 2 if config.mode is Mode.HYBRID else config.n_sectors
        return _ceil_half((sectors + 1) * n, f"{config.mode.value} impedance")
    return _ceil_half((config.group_dim + 1) * n, "impedance")


def nonzero_count(config: RisConfig) -> int:
    """Number of entries each scattering block may have nonzero."""
    return config.group_count * config.group_dim**2
