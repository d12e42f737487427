"""Effective channels, SINR, spectral efficiency, and the cellular QoS metric.

The V2V receiver sees the direct channel plus the reflective RIS path;
the protected cellular user is modelled through an interference-power cap
(the standard underlay surrogate for a QoS floor).  All nodes carry a
single antenna.  Passing ``m=None`` everywhere evaluates the RIS-free
baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .channel import ScenarioChannels
from .scattering import ScatteringMatrix


@dataclass(frozen=True)
class LinkBudget:
    """Transmit powers, noise variance, and interference cap, all in watts."""

    p_v: float = 1.0
    p_c: float = 10.0
    sigma2: float = 1e-4
    i_max: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("p_v", "p_c", "sigma2", "i_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")

    def with_power(self, p_v: float) -> "LinkBudget":
        return replace(self, p_v=p_v)


def effective_channel(
    direct: complex,
    incoming: np.ndarray,
    outgoing: np.ndarray,
    m: ScatteringMatrix | None,
) -> complex:
    """Direct coefficient plus the reflective RIS path outgoing^H Phi incoming."""
    if m is None:
        return complex(direct)
    phi = m.blocks[0]
    incoming = np.asarray(incoming)
    outgoing = np.asarray(outgoing)
    if incoming.shape != (phi.shape[0],) or outgoing.shape != (phi.shape[0],):
        raise ValueError("channel vector lengths do not match the scattering matrix")
    return complex(direct + np.vdot(outgoing, phi @ incoming))


def sinr_v2v(ch: ScenarioChannels, m: ScatteringMatrix | None, b: LinkBudget) -> float:
    """V2V SINR under RSU interference and the given scattering matrix."""
    signal = abs(effective_channel(ch.h_d, ch.h_t, ch.g_r, m)) ** 2
    interference = abs(effective_channel(ch.f_d, ch.f_t, ch.g_r, m)) ** 2
    return b.p_v * signal / (b.p_c * interference + b.sigma2)


def cellular_interference(ch: ScenarioChannels, m: ScatteringMatrix | None, p_v: float) -> float:
    """Interference power received by the protected cellular user."""
    return p_v * abs(effective_channel(ch.q_d, ch.h_t, ch.q_r, m)) ** 2


def spectral_efficiency(sinr: float) -> float:
    """Shannon efficiency log2(1 + SINR) in bits/s/Hz."""
    if sinr < 0:
        raise ValueError(f"sinr must be nonnegative, got {sinr}")
    return float(np.log2(1.0 + sinr))


def v2v_spectral_efficiency(
    ch: ScenarioChannels, m: ScatteringMatrix | None, b: LinkBudget
) -> float:
    return spectral_efficiency(sinr_v2v(ch, m, b))
