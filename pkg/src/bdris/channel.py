"""Seeded Monte Carlo channel generation for the V2V underlay geometry.

One realization consists of seven complex links: the direct V2V channel
h_d, the two RIS hops h_t (V2V Tx -> RIS) and g_r (RIS -> V2V Rx), the
roadside-unit interference paths f_d (RSU -> V2V Rx) and f_t (RSU ->
RIS), and the leakage paths toward the protected cellular user, q_d
(V2V Tx -> user) and q_r (RIS -> user).

Large-scale fading follows a log-distance law with per-link-class
exponents; small-scale fading is Rician with a per-class K-factor (K = 0
gives Rayleigh).  The line-of-sight term carries an independent uniform
random phase per element, fixed within a realization; element-level array
geometry is intentionally not modelled.  Every link draws from its own
seed substream, so adding links or changing one link's length never
perturbs the draws of another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .seeding import substream


class LinkClass(str, Enum):
    DIRECT = "direct"
    RIS = "ris"
    INTERFERENCE = "interference"


@dataclass(frozen=True)
class GeometryConfig:
    """Planar node positions in meters and the carrier frequency in Hz."""

    v2v_tx: tuple[float, float] = (0.0, 0.0)
    v2v_rx: tuple[float, float] = (50.0, 0.0)
    ris: tuple[float, float] = (25.0, 10.0)
    rsu: tuple[float, float] = (-150.0, 50.0)
    cell_user: tuple[float, float] = (-100.0, 20.0)
    carrier_hz: float = 3.5e9

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        names = ("v2v_tx", "v2v_rx", "ris", "rsu", "cell_user")
        points = [getattr(self, name) for name in names]
        for i, a in enumerate(points):
            for b in points[i + 1 :]:
                if math.dist(a, b) <= 0.0:
                    raise ValueError("all node positions must be distinct")

    def distance(self, a: str, b: str) -> float:
        return math.dist(getattr(self, a), getattr(self, b))


def reference_path_loss_db(carrier_hz: float) -> float:
    """Free-space path loss at 1 m for the given carrier, in dB."""
    return 32.4 + 20.0 * math.log10(carrier_hz / 1e9)


@dataclass(frozen=True)
class FadingConfig:
    """Log-distance path loss plus Rician small-scale fading parameters.

    Defaults model a deeply blocked street-level direct link (exponent
    5.0, so the surface carries a substantial share of the received
    energy), elevated RIS hops with a mild line-of-sight component
    (exponent 2.2, K = 2), and plain NLoS interference/leakage paths
    (exponent 3.0).  ``pl0_db`` is the reference loss at 1 m.
    """

    pl0_db: float
    alpha_direct: float = 5.0
    alpha_ris: float = 2.2
    alpha_interference: float = 3.0
    k_direct: float = 0.0
    k_ris: float = 2.0
    k_interference: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha_direct", "alpha_ris", "alpha_interference"):
            a = getattr(self, name)
            if not 1.5 <= a <= 6.0:
                raise ValueError(f"{name} must lie in [1.5, 6], got {a}")
        for name in ("k_direct", "k_ris", "k_interference"):
            k = getattr(self, name)
            if not (k >= 0.0 and math.isfinite(k)):
                raise ValueError(f"{name} must be finite and nonnegative, got {k}")

    @classmethod
    def for_carrier(cls, carrier_hz: float, **overrides) -> "FadingConfig":
        return cls(pl0_db=reference_path_loss_db(carrier_hz), **overrides)

    def exponent(self, link_class: LinkClass) -> float:
        return {
            LinkClass.DIRECT: self.alpha_direct,
            LinkClass.RIS: self.alpha_ris,
            LinkClass.INTERFERENCE: self.alpha_interference,
        }[link_class]

    def k_factor(self, link_class: LinkClass) -> float:
        return {
            LinkClass.DIRECT: self.k_direct,
            LinkClass.RIS: self.k_ris,
            LinkClass.INTERFERENCE: self.k_interference,
        }[link_class]


@dataclass(frozen=True)
class ScenarioChannels:
    """One Monte Carlo realization of every link in the geometry."""

    h_d: complex
    h_t: np.ndarray
    g_r: np.ndarray
    f_d: complex
    f_t: np.ndarray
    q_d: complex
    q_r: np.ndarray

    def __post_init__(self) -> None:
        vectors = {}
        for name in ("h_t", "g_r", "f_t", "q_r"):
            arr = np.array(getattr(self, name), dtype=np.complex128)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a vector")
            arr.flags.writeable = False
            vectors[name] = arr
            object.__setattr__(self, name, arr)
        lengths = {v.shape[0] for v in vectors.values()}
        if len(lengths) != 1:
            raise ValueError(f"inconsistent vector lengths: {sorted(lengths)}")
        values = [self.h_d, self.f_d, self.q_d] + [v for a in vectors.values() for v in a]
        if not np.all(np.isfinite(np.asarray(values, dtype=np.complex128))):
            raise ValueError("channel entries must be finite")

    @property
    def n_elements(self) -> int:
        return int(self.h_t.shape[0])


def path_loss_linear(distance: float, link_class: LinkClass, cfg: FadingConfig) -> float:
    """Linear power gain of the log-distance law at the given distance."""
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    alpha = cfg.exponent(LinkClass(link_class))
    loss_db = cfg.pl0_db + 10.0 * alpha * math.log10(distance)
    return 10.0 ** (-loss_db / 10.0)


# (name, from-node, to-node, class, substream id); RIS hops carry vectors.
_LINKS = (
    ("h_d", "v2v_tx", "v2v_rx", LinkClass.DIRECT, 0),
    ("h_t", "v2v_tx", "ris", LinkClass.RIS, 1),
    ("g_r", "ris", "v2v_rx", LinkClass.RIS, 2),
    ("f_d", "rsu", "v2v_rx", LinkClass.INTERFERENCE, 3),
    ("f_t", "rsu", "ris", LinkClass.RIS, 4),
    ("q_d", "v2v_tx", "cell_user", LinkClass.INTERFERENCE, 5),
    ("q_r", "ris", "cell_user", LinkClass.RIS, 6),
)

_VECTOR_LINKS = frozenset({"h_t", "g_r", "f_t", "q_r"})
_RIS_INTERFERENCE_LINKS = frozenset({"f_t", "q_r"})


def sample_link(gain: float, k_factor: float, size: int | None, rng: np.random.Generator):
    """Rician draw with unit-modulus random-phase LoS term.

    The second moment of every entry equals ``gain`` for any K-factor.
    """
    shape = () if size is None else (size,)
    los = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, shape))
    diffuse = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    mix = np.sqrt(k_factor / (k_factor + 1.0)) * los + np.sqrt(1.0 / (k_factor + 1.0)) * diffuse
    out = np.sqrt(gain) * mix
    return out if size is not None else complex(out)


def sample_scenario(
    geom: GeometryConfig,
    fading: FadingConfig,
    n: int,
    seed: int,
    ris_interference: bool = True,
) -> ScenarioChannels:
    """Draw one realization of all links, deterministic in ``seed``.

    With ``ris_interference=False`` the RIS-assisted interference hops
    (f_t, q_r) are zeroed; thanks to per-link substreams this does not
    change any other link's draw.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    fields = {}
    for name, src, dst, link_class, stream_id in _LINKS:
        size = n if name in _VECTOR_LINKS else None
        if not ris_interference and name in _RIS_INTERFERENCE_LINKS:
            fields[name] = np.zeros(n, dtype=np.complex128)
            continue
        gain = path_loss_linear(geom.distance(src, dst), link_class, fading)
        rng = substream(seed, stream_id)
        fields[name] = sample_link(gain, fading.k_factor(link_class), size, rng)
    return ScenarioChannels(**fields)
