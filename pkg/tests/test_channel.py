import math

import numpy as np
import pytest

from bdris.channel import (
    FadingConfig,
    GeometryConfig,
    LinkClass,
    ScenarioChannels,
    path_loss_linear,
    reference_path_loss_db,
    sample_link,
    sample_scenario,
)
from bdris.seeding import substream


def fading(pl0=30.0, **kw):
    return FadingConfig(pl0_db=pl0, **kw)


# ---------------------------------------------------------------- path loss


def test_reference_distance_gain():
    assert path_loss_linear(1.0, LinkClass.DIRECT, fading(30.0)) == pytest.approx(1e-3)


def test_log_distance_doubling():
    cfg = fading(30.0, alpha_direct=2.0)
    g1 = path_loss_linear(10.0, LinkClass.DIRECT, cfg)
    g2 = path_loss_linear(20.0, LinkClass.DIRECT, cfg)
    assert g2 / g1 == pytest.approx(0.25)


def test_path_loss_against_direct_evaluation():
    # independent evaluation of the log-distance law
    expected = 10.0 ** (-(30.0 + 10.0 * 2.5 * math.log10(50.0)) / 10.0)
    cfg = fading(30.0, alpha_ris=2.5)
    assert path_loss_linear(50.0, LinkClass.RIS, cfg) == pytest.approx(expected, rel=1e-12)


def test_path_loss_strictly_decreasing():
    cfg = fading()
    gains = [path_loss_linear(d, LinkClass.INTERFERENCE, cfg) for d in (1, 3, 10, 30, 100)]
    assert all(a > b for a, b in zip(gains, gains[1:]))


def test_nonpositive_distance_rejected():
    with pytest.raises(ValueError):
        path_loss_linear(0.0, LinkClass.DIRECT, fading())


def test_default_reference_loss_tracks_carrier():
    assert reference_path_loss_db(3.5e9) == pytest.approx(32.4 + 20 * math.log10(3.5))
    assert FadingConfig.for_carrier(3.5e9).pl0_db == pytest.approx(43.28, abs=0.01)


# ------------------------------------------------------------------ configs


def test_exponent_bounds_enforced():
    with pytest.raises(ValueError):
        fading(alpha_direct=1.0)
    with pytest.raises(ValueError):
        fading(alpha_ris=6.5)


def test_k_factor_must_be_finite_nonnegative():
    with pytest.raises(ValueError):
        fading(k_ris=-1.0)
    with pytest.raises(ValueError):
        fading(k_direct=math.inf)


def test_geometry_rejects_coincident_nodes():
    with pytest.raises(ValueError, match="distinct"):
        GeometryConfig(v2v_tx=(0.0, 0.0), v2v_rx=(0.0, 0.0))


def test_channels_reject_mismatched_lengths():
    with pytest.raises(ValueError, match="lengths"):
        ScenarioChannels(
            h_d=1.0, h_t=np.ones(3), g_r=np.ones(3), f_d=0.0,
            f_t=np.ones(2), q_d=0.0, q_r=np.ones(3),
        )


def test_channels_reject_nonfinite():
    with pytest.raises(ValueError, match="finite"):
        ScenarioChannels(
            h_d=np.nan, h_t=np.ones(2), g_r=np.ones(2), f_d=0.0,
            f_t=np.ones(2), q_d=0.0, q_r=np.ones(2),
        )


# ----------------------------------------------------------------- sampling


def test_sampling_deterministic_bit_for_bit():
    geom, fad = GeometryConfig(), FadingConfig.for_carrier(3.5e9)
    a = sample_scenario(geom, fad, 8, seed=42)
    b = sample_scenario(geom, fad, 8, seed=42)
    for name in ("h_d", "f_d", "q_d"):
        assert getattr(a, name) == getattr(b, name)
    for name in ("h_t", "g_r", "f_t", "q_r"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    c = sample_scenario(geom, fad, 8, seed=43)
    assert c.h_d != a.h_d


def test_scalar_links_do_not_depend_on_element_count():
    # per-link substreams: growing the surface never perturbs other links
    geom, fad = GeometryConfig(), FadingConfig.for_carrier(3.5e9)
    small = sample_scenario(geom, fad, 4, seed=11)
    large = sample_scenario(geom, fad, 64, seed=11)
    assert small.h_d == large.h_d
    assert small.f_d == large.f_d
    assert small.q_d == large.q_d


def test_interference_switch_leaves_other_links_untouched():
    geom, fad = GeometryConfig(), FadingConfig.for_carrier(3.5e9)
    on = sample_scenario(geom, fad, 6, seed=5, ris_interference=True)
    off = sample_scenario(geom, fad, 6, seed=5, ris_interference=False)
    assert np.all(off.f_t == 0.0) and np.all(off.q_r == 0.0)
    assert on.h_d == off.h_d and on.f_d == off.f_d and on.q_d == off.q_d
    assert np.array_equal(on.h_t, off.h_t)
    assert np.array_equal(on.g_r, off.g_r)


def test_pure_los_limit():
    # K -> infinity leaves only the unit-modulus LoS term
    gain = 0.3
    entries = sample_link(gain, 1e12, 1000, substream(1))
    assert np.abs(np.abs(entries) - math.sqrt(gain)).max() < 1e-5 * math.sqrt(gain)


def test_rayleigh_unit_second_moment():
    # CN(0,1) has unit second moment; 1e5 samples at unit path loss
    entries = sample_link(1.0, 0.0, 100_000, substream(2))
    moment = float(np.mean(np.abs(entries) ** 2))
    assert 0.99 <= moment <= 1.01


@pytest.mark.parametrize("k", [0.0, 2.0, 10.0])
def test_second_moment_matches_gain(k):
    gain = 0.05
    entries = sample_link(gain, k, 100_000, substream(3))
    assert float(np.mean(np.abs(entries) ** 2)) == pytest.approx(gain, rel=0.02)


def test_gain_scaling_scales_amplitudes_exactly():
    a = sample_link(1.0, 2.0, 100, substream(4))
    b = sample_link(4.0, 2.0, 100, substream(4))
    assert np.allclose(b, 2.0 * a, rtol=1e-15)


def test_scenario_moments_match_link_budget():
    # every link's empirical second moment equals its path-loss gain
    geom, fad = GeometryConfig(), FadingConfig.for_carrier(3.5e9)
    n_trials = 4000
    acc = {name: 0.0 for name in ("h_d", "h_t", "g_r", "f_d", "f_t", "q_d", "q_r")}
    for t in range(n_trials):
        ch = sample_scenario(geom, fad, 4, seed=1_000_000 + t)
        for name in acc:
            v = getattr(ch, name)
            acc[name] += float(np.mean(np.abs(v) ** 2))
    gains = {
        "h_d": path_loss_linear(geom.distance("v2v_tx", "v2v_rx"), LinkClass.DIRECT, fad),
        "h_t": path_loss_linear(geom.distance("v2v_tx", "ris"), LinkClass.RIS, fad),
        "g_r": path_loss_linear(geom.distance("ris", "v2v_rx"), LinkClass.RIS, fad),
        "f_d": path_loss_linear(geom.distance("rsu", "v2v_rx"), LinkClass.INTERFERENCE, fad),
        "f_t": path_loss_linear(geom.distance("rsu", "ris"), LinkClass.RIS, fad),
        "q_d": path_loss_linear(geom.distance("v2v_tx", "cell_user"), LinkClass.INTERFERENCE, fad),
        "q_r": path_loss_linear(geom.distance("ris", "cell_user"), LinkClass.RIS, fad),
    }
    for name, total in acc.items():
        assert total / n_trials == pytest.approx(gains[name], rel=0.05), name
