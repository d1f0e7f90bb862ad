import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ris_lab.channel import ChannelRealization, sample_fading, sample_realization
from ris_lab.phase_design import (
    EQUAL_PHASE,
    PhaseProfile,
    SnrContext,
    effective_gain,
    equal_phases,
    long_term_phases,
    random_phases,
    short_term_phases,
    short_term_snr,
    snr,
    wrap_phase,
)

from .conftest import ref_stats, rayleigh_stats

complex_st = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


def realization(h_sd, h_sr, h_rd):
    return ChannelRealization(complex(h_sd), np.asarray(h_sr, dtype=complex), np.asarray(h_rd, dtype=complex))


def test_short_term_real_positive_channels():
    r = realization(0.5, [1.0, 2.0, 3.0], [0.1, 0.2, 0.3])
    np.testing.assert_array_equal(short_term_phases(r).theta, 0.0)


def test_short_term_imaginary_direct_link():
    r = realization(1j, [1.0, 1.0], [1.0, 1.0])
    np.testing.assert_allclose(short_term_phases(r).theta, math.pi / 2)


def test_short_term_zero_direct_link_uses_zero_arg():
    r = realization(0.0, [1j], [1.0])
    # arg(conj(j)) = -pi/2, so theta = 0 - (-pi/2) - 0
    np.testing.assert_allclose(short_term_phases(r).theta, [math.pi / 2])


def test_short_term_alignment_on_random_draws():
    stats = ref_stats(25)
    rng = np.random.default_rng(3)
    for _ in range(200):
        r = sample_realization(stats, rng)
        prof = short_term_phases(r)
        terms = np.conj(r.h_sr) * prof.reflection() * r.h_rd
        diff = np.angle(terms * np.conj(r.h_sd))
        np.testing.assert_allclose(diff, 0.0, atol=1e-9)
        gain = effective_gain(r, prof)
        assert abs(gain) == pytest.approx(abs(r.h_sd) + np.sum(np.abs(r.h_sr) * np.abs(r.h_rd)), rel=1e-12)


def test_long_term_profile_coherent_combining():
    stats = ref_stats(36)
    prof = long_term_phases(stats)
    alpha = np.sum(np.conj(stats.hbar_sr) * prof.reflection() * stats.hbar_rd)
    omega = (stats.K_sr + 1) * (stats.K_rd + 1)
    expected = 36 * math.sqrt(stats.K_sr * stats.beta_sr * stats.K_rd * stats.beta_rd / omega)
    assert alpha.real == pytest.approx(expected, rel=1e-12)
    assert abs(alpha.imag) < 1e-12 * expected


def test_long_term_boresight_zero():
    stats = ref_stats(9)
    real_los = type(stats)(**{**stats.__dict__, "hbar_sr": np.abs(stats.hbar_sr) + 0j,
                              "hbar_rd": np.abs(stats.hbar_rd) + 0j})
    np.testing.assert_allclose(long_term_phases(real_los).theta, 0.0)


def test_long_term_requires_los():
    with pytest.raises(ValueError, match="fallback|equal or random"):
        long_term_phases(rayleigh_stats(4))


def test_long_term_invariant_to_gain_scaling():
    stats = ref_stats(16)
    scaled = type(stats)(**{**stats.__dict__, "beta_sr": stats.beta_sr * 7, "beta_rd": stats.beta_rd * 0.2,
                            "hbar_sr": stats.hbar_sr * math.sqrt(7), "hbar_rd": stats.hbar_rd * math.sqrt(0.2)})
    np.testing.assert_allclose(long_term_phases(scaled).theta, long_term_phases(stats).theta, atol=1e-12)


def test_long_term_beats_perturbed_competitors():
    """No perturbed profile reaches a higher sampled mean SNR (common random numbers)."""
    stats = ref_stats(16)
    nu = 1.0
    best = long_term_phases(stats).theta
    rng = np.random.default_rng(99)
    candidates = wrap_phase(best[None, :] + rng.uniform(-0.5, 0.5, (360, 16)))
    refl = np.exp(1j * np.vstack([best, candidates])).T  # (M, 361)
    fade_rng = np.random.default_rng(100)
    acc = np.zeros(361)
    n_total = 10**5
    for _ in range(10):
        h_sd, h_sr, h_rd = sample_fading(stats, fade_rng, n_total // 10)
        gain = h_sd[:, None] + (np.conj(h_sr) * h_rd) @ refl
        acc += np.sum(nu * np.abs(gain) ** 2, axis=0)
    means = acc / n_total
    assert np.all(means[1:] < means[0])


def test_equal_phases():
    np.testing.assert_array_equal(equal_phases(1).theta, [math.pi / 4])
    np.testing.assert_array_equal(equal_phases(3).theta, [math.pi / 4] * 3)
    assert -math.pi <= EQUAL_PHASE <= math.pi


def test_random_phases_statistics():
    theta = random_phases(10**6, np.random.default_rng(8)).theta
    assert abs(theta.mean()) < 0.01
    assert theta.var() == pytest.approx(math.pi**2 / 3, rel=0.01)
    assert theta.min() >= -math.pi and theta.max() <= math.pi
    again = random_phases(10**6, np.random.default_rng(8)).theta
    assert np.array_equal(theta, again)


def test_profile_rejects_out_of_range():
    with pytest.raises(ValueError):
        PhaseProfile(np.array([4.0]), "equal")
    with pytest.raises(ValueError):
        PhaseProfile(np.array([0.0]), "bogus")


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=20))
def test_wrap_keeps_phasor(theta):
    theta = np.array(theta)
    w = wrap_phase(theta)
    assert np.all(np.abs(w) <= math.pi)
    np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * theta), atol=1e-12)


def test_effective_gain_empty_ris():
    r = realization(0.3 - 0.1j, [], [])
    assert effective_gain(r, PhaseProfile(np.array([]), "equal")) == 0.3 - 0.1j


@settings(max_examples=50)
@given(h_sd=complex_st, h_sr=st.lists(complex_st, min_size=3, max_size=3),
       h_rd=st.lists(complex_st, min_size=3, max_size=3),
       theta=st.lists(st.floats(-math.pi, math.pi), min_size=3, max_size=3))
def test_gain_conjugation_symmetry(h_sd, h_sr, h_rd, theta):
    r = realization(h_sd, h_sr, h_rd)
    rc = realization(np.conj(h_sd), np.conj(h_sr), np.conj(h_rd))
    g = effective_gain(r, PhaseProfile(np.array(theta), "random"))
    gc = effective_gain(rc, PhaseProfile(-np.array(theta), "random"))
    assert gc == pytest.approx(np.conj(g), abs=1e-9)


def test_snr_values():
    ctx = SnrContext.from_dbm(13.0, -94.0)
    assert ctx.nu == pytest.approx(10**10.7, rel=1e-12)
    assert SnrContext.from_dbm(10 * math.log10(20.0), -94.0).nu == pytest.approx(5.0237728630e10, rel=1e-10)
    r = realization(0.0, [0.0, 0.0], [0.0, 0.0])
    assert snr(r, equal_phases(2), ctx) == 0.0
    with pytest.raises(ValueError):
        SnrContext(0.0)


def test_short_term_snr_closed_form_matches_profile_path():
    stats = ref_stats(30)
    ctx = SnrContext(3e9)
    rng = np.random.default_rng(12)
    for _ in range(100):
        r = sample_realization(stats, rng)
        assert short_term_snr(r, ctx) == pytest.approx(snr(r, short_term_phases(r), ctx), rel=1e-12)


def test_short_term_dominates_every_design():
    stats = ref_stats(20)
    ctx = SnrContext(1e10)
    rng = np.random.default_rng(21)
    lt = long_term_phases(stats)
    eq = equal_phases(20)
    for _ in range(500):
        r = sample_realization(stats, rng)
        top = short_term_snr(r, ctx)
        for prof in (lt, eq, random_phases(20, rng)):
            assert top >= snr(r, prof, ctx)
