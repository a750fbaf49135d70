import numpy as np
import pytest

from noma_osd.channel import (
    PowerProfile,
    deinterleave,
    draw_channel,
    interleave,
    make_frame,
    make_interleaver,
    modulate_bpsk,
    snr_to_sigma,
    transmit,
    ChannelRealization,
)


def test_bpsk_mapping():
    assert modulate_bpsk(np.zeros(5, dtype=np.uint8)).tolist() == [1.0] * 5
    assert modulate_bpsk([0, 1]).tolist() == [1.0, -1.0]
    c = np.random.default_rng(0).integers(0, 2, 32)
    assert np.all(modulate_bpsk(c) ** 2 == 1.0)


def test_interleaver_determinism_and_inverse():
    a, b = make_interleaver(7, 64), make_interleaver(7, 64)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, make_interleaver(8, 64))
    v = np.random.default_rng(1).normal(size=64)
    assert np.array_equal(deinterleave(interleave(v, a), a), v)
    assert np.array_equal(interleave(deinterleave(v, a), a), v)
    assert make_interleaver(3, 1).tolist() == [0]


@pytest.mark.parametrize("seed", range(5))
def test_roundtrip_batch(seed):
    perm = make_interleaver(seed, 17)
    m = np.arange(3 * 17).reshape(3, 17)
    assert np.array_equal(deinterleave(interleave(m, perm), perm), m)


def test_noiseless_single_user():
    rng = np.random.default_rng(2)
    perm = make_interleaver(5, 8)
    ch = ChannelRealization(h=np.array([1.0 + 0j]), sigma_sq=0.0, interleavers=perm[None, :])
    c = rng.integers(0, 2, (1, 8))
    r = transmit(c, ch, rng)
    assert np.array_equal(r, modulate_bpsk(interleave(c[0], perm)).astype(complex))


def test_superposition_alphabet():
    rng = np.random.default_rng(3)
    prof = PowerProfile.geometric(2)
    ch = draw_channel(prof, 0.0, 64, rng)
    c = rng.integers(0, 2, (2, 64))
    r = transmit(c, ch, rng)
    h1, h2 = prof.rho
    alphabet = np.array([-h1 - h2, -h1 + h2, h1 - h2, h1 + h2])
    assert np.all(np.min(np.abs(r[:, None] - alphabet[None, :]), axis=1) < 1e-12)


def test_noise_variance_per_dimension():
    rng = np.random.default_rng(4)
    s2 = 0.3
    ch = draw_channel(PowerProfile.geometric(2), s2, 100_000, rng)
    r = transmit(np.zeros((2, 100_000), dtype=np.uint8), ch, rng)
    assert abs(np.var(r.imag) - s2 / 2) <= 0.05 * s2 / 2
    assert abs(np.var(r.real) - s2 / 2) <= 0.05 * s2 / 2


def test_snr_to_sigma():
    assert snr_to_sigma(0.0) == 1.0
    assert np.isclose(snr_to_sigma(10.0), 0.1)
    assert np.isclose(snr_to_sigma(20.0, PowerProfile.geometric(3)), 0.01)


def test_power_profile():
    p = PowerProfile.geometric(3)
    assert np.allclose(p.rho_sq, np.array([16, 4, 1]) / 21)
    assert np.isclose(p.rho_sq.sum(), 1.0)
    assert np.allclose(PowerProfile.geometric(4, 2.0).rho_sq[:-1] / PowerProfile.geometric(4, 2.0).rho_sq[1:], 2.0)


def test_awgn_gains_are_rho():
    ch = draw_channel(PowerProfile.geometric(3), 0.1, 8, np.random.default_rng(0))
    assert np.allclose(ch.h, PowerProfile.geometric(3).rho)


def test_fading_mean_power():
    prof = PowerProfile.geometric(3)
    rng = np.random.default_rng(5)
    g = np.array([draw_channel(prof, 0.1, 2, rng, fading=True, interleaver_seeds=[0, 1, 2]).h
                  for _ in range(100_000)])
    ratio = np.mean(np.abs(g) ** 2, axis=0) / prof.rho_sq
    assert np.all(np.abs(ratio - 1.0) < 0.03)


def test_make_frame_consistent(c84):
    rng = np.random.default_rng(6)
    ch = draw_channel(PowerProfile.geometric(2), 0.0, 8, rng, interleaver_seeds=[1, 2])
    fr = make_frame(c84, ch, rng)
    assert fr.tx_codewords.shape == (2, 8) and fr.tx_bits.shape == (2, 4)
    assert np.array_equal(c84.unencode(fr.tx_codewords), fr.tx_bits)
    x = modulate_bpsk(np.stack([interleave(fr.tx_codewords[u], ch.interleavers[u]) for u in range(2)]))
    assert np.allclose(fr.r, ch.h @ x)
