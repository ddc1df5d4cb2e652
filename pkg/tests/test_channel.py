import numpy as np
import pytest
from hypothesis import given, strategies as st

from nldsim.channel import (
    ChannelRealization,
    SingularChannelError,
    SnrPoint,
    draw_channel,
    received_generators,
    received_lattice,
    transmit,
    vec,
)
from nldsim.lattice import LatticeBasis, realify, shortest_vector
from nldsim.linalg import sample_gaussian_matrix, singular_values
from nldsim.rng import stream
from nldsim.stcodes import golden_code, vblast_code

seeds = st.integers(0, 2**32 - 1)


def test_snr_bookkeeping():
    p = SnrPoint.from_db(20.0, 2)
    assert p.rho == pytest.approx(100.0) and p.P == pytest.approx(50.0) and p.noise_var == 1.0
    assert p.rho == 2 * p.P / p.noise_var
    assert p.db == pytest.approx(20.0)
    q = SnrPoint.from_rho(10.0, 4, noise_var=0.5)
    assert q.rho == pytest.approx(4 * q.P / q.noise_var)


def test_draw_channel_shapes_and_scope():
    ch = draw_channel(2, 3, 2, stream(0, 0))
    assert ch.H.shape == (3, 2) and ch.H_T.shape == (6, 4)
    assert (ch.N, ch.M, ch.T) == (3, 2, 2)
    assert np.all(np.diff(ch.sigma) >= 0)
    with pytest.raises(ValueError):
        draw_channel(3, 2, 1, stream(0, 0))


def test_channel_entry_variance():
    rng = stream(3, 0)
    h = np.array([draw_channel(1, 1, 1, rng).H[0, 0] for _ in range(20000)])
    big = np.random.default_rng(1)
    g = sample_gaussian_matrix(1, 1, big, size=10**6)[:, 0, 0]
    assert abs(np.mean(np.abs(g) ** 2) - 1) < 0.01
    assert abs(np.mean(np.abs(h) ** 2) - 1) < 0.05


def test_lift_is_quasi_static():
    ch = draw_channel(2, 2, 3, stream(5, 1))
    for t in range(3):
        assert np.array_equal(ch.H_T[2 * t:2 * t + 2, 2 * t:2 * t + 2], ch.H)
    s = singular_values(ch.H_T)
    assert np.allclose(s, np.sort(np.repeat(ch.sigma, 3)), atol=1e-10)


def test_vec_is_column_major():
    X = np.array([[1, 2], [3, 4]])
    assert vec(X).tolist() == [1, 3, 2, 4]
    assert vec(np.stack([X, X])).shape == (2, 4)


def test_transmit_noiseless_and_zero_word():
    code = golden_code(4, P=5.0)
    ch = draw_channel(2, 2, 2, stream(1, 2))
    w = code.codeword([1, -1, 1, 1, -1, -1, 1, -1])
    y = transmit(code, w, ch, SnrPoint(10.0, 5.0, 0.0), stream(1, 3))
    assert np.allclose(y, ch.H_T @ vec(w.signal), atol=0)
    zero = type(w)(np.zeros(8, dtype=int), np.zeros((2, 2), dtype=complex))
    noise = transmit(code, zero, ch, SnrPoint(10.0, 5.0, 1.0), stream(1, 4))
    ref = stream(1, 4)
    assert np.allclose(noise, sample_gaussian_matrix(4, 1, ref)[:, 0])


def test_transmit_checks_power():
    code = vblast_code(2, 1, 4)
    ch = draw_channel(2, 2, 1, stream(0, 0))
    with pytest.raises(ValueError):
        transmit(code, code.codeword([1, 1, 1, 1]), ch, SnrPoint.from_db(10, 2), stream(0, 1))


def test_noise_energy():
    code = vblast_code(2, 2, 4, P=1.0)
    ch = draw_channel(2, 3, 2, stream(2, 0))
    snr = SnrPoint(2.0, 1.0, 1.0)
    w = code.codeword([1] * 8)
    rng = stream(2, 1)
    x = ch.H_T @ vec(w.signal)
    e = np.mean([np.sum(np.abs(transmit(code, w, ch, snr, rng) - x) ** 2) for _ in range(100000)])
    assert e == pytest.approx(3 * 2 * 1.0, rel=0.01)


def test_received_lattice_identity_channel():
    code = vblast_code(2, 1, 4)
    ch = ChannelRealization.from_matrix(np.eye(2), 1)
    B = received_lattice(code, ch).generator
    assert np.allclose(B, realify(LatticeBasis(code.power_scale * code.lattice.generator)).generator)


def test_received_lattice_diagonal_channel():
    code = vblast_code(2, 1, 4, P=3.0)
    ch = ChannelRealization.from_matrix(np.diag([2.0, 1.0]), 1)
    _, d = shortest_vector(received_lattice(code, ch))
    assert d == pytest.approx(min(2, 1) * code.power_scale)


def test_received_lattice_singular():
    with pytest.raises(SingularChannelError):
        received_lattice(vblast_code(2, 1, 4), ChannelRealization.from_matrix(np.ones((2, 2)), 1))


@given(seeds, st.sampled_from([(vblast_code, (2, 1, 4)), (vblast_code, (2, 2, 4)), (golden_code, (4,))]))
def test_received_lattice_sandwich(seed, maker):
    code = maker[0](*maker[1])
    ch = draw_channel(code.M, code.M + seed % 2, code.T, np.random.default_rng(seed))
    code_basis = LatticeBasis(code.power_scale * code.lattice.generator)
    dL = shortest_vector(code_basis)[1]
    dHL = shortest_vector(received_lattice(code, ch))[1]
    assert ch.sigma[0] * dL <= dHL * (1 + 1e-9)
    assert dHL <= ch.sigma[-1] * dL * (1 + 1e-9)


def test_received_generators_match_single():
    code = golden_code(4, P=7.0)
    rng = np.random.default_rng(0)
    chans = [draw_channel(2, 2, 2, rng) for _ in range(5)]
    Bs = received_generators(code, np.array([c.H for c in chans]))
    for B, ch in zip(Bs, chans):
        assert np.allclose(B, received_lattice(code, ch).generator)
