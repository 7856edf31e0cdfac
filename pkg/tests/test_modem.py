import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ancdm.errors import FramingError, InvalidConstellationError, InvalidSymbolError
from ancdm.modem import (bits_to_indices, count_bit_errors, diff_decode_noiseless, diff_encode,
                         diff_power, indices_to_bits, make_constellation, min_distance,
                         nearest_indices)


def as_set(points):
    return sorted(np.round(points, 12).tolist(), key=lambda z: (z.real, z.imag))


@pytest.mark.parametrize("order, rotation, expected", [
    (2, 0.0, [1, -1]),
    (2, np.pi / 2, [-1j, 1j]),
    (4, 0.0, [1, 1j, -1, -1j]),
])
def test_make_constellation_points(order, rotation, expected):
    c = make_constellation(order, rotation)
    assert as_set(c.points) == as_set(np.array(expected, dtype=complex))


@pytest.mark.parametrize("order", [2, 4, 8, 16, 64])
@pytest.mark.parametrize("rotation", [0.0, 0.3, -2.0, np.pi])
def test_constellation_invariants(order, rotation):
    c = make_constellation(order, rotation)
    np.testing.assert_allclose(np.abs(c.points), 1.0, atol=1e-12)
    d = np.abs(c.points[:, None] - c.points[None, :])
    assert np.all(d[~np.eye(order, dtype=bool)] > 1e-9)
    assert -np.pi / order - 1e-12 <= c.effective_rotation <= np.pi / order + 1e-12


@pytest.mark.parametrize("order", [0, 1, 3, 6, 12, 2.0])
def test_make_constellation_rejects_bad_order(order):
    with pytest.raises(InvalidConstellationError):
        make_constellation(order)


def test_diff_encode_identity_info_is_constant():
    c = make_constellation(4)
    s = diff_encode(np.zeros(9, dtype=int), c, reference=1.0)
    np.testing.assert_allclose(s, np.ones(10))


def test_diff_encode_bpsk_sign_alternation():
    c = make_constellation(2)
    s = diff_encode([1, 1], c, reference=1.0)
    np.testing.assert_allclose(s, [1, -1, 1], atol=1e-12)


def test_diff_encode_default_reference_is_index_zero_point():
    c = make_constellation(2, np.pi / 2)
    s = diff_encode([0, 1, 1], c)
    assert s[0] == c.points[0]
    np.testing.assert_allclose(s[1:], s[:-1] * c.points[[0, 1, 1]])


def test_diff_encode_rejects_bad_input():
    c = make_constellation(4)
    with pytest.raises(InvalidSymbolError):
        diff_encode([0, 4], c)
    with pytest.raises(InvalidSymbolError):
        diff_encode([0, -1], c)
    with pytest.raises(InvalidSymbolError):
        diff_encode([0, 1], c, reference=2.0)


def test_roundtrip_all_length3_qpsk_frames():
    c = make_constellation(4)
    frames = np.array(list(itertools.product(range(4), repeat=3)))
    s = diff_encode(frames, c)
    decoded = nearest_indices(diff_decode_noiseless(s), c)
    np.testing.assert_array_equal(decoded, frames)


@settings(max_examples=60, deadline=None)
@given(order=st.sampled_from([2, 4, 8, 16]),
       rotation=st.floats(-np.pi, np.pi),
       info=st.lists(st.integers(0, 2**16), min_size=1, max_size=200))
def test_roundtrip_property(order, rotation, info):
    c = make_constellation(order, rotation)
    idx = np.array(info) % order
    s = diff_encode(idx, c)
    np.testing.assert_allclose(np.abs(s), 1.0, atol=1e-12)
    np.testing.assert_array_equal(nearest_indices(diff_decode_noiseless(s), c), idx)


def test_diff_power_examples():
    bpsk = make_constellation(2)
    rot = make_constellation(2, np.pi / 2)
    # differences {-2, 0, 0, 2} and {+-1 +- j}
    assert diff_power(bpsk, bpsk) == pytest.approx(2.0, abs=1e-12)
    assert diff_power(bpsk, rot) == pytest.approx(2.0, abs=1e-12)
    diffs = bpsk.points[:, None] - rot.points[None, :]
    np.testing.assert_allclose(np.abs(diffs) ** 2, 2.0)


@pytest.mark.parametrize("ma", [2, 4, 8, 16])
@pytest.mark.parametrize("mb", [2, 4, 8, 16])
@pytest.mark.parametrize("theta", [0.0, 0.1, np.pi / 8, 1.0])
def test_diff_power_is_two_by_enumeration(ma, mb, theta):
    a = make_constellation(ma)
    b = make_constellation(mb, theta)
    brute = sum(abs(x - y) ** 2 for x in a.points for y in b.points) / (ma * mb)
    assert brute == pytest.approx(2.0, abs=1e-12)
    assert diff_power(a, b) == pytest.approx(brute, abs=1e-12)


@pytest.mark.parametrize("order", [2, 4, 8, 16])
def test_rotation_pi_over_m_separates_alphabets(order):
    a = make_constellation(order)
    assert min_distance(a, a) == 0.0
    assert min_distance(a, make_constellation(order, np.pi / order)) > 0.1


def test_bpsk_bit_map():
    c = make_constellation(2)
    idx = bits_to_indices([0, 1, 1], c)
    np.testing.assert_allclose(c.points[idx], [1, -1, -1], atol=1e-12)


def test_qpsk_bits_roundtrip_all_words():
    c = make_constellation(4)
    words = np.array(list(itertools.product([0, 1], repeat=2))).ravel()
    idx = bits_to_indices(words, c)
    assert sorted(idx.tolist()) == [0, 1, 2, 3]
    np.testing.assert_array_equal(indices_to_bits(idx, c), words)


@pytest.mark.parametrize("order", [4, 8, 16])
def test_gray_adjacent_points_differ_in_one_bit(order):
    c = make_constellation(order)
    for k in range(order):
        b0 = indices_to_bits([k], c)
        b1 = indices_to_bits([(k + 1) % order], c)
        assert np.sum(b0 != b1) == 1


def test_bits_framing_error():
    with pytest.raises(FramingError):
        bits_to_indices([0, 1, 1], make_constellation(4))


def test_count_bit_errors_matches_bit_level_count():
    c = make_constellation(8)
    rng = np.random.default_rng(3)
    a = rng.integers(8, size=500)
    b = rng.integers(8, size=500)
    expected = np.sum(indices_to_bits(a, c) != indices_to_bits(b, c))
    assert count_bit_errors(a, b, c) == expected
