import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncclab import correction
from ncclab.correction import AffineCodebook, ExplicitCodebook
from ncclab.errors import EmptyCodebook, InputError


def test_elias_gamma_frozen():
    assert [correction.elias_gamma(x) for x in (1, 2, 3, 5, 8)] == ["1", "010", "011", "00101", "0001000"]
    for x in range(1, 200):
        assert correction.read_elias_gamma(correction.elias_gamma(x) + "11", 0) == (x, 2 * x.bit_length() - 1)


def test_block_code_shapes():
    # zero block: flag, gamma(1)
    assert correction.encode_block(0, 8) == "11"
    # one error at position 2 of 8: flag, gamma(2), 3-bit position
    assert correction.encode_block(0b00100000, 8) == "1" + "010" + "010"
    # dense blocks fall back to raw
    assert correction.encode_block(0xFF, 8) == "0" + "11111111"


@given(st.integers(1, 10), st.data())
def test_block_code_round_trip(m, data):
    e = data.draw(st.integers(0, (1 << m) - 1))
    code = correction.encode_block(e, m)
    assert len(code) == correction.block_cost(e, m)
    assert correction.decode_block(code + "0101", m) == (e, len(code))


@pytest.mark.parametrize("m", range(1, 7))
def test_block_code_prefix_free_all_pairs(m):
    words = [correction.encode_block(e, m) for e in range(1 << m)]
    assert len(set(words)) == len(words)
    for a, b in itertools.permutations(words, 2):
        assert not b.startswith(a)
    assert correction.is_prefix_free(words)
    assert sorted(set(words)) == correction.all_short_messages(m)


def test_member_needs_no_correction():
    book = ExplicitCodebook([(1, 2), (3, 0)], 2, 2)
    res = correction.correction_protocol(book, (1, 2))
    assert res.w == (1, 2) and res.gamma == (0, 0)
    assert all(b == correction.encode_block(0, 2) for b in res.beta)


def test_two_codeword_case():
    book = ExplicitCodebook([(0, 0), (3, 3)], 2, 2)
    res = correction.correction_protocol(book, (1, 2))
    assert res.w == (0, 0) and res.gamma == (1, 2)
    assert tuple(a ^ g for a, g in zip((1, 2), res.gamma)) in book


def test_empty_codebook():
    with pytest.raises(EmptyCodebook):
        ExplicitCodebook([], 2, 2).best_correction((0, 0))


def test_bad_codeword_width():
    with pytest.raises(InputError):
        ExplicitCodebook([(4, 0)], 2, 2)


def brute_members(book, m, ell):
    return [w for w in itertools.product(range(1 << m), repeat=ell) if w in book]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_affine_dp_matches_scan(seed):
    rng = np.random.default_rng(seed)
    m, ell = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    codim = int(rng.integers(1, m * ell + 1))
    book = AffineCodebook.random(rng, m, ell, codim)
    members = brute_members(book, m, ell)
    assert len(members) == 2 ** (m * ell - codim)
    scan = ExplicitCodebook(members, m, ell)
    for _ in range(6):
        alpha = tuple(int(a) for a in rng.integers(0, 1 << m, size=ell))
        assert book.best_correction(alpha) == scan.best_correction(alpha)


def test_affine_rank_check():
    with pytest.raises(InputError):
        AffineCodebook(np.array([[1, 0], [1, 0]]), np.array([0, 0]), 1, 2)


def test_protocol_lands_in_large_codebook():
    rng = np.random.default_rng(3)
    book = AffineCodebook.random(rng, 8, 8, 4)
    assert book.log2_size == 60
    for _ in range(20):
        alpha = tuple(int(a) for a in rng.integers(0, 256, size=8))
        res = correction.correction_protocol(book, alpha)
        assert tuple(a ^ g for a, g in zip(alpha, res.gamma)) in book
        assert [correction.player_decode(b, 8) for b in res.beta] == list(res.gamma)


def test_length_target_grows_with_eps():
    assert correction.eq1_value(8, 8, 1 / 16) < correction.eq1_value(8, 8, 1 / 4)
