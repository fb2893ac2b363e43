from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from boxcommit.codes import (
    DistanceStatus, LinearCode, all_strings, as_bits, bits_to_int, code_from_generator, codewords,
    generator_matrix, gf2_rank, int_to_bits, min_distance, parse_code, random_full_rank_H, repetition_code,
    sample_code, serialize_code, syndrome,
)
from boxcommit.errors import DimensionTooLarge, InvalidParameter, LengthMismatch, RetriesExhausted

HAMMING_H = ["1010101", "0110011", "0001111"]


def _brute_distance(H: np.ndarray) -> int:
    n = H.shape[1]
    xs = all_strings(n)
    zero = ((xs.astype(int) @ H.T.astype(int)) % 2 == 0).all(axis=1)
    weights = xs.sum(axis=1)[zero]
    weights = weights[weights > 0]
    return int(weights.min()) if weights.size else n + 1


def test_hamming_code():
    code = LinearCode(7, as_bits(HAMMING_H))
    assert code.dim == 4 and min_distance(code) == DistanceStatus("exact", 3)
    assert syndrome(code, "0000000").tolist() == [0, 0, 0]
    assert syndrome(code, "1000000").tolist() == [1, 0, 0]


def test_repetition_and_generator_codes():
    assert min_distance(repetition_code(3)).d == 3
    code = code_from_generator(["1100", "0011"])
    assert code.dim == 2 and str(code.distance_status) == "Exact(2)"
    assert str(min_distance(LinearCode(4, np.zeros((0, 4))))) == "Exact(1)"
    # dimension 0: no nonzero codeword, reported as n + 1
    assert min_distance(LinearCode(3, np.eye(3))).d == 4


def test_bit_packing():
    assert bits_to_int("1011") == 11
    assert int_to_bits(11, 4).tolist() == [1, 0, 1, 1]
    assert all_strings(2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    with pytest.raises(LengthMismatch):
        as_bits("101", 4)


@given(st.integers(0, 2**32 - 1))
def test_min_distance_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    r = int(rng.integers(1, n))
    H = random_full_rank_H(n, r, rng)
    code = LinearCode(n, H)
    assert gf2_rank(H) == r
    assert min_distance(code).d == _brute_distance(H)
    G = generator_matrix(code)
    assert G.shape[0] == n - r and not ((G.astype(int) @ H.T.astype(int)) % 2).any()
    assert len(set(codewords(code).tolist())) == 2 ** (n - r)


@given(st.integers(0, 2**32 - 1))
def test_syndrome_is_linear(seed):
    rng = np.random.default_rng(seed)
    code = LinearCode(8, random_full_rank_H(8, 4, rng))
    a, b = rng.integers(0, 2, 8), rng.integers(0, 2, 8)
    assert ((syndrome(code, a) ^ syndrome(code, b)) == syndrome(code, a ^ b)).all()


def test_sample_code_meets_distance():
    code = sample_code(12, F(1, 3), 4, np.random.default_rng(1))
    assert code.dim == 4 and code.d >= 4 and code.distance_status.kind == "exact"


def test_sample_code_gives_up():
    with pytest.raises(RetriesExhausted) as exc:
        sample_code(8, F(1, 2), 8, np.random.default_rng(0), max_retries=50)
    assert exc.value.best_distance <= 4


def test_sample_code_rejects_fractional_dimension():
    with pytest.raises(InvalidParameter):
        sample_code(7, F(1, 2), 2, np.random.default_rng(0))


def test_keep_best_prefers_larger_distance():
    rng = np.random.default_rng(5)
    code = sample_code(12, F(1, 12), 5, rng, keep_best=50)
    assert code.d >= 10


def test_large_dimension_refused():
    with pytest.raises(DimensionTooLarge):
        min_distance(LinearCode(30, np.zeros((1, 30))))


def test_code_file_roundtrip():
    code = LinearCode(7, as_bits(HAMMING_H))
    back = parse_code(serialize_code(code))
    assert back == code and back.d == 3
    with pytest.raises(InvalidParameter):
        parse_code("code 3 1\n110\n")
