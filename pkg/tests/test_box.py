from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from boxcommit.box import (
    BoxInstance, Correlation, LocalDecomposition, LocalTerm, correlated_bit, correlation_kind,
    hat_matrix, is_independent, marginal_alice, marginal_bob, mixture, parse_box, perfectly_correlated_pairs,
    pr_box, preset, preset_from_spec, product, random_box, redundant_inputs, restrict_alice, serialize_box,
    shared_bit, simulate_from_decomposition, to_fraction, use_box, validate,
)
from boxcommit.errors import (
    BoxSyntaxError, DoubleUse, InvalidInput, NegativeProbability, NonBinaryOutput, NotNormalized,
    SignalingToAlice, SignalingToBob,
)

H = F(1, 2)


def test_to_fraction_reads_decimals_exactly():
    assert to_fraction(0.1) == F(1, 10)
    assert to_fraction("3/8") == F(3, 8)
    assert to_fraction(" 0.25 ") == F(1, 4)


def test_pr_box_entries():
    box = pr_box()
    for u in (0, 1):
        for v in (0, 1):
            for x in (0, 1):
                for y in (0, 1):
                    assert box.w(x, y, u, v) == (H if x ^ y == u & v else 0)


def test_correlated_bit_entries():
    box = correlated_bit("0.1")
    assert box.table[0][0] == (F(9, 20), F(1, 20), F(1, 20), F(9, 20))


def test_dict_form_equals_nested_form():
    entries = {(0, 0, 0, 0): H, (0, 0, 1, 1): H}
    assert validate(entries).table == shared_bit(1, 1).table


@pytest.mark.parametrize("table, err", [
    ([[(H, H, H, 0)]], NotNormalized),
    ([[(F(3, 2), 0, 0, F(-1, 2))]], NegativeProbability),
    ([[(H, 0, 0, H), (0, H, H, 0)], [(1, 0, 0, 0), (1, 0, 0, 0)]], SignalingToBob),
    ([[(1, 0, 0, 0), (0, 0, 1, 0)]], SignalingToAlice),
    ([[(1, 0, 0)]], NonBinaryOutput),
])
def test_validation_errors(table, err):
    with pytest.raises(err):
        validate(table)


def test_marginals_and_hat_matrix():
    box = correlated_bit(F(1, 10))
    assert marginal_alice(box, 0) == (H, H)
    assert marginal_bob(box, 0) == (H, H)
    hat = hat_matrix(box)
    # row (x=0, u=0): Bob's only input, y=0 with prob 9/10
    assert hat.row(0, 0) == (F(9, 10), F(1, 10))


def test_correlation_kinds():
    assert correlation_kind(shared_bit(), 0, 0) is Correlation.PERFECTLY_CORRELATED
    assert correlation_kind(shared_bit(anti=True), 1, 1) is Correlation.PERFECTLY_ANTICORRELATED
    assert correlation_kind(correlated_bit(F(1, 10)), 0, 0) is Correlation.NEITHER
    assert perfectly_correlated_pairs(pr_box()) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_redundant_and_independent():
    assert redundant_inputs(shared_bit()) == {0, 1}
    assert redundant_inputs(pr_box()) == set()
    assert is_independent(product([(H, H)], [(1, 0)]))
    assert not is_independent(pr_box())
    assert restrict_alice(pr_box(), [1]).table == (pr_box().table[1],)


def test_mixture_of_shared_bits_is_valid():
    box = mixture([(F(1, 3), shared_bit()), (F(2, 3), shared_bit(anti=True))])
    assert box.w(0, 0, 0, 0) == F(1, 6)


def test_presets_by_name():
    assert preset("pr_box") == pr_box()
    assert preset_from_spec("correlated_bit_0.1") == correlated_bit(F(1, 10))
    assert preset_from_spec("anti_shared_bit") == shared_bit(anti=True)


def test_decomposition_reproduces_shared_bit():
    zero = ((F(1), F(0)),) * 2
    one = ((F(0), F(1)),) * 2
    dec = LocalDecomposition((LocalTerm(H, zero, zero), LocalTerm(H, one, one)))
    assert dec.is_valid() and dec.reproduces(shared_bit())
    assert not dec.reproduces(pr_box())


def test_shared_randomness_simulation_matches_shared_bit():
    zero = tuple((F(1), F(0)) for _ in range(2))
    one = tuple((F(0), F(1)) for _ in range(2))
    dec = LocalDecomposition((LocalTerm(H, zero, zero), LocalTerm(H, one, one)))
    rng = np.random.default_rng(3)
    for _ in range(50):
        alice, bob = simulate_from_decomposition(dec, rng)
        assert alice(1) == bob(0)


def test_use_box_double_use_and_bad_input():
    inst = BoxInstance(pr_box())
    rng = np.random.default_rng(0)
    use_box(inst, "alice", 0, rng)
    with pytest.raises(DoubleUse):
        use_box(inst, "alice", 1, rng)
    with pytest.raises(InvalidInput):
        use_box(inst, "bob", 2, rng)
    assert len(inst.usage_log) == 1


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_pr_box_outputs_always_satisfy_relation(seed, alice_first):
    rng = np.random.default_rng(seed)
    for _ in range(8):
        inst = BoxInstance(pr_box())
        u, v = (int(t) for t in rng.integers(0, 2, 2))
        if alice_first:
            x = use_box(inst, "alice", u, rng)
            y = use_box(inst, "bob", v, rng)
        else:
            y = use_box(inst, "bob", v, rng)
            x = use_box(inst, "alice", u, rng)
        assert x ^ y == u & v


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_random_boxes_validate_and_roundtrip(seed, nu, nv):
    box = random_box(np.random.default_rng(seed), nu, nv, 16)
    assert validate(box.table) == box
    assert parse_box(serialize_box(box)) == box


def test_parse_box_comments_and_errors():
    text = "# a comment\nbox 1 1  # header\n0 0 : 1/2 0 0 1/2\n"
    assert parse_box(text) == shared_bit(1, 1)
    with pytest.raises(NonBinaryOutput):
        parse_box("box 1 1 3\n0 0 : 1 0 0 0\n")
    with pytest.raises(NonBinaryOutput):
        parse_box("box 1 1\n0 0 : 1 0 0 0 0 0 0 0 0\n")
    with pytest.raises(BoxSyntaxError):
        parse_box("box 1 1\n0 0 1 0 0 0\n")
    with pytest.raises(BoxSyntaxError):
        parse_box("box 2 1\n0 0 : 1 0 0 0\n")
    with pytest.raises(BoxSyntaxError):
        parse_box("")
