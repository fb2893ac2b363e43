import itertools
import time
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from boxcommit.box import correlated_bit, hat_matrix, mixture, pr_box, product, random_box, shared_bit, validate
from boxcommit.classify import (
    LONE_ROW_MARGIN, Cond3, ProtocolI, ProtocolII, Trivial, check_condition1, check_condition3, classify,
    extremality, is_local, min_l1_to_hull, reduce_box, theorem1_trivial, verify_certificate,
)

GAMMA_01 = 0.4689955935892812  # binary entropy of 0.1, computed independently below


def test_gamma_constant():
    import math
    assert abs(GAMMA_01 - (-0.1 * math.log2(0.1) - 0.9 * math.log2(0.9))) < 1e-15


def test_pr_box_is_protocol_two_cond3():
    res = classify(pr_box())
    v = res.verdict
    assert isinstance(v, ProtocolII) and isinstance(v.variant, Cond3)
    assert v.delta == 1 and {v.u0, v.u1} == {0, 1}
    assert verify_certificate(pr_box(), res)


def test_correlated_bit_is_protocol_one():
    v = classify(correlated_bit(F(1, 10))).verdict
    assert isinstance(v, ProtocolI)
    assert v.a == (0, 0) and v.delta == F(8, 5)
    assert abs(v.gamma - GAMMA_01) < 1e-12


@pytest.mark.parametrize("anti", [False, True])
def test_shared_bit_is_trivial_with_two_terms(anti):
    box = shared_bit(anti=anti)
    v = classify(box).verdict
    assert isinstance(v, Trivial) and v.reason == "revealing"
    assert len(v.decomposition.terms) == 2 and v.decomposition.reproduces(box)
    dec, u0, v0 = theorem1_trivial(box)
    # each party's input reveals the shared index deterministically
    for t in dec.terms:
        assert t.alice[u0][0] in (0, 1) and t.bob[v0][0] in (0, 1)


def test_product_box_is_trivial_independent():
    box = product([(F(1, 3), F(2, 3)), (F(1, 2), F(1, 2))], [(F(1, 4), F(3, 4))])
    v = classify(box).verdict
    assert isinstance(v, Trivial) and v.reason == "independent"


def _l1_hull_reference(target, others):
    """L1 distance to conv(others) by a float LP: min sum(t) with -t <= target - sum(w_i o_i) <= t."""
    k, d = len(others), len(target)
    O = np.array(others, dtype=float).T
    c = np.r_[np.zeros(k), np.ones(d)]
    A_ub = np.block([[O, -np.eye(d)], [-O, -np.eye(d)]])
    tgt = np.array(target, dtype=float)
    b_ub = np.r_[tgt, -tgt]
    A_eq = np.r_[np.ones(k), np.zeros(d)][None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1], bounds=[(0, None)] * (k + d), method="highs")
    return res.fun


@given(st.integers(0, 2**32 - 1))
def test_hull_distance_matches_reference(seed):
    rng = np.random.default_rng(seed)
    pts = [tuple(F(int(a), 8) for a in rng.multinomial(8, [0.25] * 4)) for _ in range(4)]
    dist, weights = min_l1_to_hull(pts[0], pts[1:])
    assert abs(float(dist) - _l1_hull_reference(pts[0], pts[1:])) < 1e-9
    assert sum(weights) == 1 and all(w >= 0 for w in weights)
    mix = [sum(w * p[i] for w, p in zip(weights, pts[1:])) for i in range(4)]
    assert sum(abs(a - b) for a, b in zip(mix, pts[0])) == dist


def test_lone_row_margin():
    rep = extremality(hat_matrix(validate([[(1, 0, 0, 0)]])))
    assert rep.margin((0, 0)) == LONE_ROW_MARGIN


def test_reduction_removes_duplicate_input():
    reduced, trace, kept = reduce_box(shared_bit())
    assert reduced.n_alice == 1 and len(trace) == 1 and kept == (0,)


def test_condition_checks_on_fixtures():
    assert check_condition1(correlated_bit(F(1, 10))) is not None
    assert check_condition1(pr_box()) is None
    assert check_condition3(pr_box()) is not None


def _is_local_reference(box):
    """Float feasibility LP over deterministic strategy pairs."""
    nu, nv = box.n_alice, box.n_bob
    pairs = list(itertools.product(itertools.product((0, 1), repeat=nu), itertools.product((0, 1), repeat=nv)))
    A, b = [], []
    for u in range(nu):
        for v in range(nv):
            for x in (0, 1):
                for y in (0, 1):
                    A.append([float(sa[u] == x and sb[v] == y) for sa, sb in pairs])
                    b.append(float(box.w(x, y, u, v)))
    res = linprog(np.zeros(len(pairs)), A_eq=A, b_eq=b, bounds=[(0, None)] * len(pairs), method="highs")
    return res.status == 0


def test_is_local_fixtures():
    assert is_local(pr_box()) is None
    dec = is_local(shared_bit())
    assert dec is not None and dec.reproduces(shared_bit())
    # PR box mixed with enough white noise becomes local (threshold 1/2)
    noise = validate([[(F(1, 4),) * 4] * 2] * 2)
    assert is_local(mixture([(F(1, 2), pr_box()), (F(1, 2), noise)])) is not None
    assert is_local(mixture([(F(5, 8), pr_box()), (F(3, 8), noise)])) is None


@given(st.integers(0, 2**32 - 1))
def test_is_local_matches_reference(seed):
    box = random_box(np.random.default_rng(seed), 2, 2, 16)
    dec = is_local(box)
    assert (dec is not None) == _is_local_reference(box)
    if dec is not None:
        assert dec.reproduces(box)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_classification_sound_directions(seed, nu, nv):
    box = random_box(np.random.default_rng(seed), nu, nv, 8)
    res = classify(box)
    assert verify_certificate(box, res)
    if res.local_model is not None:
        assert res.local_model.is_valid() and res.local_model.reproduces(box)
    if isinstance(res.verdict, Trivial):
        assert res.local_model is not None
    if is_local(box) is None:
        assert isinstance(res.verdict, (ProtocolI, ProtocolII))


def test_classification_is_fast():
    for box in (pr_box(), correlated_bit(F(1, 10)), shared_bit()):
        t = time.perf_counter()
        classify(box)
        assert time.perf_counter() - t < 1.0
