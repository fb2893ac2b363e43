from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxcommit.box import correlated_bit, pr_box, product, shared_bit
from boxcommit.codes import LinearCode, repetition_code, syndrome
from boxcommit.errors import DoubleUse, InfeasibleAtThisN, InvalidParameter, ProtocolStateError
from boxcommit.hashing import HashSeed, ext
from boxcommit.protocol import (
    OpenMessageI, OpenMessageII, ProtocolIParams, audit_phase, auto_security_parameter, fresh_instances,
    honest_session, run_commit_1, run_commit_2, run_open_1, run_open_2, schedule_protocol1, schedule_protocol2,
    submit_opening, verify_open_1, verify_open_2,
)
from boxcommit.rng import stream

from helpers import desk1, desk2

CB = correlated_bit(F(1, 10))


def test_security_parameter():
    assert auto_security_parameter(4096) == 256
    assert auto_security_parameter(64) == 16
    assert auto_security_parameter(12) == 6  # 6^3 = 216 >= 144 > 125


def test_schedule1_auto_at_4096_reports_partial_values():
    with pytest.raises(InfeasibleAtThisN) as exc:
        schedule_protocol1(CB, (0, 0), 4096)
    p = exc.value.partial
    assert p["k"] == 256 and p["lambda"] == F(1, 4) and p["epsilon"] == F(1, 160)


def test_schedule1_auto_at_64_is_infeasible():
    with pytest.raises(InfeasibleAtThisN):
        schedule_protocol1(CB, (0, 0), 64)


def test_schedule1_desk_warnings():
    p = schedule_protocol1(CB, (0, 0), 16, {"k": 4, "d": 9, "l": 2}, rng=stream(0, 1))
    assert p.mode == "desk" and p.k == 4 and p.l == 2 and p.code.d >= 9
    assert any("ceil(n^(2/3))" in w for w in p.warnings)
    assert any("gamma n" in w for w in p.warnings)


def test_schedule1_rejects_condition1_failure_unless_forced():
    with pytest.raises(InvalidParameter):
        schedule_protocol1(pr_box(), (0, 0), 12, {"k": 2, "d": 5, "l": 2, "dim": 1})
    p = schedule_protocol1(pr_box(), (0, 0), 12, {"k": 2, "d": 5, "l": 2, "dim": 1}, force=True)
    assert "not an extreme row" in p.warnings[0]


def test_schedule2_k2_formula_and_infeasibility():
    p = schedule_protocol2(pr_box(), 0, 1, 16, {"k1": 2, "k2": 4, "d": 11}, rng=stream(0, 2))
    assert p.p0 == F(1, 2) and p.lam == F(1, 16)
    assert any("k2=4 differs" in w for w in p.warnings)
    p = schedule_protocol2(pr_box(), 0, 1, 12, {"k1": 3, "d": 5}, rng=stream(0, 2))
    assert p.k2 == 18  # 6 k1 for p0 = 1/2
    with pytest.raises(InfeasibleAtThisN) as exc:
        schedule_protocol2(pr_box(), 0, 1, 4096)
    assert exc.value.partial["k1"] == 256 and exc.value.partial["k2"] == 1536
    assert exc.value.partial["d_required"] == 3329


def test_commit_message_is_consistent():
    p = desk1()
    alice, bob, tr = run_commit_1((1, 0), p, fresh_instances(CB, 12), stream(1))
    msg = tr.commit
    x = alice.outputs
    assert msg.syn == tuple(syndrome(p.code, x).tolist())
    assert msg.c == tuple(a ^ b for a, b in zip((1, 0), ext(msg.seed, x)))
    assert len(tr.usages) == 24 and all(u.phase == "commit" for u in tr.usages)
    assert tr.verdict is None


def test_zero_seed_makes_pad_vanish():
    seed = HashSeed.from_bits(12, 2, "0" * 13)
    assert ext(seed, "101101010101").tolist() == [0, 0]


def test_same_master_seed_same_transcript():
    p = desk1()
    a = honest_session(CB, p, (0, 1), stream(7))[3]
    b = honest_session(CB, p, (0, 1), stream(7))[3]
    assert a.events() == b.events()
    c = honest_session(CB, p, (0, 1), stream(8))[3]
    assert a.events() != c.events()


def test_honest_acceptance_protocol1():
    p = desk1()
    ok = sum(honest_session(CB, p, (1, 1), stream(11, i))[0].accepted for i in range(300))
    assert ok / 300 >= 0.9


def test_honest_acceptance_protocol2():
    p = desk2()
    ok = sum(honest_session(pr_box(), p, (1, 0), stream(12, i))[0].b == (1, 0) for i in range(300))
    assert ok / 300 >= 0.9


def test_one_bit_flip_fails_syndrome():
    p = schedule_protocol1(CB, (0, 0), 12, {"k": 2, "d": 12, "l": 1, "code": repetition_code(12)})
    alice, bob, tr = run_commit_1((1,), p, fresh_instances(CB, 12), stream(3))
    x = list(alice.outputs)
    x[4] ^= 1
    v = submit_opening(alice, bob, OpenMessageI(tuple(x), (1,)))
    assert not v.accepted and v.reason == "syndrome"


def test_zero_probability_letter_rejected():
    # Alice's output is always 0; opening with a 1 anywhere must fail
    box = product([(F(1), F(0))], [(F(1, 2), F(1, 2))])
    code = LinearCode(4, np.zeros((0, 4)))
    p = ProtocolIParams(4, 1, F(1, 2), F(0), F(1), 0.0, (0, 0), code, 1)
    alice, bob, tr = run_commit_1((0,), p, fresh_instances(box, 4), stream(4))
    x = (1, 0, 0, 0)
    b = tuple(int(c ^ e) for c, e in zip(bob.commit.c, ext(bob.commit.seed, x)))
    v = verify_open_1(p, box, bob, OpenMessageI(x, b))
    assert not v.accepted and v.reason in ("cond_typical", "typical")


def test_wrong_claim_fails_hash_check():
    p = desk1()
    alice, bob, _ = run_commit_1((1, 0), p, fresh_instances(CB, 12), stream(5))
    v = submit_opening(alice, bob, OpenMessageI(tuple(alice.outputs), (0, 0)))
    assert v.reason == "hash"


def test_protocol2_coset_shift_rejected():
    p = desk2()
    alice, bob, _ = run_commit_2((0, 1), p, fresh_instances(pr_box(), 12), stream(6))
    from boxcommit.codes import generator_matrix
    cw = generator_matrix(p.code)[0]
    x = tuple(int(a ^ c) for a, c in zip(alice.outputs, cw))
    ub = tuple(0 if u == p.u0 else 1 for u in alice.inputs)
    v = verify_open_2(p, pr_box(), bob, OpenMessageII(ub, x, alice.b))
    assert not v.accepted and v.reason == "cond_typical"


def test_protocol2_complementary_inputs_rejected():
    p = desk2()
    alice, bob, _ = run_commit_2((0, 1), p, fresh_instances(pr_box(), 12), stream(6))
    ub = tuple(1 if u == p.u0 else 0 for u in alice.inputs)
    v = verify_open_2(p, pr_box(), bob, OpenMessageII(ub, tuple(alice.outputs), alice.b))
    assert not v.accepted and v.reason == "syndrome"


def test_session_state_errors():
    p = desk1()
    boxes = fresh_instances(CB, 12)
    alice, bob, _ = run_commit_1((0, 0), p, boxes, stream(1))
    with pytest.raises(ProtocolStateError):
        run_commit_1((0, 0), p, boxes, stream(1))
    run_open_1(alice, bob)
    with pytest.raises(ProtocolStateError):
        run_open_1(alice, bob)
    with pytest.raises(InvalidParameter):
        run_commit_1((0,), p, fresh_instances(CB, 12), stream(1))


def test_phase_safety():
    p = desk2()
    _, _, _, tr = honest_session(pr_box(), p, (0, 0), stream(9))
    assert audit_phase(tr) == []
    boxes = fresh_instances(pr_box(), 12)
    alice, bob, tr = run_commit_2((0, 0), p, boxes, stream(9), withheld={3})
    with pytest.raises(ProtocolStateError):
        run_open_2(alice, bob)
    from boxcommit.box import use_box
    use_box(boxes[3], "alice", alice.committed[0][3], alice.box_rng, phase="open")
    tr.record_usage(3, boxes[3])
    ub = tuple(0 if u == p.u0 else 1 for u in alice.committed[0])
    v = submit_opening(alice, bob, OpenMessageII(ub, alice.committed[1], alice.b), referee=True)
    assert v.reason == "phase" and len(audit_phase(tr)) == 1


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_transcript_invariants(seed, protocol):
    box = CB if protocol == 1 else pr_box()
    p = desk1() if protocol == 1 else desk2()
    verdict, alice, bob, tr = honest_session(box, p, (1, 0), stream(seed))
    kinds = [e[0] for e in tr.events()]
    assert kinds.index("commit") < kinds.index("open") < kinds.index("verdict")
    # the verifier is a pure function of the transcript and Bob's view
    verify = verify_open_1 if protocol == 1 else verify_open_2
    assert verify(p, box, bob, tr.opening) == verdict
    if verdict.accepted:
        hashed = tr.opening.x if protocol == 1 else tr.opening.u
        assert tuple(int(a ^ b) for a, b in zip(tr.commit.c, ext(tr.commit.seed, hashed))) == verdict.b
