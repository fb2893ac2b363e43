"""Protocol I and Protocol II as explicit commit/open state machines.

Protocol I: honest Alice feeds a fixed input ``u_a`` to every box, hashes her
outputs into a one-time pad for ``b`` and sends the syndrome of her outputs.
Protocol II: Alice feeds uniformly random inputs from ``{u0, u1}``, hashes
the input string and sends the syndromes of both inputs and outputs.
In both, Bob feeds uniformly random inputs and at opening time runs, in
order: syndrome check(s), hash equation, conditional typicality of his own
``(y, v)`` given Alice's claimed ``(x, u)``, and typicality of Alice's claim.

Input strings for Protocol II are hashed and syndromed as bit strings with
bit 0 for ``u0`` and bit 1 for ``u1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .box import Box, BoxInstance, hat_matrix, use_box
from .classify import ProtocolII, classify, extremality, reduce_box
from .codes import LinearCode, code_dimension, sample_code, syndrome
from .errors import InfeasibleAtThisN, InvalidParameter, ProtocolStateError, RetriesExhausted
from .hashing import HashSeed, ext
from .infostats import BoundValue, evaluate_bound, gamma_of_box, is_cond_typical, is_typical

# column subsets above this size make bounded-weight distance checks impractical
MAX_DISTANCE_SEARCH = 10**7


def auto_security_parameter(n: int) -> int:
    """``ceil(n^(2/3))`` computed in integers."""
    k = max(1, round(n ** (2 / 3)))
    while k**3 < n * n:
        k += 1
    while k > 1 and (k - 1) ** 3 >= n * n:
        k -= 1
    return k


# -- parameters ------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolIParams:
    n: int
    k: int
    epsilon: Fraction
    lam: Fraction
    delta: Fraction
    gamma: float
    a: tuple[int, int]
    code: LinearCode
    l: int
    mode: str = "desk"
    warnings: tuple[str, ...] = ()

    protocol = 1

    @property
    def u_a(self) -> int:
        return self.a[1]


@dataclass(frozen=True)
class ProtocolIIParams:
    n: int
    k1: int
    k2: Fraction
    epsilon: Fraction
    lam: Fraction
    delta: Fraction
    p0: Fraction
    code: LinearCode
    l: int
    u0: int
    u1: int
    mode: str = "desk"
    warnings: tuple[str, ...] = ()

    protocol = 2


def _frac(v) -> Fraction:
    return Fraction(str(v)) if isinstance(v, float) else Fraction(v)


def _distance_search_size(n: int, d: int) -> int:
    return sum(math.comb(n, w) for w in range(1, d))


def _pick_code(n: int, d: int, dim: int | None, rng, keep_best: int, partial: dict) -> LinearCode:
    """Code of the given (or the largest workable) dimension with distance >= d."""
    if dim is not None:
        dims = [dim]
    else:
        dims = list(range(max(0, n - d + 1), -1, -1))
    for k in dims:
        if k > 24 and _distance_search_size(n, d) > MAX_DISTANCE_SEARCH:
            continue
        try:
            return sample_code(n, Fraction(k, n), d, rng, max_retries=200, keep_best=keep_best)
        except RetriesExhausted:
            if dim is not None:
                raise InfeasibleAtThisN(f"no [{n},{k}] code with distance >= {d} found", partial) from None
    raise InfeasibleAtThisN(f"no verifiable code with distance >= {d} at n={n}", partial)


def _reduced_margin(box: Box, keys) -> Fraction:
    reduced, _, kept = reduce_box(box)
    back = {orig: i for i, orig in enumerate(kept)}
    rep = extremality(hat_matrix(reduced))
    margins = []
    for x, u in keys:
        if u not in back or (x, back[u]) not in rep.rows:
            return Fraction(0)
        margins.append(rep.margin((x, back[u])))
    return min(margins)


def schedule_protocol1(box: Box, a: tuple[int, int], n: int, overrides: dict | None = None,
                       rng=None, delta=None, gamma=None, force: bool = False) -> ProtocolIParams:
    """Parameter schedule for Protocol I.

    Without overrides (auto mode) every quantity follows the asymptotic
    recipe and :class:`InfeasibleAtThisN` is raised when the key length or the
    code cannot be realised. Any override switches to desk mode: the given
    values are used as-is and each violated constraint becomes a warning.
    Recognised overrides: ``k, epsilon, d, l, dim, code, keep_best``.
    ``force=True`` schedules even when the row is not extreme with gamma > 0 (for
    negative controls); the failure is then listed among the warnings.
    """
    overrides = dict(overrides or {})
    rng = rng if rng is not None else np.random.default_rng(0)
    x_a, u_a = a
    P = (box.alice_marginal(0, u_a), box.alice_marginal(1, u_a))
    lam = min(P) / 2
    delta = _frac(delta) if delta is not None else _reduced_margin(box, [a])
    gamma = float(gamma) if gamma is not None else gamma_of_box(box, u_a)
    warnings = []
    if delta <= 0 or gamma <= 0:
        msg = f"row {a} is not an extreme row with gamma > 0 (delta={delta}, gamma={gamma:.6g})"
        if not force:
            raise InvalidParameter(msg)
        warnings.append(msg)
    mode = "desk" if overrides or force else "auto"
    k = int(overrides.get("k", auto_security_parameter(n)))
    eps_formula = lam * delta * k / (4 * n)
    epsilon = _frac(overrides["epsilon"]) if "epsilon" in overrides else eps_formula
    partial = {"n": n, "k": k, "lambda": lam, "delta": delta, "gamma": gamma, "epsilon": epsilon}

    if mode == "auto":
        l_max = gamma * n - 4 * math.sqrt(n * k) - 3 * k
        partial["l_upper"] = l_max
        if l_max <= 0:
            raise InfeasibleAtThisN(f"l <= {l_max:.3f} even at rate 1 (n={n})", partial)
        d = 2 * k + 1
        code = _pick_code(n, d, None, rng, 1, partial)
        R = code.rate
        l = math.floor(gamma * n - n * (1 - R) - 4 * math.sqrt(n * k) - 3 * k)
        if R <= 1 - gamma or l <= 0:
            partial["rate"] = R
            raise InfeasibleAtThisN(f"best code has rate {R}, giving l={l}", partial)
        return ProtocolIParams(n, k, epsilon, lam, delta, gamma, a, code, l, mode, ())

    d = int(overrides.get("d", 2 * k + 1))
    code = overrides.get("code")
    if code is None:
        code = _pick_code(n, d, overrides.get("dim"), rng, int(overrides.get("keep_best", 1)), partial)
    R = code.rate
    l_formula = gamma * n - n * (1 - float(R)) - 4 * math.sqrt(n * k) - 3 * k
    l = int(overrides.get("l", max(1, math.floor(l_formula))))
    if k != auto_security_parameter(n):
        warnings.append(f"k={k} differs from ceil(n^(2/3))={auto_security_parameter(n)}")
    if epsilon != eps_formula:
        warnings.append(f"epsilon={epsilon} differs from lambda*delta*k/(4n)={eps_formula}")
    if not R > 1 - gamma:
        warnings.append(f"rate {R} is not above 1-gamma={1 - gamma:.6f}")
    if code.d is None or not code.d > 2 * k:
        warnings.append(f"code distance {code.d} is not above 2k={2 * k}")
    if code.d is not None and code.d < d:
        warnings.append(f"code distance {code.d} below requested d={d}")
    if l > l_formula:
        warnings.append(f"l={l} exceeds gamma n - n(1-R) - 4 sqrt(nk) - 3k = {l_formula:.3f}")
    return ProtocolIParams(n, k, epsilon, lam, delta, gamma, a, code, l, mode, tuple(warnings))


def _protocol2_delta(box: Box, u0: int, u1: int) -> Fraction:
    res = classify(box)
    v = res.verdict
    if isinstance(v, ProtocolII) and {v.u0, v.u1} == {u0, u1}:
        return v.delta
    reduced, _, kept = reduce_box(box)
    if u0 not in kept or u1 not in kept:
        return Fraction(0)
    rep = extremality(hat_matrix(reduced))
    ms = [rep.margin((x, kept.index(u))) for u in (u0, u1) for x in (0, 1)]
    pos = [m for m in ms if m > 0]
    return min(pos) if pos else Fraction(0)


def schedule_protocol2(box: Box, u0: int, u1: int, n: int, overrides: dict | None = None,
                       rng=None, delta=None, force: bool = False) -> ProtocolIIParams:
    """Parameter schedule for Protocol II; mirror of :func:`schedule_protocol1`.

    Recognised overrides: ``k1, k2, epsilon, d, l, dim, code, keep_best``.
    """
    overrides = dict(overrides or {})
    rng = rng if rng is not None else np.random.default_rng(0)
    if u0 == u1:
        raise InvalidParameter("Protocol II needs two distinct inputs")
    marg = [box.alice_marginal(x, u) for u in (u0, u1) for x in (0, 1)]
    p0 = min(marg)
    if p0 <= 0:
        raise InvalidParameter("Protocol II needs W^A(x|u) > 0 on both inputs")
    lam = min(m / 2 for m in marg) / 4
    delta = _frac(delta) if delta is not None else _protocol2_delta(box, u0, u1)
    warnings = []
    if delta <= 0:
        msg = f"inputs ({u0},{u1}) carry no positive margin"
        if not force:
            raise InvalidParameter(msg)
        warnings.append(msg)
    mode = "desk" if overrides or force else "auto"
    k1 = int(overrides.get("k1", auto_security_parameter(n)))
    k2_formula = Fraction(k1) * (4 * p0 + 1) / (2 * p0 * p0)
    k2 = _frac(overrides["k2"]) if "k2" in overrides else k2_formula
    eps_formula = lam * delta * k1 / (4 * n)
    epsilon = _frac(overrides["epsilon"]) if "epsilon" in overrides else eps_formula
    d_req = math.floor(k1 + 2 * k2) + 1
    partial = {"n": n, "k1": k1, "k2": k2, "p0": p0, "lambda": lam, "delta": delta,
               "epsilon": epsilon, "d_required": d_req}

    if mode == "auto":
        # Singleton: Rn <= n - d + 1, so l = 2Rn - n - 3k1 <= n - 2d + 2 - 3k1
        l_max = n - 2 * d_req + 2 - 3 * k1
        partial["l_upper"] = l_max
        if l_max <= 0:
            raise InfeasibleAtThisN(f"d >= {d_req} leaves l <= {l_max} at n={n}", partial)
        code = _pick_code(n, d_req, None, rng, 1, partial)
        l = n - 2 * (n - code.dim) - 3 * k1
        if l <= 0 or code.dim < n / 2 + 1.5 * k1 + l / 2:
            partial["rate"] = code.rate
            raise InfeasibleAtThisN(f"best code has rate {code.rate}, giving l={l}", partial)
        return ProtocolIIParams(n, k1, k2, epsilon, lam, delta, p0, code, l, u0, u1, mode, ())

    d = int(overrides.get("d", d_req))
    code = overrides.get("code")
    if code is None:
        code = _pick_code(n, d, overrides.get("dim"), rng, int(overrides.get("keep_best", 1)), partial)
    l_formula = n - 2 * (n - code.dim) - 3 * k1
    l = int(overrides.get("l", max(1, l_formula)))
    if k1 != auto_security_parameter(n):
        warnings.append(f"k1={k1} differs from ceil(n^(2/3))={auto_security_parameter(n)}")
    if k2 != k2_formula:
        warnings.append(f"k2={k2} differs from k1(4p0+1)/(2p0^2)={k2_formula}")
    if epsilon != eps_formula:
        warnings.append(f"epsilon={epsilon} differs from lambda*delta*k1/(4n)={eps_formula}")
    if code.d is None or code.d < k1 + 2 * k2 + 1:
        warnings.append(f"code distance {code.d} below k1+2k2+1={k1 + 2 * k2 + 1}")
    if code.d is not None and code.d < d:
        warnings.append(f"code distance {code.d} below requested d={d}")
    if code.dim < Fraction(n, 2) + Fraction(3 * k1, 2) + Fraction(l, 2):
        warnings.append(f"Rn={code.dim} below n/2+3k1/2+l/2={Fraction(n, 2) + Fraction(3 * k1, 2) + Fraction(l, 2)}")
    if l > l_formula:
        warnings.append(f"l={l} exceeds n-2n(1-R)-3k1={l_formula}")
    return ProtocolIIParams(n, k1, k2, epsilon, lam, delta, p0, code, l, u0, u1, mode, tuple(warnings))


# -- messages, transcripts, verdicts -----------------------------------------------------

@dataclass(frozen=True)
class CommitMessageI:
    syn: tuple[int, ...]
    seed: HashSeed
    c: tuple[int, ...]


@dataclass(frozen=True)
class OpenMessageI:
    x: tuple[int, ...]
    b: tuple[int, ...]


@dataclass(frozen=True)
class CommitMessageII:
    syn_u: tuple[int, ...]
    syn_x: tuple[int, ...]
    seed: HashSeed
    c: tuple[int, ...]


@dataclass(frozen=True)
class OpenMessageII:
    u: tuple[int, ...]  # bit i: 0 means u0, 1 means u1
    x: tuple[int, ...]
    b: tuple[int, ...]


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    b: tuple[int, ...] | None
    reason: str  # "accepted" or the first failed check

    CHECKS = ("syndrome", "hash", "cond_typical", "typical", "phase")


@dataclass(frozen=True)
class Usage:
    side: str
    index: int
    input: int
    output: int
    phase: str


@dataclass
class Transcript:
    protocol: int
    usages: list = field(default_factory=list)
    commit: object | None = None
    opening: object | None = None
    verdict: Verdict | None = None

    def record_usage(self, index: int, instance: BoxInstance):
        side, inp, out, phase = instance.usage_log[-1]
        self.usages.append(Usage(side, index, inp, out, phase))

    def events(self) -> list[tuple]:
        out = [("box", u.side, u.index, u.input, u.output, u.phase) for u in self.usages if u.phase == "commit"]
        if self.commit is not None:
            out.append(("commit", self.commit))
        out += [("box", u.side, u.index, u.input, u.output, u.phase) for u in self.usages if u.phase == "open"]
        if self.opening is not None:
            out.append(("open", self.opening))
        if self.verdict is not None:
            out.append(("verdict", self.verdict))
        return out


def audit_phase(transcript: Transcript) -> list[Usage]:
    """Alice's open-phase box usages: zero for honest runs of either protocol."""
    return [u for u in transcript.usages if u.side == "alice" and u.phase == "open"]


# -- party states ---------------------------------------------------------------------

@dataclass
class AliceState:
    params: object
    box: Box
    b: tuple[int, ...]
    inputs: list  # input label per box, None while withheld
    outputs: list  # output per box, None while withheld
    seed: HashSeed
    instances: list
    transcript: Transcript
    rng: np.random.Generator
    committed: tuple | None = None  # strings the commit message was computed from
    box_rng: np.random.Generator | None = None  # stream used for open-phase box draws


@dataclass
class BobState:
    params: object
    box: Box
    v: tuple[int, ...]
    y: tuple[int, ...]
    commit: object
    transcript: Transcript


def _bits(b, l: int) -> tuple[int, ...]:
    if isinstance(b, str):
        b = [int(c) for c in b]
    b = tuple(int(v) for v in b)
    if len(b) != l:
        raise InvalidParameter(f"committed string has {len(b)} bits, params say l={l}")
    return b


def _xor(a, b) -> tuple[int, ...]:
    return tuple(int(i) ^ int(j) for i, j in zip(a, b))


def _split_streams(rng):
    alice, bob, boxes = rng.spawn(3)
    return alice, bob, boxes


def _bob_inputs(box: Box, n: int, bob_rng, bob_rule: Callable | None):
    if bob_rule is None:
        return [int(v) for v in bob_rng.integers(0, box.n_bob, size=n)]
    return [int(bob_rule(i, bob_rng)) for i in range(n)]


def run_commit_1(b, params: ProtocolIParams, boxes, rng, bob_rule=None, seed_rule=None):
    """Commit phase of Protocol I. ``boxes`` is a list of ``n`` fresh instances.

    ``seed_rule(params, box, hashed_bits, other_bits, rng) -> HashSeed`` lets a cheating Alice
    pick her hash seed; honest Alice draws it uniformly.
    """
    n = params.n
    if len(boxes) != n:
        raise InvalidParameter(f"need {n} box instances, got {len(boxes)}")
    if any(inst.used_by_alice or inst.used_by_bob for inst in boxes):
        raise ProtocolStateError("box instances must be fresh")
    b = _bits(b, params.l)
    box = boxes[0].box
    a_rng, b_rng, x_rng = _split_streams(rng)
    tr = Transcript(1)
    v = _bob_inputs(box, n, b_rng, bob_rule)
    x, y = [], []
    for i, inst in enumerate(boxes):
        inst.phase = "commit"
        x.append(use_box(inst, "alice", params.u_a, x_rng))
        tr.record_usage(i, inst)
        y.append(use_box(inst, "bob", v[i], x_rng))
        tr.record_usage(i, inst)
    seed = seed_rule(params, box, tuple(x), None, a_rng) if seed_rule else HashSeed.random(n, params.l, a_rng)
    msg = CommitMessageI(tuple(int(s) for s in syndrome(params.code, x)), seed,
                         _xor(b, ext(seed, x)))
    tr.commit = msg
    alice = AliceState(params, box, b, [params.u_a] * n, x, seed, list(boxes), tr, a_rng, (tuple(x),), x_rng)
    bob = BobState(params, box, tuple(v), tuple(y), msg, tr)
    return alice, bob, tr


def _hat_channel(box: Box, inputs) -> dict:
    hat = hat_matrix(box)
    return {
        key: {col: p for col, p in zip(hat.columns, row)}
        for key, row in hat.rows.items()
        if key[1] in inputs
    }


def verify_open_1(params: ProtocolIParams, box: Box, bob: BobState, opening: OpenMessageI) -> Verdict:
    """Bob's checks for Protocol I, short-circuiting on the first failure."""
    msg = bob.commit
    x = tuple(int(c) for c in opening.x)
    b = tuple(int(c) for c in opening.b)
    if len(x) != params.n or len(b) != params.l:
        return Verdict(False, None, "syndrome")
    if tuple(int(s) for s in syndrome(params.code, x)) != msg.syn:
        return Verdict(False, None, "syndrome")
    if _xor(msg.c, ext(msg.seed, x)) != b:
        return Verdict(False, None, "hash")
    u_a = params.u_a
    W = _hat_channel(box, {u_a})
    if not is_cond_typical(list(zip(bob.y, bob.v)), [(xi, u_a) for xi in x], W, params.epsilon):
        return Verdict(False, None, "cond_typical")
    P = {0: box.alice_marginal(0, u_a), 1: box.alice_marginal(1, u_a)}
    if not is_typical(x, P, params.epsilon):
        return Verdict(False, None, "typical")
    return Verdict(True, b, "accepted")


def submit_opening(alice: AliceState, bob: BobState, opening, referee: bool = False) -> Verdict:
    """Deliver an opening (honest or not) to Bob and record the outcome.

    Bob only sees his own box usages. With ``referee=True`` the verifier also
    sees Alice's, and any open-phase usage by her is rejected with reason
    ``"phase"`` (honest Alice never uses a box after committing).
    """
    tr = bob.transcript
    if tr.commit is None:
        raise ProtocolStateError("open before commit")
    if tr.opening is not None:
        raise ProtocolStateError("session already opened")
    tr.opening = opening
    if referee and audit_phase(tr):
        verdict = Verdict(False, None, "phase")
    elif isinstance(opening, OpenMessageI):
        verdict = verify_open_1(bob.params, bob.box, bob, opening)
    else:
        verdict = verify_open_2(bob.params, bob.box, bob, opening)
    tr.verdict = verdict
    return verdict


def run_open_1(alice: AliceState, bob: BobState) -> Verdict:
    return submit_opening(alice, bob, OpenMessageI(tuple(alice.outputs), alice.b))


def _u_bits(inputs, u0: int, u1: int) -> tuple[int, ...]:
    return tuple(0 if u == u0 else 1 for u in inputs)


def run_commit_2(b, params: ProtocolIIParams, boxes, rng, bob_rule=None, withheld=(), fill_rule=None,
                 seed_rule=None):
    """Commit phase of Protocol II.

    ``withheld`` lists boxes Alice does not touch before committing; for those
    ``fill_rule(i, rng) -> (u, x)`` supplies the values she commits to
    (default: a uniform input and an output drawn from its marginal).
    ``seed_rule`` is as in :func:`run_commit_1`, applied to the input string.
    """
    n = params.n
    if len(boxes) != n:
        raise InvalidParameter(f"need {n} box instances, got {len(boxes)}")
    if any(inst.used_by_alice or inst.used_by_bob for inst in boxes):
        raise ProtocolStateError("box instances must be fresh")
    b = _bits(b, params.l)
    box = boxes[0].box
    a_rng, b_rng, x_rng = _split_streams(rng)
    withheld = set(withheld)
    tr = Transcript(2)
    v = _bob_inputs(box, n, b_rng, bob_rule)
    u_choice = [params.u0 if bit == 0 else params.u1 for bit in a_rng.integers(0, 2, size=n)]
    inputs, outputs, y = [], [], []
    committed_u, committed_x = [], []
    for i, inst in enumerate(boxes):
        inst.phase = "commit"
        if i in withheld:
            inputs.append(None)
            outputs.append(None)
            if fill_rule is None:
                gu = u_choice[i]
                gx = int(a_rng.random() >= float(box.alice_marginal(0, gu)))
            else:
                gu, gx = fill_rule(i, a_rng)
            committed_u.append(gu)
            committed_x.append(gx)
        else:
            out = use_box(inst, "alice", u_choice[i], x_rng)
            tr.record_usage(i, inst)
            inputs.append(u_choice[i])
            outputs.append(out)
            committed_u.append(u_choice[i])
            committed_x.append(out)
        y.append(use_box(inst, "bob", v[i], x_rng))
        tr.record_usage(i, inst)
    ubits = _u_bits(committed_u, params.u0, params.u1)
    seed = seed_rule(params, box, ubits, tuple(committed_x), a_rng) if seed_rule else HashSeed.random(n, params.l, a_rng)
    msg = CommitMessageII(
        tuple(int(s) for s in syndrome(params.code, ubits)),
        tuple(int(s) for s in syndrome(params.code, committed_x)),
        seed,
        _xor(b, ext(seed, ubits)),
    )
    tr.commit = msg
    alice = AliceState(params, box, b, inputs, outputs, seed, list(boxes), tr, a_rng,
                       (tuple(committed_u), tuple(committed_x)), x_rng)
    bob = BobState(params, box, tuple(v), tuple(y), msg, tr)
    return alice, bob, tr


def verify_open_2(params: ProtocolIIParams, box: Box, bob: BobState, opening: OpenMessageII) -> Verdict:
    """Bob's checks for Protocol II, short-circuiting on the first failure."""
    msg = bob.commit
    ub = tuple(int(c) for c in opening.u)
    x = tuple(int(c) for c in opening.x)
    b = tuple(int(c) for c in opening.b)
    if len(ub) != params.n or len(x) != params.n or len(b) != params.l:
        return Verdict(False, None, "syndrome")
    if (tuple(int(s) for s in syndrome(params.code, ub)) != msg.syn_u
            or tuple(int(s) for s in syndrome(params.code, x)) != msg.syn_x):
        return Verdict(False, None, "syndrome")
    if _xor(msg.c, ext(msg.seed, ub)) != b:
        return Verdict(False, None, "hash")
    labels = [params.u0 if bit == 0 else params.u1 for bit in ub]
    W = _hat_channel(box, {params.u0, params.u1})
    claimed = list(zip(x, labels))
    if not is_cond_typical(list(zip(bob.y, bob.v)), claimed, W, params.epsilon):
        return Verdict(False, None, "cond_typical")
    Q = {(xx, u): box.alice_marginal(xx, u) / 2 for u in (params.u0, params.u1) for xx in (0, 1)}
    if not is_typical(claimed, Q, params.epsilon):
        return Verdict(False, None, "typical")
    return Verdict(True, b, "accepted")


def run_open_2(alice: AliceState, bob: BobState) -> Verdict:
    if any(u is None for u in alice.inputs):
        raise ProtocolStateError("honest opening needs every box used at commit time")
    p = alice.params
    return submit_opening(alice, bob, OpenMessageII(_u_bits(alice.inputs, p.u0, p.u1), tuple(alice.outputs), alice.b))


# -- whole sessions ------------------------------------------------------------------------

def fresh_instances(box: Box, n: int) -> list[BoxInstance]:
    return [BoxInstance(box) for _ in range(n)]


def honest_session(box: Box, params, b, rng, bob_rule=None):
    """Commit then open honestly; returns ``(verdict, alice, bob, transcript)``."""
    boxes = fresh_instances(box, params.n)
    if params.protocol == 1:
        alice, bob, tr = run_commit_1(b, params, boxes, rng, bob_rule)
        verdict = run_open_1(alice, bob)
    else:
        alice, bob, tr = run_commit_2(b, params, boxes, rng, bob_rule)
        verdict = run_open_2(alice, bob)
    return verdict, alice, bob, tr


def correctness_bounds(params, box: Box) -> dict:
    """Lower bounds on honest acceptance from the typicality lemmas, with vacuity flags.

    ``combined`` joins the conditional and unconditional typicality bounds by a
    union bound.
    """
    n, eps = params.n, float(params.epsilon)
    x_size = 2 if params.protocol == 1 else 4
    t1 = evaluate_bound("typical1", n=n, eps=eps, x_size=x_size)
    t2 = evaluate_bound("typical2", n=n, eps=eps, x_size=x_size, z_size=2 * box.n_bob)
    value = t1.value + t2.value - 1
    combined = BoundValue("correctness", value, value <= 0, {})
    return {"typical1": t1, "typical2": t2, "combined": combined}
