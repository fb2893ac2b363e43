"""Cheating strategies and exact or Monte Carlo measurements of hiding and binding.

Everything that enumerates strings is limited to ``n <= 16``; strings are
handled packed into integers (leftmost bit most significant) as in
:mod:`boxcommit.codes`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.stats import binomtest

from .box import Box, use_box
from .codes import LinearCode, all_strings, batch_syndromes, bits_to_int, int_to_bits, popcount, syndrome_columns
from .errors import InvalidParameter, TooLargeForExhaustive
from .hashing import HashSeed, ext
from .infostats import evaluate_bound, is_typical
from .protocol import (
    AliceState, BobState, OpenMessageI, OpenMessageII, Verdict, fresh_instances, run_commit_1,
    run_commit_2, run_open_1, run_open_2, submit_opening, verify_open_1, verify_open_2,
)

MAX_N = 16


# -- coset helpers --------------------------------------------------------------------

@lru_cache(maxsize=32)
def _syndrome_table(code: LinearCode) -> np.ndarray:
    if code.n > MAX_N:
        raise TooLargeForExhaustive(f"coset enumeration limited to n <= {MAX_N}")
    return batch_syndromes(code, all_strings(code.n))


def coset(code: LinearCode, syn) -> np.ndarray:
    """All strings (packed) whose syndrome equals ``syn`` (bit tuple or packed int)."""
    s = syn if isinstance(syn, (int, np.integer)) else bits_to_int(syn)
    return np.nonzero(_syndrome_table(code) == s)[0]


def _nearest(members: np.ndarray, target: int, at_least: int = 0):
    """Closest member at Hamming distance ``>= at_least``; ties go to the smallest string."""
    dist = popcount(members ^ target)
    ok = dist >= at_least
    if not ok.any():
        return None, None
    cand = np.flatnonzero(ok)
    best = cand[np.argmin(dist[cand])]  # argmin returns the first, members are sorted
    return int(members[best]), int(dist[best])


def ball_syndromes(code: LinearCode, r: int) -> set[int]:
    """Packed syndromes of all error patterns of weight ``<= r``."""
    cols = syndrome_columns(code)
    out = {0}
    layer = {0}
    for _ in range(r):
        layer = {s ^ int(c) for s in layer for c in cols}
        out |= layer
    return out


def coset_ball_mass(code: LinearCode, r: int, q=0.5, s0: int = 0) -> float:
    """``P[syn(Z) XOR s0 in S_r]`` for ``Z`` with i.i.d. bits of bias ``q``.

    ``S_r`` is the set of syndromes of weight-``<= r`` patterns, so this is the
    probability that ``Z`` lies within distance ``r`` of the coset labelled
    ``s0``. With ``Z = X XOR G`` (true outputs against committed guesses) it
    bounds the acceptance of the delayed-input attack.
    """
    n = code.n
    if n > MAX_N:
        raise TooLargeForExhaustive(f"limited to n <= {MAX_N}")
    good = np.array(sorted(ball_syndromes(code, r)), dtype=np.int64)
    syn = _syndrome_table(code) ^ s0
    hit = np.isin(syn, good)
    w = popcount(np.arange(1 << n, dtype=np.int64))
    q = float(q)
    probs = q**w * (1 - q) ** (n - w)
    return float(probs[hit].sum())


# -- attacks on a committed session -------------------------------------------------------

@dataclass(frozen=True)
class AttackOutcome:
    verdict: Verdict
    diagnostics: dict = field(default_factory=dict)


def _decode(commit_c, seed: HashSeed, s_bits) -> tuple[int, ...]:
    return tuple(int(a) ^ int(b) for a, b in zip(commit_c, ext(seed, s_bits)))


def attack_flip(alice: AliceState, bob: BobState, t: int, rng, in_coset: bool = True) -> AttackOutcome:
    """Open with a string at Hamming distance ``>= t`` from Alice's true outputs.

    In-coset: the closest string with the committed syndrome at distance
    ``>= t``. Off-coset: ``t`` random positions flipped. The claimed bits are
    whatever the hash equation gives for the submitted string (for Protocol II
    the input string is kept, so the claim is unchanged). ``t = 0`` is the
    honest opening.
    """
    p = alice.params
    code, n = p.code, p.n
    x = tuple(int(v) for v in alice.outputs)
    if t == 0:
        verdict = run_open_1(alice, bob) if p.protocol == 1 else run_open_2(alice, bob)
        return AttackOutcome(verdict, {"distance": 0, "caught_by": verdict.reason})
    xi = bits_to_int(x)
    if in_coset:
        xt, dist = _nearest(coset(code, syndromeof(code, x)), xi, t)
        if xt is None:
            verdict = run_open_1(alice, bob) if p.protocol == 1 else run_open_2(alice, bob)
            return AttackOutcome(verdict, {"distance": 0, "caught_by": verdict.reason, "no_candidate": True})
    else:
        pos = rng.choice(n, size=t, replace=False)
        mask = 0
        for i in pos:
            mask |= 1 << (n - 1 - int(i))
        xt, dist = xi ^ mask, t
    x_tilde = tuple(int(v) for v in int_to_bits(xt, n))
    if p.protocol == 1:
        b = _decode(bob.commit.c, bob.commit.seed, x_tilde)
        opening = OpenMessageI(x_tilde, b)
    else:
        ub = tuple(0 if u == p.u0 else 1 for u in alice.inputs)
        opening = OpenMessageII(ub, x_tilde, alice.b)
        b = alice.b
    verdict = submit_opening(alice, bob, opening)
    return AttackOutcome(verdict, {"distance": dist, "caught_by": verdict.reason,
                                   "changed_bits": b != alice.b})


def syndromeof(code: LinearCode, x) -> int:
    return int(batch_syndromes(code, np.asarray([x], dtype=np.uint8))[0])


def attack_delay(box: Box, params, b, m: int, rng, open_rule: str = "nearest",
                 indices=None, fill_rule: Callable | None = None, bob_rule=None) -> AttackOutcome:
    """Protocol II session in which Alice withholds her input on ``m`` boxes.

    At commit the withheld positions are filled by ``fill_rule`` (default: a
    uniform input guess and an output drawn from that input's marginal). At
    open she feeds the guessed inputs to the withheld boxes, then submits:

    ``nearest``  the committed-syndrome string closest to her true outputs
    ``guess``    the committed guesses unchanged
    """
    if params.protocol != 2:
        raise InvalidParameter("attack_delay applies to Protocol II sessions")
    n = params.n
    if indices is None:
        indices = sorted(int(i) for i in rng.choice(n, size=m, replace=False)) if m else []
    withheld = set(indices)
    boxes = fresh_instances(box, n)
    alice, bob, tr = run_commit_2(b, params, boxes, rng, bob_rule, withheld, fill_rule)
    if not withheld:
        verdict = run_open_2(alice, bob)
        return AttackOutcome(verdict, {"withheld": 0, "distance": 0, "caught_by": verdict.reason})
    cu, cx = alice.committed
    actual = list(alice.outputs)
    for i in sorted(withheld):
        actual[i] = use_box(boxes[i], "alice", cu[i], alice.box_rng, phase="open")
        tr.record_usage(i, boxes[i])
    guess_dist = sum(a != g for a, g in zip(actual, cx))
    if open_rule == "nearest":
        xt, dist = _nearest(coset(params.code, bob.commit.syn_x), bits_to_int(actual))
        x_tilde = tuple(int(v) for v in int_to_bits(xt, n))
    elif open_rule == "guess":
        x_tilde, dist = tuple(cx), guess_dist
    else:
        raise InvalidParameter(f"unknown open rule {open_rule!r}")
    ub = tuple(0 if u == params.u0 else 1 for u in cu)
    verdict = submit_opening(alice, bob, OpenMessageII(ub, x_tilde, alice.b))
    return AttackOutcome(verdict, {"withheld": len(withheld), "distance": dist,
                                   "guess_errors": guess_dist, "caught_by": verdict.reason})


def delay_bound(box: Box, params) -> float:
    """Exact Hamming-ball coset mass bounding the full-delay attack.

    True outputs and committed guesses are independent, so their XOR has
    i.i.d. bits with bias ``2 q (1 - q)`` where ``q`` is Alice's marginal
    probability of output 1 (averaged over the two inputs). Acceptance needs
    the true string within ``k1`` of the committed coset.
    """
    q = sum(box.alice_marginal(1, u) for u in (params.u0, params.u1)) / 2
    bias = 2 * q * (1 - q)
    return coset_ball_mass(params.code, params.k1, bias)


def delay_tail_bound(params, m: int) -> dict:
    """Binomial-tail bound for ``m`` delayed boxes, guesses wrong w.p. ``>= p0`` each."""
    p0 = params.p0
    k = min(params.k1, math.floor(m * p0))
    return evaluate_bound("binom_tail", n=m, p=p0, k=k)


def equivocation_search(alice: AliceState, bob: BobState, b0, b1):
    """Two openings of one commitment that Bob accepts with claims ``b0`` and ``b1``.

    Enumerates every string with the committed syndrome(s). Returns
    ``(opening0, opening1)`` or None; None certifies binding for this
    transcript. Uses Bob's actual verifier against his realised view.
    """
    p = alice.params
    if p.n > MAX_N:
        raise TooLargeForExhaustive(f"equivocation search limited to n <= {MAX_N}")
    b0 = tuple(int(v) for v in b0)
    b1 = tuple(int(v) for v in b1)
    found = {}
    msg = bob.commit
    n = p.n
    if p.protocol == 1:
        for s in coset(p.code, msg.syn):
            bits = tuple(int(v) for v in int_to_bits(int(s), n))
            claim = _decode(msg.c, msg.seed, bits)
            if claim in (b0, b1) and claim not in found:
                op = OpenMessageI(bits, claim)
                if verify_open_1(p, bob.box, bob, op).accepted:
                    found[claim] = op
            if b0 in found and b1 in found:
                return found[b0], found[b1]
        return None
    xs = [tuple(int(v) for v in int_to_bits(int(s), n)) for s in coset(p.code, msg.syn_x)]
    for s in coset(p.code, msg.syn_u):
        ub = tuple(int(v) for v in int_to_bits(int(s), n))
        claim = _decode(msg.c, msg.seed, ub)
        if claim not in (b0, b1) or claim in found:
            continue
        for xb in xs:
            op = OpenMessageII(ub, xb, claim)
            if verify_open_2(p, bob.box, bob, op).accepted:
                found[claim] = op
                break
        if b0 in found and b1 in found:
            return found[b0], found[b1]
    return None


# -- hiding --------------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedInput:
    v: int

    def inputs(self, n, n_bob, rng):
        return np.full(n, self.v, dtype=np.int64)

    def __str__(self):
        return f"fixed:{self.v}"


@dataclass(frozen=True)
class PerBoxInput:
    rule: Callable

    def inputs(self, n, n_bob, rng):
        return np.array([int(self.rule(i, rng)) for i in range(n)], dtype=np.int64)

    def __str__(self):
        return "per-box"


@dataclass(frozen=True)
class HonestInput:
    def inputs(self, n, n_bob, rng):
        return rng.integers(0, n_bob, size=n)

    def __str__(self):
        return "honest"


@dataclass(frozen=True)
class MLDistinguisher:
    """Best of the fixed-input strategies and the honest one; per view the
    optimal test is the exact likelihood ratio, so its advantage is the TV."""

    limit: int = 1 << MAX_N

    def __str__(self):
        return "ml"


@dataclass(frozen=True)
class HidingResult:
    distance: float
    stderr: float
    views: int
    strategy: str
    per_view: tuple[float, ...] = ()


def _sample_bob_view(box: Box, v: np.ndarray, rng) -> np.ndarray:
    ft = np.asarray(box._float_table, dtype=float)  # [u][v][2x+y]
    p_y0 = ft[0, v, 0] + ft[0, v, 2]
    return (rng.random(v.size) >= p_y0).astype(np.int64)


def _tv_from_joint(joint: np.ndarray, delta: int) -> float:
    """``joint[..., k]`` over hash values; TV between ``k`` and ``k XOR delta``."""
    L = joint.shape[-1]
    perm = np.arange(L) ^ delta
    return 0.5 * float(np.abs(joint - joint[..., perm]).sum())


def _view_tv_1(box: Box, params, v, y, seed: HashSeed, delta: int, key_oracle: bool) -> float:
    n = params.n
    ft = np.asarray(box._float_table, dtype=float)
    u = params.u_a
    w1 = ft[u, v, 2 + y]
    p1 = w1 / (ft[u, v, y] + w1)  # P(x_i = 1 | y_i, v_i)
    xs = all_strings(n)
    probs = np.prod(np.where(xs == 1, p1, 1 - p1), axis=1)
    syn = _syndrome_table(params.code)
    L = 1 << params.l
    if key_oracle:
        joint = np.zeros((1 << params.code.redundancy, L))
        np.add.at(joint, syn, probs[:, None] / L)
        return _tv_from_joint(joint, delta)
    k = _hash_all(seed, xs)
    joint = np.zeros((1 << params.code.redundancy, L))
    np.add.at(joint, (syn, k), probs)
    return _tv_from_joint(joint, delta)


def _hash_all(seed: HashSeed, xs: np.ndarray) -> np.ndarray:
    T = seed.matrix().astype(np.int64)
    bits = (xs.astype(np.int64) @ T.T) & 1
    l = T.shape[0]
    return (bits << np.arange(l - 1, -1, -1)).sum(axis=1)


def _view_tv_2(box: Box, params, v, y, seed: HashSeed, delta: int, key_oracle: bool) -> float:
    n = params.n
    ft = np.asarray(box._float_table, dtype=float)
    u_lab = (params.u0, params.u1)
    # P(u_i = bit, x_i = x | y_i, v_i), proportional to W(x, y | u, v)
    post = np.empty((n, 2, 2))
    for bit, u in enumerate(u_lab):
        for x in (0, 1):
            post[:, bit, x] = ft[u, v, 2 * x + y]
    post /= post.sum(axis=(1, 2), keepdims=True)
    pu = post.sum(axis=2)  # (n, 2)
    px1 = post[:, :, 1] / np.where(pu > 0, pu, 1)  # P(x_i=1 | u_i bit)
    us = all_strings(n)
    rows = np.arange(us.shape[0])
    wu = np.prod(pu[np.arange(n), us], axis=1)
    code = params.code
    S = 1 << code.redundancy
    cols = syndrome_columns(code)
    # distribution of syn(x) given each u: XOR-convolve position by position
    r = code.redundancy
    # Fourier side: E[(-1)^(chi . syn(x)) | u] = prod over positions whose column
    # has odd overlap with chi of (1 - 2 P(x_i = 1 | u_i))
    parity = (popcount(np.arange(S)[:, None] & cols[None, :]) & 1).astype(float)  # (S, n)
    c = 1 - 2 * px1[np.arange(n), us]  # (2^n, n)
    mag = np.log(np.where(c == 0, 1.0, np.abs(c))) @ parity.T
    zeros = (c == 0).astype(float) @ parity.T
    negs = (c < 0).astype(float) @ parity.T
    F = np.where(zeros > 0.5, 0.0, np.exp(mag) * (1 - 2 * (np.rint(negs).astype(np.int64) & 1)))
    syn_u = _syndrome_table(code)
    L = 1 << params.l
    k = np.zeros_like(syn_u) if key_oracle else _hash_all(seed, us)
    group = sparse.csr_matrix((wu, (syn_u * L + k, rows)), shape=(S * L, rows.size))
    joint_f = (group @ F).reshape(S, L, S)
    if key_oracle:
        joint_f = np.broadcast_to(joint_f.sum(axis=1, keepdims=True) / L, joint_f.shape)
    if delta == 0:
        return 0.0
    # TV is the summed |P(k) - P(k ^ delta)| over one k of each pair; the
    # difference is taken before the (linear) inverse transform
    half = [k for k in range(L) if k < k ^ delta]
    diff = joint_f[:, half, :] - joint_f[:, [k ^ delta for k in half], :]
    return float(np.abs(_fwht(diff.reshape(-1, S))).sum() / S)


def _fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis."""
    a = np.array(a, dtype=float)
    m, size = a.shape
    h = 1
    while h < size:
        v = a.reshape(m, size // (2 * h), 2, h)
        lo, hi = v[:, :, 0, :].copy(), v[:, :, 1, :]
        v[:, :, 0, :] += hi
        v[:, :, 1, :] = lo - hi
        h *= 2
    return a


def hiding_advantage_exact(box: Box, params, bob_attack, b0, b1, views: int, rng,
                           key_oracle: bool = False) -> HidingResult:
    """Total-variation distance between commit messages for ``b0`` and ``b1``.

    Exact for each sampled view of Bob (his inputs, his outputs and the hash
    seed): Alice's private string is enumerated with its posterior weight.
    Views are Monte Carlo. ``key_oracle=True`` replaces the hash output by a
    truly uniform key (distance 0 baseline).
    """
    if params.n > MAX_N:
        raise TooLargeForExhaustive(f"exact hiding limited to n <= {MAX_N}")
    delta = bits_to_int(b0) ^ bits_to_int(b1)
    if isinstance(bob_attack, MLDistinguisher):
        if (1 << params.n) > bob_attack.limit:
            raise TooLargeForExhaustive("enumeration limit below 2^n")
        strategies = [FixedInput(v) for v in range(box.n_bob)] + [HonestInput()]
        results = [hiding_advantage_exact(box, params, s, b0, b1, views, rng.spawn(1)[0], key_oracle)
                   for s in strategies]
        best = max(results, key=lambda r: r.distance)
        return HidingResult(best.distance, best.stderr, views, f"ml({best.strategy})", best.per_view)
    view_tv = _view_tv_1 if params.protocol == 1 else _view_tv_2
    vals = []
    for _ in range(views):
        v = np.asarray(bob_attack.inputs(params.n, box.n_bob, rng), dtype=np.int64)
        y = _sample_bob_view(box, v, rng)
        seed = HashSeed.random(params.n, params.l, rng)
        vals.append(view_tv(box, params, v, y, seed, delta, key_oracle))
    arr = np.asarray(vals)
    stderr = float(arr.std(ddof=1) / math.sqrt(views)) if views > 1 else 0.0
    return HidingResult(float(arr.mean()), stderr, views, str(bob_attack), tuple(vals))


# -- binding rates ---------------------------------------------------------------------------

def spreading_seed(params, box: Box, bits, other, rng, tries: int = 256) -> HashSeed:
    """Seed under which the coset of ``bits`` hashes onto as many values as possible.

    Only coset members Alice can check herself are counted: for Protocol II
    those whose pairing with her committed outputs ``other`` is typical. A
    cheating Alice who picks such a seed can later open to any claim whose
    member also survives Bob's conditional test.
    """
    members = coset(params.code, syndromeof(params.code, bits))
    strings = all_strings(params.n)[members]
    if params.protocol == 2:
        Q = {(x, u): box.alice_marginal(x, u) / 2 for u in (params.u0, params.u1) for x in (0, 1)}
        labels = (params.u0, params.u1)
        keep = [is_typical([(x, labels[ub]) for x, ub in zip(other, s)], Q, params.epsilon) for s in strings]
        if any(keep):
            strings = strings[np.asarray(keep)]
    best, best_count = None, -1
    for _ in range(tries):
        seed = HashSeed.random(params.n, params.l, rng)
        count = np.unique(_hash_all(seed, strings)).size
        if count > best_count:
            best, best_count = seed, count
        if count == 1 << params.l:
            break
    return best


@dataclass(frozen=True)
class AliceAttack:
    """``kind`` is one of ``identity``, ``flip``, ``flip-offcoset``, ``delay``, ``equivocate``.

    ``seed_rule`` is ``honest`` (uniform hash seed) or ``spread`` (see
    :func:`spreading_seed`).
    """

    kind: str
    budget: int = 0
    open_rule: str = "nearest"
    seed_rule: str = "honest"


@dataclass(frozen=True)
class RateResult:
    successes: int
    trials: int
    rate: float
    low: float
    high: float
    reasons: dict = field(default_factory=dict)


def wilson(successes: int, trials: int) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def rate_result(successes: int, trials: int, reasons: dict | None = None) -> RateResult:
    lo, hi = wilson(successes, trials)
    return RateResult(successes, trials, successes / trials, lo, hi, dict(reasons or {}))


def run_attack(box: Box, params, attack: AliceAttack, b, rng) -> AttackOutcome:
    """One fresh session under ``attack``; success means Bob accepted."""
    if attack.kind == "delay":
        return attack_delay(box, params, b, attack.budget, rng, attack.open_rule)
    boxes = fresh_instances(box, params.n)
    commit = run_commit_1 if params.protocol == 1 else run_commit_2
    seed_rule = spreading_seed if attack.seed_rule == "spread" else None
    alice, bob, _ = commit(b, params, boxes, rng, seed_rule=seed_rule)
    if attack.kind == "identity":
        verdict = run_open_1(alice, bob) if params.protocol == 1 else run_open_2(alice, bob)
        return AttackOutcome(verdict, {"caught_by": verdict.reason})
    if attack.kind in ("flip", "flip-offcoset"):
        return attack_flip(alice, bob, attack.budget, rng, in_coset=attack.kind == "flip")
    if attack.kind == "equivocate":
        b = tuple(int(v) for v in b)
        other = (1 - b[0],) + b[1:]
        pair = equivocation_search(alice, bob, b, other)
        ok = pair is not None
        return AttackOutcome(Verdict(ok, other if ok else None, "accepted" if ok else "binding"),
                             {"double_opening": ok})
    raise InvalidParameter(f"unknown attack {attack.kind!r}")


def binding_rate(box: Box, params, attack: AliceAttack, trials: int, rng, b=None) -> RateResult:
    """Fraction of fresh sessions in which the attack is accepted, with a Wilson 95% interval."""
    b = tuple(b) if b is not None else (0,) * params.l
    reasons: dict[str, int] = {}
    wins = 0
    for child in rng.spawn(trials):
        out = run_attack(box, params, attack, b, child)
        wins += out.verdict.accepted
        reasons[out.verdict.reason] = reasons.get(out.verdict.reason, 0) + 1
    return rate_result(wins, trials, reasons)
