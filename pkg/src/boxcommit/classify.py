"""Decide whether a box is trivial, or which commitment protocol it supports.

All convex geometry runs through the exact rational LP in :mod:`boxcommit.lp`,
so "extreme" is decided exactly. The main entry point is :func:`classify`:

1. strip inputs that Alice can simulate locally from the others
   (:func:`reduce_box`), remembering how to simulate them;
2. on the reduced box, count the extreme rows of the hat matrix and run the
   case analysis, producing either a shared-randomness decomposition with
   revealing inputs (trivial), a Protocol I certificate, or a Protocol II
   certificate.

Certificates in the returned verdict use the caller's input labels. Margins
are computed on the reduced box's hat matrix, see :func:`verify_certificate`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .box import (
    Box,
    Correlation,
    HatMatrix,
    LocalDecomposition,
    LocalTerm,
    correlation_kind,
    hat_matrix,
    is_independent,
    restrict_alice,
)
from .errors import AlphabetTooLarge, EmptyHull, Unclassifiable
from .infostats import gamma_of_box
from .lp import solve_lp

ZERO = Fraction(0)
ONE = Fraction(1)
# margin reported for a row that has no other rows to be compared against
LONE_ROW_MARGIN = Fraction(2)


# -- hull distances ------------------------------------------------------------

def min_l1_to_hull(target: Sequence, others: Sequence[Sequence]) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Exact ``min_P || target - sum_i P_i others[i] ||_1`` over convex weights ``P``.

    Solved as the LP ``min sum(s+ + s-)`` with ``sum_i P_i o_i + s+ - s- = target``
    and ``sum_i P_i = 1``.
    """
    if not others:
        raise EmptyHull("no rows to form a hull from")
    d = len(target)
    m = len(others)
    if any(len(o) != d for o in others):
        raise ValueError("rows differ in dimension")
    A = []
    for j in range(d):
        row = [Fraction(o[j]) for o in others] + [ZERO] * (2 * d)
        row[m + j] = ONE
        row[m + d + j] = -ONE
        A.append(row)
    A.append([ONE] * m + [ZERO] * (2 * d))
    b = [Fraction(t) for t in target] + [ONE]
    c = [ZERO] * m + [ONE] * (2 * d)
    res = solve_lp(c, A, b)
    assert res.ok, res.status  # always feasible and bounded below by 0
    return res.value, res.x[:m]


@dataclass(frozen=True)
class RowExtremality:
    key: tuple[int, int]
    margin: Fraction
    witness: dict | None  # other row key -> weight, when non-extreme

    @property
    def extreme(self) -> bool:
        return self.margin > 0


@dataclass(frozen=True)
class ExtremalityReport:
    rows: dict  # (x, u) -> RowExtremality

    @property
    def extreme_keys(self) -> list[tuple[int, int]]:
        return [k for k, r in self.rows.items() if r.extreme]

    @property
    def delta(self) -> Fraction | None:
        pos = [r.margin for r in self.rows.values() if r.margin > 0]
        return min(pos) if pos else None

    def margin(self, key) -> Fraction:
        return self.rows[key].margin

    def is_extreme(self, key) -> bool:
        return key in self.rows and self.rows[key].extreme


def extremality(hat: HatMatrix) -> ExtremalityReport:
    keys = list(hat.rows)
    if not keys:
        raise EmptyHull("hat matrix has no defined rows")
    out = {}
    for k in keys:
        others = [o for o in keys if o != k]
        if not others:
            out[k] = RowExtremality(k, LONE_ROW_MARGIN, None)
            continue
        dist, weights = min_l1_to_hull(hat.rows[k], [hat.rows[o] for o in others])
        witness = None if dist > 0 else {o: w for o, w in zip(others, weights) if w}
        out[k] = RowExtremality(k, dist, witness)
    return ExtremalityReport(out)


# -- the three conditions ----------------------------------------------------------

@dataclass(frozen=True)
class Condition1:
    a: tuple[int, int]  # (x_a, u_a)
    delta: Fraction
    gamma: float


@dataclass(frozen=True)
class Condition3:
    u0: int
    u1: int
    c0: tuple[int, int] | None
    delta: Fraction


@dataclass(frozen=True)
class Condition4:
    u0: int
    u1: int
    x0: int
    x1: int
    delta: Fraction


def _condition1(box: Box, rep: ExtremalityReport) -> Condition1 | None:
    gammas = {}
    best = None
    for key in sorted(rep.rows):
        r = rep.rows[key]
        if not r.extreme:
            continue
        u = key[1]
        if u not in gammas:
            gammas[u] = gamma_of_box(box, u)
        g = gammas[u]
        if g <= 1e-15:
            continue
        cand = (r.margin, g)
        if best is None or cand > best[0]:
            best = (cand, key)
    if best is None:
        return None
    (delta, gamma), key = best
    return Condition1(key, delta, gamma)


def check_condition1(box: Box) -> Condition1 | None:
    """Some row ``a`` extreme among all defined rows, with ``gamma(u_a) > 0``.

    Ties: larger margin, then larger gamma, then the smallest ``(x_a, u_a)``.
    """
    return _condition1(box, extremality(hat_matrix(box)))


def _condition3(hat: HatMatrix, rep: ExtremalityReport, n_alice: int) -> Condition3 | None:
    best = None
    for u0, u1 in itertools.combinations(range(n_alice), 2):
        keys = [(0, u0), (1, u0), (0, u1), (1, u1)]
        if any(k not in hat.rows for k in keys):
            continue
        non_ext = [k for k in keys if not rep.is_extreme(k)]
        if len(non_ext) > 1:
            continue
        delta = min(rep.margin(k) for k in keys if rep.is_extreme(k))
        cand = Condition3(u0, u1, non_ext[0] if non_ext else None, delta)
        if best is None or delta > best.delta:
            best = cand
    return best


def check_condition3(box: Box) -> Condition3 | None:
    """Two inputs whose four hat rows contain at most one non-extreme point."""
    if box.n_alice < 2:
        return None
    hat = hat_matrix(box)
    return _condition3(hat, extremality(hat), box.n_alice)


def reproduces_with_positive_weight(hat: HatMatrix, c, c_prime) -> bool:
    """Can ``hat[c]`` be written as a convex combination with ``P(c) = 0`` and ``P(c') > 0``?

    Decided by maximising ``P(c')`` over the exact-reproduction polytope.
    """
    others = [k for k in hat.rows if k != c]
    if c_prime not in others:
        return False
    target = hat.rows[c]
    d = len(target)
    A = [[hat.rows[o][j] for o in others] for j in range(d)]
    A.append([ONE] * len(others))
    b = list(target) + [ONE]
    obj = [ONE if o == c_prime else ZERO for o in others]
    res = solve_lp(obj, A, b, maximize=True)
    return res.ok and res.value > 0


def _condition4(hat: HatMatrix, rep: ExtremalityReport, n_alice: int) -> Condition4 | None:
    best = None
    for u0, u1 in itertools.combinations(range(n_alice), 2):
        for x0, x1 in itertools.product((0, 1), repeat=2):
            e0, e1 = (x0, u0), (x1, u1)
            if not (rep.is_extreme(e0) and rep.is_extreme(e1)):
                continue
            c, cp = (1 - x0, u0), (1 - x1, u1)
            if c not in hat.rows or cp not in hat.rows:
                continue
            if reproduces_with_positive_weight(hat, c, cp) or reproduces_with_positive_weight(hat, cp, c):
                continue
            delta = min(rep.margin(e0), rep.margin(e1))
            if best is None or delta > best.delta:
                best = Condition4(u0, u1, x0, x1, delta)
    return best


def check_condition4(box: Box) -> Condition4 | None:
    """Two extreme rows on distinct inputs whose complementary rows cannot
    reproduce each other with positive weight.

    The reported delta is the smaller of the two extreme margins; part (2) is
    the exact qualitative test of :func:`reproduces_with_positive_weight`.
    """
    if box.n_alice < 2:
        return None
    hat = hat_matrix(box)
    return _condition4(hat, extremality(hat), box.n_alice)


# -- reduction ----------------------------------------------------------------------

@dataclass(frozen=True)
class Removal:
    """How Alice simulates a removed input from the remaining ones.

    ``kind == "local"``: output ``x`` with probability ``marginal[x]``.
    ``kind == "proxy"``: input ``proxy`` to the box; on output ``x1`` answer
    ``x0`` with probability ``p`` (else ``1-x0``); on the other output answer ``1-x0``.
    """

    input: int
    kind: str
    marginal: tuple[Fraction, Fraction] | None = None
    proxy: int | None = None
    x1: int | None = None
    x0: int | None = None
    p: Fraction | None = None

    def describe(self) -> str:
        if self.kind == "local":
            return f"u={self.input} local marginal ({self.marginal[0]}, {self.marginal[1]})"
        return f"u={self.input} via u={self.proxy}: x={self.x1} -> {self.x0} w.p. {self.p}"


def _find_removal(box: Box, hat: HatMatrix, labels: list[int]) -> tuple[int, Removal] | None:
    nu = box.n_alice
    for u0 in reversed(range(nu)):
        marg = (box.alice_marginal(0, u0), box.alice_marginal(1, u0))
        if ZERO in marg or hat.rows[(0, u0)] == hat.rows[(1, u0)]:
            return u0, Removal(labels[u0], "local", marginal=marg)
        for x0 in (0, 1):
            for u1 in range(nu):
                if u1 == u0:
                    continue
                for x1 in (0, 1):
                    other = hat.rows.get((x1, u1))
                    if other is not None and hat.rows[(x0, u0)] == other and marg[x0] <= box.alice_marginal(x1, u1):
                        p = marg[x0] / box.alice_marginal(x1, u1)
                        return u0, Removal(labels[u0], "proxy", proxy=labels[u1], x1=x1, x0=x0, p=p)
    return None


def reduce_box(box: Box) -> tuple[Box, list[Removal], tuple[int, ...]]:
    """Remove locally simulable Alice inputs until none is left.

    Returns the reduced box, the removal trace in order and the original
    labels of the surviving inputs.
    """
    labels = list(range(box.n_alice))
    trace = []
    while box.n_alice > 1:
        hat = hat_matrix(box)
        found = _find_removal(box, hat, labels)
        if found is None:
            break
        u0, removal = found
        trace.append(removal)
        keep = [u for u in range(box.n_alice) if u != u0]
        box = restrict_alice(box, keep)
        labels = [labels[u] for u in keep]
    return box, trace, tuple(labels)


def lift_decomposition(decomp: LocalDecomposition, kept: Sequence[int], trace: Sequence[Removal], n_alice: int) -> LocalDecomposition:
    """Extend a decomposition of the reduced box to the original input alphabet."""
    terms = []
    for t in decomp.terms:
        alice = {orig: t.alice[i] for i, orig in enumerate(kept)}
        for r in reversed(trace):
            if r.kind == "local":
                alice[r.input] = r.marginal
            else:
                px = alice[r.proxy][r.x1] * r.p
                row = [ZERO, ZERO]
                row[r.x0] = px
                row[1 - r.x0] = 1 - px
                alice[r.input] = tuple(row)
        terms.append(LocalTerm(t.weight, tuple(alice[u] for u in range(n_alice)), t.bob))
    return LocalDecomposition(tuple(terms))


# -- locality ------------------------------------------------------------------------

def _point(x: int) -> tuple[Fraction, Fraction]:
    return (ONE, ZERO) if x == 0 else (ZERO, ONE)


def is_local(box: Box) -> LocalDecomposition | None:
    """Exact membership LP over deterministic strategy pairs (desk scale only)."""
    nu, nv = box.n_alice, box.n_bob
    if nu > 4 or nv > 4:
        raise AlphabetTooLarge(f"{nu}x{nv} inputs exceed the 4x4 limit for vertex enumeration")
    strat_a = list(itertools.product((0, 1), repeat=nu))
    strat_b = list(itertools.product((0, 1), repeat=nv))
    pairs = list(itertools.product(strat_a, strat_b))
    A, b = [], []
    for u in range(nu):
        for v in range(nv):
            for x in (0, 1):
                for y in (0, 1):
                    A.append([ONE if (sa[u] == x and sb[v] == y) else ZERO for sa, sb in pairs])
                    b.append(box.w(x, y, u, v))
    res = solve_lp([ZERO] * len(pairs), A, b)
    if not res.ok:
        return None
    terms = tuple(
        LocalTerm(w, tuple(_point(a) for a in sa), tuple(_point(c) for c in sb))
        for w, (sa, sb) in zip(res.x, pairs)
        if w
    )
    return LocalDecomposition(terms)


# -- decompositions emitted by the case analysis ------------------------------------

def _single_input_decomposition(box: Box) -> LocalDecomposition:
    """Split on Alice's output: term ``x`` has weight ``W^A(x|0)``."""
    terms = []
    for x in (0, 1):
        wa = box.alice_marginal(x, 0)
        if wa == 0:
            continue
        bob = tuple(tuple(box.w(x, y, 0, v) / wa for y in (0, 1)) for v in range(box.n_bob))
        terms.append(LocalTerm(wa, (_point(x),), bob))
    return LocalDecomposition(tuple(terms))


def _segment_coefficient(row, A, B) -> Fraction | None:
    """``alpha`` with ``row = alpha A + (1-alpha) B``, or None if off the line."""
    j = next(j for j in range(len(A)) if A[j] != B[j])
    alpha = (row[j] - B[j]) / (A[j] - B[j])
    if all(row[i] == alpha * A[i] + (1 - alpha) * B[i] for i in range(len(A))):
        return alpha
    return None


def _segment_decomposition(box: Box, hat: HatMatrix, ends) -> LocalDecomposition:
    """Two-term decomposition when every hat row lies on the segment between two rows.

    Writing ``hat[x,u] = alpha_xu A + (1 - alpha_xu) B`` for the endpoints
    ``A, B``, Bob's strategies are ``|V| A`` and ``|V| B`` and Alice's are
    ``W^A(x|u) alpha_xu / p`` and ``W^A(x|u) (1-alpha_xu) / (1-p)`` where
    ``p = sum_x W^A(x|u) alpha_xu`` does not depend on ``u``. When both
    endpoints belong to one input this is the table with coefficients
    ``a_x, b_x`` from the two-extreme-point case.
    """
    A, B = hat.rows[ends[0]], hat.rows[ends[1]]
    nv = box.n_bob
    alpha = {}
    for key, row in hat.rows.items():
        a = _segment_coefficient(row, A, B)
        if a is None:
            raise Unclassifiable(f"row {key} is not on the segment between {ends[0]} and {ends[1]}")
        alpha[key] = a
    ps = {sum(box.alice_marginal(x, u) * alpha[(x, u)] for x in (0, 1)) for u in range(box.n_alice)}
    if len(ps) != 1:
        raise Unclassifiable("segment weights differ across Alice inputs")
    p = ps.pop()
    bob_a = tuple(tuple(nv * A[2 * v + y] for y in (0, 1)) for v in range(nv))
    bob_b = tuple(tuple(nv * B[2 * v + y] for y in (0, 1)) for v in range(nv))
    terms = []
    if p > 0:
        terms.append(LocalTerm(p, tuple(
            tuple(box.alice_marginal(x, u) * alpha[(x, u)] / p for x in (0, 1)) for u in range(box.n_alice)
        ), bob_a))
    if p < 1:
        terms.append(LocalTerm(1 - p, tuple(
            tuple(box.alice_marginal(x, u) * (1 - alpha[(x, u)]) / (1 - p) for x in (0, 1)) for u in range(box.n_alice)
        ), bob_b))
    return LocalDecomposition(tuple(terms))


def _revealing_pair(decomp: LocalDecomposition, n_alice: int, n_bob: int):
    """Inputs at which both parties learn the shared index of a two-term decomposition."""
    if len(decomp.terms) != 2:
        return None
    t0, t1 = decomp.terms

    def opposite(r0, r1):
        return r0 in ((ONE, ZERO), (ZERO, ONE)) and r1 == (r0[1], r0[0])

    us = [u for u in range(n_alice) if opposite(t0.alice[u], t1.alice[u])]
    vs = [v for v in range(n_bob) if opposite(t0.bob[v], t1.bob[v])]
    if us and vs:
        return us[0], vs[0]
    return None


# -- verdicts ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trivial:
    decomposition: LocalDecomposition
    revealing_inputs: tuple[int, int] | None
    reason: str  # "revealing" or "independent"

    name = "Trivial"


@dataclass(frozen=True)
class ProtocolI:
    a: tuple[int, int]
    delta: Fraction
    gamma: float

    name = "ProtocolI"


@dataclass(frozen=True)
class Cond3:
    c0: tuple[int, int] | None

    name = "Cond3"


@dataclass(frozen=True)
class Cond4:
    x0: int
    x1: int

    name = "Cond4"


@dataclass(frozen=True)
class ProtocolII:
    u0: int
    u1: int
    variant: Cond3 | Cond4
    delta: Fraction

    name = "ProtocolII"


@dataclass(frozen=True)
class ClassificationResult:
    verdict: Trivial | ProtocolI | ProtocolII
    reduction_trace: tuple[Removal, ...]
    kept_inputs: tuple[int, ...]
    reduced: Box
    extremality: ExtremalityReport
    local_model: LocalDecomposition | None = None
    case: str = ""
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def emits_decomposition(self) -> bool:
        return self.local_model is not None


def classify(box: Box) -> ClassificationResult:
    """Run the reduction and the case analysis; exactly one verdict comes back."""
    reduced, trace, kept = reduce_box(box)
    hat = hat_matrix(reduced)
    rep = extremality(hat)
    notes: list[str] = []

    def lift(decomp):
        return lift_decomposition(decomp, kept, trace, box.n_alice)

    def orig(key):
        return (key[0], kept[key[1]])

    def result(verdict, case, local_model=None):
        return ClassificationResult(verdict, tuple(trace), kept, reduced, rep, local_model, case, tuple(notes))

    def protocol1(case, local_model=None):
        c1 = _condition1(reduced, rep)
        if c1 is None:
            raise Unclassifiable(f"{case}: expected an extreme row with gamma > 0")
        return result(ProtocolI(orig(c1.a), c1.delta, c1.gamma), case, local_model)

    pairs = [(u, v) for u in range(reduced.n_alice) for v in range(reduced.n_bob)
             if correlation_kind(reduced, u, v) is not Correlation.NEITHER]

    if reduced.n_alice == 1:
        decomp = lift(_single_input_decomposition(reduced))
        if is_independent(reduced):
            return result(Trivial(decomp, _revealing_pair(decomp, box.n_alice, box.n_bob), "independent"),
                          "single-input", decomp)
        if pairs:
            notes.append(f"perfectly (anti-)correlated pair (u,v)=({kept[pairs[0][0]]},{pairs[0][1]})")
            return result(Trivial(decomp, _revealing_pair(decomp, box.n_alice, box.n_bob), "revealing"),
                          "single-input", decomp)
        return protocol1("single-input", decomp)

    ext = rep.extreme_keys
    if len(ext) >= 3:
        c3 = _condition3(hat, rep, reduced.n_alice)
        if c3 is not None:
            c0 = orig(c3.c0) if c3.c0 is not None else None
            return result(ProtocolII(kept[c3.u0], kept[c3.u1], Cond3(c0), c3.delta), "extreme>=3")
        if _condition1(reduced, rep) is not None:
            return protocol1("extreme>=3")
        c4 = _condition4(hat, rep, reduced.n_alice)
        if c4 is not None:
            return result(ProtocolII(kept[c4.u0], kept[c4.u1], Cond4(c4.x0, c4.x1), c4.delta), "extreme>=3")
        raise Unclassifiable("three or more extreme rows but no condition holds")

    if len(ext) == 2:
        decomp = lift(_segment_decomposition(reduced, hat, ext))
        (x0, u0), (x1, u1) = ext
        if u0 == u1:
            fired = [(u, v) for (u, v) in pairs]
            if fired:
                notes.append("perfectly (anti-)correlated pair(s) " + ", ".join(f"({kept[u]},{v})" for u, v in fired))
                return result(Trivial(decomp, _revealing_pair(decomp, box.n_alice, box.n_bob), "revealing"),
                              "extreme=2 same input", decomp)
            return protocol1("extreme=2 same input", decomp)
        return protocol1("extreme=2 across inputs", decomp)

    raise Unclassifiable(f"{len(ext)} extreme rows after reduction")


def theorem1_trivial(box: Box):
    """Two-term decomposition plus inputs revealing its index, found via :func:`classify`.

    Returns ``(decomposition, u0, v0)`` or None.
    """
    res = classify(box)
    v = res.verdict
    if isinstance(v, Trivial) and v.revealing_inputs is not None:
        return v.decomposition, v.revealing_inputs[0], v.revealing_inputs[1]
    return None


def verify_certificate(box: Box, res: ClassificationResult) -> bool:
    """Re-check a verdict with independent calls on the (re-)reduced box."""
    v = res.verdict
    if isinstance(v, Trivial):
        return v.decomposition.reproduces(box)
    reduced, _, kept = reduce_box(box)
    back = {orig: i for i, orig in enumerate(kept)}
    hat = hat_matrix(reduced)
    keys = list(hat.rows)

    def margin(key):
        k = (key[0], back[key[1]])
        others = [hat.rows[o] for o in keys if o != k]
        return min_l1_to_hull(hat.rows[k], others)[0] if others else LONE_ROW_MARGIN

    if isinstance(v, ProtocolI):
        return margin(v.a) == v.delta and v.delta > 0 and gamma_of_box(box, v.a[1]) > 0
    if isinstance(v.variant, Cond3):
        rows = [(x, u) for u in (v.u0, v.u1) for x in (0, 1) if (x, u) != v.variant.c0]
        return min(margin(r) for r in rows) == v.delta and v.delta > 0
    rows = [(v.variant.x0, v.u0), (v.variant.x1, v.u1)]
    return min(margin(r) for r in rows) == v.delta and v.delta > 0
