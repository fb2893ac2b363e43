"""Entropies, typical sets and the closed-form tail and entropy bounds.

Entropies and bound values are floats. Typicality tests are accept/reject
gates inside the protocols, so they compare integer counts against exact
rationals and never round.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Hashable, Mapping, Sequence

from .box import Box, to_fraction
from .errors import InvalidEpsilon, LengthMismatch, ParameterOutOfRange


def _as_dist(dist) -> dict:
    if isinstance(dist, Mapping):
        return dict(dist)
    return dict(enumerate(dist))


def shannon_entropy(dist) -> float:
    return -sum(float(p) * math.log2(float(p)) for p in _as_dist(dist).values() if p > 0)


def binary_entropy(p) -> float:
    return shannon_entropy((p, 1 - p))


def shannon_conditional_entropy(joint) -> float:
    """``H(X|Y)`` in bits for ``joint[x][y]`` (nested sequence) or ``{(x, y): p}``."""
    if isinstance(joint, Mapping):
        items = joint.items()
    else:
        items = (((x, y), p) for x, row in enumerate(joint) for y, p in enumerate(row))
    by_y: dict = {}
    for (x, y), p in items:
        by_y.setdefault(y, []).append(float(p))
    h = 0.0
    for ps in by_y.values():
        py = sum(ps)
        if py > 0:
            h += py * shannon_entropy([p / py for p in ps])
    return h


def gamma_of_box(box: Box, u_a: int) -> float:
    """Minimum over Bob's inputs of ``H(X_v|Y_v)`` with Alice's input fixed to ``u_a``."""
    return min(
        shannon_conditional_entropy([[box.w(x, y, u_a, v) for y in (0, 1)] for x in (0, 1)])
        for v in range(box.n_bob)
    )


def min_entropy(dist) -> float:
    return -math.log2(float(max(_as_dist(dist).values())))


# -- typical sets ------------------------------------------------------------------

def _eps(epsilon) -> Fraction:
    eps = to_fraction(epsilon)
    if eps <= 0:
        raise InvalidEpsilon(f"epsilon must be positive, got {epsilon}")
    return eps


def is_typical(seq: Sequence[Hashable], P, epsilon) -> bool:
    """Membership in the epsilon-typical set of ``P``.

    Every letter count must satisfy ``|N(x) - P(x) n| <= epsilon n`` and letters
    with ``P(x) = 0`` (or outside ``P``'s support) must not occur.
    """
    eps = _eps(epsilon)
    P = {k: to_fraction(v) for k, v in _as_dist(P).items()}
    n = len(seq)
    counts = Counter(seq)
    if any(c not in P for c in counts):
        return False
    for letter, p in P.items():
        N = counts.get(letter, 0)
        if p == 0 and N:
            return False
        if abs(N - p * n) > eps * n:
            return False
    return True


def is_cond_typical(out_seq: Sequence, in_seq: Sequence, W: Mapping, epsilon) -> bool:
    """Membership of ``out_seq`` in the W-typical set conditioned on ``in_seq``.

    ``W`` maps each input letter to a distribution over output letters. Input
    letters missing from ``W`` count as undefined rows and make the test fail.
    """
    if len(out_seq) != len(in_seq):
        raise LengthMismatch(f"output length {len(out_seq)} != input length {len(in_seq)}")
    eps = _eps(epsilon)
    n = len(in_seq)
    in_counts = Counter(in_seq)
    joint = Counter(zip(in_seq, out_seq))
    if any(x not in W for x in in_counts):
        return False
    for (x, z), N in joint.items():
        if to_fraction(W[x].get(z, 0)) == 0:
            return False
    bound = eps * n
    for x, row in W.items():
        Nx = in_counts.get(x, 0)
        for z, w in row.items():
            if abs(joint.get((x, z), 0) - to_fraction(w) * Nx) > bound:
                return False
    return True


# -- closed-form bounds ----------------------------------------------------------------

@dataclass(frozen=True)
class BoundValue:
    """A bound value with a flag saying whether it says nothing at these parameters."""

    bound_id: str
    value: float
    vacuous: bool
    extras: dict = field(default_factory=dict)


def binom_tail_exact(n: int, p, k: int) -> Fraction:
    """``sum_{i<=k} C(n,i) p^i (1-p)^(n-i)`` as an exact rational."""
    p = to_fraction(p)
    return sum((comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(0, k + 1)), Fraction(0))


def _need(params, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise ParameterOutOfRange(f"missing parameters: {', '.join(missing)}")
    return [params[n] for n in names]


def _check(cond: bool, msg: str):
    if not cond:
        raise ParameterOutOfRange(msg)


def _prob_upper(bid, value, **extras):
    return BoundValue(bid, value, value >= 1, extras)


def _prob_lower(bid, value, **extras):
    return BoundValue(bid, value, value <= 0, extras)


def _entropy_lower(bid, value, **extras):
    return BoundValue(bid, value, value <= 0, extras)


def evaluate_bound(bound_id: str, **params) -> BoundValue:
    """Evaluate one of the closed-form bounds.

    ===================  ==========================================  =======================
    bound_id             parameters                                  value
    ===================  ==========================================  =======================
    chernoff_upper       mu, delta (0<delta<1)                       exp(-delta^2 mu/3)
    chernoff_lower       mu, delta (0<delta<1)                       exp(-delta^2 mu/2)
    hoeffding            n, delta (delta>0)                          exp(-2 delta^2/n)
    typical1             n, eps, x_size                              1-2|X|exp(-n eps^2/3)
    typical2             n, eps, x_size, z_size                      1-2|X||Z|exp(-n eps^2/3)
    statlemma            n, lam, delta, kappa, z_size                2exp(-n eps^2/3),
                                                                     eps=lam delta kappa/(2|Z|)
    binom_tail           n, p, k (k<=np)                             2^(-2np^2+4pk)
    chain_rule           h, y_size, eps_prime                        h-log|Y|-log(1/eps')
    smooth_product       h, n, eps, x_size                           h-4 sqrt(n log(1/eps)) log|X|
    leftover_threshold   h_min, eps                                  h_min-2log(1/eps)
    ===================  ==========================================  =======================

    Probability upper bounds are vacuous when >= 1, lower bounds when <= 0 and
    entropy or length bounds when <= 0. Values are never clamped.
    """
    b = bound_id
    if b in ("chernoff_upper", "chernoff_lower"):
        mu, delta = (float(x) for x in _need(params, "mu", "delta"))
        _check(0 < delta < 1, "chernoff needs 0 < delta < 1")
        _check(mu >= 0, "chernoff needs mu >= 0")
        div = 3 if b == "chernoff_upper" else 2
        return _prob_upper(b, math.exp(-delta * delta * mu / div))
    if b == "hoeffding":
        n, delta = _need(params, "n", "delta")
        n, delta = int(n), float(delta)
        _check(n >= 1 and delta > 0, "hoeffding needs n >= 1 and delta > 0")
        return _prob_upper(b, math.exp(-2 * delta * delta / n))
    if b == "typical1":
        n, eps, xs = _need(params, "n", "eps", "x_size")
        eps = float(eps)
        _check(int(n) >= 1 and eps > 0 and int(xs) >= 1, "typical1 needs n >= 1, eps > 0, x_size >= 1")
        return _prob_lower(b, 1 - 2 * int(xs) * math.exp(-int(n) * eps * eps / 3))
    if b == "typical2":
        n, eps, xs, zs = _need(params, "n", "eps", "x_size", "z_size")
        eps = float(eps)
        _check(int(n) >= 1 and eps > 0 and int(xs) >= 1 and int(zs) >= 1, "typical2 parameters out of range")
        return _prob_lower(b, 1 - 2 * int(xs) * int(zs) * math.exp(-int(n) * eps * eps / 3))
    if b == "statlemma":
        n, lam, delta, kappa, zs = _need(params, "n", "lam", "delta", "kappa", "z_size")
        lam, delta, kappa = float(lam), float(delta), float(kappa)
        _check(int(n) >= 1 and int(zs) >= 1, "statlemma needs n >= 1 and z_size >= 1")
        _check(0 < lam <= 1 and delta > 0 and 0 < kappa <= 1, "statlemma needs lam, kappa in (0,1], delta > 0")
        eps = lam * delta * kappa / (2 * int(zs))
        return _prob_upper(b, 2 * math.exp(-int(n) * eps * eps / 3), eps=eps)
    if b == "binom_tail":
        n, p, k = _need(params, "n", "p", "k")
        n, k, pf = int(n), int(k), to_fraction(p)
        _check(n >= 0 and 0 <= pf <= 1, "binom_tail needs n >= 0 and 0 <= p <= 1")
        _check(0 <= k <= n * pf, "binom_tail needs 0 <= k <= n p")
        exponent = -2 * n * pf * pf + 4 * pf * k
        exact = binom_tail_exact(n, pf, k)
        return _prob_upper(b, 2.0 ** float(exponent), exact=exact, exponent=exponent)
    if b == "chain_rule":
        h, ys, ep = _need(params, "h", "y_size", "eps_prime")
        ep = float(ep)
        if not 0 < ep < 1:
            raise InvalidEpsilon(f"eps_prime must lie in (0,1), got {ep}")
        return _entropy_lower(b, float(h) - math.log2(int(ys)) - math.log2(1 / ep))
    if b == "smooth_product":
        h, n, eps, xs = _need(params, "h", "n", "eps", "x_size")
        eps = float(eps)
        if not 0 < eps < 1:
            raise InvalidEpsilon(f"eps must lie in (0,1), got {eps}")
        penalty = 4 * math.sqrt(int(n) * math.log2(1 / eps)) * math.log2(int(xs))
        return _entropy_lower(b, float(h) - penalty, penalty=penalty)
    if b == "leftover_threshold":
        h_min, eps = _need(params, "h_min", "eps")
        eps = float(eps)
        if not 0 < eps < 1:
            raise InvalidEpsilon(f"eps must lie in (0,1), got {eps}")
        return _entropy_lower(b, float(h_min) - 2 * math.log2(1 / eps))
    raise ParameterOutOfRange(f"unknown bound {bound_id!r}")


BOUND_IDS = (
    "chernoff_upper", "chernoff_lower", "hoeffding", "typical1", "typical2",
    "statlemma", "binom_tail", "chain_rule", "smooth_product", "leftover_threshold",
)


def smooth_bounds(bound_id: str, **params) -> float:
    """Value of the ``chain_rule`` or ``smooth_product`` entropy transformer."""
    if bound_id not in ("chain_rule", "smooth_product"):
        raise ParameterOutOfRange(f"{bound_id!r} is not a smooth-entropy bound")
    return evaluate_bound(bound_id, **params).value


def binom_tail_holds(n: int, p: Fraction, k: int) -> bool:
    """Exact check of ``tail <= 2^(a/b)`` via ``tail^b <= 2^a`` (no floats)."""
    tail = binom_tail_exact(n, p, k)
    exponent = Fraction(-2 * n) * p * p + 4 * p * k
    a, b = exponent.numerator, exponent.denominator
    if tail == 0:
        return True
    lhs = tail**b
    rhs = Fraction(2) ** a
    return lhs <= rhs
