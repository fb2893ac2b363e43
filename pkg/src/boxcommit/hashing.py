"""Toeplitz two-universal hashing and exact leftover-hash distances.

A seed of ``n + l - 1`` bits defines the ``l x n`` Toeplitz matrix
``T[j, i] = seed[l - 1 - j + i]``; output bit ``j`` of ``ext(seed, x)`` is
``sum_i T[j, i] x_i mod 2``. Row 0 of ``T`` is ``seed[l-1 : l-1+n]`` and
column 0 read bottom-up is ``seed[0 : l]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import all_strings, as_bits, bits_to_int
from .errors import InvalidParameter, LengthMismatch, TooLargeForExhaustive


@dataclass(frozen=True)
class HashSeed:
    n: int
    l: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.n + self.l - 1:
            raise LengthMismatch(f"seed needs {self.n + self.l - 1} bits, got {len(self.bits)}")

    @classmethod
    def random(cls, n: int, l: int, rng) -> "HashSeed":
        return cls(n, l, tuple(int(b) for b in rng.integers(0, 2, size=n + l - 1)))

    @classmethod
    def from_bits(cls, n: int, l: int, bits) -> "HashSeed":
        return cls(n, l, tuple(int(b) for b in as_bits(bits)))

    def matrix(self) -> np.ndarray:
        return toeplitz_matrix(self.bits, self.n, self.l)

    def to_hex(self) -> str:
        width = (len(self.bits) + 3) // 4
        return f"{bits_to_int(self.bits):0{width}x}"

    @classmethod
    def from_hex(cls, text: str, n: int, l: int) -> "HashSeed":
        v = int(text, 16)
        m = n + l - 1
        if v >> m:
            raise LengthMismatch(f"hex seed has more than {m} bits")
        return cls(n, l, tuple((v >> (m - 1 - i)) & 1 for i in range(m)))


def toeplitz_matrix(bits, n: int, l: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    idx = (l - 1) - np.arange(l)[:, None] + np.arange(n)[None, :]
    return bits[idx]


def ext(seed: HashSeed, x) -> np.ndarray:
    x = as_bits(x)
    if x.shape[-1] != seed.n:
        raise LengthMismatch(f"hash input has {x.shape[-1]} bits, seed declares {seed.n}")
    return (seed.matrix().astype(np.int64) @ x.astype(np.int64) % 2).astype(np.uint8)


def all_seed_outputs(n: int, l: int) -> np.ndarray:
    """Packed hash value of every ``x`` under every seed: shape ``(2^(n+l-1), 2^n)``."""
    m = n + l - 1
    seeds = all_strings(m).astype(np.float32)
    xs = all_strings(n).astype(np.float32).T
    out = np.zeros((seeds.shape[0], xs.shape[1]), dtype=np.int64)
    for j in range(l):
        lo = l - 1 - j
        bit = (seeds[:, lo:lo + n] @ xs).astype(np.int64) & 1
        out |= bit << (l - 1 - j)
    return out


def verify_two_universal(n: int, l: int) -> Fraction:
    """Largest collision probability over input pairs, over all seeds.

    Collisions of a linear hash depend only on ``x0 XOR x1``, so every nonzero
    difference is enumerated against every seed.
    """
    if n > 12 or l > 4:
        raise TooLargeForExhaustive("exhaustive check limited to n <= 12, l <= 4")
    table = all_seed_outputs(n, l)  # hash of each difference under each seed
    zero_counts = (table[:, 1:] == 0).sum(axis=0)
    return Fraction(int(zero_counts.max()), table.shape[0])


def leftover_distance(source, n: int, l: int, table: np.ndarray | None = None) -> Fraction:
    """Exact ``(1/2) || (ext(S,X), S) - (U, S) ||_1`` for a source on ``n``-bit strings.

    ``source`` maps packed strings (ints) to probabilities. ``table`` may pass a
    precomputed :func:`all_seed_outputs` for repeated calls.
    """
    if n > 16:
        raise TooLargeForExhaustive("leftover_distance limited to n <= 16")
    if table is None:
        table = all_seed_outputs(n, l)
    items = [(int(x), Fraction(p)) for x, p in dict(source).items() if p]
    denom = math.lcm(*(p.denominator for _, p in items))
    if sum(p for _, p in items) != 1:
        raise InvalidParameter("source probabilities do not sum to 1")
    xs = np.array([x for x, _ in items], dtype=np.int64)
    w = np.array([int(p * denom) for _, p in items], dtype=np.int64)
    return _distance_from_counts(table[:, xs], w, denom, l)


def leftover_distance_uniform(subset, n: int, l: int, table: np.ndarray | None = None) -> Fraction:
    """Fast path of :func:`leftover_distance` for a source uniform on ``subset``."""
    if table is None:
        table = all_seed_outputs(n, l)
    xs = np.asarray(sorted(set(int(x) for x in subset)), dtype=np.int64)
    return _distance_from_counts(table[:, xs], np.ones(xs.size, dtype=np.int64), xs.size, l)


def _distance_from_counts(outs: np.ndarray, w: np.ndarray, denom: int, l: int) -> Fraction:
    S = outs.shape[0]
    L = 1 << l
    flat = (np.arange(S, dtype=np.int64)[:, None] * L + outs).ravel()
    if np.all(w == 1):
        counts = np.bincount(flat, minlength=S * L).astype(np.int64)
    else:
        # float weights are exact while the totals stay below 2^53
        counts = np.rint(np.bincount(flat, weights=np.broadcast_to(w, outs.shape).ravel(),
                                     minlength=S * L)).astype(np.int64)
    # |c/denom - 1/L| summed, times 1/(2S)
    total = int(np.abs(counts * L - denom).sum())
    return Fraction(total, 2 * S * denom * L)


def min_entropy_bits(source) -> float:
    return -math.log2(float(max(Fraction(p) for p in dict(source).values())))
