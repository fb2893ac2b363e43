"""Binary linear codes given by parity-check matrices.

Bit strings are numpy ``uint8`` arrays with index 0 the leftmost symbol. For
enumeration the same strings are packed into Python/numpy integers with the
leftmost symbol as the most significant bit (see :func:`bits_to_int`).
The syndrome of ``x`` is ``H x`` over GF(2) with ``H`` stored ``(n-k) x n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionTooLarge, InvalidParameter, LengthMismatch, RetriesExhausted

EXHAUSTIVE_DIM = 24


@dataclass(frozen=True)
class DistanceStatus:
    kind: str  # "exact" | "lower" | "unverified"
    d: int | None = None

    def __str__(self) -> str:
        if self.kind == "exact":
            return f"Exact({self.d})"
        if self.kind == "lower":
            return f"LowerBounded({self.d})"
        return "Unverified"


@dataclass(frozen=True, eq=False)
class LinearCode:
    n: int
    H: np.ndarray
    distance_status: DistanceStatus = DistanceStatus("unverified")

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.uint8).reshape(-1, self.n) % 2
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def redundancy(self) -> int:
        return self.H.shape[0]

    @property
    def dim(self) -> int:
        return self.n - self.redundancy

    @property
    def rate(self) -> Fraction:
        return Fraction(self.dim, self.n)

    @property
    def d(self) -> int | None:
        return self.distance_status.d

    def with_status(self, status: DistanceStatus) -> "LinearCode":
        return LinearCode(self.n, self.H, status)

    def __eq__(self, other):
        return isinstance(other, LinearCode) and self.n == other.n and np.array_equal(self.H, other.H)

    def __hash__(self):
        return hash((self.n, self.H.tobytes()))

    def __repr__(self):
        return f"LinearCode([{self.n},{self.dim}], {self.distance_status})"


# -- bit helpers ----------------------------------------------------------------

def as_bits(x, n: int | None = None) -> np.ndarray:
    if isinstance(x, str):
        x = [int(c) for c in x.strip()]
    elif isinstance(x, (list, tuple)) and x and isinstance(x[0], str):
        x = [[int(c) for c in row.strip()] for row in x]
    arr = np.asarray(x, dtype=np.uint8)
    if n is not None and arr.shape[-1] != n:
        raise LengthMismatch(f"expected {n} bits, got {arr.shape[-1]}")
    return arr


def bits_to_str(x) -> str:
    return "".join(str(int(b)) for b in x)


def bits_to_int(x) -> int:
    v = 0
    for b in x:
        v = (v << 1) | int(b)
    return v


def int_to_bits(v: int, n: int) -> np.ndarray:
    return np.array([(v >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def all_strings(n: int) -> np.ndarray:
    """All ``2^n`` strings as a ``(2^n, n)`` array, row ``i`` encoding integer ``i``."""
    idx = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.uint64)).astype(np.int64)


# -- GF(2) linear algebra ------------------------------------------------------------

def gf2_rank(M: np.ndarray) -> int:
    return len(_rref(M)[1])


def _rref(M: np.ndarray):
    A = np.array(M, dtype=np.uint8) % 2
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(A[r:, c])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        mask = A[:, c].astype(bool)
        mask[r] = False
        A[mask] ^= A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def generator_matrix(code: LinearCode) -> np.ndarray:
    """Basis of the null space of ``H`` over GF(2), one codeword per row."""
    R, pivots = _rref(code.H)
    free = [c for c in range(code.n) if c not in pivots]
    G = np.zeros((len(free), code.n), dtype=np.uint8)
    for i, f in enumerate(free):
        G[i, f] = 1
        for r, p in enumerate(pivots):
            G[i, p] = R[r, f]
    return G


def codewords(code: LinearCode) -> np.ndarray:
    """All codewords packed as integers (leftmost bit most significant)."""
    if code.dim > EXHAUSTIVE_DIM:
        raise DimensionTooLarge(f"dimension {code.dim} exceeds {EXHAUSTIVE_DIM}")
    words = np.zeros(1, dtype=np.int64)
    for g in generator_matrix(code):
        words = np.concatenate([words, words ^ bits_to_int(g)])
    return words


# -- operations ----------------------------------------------------------------------

def syndrome(code: LinearCode, x) -> np.ndarray:
    x = as_bits(x, code.n)
    return (code.H.astype(np.int64) @ x.astype(np.int64) % 2).astype(np.uint8)


def syndrome_columns(code: LinearCode) -> np.ndarray:
    """Packed syndrome contributed by each position, for fast batch syndromes."""
    return np.array([bits_to_int(code.H[:, j]) for j in range(code.n)], dtype=np.int64)


def batch_syndromes(code: LinearCode, strings: np.ndarray) -> np.ndarray:
    """Packed syndromes of a ``(m, n)`` bit array."""
    cols = syndrome_columns(code)
    out = np.zeros(strings.shape[0], dtype=np.int64)
    for j in range(code.n):
        out ^= strings[:, j].astype(np.int64) * cols[j]
    return out


def min_distance(code: LinearCode) -> DistanceStatus:
    """Exact minimum weight of a nonzero codeword by enumeration.

    A dimension-0 code has no nonzero codeword; its distance is reported as
    ``n + 1`` so that every requirement ``d <= n`` is met.
    """
    if code.dim > EXHAUSTIVE_DIM:
        raise DimensionTooLarge(f"dimension {code.dim} exceeds {EXHAUSTIVE_DIM}")
    if code.dim == 0:
        return DistanceStatus("exact", code.n + 1)
    words = codewords(code)
    return DistanceStatus("exact", int(popcount(words[1:]).min()))


def has_codeword_below(code: LinearCode, d: int) -> bool:
    """True if some nonzero codeword has weight ``< d`` (column-subset search)."""
    cols = syndrome_columns(code)
    for w in range(1, d):
        for subset in itertools.combinations(range(code.n), w):
            acc = 0
            for j in subset:
                acc ^= int(cols[j])
            if acc == 0:
                return True
    return False


def random_full_rank_H(n: int, r: int, rng) -> np.ndarray:
    while True:
        H = rng.integers(0, 2, size=(r, n), dtype=np.uint8)
        if gf2_rank(H) == r:
            return H


def code_dimension(n: int, R) -> int:
    k = Fraction(R) * n
    if k.denominator != 1:
        raise InvalidParameter(f"rate {R} times n={n} is not an integer")
    return int(k)


def sample_code(n: int, R, d_min: int, rng, max_retries: int = 1000, keep_best: int = 1) -> LinearCode:
    """Sample a uniformly random full-row-rank parity-check matrix meeting ``d_min``.

    The distance is verified exactly when the dimension is at most 24 and
    lower-bounded by a weight search otherwise. With ``keep_best > 1`` the
    first ``keep_best`` qualifying codes are drawn and the one with the largest
    exact distance is returned.
    """
    k = code_dimension(n, R)
    if not 0 <= k <= n or d_min > n + 1:
        raise InvalidParameter(f"need 0 <= Rn <= n and d_min <= n, got k={k}, d_min={d_min}")
    best_d = None
    found: list[LinearCode] = []
    for _ in range(max_retries):
        code = LinearCode(n, random_full_rank_H(n, n - k, rng))
        if k <= EXHAUSTIVE_DIM:
            status = min_distance(code)
            best_d = status.d if best_d is None else max(best_d, status.d)
            if status.d >= d_min:
                found.append(code.with_status(status))
        elif not has_codeword_below(code, d_min):
            found.append(code.with_status(DistanceStatus("lower", d_min)))
        if len(found) >= keep_best:
            break
    if not found:
        raise RetriesExhausted(
            f"no [{n},{k}] code with distance >= {d_min} in {max_retries} draws (best {best_d})", best_d
        )
    return max(found, key=lambda c: c.d)


def repetition_code(n: int) -> LinearCode:
    """[n,1] repetition code with parity checks ``x_i + x_{i+1}``."""
    H = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        H[i, i] = H[i, i + 1] = 1
    return LinearCode(n, H, DistanceStatus("exact", n))


def code_from_generator(G) -> LinearCode:
    """Code spanned by the rows of ``G``; ``H`` is a basis of its dual."""
    G = as_bits(G)
    n = G.shape[1]
    dual = generator_matrix(LinearCode(n, G))
    code = LinearCode(n, dual)
    return code.with_status(min_distance(code)) if code.dim <= EXHAUSTIVE_DIM else code


# -- text format ------------------------------------------------------------------------

def serialize_code(code: LinearCode) -> str:
    lines = [f"code {code.n} {code.dim}"]
    lines += [bits_to_str(row) for row in code.H]
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> LinearCode:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("code"):
        raise InvalidParameter("expected header 'code n k'")
    _, n, k = lines[0].split()
    n, k = int(n), int(k)
    rows = lines[1:]
    if len(rows) != n - k or any(len(r) != n or set(r) - {"0", "1"} for r in rows):
        raise InvalidParameter(f"expected {n - k} rows of {n} bits")
    H = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(n - k, n)
    if gf2_rank(H) != n - k:
        raise InvalidParameter("parity-check matrix is not full row rank")
    code = LinearCode(n, H)
    return code.with_status(min_distance(code)) if code.dim <= EXHAUSTIVE_DIM else code
