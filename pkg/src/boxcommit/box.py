"""Binary-output non-signaling boxes.

A box is a conditional distribution ``W(xy|uv)`` over Alice's output ``x`` and
Bob's output ``y`` (both bits) given Alice's input ``u`` and Bob's input ``v``.
All probabilities are exact :class:`fractions.Fraction` values so that the
locality and extremality verdicts never depend on rounding.

Layout conventions used throughout the package:

* ``box.table[u][v]`` is the 4-tuple ``(W(00|uv), W(01|uv), W(10|uv), W(11|uv))``,
  i.e. index ``2*x + y``.
* Rows of the hat matrix are keyed ``(x, u)`` and ordered ``u``-major; columns
  are keyed ``(y, v)`` and ordered ``v``-major (``(0,0), (1,0), (0,1), ...``).
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    BoxSyntaxError,
    DoubleUse,
    InvalidInput,
    InvalidParameter,
    NegativeProbability,
    NonBinaryOutput,
    NotNormalized,
    SignalingToAlice,
    SignalingToBob,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value) -> Fraction:
    """Convert ints, fractions, ``"a/b"`` strings and decimal strings exactly.

    Floats are converted through their shortest ``repr`` so that ``0.1`` means
    one tenth rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class Box:
    """A validated box. Build one with :func:`validate` or a preset."""

    table: tuple[tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...], ...]

    @property
    def n_alice(self) -> int:
        return len(self.table)

    @property
    def n_bob(self) -> int:
        return len(self.table[0])

    def w(self, x: int, y: int, u: int, v: int) -> Fraction:
        return self.table[u][v][2 * x + y]

    def alice_marginal(self, x: int, u: int) -> Fraction:
        row = self.table[u][0]
        return row[2 * x] + row[2 * x + 1]

    def bob_marginal(self, y: int, v: int) -> Fraction:
        row = self.table[0][v]
        return row[y] + row[2 + y]

    @cached_property
    def _float_table(self):
        return tuple(tuple(tuple(float(p) for p in cell) for cell in row) for row in self.table)

    def __repr__(self) -> str:
        return f"Box({self.n_alice}x{self.n_bob})"


def validate(entries) -> Box:
    """Validate a raw entry table and return a :class:`Box`.

    ``entries`` is either a nested sequence ``entries[u][v] = (w00, w01, w10, w11)``
    or a mapping ``(u, v, x, y) -> probability``. Raises the specific
    :class:`~boxcommit.errors.ValidationFailure` subclass naming the violated
    equation.
    """
    table = _normalise_entries(entries)
    nu, nv = len(table), len(table[0])
    for u in range(nu):
        for v in range(nv):
            cell = table[u][v]
            if any(p < 0 for p in cell):
                raise NegativeProbability(f"negative entry in W(..|{u}{v})")
            total = sum(cell)
            if total != 1:
                raise NotNormalized(u, v, total)
    for u in range(nu):
        for x in (0, 1):
            ref = table[u][0][2 * x] + table[u][0][2 * x + 1]
            for v in range(1, nv):
                if table[u][v][2 * x] + table[u][v][2 * x + 1] != ref:
                    raise SignalingToAlice(u, 0, v, x)
    for v in range(nv):
        for y in (0, 1):
            ref = table[0][v][y] + table[0][v][2 + y]
            for u in range(1, nu):
                if table[u][v][y] + table[u][v][2 + y] != ref:
                    raise SignalingToBob(0, u, v, y)
    return Box(table)


def _normalise_entries(entries):
    if isinstance(entries, Mapping):
        keys = list(entries)
        if not keys:
            raise InvalidParameter("empty entry table")
        if any(k[2] not in (0, 1) or k[3] not in (0, 1) for k in keys):
            raise NonBinaryOutput("outputs must be in {0,1}")
        nu = max(k[0] for k in keys) + 1
        nv = max(k[1] for k in keys) + 1
        return tuple(
            tuple(
                tuple(to_fraction(entries.get((u, v, x, y), 0)) for x in (0, 1) for y in (0, 1))
                for v in range(nv)
            )
            for u in range(nu)
        )
    rows = []
    for u_row in entries:
        cells = []
        for cell in u_row:
            cell = tuple(cell)
            if len(cell) != 4:
                raise NonBinaryOutput(f"expected 4 entries per input pair, got {len(cell)}")
            cells.append(tuple(to_fraction(p) for p in cell))
        rows.append(tuple(cells))
    if not rows or not rows[0]:
        raise InvalidParameter("box needs at least one input per party")
    if len({len(r) for r in rows}) != 1:
        raise InvalidParameter("ragged entry table")
    return tuple(rows)


def marginal_alice(box: Box, u: int) -> tuple[Fraction, Fraction]:
    return box.alice_marginal(0, u), box.alice_marginal(1, u)


def marginal_bob(box: Box, v: int) -> tuple[Fraction, Fraction]:
    return box.bob_marginal(0, v), box.bob_marginal(1, v)


# -- hat matrix ----------------------------------------------------------------

@dataclass(frozen=True)
class HatMatrix:
    """Distribution of Bob's ``(y, v)`` given Alice's ``(x, u)``, Bob's input uniform."""

    rows: dict  # (x, u) -> tuple[Fraction, ...] over ``columns``
    undefined_rows: frozenset
    columns: tuple

    def row(self, x: int, u: int) -> tuple[Fraction, ...]:
        return self.rows[(x, u)]

    @property
    def keys(self) -> list[tuple[int, int]]:
        return list(self.rows)


def hat_columns(n_bob: int) -> tuple[tuple[int, int], ...]:
    return tuple((y, v) for v in range(n_bob) for y in (0, 1))


def hat_matrix(box: Box) -> HatMatrix:
    nv = box.n_bob
    cols = hat_columns(nv)
    rows = {}
    undefined = set()
    for u in range(box.n_alice):
        for x in (0, 1):
            wa = box.alice_marginal(x, u)
            if wa == 0:
                undefined.add((x, u))
                continue
            rows[(x, u)] = tuple(box.w(x, y, u, v) / (nv * wa) for (y, v) in cols)
    return HatMatrix(rows, frozenset(undefined), cols)


# -- structural predicates --------------------------------------------------------

class Correlation(enum.Enum):
    PERFECTLY_CORRELATED = "PerfectlyCorrelated"
    PERFECTLY_ANTICORRELATED = "PerfectlyAntiCorrelated"
    NEITHER = "Neither"


def correlation_kind(box: Box, u: int, v: int) -> Correlation:
    w00, w01, w10, w11 = box.table[u][v]
    if w01 == 0 and w10 == 0:
        return Correlation.PERFECTLY_CORRELATED
    if w00 == 0 and w11 == 0:
        return Correlation.PERFECTLY_ANTICORRELATED
    return Correlation.NEITHER


def perfectly_correlated_pairs(box: Box) -> list[tuple[int, int]]:
    """All ``(u, v)`` where the outputs are perfectly (anti-)correlated."""
    return [
        (u, v)
        for u in range(box.n_alice)
        for v in range(box.n_bob)
        if correlation_kind(box, u, v) is not Correlation.NEITHER
    ]


def redundant_inputs(box: Box) -> set[int]:
    out = set()
    for u, u2 in itertools.combinations(range(box.n_alice), 2):
        if box.table[u] == box.table[u2]:
            out.update((u, u2))
    return out


def is_independent(box: Box) -> bool:
    """True when ``W(xy|uv) = W^A(x|u) W^B(y|v)`` everywhere."""
    return all(
        box.w(x, y, u, v) == box.alice_marginal(x, u) * box.bob_marginal(y, v)
        for u in range(box.n_alice)
        for v in range(box.n_bob)
        for x in (0, 1)
        for y in (0, 1)
    )


def restrict_alice(box: Box, inputs: Sequence[int]) -> Box:
    """Sub-box keeping only the listed Alice inputs (relabelled 0..k-1)."""
    return Box(tuple(box.table[u] for u in inputs))


# -- local decompositions -------------------------------------------------------------

@dataclass(frozen=True)
class LocalTerm:
    """One product strategy: ``alice[u] = (V_A(0|u), V_A(1|u))``, ``bob[v]`` likewise."""

    weight: Fraction
    alice: tuple[tuple[Fraction, Fraction], ...]
    bob: tuple[tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class LocalDecomposition:
    terms: tuple[LocalTerm, ...]

    def induced_table(self):
        """Exact table of ``sum_i p_i V_A^i(x|u) V_B^i(y|v)``."""
        first = self.terms[0]
        nu, nv = len(first.alice), len(first.bob)
        return tuple(
            tuple(
                tuple(
                    sum((t.weight * t.alice[u][x] * t.bob[v][y] for t in self.terms), ZERO)
                    for x in (0, 1)
                    for y in (0, 1)
                )
                for v in range(nv)
            )
            for u in range(nu)
        )

    def is_valid(self) -> bool:
        if sum(t.weight for t in self.terms) != 1 or any(t.weight < 0 for t in self.terms):
            return False
        for t in self.terms:
            for p0, p1 in (*t.alice, *t.bob):
                if p0 < 0 or p1 < 0 or p0 + p1 != 1:
                    return False
        return True

    def reproduces(self, box: Box) -> bool:
        return self.is_valid() and self.induced_table() == box.table


class SharedRandomnessSimulator:
    """Two non-communicating parties sharing the index of one decomposition term.

    The shared index is drawn once, with probability equal to the term weight;
    afterwards ``alice(u)`` and ``bob(v)`` answer with local randomness only.
    """

    def __init__(self, decomp: LocalDecomposition, rng):
        self.decomp = decomp
        self._rng = rng
        r = rng.random()
        acc = 0.0
        self.index = len(decomp.terms) - 1
        for i, term in enumerate(decomp.terms):
            acc += float(term.weight)
            if r < acc:
                self.index = i
                break

    @property
    def term(self) -> LocalTerm:
        return self.decomp.terms[self.index]

    def alice(self, u: int) -> int:
        return int(self._rng.random() >= float(self.term.alice[u][0]))

    def bob(self, v: int) -> int:
        return int(self._rng.random() >= float(self.term.bob[v][0]))


def simulate_from_decomposition(decomp: LocalDecomposition, rng):
    """Return ``(alice, bob)`` local strategies that jointly implement the box."""
    sim = SharedRandomnessSimulator(decomp, rng)
    return sim.alice, sim.bob


def deterministic_strategies(n_inputs: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=n_inputs))


# -- single-use instances ------------------------------------------------------------

class Side(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass
class BoxInstance:
    """One physical copy of a box. Each side may input exactly once."""

    box: Box
    alice_state: tuple[int, int] | None = None  # (u, x) once used
    bob_state: tuple[int, int] | None = None  # (v, y) once used
    phase: str = "commit"
    usage_log: list = field(default_factory=list)

    @property
    def used_by_alice(self) -> bool:
        return self.alice_state is not None

    @property
    def used_by_bob(self) -> bool:
        return self.bob_state is not None


def use_box(instance: BoxInstance, side, inp: int, rng, phase: str | None = None) -> int:
    """Give ``inp`` on ``side`` and return that side's output bit.

    If the other side has already used the instance the output is drawn from
    the exact conditional given the other side's recorded input and output;
    otherwise from this side's marginal.
    """
    side = Side(side)
    box = instance.box
    ft = box._float_table
    if side is Side.ALICE:
        if instance.alice_state is not None:
            raise DoubleUse("Alice already used this box")
        if not 0 <= inp < box.n_alice:
            raise InvalidInput(f"Alice input {inp} outside 0..{box.n_alice - 1}")
        if instance.bob_state is None:
            cell = ft[inp][0]
            p0 = cell[0] + cell[1]
        else:
            v, y = instance.bob_state
            cell = ft[inp][v]
            p0 = cell[y] / (cell[y] + cell[2 + y])
        out = int(rng.random() >= p0)
        instance.alice_state = (inp, out)
    else:
        if instance.bob_state is not None:
            raise DoubleUse("Bob already used this box")
        if not 0 <= inp < box.n_bob:
            raise InvalidInput(f"Bob input {inp} outside 0..{box.n_bob - 1}")
        if instance.alice_state is None:
            cell = ft[0][inp]
            p0 = cell[0] + cell[2]
        else:
            u, x = instance.alice_state
            cell = ft[u][inp]
            p0 = cell[2 * x] / (cell[2 * x] + cell[2 * x + 1])
        out = int(rng.random() >= p0)
        instance.bob_state = (inp, out)
    instance.usage_log.append((side.value, inp, out, phase or instance.phase))
    return out


# -- presets ---------------------------------------------------------------------------

def pr_box() -> Box:
    half = Fraction(1, 2)
    return validate(
        [[tuple(half if (x ^ y) == (u & v) else ZERO for x in (0, 1) for y in (0, 1))
          for v in (0, 1)] for u in (0, 1)]
    )


def shared_bit(n_alice: int = 2, n_bob: int = 2, anti: bool = False) -> Box:
    half = Fraction(1, 2)
    cell = (ZERO, half, half, ZERO) if anti else (half, ZERO, ZERO, half)
    return validate([[cell] * n_bob for _ in range(n_alice)])


def correlated_bit(p) -> Box:
    """Single-input box: ``x`` uniform, ``y = x XOR e`` with ``Pr[e=1] = p``."""
    p = to_fraction(p)
    if not 0 <= p <= 1:
        raise InvalidParameter(f"flip probability {p} outside [0,1]")
    half = Fraction(1, 2)
    return validate([[(half * (1 - p), half * p, half * p, half * (1 - p))]])


def product(alice, bob) -> Box:
    """Independent box from stochastic matrices given as ``[(V(0|u), V(1|u)), ...]``."""
    alice = [tuple(to_fraction(p) for p in r) for r in alice]
    bob = [tuple(to_fraction(p) for p in r) for r in bob]
    for r in (*alice, *bob):
        if len(r) != 2 or any(p < 0 for p in r) or sum(r) != 1:
            raise InvalidParameter(f"not a stochastic row over {{0,1}}: {r}")
    return validate(
        [[tuple(a[x] * b[y] for x in (0, 1) for y in (0, 1)) for b in bob] for a in alice]
    )


def mixture(components: Iterable[tuple]) -> Box:
    """Convex combination of boxes with identical input alphabets."""
    components = [(to_fraction(w), b) for w, b in components]
    if not components or any(w < 0 for w, _ in components) or sum(w for w, _ in components) != 1:
        raise InvalidParameter("mixture weights must be non-negative and sum to 1")
    shape = {(b.n_alice, b.n_bob) for _, b in components}
    if len(shape) != 1:
        raise InvalidParameter("mixture components have different input alphabets")
    first = components[0][1]
    return validate(
        [[tuple(sum((w * b.table[u][v][i] for w, b in components), ZERO) for i in range(4))
          for v in range(first.n_bob)] for u in range(first.n_alice)]
    )


def preset(name: str, **params) -> Box:
    """Look up a preset by name: pr_box, shared_bit, anti_shared_bit,
    correlated_bit(p), product(alice, bob), mixture(components)."""
    if name == "pr_box":
        return pr_box()
    if name == "shared_bit":
        return shared_bit(**params)
    if name == "anti_shared_bit":
        return shared_bit(anti=True, **params)
    if name == "correlated_bit":
        if "p" not in params:
            raise InvalidParameter("correlated_bit needs p")
        return correlated_bit(params["p"])
    if name == "product":
        return product(params["alice"], params["bob"])
    if name == "mixture":
        return mixture(params["components"])
    raise InvalidParameter(f"unknown preset {name!r}")


_PRESET_SPEC = re.compile(r"^(correlated_bit)[_:(]?([0-9./]+)\)?$")


def preset_from_spec(spec: str) -> Box:
    """Parse CLI-style preset names such as ``pr_box`` or ``correlated_bit_0.1``."""
    m = _PRESET_SPEC.match(spec)
    if m:
        return correlated_bit(m.group(2))
    return preset(spec)


def random_box(rng, n_alice: int = 2, n_bob: int = 2, denominator: int = 16) -> Box:
    """Random box with entries on the grid ``1/denominator``.

    Every binary-output non-signaling box is fixed by Alice's marginals
    ``a_u = W^A(0|u)``, Bob's marginals ``b_v = W^B(0|v)`` and the joint
    ``c_uv = W(00|uv)``; these are drawn uniformly on the grid subject to
    non-negativity of the four entries.
    """
    D = denominator
    a = [int(rng.integers(0, D + 1)) for _ in range(n_alice)]
    b = [int(rng.integers(0, D + 1)) for _ in range(n_bob)]
    table = []
    for u in range(n_alice):
        row = []
        for v in range(n_bob):
            lo, hi = max(0, a[u] + b[v] - D), min(a[u], b[v])
            c = int(rng.integers(lo, hi + 1))
            row.append(tuple(Fraction(k, D) for k in (c, a[u] - c, b[v] - c, D - a[u] - b[v] + c)))
        table.append(row)
    return validate(table)


# -- text format ---------------------------------------------------------------------

def serialize_box(box: Box) -> str:
    lines = [f"box {box.n_alice} {box.n_bob}"]
    for u in range(box.n_alice):
        for v in range(box.n_bob):
            lines.append(f"{u} {v} : " + " ".join(_fmt_fraction(p) for p in box.table[u][v]))
    return "\n".join(lines) + "\n"


def _fmt_fraction(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def parse_box(text: str) -> Box:
    """Parse the line-oriented box format; see :func:`serialize_box`."""
    header = None
    cells = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if parts[0] != "box" or len(parts) not in (3, 4):
                raise BoxSyntaxError(lineno, "expected header 'box |U| |V|'")
            try:
                nu, nv = int(parts[1]), int(parts[2])
                outputs = int(parts[3]) if len(parts) == 4 else 2
            except ValueError:
                raise BoxSyntaxError(lineno, "alphabet sizes must be integers") from None
            if outputs != 2:
                raise NonBinaryOutput(f"declared {outputs} output symbols; only binary outputs are supported")
            if nu < 1 or nv < 1:
                raise BoxSyntaxError(lineno, "alphabet sizes must be positive")
            header = (nu, nv)
            continue
        if ":" not in line:
            raise BoxSyntaxError(lineno, "expected 'u v : w00 w01 w10 w11'")
        lhs, rhs = line.split(":", 1)
        try:
            u, v = (int(t) for t in lhs.split())
        except ValueError:
            raise BoxSyntaxError(lineno, "expected two integer inputs before ':'") from None
        values = rhs.split()
        if len(values) != 4:
            if len(values) > 4 and int(len(values) ** 0.5) ** 2 == len(values):
                raise NonBinaryOutput(f"line {lineno}: {len(values)} entries imply a non-binary output alphabet")
            raise BoxSyntaxError(lineno, f"expected 4 probabilities, got {len(values)}")
        if not (0 <= u < header[0] and 0 <= v < header[1]):
            raise BoxSyntaxError(lineno, f"input pair ({u},{v}) outside declared alphabets")
        if (u, v) in cells:
            raise BoxSyntaxError(lineno, f"duplicate input pair ({u},{v})")
        try:
            cells[(u, v)] = tuple(to_fraction(t) for t in values)
        except (ValueError, ZeroDivisionError):
            raise BoxSyntaxError(lineno, "unparseable probability") from None
    if header is None:
        raise BoxSyntaxError(1, "missing header")
    nu, nv = header
    missing = [(u, v) for u in range(nu) for v in range(nv) if (u, v) not in cells]
    if missing:
        raise BoxSyntaxError(0, f"missing input pairs {missing}")
    return validate([[cells[(u, v)] for v in range(nv)] for u in range(nu)])
