"""Reports: ordered sections of tagged values, rendered as text or ``key=value`` lines.

Structured schema (one record per line, UTF-8, ``\\n`` endings)::

    header.tool=boxcommit
    header.version=<version>
    header.command=<argv echo>
    header.seed=0x<hex>
    <section>.<key>=<tag>:<payload>

Sections appear in insertion order; a section name never contains ``.`` and a
key never contains ``=``. Tags:

``exact``     exact rational ``a/b`` or integer
``num``       deterministic floating-point evaluation, 6 significant digits
``rate``      ``<rate>;ci95=<low>..<high>;k=<successes>;n=<trials>``
``mean``      ``<mean>;se=<stderr>;ci3s=<low>..<high>;n=<views>``
``bound``     ``<value>;vacuous=<true|false>``
``text``      free text without newlines
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__


def sig6(x: float) -> str:
    """Six significant digits, no trailing noise."""
    if x == 0:
        return "0"
    if not math.isfinite(x):
        return str(x)
    return f"{x:.6g}"


def frac_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Value:
    tag: str
    payload: str

    def structured(self) -> str:
        return f"{self.tag}:{self.payload}"

    def text(self) -> str:
        if self.tag in ("text", "exact", "num"):
            return self.payload
        head, *rest = self.payload.split(";")
        return f"{head}  ({', '.join(rest)})" if rest else head


def exact(q) -> Value:
    return Value("exact", frac_str(q))


def num(x: float) -> Value:
    return Value("num", sig6(float(x)))


def text(s) -> Value:
    return Value("text", str(s).replace("\n", " "))


def rate(successes: int, trials: int, low: float, high: float) -> Value:
    r = successes / trials if trials else float("nan")
    return Value("rate", f"{sig6(r)};ci95={sig6(low)}..{sig6(high)};k={successes};n={trials}")


def mean(m: float, se: float, n: int) -> Value:
    return Value("mean", f"{sig6(m)};se={sig6(se)};ci3s={sig6(m - 3 * se)}..{sig6(m + 3 * se)};n={n}")


def bound(value: float, vacuous: bool) -> Value:
    return Value("bound", f"{sig6(value)};vacuous={'true' if vacuous else 'false'}")


@dataclass
class Section:
    name: str
    records: list = field(default_factory=list)

    def add(self, key: str, value: Value) -> "Section":
        if "=" in key or "\n" in key:
            raise ValueError(f"bad report key {key!r}")
        self.records.append((key, value))
        return self

    def get(self, key: str) -> Value:
        for k, v in self.records:
            if k == key:
                return v
        raise KeyError(key)


@dataclass
class Report:
    command: str
    seed: int
    sections: list = field(default_factory=list)
    tool: str = "boxcommit"
    version: str = __version__

    def section(self, name: str) -> Section:
        if "." in name:
            raise ValueError(f"section names may not contain '.': {name!r}")
        for s in self.sections:
            if s.name == name:
                return s
        s = Section(name)
        self.sections.append(s)
        return s


def emit_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "structured":
        lines = [
            f"header.tool={report.tool}",
            f"header.version={report.version}",
            f"header.command={report.command}",
            f"header.seed=0x{report.seed:x}",
        ]
        for s in report.sections:
            lines += [f"{s.name}.{k}={v.structured()}" for k, v in s.records]
        return ("\n".join(lines) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"{report.tool} {report.version}", f"command: {report.command}", f"seed: 0x{report.seed:x}"]
    for s in report.sections:
        lines += ["", f"[{s.name}]"]
        width = max((len(k) for k, _ in s.records), default=0)
        lines += [f"  {k.ljust(width)}  {v.text()}" for k, v in s.records]
    return ("\n".join(lines) + "\n").encode()


def parse_structured(data: bytes | str) -> Report:
    """Inverse of ``emit_report(..., "structured")``."""
    if isinstance(data, bytes):
        data = data.decode()
    header = {}
    report = None
    for line in data.split("\n"):
        if not line:
            continue
        path, _, rhs = line.partition("=")
        sec, _, key = path.partition(".")
        if sec == "header":
            header[key] = rhs
            continue
        if report is None:
            report = _header_report(header)
        tag, _, payload = rhs.partition(":")
        report.section(sec).add(key, Value(tag, payload))
    return report if report is not None else _header_report(header)


def _header_report(header: dict) -> Report:
    return Report(header.get("command", ""), int(header.get("seed", "0x0"), 16),
                  tool=header.get("tool", "boxcommit"), version=header.get("version", __version__))
