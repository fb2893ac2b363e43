"""Command-line front end: ``boxcommit {classify,simulate,attack,bounds,gen-box}``.

Every random choice is drawn from streams derived from ``--seed``: stream
``(seed, 0)`` samples codes, ``(seed, 1, i)`` drives trial ``i`` and
``(seed, 2)`` drives hiding views and box generation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction

from . import __version__
from . import report as rp
from .adversary import (
    AliceAttack, MLDistinguisher, binding_rate, delay_bound, hiding_advantage_exact, delay_tail_bound,
)
from .box import Box, parse_box, preset_from_spec, random_box, serialize_box
from .classify import ProtocolI, ProtocolII, Trivial, classify, verify_certificate
from .errors import BoxCommitError, InfeasibleAtThisN, InvalidParameter
from .infostats import BOUND_IDS, evaluate_bound
from .protocol import correctness_bounds, honest_session, schedule_protocol1, schedule_protocol2
from .rng import parse_seed, stream

# used when the asymptotic schedule has no solution at the requested n
DESK_DEFAULTS = {
    1: {"k": 2, "epsilon": Fraction(1, 4), "d": 5, "l": 2, "dim": 1, "keep_best": 50},
    2: {"k1": 2, "epsilon": Fraction(1, 4), "d": 7, "l": 2},
}
INT_KEYS = {"k", "k1", "d", "l", "dim", "keep_best", "x", "u", "u0", "u1"}


def load_box(arg: str) -> tuple[str, Box]:
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return os.path.basename(arg), parse_box(fh.read())
    return arg, preset_from_spec(arg)


def parse_params(text: str | None) -> dict:
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep:
            raise InvalidParameter(f"parameter {item!r} is not key=value")
        out[key] = int(val) if key in INT_KEYS else Fraction(val.strip())
    return out


def _bits(text: str | None, l: int) -> tuple[int, ...]:
    if text is None:
        return (0,) * l
    if set(text) - {"0", "1"} or len(text) != l:
        raise InvalidParameter(f"--b must be {l} bits, got {text!r}")
    return tuple(int(c) for c in text)


# -- scheduling ---------------------------------------------------------------------

def build_params(box: Box, protocol: int, n: int, overrides: dict, seed: int, force: bool, sec: rp.Section):
    """Schedule a protocol from the classifier's certificate; falls back to desk defaults."""
    res = classify(box)
    v = res.verdict
    sec.add("verdict", rp.text(v.name))
    overrides = dict(overrides)
    place = {k: overrides.pop(k) for k in ("x", "u", "u0", "u1") if k in overrides}
    if protocol == 1:
        if isinstance(v, ProtocolI):
            a, delta, gamma = v.a, v.delta, v.gamma
        elif force:
            a, delta, gamma = (place.get("x", 0), place.get("u", 0)), None, None
        else:
            raise InvalidParameter(f"box classified {v.name}; Protocol I needs an extreme row with gamma > 0 (use --force)")
        a = (place.get("x", a[0]), place.get("u", a[1]))
        sched = lambda ov: schedule_protocol1(box, a, n, ov, rng=stream(seed, 0), delta=delta, gamma=gamma,
                                              force=force)
    else:
        if isinstance(v, ProtocolII):
            u0, u1, delta = v.u0, v.u1, v.delta
        elif force:
            u0, u1, delta = 0, 1, None
        else:
            raise InvalidParameter(f"box classified {v.name}; Protocol II needs two inputs with binding extreme rows (use --force)")
        u0, u1 = place.get("u0", u0), place.get("u1", u1)
        sched = lambda ov: schedule_protocol2(box, u0, u1, n, ov, rng=stream(seed, 0), delta=delta, force=force)
    if not overrides and not force:
        try:
            return sched({})
        except InfeasibleAtThisN as e:
            sec.add("auto", rp.text(f"infeasible: {e}"))
            for k, val in sorted(e.partial.items()):
                sec.add(f"auto_{k}", _tagged(val))
            overrides = dict(DESK_DEFAULTS[protocol])
    elif not overrides:
        overrides = dict(DESK_DEFAULTS[protocol])
    return sched(overrides)


def _tagged(val) -> rp.Value:
    if isinstance(val, (int, Fraction)):
        return rp.exact(val)
    return rp.num(val)


def describe_params(params, sec: rp.Section):
    sec.add("mode", rp.text(params.mode))
    sec.add("n", rp.exact(params.n))
    if params.protocol == 1:
        sec.add("a", rp.text(f"({params.a[0]},{params.a[1]})"))
        sec.add("k", rp.exact(params.k))
        sec.add("gamma", rp.num(params.gamma))
    else:
        sec.add("u0", rp.exact(params.u0))
        sec.add("u1", rp.exact(params.u1))
        sec.add("k1", rp.exact(params.k1))
        sec.add("k2", rp.exact(params.k2))
        sec.add("p0", rp.exact(params.p0))
    sec.add("epsilon", rp.exact(params.epsilon))
    sec.add("lambda", rp.exact(params.lam))
    sec.add("delta", rp.exact(params.delta))
    sec.add("code", rp.text(f"[{params.code.n},{params.code.dim}]"))
    sec.add("distance", rp.text(str(params.code.distance_status)))
    sec.add("l", rp.exact(params.l))
    for i, w in enumerate(params.warnings):
        sec.add(f"warning_{i}", rp.text(w))


def _add_bound(sec: rp.Section, key: str, bv):
    sec.add(key, rp.bound(bv.value, bv.vacuous))


# -- subcommands ---------------------------------------------------------------------

def cmd_classify(args, report: rp.Report):
    name, box = load_box(args.box)
    res = classify(box)
    v = res.verdict
    sec = report.section("classify")
    sec.add("box", rp.text(name))
    sec.add("verdict", rp.text(v.name))
    sec.add("case", rp.text(res.case))
    if isinstance(v, ProtocolI):
        sec.add("a", rp.text(f"({v.a[0]},{v.a[1]})"))
        sec.add("delta", rp.exact(v.delta))
        sec.add("gamma", rp.num(v.gamma))
    elif isinstance(v, ProtocolII):
        sec.add("variant", rp.text(v.variant.name))
        sec.add("u0", rp.exact(v.u0))
        sec.add("u1", rp.exact(v.u1))
        sec.add("delta", rp.exact(v.delta))
        if v.variant.name == "Cond3":
            c0 = v.variant.c0
            sec.add("c0", rp.text("none" if c0 is None else f"({c0[0]},{c0[1]})"))
        else:
            sec.add("x0", rp.exact(v.variant.x0))
            sec.add("x1", rp.exact(v.variant.x1))
    else:
        sec.add("reason", rp.text(v.reason))
        ri = v.revealing_inputs
        sec.add("revealing_inputs", rp.text("none" if ri is None else f"({ri[0]},{ri[1]})"))
    sec.add("certificate_verified", rp.text(str(verify_certificate(box, res)).lower()))
    for i, rem in enumerate(res.reduction_trace):
        sec.add(f"removed_{i}", rp.text(rem.describe()))
    sec.add("kept_inputs", rp.text(" ".join(str(u) for u in res.kept_inputs)))
    for key in sorted(res.extremality.rows):
        sec.add(f"margin_x{key[0]}_u{res.kept_inputs[key[1]]}", rp.exact(res.extremality.margin(key)))
    if res.local_model is not None:
        dec = report.section("decomposition")
        dec.add("terms", rp.exact(len(res.local_model.terms)))
        dec.add("reproduces", rp.text(str(res.local_model.reproduces(box)).lower()))
        for i, t in enumerate(res.local_model.terms):
            dec.add(f"term_{i}_weight", rp.exact(t.weight))
            dec.add(f"term_{i}_alice", rp.text(_strategy(t.alice)))
            dec.add(f"term_{i}_bob", rp.text(_strategy(t.bob)))
    for i, note in enumerate(res.notes):
        sec.add(f"note_{i}", rp.text(note))


def _strategy(probs) -> str:
    """Per-input probability of output 0."""
    return " ".join(rp.frac_str(p[0]) for p in probs)


def cmd_simulate(args, report: rp.Report):
    name, box = load_box(args.box)
    sched = report.section("schedule")
    sched.add("box", rp.text(name))
    sched.add("protocol", rp.exact(args.protocol))
    params = build_params(box, args.protocol, args.n, parse_params(args.params), args.seed, args.force, sched)
    describe_params(params, sched)
    b = _bits(args.b, params.l)
    trials = report.section("trials")
    reasons: dict[str, int] = {}
    wins = 0
    for i in range(args.trials):
        verdict, *_ = honest_session(box, params, b, stream(args.seed, 1, i))
        ok = verdict.accepted and verdict.b == b
        wins += ok
        reasons[verdict.reason] = reasons.get(verdict.reason, 0) + 1
        trials.add(f"t{i:05d}", rp.text("accept" if ok else f"reject:{verdict.reason}"))
    agg = report.section("aggregate")
    from .adversary import wilson

    lo, hi = wilson(wins, args.trials)
    agg.add("acceptance", rp.rate(wins, args.trials, lo, hi))
    for reason in sorted(reasons):
        agg.add(f"count_{reason}", rp.exact(reasons[reason]))
    for key, bv in correctness_bounds(params, box).items():
        _add_bound(agg, f"bound_{key}", bv)


def _parse_strategy(text: str) -> tuple[str, int]:
    kind, _, arg = text.partition(":")
    if kind in ("flip", "flip-offcoset", "delay"):
        if not arg:
            raise InvalidParameter(f"strategy {kind} needs a budget, e.g. {kind}:3")
        return kind, int(arg)
    if kind in ("equivocate", "ml-distinguish", "identity"):
        return kind, 0
    raise InvalidParameter(f"unknown strategy {text!r}")


def cmd_attack(args, report: rp.Report):
    name, box = load_box(args.box)
    sched = report.section("schedule")
    sched.add("box", rp.text(name))
    sched.add("protocol", rp.exact(args.protocol))
    params = build_params(box, args.protocol, args.n, parse_params(args.params), args.seed, args.force, sched)
    describe_params(params, sched)
    kind, budget = _parse_strategy(args.strategy)
    sec = report.section("attack")
    sec.add("strategy", rp.text(args.strategy))
    b = _bits(args.b, params.l)
    if kind == "ml-distinguish":
        b1 = tuple(1 - v for v in b)
        res = hiding_advantage_exact(box, params, MLDistinguisher(), b, b1, args.trials, stream(args.seed, 2))
        sec.add("best_bob_strategy", rp.text(res.strategy))
        sec.add("hiding_distance", rp.mean(res.distance, res.stderr, res.views))
        # leftover-hash scale: entropy left after the syndromes, minus the key length
        h = params.code.dim if params.protocol == 2 else params.gamma * params.n - params.code.redundancy
        eps = 2.0 ** (-(h - params.l) / 2)
        sec.add("bound_leftover_eps", rp.bound(eps, eps >= 1))
        return
    if kind == "delay" and params.protocol != 2:
        raise InvalidParameter("the delay strategy applies to Protocol II")
    attack = AliceAttack(kind, budget)
    res = binding_rate(box, params, attack, args.trials, stream(args.seed, 1), b)
    label = "double_opening" if kind == "equivocate" else "acceptance"
    sec.add(label, rp.rate(res.successes, res.trials, res.low, res.high))
    for reason in sorted(res.reasons):
        sec.add(f"count_{reason}", rp.exact(res.reasons[reason]))
    if kind == "flip" and budget > 0:
        kappa = min(Fraction(1), Fraction(params.k if params.protocol == 1 else params.k1, params.n))
        bv = evaluate_bound("statlemma", n=params.n, lam=params.lam, delta=params.delta, kappa=kappa,
                            z_size=2 * box.n_bob)
        _add_bound(sec, "bound_statlemma", bv)
    if kind == "delay":
        sec.add("bound_ball_mass", rp.bound(delay_bound(box, params), False))
        m = budget
        if m * params.p0 >= 0 and m > 0:
            bv = delay_tail_bound(params, m)
            _add_bound(sec, "bound_binom_tail", bv)
            sec.add("binom_tail_exact", rp.exact(bv.extras["exact"]))
        sec.add("k2", rp.exact(params.k2))
    if kind == "identity":
        for key, bv in correctness_bounds(params, box).items():
            _add_bound(sec, f"bound_{key}", bv)


def cmd_bounds(args, report: rp.Report):
    kv = {}
    for item in args.assignments:
        key, sep, val = item.partition("=")
        if not sep:
            raise InvalidParameter(f"expected key=value, got {item!r}")
        kv[key] = Fraction(val)
    ints = {"n", "k", "x_size", "z_size", "y_size"}
    params = {k: (int(v) if k in ints else v) for k, v in kv.items()}
    bv = evaluate_bound(args.bound_id, **params)
    sec = report.section("bound")
    sec.add("id", rp.text(bv.bound_id))
    for k in sorted(kv):
        sec.add(f"param_{k}", rp.exact(kv[k]))
    _add_bound(sec, "value", bv)
    for k, v in sorted(bv.extras.items()):
        if isinstance(v, Fraction):
            sec.add(k, rp.exact(v))
            if k == "exact":
                sec.add(f"{k}_decimal", rp.num(float(v)))
        else:
            sec.add(k, rp.num(v))


def cmd_gen_box(args) -> bytes:
    if args.kind == "random":
        box = random_box(stream(args.seed, 2), args.n_alice, args.n_bob, args.denominator)
        what = f"random {args.n_alice}x{args.n_bob} denominator {args.denominator}"
    else:
        if not args.name:
            raise InvalidParameter("gen-box preset needs a name")
        box = preset_from_spec(args.name)
        what = f"preset {args.name}"
    head = f"# boxcommit {__version__} gen-box {what} seed 0x{args.seed:x}\n"
    return (head + serialize_box(box)).encode()


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxcommit", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=parse_seed, default=0, help="master seed (hex)")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--version", action="version", version=f"boxcommit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a box (preset name or box file)")
    c.add_argument("box")

    for name in ("simulate", "attack"):
        s = sub.add_parser(name, help="run honest sessions" if name == "simulate" else "run an attack")
        s.add_argument("--protocol", type=int, choices=(1, 2), required=True)
        s.add_argument("--box", required=True)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--trials", type=int, default=100)
        s.add_argument("--params", help="overrides, e.g. k=2,d=5,l=2,epsilon=1/4")
        s.add_argument("--b", help="committed bit string (default all zeros)")
        s.add_argument("--force", action="store_true", help="schedule even if the classifier forbids it")
        if name == "attack":
            s.add_argument("--strategy", required=True,
                           help="flip:t | flip-offcoset:t | delay:m | equivocate | ml-distinguish | identity")

    bd = sub.add_parser("bounds", help="evaluate a closed-form bound")
    bd.add_argument("bound_id", choices=BOUND_IDS)
    bd.add_argument("assignments", nargs="*", help="key=value parameters")

    g = sub.add_parser("gen-box", help="emit a box file")
    g.add_argument("kind", choices=("random", "preset"))
    g.add_argument("name", nargs="?")
    g.add_argument("--n-alice", type=int, default=2)
    g.add_argument("--n-bob", type=int, default=2)
    g.add_argument("--denominator", type=int, default=16)
    return p


def _command_echo(argv: list[str]) -> str:
    """The argument list minus flags that only affect where and how output goes."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--out", "--format"):
            skip = True
            continue
        if tok.startswith(("--out=", "--format=")):
            continue
        out.append(tok)
    return " ".join(out)


def run(args, argv: list[str]) -> bytes:
    if args.command == "gen-box":
        return cmd_gen_box(args)
    report = rp.Report(_command_echo(argv), args.seed)
    {"classify": cmd_classify, "simulate": cmd_simulate, "attack": cmd_attack,
     "bounds": cmd_bounds}[args.command](args, report)
    return rp.emit_report(report, args.format)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        data = run(args, argv)
    except (BoxCommitError, OSError, ValueError, ZeroDivisionError) as e:
        print(f"boxcommit {args.command}: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
