import subprocess
import sys

import pytest

from boxcommit import report as rp
from boxcommit.box import parse_box, pr_box
from boxcommit.cli import main


def _run(capsysbinary, *argv):
    code = main(list(argv))
    out = capsysbinary.readouterr()
    return code, out.out, out.err


def test_classify_pr_box(capsysbinary):
    code, out, _ = _run(capsysbinary, "--format", "structured", "classify", "pr_box")
    assert code == 0
    rep = rp.parse_structured(out)
    sec = rep.section("classify")
    assert sec.get("verdict").payload == "ProtocolII"
    assert sec.get("certificate_verified").payload == "true"
    assert rep.command == "classify pr_box"


def test_classify_shared_bit_forbidden(capsysbinary):
    code, out, _ = _run(capsysbinary, "--format", "structured", "classify", "shared_bit")
    sec = rp.parse_structured(out).section("classify")
    assert sec.get("verdict").payload == "Trivial"
    assert rp.parse_structured(out).section("decomposition").get("reproduces").payload == "true"


def test_bounds_binom_tail(capsysbinary):
    code, out, _ = _run(capsysbinary, "--format", "structured", "bounds", "binom_tail", "n=10", "p=1/2", "k=2")
    sec = rp.parse_structured(out).section("bound")
    assert sec.get("exact").payload == "7/128"
    assert sec.get("value").payload == "0.5;vacuous=false"


def test_simulate_is_deterministic(capsysbinary, tmp_path):
    argv = ["--seed", "1f", "--format", "structured", "simulate", "--protocol", "1", "--box", "correlated_bit_0.1",
            "--n", "12", "--trials", "5", "--params", "k=2,epsilon=1/4,d=5,l=2,dim=1"]
    a = _run(capsysbinary, *argv)[1]
    b = _run(capsysbinary, *argv)[1]
    assert a == b
    c = _run(capsysbinary, *[("20" if t == "1f" else t) for t in argv])[1]
    assert a != c
    assert main(["--out", str(tmp_path / "r.txt")] + argv) == 0
    capsysbinary.readouterr()
    assert (tmp_path / "r.txt").read_bytes() == a
    rep = rp.parse_structured(a)
    assert rep.seed == 0x1F and "--out" not in rep.command
    assert rep.section("schedule").get("mode").payload == "desk"


def test_attack_delay_reports_bounds(capsysbinary):
    code, out, _ = _run(capsysbinary, "--format", "structured", "attack", "--protocol", "2", "--box", "pr_box",
                        "--n", "12", "--trials", "10", "--strategy", "delay:12")
    sec = rp.parse_structured(out).section("attack")
    assert sec.get("bound_ball_mass").payload == "0.0771484;vacuous=false"
    assert sec.get("binom_tail_exact").payload == "79/4096"


def test_errors_exit_nonzero(capsysbinary):
    code, _, err = _run(capsysbinary, "classify", "no_such_box")
    assert code == 2 and b"error" in err
    code, _, err = _run(capsysbinary, "bounds", "binom_tail", "n=10")
    assert code == 2


def test_gen_box_round_trip(capsysbinary, tmp_path):
    code, out, _ = _run(capsysbinary, "gen-box", "preset", "pr_box")
    assert parse_box(out.decode()) == pr_box()
    code, out, _ = _run(capsysbinary, "--seed", "5", "gen-box", "random")
    path = tmp_path / "b.box"
    path.write_bytes(out)
    code, rep, _ = _run(capsysbinary, "--format", "structured", "classify", str(path))
    assert code == 0 and rp.parse_structured(rep).section("classify").get("box").payload == "b.box"


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "boxcommit.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "boxcommit 0.1.0" in out.stdout
