from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from boxcommit import report as rp


def test_sig6():
    assert rp.sig6(0) == "0"
    assert rp.sig6(0.0771484375) == "0.0771484"
    assert rp.sig6(123456789.0) == "1.23457e+08"
    assert rp.sig6(0.25) == "0.25"


def test_frac_str():
    assert rp.frac_str(F(6, 8)) == "3/4"
    assert rp.frac_str(F(4, 2)) == "2"
    assert rp.frac_str(-3) == "-3"


def test_tagged_payloads():
    assert rp.rate(2, 3, 0.20766, 0.938508).structured() == "rate:0.666667;ci95=0.20766..0.938508;k=2;n=3"
    assert rp.bound(1.5, True).structured() == "bound:1.5;vacuous=true"
    assert rp.mean(0.5, 0.1, 10).structured() == "mean:0.5;se=0.1;ci3s=0.2..0.8;n=10"
    assert rp.text("a\nb").payload == "a b"


def test_header_only_report():
    r = rp.Report("classify pr_box", 0xbeef)
    data = rp.emit_report(r, "structured")
    assert data == b"header.tool=boxcommit\nheader.version=0.1.0\nheader.command=classify pr_box\nheader.seed=0xbeef\n"
    back = rp.parse_structured(data)
    assert back.seed == 0xbeef and back.sections == []


def test_bad_names_rejected():
    r = rp.Report("x", 0)
    with pytest.raises(ValueError):
        r.section("a.b")
    with pytest.raises(ValueError):
        r.section("a").add("k=v", rp.text("x"))
    with pytest.raises(ValueError):
        rp.emit_report(r, "json")


def test_text_rendering():
    r = rp.Report("bounds", 1)
    r.section("bound").add("value", rp.bound(0.25, False)).add("exact", rp.exact(F(79, 4096)))
    out = rp.emit_report(r, "text").decode()
    assert "[bound]" in out
    assert "value  0.25  (vacuous=false)" in out
    assert "exact  79/4096" in out


_key = st.text("abcdefghij_0123456789", min_size=1, max_size=8)
_payload = st.text(st.characters(blacklist_characters="\n\r", blacklist_categories=("Cs",)), max_size=20)


@given(st.integers(0, 2**64), st.lists(st.tuples(_key, _key, _payload), max_size=10))
def test_structured_round_trip(seed, records):
    r = rp.Report("cmd", seed)
    for sec, key, payload in records:
        r.section(sec).add(key, rp.Value("text", payload))
    data = rp.emit_report(r, "structured")
    back = rp.parse_structured(data)
    assert back.seed == seed and back.command == "cmd"
    assert rp.emit_report(back, "structured") == data
