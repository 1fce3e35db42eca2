import os
from pathlib import Path

import pytest

import fpw

CORPUS = Path(os.environ.get("FPW_CORPUS_DIR", Path(__file__).resolve().parents[2] / "corpus"))


def corpus(name):
    return str(CORPUS / name)


def test_algebra_round_trip():
    z4 = fpw.Algebra.load(corpus("z4.alg"))
    assert len(z4) == 4
    assert z4.elements == ["0", "1", "2", "3"]
    again = fpw.Algebra.parse(z4.to_text())
    assert again.to_text() == z4.to_text()
    assert again.to_json()["name"] == z4.name


def test_congruences_and_leibniz():
    cyc = fpw.Algebra.load(corpus("cyc3z.alg"))
    ls = fpw.FilterPair.load(corpus("ls.fp"))
    assert len(fpw.congruences(fpw.Algebra.load(corpus("z4.alg")))) == 3
    assert fpw.leibniz_omega(cyc, ["z"]) == [["0", "1", "2"], ["z"]]
    assert fpw.i_tau(cyc, ls, "[[0],[1],[2],[z]]") == ["z"]
    assert ["z"] in fpw.i_filters(cyc, ls)


def test_hierarchy_exit_codes():
    groups = fpw.FilterPair.load(corpus("groups.fp"))
    code, report = fpw.hierarchy(groups, [fpw.Algebra.load(corpus("z4.alg")), fpw.Algebra.load(corpus("s3.alg"))])
    assert code == 0
    ls = fpw.FilterPair.load(corpus("ls.fp"))
    code, report = fpw.hierarchy(ls, [fpw.Algebra.load(corpus("cyc3z.alg"))])
    assert code == 1
    assert report["truth_equational"]["witness"]["filter"] == ["z"]


def test_entailment_and_interpolation():
    ls = fpw.FilterPair.load(corpus("ls.fp"))
    assert fpw.entails(ls, ["x"], "s(x)")["verdict"] == "Holds"
    assert fpw.entails(ls, ["s(x)"], "x")["verdict"] == "RefutedBy"
    r = fpw.interpolate(ls, ["x", "y"], "s(y)", minimize=True)
    assert r["status"] == "Interpolated"
    assert r["interpolant"] == ["y"]


def test_run_matches_cli():
    code, report = fpw.run("entails", ["--fp", corpus("ls.fp"), "--gamma", "x", "--phi", "s(x)"])
    assert code == 0
    assert report["result"]["decided_by"] == "oracle"
    assert "hierarchy" in fpw.subcommands
    assert fpw.run("nope", [])[0] == 3


def test_errors_are_python_exceptions():
    with pytest.raises(fpw.ParseError):
        fpw.Algebra.parse("algebra a\nsignature: f/1\ncarrier: 0 1\nop f: 0->1\n")
    ls = fpw.FilterPair.load(corpus("ls.fp"))
    with pytest.raises(fpw.Error):
        fpw.entails(ls, [], "s(x")
    with pytest.raises(fpw.MismatchError):
        fpw.i_filters(fpw.Algebra.load(corpus("z4.alg")), ls)
