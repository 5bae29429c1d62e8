from fractions import Fraction

import pytest

from autogowers import fixtures
from autogowers import textio as tio
from autogowers.cli import main


def test_value_round_trip():
    for v in (3, -7, Fraction(1, 2), Fraction(-5, 3), complex(0.5, -2.0)):
        assert tio.parse_value(tio.format_value(v)) == v
    with pytest.raises(tio.ParseError):
        tio.parse_value("float:1.0")
    with pytest.raises(tio.ParseError):
        tio.parse_value("rat:1/0")


@pytest.mark.parametrize("name", sorted(fixtures.AUTOMATA))
def test_automaton_round_trip(name):
    a = fixtures.AUTOMATA[name]()
    b = tio.parse_automaton(tio.format_automaton(a))
    assert all(a.eval(n) == b.eval(n) for n in range(1 << 12))


@pytest.mark.parametrize("key", sorted(fixtures.GEAS))
def test_gea_round_trip(key):
    T = fixtures.GEAS[key]()
    U = tio.parse_gea(tio.format_gea(T))
    assert len(U.group) == len(T.group)
    assert all(T.eval(n) == U.eval(n) for n in range(1 << 10))


@pytest.mark.parametrize("text", [
    "base 2\nstates a\ninitial a\ntransition a 0 a\n",
    "base 2\nstates a\ninitial b\ntransition a 0 a\ntransition a 1 a\n",
    "base 2\nstates a\ninitial a\ntransition a 2 a\n",
    "base 2\nstates a b\ninitial a\ntransition a 0 a\ntransition a 1 a\n"
    "transition b 0 a\ntransition b 1 a\noutput a int:1\n",
    "base 2\nstates a\ninitial a\nfoo a\n",
])
def test_parse_errors(text):
    with pytest.raises(tio.ParseError):
        tio.parse_automaton(text)


def test_comments_are_ignored():
    text = "# binary\nbase 2\nstates a  # one state\ninitial a\ntransition a 0 a\ntransition a 1 a\noutput a int:4\n"
    assert tio.parse_automaton(text).eval(9) == 4


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_norm(capsys):
    assert main(["norm", "--fixture", "thue_morse", "--d", "2", "--L", "3..5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "d,L,N,dp,naive,agree"
    assert len(out) == 4 and all(line.endswith("True") for line in out[1:])


def test_cli_norm_is_deterministic(capsys, tmp_path):
    args = ["norm", "--fixture", "rudin_shapiro", "--d", "2", "--L", "3..4", "--seed", "7"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    capsys.readouterr()
    assert (tmp_path / "a" / "norm.csv").read_bytes() == (tmp_path / "b" / "norm.csv").read_bytes()


def test_cli_decompose_writes_files(capsys, tmp_path):
    out = tmp_path / "dec"
    assert main(["decompose", "--fixture", "example_1_5", "--verify", "4096", "--out", str(out)]) == 0
    assert "additivity_below_4096: pass" in capsys.readouterr().out
    for name in ("manifest.txt", "a_str.aut", "a_uni.aut", "fs.aut", "bs.aut", "combiner.csv", "table.csv"):
        assert (out / name).exists()
    a = fixtures.example_1_5()
    s = tio.read(str(out / "a_str.aut"), tio.parse_automaton)
    u = tio.read(str(out / "a_uni.aut"), tio.parse_automaton)
    assert all(s.eval(n) + u.eval(n) == a.eval(n) for n in range(1 << 12))


def test_cli_gea_and_cubes(capsys, tmp_path):
    out = tmp_path / "g"
    assert main(["gea", "--fixture", "example_1_5", "--verify-efficiency", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and "dprime: 1" in text
    assert main(["cubes", "--gea", str(out / "gea.txt"), "--d", "1,2"]) == 0
    text = capsys.readouterr().out
    assert "theorem=pass" in text and "FAIL" not in text
    assert main(["cubes", "--gea-fixture", "z3", "--d", "2"]) == 0
    assert "terminal_order=3 dprime=3" in capsys.readouterr().out


def test_cli_apcount(capsys, tmp_path):
    path = _write(tmp_path, "set.txt", "# multiples of 3\n" + "\n".join(str(3 * i) for i in range(40)) + "\n")
    assert main(["apcount", "--set", path, "--N", "120", "--l", "3", "--eps", "0.05,0.1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "eps,l,good_m,fraction" and len(lines) == 3


def test_exit_codes(capsys, tmp_path):
    bad = _write(tmp_path, "bad.aut", "base 2\nstates a\n")
    assert main(["norm", "--automaton", bad]) == 2
    assert main(["norm", "--bogus"]) == 2
    assert main(["norm", "--fixture", "nope"]) == 3
    assert main(["cubes", "--fixture", "thue_morse", "--d", "4"]) == 3
    assert main(["norm", "--automaton", str(tmp_path / "missing.aut")]) == 3
    assert main(["norm", "--fixture", "thue_morse", "--d", "3", "--L", "14"]) == 4
    capsys.readouterr()
