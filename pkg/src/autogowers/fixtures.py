"""Bundled example automata and GEAs."""

from . import groups as grp
from .automaton import Automaton
from .gea import GEA, zm_gea


def example_1_5():
    """Binary automaton whose structured part is 2 + (-1)^{nu_2(n+1)}."""
    delta = [[0, 1], [0, 3], [3, 0], [3, 2]]
    return Automaton(2, delta, 0, [4, 1, 1, 2], ["s0", "s1", "s2", "s3"])


def example_1_6():
    """Five-state binary automaton whose structured part is 3(-1)^{nu_2(n+1)} - 1."""
    delta = [[0, 4], [2, 3], [1, 2], [0, 0], [2, 1]]
    return Automaton(2, delta, 0, [1, 2, 3, 4, 5], ["s0", "s1", "s2", "s3", "s4"])


def rudin_shapiro():
    """r(2n) = r(n), r(2n+1) = (-1)^n r(n); states track (sign, last digit)."""
    delta = [[0, 1], [0, 3], [2, 3], [2, 1]]
    return Automaton(2, delta, 0, [1, 1, -1, -1], ["s00", "s01", "s10", "s11"])


def thue_morse(signed=False):
    outputs = [1, -1] if signed else [0, 1]
    return Automaton(2, [[0, 1], [1, 0]], 0, outputs, ["even", "odd"])


def alternating():
    """(-1)^n in base 2."""
    return Automaton(2, [[0, 1], [0, 1]], 0, [1, -1], ["e", "o"])


def constant(value=1, k=2):
    return Automaton(k, [[0] * k], 0, [value], ["c"])


def length_mod(l, k=2):
    """n -> (number of base-k digits of n) mod l."""
    # state 1 + i: i digits read so far (mod l)
    delta = [[0] + [2 if l > 1 else 1] * (k - 1)]
    for i in range(l):
        delta.append([1 + (i + 1) % l] * k)
    outputs = [0] + list(range(l))
    return Automaton(k, delta, 0, outputs, ["z"] + [f"l{i}" for i in range(l)])


def rudin_shapiro_gea():
    G = grp.cyclic_group(2)
    minus = G.index[(1, 0)]
    delta = [[0, 1], [0, 1]]
    labels = [[0, 0], [0, minus]]
    outputs = [[1, -1], [1, -1]]
    return GEA(2, delta, 0, G, labels, outputs, ["s0", "s1"])


def example_1_5_gea():
    G = grp.cyclic_group(2)
    minus = G.index[(1, 0)]
    delta = [[0, 1], [0, 0]]
    labels = [[0, 0], [0, minus]]
    outputs = [[4, 2], [1, 1]]
    return GEA(2, delta, 0, G, labels, outputs, ["s02", "s13"])


def example_1_6_gea():
    """Sym(3) GEA; outputs indexed through cycle notation.

    Under left-to-right label products the 0-edges carry (2 3) and the
    1-edge out of s012 carries (1 2); this is the unique labelling that
    reproduces example_1_6 with the output table below.
    """
    G = grp.symmetric_group(3)
    p = lambda c: G.index[grp.parse_cycles(c, 3)]
    delta = [[0, 1], [0, 0]]
    labels = [[p("(2 3)"), p("(1 2)")], [p("(2 3)"), p("()")]]
    table = {
        0: {"()": 1, "(2 3)": 1, "(1 2)": 2, "(1 3 2)": 2, "(1 3)": 3, "(1 2 3)": 3},
        1: {"()": 4, "(2 3)": 4, "(1 2)": 5, "(1 3 2)": 5, "(1 3)": 3, "(1 2 3)": 3},
    }
    outputs = [[0] * 6 for _ in range(2)]
    for s, row in table.items():
        for c, v in row.items():
            outputs[s][p(c)] = v
    return GEA(2, delta, 0, G, labels, outputs, ["s012", "s342"])


def str_sync_gea():
    """Three states over base 3; s1 and s2 loop on 1 with labels (1 2) and (2 3)."""
    G = grp.symmetric_group(3)
    g = G.index[grp.parse_cycles("(1 2)", 3)]
    h = G.index[grp.parse_cycles("(2 3)", 3)]
    delta = [[0, 1, 2], [0, 1, 2], [0, 2, 1]]
    labels = [[0, 0, 0], [0, g, 0], [0, h, 0]]
    outputs = [[(3 * s + x) % 5 for x in range(6)] for s in range(3)]
    return GEA(3, delta, 0, G, labels, outputs, ["s0", "s1", "s2"])


def zm(m):
    """Z(m) in the smallest base with m | k - 1."""
    return zm_gea(m, m + 1)


AUTOMATA = {
    "example_1_5": example_1_5,
    "example_1_6": example_1_6,
    "rudin_shapiro": rudin_shapiro,
    "thue_morse": thue_morse,
}

GEAS = {
    "rudin_shapiro_gea": rudin_shapiro_gea,
    "example_1_5_gea": example_1_5_gea,
    "example_1_6_gea": example_1_6_gea,
    "str_sync_gea": str_sync_gea,
    "z1": lambda: zm(1),
    "z2": lambda: zm(2),
    "z3": lambda: zm(3),
}
