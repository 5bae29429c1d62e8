import itertools
import math

import pytest

from autogowers import fixtures
from autogowers import groups as grp
from autogowers.automaton import Automaton, expand, make_idempotent, value
from autogowers.gea import (
    GEA,
    build_efficient_gea,
    characteristic_chain,
    compute_dprime,
    factor_quotient,
    product_automaton,
    strong_sync_factor,
    verify_efficiency,
    zm_gea,
)


def test_gea_eval_matches_automata():
    T = fixtures.example_1_5_gea()
    assert T.eval(26) == 2
    a = fixtures.example_1_5()
    assert all(T.eval(n) == a.eval(n) for n in range(1 << 12))
    T6 = fixtures.example_1_6_gea()
    a6 = fixtures.example_1_6()
    assert all(T6.eval(n) == a6.eval(n) for n in range(1 << 12))


def test_product_automaton():
    P = product_automaton(fixtures.example_1_5_gea())
    assert P.n_states == 4
    a = fixtures.example_1_5()
    assert all(P.eval(n) == a.eval(n) for n in range(1 << 12))
    rs = product_automaton(fixtures.rudin_shapiro_gea())
    r = fixtures.rudin_shapiro()
    assert rs.n_states == 4
    assert all(rs.eval(n) == r.eval(n) for n in range(1 << 12))
    a = fixtures.thue_morse()
    G = grp.closure([], 1)
    T = GEA(2, a.delta, 0, G, [[0, 0], [0, 0]], [[v] for v in a.outputs])
    assert product_automaton(T).delta == a.delta


def _efficient(a):
    b, t = make_idempotent(a)
    return b, build_efficient_gea(b)


@pytest.mark.parametrize("name", ["example_1_5", "example_1_6", "rudin_shapiro", "thue_morse"])
def test_efficient_gea_reproduces_sequence(name):
    a = fixtures.AUTOMATA[name]()
    b, (T, cert) = _efficient(a)
    assert all(T.eval(n) == b.eval(n) for n in range(b.k ** 14 if b.k == 2 else 1 << 14))
    assert verify_efficiency(T, cert).ok


def test_efficient_gea_sizes():
    _, (T, cert) = _efficient(fixtures.example_1_5())
    assert len(T.group) == 2
    _, (T, cert) = _efficient(fixtures.rudin_shapiro())
    assert len(T.group) == 2 and cert.dprime == 1
    sync = Automaton(2, [[0, 1], [0, 0]], 0, [1, 2])
    T, cert = build_efficient_gea(sync)
    assert cert.m == 1 and len(T.group) == 1 and T.n_states == 2


def _dprime_oracle(T, words=1 << 14):
    # gcd, over words of length <= max_len looping at s0 with trivial label,
    # of the word values, restricted to divisors of |G| coprime to k
    M = len(T.group)
    while math.gcd(M, T.k) != 1:
        M //= math.gcd(M, T.k)
    d = M
    max_len = int(math.log(words, T.k))
    for L in range(1, max_len + 1):
        for w in itertools.product(range(T.k), repeat=L):
            s, g = T.step(T.initial, w)
            if s == T.initial and g == 0:
                d = math.gcd(d, value(w, T.k))
    return d


@pytest.mark.parametrize("T", [fixtures.rudin_shapiro_gea(), fixtures.example_1_5_gea(),
                               fixtures.example_1_6_gea(), zm_gea(2, 3), zm_gea(3, 4), zm_gea(2, 5)])
def test_dprime_against_word_enumeration(T):
    d, G0, g0 = compute_dprime(T)
    assert d == _dprime_oracle(T)


def test_dprime_examples():
    d, G0, _ = compute_dprime(fixtures.rudin_shapiro_gea())
    assert d == 1 and len(G0) == 2
    for m in (1, 2, 3):
        d, G0, _ = compute_dprime(fixtures.zm(m))
        assert d == m and len(G0) == 1


def test_verify_efficiency_on_zm_and_failure():
    for m in (1, 2, 3):
        assert verify_efficiency(fixtures.zm(m)).ok
    # enlarge G with an element no label reaches
    T = fixtures.example_1_5_gea()
    G = grp.closure([(1, 0, 2), (0, 2, 1)])
    minus = G.index[(1, 0, 2)]
    bad = GEA(2, T.delta, 0, G, [[0, 0], [0, minus]], None)
    rep = verify_efficiency(bad)
    assert not rep.ok


def test_str_sync_factor_example():
    T = fixtures.str_sync_gea()
    F, fmap, rounds = strong_sync_factor(T)
    assert fmap.state_map[1] == fmap.state_map[2]
    G = T.group
    g = grp.parse_cycles("(1 2)", 3)
    h = grp.parse_cycles("(2 3)", 3)
    H = grp.normal_closure(G, [grp.compose(g, grp.inverse(h))])
    assert set(grp.normal_closure(G, rounds[0]).elements) == set(H.elements)


@pytest.mark.parametrize("key", sorted(fixtures.GEAS))
def test_chain_terminal_order_and_factor_maps(key):
    T = fixtures.GEAS[key]()
    steps, m = characteristic_chain(T)
    assert m == compute_dprime(T)[0]
    assert len(steps[-1][1].group) == m
    for _, F, fmap in steps:
        assert fmap.check(T, F)
        # parallel reading: phi(state) and pi(label) track the factor
        for n in range(T.k ** 6):
            s, g = T.step(T.initial, expand(n, T.k))
            fs, fg = F.step(F.initial, expand(n, T.k))
            assert fmap.state_map[s] == fs and fmap.hom(g) == fg


def test_zm_chain_is_identity():
    steps, m = characteristic_chain(fixtures.zm(3))
    assert m == 3
    assert all(F.n_states == 1 and len(F.group) == 3 for _, F, _ in steps)


def test_rs_chain_terminal_trivial():
    steps, m = characteristic_chain(fixtures.rudin_shapiro_gea())
    assert m == 1


def test_quotient_by_subgroup_of_G0_keeps_efficiency():
    _, (T, cert) = _efficient(fixtures.example_1_6())
    d, G0, _ = compute_dprime(T)
    A = grp.normal_closure(T.group, [g for g in G0.elements if grp.perm_sign(g) == 1])
    F, _ = factor_quotient(T, A)
    assert verify_efficiency(F).ok
    assert compute_dprime(F)[0] == d
