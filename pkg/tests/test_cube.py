import itertools
import math
import random

import numpy as np
import pytest

from autogowers import fixtures
from autogowers import groups as grp
from autogowers.automaton import make_idempotent
from autogowers.cube import (
    CubeArith,
    CubeCategory,
    CubeSystem,
    K_approx,
    cube_sets,
    degree1_morphisms,
    enumerate_R,
    enumerate_Rprime,
    hk_group,
    morphism,
    pack,
    verify_characteristic,
    verify_cube_theorem,
    vertices,
)
from autogowers.gea import FactorMap, build_efficient_gea, characteristic_chain, compute_dprime, zm_gea

R2 = [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 1), (0, 1, 1, 2)]
RP2 = [(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 2)]


def _R_grid(d, K, seed=0):
    # floor patterns of (1w . t)_w over a shifted grid in [0,1)^{d+1}
    rng = random.Random(seed)
    shift = [rng.random() for _ in range(d + 1)]
    out = set()
    for e in itertools.product(range(K), repeat=d + 1):
        t = [(ei + si) / K for ei, si in zip(e, shift)]
        out.add(tuple(math.floor(t[0] + sum(wj * tj for wj, tj in zip(w, t[1:]))) for w in vertices(d)))
    return out


def test_R_lists():
    assert enumerate_R(0) == [(0,)]
    assert sorted(enumerate_R(1)) == [(0, 0), (0, 1)]
    assert sorted(enumerate_R(2)) == R2
    assert sorted(enumerate_Rprime(0)) == [(0,)]
    assert sorted(enumerate_Rprime(1)) == [(0, 0), (0, 1)]
    assert sorted(enumerate_Rprime(2)) == RP2


@pytest.mark.parametrize("d,K", [(1, 40), (2, 30), (3, 14)])
def test_R_against_grid(d, K):
    assert set(enumerate_R(d)) == _R_grid(d, K)


def _hk_abelian(m, d):
    # {(h0 + sum_j w_j h_j)_w}
    out = set()
    for h in itertools.product(range(m), repeat=d + 1):
        out.add(tuple((h[0] + sum(wj * hj for wj, hj in zip(w, h[1:]))) % m for w in vertices(d)))
    return out


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_hk_cyclic(m, d):
    G = grp.cyclic_group(m)
    idx = {g[0] if m > 1 else 0: i for i, g in enumerate(G.elements)}
    expect = {tuple(idx[x] for x in c) for c in _hk_abelian(m, d)}
    assert set(hk_group(G, d).cubes()) == expect


def test_hk_small_cases():
    assert len(hk_group(grp.cyclic_group(2), 2)) == 8
    assert len(hk_group(grp.closure([], 2), 2)) == 1
    S3 = grp.symmetric_group(3)
    assert len(hk_group(S3, 1)) == 36


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2])
def test_Q_of_Zm_is_hk(m, d):
    T = fixtures.zm(m)
    Q, _ = cube_sets(T, d)
    assert Q == hk_group(T.group, d)


def _efficient(a):
    b, _ = make_idempotent(a)
    return build_efficient_gea(b)


def test_Q_small_d_is_full():
    for a in (fixtures.example_1_5(), fixtures.example_1_6()):
        T, _ = _efficient(a)
        ng = len(T.group)
        for d in (0, 1):
            Q, _ = cube_sets(T, d)
            assert len(Q) == ng ** (2 ** d)


def test_rs_d2_full():
    Q, _ = cube_sets(fixtures.rudin_shapiro_gea(), 2)
    assert len(Q) == 16


def _Q_by_words(T, d, l):
    # every e in [k^l]^{d+1} with all vertex sums < k^l gives a morphism from
    # the base object to itself; collect its label cube
    k = T.k
    out = set()
    for e in itertools.product(range(k ** l), repeat=d + 1):
        cube = []
        for w in vertices(d):
            x = e[0] + sum(wj * ej for wj, ej in zip(w, e[1:]))
            if x >= k ** l:
                break
            digits = [(x // k ** (l - 1 - i)) % k for i in range(l)]
            s, g = T.initial, 0
            for c in digits:
                g = T.group.mul(g, T.labels[s][c])
                s = T.delta[s][c]
            if s != T.initial:
                break
            cube.append(g)
        else:
            out.add(tuple(cube))
    return out


@pytest.mark.parametrize("key", ["rudin_shapiro_gea", "example_1_5_gea", "z2"])
def test_cube_system_against_word_enumeration(key):
    T = fixtures.GEAS[key]()
    d = 2
    cat = CubeCategory(T, d)
    base = cat.base_object()
    sysm = CubeSystem(cat, base)
    hist = sysm.by_length(4)
    ng = len(T.group)
    for l in range(1, 5):
        got = {c for c in map(tuple, _cubes_of(hist[l][sysm.pos[base]], ng, 4))}
        assert got == _Q_by_words(T, d, l)


def _cubes_of(mask, ng, V):
    for p in np.flatnonzero(mask):
        p = int(p)
        cube = []
        for _ in range(V):
            p, r = divmod(p, ng)
            cube.append(r)
        yield cube


def test_morphism_composition():
    T = fixtures.example_1_6_gea()
    d = 2
    k = T.k
    rng = random.Random(3)
    V = 4
    for _ in range(50):
        l, l2 = rng.randint(1, 3), rng.randint(1, 3)
        e = [rng.randrange(k ** l) for _ in range(d + 1)]
        e2 = [rng.randrange(k ** l2) for _ in range(d + 1)]
        r = rng.choice(R2)
        S2 = tuple(rng.randrange(T.n_states) for _ in range(V))
        # offsets of the middle object depend only on (l, e, r)
        _, r1, _ = morphism(T, d, S2, r, l, e)
        S1, r0, lab1 = morphism(T, d, S2, r1, l2, e2)
        S, r1b, lab2 = morphism(T, d, S1, r, l, e)
        assert r1b == r1
        big = [k ** l * a + b for a, b in zip(e2, e)]
        St, r0t, lab = morphism(T, d, S2, r, l + l2, big)
        assert St == S and r0t == r0
        assert lab == tuple(T.group.mul(a, b) for a, b in zip(lab1, lab2))


def test_degree1_zero_step_is_identity():
    T, _ = _efficient(fixtures.example_1_5())
    cat = degree1_morphisms(T, 2)
    base = cat.base_object()
    zero = [(j, lab) for j, e, lab in cat.successors(base) if not any(e)]
    assert (base, (0,) * 4) in zero


def test_groupoid_law():
    T = fixtures.example_1_5_gea()
    d = 1
    cat = CubeCategory(T, d)
    base = cat.base_object()
    order, _ = cat.explore([base])
    arith = CubeArith(T.group, d)
    limits = {}
    for v in order:
        sysm = CubeSystem(cat, v, arith)
        X, _ = sysm.run()
        limits[v] = (sysm.pos, X)
    for v, v1, v2 in itertools.product(order[:4], repeat=3):
        pos, X = limits[v]
        pos1, X1 = limits[v1]
        A = X[pos[v1]]
        B = X1[pos1[v2]]
        assert np.array_equal(arith.mul_sets(A, B), X[pos[v2]])


@pytest.mark.parametrize("key", ["rudin_shapiro_gea", "example_1_5_gea", "z2", "z3"])
def test_cube_theorem_d2(key):
    T = fixtures.GEAS[key]()
    d, G0, g0 = compute_dprime(T)
    assert verify_cube_theorem(T, 2, d, G0, g0).ok


def test_chain_steps_characteristic():
    T, _ = _efficient(fixtures.example_1_5())
    steps, _ = characteristic_chain(T)
    for _, F, fmap in steps:
        assert verify_characteristic(T, F, fmap, 2)


def test_zm_not_characteristic_for_smaller_m():
    # Z(6) -> Z(2) and Z(6) -> Z(3) over base 7
    big = zm_gea(6, 7)
    for m in (2, 3):
        small = zm_gea(m, 7)
        images = [small.group.index[tuple(((x + g[0]) % m) for x in range(m))] if m > 1 else 0
                  for g in big.group.elements]
        hom = grp.GroupHom(big.group, small.group, images)
        fmap = FactorMap([0], hom)
        assert fmap.check(big, small)
        assert not verify_characteristic(big, small, fmap, 2)
    assert verify_characteristic(big, big, FactorMap([0], grp.identity_hom(big.group)), 2)


def test_K_approx():
    assert len(K_approx(fixtures.zm(3), 2)) == 1
    assert len(K_approx(fixtures.zm(1), 2)) == 1
    T = fixtures.rudin_shapiro_gea()
    assert len(K_approx(T, 2)) == 2


def test_dimension_embedding():
    T = fixtures.example_1_5_gea()
    Q1, _ = cube_sets(T, 1)
    Q2, _ = cube_sets(T, 2)
    ng = len(T.group)
    for c in Q1.cubes():
        # repeat along the new last coordinate: vertex (w, 0) and (w, 1)
        assert Q2.mask[pack((c[0], c[0], c[1], c[1]), ng)]
        assert Q2.mask[pack((c[0], c[1], c[0], c[1]), ng)]
