"""Structured plus uniform decomposition of automatic sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import groups as grp
from .automaton import (
    Automaton,
    is_strongly_connected,
    killing_word,
    make_idempotent,
    product_many,
    scc_decompose,
)
from .gea import build_efficient_gea, product_automaton
from .gowers import periodic_correlation
from .transfer import dp_decay


@dataclass
class StructuredPart:
    """a_str(n) = F(n mod period, fs state, bs output)."""

    period: int
    fs: Automaton
    bs: Automaton
    F: object
    fs_sync_word: tuple = ()

    def value(self, n):
        return self.F(n % self.period, self.fs.state_of(n), self.bs.eval(n))

    def table(self):
        """Explicit combiner table over (residue, fs state, bs output)."""
        bs_vals = sorted(set(self.bs.outputs), key=repr)
        return {(r, s, b): self.F(r, s, b)
                for r in range(self.period) for s in range(self.fs.n_states) for b in bs_vals}


@dataclass
class Decomposition:
    source: Automaton
    base: int
    t: int
    a: Automaton
    a_str: Automaton
    a_uni: Automaton
    structure: StructuredPart
    dprimes: dict
    certificates: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    y: tuple = ()
    z: tuple = ()

    def str_value(self, n):
        return self.a_str.eval(n)

    def uni_value(self, n):
        return self.a_uni.eval(n)

    def check_additivity(self, N):
        return all(self.a_str.eval(n) + self.a_uni.eval(n) == self.source.eval(n) for n in range(N))

    def z_density(self, L):
        """Fraction of n < base^L whose digits lack the factor y z."""
        return avoid_density(self.y + self.z, self.base, L)

    def manifest(self):
        lines = [
            f"base: {self.base}",
            f"power: {self.t}",
            f"period: {self.structure.period}",
        ]
        for s, dp in sorted(self.dprimes.items()):
            lines.append(f"dprime[{s}]: {dp}")
        for d, fit in sorted(self.fits.items()):
            lines.append(f"decay_c[d={d}]: {fit.c:.6g}")
            lines.append(f"decay_r2[d={d}]: {fit.r2:.6g}")
        lines.append(f"y: {''.join(map(str, self.y)) or 'eps'}")
        lines.append(f"z: {''.join(map(str, self.z)) or 'eps'}")
        return "\n".join(lines) + "\n"


def avoid_density(word, k, L):
    """#{n < k^L : (n)_k has no factor ``word``} / k^L, via a KMP automaton."""
    word = tuple(word)
    m = len(word)
    if m == 0:
        return 0.0
    fail = [0] * (m + 1)
    fail[0] = -1
    j = -1
    for i in range(m):
        while j >= 0 and word[j] != word[i]:
            j = fail[j]
        j += 1
        fail[i + 1] = j

    def nxt(state, c):
        while state >= 0 and (state == m or word[state] != c):
            state = fail[state]
        return state + 1

    trans = [[nxt(q, c) for c in range(k)] for q in range(m)]
    # words of each exact length with nonzero leading digit, plus n = 0
    total = 1
    counts = [0] * m
    for c in range(1, k):
        q = trans[0][c]
        if q < m:
            counts[q] += 1
    for _ in range(L):
        total += sum(counts)
        new = [0] * m
        for q, cnt in enumerate(counts):
            if cnt:
                for c in range(k):
                    r = trans[q][c]
                    if r < m:
                        new[r] += cnt
        counts = new
    return total / k ** L


# ---------------------------------------------------------------- strongly connected

class _SCResult:
    def __init__(self, b, t, T, cert, tau_str):
        self.b = b
        self.t = t
        self.T = T
        self.cert = cert
        self.tau_str = tau_str
        G = T.group
        self.powers = [0]
        for _ in range(cert.dprime - 1):
            self.powers.append(G.mul(self.powers[-1], cert.g0))

    def F(self, r, s):
        return self.tau_str[s][self.powers[r % self.cert.dprime]]

    def str_automaton(self):
        P = product_automaton(self.T)
        ng = len(self.T.group)
        return P.with_outputs([self.tau_str[i // ng][i % ng] for i in range(P.n_states)])

    def uni_automaton(self):
        P = product_automaton(self.T)
        ng = len(self.T.group)
        return P.with_outputs([self.T.outputs[i // ng][i % ng] - self.tau_str[i // ng][i % ng]
                               for i in range(P.n_states)])


def _strongly_connected_parts(a):
    b, t = make_idempotent(a)
    if not is_strongly_connected(b):
        raise ValueError("automaton is not strongly connected")
    T, cert = build_efficient_gea(b)
    tau_str = grp.coset_average(T.outputs, T.group, cert.G0)
    return _SCResult(b, t, T, cert, tau_str)


def _fit(a_uni, d_list, Ls):
    return {d: dp_decay(a_uni, d, Ls) for d in d_list}


def decompose_strongly_connected(a, d_list=(), Ls=range(8, 13)):
    """a_str from coset averages of the efficient GEA output over G0."""
    sc = _strongly_connected_parts(a)
    a_str = sc.str_automaton()
    a_uni = sc.uni_automaton()
    fs = sc.T.underlying()
    trivial = Automaton(sc.b.k, [[0] * sc.b.k], 0, [0])
    structure = StructuredPart(sc.cert.dprime, fs, trivial, lambda r, s, _b: sc.F(r, s),
                               tuple(sc.cert.sync_word))
    dec = Decomposition(a, sc.b.k, sc.t, sc.b, a_str, a_uni, structure,
                        {sc.b.initial: sc.cert.dprime}, {sc.b.initial: sc.cert})
    dec.fits = _fit(a_uni, d_list, Ls)
    return dec


# ---------------------------------------------------------------- general

def _sub_automaton(b, states, start):
    states = sorted(states)
    pos = {s: i for i, s in enumerate(states)}
    delta = [[pos[b.delta[s][j]] for j in range(b.k)] for s in states]
    return Automaton(b.k, delta, pos[start], [b.outputs[s] for s in states],
                     [b.names[s] for s in states])


def multiplicative_order(k, M):
    if M == 1:
        return 1
    A, x = 1, k % M
    while x != 1:
        x = x * k % M
        A += 1
    return A


def indicator_automaton(b, S0, M):
    """States (r, i) of S x Z/M; freezes on reaching S0 with residue 0 and
    outputs the reached state there, None elsewhere."""
    k = b.k
    n = b.n_states
    delta = []
    outputs = []
    for r in range(n):
        for i in range(M):
            frozen = i == 0 and r in S0
            if frozen:
                delta.append([r * M + i] * k)
                outputs.append(r)
            else:
                delta.append([b.delta[r][j] * M + (k * i + j) % M for j in range(k)])
                outputs.append(None)
    return Automaton(k, delta, b.initial * M, outputs)


def decompose_general(a, d_list=(), Ls=range(8, 13), cap=1 << 20):
    """Weakly structured decomposition assembled from the closed components."""
    b, t = make_idempotent(a)
    info = scc_decompose(b)
    closed = [set(c) for c, flag in zip(info.components, info.closed) if flag]
    S0 = sorted(s for comp in closed for s in comp if b.delta[s][0] == s)
    parts = {}
    for s in S0:
        comp = next(c for c in closed if s in c)
        parts[s] = _strongly_connected_parts(_sub_automaton(b, comp, s))
        if parts[s].t != 1:
            raise RuntimeError("component needed a further base change")
    dprimes = {s: p.cert.dprime for s, p in parts.items()}
    M = math.lcm(*dprimes.values()) if dprimes else 1
    if math.gcd(M, b.k) != 1:
        raise RuntimeError(f"period {M} is not coprime to the base {b.k}")
    A = multiplicative_order(b.k, M)
    y0 = tuple(killing_word(b))
    y = y0 + ((0,) * (A - 1) + (1,)) * (M - 1)
    z = ()
    for s in S0:
        z += tuple(parts[s].cert.sync_word)

    bs = indicator_automaton(b, set(S0), M)
    fs_list = [parts[s].T.underlying() for s in S0]
    fs = product_many(fs_list, lambda tup: tup, cap) if fs_list else Automaton(b.k, [[0] * b.k], 0, [()])
    fs_tuples = list(fs.outputs)
    slot = {s: i for i, s in enumerate(S0)}

    def F(r, fs_state, reached):
        if reached is None:
            return 0
        return parts[reached].F(r, fs_tuples[fs_state][slot[reached]])

    per_aut = Automaton(b.k, [[(b.k * i + j) % M for j in range(b.k)] for i in range(M)], 0, list(range(M)))
    prods = [parts[s].str_automaton() for s in S0]

    def combine(outs):
        reached = outs[0]
        if reached is None:
            return 0
        return outs[1 + slot[reached]]

    a_str = product_many([bs] + prods, combine, cap)
    a_uni = product_many([b, a_str], lambda o: o[0] - o[1], cap)
    structure = StructuredPart(M, fs, bs, F, z)
    structure.per = per_aut
    dec = Decomposition(a, b.k, t, b, a_str, a_uni, structure, dprimes,
                        {s: p.cert for s, p in parts.items()}, y=y, z=z)
    dec.fits = _fit(a_uni, d_list, Ls)
    return dec


def decompose(a, d_list=(), Ls=range(8, 13)):
    b, _ = make_idempotent(a)
    if is_strongly_connected(b):
        return decompose_strongly_connected(a, d_list, Ls)
    return decompose_general(a, d_list, Ls)


# ---------------------------------------------------------------- checks

def orthogonality_test(a, P_max, Ns, threshold=0.1):
    """Periodic correlations at increasing N; orthogonal when below threshold
    and decreasing."""
    Nmax = max(Ns)
    vals = np.array([complex(a.eval(n)) for n in range(Nmax)])
    corr = [periodic_correlation(vals, P_max, N) for N in sorted(Ns)]
    orthogonal = corr[-1] < threshold and all(x >= y - 1e-12 for x, y in zip(corr, corr[1:]))
    return corr, orthogonal


def support_density(a_str, Ns):
    """|{n < N : a_str(n) != 0}| / N for each N, and the fitted exponent c in
    count ~ N^{1-c}."""
    Nmax = max(Ns)
    nz = np.array([a_str.eval(n) != 0 for n in range(Nmax)])
    counts = [int(nz[:N].sum()) for N in Ns]
    dens = [c / N for c, N in zip(counts, Ns)]
    c = _exponent(Ns, counts)
    return dens, c


def _exponent(Ns, counts):
    if any(c == 0 for c in counts):
        return float("inf")
    slope = np.polyfit(np.log(Ns), np.log(counts), 1)[0]
    return float(1 - slope)


def uniqueness_density(f1, f2, seq, Ns):
    """Disagreement density of two structured parts of the same sequence.

    ``f1``, ``f2`` and ``seq`` are callables on n; ``seq`` is used to check
    that both decompositions describe the same sequence (given as pairs
    (str, uni) via f1/f2 returning tuples).
    """
    Nmax = max(Ns)
    diff = []
    for n in range(Nmax):
        s1, u1 = f1(n)
        s2, u2 = f2(n)
        if s1 + u1 != seq(n) or s2 + u2 != seq(n):
            raise ValueError(f"decompositions describe different sequences at n={n}")
        diff.append(s1 != s2)
    diff = np.array(diff)
    counts = [int(diff[:N].sum()) for N in Ns]
    return [c / N for c, N in zip(counts, Ns)], _exponent(Ns, counts)
