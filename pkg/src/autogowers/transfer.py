"""Digit transfer matrices over the cube category.

Layers are read most significant digit first: a degree-one step from
(s', r') to (s, r) appends one digit to every vertex, and after L steps from
(s0^{[d]}, r') with r' = (1w.m)_w into (s, 0) the accumulated vector e gives
the point n = e - k^L m of Pi(k^L).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from . import groups as grp
from .automaton import Automaton, make_prolongable
from .cube import CubeCategory, degree1_morphisms, morphism, one_dot, vertices
from .gea import GEA
from .gowers import NormResult, ntilde, pi_count

OBJECT_CAP = 1 << 26


def _as_gea(a):
    if isinstance(a, GEA):
        return a
    G = grp.trivial_group()
    return GEA(a.k, a.delta, a.initial, G, [[0] * a.k for _ in range(a.n_states)])


# ---------------------------------------------------------------- counting

class CountingTransfer:
    """Exact integer counts |Mor_1(v, v')| over the objects reachable from
    the sources (s0^{[d]}, r'), r' in R'; W(1) = counts / k^{d+1}."""

    def __init__(self, T, d):
        self.T = _as_gea(T)
        self.d = d
        self.cat = degree1_morphisms(self.T, d)
        self.objects = list(self.cat.reachable)
        self.pos = {o: i for i, o in enumerate(self.objects)}
        n = len(self.objects)
        self.counts = np.zeros((n, n), dtype=object)
        self.counts[:, :] = 0
        for i, j, _, _ in self.cat.edges:
            self.counts[self.pos[i], self.pos[j]] += 1
        self.scale = self.T.k ** (d + 1)
        zero = self.cat.Rindex[(0,) * self.cat.V]
        self.sources = [self.pos[self.cat.index[((self.T.initial,) * self.cat.V, self.cat.Rindex[r])]]
                        for r in self.cat.Rprime]
        self.zero_targets = [i for i, (_, ri) in enumerate(self.cat.objects[o] for o in self.objects) if ri == zero]

    def counts_power(self, l):
        n = len(self.objects)
        out = np.zeros((n, n), dtype=object)
        out[:, :] = 0
        for i in range(n):
            out[i, i] = 1
        for _ in range(l):
            out = out.dot(self.counts)
        return out

    def W(self, l=1):
        denom = self.scale ** l
        C = self.counts_power(l)
        return np.vectorize(lambda c: Fraction(int(c), denom), otypes=[object])(C)

    def pi_total(self, L):
        """sum over r' in R' and zero-offset targets of |Mor_L|."""
        C = self.counts_power(L)
        return int(sum(C[s, t] for s in self.sources for t in self.zero_targets))

    def W_float(self):
        return self.counts.astype(float) / self.scale


def counting_transfer(T, d):
    return CountingTransfer(T, d)


# ---------------------------------------------------------------- dp norm

class _StateCubes:
    """Dense state cubes: packed index sum_w s_w n^w, and delta per digit cube."""

    def __init__(self, a, d):
        self.a = a
        self.V = 2 ** d
        n = a.n_states
        self.size = n ** self.V
        if self.size * (d + 1) > OBJECT_CAP:
            raise ValueError(f"{n}^{self.V} state cubes exceed the object cap")
        p = np.arange(self.size, dtype=np.int64)
        self.digits = np.empty((self.size, self.V), dtype=np.int64)
        for i in range(self.V):
            p, self.digits[:, i] = np.divmod(p, n)
        self.weights = n ** np.arange(self.V, dtype=np.int64)
        self.delta = np.asarray(a.delta, dtype=np.int64)
        self._cache = {}

    def step_map(self, cdigits):
        m = self._cache.get(cdigits)
        if m is None:
            m = np.zeros(self.size, dtype=np.int64)
            for i, c in enumerate(cdigits):
                m += self.delta[self.digits[:, i], c] * self.weights[i]
            self._cache[cdigits] = m
        return m

    def index(self, states):
        return int(sum(s * w for s, w in zip(states, self.weights)))

    def leaf(self, verts):
        """prod_w C^{|w|} tau(s_w) for every packed state cube."""
        tau = np.asarray([complex(x) for x in self.a.outputs])
        out = np.ones(self.size, dtype=complex)
        for i, w in enumerate(verts):
            vals = tau[self.digits[:, i]]
            out *= np.conj(vals) if sum(w) % 2 else vals
        return out


def morphism_counts(a, d, L, cat=None):
    """counts[r, s] = #{degree-L morphisms from some (s0^{[d]}, r'), r' in R',
    into (s, r)}.

    Counts are bounded by |R'| k^{(d+1)L}; below 2^53 they are exact integers
    carried in float64 and returned as int64.  Beyond that they are scaled by
    k^{-(d+1)} per layer and ``exact`` is False.
    """
    cat = cat or CubeCategory(_as_gea(a), d)
    sc = _StateCubes(a, d)
    exact = len(cat.Rprime) * a.k ** ((d + 1) * L) < 2 ** 53
    x = np.zeros((len(cat.R), sc.size))
    start = sc.index((a.initial,) * sc.V)
    for r in cat.Rprime:
        x[cat.Rindex[r], start] += 1
    for _ in range(L):
        y = np.zeros_like(x)
        for src, steps in enumerate(cat.steps_from):
            if not x[src].any():
                continue
            for _, tgt, digits in steps:
                y[tgt] += np.bincount(sc.step_map(digits), weights=x[src], minlength=sc.size)
        x = y if exact else y / a.k ** (d + 1)
    if exact:
        x = np.rint(x).astype(np.int64)
    return x, cat, sc, exact


def gowers_norm_dp(a, d, L):
    """||a||_{U^d[k^L]} from morphism counts into zero-offset targets."""
    t0 = time.perf_counter()
    if not a.is_prolongable():
        a = make_prolongable(a)
    x, cat, sc, exact = morphism_counts(a, d, L)
    counts = x[cat.Rindex[(0,) * cat.V]]
    total = pi_count(a.k ** L, d)
    if not exact:
        total = total / a.k ** ((d + 1) * L)
    nz = np.flatnonzero(counts)
    leaf = sc.leaf(cat.verts)[nz]
    power = complex(np.sum(leaf * counts[nz].astype(float)) / total)
    if abs(power.imag) > 1e-9 * max(1.0, abs(power.real)):
        raise ArithmeticError(f"Gowers average has imaginary part {power.imag}")
    value = max(power.real, 0.0) ** (1.0 / 2 ** d)
    N = a.k ** L
    return NormResult(d, N, ntilde(N, d), value, "dp", power, time.perf_counter() - t0)


def counting_identity(a, d, L):
    """(total morphism count into zero-offset targets, |Pi(k^L)|)."""
    if not a.is_prolongable():
        a = make_prolongable(a)
    x, cat, _, exact = morphism_counts(a, d, L)
    if not exact:
        raise ValueError("counts exceed the exact integer range")
    row = x[cat.Rindex[(0,) * cat.V]]
    return int(sum(int(c) for c in row)), pi_count(a.k ** L, d)


# ---------------------------------------------------------------- operators

def cube_rep(rho, cube, verts):
    """tensor_w C^{|w|} rho(g_w)."""
    out = np.ones((1, 1), dtype=complex)
    for g, w in zip(cube, verts):
        m = rho.mats[g]
        out = np.kron(out, np.conj(m) if sum(w) % 2 else m)
    return out


class OperatorTransfer:
    """Block matrix M(1) with blocks M(v, v') = k^{-(d+1)} sum over degree-one
    morphisms v -> v' of the cube representation of their labels."""

    def __init__(self, T, rho, d):
        self.T = T
        self.rho = rho
        self.d = d
        self.cat = degree1_morphisms(T, d)
        self.objects = list(self.cat.reachable)
        self.pos = {o: i for i, o in enumerate(self.objects)}
        self.dimV = rho.dim
        self.D = self.dimV ** (2 ** d)
        n = len(self.objects)
        if n * n * self.D * self.D > OBJECT_CAP:
            raise ValueError("operator transfer exceeds the size cap")
        self.M1 = np.zeros((n * self.D, n * self.D), dtype=complex)
        scale = T.k ** (d + 1)
        cache = {}
        for i, j, _, lab in self.cat.edges:
            blk = cache.get(lab)
            if blk is None:
                blk = cache[lab] = cube_rep(rho, lab, self.cat.verts)
            a, b = self.pos[i] * self.D, self.pos[j] * self.D
            self.M1[a : a + self.D, b : b + self.D] += blk / scale
        self.sources = [self.pos[self.cat.index[((T.initial,) * self.cat.V, self.cat.Rindex[r])]]
                        for r in self.cat.Rprime]
        self.base = self.pos[self.cat.base_object()]

    def counting_matrix(self):
        n = len(self.objects)
        W = np.zeros((n, n))
        for i, j, _, _ in self.cat.edges:
            W[self.pos[i], self.pos[j]] += 1
        return W / self.T.k ** (self.d + 1)

    def block(self, M, i, j):
        D = self.D
        return M[i * D : (i + 1) * D, j * D : (j + 1) * D]

    def M(self, l):
        return np.linalg.matrix_power(self.M1, l)

    def A(self, L):
        """Block row A(v; L) = sum_{r'} M((s0, r'), v; L)."""
        ML = self.M(L)
        D = self.D
        return sum(ML[s * D : (s + 1) * D, :] for s in self.sources)

    def A_recursive(self, L):
        """A(L) built one digit layer at a time: A(l + 1) = A(l) M(1)."""
        D = self.D
        row = sum(self.M1[s * D : (s + 1) * D, :] for s in self.sources)
        for _ in range(L - 1):
            row = row @ self.M1
        return row

    def direct_block(self, src, tgt, l):
        """M(src, tgt; l) by summing over all e in [k^l]^{d+1} directly."""
        T, d = self.T, self.d
        s_states, _ = self.cat.objects[self.objects[src]]
        _, rp_src = self.cat.objects[self.objects[src]]
        t_states, rt = self.cat.objects[self.objects[tgt]]
        rsrc = self.cat.R[rp_src]
        roff = self.cat.R[rt]
        out = np.zeros((self.D, self.D), dtype=complex)
        for e in np.ndindex(*([T.k ** l] * (d + 1))):
            tgt_states, rp, lab = morphism(T, d, s_states, roff, l, e)
            if tgt_states == tuple(t_states) and rp == tuple(rsrc):
                out += cube_rep(self.rho, lab, self.cat.verts)
        return out / T.k ** ((d + 1) * l)


def operator_transfer(T, rho, d):
    return OperatorTransfer(T, rho, d)


def spectral_norm(m):
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def block_norms(op, M):
    n = len(op.objects)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = spectral_norm(op.block(M, i, j))
    return out


def norm_matrix_decay(T, rho, d, L_max, L_min=1, op=None):
    """Block norm tables N(L), a submultiplicativity check and a gamma fit on
    the (v0, v0) entry over L_min..L_max."""
    op = op or OperatorTransfer(T, rho, d)
    tables = {}
    M = np.eye(len(op.M1), dtype=complex)
    for L in range(1, L_max + 1):
        M = M @ op.M1
        tables[L] = block_norms(op, M)
    submult = True
    for l in range(1, L_max + 1):
        for l2 in range(1, L_max + 1 - l):
            if np.any(tables[l + l2] > tables[l] @ tables[l2] + 1e-9):
                submult = False
    Ls = list(range(L_min, L_max + 1))
    series = [tables[L][op.base, op.base] for L in Ls]
    W = op.counting_matrix()
    basic = frobenius_perron_check(W, W, max_power=8)["J"]
    basic_series = [float(tables[L][op.base, basic].max(initial=0.0)) for L in Ls]
    return {
        "tables": tables,
        "submultiplicative": submult,
        "gamma": _fit_gamma(Ls, series),
        "series": series,
        "basic_columns": basic,
        "gamma_basic": _fit_gamma(Ls, basic_series),
        "basic_series": basic_series,
        "op": op,
    }


def _fit_gamma(ls, values):
    values = np.asarray(values, dtype=float)
    if np.all(values <= 1e-300):
        return 0.0
    mask = values > 1e-300
    if mask.sum() < 2:
        return 0.0
    slope = np.polyfit(np.asarray(ls)[mask], np.log(values[mask]), 1)[0]
    return float(math.exp(slope))


def frobenius_perron_check(W, M, J=None, max_power=64, fit_from=None):
    """Classes and basic classes of W, and a decay fit of (M^l)_{I,J}.

    J defaults to the union of basic classes.  Raises if powers of W grow.
    """
    W = np.asarray(W, dtype=float)
    M = np.asarray(M, dtype=complex)
    n = len(W)
    P = np.eye(n)
    for _ in range(max_power):
        P = P @ W
        if np.max(np.abs(P), initial=0) > 1e6:
            raise ValueError("powers of W are unbounded")
    rad = max(abs(np.linalg.eigvals(W))) if n else 0.0
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if W[i, j] > 0)
    classes = [sorted(c) for c in nx.strongly_connected_components(g)]
    basic = [c for c in classes if abs(max(abs(np.linalg.eigvals(W[np.ix_(c, c)]))) - rad) <= 1e-9]
    if J is None:
        J = sorted(j for c in basic for j in c)
    series = []
    Q = np.eye(n, dtype=complex)
    for _ in range(max_power):
        Q = Q @ M
        series.append(float(np.max(np.abs(Q[:, J]), initial=0.0)))
    start = fit_from if fit_from is not None else max_power // 2
    ls = list(range(start + 1, max_power + 1))
    gamma = _fit_gamma(ls, series[start:])
    C = max((v / gamma ** l for l, v in zip(range(1, max_power + 1), series)), default=0.0) if gamma > 0 else 0.0
    return {
        "spectral_radius": float(rad),
        "classes": classes,
        "basic_classes": basic,
        "J": J,
        "gamma": gamma,
        "C": C,
        "series": series,
    }


# ---------------------------------------------------------------- decay fits

@dataclass
class DecayFit:
    d: int
    Ls: list
    values: list
    c: float
    r2: float
    exact_zero: bool = False


def decay_fit(values, Ls, k, d=None):
    """Least squares of log(value) against L; c = -slope / log k."""
    values = [float(v) for v in values]
    Ls = list(Ls)
    if len(values) < 4:
        raise ValueError("need at least 4 points")
    if any(v == 0 for v in values):
        return DecayFit(d, Ls, values, float("inf"), 1.0, True)
    x = np.asarray(Ls, dtype=float)
    y = np.log(values)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return DecayFit(d, Ls, values, -slope / math.log(k), r2)


def dp_decay(a, d, Ls):
    vals = [gowers_norm_dp(a, d, L).value for L in Ls]
    return decay_fit(vals, Ls, a.k, d)
