"""The cube category of a GEA: offset sets R and R', degree-one morphisms,
cube sets Q^d, Host-Kra groups and characteristic-factor checks.

Vertices of {0,1}^d are ordered lexicographically; a cube of group
elements is packed into one integer sum_i g_i |G|^i over that order.

A morphism (l, e) goes from v' = (s', r') to v = (s, r) where, for every
vertex w with x_w = (1w . e) + r_w,
    s_w = delta(s'_w, (x_w)_k^l),   r'_w = floor(x_w / k^l),
and its label cube is (lambda(s'_w, (x_w)_k^l))_w.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from fractions import Fraction

import numpy as np

from . import groups as grp

CUBE_CAP = 1 << 22


def vertices(d):
    return list(itertools.product((0, 1), repeat=d))


def one_dot(w, e):
    """1w . e = e_0 + sum_j w_j e_j."""
    return e[0] + sum(wj * ej for wj, ej in zip(w, e[1:]))


# ---------------------------------------------------------------- R and R'

def _fm_feasible(cons, nvars):
    """Fourier-Motzkin test for a system of rows (coeffs, bound, strict)
    meaning sum coeffs[i] t_i < bound (strict) or <= bound."""
    cons = _dedupe(cons)
    for x in range(nvars):
        pos, neg, rest = [], [], []
        for c in cons:
            a = c[0][x]
            (pos if a > 0 else neg if a < 0 else rest).append(c)
        for ca, ba, sa in pos:
            for cb, bb, sb in neg:
                fa, fb = -cb[x], ca[x]
                coeffs = tuple(fa * u + fb * v for u, v in zip(ca, cb))
                rest.append((coeffs, fa * ba + fb * bb, sa or sb))
        cons = _dedupe(rest)
    for _, b, strict in cons:
        if b < 0 or (strict and b == 0):
            return False
    return True


def _dedupe(cons):
    best = {}
    for coeffs, b, strict in cons:
        scale = max((abs(c) for c in coeffs), default=0)
        if scale == 0:
            key = None
            if key in best and not _tighter(best[key], (b, strict)):
                continue
            best[key] = (b, strict)
            continue
        key = tuple(Fraction(c) / scale for c in coeffs)
        nb = Fraction(b) / scale
        if key in best and not _tighter(best[key], (nb, strict)):
            continue
        best[key] = (nb, strict)
    out = []
    for key, (b, strict) in best.items():
        if key is None:
            out.append((None, b, strict))
        else:
            out.append((key, b, strict))
    # constraints with no variables left keep a zero coefficient vector
    n = next((len(k) for k in best if k is not None), 0)
    return [(c if c is not None else (Fraction(0),) * n, b, s) for c, b, s in out]


def _tighter(old, new):
    """True if ``new`` (bound, strict) is strictly tighter than ``old``."""
    ob, os_ = old
    nb, ns = new
    return nb < ob or (nb == ob and ns and not os_)


def _cell_constraints(d, assignment):
    """Constraints for 0 <= t_i < 1 and r_w <= 1w.t < r_w + 1 for assigned w."""
    n = d + 1
    one = Fraction(1)
    zero = Fraction(0)
    cons = []
    for i in range(n):
        unit = tuple(one if j == i else zero for j in range(n))
        neg = tuple(-c for c in unit)
        cons.append((neg, zero, False))
        cons.append((unit, one, True))
    for w, r in assignment:
        row = (one,) + tuple(Fraction(x) for x in w)
        cons.append((tuple(-c for c in row), Fraction(-r), False))
        cons.append((row, Fraction(r + 1), True))
    return cons


def enumerate_R(d, max_d=4):
    """All floor patterns (floor(1w . t))_w with t in [0,1)^{d+1}, sorted."""
    if d > max_d:
        raise ValueError(f"d={d} exceeds the enumeration bound {max_d}")
    return list(_enumerate_R(d))


@functools.lru_cache(maxsize=None)
def _enumerate_R(d):
    verts = vertices(d)
    out = []

    def extend(i, assignment):
        if i == len(verts):
            out.append(tuple(r for _, r in assignment))
            return
        w = verts[i]
        for r in range(sum(w) + 1):
            trial = assignment + [(w, r)]
            if _fm_feasible(_cell_constraints(d, trial), d + 1):
                extend(i + 1, trial)

    extend(0, [])
    return tuple(sorted(out))


def enumerate_Rprime(d, max_d=4):
    """Elements of R of the form (1w . n)_w for an integer vector n."""
    R = set(enumerate_R(d, max_d))
    verts = vertices(d)
    out = set()
    for n in itertools.product(range(-d, d + 1), repeat=d + 1):
        r = tuple(one_dot(w, n) for w in verts)
        if r in R:
            out.add(r)
    return sorted(out)


# ---------------------------------------------------------------- cube sets

class CubeSet:
    """A subset of G^{[d]} stored as a boolean mask over packed cubes."""

    def __init__(self, group, d, mask):
        self.group = group
        self.d = d
        self.mask = np.asarray(mask, dtype=bool)

    def __len__(self):
        return int(self.mask.sum())

    def __eq__(self, other):
        return isinstance(other, CubeSet) and np.array_equal(self.mask, other.mask)

    def __le__(self, other):
        return not np.any(self.mask & ~other.mask)

    def __contains__(self, cube):
        return bool(self.mask[pack(cube, len(self.group))])

    def packed(self):
        return np.flatnonzero(self.mask)

    def cubes(self):
        V = 2 ** self.d
        return [unpack(int(p), len(self.group), V) for p in self.packed()]

    def as_text(self):
        G = self.group
        lines = []
        for c in self.cubes():
            lines.append(" ".join(grp.format_cycles(G.elements[g]) for g in c))
        return "\n".join(lines) + ("\n" if lines else "")


def pack(cube, ng):
    p = 0
    for g in reversed(cube):
        p = p * ng + g
    return p


def unpack(p, ng, V):
    out = []
    for _ in range(V):
        p, g = divmod(p, ng)
        out.append(g)
    return tuple(out)


class CubeArith:
    """Right multiplication of packed cubes by a fixed cube, cached."""

    def __init__(self, group, d):
        self.group = group
        self.d = d
        self.V = 2 ** d
        ng = len(group)
        self.N = ng ** self.V
        if self.N > CUBE_CAP:
            raise ValueError(f"|G|^(2^d) = {self.N} exceeds cube cap {CUBE_CAP}")
        self.rm = np.asarray(group.table, dtype=np.int64).T
        p = np.arange(self.N, dtype=np.int64)
        self.digits = np.empty((self.N, self.V), dtype=np.int64)
        for i in range(self.V):
            p, self.digits[:, i] = np.divmod(p, ng)
        self.weights = ng ** np.arange(self.V, dtype=np.int64)
        self._cache = {}

    def right(self, cube):
        perm = self._cache.get(cube)
        if perm is None:
            perm = np.zeros(self.N, dtype=np.int64)
            for i, c in enumerate(cube):
                perm += self.rm[c][self.digits[:, i]] * self.weights[i]
            self._cache[cube] = perm
        return perm

    def mul_sets(self, A, B):
        """Mask of {a b : a in A, b in B}."""
        out = np.zeros(self.N, dtype=bool)
        for b in np.flatnonzero(B):
            out[self.right(unpack(int(b), len(self.group), self.V))] |= A
        return out

    def left_right(self, A, left, right):
        """Mask of left^{-1} A right for cubes ``left`` and ``right``."""
        # left^{-1} a = (a^{-1} left)^{-1}
        inv_perm = self._inverse_perm()
        B = np.zeros(self.N, dtype=bool)
        B[inv_perm[np.flatnonzero(A)]] = True  # A^{-1}
        C = np.zeros(self.N, dtype=bool)
        C[self.right(left)[np.flatnonzero(B)]] = True  # A^{-1} left
        D = np.zeros(self.N, dtype=bool)
        D[inv_perm[np.flatnonzero(C)]] = True  # left^{-1} A
        E = np.zeros(self.N, dtype=bool)
        E[self.right(right)[np.flatnonzero(D)]] = True
        return E

    def _inverse_perm(self):
        if not hasattr(self, "_inv"):
            inv = np.asarray(self.group.inv, dtype=np.int64)
            self._inv = (inv[self.digits] * self.weights).sum(axis=1)
        return self._inv

    def subgroup(self, generators):
        """Mask of the subgroup generated by the given cubes."""
        mask = np.zeros(self.N, dtype=bool)
        mask[0] = True
        frontier = np.array([0])
        perms = [self.right(tuple(c)) for c in generators]
        while len(frontier):
            new = []
            for perm in perms:
                img = perm[frontier]
                fresh = img[~mask[img]]
                fresh = np.unique(fresh)
                mask[fresh] = True
                new.append(fresh)
            frontier = np.unique(np.concatenate(new)) if new else np.array([], dtype=np.int64)
        return mask

    def product_mask(self, sets):
        """Mask of the product set prod_w sets[w] (per-vertex subsets of G)."""
        mask = np.ones(self.N, dtype=bool)
        for i, allowed in enumerate(sets):
            ok = np.zeros(len(self.group), dtype=bool)
            ok[list(allowed)] = True
            mask &= ok[self.digits[:, i]]
        return mask


class CubeCategory:
    """Objects (s, r) of the cube category and its degree-one morphisms."""

    def __init__(self, T, d, max_d=4):
        self.T = T
        self.d = d
        self.verts = vertices(d)
        self.V = len(self.verts)
        self.R = enumerate_R(d, max_d)
        self.Rindex = {r: i for i, r in enumerate(self.R)}
        self.Rprime = enumerate_Rprime(d, max_d)
        self.steps_from = self._steps()
        self.objects = []
        self.index = {}

    def _steps(self):
        """For each source offset r', the (e, target offset r, digits) with
        floor((1w.e + r_w)/k) = r'_w at every vertex."""
        k = self.T.k
        steps = [[] for _ in self.R]
        for e in itertools.product(range(k), repeat=self.d + 1):
            base = [one_dot(w, e) for w in self.verts]
            for ri, r in enumerate(self.R):
                xs = [b + rw for b, rw in zip(base, r)]
                rp = tuple(x // k for x in xs)
                src = self.Rindex.get(rp)
                if src is not None:
                    steps[src].append((e, ri, tuple(x % k for x in xs)))
        return steps

    def obj(self, states, ri):
        key = (tuple(states), ri)
        i = self.index.get(key)
        if i is None:
            i = len(self.objects)
            self.index[key] = i
            self.objects.append(key)
        return i

    def base_object(self):
        return self.obj((self.T.initial,) * self.V, self.Rindex[(0,) * self.V])

    def successors(self, i):
        """Degree-one morphisms out of object i: (target, e, label cube)."""
        T = self.T
        states, rp = self.objects[i]
        out = []
        for e, ri, digits in self.steps_from[rp]:
            tgt = tuple(T.delta[s][c] for s, c in zip(states, digits))
            lab = tuple(T.labels[s][c] for s, c in zip(states, digits))
            out.append((self.obj(tgt, ri), e, lab))
        return out

    def explore(self, seeds):
        """Objects reachable from ``seeds`` and the degree-one edges among them."""
        seen = set(seeds)
        order = list(seeds)
        edges = []
        queue = deque(seeds)
        while queue:
            i = queue.popleft()
            for j, e, lab in self.successors(i):
                edges.append((i, j, e, lab))
                if j not in seen:
                    seen.add(j)
                    order.append(j)
                    queue.append(j)
        return order, edges


def degree1_morphisms(T, d):
    """The cube category explored from the base object and from every
    (s0^{[d]}, r'), r' in R'."""
    cat = CubeCategory(T, d)
    seeds = [cat.obj((T.initial,) * cat.V, cat.Rindex[r]) for r in cat.Rprime]
    cat.reachable, cat.edges = cat.explore(seeds)
    return cat


def morphism(T, d, source_states, target_offsets, l, e):
    """Explicit degree-l morphism: returns (target states, source offsets, labels)."""
    k = T.k
    verts = vertices(d)
    tgt, rp, lab = [], [], []
    for w, s, r in zip(verts, source_states, target_offsets):
        x = one_dot(w, e) + r
        digits = tuple((x // k ** (l - 1 - i)) % k for i in range(l))
        t, g = T.step(s, digits)
        tgt.append(t)
        lab.append(g)
        rp.append(x // k ** l)
    return tuple(tgt), tuple(rp), tuple(lab)


class CubeSystem:
    """Q^d_l(source, v) for all v reachable from ``source``, iterated in l."""

    def __init__(self, cat, source, arith=None):
        self.cat = cat
        self.arith = arith or CubeArith(cat.T.group, cat.d)
        self.order, self.edges = cat.explore([source])
        self.pos = {o: i for i, o in enumerate(self.order)}
        self.source = source
        self.perms = [(self.pos[i], self.pos[j], self.arith.right(lab)) for i, j, _, lab in self.edges]

    def initial(self):
        X = np.zeros((len(self.order), self.arith.N), dtype=bool)
        X[self.pos[self.source], 0] = True
        return X

    def step(self, X):
        Y = np.zeros_like(X)
        for a, b, perm in self.perms:
            Y[b, perm[X[a]]] = True
        return Y

    def run(self, max_steps=100000):
        """Iterate to the eventual cycle; returns (limit X, l0)."""
        X = self.initial()
        seen = {X.tobytes(): 0}
        history = [X]
        for l in range(1, max_steps):
            X = self.step(X)
            key = X.tobytes()
            if key in seen:
                start = seen[key]
                period = l - start
                if period != 1:
                    raise RuntimeError(f"cube sets are periodic with period {period}, not convergent")
                return X, start
            seen[key] = l
            history.append(X)
        raise RuntimeError("cube-set iteration did not stabilize")

    def by_length(self, lmax):
        X = self.initial()
        out = [X]
        for _ in range(lmax):
            X = self.step(X)
            out.append(X)
        return out


def cube_sets(T, d, v=None, v2=None, cat=None):
    """Limit cube set Q^d(T)(v, v2) and its stabilization length.

    Objects default to the base object; both must be reachable from it.
    """
    cat = cat or CubeCategory(T, d)
    base = cat.base_object()
    ob_u, _ = cat.explore([base])
    v = base if v is None else v
    v2 = v if v2 is None else v2
    for x in (v, v2):
        if x not in ob_u:
            raise ValueError("object is not reachable from the base object")
    sysm = CubeSystem(cat, v)
    X, l0 = sysm.run()
    if v2 not in sysm.pos:
        return CubeSet(T.group, d, np.zeros(sysm.arith.N, dtype=bool)), l0
    return CubeSet(T.group, d, X[sysm.pos[v2]]), l0


def hk_group(G, d):
    """Host-Kra cube group of G for the lower central series.

    Generated by the cubes g^{[>= sigma]} (g on the vertices above sigma)
    with g in G_{|sigma|}, where G_0 = G_1 = G.  This includes the constant
    cubes and, for abelian G, equals {(h0 prod h_j^{w_j})_w}.
    """
    arith = CubeArith(G, d)
    series = grp.lower_central_series(G)
    verts = vertices(d)
    gens = []
    for sigma in verts:
        level = max(sum(sigma), 1)
        H = series[level - 1] if level - 1 < len(series) else series[-1]
        for g in H.generators:
            gi = G.index[g]
            gens.append(tuple(gi if all(a >= b for a, b in zip(w, sigma)) else 0 for w in verts))
    return CubeSet(G, d, arith.subgroup(gens))


def theorem_rhs(T, d, dprime, G0, g0, arith=None):
    """G0^{[d]} H with H = {(g0^{1w.e})_w : e in [ord g0]^{d+1}}."""
    G = T.group
    arith = arith or CubeArith(G, d)
    verts = vertices(d)
    g0_idx = G.indices_of(G0)
    base = arith.product_mask([g0_idx] * len(verts))
    order = G.element_order(g0)
    pw = [0]
    for _ in range(order - 1):
        pw.append(G.mul(pw[-1], g0))
    Hmask = np.zeros(arith.N, dtype=bool)
    for e in itertools.product(range(order), repeat=d + 1):
        Hmask[pack(tuple(pw[one_dot(w, e) % order] for w in verts), len(G))] = True
    return arith.mul_sets(base, Hmask)


class CubeReport:
    def __init__(self):
        self.checks = {}
        self.details = {}

    @property
    def ok(self):
        return all(self.checks.values())

    def as_text(self):
        lines = [f"{key}: {'pass' if val else 'FAIL'}" for key, val in self.checks.items()]
        lines += [f"{key}: {val}" for key, val in self.details.items()]
        return "\n".join(lines) + "\n"


def verify_cube_theorem(T, d, dprime, G0, g0, max_objects=None):
    """Compare Q^d(v, v') with g_v^{-1} G0^{[d]} H g_{v'} over Ob_U.

    g_v is the least packed element of Q^d(v0, v).
    """
    cat = CubeCategory(T, d)
    arith = CubeArith(T.group, d)
    base = cat.base_object()
    rhs = theorem_rhs(T, d, dprime, G0, g0, arith)
    rep = CubeReport()
    sys0 = CubeSystem(cat, base, arith)
    X0, l0 = sys0.run()
    rep.details["objects"] = len(sys0.order)
    rep.details["stabilization_base"] = l0
    rep.checks["base_equality"] = np.array_equal(X0[sys0.pos[base]], rhs)
    # G0^{[d]} inside Q_l(v0, v0) from the stabilization length on
    g0mask = arith.product_mask([T.group.indices_of(G0)] * arith.V)
    rep.checks["G0_cubes_contained"] = not np.any(g0mask & ~X0[sys0.pos[base]])
    conj = {}
    for o in sys0.order:
        nz = np.flatnonzero(X0[sys0.pos[o]])
        conj[o] = unpack(int(nz[0]), len(T.group), arith.V) if len(nz) else None
    objs = sys0.order if max_objects is None else sys0.order[:max_objects]
    all_ok = True
    for v in objs:
        sysv = CubeSystem(cat, v, arith)
        Xv, _ = sysv.run()
        for v2 in objs:
            if v2 not in sysv.pos:
                all_ok = False
                continue
            expect = arith.left_right(rhs, conj[v], conj[v2])
            if not np.array_equal(Xv[sysv.pos[v2]], expect):
                all_ok = False
    rep.checks["all_pairs_equality"] = all_ok
    rep.details["pairs_checked"] = len(objs) ** 2
    return rep


def preimage(F_set, hom, d, arith_T):
    """Coordinatewise preimage of a cube set of the factor group."""
    img = np.asarray(hom.images, dtype=np.int64)
    ngF = len(hom.codomain)
    packedF = np.zeros(arith_T.N, dtype=np.int64)
    w = 1
    for i in range(arith_T.V):
        packedF += img[arith_T.digits[:, i]] * w
        w *= ngF
    return F_set.mask[packedF]


def verify_characteristic(T, F, fmap, d):
    """Whether Q^d(T) equals the preimage of Q^d(F) under the factor map."""
    if not fmap.check(T, F):
        raise ValueError("not a factor map")
    QT, _ = cube_sets(T, d)
    QF, _ = cube_sets(F, d)
    arith = CubeArith(T.group, d)
    return bool(np.array_equal(QT.mask, preimage(QF, fmap.hom, d, arith)))


def K_approx(T, d_max):
    """{h : the cube with h at the top vertex and id elsewhere lies in Q^d(T)
    for every d <= d_max}."""
    G = T.group
    keep = set(range(len(G)))
    for d in range(0, d_max + 1):
        Q, _ = cube_sets(T, d)
        V = 2 ** d
        keep = {h for h in keep if Q.mask[pack((0,) * (V - 1) + (h,), len(G))]}
    return grp.closure([G.elements[h] for h in sorted(keep)], G.degree)
