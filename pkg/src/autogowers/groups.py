"""Finite permutation groups, homomorphisms, quotients and a few unitary representations.

Permutations are tuples ``p`` of images, ``p[i]`` being the image of ``i``.
Products compose right to left: ``(g*h)[i] == g[h[i]]``.
Group elements are referred to by their index in ``PermGroup.elements``;
index 0 is always the identity.
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

GROUP_CAP = 100_000


class GroupCapExceeded(ValueError):
    pass


def compose(g, h):
    return tuple(g[i] for i in h)


def inverse(g):
    out = [0] * len(g)
    for i, gi in enumerate(g):
        out[gi] = i
    return tuple(out)


def identity_perm(m):
    return tuple(range(m))


def perm_sign(p):
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def parse_cycles(text, degree):
    """Parse 1-based cycle notation such as ``(1 2)(3 4 5)``; ``()`` and ``id`` mean identity."""
    text = text.strip()
    perm = list(range(degree))
    if text in ("", "()", "id"):
        return tuple(perm)
    if not re.fullmatch(r"(\(\s*\d+(?:[\s,]+\d+)*\s*\))+", text):
        raise ValueError(f"bad cycle notation: {text!r}")
    used = set()
    for body in re.findall(r"\(([^)]*)\)", text):
        pts = [int(x) - 1 for x in re.split(r"[\s,]+", body.strip())]
        for x in pts:
            if not 0 <= x < degree:
                raise ValueError(f"point {x + 1} out of range for degree {degree}")
            if x in used:
                raise ValueError(f"point {x + 1} repeated in {text!r}")
            used.add(x)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)


def format_cycles(p):
    """1-based cycle notation, fixed points omitted, identity as ``()``."""
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


class PermGroup:
    """A finite permutation group with its element list materialized."""

    def __init__(self, degree, elements, generators=None):
        self.degree = degree
        ident = identity_perm(degree)
        elements = list(elements)
        if elements[0] != ident:
            elements.remove(ident)
            elements.insert(0, ident)
        self.elements = elements
        self.index = {g: i for i, g in enumerate(elements)}
        self.generators = list(generators) if generators is not None else list(elements[1:])
        self._table = None
        self._inv = None

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        gens = ", ".join(format_cycles(g) for g in self.generators[:4])
        return f"PermGroup(order={len(self)}, degree={self.degree}, gens=[{gens}])"

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, g):
        return tuple(g) in self.index

    @property
    def table(self):
        """Multiplication table on indices (numpy), built on first use."""
        if self._table is None:
            n = len(self)
            arr = np.array(self.elements, dtype=np.int64)
            weights = self.degree ** np.arange(self.degree, dtype=np.int64)
            codes = arr @ weights
            order = np.argsort(codes)
            sorted_codes = codes[order]
            table = np.empty((n, n), dtype=np.int64)
            for a in range(n):
                # row a: (g_a * g_b)[i] = g_a[g_b[i]]
                prod_codes = arr[a][arr] @ weights
                table[a] = order[np.searchsorted(sorted_codes, prod_codes)]
            self._table = table
        return self._table

    @property
    def inv(self):
        if self._inv is None:
            self._inv = np.array([self.index[inverse(g)] for g in self.elements], dtype=np.int64)
        return self._inv

    def mul(self, a, b):
        if self._table is not None or len(self) <= 4096:
            return int(self.table[a, b])
        return self.index[compose(self.elements[a], self.elements[b])]

    def idx(self, g):
        return self.index[tuple(g)]

    def power(self, a, e):
        r = 0
        for _ in range(e % self.element_order(a)):
            r = self.mul(r, a)
        return r

    def element_order(self, a):
        x, n = a, 1
        while x != 0:
            x = self.mul(x, a)
            n += 1
        return n

    def is_abelian(self):
        return all(self.mul(a, b) == self.mul(b, a)
                   for a in range(len(self)) for b in range(len(self)))

    def subgroup(self, gens):
        """Subgroup generated by ``gens`` (permutations), as a new PermGroup."""
        return closure(gens, self.degree)

    def is_subgroup(self, H):
        return all(h in self.index for h in H.elements)

    def is_normal(self, H):
        if not self.is_subgroup(H):
            return False
        for g in self.generators:
            gi = inverse(g)
            for h in H.generators:
                if compose(compose(g, h), gi) not in H.index:
                    return False
        return True

    def indices_of(self, H):
        """Indices in this group of the elements of subgroup ``H``."""
        return [self.index[h] for h in H.elements]


def closure(generators, degree=None, cap=GROUP_CAP):
    gens = [tuple(g) for g in generators]
    if degree is None:
        if not gens:
            raise ValueError("degree required for an empty generator list")
        degree = len(gens[0])
    if any(len(g) != degree for g in gens):
        raise ValueError("generators of mixed degree")
    ident = identity_perm(degree)
    gens = [g for g in gens if g != ident]
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
                    if len(elements) > cap:
                        raise GroupCapExceeded(f"group order exceeds cap {cap}")
        frontier = nxt
    return PermGroup(degree, elements, gens)


def symmetric_group(m):
    if m == 1:
        return closure([], 1)
    gens = [tuple([1, 0] + list(range(2, m)))]
    if m > 2:
        gens.append(tuple(list(range(1, m)) + [0]))
    return closure(gens, m)


def cyclic_group(m):
    """Z/m as the rotations of m points; element ``j`` maps i to i+j mod m."""
    return closure([tuple((i + 1) % m for i in range(m))], m) if m > 1 else closure([], 1)


def trivial_group():
    return closure([], 1)


def normal_closure(G, X):
    """Smallest normal subgroup of ``G`` containing the permutations in ``X``."""
    gens = [tuple(x) for x in X]
    for x in gens:
        if x not in G.index:
            raise ValueError("element not in the ambient group")
    H = closure(gens, G.degree)
    while True:
        extra = []
        for g in G.generators:
            gi = inverse(g)
            for h in H.generators:
                c = compose(compose(g, h), gi)
                if c not in H.index:
                    extra.append(c)
        if not extra:
            return H
        H = closure(H.generators + extra, G.degree)


class GroupHom:
    """Homomorphism given by the image index of every domain element."""

    def __init__(self, domain, codomain, images):
        self.domain = domain
        self.codomain = codomain
        self.images = list(images)

    def __call__(self, a):
        return self.images[a]

    def apply_perm(self, g):
        return self.codomain.elements[self.images[self.domain.index[tuple(g)]]]

    def kernel(self):
        return [a for a, b in enumerate(self.images) if b == 0]

    def is_homomorphism(self, limit=2000, samples=4000, seed=0):
        D, C = self.domain, self.codomain
        n = len(D)
        if n <= limit:
            pairs = ((a, b) for a in range(n) for b in range(n))
        else:
            rng = np.random.default_rng(seed)
            pairs = zip(rng.integers(0, n, samples), rng.integers(0, n, samples))
        return all(self.images[D.mul(int(a), int(b))] == C.mul(self.images[a], self.images[b])
                   for a, b in pairs)

    def compose_with(self, other):
        """``other`` after ``self``."""
        return GroupHom(self.domain, other.codomain, [other.images[b] for b in self.images])

    @classmethod
    def from_generators(cls, domain, codomain, gen_images):
        """Extend a map on ``domain.generators`` to all elements by BFS over words."""
        images = {0: 0}
        order = [0]
        gidx = [domain.index[g] for g in domain.generators]
        cimg = [codomain.index[tuple(x)] for x in gen_images]
        for a in order:
            for g, c in zip(gidx, cimg):
                b = domain.mul(a, g)
                img = codomain.mul(images[a], c)
                if b in images:
                    if images[b] != img:
                        raise ValueError("generator images do not define a homomorphism")
                else:
                    images[b] = img
                    order.append(b)
        return cls(domain, codomain, [images[a] for a in range(len(domain))])


def identity_hom(G):
    return GroupHom(G, G, range(len(G)))


def quotient(G, H):
    """G/H realized as the permutation action of G on the cosets of H.

    Returns the quotient group and the projection homomorphism.
    """
    if not G.is_normal(H):
        raise ValueError("subgroup is not normal")
    hidx = G.indices_of(H)
    coset_of = [-1] * len(G)
    reps = []
    for a in range(len(G)):
        if coset_of[a] >= 0:
            continue
        c = len(reps)
        reps.append(a)
        for h in hidx:
            coset_of[G.mul(a, h)] = c
    ncos = len(reps)

    def action(g):
        return tuple(coset_of[G.mul(g, r)] for r in reps)

    Q = closure([action(G.index[g]) for g in G.generators], ncos) if ncos > 1 else trivial_group()
    if ncos == 1:
        return Q, GroupHom(G, Q, [0] * len(G))
    images = [Q.index[action(a)] for a in range(len(G))]
    return Q, GroupHom(G, Q, images)


def _as_number(v):
    if isinstance(v, complex):
        return v
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(v)


def coset_average(tau, G, G0):
    """Average a table ``tau[s][g]`` over right cosets ``g*G0``.

    ``tau`` is indexed by state then by element index of ``G``.  Exact when
    the values are integers or fractions.
    """
    h_idx = G.indices_of(G0)
    n0 = len(h_idx)
    out = []
    for row in tau:
        new_row = []
        for g in range(len(G)):
            total = sum((_as_number(row[G.mul(g, h)]) for h in h_idx), Fraction(0))
            new_row.append(total / n0 if not isinstance(total, complex) else total / n0)
        out.append(new_row)
    return out


def lower_central_series(G):
    """The chain G = G_1 ⊇ G_2 ⊇ ... down to its stable term (inclusive)."""
    chain = [G]
    while True:
        cur = chain[-1]
        comms = []
        for x in cur.generators:
            xi = inverse(x)
            for y in G.generators:
                yi = inverse(y)
                comms.append(compose(compose(x, y), compose(xi, yi)))
        nxt = normal_closure(G, comms) if comms else closure([], G.degree)
        if len(nxt) == len(cur):
            return chain
        chain.append(nxt)


class UnitaryRep:
    def __init__(self, group, matrices, name=""):
        self.group = group
        self.mats = [np.asarray(m, dtype=complex) for m in matrices]
        self.dim = self.mats[0].shape[0]
        self.name = name

    def __call__(self, a):
        return self.mats[a]

    def check(self, tol=1e-9):
        G = self.group
        n = len(G)
        eye = np.eye(self.dim)
        for a in range(n):
            m = self.mats[a]
            if np.abs(m @ m.conj().T - eye).max() > tol:
                return False
        for a in range(n):
            for b in range(n):
                if np.abs(self.mats[a] @ self.mats[b] - self.mats[G.mul(a, b)]).max() > tol:
                    return False
        return True


def builtin_rep(name, group=None, m=None, r=1):
    """Representations available without character theory.

    ``trivial`` and ``sign`` and ``regular`` need ``group``; ``cyclic_character``
    builds Z/m itself; ``sym3_standard`` builds Sym(3).
    """
    if name == "trivial":
        return UnitaryRep(group, [np.eye(1)] * len(group), name)
    if name == "sign":
        return UnitaryRep(group, [np.eye(1) * perm_sign(g) for g in group.elements], name)
    if name == "cyclic_character":
        G = cyclic_group(m) if group is None else group
        mats = [np.array([[np.exp(2j * np.pi * r * g[0] / m)]]) for g in G.elements]
        return UnitaryRep(G, mats, name)
    if name == "sym3_standard":
        G = symmetric_group(3) if group is None else group
        basis = np.array([[1, -1, 0], [1, 1, -2]], dtype=float)
        basis /= np.linalg.norm(basis, axis=1, keepdims=True)
        mats = []
        for g in G.elements:
            P = np.zeros((3, 3))
            for i, gi in enumerate(g):
                P[gi, i] = 1.0
            mats.append(basis @ P @ basis.T)
        return UnitaryRep(G, mats, name)
    if name == "regular":
        n = len(group)
        mats = []
        for a in range(n):
            P = np.zeros((n, n))
            for b in range(n):
                P[group.mul(a, b), b] = 1.0
            mats.append(P)
        return UnitaryRep(group, mats, name)
    raise ValueError(f"unknown representation {name!r}")


def rep_average(rho, G0):
    """E_{g in G0} rho(g) for a subgroup ``G0`` of ``rho.group``."""
    idx = rho.group.indices_of(G0)
    return sum(rho(a) for a in idx) / len(idx)


def rho_average_check(rho, G0, tol=1e-9):
    """True when the average of rho over G0 vanishes (spectral norm <= tol)."""
    return float(np.linalg.norm(rep_average(rho, G0), 2)) <= tol
