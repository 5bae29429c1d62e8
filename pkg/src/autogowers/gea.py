"""Group extension automata (GEAs), the efficient GEA of an automaton, and
the chain of characteristic factors ending in a cyclic Z(m).

Labels compose left to right along a word:
lambda(s, uv) = lambda(s, u) * lambda(delta(s, u), v).
"""

from __future__ import annotations

from collections import deque
from math import gcd

import numpy as np

from . import groups as grp
from .automaton import Automaton, expand, find_sync_word, is_strongly_connected, scc_decompose


class GEA:
    """``delta[s][j]`` next state, ``labels[s][j]`` index into ``group.elements``,
    ``outputs[s][g]`` optional output table indexed by state and group index."""

    def __init__(self, k, delta, initial, group, labels, outputs=None, names=None):
        self.k = k
        self.delta = [tuple(r) for r in delta]
        self.initial = initial
        self.group = group
        self.labels = [tuple(r) for r in labels]
        self.outputs = [list(r) for r in outputs] if outputs is not None else None
        self.names = list(names) if names is not None else [f"s{i}" for i in range(len(self.delta))]
        n = len(self.delta)
        for row, lab in zip(self.delta, self.labels):
            if len(row) != k or len(lab) != k:
                raise ValueError("transition and label tables must be total")
            if any(not 0 <= t < n for t in row) or any(not 0 <= g < len(group) for g in lab):
                raise ValueError("transition or label out of range")
        if self.outputs is not None and (len(self.outputs) != n
                                         or any(len(r) != len(group) for r in self.outputs)):
            raise ValueError("output table must cover S x G")

    @property
    def n_states(self):
        return len(self.delta)

    def __repr__(self):
        return f"GEA(k={self.k}, states={self.n_states}, |G|={len(self.group)})"

    def step(self, s, word, g=0):
        G = self.group
        for j in word:
            g = G.mul(g, self.labels[s][j])
            s = self.delta[s][j]
        return s, g

    def state_label(self, n):
        return self.step(self.initial, expand(n, self.k))

    def eval(self, n):
        if self.outputs is None:
            raise ValueError("GEA has no output table")
        s, g = self.state_label(n)
        return self.outputs[s][g]

    def underlying(self):
        return Automaton(self.k, self.delta, self.initial, None, self.names)

    def is_idempotent(self):
        for s in range(self.n_states):
            t = self.delta[s][0]
            if self.delta[t][0] != t or self.labels[t][0] != 0:
                return False
        return self.delta[self.initial][0] == self.initial

    def label_perm(self, g):
        return self.group.elements[g]

    def without_outputs(self):
        return GEA(self.k, self.delta, self.initial, self.group, self.labels, None, self.names)


def gea_eval(T, n):
    return T.eval(n)


def product_automaton(T):
    """The automaton on S x G with (s, g) -j-> (delta(s, j), g * lambda(s, j)).

    State (s, g) has index s * |G| + g.
    """
    G = T.group
    ng = len(G)
    delta = []
    outputs = [] if T.outputs is not None else None
    names = []
    for s in range(T.n_states):
        for g in range(ng):
            delta.append([T.delta[s][j] * ng + G.mul(g, T.labels[s][j]) for j in range(T.k)])
            names.append(f"{T.names[s]}|{grp.format_cycles(G.elements[g])}")
            if outputs is not None:
                outputs.append(T.outputs[s][g])
    return Automaton(T.k, delta, T.initial * ng, outputs, names)


def zm_gea(m, k, with_outputs=True):
    """Z(m): one state, group Z/m, digit j labelled j mod m."""
    G = grp.cyclic_group(m)
    by_shift = {g[0] if m > 1 else 0: i for i, g in enumerate(G.elements)}
    labels = [[by_shift[j % m] for j in range(k)]]
    outputs = [[G.elements[g][0] if m > 1 else 0 for g in range(len(G))]] if with_outputs else None
    return GEA(k, [[0] * k], 0, G, labels, outputs, ["z"])


# ---------------------------------------------------------------- efficient GEA

class EfficiencyCertificate:
    def __init__(self, dprime, G0, g0, sync_word, m=None):
        self.dprime = dprime
        self.G0 = G0
        self.g0 = g0
        self.sync_word = tuple(sync_word)
        self.m = m
        self.lengths = {}

    def as_text(self, G):
        lines = [
            f"dprime: {self.dprime}",
            f"G_order: {len(G)}",
            f"G0_order: {len(self.G0)}",
            f"g0: {grp.format_cycles(G.elements[self.g0])}",
            f"sync_word: {''.join(map(str, self.sync_word)) or 'eps'}",
        ]
        if self.m is not None:
            lines.append(f"tuple_size: {self.m}")
        for key, val in sorted(self.lengths.items()):
            lines.append(f"{key}: {val}")
        return "\n".join(lines) + "\n"


def _minimal_images(a):
    n = a.n_states
    full = frozenset(range(n))
    seen = {full}
    queue = deque([full])
    while queue:
        X = queue.popleft()
        for j in range(a.k):
            Y = frozenset(a.delta[s][j] for s in X)
            if Y not in seen:
                seen.add(Y)
                queue.append(Y)
    m = min(len(X) for X in seen)
    return m, [X for X in seen if len(X) == m]


def _bfs_paths(delta, k, start):
    """For every state reachable from ``start``: (previous state, digit) in a BFS tree."""
    prev = {start: None}
    order = [start]
    for s in order:
        for j in range(k):
            t = delta[s][j]
            if t not in prev:
                prev[t] = (s, j)
                order.append(t)
    return prev, order


def _path_to(prev, t):
    word = []
    while prev[t] is not None:
        t, j = prev[t]
        word.append(j)
    return tuple(reversed(word))


def build_efficient_gea(a):
    """Efficient GEA producing the same sequence as the automaton ``a``.

    ``a`` must be strongly connected and idempotent (see
    ``automaton.make_idempotent``).  Returns ``(T, certificate)``.
    """
    if a.outputs is None:
        raise ValueError("automaton has no output table")
    if not is_strongly_connected(a):
        raise ValueError("automaton is not strongly connected")
    if not a.is_idempotent():
        raise ValueError("automaton is not idempotent")
    k, s0 = a.k, a.initial
    m, sets = _minimal_images(a)

    def canonical(X):
        if s0 in X and X == zero_fixed_with_s0:
            return (s0,) + tuple(sorted(X - {s0}))
        return tuple(sorted(X))

    def image(X, j):
        return frozenset(a.delta[s][j] for s in X)

    candidates = [X for X in sets if s0 in X and image(X, 0) == X]
    zero_fixed_with_s0 = min(candidates, key=lambda X: (s0,) + tuple(sorted(X - {s0})))

    # BFS from the initial tuple fixes the state numbering
    tuples = [canonical(zero_fixed_with_s0)]
    index = {tuples[0]: 0}
    delta, perms = [], []
    for hat in tuples:
        row, prow = [], []
        for j in range(k):
            nxt = canonical(image(frozenset(hat), j))
            if nxt not in index:
                index[nxt] = len(tuples)
                tuples.append(nxt)
            pos = {a.delta[x][j]: p for p, x in enumerate(hat)}
            prow.append(tuple(pos[y] for y in nxt))
            row.append(index[nxt])
        delta.append(row)
        perms.append(prow)
    n = len(tuples)

    # conjugate along a BFS tree so that tree edges carry the identity
    prev, _ = _bfs_paths(delta, k, 0)
    ident = grp.identity_perm(m)
    h = []
    for s in range(n):
        g = ident
        x = 0
        for j in _path_to(prev, s):
            g = grp.compose(g, perms[x][j])
            x = delta[x][j]
        h.append(g)
    perms = [[grp.compose(grp.compose(h[s], perms[s][j]), grp.inverse(h[delta[s][j]]))
              for j in range(k)] for s in range(n)]
    G = grp.closure([p for row in perms for p in row], m)
    labels = [[G.index[p] for p in row] for row in perms]
    # output of (s, g) is tau(hat_s[(L g R_s)^{-1}(0)]), tracked through conjugations
    left = ident
    right = list(h)
    names = ["(" + ",".join(a.names[x] for x in hat) + ")" for hat in tuples]
    T = GEA(k, delta, 0, G, labels, None, names)

    dprime, G0, g0 = compute_dprime(T)
    w = _normalizing_sync_word(T, dprime)
    hw = [G.inv[T.step(s, w)[1]] for s in range(n)]
    T = conjugate(T, hw)
    left = grp.compose(left, grp.inverse(G.elements[hw[0]]))
    right = [grp.compose(G.elements[hw[s]], right[s]) for s in range(n)]

    outputs = []
    for s in range(n):
        row = []
        for g in G.elements:
            p = grp.compose(grp.compose(left, g), right[s])
            row.append(a.outputs[tuples[s][grp.inverse(p)[0]]])
        outputs.append(row)
    T = GEA(k, T.delta, 0, G, T.labels, outputs, names)
    return T, EfficiencyCertificate(dprime, G0, g0, w, m)


def conjugate(T, h):
    """Relabel with lambda'(s, j) = h(s) lambda(s, j) h(delta(s, j))^{-1}.

    Outputs are adjusted so the produced sequence is unchanged:
    tau'(s, g) = tau(s, h(s0)^{-1} g h(s)).
    """
    G = T.group
    labels = [[G.mul(G.mul(h[s], T.labels[s][j]), G.inv[h[T.delta[s][j]]]) for j in range(T.k)]
              for s in range(T.n_states)]
    outputs = None
    if T.outputs is not None:
        hi0 = G.inv[h[T.initial]]
        outputs = [[T.outputs[s][G.mul(G.mul(hi0, g), h[s])] for g in range(len(G))]
                   for s in range(T.n_states)]
    return GEA(T.k, T.delta, T.initial, G, labels, outputs, T.names)


def _coprime_part(n, k):
    """Largest divisor of n coprime to k."""
    while True:
        g = gcd(n, k)
        if g == 1:
            return n
        n //= g


def _residue_reach(T, start, M):
    """Reachable (state, label, residue mod M) triples after at least one digit."""
    G = T.group
    seen = set()
    queue = deque()
    s, g, r = start
    for j in range(T.k):
        nxt = (T.delta[s][j], G.mul(g, T.labels[s][j]), (T.k * r + j) % M)
        if nxt not in seen:
            seen.add(nxt)
            queue.append(nxt)
    while queue:
        s, g, r = queue.popleft()
        for j in range(T.k):
            nxt = (T.delta[s][j], G.mul(g, T.labels[s][j]), (T.k * r + j) % M)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def compute_dprime(T):
    """(d', G0, g0) from the loops at the initial state.

    d' is the largest common divisor coprime to k of the values of words
    looping at s0 with trivial label; since d' divides |G| all residues are
    taken modulo the part of |G| coprime to k.
    """
    G = T.group
    M = _coprime_part(len(G), T.k)
    reach = _residue_reach(T, (T.initial, 0, 0), M)
    d = M
    for s, g, r in reach:
        if s == T.initial and g == 0:
            d = gcd(d, r)
    loops = [(g, r) for s, g, r in reach if s == T.initial]
    G0 = grp.closure([G.elements[g] for g, r in loops if r % d == 0], G.degree)
    g0 = min(g for g, r in loops if r % d == 1 % d)
    return d, G0, g0


def _normalizing_sync_word(T, dprime):
    """A word 0 w0 v synchronizing T to s0 with label id at s0 and value = 0 mod d'."""
    w0 = find_sync_word(T.underlying())
    if w0 is None:
        raise ValueError("underlying automaton is not synchronizing")
    G = T.group
    start_word = (0,) + tuple(w0)
    t, g = T.step(T.initial, start_word)
    r = 0
    for j in start_word:
        r = (T.k * r + j) % dprime
    prev = {(t, g, r): None}
    queue = deque([(t, g, r)])
    target = (T.initial, 0, 0)
    while queue:
        cur = queue.popleft()
        if cur == target:
            break
        s, g, r = cur
        for j in range(T.k):
            nxt = (T.delta[s][j], G.mul(g, T.labels[s][j]), (T.k * r + j) % dprime)
            if nxt not in prev:
                prev[nxt] = (cur, j)
                queue.append(nxt)
    if target not in prev:
        raise ValueError("no synchronizing word with trivial label at s0")
    tail = []
    cur = target
    while prev[cur] is not None:
        cur, j = prev[cur]
        tail.append(j)
    return start_word + tuple(reversed(tail))


# ---------------------------------------------------------------- efficiency check

def _right_mult(G):
    return np.asarray(G.table, dtype=np.int64).T  # row lab: g -> g * lab


def _iterate_until_cycle(x, step):
    """Iterate ``step`` from ``x``; returns (states, preperiod, period)."""
    seen = {}
    states = []
    while True:
        key = x.tobytes()
        if key in seen:
            start = seen[key]
            return states, start, len(states) - start
        seen[key] = len(states)
        states.append(x)
        x = step(x)


class EfficiencyReport:
    def __init__(self):
        self.checks = {}
        self.lengths = {}

    def __getitem__(self, key):
        return self.checks[key]

    @property
    def ok(self):
        return all(self.checks.values())

    def as_text(self):
        lines = [f"{key}: {'pass' if val else 'FAIL'}" for key, val in self.checks.items()]
        lines += [f"{key}: {val}" for key, val in self.lengths.items()]
        return "\n".join(lines) + "\n"


def _label_system_step(T, rm):
    def step(X):
        Y = np.zeros_like(X)
        for t in range(T.n_states):
            for j in range(T.k):
                Y[:, T.delta[t][j], rm[T.labels[t][j]]] |= X[:, t, :]
        return Y
    return step


def verify_efficiency(T, cert=None):
    """Exact decision of the efficiency properties.

    (T1) and (T3) track, for every word length, the set systems of labels
    (and residues) of words between each pair of states; these are
    eventually periodic and every set in the cycle is checked.  (T2) is a
    reachability question on S x G x Z/d'.
    """
    G = T.group
    n, ng = T.n_states, len(G)
    rep = EfficiencyReport()
    if cert is None:
        d, G0, g0 = compute_dprime(T)
        w = None
    else:
        d, G0, g0, w = cert.dprime, cert.G0, cert.g0, cert.sync_word
    rep.checks["strongly_connected"] = is_strongly_connected(T.underlying())
    rep.checks["idempotent"] = T.is_idempotent()
    rep.checks["zero_labels_trivial"] = all(T.labels[s][0] == 0 for s in range(n))
    if w is None:
        w = find_sync_word(T.underlying())
    sync = w is not None and all(T.step(s, w) == (T.initial, 0) for s in range(n))
    rep.checks["synchronizing"] = sync
    rep.checks["G0_normal"] = G.is_normal(G0)
    rep.checks["dprime_coprime"] = gcd(d, T.k) == 1
    rm = _right_mult(G)

    # (T1)
    X = np.zeros((n, n, ng), dtype=bool)
    for s in range(n):
        X[s, s, 0] = True
    states, pre, per = _iterate_until_cycle(X, _label_system_step(T, rm))
    rep.checks["T1"] = all(S.all() for S in states[pre:])
    rep.lengths["T1_stabilization"] = pre
    rep.lengths["T1_period"] = per

    # (T2)
    g0_pow = [0]
    for _ in range(d - 1):
        g0_pow.append(G.mul(g0_pow[-1], g0))
    g0_idx = G.indices_of(G0)
    cosets = [sorted({G.mul(h, g0_pow[r]) for h in g0_idx}) for r in range(d)]
    cosets_left = [sorted({G.mul(g0_pow[r], h) for h in g0_idx}) for r in range(d)]
    t2 = cosets == cosets_left
    for s in range(n):
        reach = _residue_reach(T, (s, 0, 0), d) | {(s, 0, 0)}
        found = {}
        for t, g, r in reach:
            found.setdefault((t, r), set()).add(g)
        for t in range(n):
            for r in range(d):
                if sorted(found.get((t, r), ())) != cosets[r]:
                    t2 = False
    rep.checks["T2"] = t2

    # (T3)
    M = _coprime_part(ng, T.k)
    Y = np.zeros((n, n, ng, M), dtype=bool)
    for s in range(n):
        Y[s, s, 0, 0] = True
    resmaps = [np.array([(T.k * r + j) % M for r in range(M)]) for j in range(T.k)]

    def step3(Y):
        Z = np.zeros_like(Y)
        for t in range(n):
            for j in range(T.k):
                Z[:, T.delta[t][j], rm[T.labels[t][j]][:, None], resmaps[j][None, :]] |= Y[:, t, :, :]
        return Z

    states, pre3, per3 = _iterate_until_cycle(Y, step3)
    t3 = True
    for S in states[pre3:]:
        for s in range(n):
            for t in range(n):
                for g in g0_idx:
                    res = np.flatnonzero(S[s, t, g])
                    if len(res) == 0:
                        t3 = False
                        continue
                    val = M
                    for r in res:
                        val = gcd(val, int(r))
                    if val != d:
                        t3 = False
    rep.checks["T3"] = t3
    rep.lengths["T3_stabilization"] = pre3
    rep.lengths["T3_period"] = per3
    if cert is not None:
        cert.lengths.update(rep.lengths)
    return rep


# ---------------------------------------------------------------- factors

class FactorMap:
    """A factor map: state map phi and group homomorphism pi."""

    def __init__(self, state_map, hom):
        self.state_map = list(state_map)
        self.hom = hom

    def then(self, other):
        return FactorMap([other.state_map[x] for x in self.state_map], self.hom.compose_with(other.hom))

    def check(self, T, F):
        """Factor-map axioms on every (state, digit)."""
        for s in range(T.n_states):
            for j in range(T.k):
                if self.state_map[T.delta[s][j]] != F.delta[self.state_map[s]][j]:
                    return False
                if self.hom(T.labels[s][j]) != F.labels[self.state_map[s]][j]:
                    return False
        return self.state_map[T.initial] == F.initial


def identity_factor(T):
    return FactorMap(range(T.n_states), grp.identity_hom(T.group))


def factor_quotient(T, H):
    Q, proj = grp.quotient(T.group, H)
    labels = [[proj(g) for g in row] for row in T.labels]
    F = GEA(T.k, T.delta, T.initial, Q, labels, None, T.names)
    return F, FactorMap(range(T.n_states), proj)


def factor_reduce(T):
    """Merge states along the coarsest relation respecting labels and transitions."""
    n = T.n_states
    block = {}
    ids = {}
    for s in range(n):
        block[s] = ids.setdefault(T.labels[s], len(ids))
    while True:
        ids = {}
        new = {}
        for s in range(n):
            key = (block[s],) + tuple(block[T.delta[s][j]] for j in range(T.k))
            new[s] = ids.setdefault(key, len(ids))
        stable = len(ids) == len(set(block.values()))
        block = new
        if stable:
            break
    prev, order = _bfs_paths(T.delta, T.k, T.initial)
    number = {}
    for s in order:
        number.setdefault(block[s], len(number))
    for s in range(n):
        number.setdefault(block[s], len(number))
    size = len(number)
    delta = [None] * size
    labels = [None] * size
    names = [None] * size
    for s in range(n):
        b = number[block[s]]
        if delta[b] is None:
            delta[b] = [number[block[t]] for t in T.delta[s]]
            labels[b] = list(T.labels[s])
            names[b] = T.names[s]
    F = GEA(T.k, delta, number[block[T.initial]], T.group, labels, None, names)
    return F, FactorMap([number[block[s]] for s in range(n)], grp.identity_hom(T.group))


def _pair_label_reach(T, s, t):
    """All (delta(s,u), delta(t,u), lambda(s,u), lambda(t,u)), u nonempty."""
    G = T.group
    seen = set()
    queue = deque()

    def push(x):
        if x not in seen:
            seen.add(x)
            queue.append(x)

    cur = (s, t, 0, 0)
    for j in range(T.k):
        push((T.delta[s][j], T.delta[t][j], T.labels[s][j], T.labels[t][j]))
    while queue:
        a, b, g, h = queue.popleft()
        for j in range(T.k):
            push((T.delta[a][j], T.delta[b][j], G.mul(g, T.labels[a][j]), G.mul(h, T.labels[b][j])))
    return seen, cur


def strongly_mistakable_pairs(T):
    pairs = []
    for s in range(T.n_states):
        for t in range(s + 1, T.n_states):
            seen, start = _pair_label_reach(T, s, t)
            if start in seen:
                pairs.append((s, t))
    return pairs


def strong_sync_factor(T):
    """Iterate T <- (T/H)_red until no two distinct states are strongly mistakable.

    Returns ``(factor, map, generators)``; ``generators`` lists the relation
    elements found at each round, as permutations of the group at that round.
    """
    fmap = identity_factor(T)
    cur = T
    rounds = []
    while True:
        pairs = strongly_mistakable_pairs(cur)
        if not pairs:
            return cur, fmap, rounds
        G = cur.group
        rel = set()
        for s, t in pairs:
            seen, _ = _pair_label_reach(cur, s, t)
            rel.update(G.mul(G.inv[g], h) for _, _, g, h in seen)
            rel.add(0)
        rel_perms = [G.elements[x] for x in sorted(rel)]
        rounds.append(rel_perms)
        H = grp.normal_closure(G, rel_perms)
        Q, m1 = factor_quotient(cur, H)
        R, m2 = factor_reduce(Q)
        if R.n_states == cur.n_states and len(R.group) == len(cur.group):
            raise RuntimeError("strong synchronisation reduction made no progress")
        fmap = fmap.then(m1).then(m2)
        cur = R


def all_long_words_sync_length(T):
    """Least L such that every word of length >= L synchronizes the underlying
    automaton, or None if there is no such L."""
    n = T.n_states
    pairs = {(s, t) for s in range(n) for t in range(n) if s != t}
    L = 0
    seen = set()
    while pairs:
        key = frozenset(pairs)
        if key in seen:
            return None
        seen.add(key)
        pairs = {(T.delta[s][j], T.delta[t][j]) for s, t in pairs for j in range(T.k)
                 if T.delta[s][j] != T.delta[t][j]}
        L += 1
    return L


def invertible_factor(T):
    """Factor down to a single-state GEA via the (N, L)-nondiscriminating steps."""
    L = all_long_words_sync_length(T)
    if L is None:
        raise ValueError("not every long word synchronizes the underlying automaton")
    L = max(L, 1)
    fmap = identity_factor(T)
    cur = T
    for N in range(1, T.k ** L):
        u = expand(N, T.k, L)
        G = cur.group
        ref = cur.step(0, u)[1]
        rel = [G.elements[G.mul(G.inv[ref], cur.step(s, u)[1])] for s in range(cur.n_states)]
        H = grp.normal_closure(G, rel)
        if len(H) > 1:
            cur, m = factor_quotient(cur, H)
            fmap = fmap.then(m)
    R, m = factor_reduce(cur)
    fmap = fmap.then(m)
    if R.n_states != 1:
        raise RuntimeError("reduction did not reach a single state")
    return R, fmap


def cyclic_factor(T):
    """Quotient of an invertible GEA isomorphic to Z(m), m | k - 1.

    Returns ``(Z(m), map, m)``.
    """
    if T.n_states != 1:
        raise ValueError("GEA is not invertible")
    G = T.group
    lab = T.labels[0]
    k = T.k
    start = (0, lab[1 % k] if k > 1 else 0)
    seen = {start}
    queue = deque([start])
    while queue:
        a, b = queue.popleft()
        for j in range(k):
            if j < k - 1:
                nxt = (G.mul(a, lab[j]), G.mul(a, lab[j + 1]))
            else:
                nxt = (G.mul(a, lab[j]), b)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    l1inv = G.inv[lab[1]]
    rel = [G.elements[G.mul(G.mul(b, l1inv), G.inv[a])] for a, b in seen]
    H = grp.normal_closure(G, rel)
    Q, proj = grp.quotient(G, H)
    m = len(Q)
    if (k - 1) % m:
        raise RuntimeError(f"cyclic factor order {m} does not divide k-1")
    Z = zm_gea(m, k, with_outputs=False)
    # identify Q with Z/m through the image of lambda(1)
    gen = proj(lab[1])
    power = {}
    x = 0
    for e in range(m):
        power[x] = e
        x = Q.mul(x, gen)
    shift = {Z.group.elements[i][0] if m > 1 else 0: i for i in range(m)}
    iso = [shift[power[q]] for q in range(m)]
    hom = grp.GroupHom(G, Z.group, [iso[proj(g)] for g in range(len(G))])
    fmap = FactorMap([0], hom)
    if not fmap.check(T, Z):
        raise RuntimeError("cyclic quotient is not Z(m)")
    return Z, fmap, m


def characteristic_chain(T):
    """Strong-sync factor, invertible factor and cyclic factor in turn.

    Returns ``(steps, m)`` with ``steps`` a list of (name, factor, map from T).
    """
    steps = [("input", T, identity_factor(T))]
    S, m1, _ = strong_sync_factor(T)
    steps.append(("strong_sync", S, m1))
    I, m2 = invertible_factor(S)
    steps.append(("invertible", I, m1.then(m2)))
    Z, m3, m = cyclic_factor(I)
    steps.append(("cyclic", Z, m1.then(m2).then(m3)))
    return steps, m
