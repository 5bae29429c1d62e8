"""Deterministic finite automata with output, read most significant digit first."""

from __future__ import annotations

from collections import deque

import networkx as nx

DIGIT_CAP = 2 ** 20


def expand(n, k, l=None):
    """Base-k digits of n, most significant first.

    With ``l`` given the result is the last ``l`` digits of the zero-padded
    expansion.  ``expand(0, k)`` is the empty tuple.
    """
    if k < 2:
        raise ValueError("base must be at least 2")
    if n < 0:
        raise ValueError("n must be nonnegative")
    digits = []
    if l is None:
        while n:
            n, r = divmod(n, k)
            digits.append(r)
    else:
        for _ in range(l):
            n, r = divmod(n, k)
            digits.append(r)
    return tuple(reversed(digits))


def value(digits, k):
    n = 0
    for d in digits:
        n = n * k + d
    return n


class Automaton:
    """A k-automaton: ``delta[s][j]`` is the state reached from s on digit j."""

    def __init__(self, k, delta, initial=0, outputs=None, names=None):
        self.k = k
        self.delta = [tuple(row) for row in delta]
        self.initial = initial
        self.outputs = list(outputs) if outputs is not None else None
        n = len(self.delta)
        self.names = list(names) if names is not None else [f"s{i}" for i in range(n)]
        for row in self.delta:
            if len(row) != k or any(not 0 <= t < n for t in row):
                raise ValueError("transition table is not total over the state set")
        if not 0 <= initial < n:
            raise ValueError("initial state out of range")
        if self.outputs is not None and len(self.outputs) != n:
            raise ValueError("one output per state required")

    @property
    def n_states(self):
        return len(self.delta)

    def __repr__(self):
        return f"Automaton(k={self.k}, states={self.n_states})"

    def step(self, s, word):
        for j in word:
            s = self.delta[s][j]
        return s

    def run(self, n):
        """States visited while reading (n)_k, starting with the initial state."""
        s = self.initial
        path = [s]
        for j in expand(n, self.k):
            s = self.delta[s][j]
            path.append(s)
        return path

    def state_of(self, n):
        return self.step(self.initial, expand(n, self.k))

    def eval(self, n):
        if self.outputs is None:
            raise ValueError("automaton has no output table")
        return self.outputs[self.state_of(n)]

    def sequence(self, count):
        return [self.eval(n) for n in range(count)]

    def is_prolongable(self):
        return self.delta[self.initial][0] == self.initial

    def is_idempotent(self):
        return self.is_prolongable() and all(
            self.delta[self.delta[s][0]][0] == self.delta[s][0] for s in range(self.n_states))

    def with_outputs(self, outputs):
        return Automaton(self.k, self.delta, self.initial, outputs, self.names)

    def graph(self):
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n_states))
        for s, row in enumerate(self.delta):
            for t in row:
                g.add_edge(s, t)
        return g


def evaluate(a, n):
    return a.eval(n)


def reachable_states(a, start=None):
    start = a.initial if start is None else start
    seen = [start]
    seen_set = {start}
    for s in seen:
        for t in a.delta[s]:
            if t not in seen_set:
                seen_set.add(t)
                seen.append(t)
    return seen


def _refine(a, states, initial_key):
    """Moore refinement; returns the block id of every listed state."""
    block = {s: initial_key(s) for s in states}
    while True:
        sig = {s: (block[s],) + tuple(block[t] for t in a.delta[s]) for s in states}
        ids = {}
        new = {}
        for s in states:
            new[s] = ids.setdefault(sig[s], len(ids))
        if len(ids) == len(set(block.values())):
            return new
        block = new


def trim_minimize(a):
    """Drop unreachable states and merge indistinguishable ones.

    States of the result are numbered in BFS order from the initial state.
    """
    reach = reachable_states(a)
    if a.outputs is None:
        key0 = lambda s: 0
    else:
        out_ids = {}
        key0 = lambda s: out_ids.setdefault(_out_key(a.outputs[s]), len(out_ids))
    block = _refine(a, reach, key0)
    # renumber blocks by BFS order
    order = {}
    for s in reach:
        order.setdefault(block[s], len(order))
    n = len(order)
    delta = [None] * n
    outputs = [None] * n if a.outputs is not None else None
    names = [None] * n
    for s in reach:
        b = order[block[s]]
        if delta[b] is None:
            delta[b] = tuple(order[block[t]] for t in a.delta[s])
            names[b] = a.names[s]
            if outputs is not None:
                outputs[b] = a.outputs[s]
    return Automaton(a.k, delta, 0, outputs, names)


def _out_key(v):
    if isinstance(v, complex):
        return ("c", round(v.real, 12) + 0.0, round(v.imag, 12) + 0.0)
    return ("r", v)


class SCCInfo:
    """Strongly connected components of the transition graph.

    ``closed`` marks components with no edge leaving them; these are the
    components a run can never exit.
    """

    def __init__(self, components, component_of, dag, closed, initial_component):
        self.components = components
        self.component_of = component_of
        self.dag = dag
        self.closed = closed
        self.initial_component = initial_component

    @property
    def closed_states(self):
        return sorted(s for i, c in enumerate(self.components) if self.closed[i] for s in c)

    def __len__(self):
        return len(self.components)


def scc_decompose(a):
    g = a.graph()
    cond = nx.condensation(g)
    order = list(nx.topological_sort(cond))
    components = [sorted(cond.nodes[c]["members"]) for c in order]
    rank = {c: i for i, c in enumerate(order)}
    component_of = [rank[cond.graph["mapping"][s]] for s in range(a.n_states)]
    dag = nx.relabel_nodes(cond, rank, copy=True)
    closed = [dag.out_degree(i) == 0 for i in range(len(components))]
    return SCCInfo(components, component_of, dag, closed, component_of[a.initial])


def is_strongly_connected(a):
    return len(scc_decompose(a)) == 1


def _merge_pair(a, p, q):
    """Shortest word w with delta(p,w) == delta(q,w), or None."""
    if p == q:
        return ()
    start = (min(p, q), max(p, q))
    prev = {start: None}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for j in range(a.k):
            u, v = a.delta[x][j], a.delta[y][j]
            nxt = (min(u, v), max(u, v))
            if nxt in prev:
                continue
            prev[nxt] = ((x, y), j)
            if u == v:
                word = []
                cur = nxt
                while prev[cur] is not None:
                    cur, j2 = prev[cur]
                    word.append(j2)
                return tuple(reversed(word))
            queue.append(nxt)
    return None


def find_sync_word(a, states=None):
    """A word sending every state (or every state in ``states``) to one state.

    Greedy pair merging; ``None`` means some pair can never be merged, which
    proves that no synchronizing word exists.
    """
    current = sorted(set(range(a.n_states) if states is None else states))
    word = ()
    while len(current) > 1:
        w = _merge_pair(a, current[0], current[1])
        if w is None:
            return None
        word += w
        current = sorted({a.step(s, w) for s in current})
    return word


def is_synchronizing_word(a, w, states=None):
    states = range(a.n_states) if states is None else states
    return len({a.step(s, w) for s in states}) == 1


def make_prolongable(a):
    """Equivalent automaton whose initial state loops on the digit 0."""
    if a.is_prolongable():
        return a
    n = a.n_states
    row = (n,) + a.delta[a.initial][1:]
    outputs = None if a.outputs is None else a.outputs + [a.outputs[a.initial]]
    return Automaton(a.k, a.delta + [row], n, outputs, a.names + [a.names[a.initial] + "*"])


def reverse_automaton(a):
    """Automaton reading the digits of n least significant first.

    Its states are the maps f_w: s -> tau(delta(s, w)); reading digit j
    turns f_w into f_{jw} = f_w o delta(., j).  Leading zeros are harmless
    because the input is made prolongable first.
    """
    if a.outputs is None:
        raise ValueError("automaton has no output table")
    a = make_prolongable(a)
    out_ids = {}
    tau = tuple(out_ids.setdefault(_out_key(v), len(out_ids)) for v in a.outputs)
    values = {}
    for v in a.outputs:
        values.setdefault(out_ids[_out_key(v)], v)
    index = {tau: 0}
    funcs = [tau]
    delta = []
    for f in funcs:
        row = []
        for j in range(a.k):
            g = tuple(f[a.delta[s][j]] for s in range(a.n_states))
            if g not in index:
                index[g] = len(funcs)
                funcs.append(g)
            row.append(index[g])
        delta.append(row)
    outputs = [values[f[a.initial]] for f in funcs]
    return Automaton(a.k, delta, 0, outputs)


def reversed_eval(r, n):
    """Value of a reversed automaton on n (digits fed least significant first)."""
    return r.outputs[r.step(r.initial, tuple(reversed(expand(n, r.k))))]


def is_sync_sequence(a, direction="forward"):
    """Whether the minimal automaton for the given reading direction synchronizes.

    Returns ``(flag, witness)`` where the witness is a synchronizing word for
    the minimal automaton (in its own reading order) or None.
    """
    if direction == "forward":
        m = trim_minimize(a)
    elif direction == "backward":
        m = trim_minimize(reverse_automaton(a))
    else:
        raise ValueError("direction must be 'forward' or 'backward'")
    w = find_sync_word(m)
    return w is not None, w


def base_power_change(a, t):
    """The same sequence read in base k**t."""
    if t < 1:
        raise ValueError("t must be positive")
    K = a.k ** t
    if K > DIGIT_CAP:
        raise ValueError(f"base {K} exceeds digit cap {DIGIT_CAP}")
    if t == 1:
        return a
    words = [expand(D, a.k, t) for D in range(K)]
    delta = [[a.step(s, w) for w in words] for s in range(a.n_states)]
    return Automaton(K, delta, a.initial, a.outputs, a.names)


def idempotent_power(a):
    """Smallest t >= 1 with delta(., 0^t) idempotent as a self-map of the states."""
    n = a.n_states
    zero = [a.delta[s][0] for s in range(n)]
    e = list(zero)
    t = 1
    while True:
        if all(e[e[s]] == e[s] for s in range(n)):
            return t
        e = [zero[x] for x in e]
        t += 1


def make_idempotent(a):
    """Prolongable idempotent automaton producing the same sequence.

    Returns ``(automaton, t)`` with the new base ``k**t``.
    """
    t = idempotent_power(a)
    b = make_prolongable(base_power_change(a, t))
    return b, t


def killing_word(a):
    """A word w such that delta(s, w) lies in a closed component for every s.

    Built as w_{j+1} = w_j u_j where u_j drives the image of the j-th state
    into a closed component.
    """
    info = scc_decompose(a)
    closed = set(info.closed_states)
    word = ()
    for s in range(a.n_states):
        t = a.step(s, word)
        if t in closed:
            continue
        prev = {t: None}
        queue = deque([t])
        found = None
        while queue and found is None:
            x = queue.popleft()
            for j in range(a.k):
                y = a.delta[x][j]
                if y not in prev:
                    prev[y] = (x, j)
                    if y in closed:
                        found = y
                        break
                    queue.append(y)
        u = []
        cur = found
        while prev[cur] is not None:
            cur, j = prev[cur]
            u.append(j)
        word += tuple(reversed(u))
    return word


def prepend_word(a, u):
    """Automaton for b(n) = a([u (n)_k]_k).

    Leading zeros of u do not change the integer, so they are dropped; the
    remaining prefix is absorbed by moving the initial state.
    """
    u = tuple(u)
    if any(not 0 <= j < a.k for j in u):
        raise ValueError("digit out of range")
    i = 0
    while i < len(u) and u[i] == 0:
        i += 1
    u = u[i:]
    if not u:
        return a
    return Automaton(a.k, a.delta, a.step(a.initial, u), a.outputs, a.names)


def product_with_outputs(a, b, combine):
    """Synchronous product of two automata over the same base."""
    if a.k != b.k:
        raise ValueError("bases differ")
    index = {(a.initial, b.initial): 0}
    pairs = [(a.initial, b.initial)]
    delta = []
    for p, q in pairs:
        row = []
        for j in range(a.k):
            nxt = (a.delta[p][j], b.delta[q][j])
            if nxt not in index:
                index[nxt] = len(pairs)
                pairs.append(nxt)
            row.append(index[nxt])
        delta.append(row)
    outputs = [combine(a.outputs[p], b.outputs[q]) for p, q in pairs]
    return Automaton(a.k, delta, 0, outputs)


def product_many(automata, combine, cap=1 << 20):
    """Reachable synchronous product; output is combine(tuple of outputs)."""
    k = automata[0].k
    if any(a.k != k for a in automata):
        raise ValueError("bases differ")
    start = tuple(a.initial for a in automata)
    index = {start: 0}
    tuples = [start]
    delta = []
    for tup in tuples:
        row = []
        for j in range(k):
            nxt = tuple(a.delta[s][j] for a, s in zip(automata, tup))
            if nxt not in index:
                if len(tuples) >= cap:
                    raise ValueError(f"product exceeds {cap} states")
                index[nxt] = len(tuples)
                tuples.append(nxt)
            row.append(index[nxt])
        delta.append(row)
    outputs = [combine(tuple(a.outputs[s] if a.outputs is not None else s
                             for a, s in zip(automata, tup))) for tup in tuples]
    return Automaton(k, delta, 0, outputs)
