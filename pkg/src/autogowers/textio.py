"""Line-based text formats for automata, GEAs and sets.

Automaton files::

    base 2
    states s0 s1
    initial s0
    transition s0 0 s0
    output s0 int:4

Values are ``int:N``, ``rat:P/Q`` or ``cplx:RE,IM``.  GEA files add
``group degree D``, optional ``generator (1 2)`` lines, ``label s j (1 2)``
and ``geaoutput s (1 2) int:4`` for every state and group element.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

from fractions import Fraction

from . import groups as grp
from .automaton import Automaton
from .gea import GEA


class ParseError(ValueError):
    def __init__(self, line, msg):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def format_value(v):
    if isinstance(v, bool):
        return f"int:{int(v)}"
    if isinstance(v, int):
        return f"int:{v}"
    if isinstance(v, Fraction):
        return f"int:{v.numerator}" if v.denominator == 1 else f"rat:{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"cplx:{v!r},0.0"
    if isinstance(v, complex):
        return f"cplx:{v.real!r},{v.imag!r}"
    raise TypeError(f"cannot serialize output {v!r}")


def parse_value(text, line=0):
    kind, _, body = text.partition(":")
    try:
        if kind == "int":
            return int(body)
        if kind == "rat":
            return Fraction(body)
        if kind == "cplx":
            re_, im = body.split(",")
            return complex(float(re_), float(im))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(line, f"bad value {text!r}") from exc
    raise ParseError(line, f"unknown value kind {kind!r}")


def _lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body


def _header(text):
    k = names = initial = None
    for no, body in _lines(text):
        key, _, rest = body.partition(" ")
        if key == "base":
            try:
                k = int(rest)
            except ValueError as exc:
                raise ParseError(no, "base must be an integer") from exc
            if k < 2:
                raise ParseError(no, "base must be at least 2")
        elif key == "states":
            names = rest.split()
            if len(set(names)) != len(names) or not names:
                raise ParseError(no, "state names must be distinct and nonempty")
        elif key == "initial":
            initial = rest.strip()
    if k is None or names is None or initial is None:
        raise ParseError(0, "missing base, states or initial line")
    pos = {n: i for i, n in enumerate(names)}
    if initial not in pos:
        raise ParseError(0, f"unknown initial state {initial!r}")
    return k, names, pos, pos[initial]


def _state(pos, name, no):
    if name not in pos:
        raise ParseError(no, f"unknown state {name!r}")
    return pos[name]


def _digit(text, k, no):
    try:
        j = int(text)
    except ValueError as exc:
        raise ParseError(no, f"bad digit {text!r}") from exc
    if not 0 <= j < k:
        raise ParseError(no, f"digit {j} out of range for base {k}")
    return j


def parse_automaton(text):
    k, names, pos, initial = _header(text)
    n = len(names)
    delta = [[None] * k for _ in range(n)]
    outputs = [None] * n
    for no, body in _lines(text):
        parts = body.split()
        key = parts[0]
        if key == "transition":
            if len(parts) != 4:
                raise ParseError(no, "transition needs: state digit target")
            s = _state(pos, parts[1], no)
            delta[s][_digit(parts[2], k, no)] = _state(pos, parts[3], no)
        elif key == "output":
            if len(parts) != 3:
                raise ParseError(no, "output needs: state value")
            outputs[_state(pos, parts[1], no)] = parse_value(parts[2], no)
        elif key not in ("base", "states", "initial"):
            raise ParseError(no, f"unknown keyword {key!r}")
    for s in range(n):
        if None in delta[s]:
            raise ParseError(0, f"missing transition from {names[s]}")
    if all(o is None for o in outputs):
        outputs = None
    elif any(o is None for o in outputs):
        raise ParseError(0, "outputs must be given for all states or none")
    return Automaton(k, delta, initial, outputs, names)


def _safe_names(names):
    names = [str(x) for x in names]
    if len(set(names)) != len(names) or any(not x or any(c.isspace() or c == "#" for c in x) for x in names):
        return [f"s{i}" for i in range(len(names))]
    return names


def format_automaton(a):
    names = _safe_names(a.names)
    lines = [f"base {a.k}", "states " + " ".join(names), f"initial {names[a.initial]}"]
    for s, row in enumerate(a.delta):
        for j, t in enumerate(row):
            lines.append(f"transition {names[s]} {j} {names[t]}")
    if a.outputs is not None:
        for s, v in enumerate(a.outputs):
            lines.append(f"output {names[s]} {format_value(v)}")
    return "\n".join(lines) + "\n"


def parse_gea(text):
    k, names, pos, initial = _header(text)
    n = len(names)
    degree = None
    gens = []
    delta = [[None] * k for _ in range(n)]
    labels = [[None] * k for _ in range(n)]
    raw_out = {}
    for no, body in _lines(text):
        parts = body.split(None, 1)
        key = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        try:
            if key == "group":
                sub, _, val = rest.partition(" ")
                if sub != "degree":
                    raise ParseError(no, "expected 'group degree D'")
                degree = int(val)
            elif key == "generator":
                gens.append((no, rest))
            elif key == "transition":
                p = rest.split()
                if len(p) != 3:
                    raise ParseError(no, "transition needs: state digit target")
                delta[_state(pos, p[0], no)][_digit(p[1], k, no)] = _state(pos, p[2], no)
            elif key == "label":
                p = rest.split(None, 2)
                if len(p) != 3:
                    raise ParseError(no, "label needs: state digit cycles")
                labels[_state(pos, p[0], no)][_digit(p[1], k, no)] = (no, p[2])
            elif key == "geaoutput":
                s_name, _, tail = rest.partition(" ")
                cyc, _, val = tail.rpartition(" ")
                raw_out[(_state(pos, s_name, no), cyc.strip())] = (no, parse_value(val, no))
            elif key not in ("base", "states", "initial"):
                raise ParseError(no, f"unknown keyword {key!r}")
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(no, str(exc)) from exc
    if degree is None:
        raise ParseError(0, "missing 'group degree' line")

    def perm(no, text):
        try:
            return grp.parse_cycles(text, degree)
        except ValueError as exc:
            raise ParseError(no, str(exc)) from exc

    for s in range(n):
        if None in delta[s] or None in labels[s]:
            raise ParseError(0, f"missing transition or label from {names[s]}")
    label_perms = [[perm(*labels[s][j]) for j in range(k)] for s in range(n)]
    G = grp.closure([p for row in label_perms for p in row] + [perm(*g) for g in gens], degree)
    lab_idx = [[G.index[p] for p in row] for row in label_perms]
    outputs = None
    if raw_out:
        outputs = [[None] * len(G) for _ in range(n)]
        for (s, cyc), (no, v) in raw_out.items():
            p = perm(no, cyc)
            if p not in G.index:
                raise ParseError(no, f"{cyc} is not in the generated group")
            outputs[s][G.index[p]] = v
        for s in range(n):
            if None in outputs[s]:
                raise ParseError(0, f"geaoutput missing for some group element at {names[s]}")
    return GEA(k, delta, initial, G, lab_idx, outputs, names)


def format_gea(T):
    G = T.group
    names = _safe_names(T.names)
    lines = [
        f"base {T.k}",
        "states " + " ".join(names),
        f"initial {names[T.initial]}",
        f"group degree {G.degree}",
    ]
    for g in G.generators:
        lines.append(f"generator {grp.format_cycles(g)}")
    for s in range(T.n_states):
        for j in range(T.k):
            lines.append(f"transition {names[s]} {j} {names[T.delta[s][j]]}")
    for s in range(T.n_states):
        for j in range(T.k):
            lines.append(f"label {names[s]} {j} {grp.format_cycles(G.elements[T.labels[s][j]])}")
    if T.outputs is not None:
        for s in range(T.n_states):
            for g in range(len(G)):
                lines.append(f"geaoutput {names[s]} {grp.format_cycles(G.elements[g])} "
                             f"{format_value(T.outputs[s][g])}")
    return "\n".join(lines) + "\n"


def parse_set(text):
    out = []
    for no, body in _lines(text):
        try:
            out.append(int(body))
        except ValueError as exc:
            raise ParseError(no, f"bad integer {body!r}") from exc
    return out


def read(path, parser):
    with open(path) as fh:
        return parser(fh.read())


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
