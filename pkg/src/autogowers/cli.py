"""Command line entry point.

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 budget refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from . import fixtures
from . import textio as tio
from .automaton import make_idempotent
from .cube import cube_sets, verify_characteristic, verify_cube_theorem
from .decompose import decompose, orthogonality_test
from .gea import build_efficient_gea, characteristic_chain, compute_dprime, verify_efficiency
from .gowers import BudgetExceeded, check_budget, gowers_norm_interval, many_ap_check
from .transfer import gowers_norm_dp

EXIT_PARSE, EXIT_PRECONDITION, EXIT_BUDGET = 2, 3, 4


class Precondition(ValueError):
    pass


def int_list(text):
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def float_list(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def int_range(text):
    """``a..b`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
    if lo > hi:
        raise argparse.ArgumentTypeError("empty range")
    return list(range(lo, hi + 1))


def load_automaton(args):
    if args.automaton:
        return tio.read(args.automaton, tio.parse_automaton)
    if args.fixture:
        if args.fixture not in fixtures.AUTOMATA:
            raise Precondition(f"unknown automaton fixture {args.fixture!r}")
        return fixtures.AUTOMATA[args.fixture]()
    raise Precondition("an --automaton file or --fixture is required")


def emit(args, name, text):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        tio.write(os.path.join(args.out, name), text)


def cmd_norm(args):
    a = load_automaton(args)
    if a.outputs is None:
        raise Precondition("automaton has no outputs")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "L", "N", "dp", "naive", "agree"])
    if len(args.d) * len(args.L) == 1:
        check_budget((a.k ** args.L[0]) ** (args.d[0] + 1), args.force)
    for d in args.d:
        for L in args.L:
            dp = gowers_norm_dp(a, d, L).value
            N = a.k ** L
            naive = ""
            agree = ""
            try:
                check_budget(N ** (d + 1), args.force)
                vals = np.array([complex(a.eval(n)) for n in range(N)])
                nv = gowers_norm_interval(vals, d, "naive", args.force).value
                naive = f"{nv:.12g}"
                agree = str(abs(nv - dp) <= 1e-9)
            except BudgetExceeded:
                if len(args.d) * len(args.L) == 1:
                    raise
            w.writerow([d, L, N, f"{dp:.12g}", naive, agree])
    out = buf.getvalue()
    emit(args, "norm.csv", out)
    sys.stdout.write(out)


def cmd_decompose(args):
    a = load_automaton(args)
    if a.outputs is None:
        raise Precondition("automaton has no outputs")
    D = decompose(a, args.d or (), args.L or range(8, 13))
    text = D.manifest()
    if args.verify:
        ok = D.check_additivity(args.verify)
        text += f"additivity_below_{args.verify}: {'pass' if ok else 'FAIL'}\n"
    if args.pmax:
        Ns = [a.k ** L for L in range(6, 13, 2)]
        corr, orth = orthogonality_test(D.a_uni, args.pmax, Ns)
        text += "periodic_correlation: " + ",".join(f"{c:.6g}" for c in corr) + "\n"
        text += f"orthogonal_to_periodic: {orth}\n"
    emit(args, "manifest.txt", text)
    emit(args, "a_str.aut", tio.format_automaton(D.a_str))
    emit(args, "a_uni.aut", tio.format_automaton(D.a_uni))
    S = D.structure
    emit(args, "fs.aut", tio.format_automaton(S.fs.with_outputs(list(range(S.fs.n_states)))))
    bs_out = [-1 if v is None else v for v in S.bs.outputs]
    emit(args, "bs.aut", tio.format_automaton(S.bs.with_outputs(bs_out)))
    rows = ["residue,fs_state,bs_output,value"]
    for (r, s, b), v in sorted(S.table().items(), key=lambda kv: repr(kv[0])):
        rows.append(f"{r},{s},{'none' if b is None else b},{tio.format_value(v)}")
    emit(args, "combiner.csv", "\n".join(rows) + "\n")
    head = ["n,a,a_str,a_uni"]
    for n in range(min(args.show, 1 << 20)):
        head.append(f"{n},{a.eval(n)},{D.str_value(n)},{D.uni_value(n)}")
    emit(args, "table.csv", "\n".join(head) + "\n")
    sys.stdout.write(text)
    if args.verify and "FAIL" in text:
        return 1
    return 0


def _efficient(args):
    a = load_automaton(args)
    if a.outputs is None:
        a = a.with_outputs([0] * a.n_states)
    b, t = make_idempotent(a)
    T, cert = build_efficient_gea(b)
    return T, cert, t


def cmd_gea(args):
    T, cert, t = _efficient(args)
    emit(args, "gea.txt", tio.format_gea(T))
    text = f"base_power: {t}\n" + cert.as_text(T.group)
    if args.verify_efficiency:
        text += verify_efficiency(T, cert).as_text()
    emit(args, "certificate.txt", text)
    sys.stdout.write(text)


def cmd_cubes(args):
    if args.gea or args.gea_fixture:
        if args.gea:
            T = tio.read(args.gea, tio.parse_gea)
        else:
            if args.gea_fixture not in fixtures.GEAS:
                raise Precondition(f"unknown GEA fixture {args.gea_fixture!r}")
            T = fixtures.GEAS[args.gea_fixture]()
        dprime, G0, g0 = compute_dprime(T)
    else:
        T, cert, _ = _efficient(args)
        dprime, G0, g0 = cert.dprime, cert.G0, cert.g0
    lines = []
    for d in args.d:
        if d > 3:
            raise Precondition("d must be at most 3")
        Q, l0 = cube_sets(T, d)
        emit(args, f"cubes_d{d}.txt", Q.as_text())
        rep = verify_cube_theorem(T, d, dprime, G0, g0)
        lines.append(f"d={d} |Q|={len(Q)} stabilization={l0} theorem={'pass' if rep.ok else 'FAIL'}")
        steps, m = characteristic_chain(T)
        for name, F, fmap in steps:
            ok = verify_characteristic(T, F, fmap, d)
            lines.append(f"d={d} characteristic[{name}]={'pass' if ok else 'FAIL'}")
        lines.append(f"terminal_order={m} dprime={dprime}")
    text = "\n".join(lines) + "\n"
    emit(args, "cubes_report.txt", text)
    sys.stdout.write(text)


def cmd_apcount(args):
    if args.set:
        members = tio.read(args.set, tio.parse_set)
    else:
        a = load_automaton(args)
        members = [n for n in range(args.N) if a.eval(n) == args.member]
    A = np.zeros(args.N, dtype=bool)
    A[[m for m in members if 0 <= m < args.N]] = True
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "l", "good_m", "fraction"])
    for eps in args.eps:
        good, frac = many_ap_check(A, args.N, args.l, eps)
        w.writerow([eps, args.l, good, f"{frac:.12g}"])
    out = buf.getvalue()
    emit(args, "apcount.csv", out)
    sys.stdout.write(out)


def build_parser():
    p = argparse.ArgumentParser(prog="autogowers")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--automaton")
        sp.add_argument("--fixture")
        sp.add_argument("--out")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--force", action="store_true")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("norm")
    common(sp)
    sp.add_argument("--d", type=int_list, default=[2])
    sp.add_argument("--L", type=int_range, default=list(range(4, 9)))
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("decompose")
    common(sp)
    sp.add_argument("--d", type=int_list, default=[])
    sp.add_argument("--L", type=int_range, default=None)
    sp.add_argument("--verify", type=int, default=0)
    sp.add_argument("--show", type=int, default=64)
    sp.add_argument("--pmax", type=int, default=0)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("gea")
    common(sp)
    sp.add_argument("--verify-efficiency", action="store_true")
    sp.set_defaults(func=cmd_gea)

    sp = sub.add_parser("cubes")
    common(sp)
    sp.add_argument("--gea")
    sp.add_argument("--gea-fixture")
    sp.add_argument("--d", type=int_list, default=[2])
    sp.set_defaults(func=cmd_cubes)

    sp = sub.add_parser("apcount")
    common(sp)
    sp.add_argument("--set")
    sp.add_argument("--member", type=int, default=1)
    sp.add_argument("--N", type=int, default=4096)
    sp.add_argument("--l", type=int, default=3)
    sp.add_argument("--eps", type=float_list, default=[0.05])
    sp.set_defaults(func=cmd_apcount)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args) or 0
    except tio.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (Precondition, ValueError) as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
