"""confstab command line: tables, range verifications, witnesses and bracket traces.

Exit status: 0 on success, 1 on a usage error, 2 when a verification
finds a violation (or a bracket check does not end in Vanishes).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from confstab.algebra import DomainError, GeneratorSet, is_prime
from confstab.basis import dim_table, poincare
from confstab.browder.expr import E, Gen, Pow, parse
from confstab.browder.strategy import check_point_bracket
from confstab.stability import (
    Report,
    cone_dim,
    nearest_failure,
    optimality_witness,
    verify_ideal_coverage,
    verify_iso_range,
)
from confstab.words import verify_word_ranges

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

CLASS_HELP = "class name: e, x<j>, y<j>, z<j>, w<j> (omega_j, n > 2) or e^p"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _at_least(lo: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return v

    return conv


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="confstab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, m=False, k_max=False, grid=False, fmt=("json", "md", "csv"), p_default=None):
        sp.add_argument("--p", type=_prime, required=p_default is None, default=p_default, help="prime")
        sp.add_argument("--n", type=_at_least(2), default=2, help="ambient dimension (default 2)")
        if m:
            sp.add_argument("--m", type=_at_least(0), required=True, help="cone order / stability index")
        if k_max:
            sp.add_argument("--k-max", type=_at_least(0), required=True, help="largest particle count")
        if grid:
            sp.add_argument("--max-deg", type=_at_least(0), required=True)
            sp.add_argument("--max-par", type=_at_least(0), required=True)
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--out", help="write to FILE instead of stdout")
        sp.add_argument("--threads", type=_at_least(1), default=os.cpu_count() or 1, help="worker processes")

    sp = sub.add_parser("dim-table", help="dimensions of H_i(Conf_k(R^2); F_p)")
    common(sp, grid=True, fmt=("csv", "json", "md"))
    sp = sub.add_parser("poincare", help="Poincare series coefficients of the free algebra")
    common(sp, grid=True, fmt=("csv", "json", "md"))
    sp = sub.add_parser("cone-dim", help="dimensions of the order-m iterated cone")
    common(sp, m=True, grid=True, fmt=("csv", "json", "md"))

    sp = sub.add_parser("verify-range", help="stable-range verification over R^2")
    common(sp, m=True, k_max=True)
    sp.add_argument("--statement", choices=("iso", "ideal"), default="iso",
                    help="iso: multiplication by w_m on the order-m cone; ideal: coverage by (w_0..w_(m-1))")
    sp.add_argument("--slack", type=int, default=0, help="widen the range to i <= floor(D) + slack")

    sp = sub.add_parser("optimality", help="first failure of surjectivity just above the range")
    common(sp, m=True, k_max=True)

    sp = sub.add_parser("bracket-check", help="certify [z, e] = 0 with a proof trace")
    common(sp, fmt=("json", "md", "csv"))
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--class", dest="cls", help=CLASS_HELP)
    g.add_argument("--expr", help="expression in the prefix grammar, e.g. q(1,gen(e))")

    sp = sub.add_parser("words-verify", help="unstable-range case analysis for n > 2 over F_2")
    common(sp, m=True, fmt=("json", "md"), p_default=2)
    sp.add_argument("--max-par", type=_at_least(0), required=True, help="particle bound")
    sp.add_argument("--strict", action="store_true", help="demand deg > D instead of deg >= D")
    return ap


def parse_class(name: str, p: int):
    """Expression for a --class value."""
    name = name.strip()
    if name == "e":
        return E
    if name in ("e^p", f"e^{p}"):
        return Pow(E, p)
    if len(name) >= 2 and name[0] in "xyzw" and name[1:].isdigit():
        return Gen(name)
    raise UsageError(f"cannot parse class {name!r} ({CLASS_HELP})")


# ---- rendering ----


def _grid_csv(rows: list[list[int]], ncols: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i\\k", *range(ncols)])
    for i, r in enumerate(rows):
        w.writerow([i, *r])
    return buf.getvalue()


def _grid_md(rows: list[list[int]], ncols: int) -> str:
    head = "| i\\k | " + " | ".join(map(str, range(ncols))) + " |"
    rule = "|" + "---|" * (ncols + 1)
    body = [f"| {i} | " + " | ".join(map(str, r)) + " |" for i, r in enumerate(rows)]
    return "\n".join([head, rule, *body]) + "\n"


def _grid(rows: list[list[int]], ncols: int, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        return _grid_csv(rows, ncols)
    if fmt == "md":
        return _grid_md(rows, ncols)
    return json.dumps({**meta, "dims": rows}) + "\n"


def _report(rep: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rep.as_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        keys = sorted({k for v in rep.violations for k in v})
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys or ["no violations"])
        for v in rep.violations:
            w.writerow([json.dumps(v[k]) if isinstance(v.get(k), (list, dict)) else v.get(k, "") for k in keys])
        return buf.getvalue()
    lines = [f"## {rep.statement}", ""]
    lines += [f"- {k}: {v}" for k, v in sorted(rep.params.items())]
    lines += [f"- checked: {rep.checked}", f"- violations: {len(rep.violations)}",
              f"- result: {'PASS' if rep.passed else 'FAIL'}"]
    if rep.witness:
        lines.append(f"- witness: {json.dumps(rep.witness, sort_keys=True)}")
    for k in sorted(rep.extra):
        lines.append(f"- {k}: {json.dumps(rep.extra[k], sort_keys=True)}")
    for v in rep.violations[:50]:
        lines.append(f"  - {json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _trace(tr, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(tr.as_dict(), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "rule", "path", "expr"])
        w.writerow([0, "start", "", str(tr.initial)])
        for i, s in enumerate(tr.steps, 1):
            w.writerow([i, s.rule, "/".join(map(str, s.path)), str(s.result)])
        w.writerow([len(tr.steps) + 1, tr.verdict, "", str(tr.result)])
        return buf.getvalue()
    lines = [f"## [{tr.initial.left}, e] with n={tr.n}, p={tr.p}", "", "| # | rule | path | expression |", "|---|---|---|---|",
             f"| 0 | start | | `{tr.initial}` |"]
    for i, s in enumerate(tr.steps, 1):
        lines.append(f"| {i} | {s.rule} | {'/'.join(map(str, s.path))} | `{s.result}` |")
    lines += ["", f"verdict: **{tr.verdict}** `{tr.result}`"]
    if tr.note:
        lines.append(f"note: {tr.note}")
    return "\n".join(lines) + "\n"


# ---- commands ----


def _surface(args) -> GeneratorSet:
    if args.n != 2:
        raise UsageError(f"{args.command} covers n = 2 only; use words-verify for n > 2")
    return GeneratorSet(args.p, 2)


def run(args) -> tuple[int, str]:
    cmd = args.command
    if cmd in ("dim-table", "poincare", "cone-dim"):
        gs = _surface(args)
        meta = {"case": gs.case.value, "p": gs.p, "n": gs.n, "max_deg": args.max_deg, "max_par": args.max_par}
        if cmd == "dim-table":
            t = dim_table(gs, args.max_deg, args.max_par, workers=args.threads)
            rows = [list(r) for r in t.dims]
        elif cmd == "poincare":
            s = poincare(gs, args.max_deg, args.max_par)
            rows = [list(r) for r in s.coeffs]
        else:
            meta["m"] = args.m
            rows = [[cone_dim(gs, args.m, i, k) for k in range(args.max_par + 1)] for i in range(args.max_deg + 1)]
        return EXIT_OK, _grid(rows, args.max_par + 1, args.format, meta)

    if cmd == "verify-range":
        gs = _surface(args)
        if args.statement == "ideal":
            if args.m < 1:
                raise UsageError("ideal coverage needs --m >= 1")
            rep = verify_ideal_coverage(gs, args.m, args.k_max, args.slack, workers=args.threads)
        else:
            rep = verify_iso_range(gs, args.m, args.k_max, args.slack, workers=args.threads)
        return (EXIT_OK if rep.passed else EXIT_FAIL), _report(rep, args.format)

    if cmd == "optimality":
        gs = _surface(args)
        w = optimality_witness(gs, args.m, args.k_max)
        near = nearest_failure(gs, args.m, args.k_max)
        rep = Report("optimality", {"case": gs.case.value, "p": gs.p, "n": 2, "m": args.m, "k_max": args.k_max})
        rep.witness = w.as_dict() if w else None
        rep.extra["nearest_failure"] = near.as_dict() if near else None
        if w is None:
            rep.violations.append({"detail": "no failure at i = floor(D(p,m+1,k)) + 1 for any k <= k_max"})
        return (EXIT_OK if w else EXIT_FAIL), _report(rep, args.format)

    if cmd == "bracket-check":
        z = parse_class(args.cls, args.p) if args.cls else parse(args.expr)
        tr = check_point_bracket(z, args.n, args.p)
        return (EXIT_OK if tr.verdict == "Vanishes" else EXIT_FAIL), _trace(tr, args.format)

    if cmd == "words-verify":
        if args.p != 2:
            raise UsageError("the word classifier covers p = 2 only")
        if args.n <= 2 or args.m < 1:
            raise UsageError("words-verify needs --n > 2 and --m >= 1")
        rep = verify_word_ranges(args.n, args.m, args.max_par, strict=args.strict)
        return (EXIT_OK if rep.passed else EXIT_FAIL), _report(rep, args.format)

    raise UsageError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        code, text = run(args)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"confstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
