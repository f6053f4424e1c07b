"""Command line: ``hyperflat classes|cubulate|hyperbolize|verify``.

Exit codes: 0 all checks pass, 2 verification mismatch, 3 precondition
failure, 4 compute cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import bieberbach as bb
from . import char_classes as ccl
from . import cube_complex as cc
from . import hyperbolization as hy

OK, MISMATCH, PRECONDITION, CAP = 0, 2, 3, 4

THREADS_ENV = "HYPERFLAT_THREADS"


@dataclass
class Caps:
    ls_n: int = 20
    cover_n: int = 16
    cube_n: int = 6


@dataclass
class RunConfig:
    command: str
    n_values: list[int] = field(default_factory=list)
    variant: str = "ls"
    group_file: Optional[str] = None
    output: str = "table"
    caps: Caps = field(default_factory=Caps)
    threads: int = 1


class CapExceeded(Exception):
    pass


class Precondition(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"7"`` or ``"2-10"``."""
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A-B, got {text!r}") from None


def _threads(arg: Optional[int]) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env and env.isdigit() else 1


# ---------------------------------------------------------------------------
# classes
# ---------------------------------------------------------------------------


def _report_job(args):
    n, variant = args
    return ccl.report(n, variant)


def _fmt(flag: Optional[bool]) -> str:
    return "-" if flag is None else ("1" if flag else "0")


def render_reports(reports: Sequence[ccl.ClassReport], output: str) -> str:
    if output == "json":
        return json.dumps([r.to_dict() for r in reports], sort_keys=True, separators=(",", ":"))
    rows = []
    for r in reports:
        for j in sorted(r.w):
            crit, orc = r.w_square[j]
            p = r.p.get(j)
            rows.append([r.variant, r.n, j, _fmt(r.w[j]), _fmt(crit), _fmt(orc), _fmt(p)])
    header = ["variant", "n", "k", "w_k", "w_k^2 criterion", "w_k^2 oracle", "p_k mod 2"]
    if output == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).rjust(w) for x, w in zip(header, widths))]
    lines += ["  ".join(str(x).rjust(w) for x, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def cmd_classes(cfg: RunConfig, out) -> int:
    cap = cfg.caps.ls_n if cfg.variant == "ls" else cfg.caps.cover_n
    if cfg.variant not in ("ls", "ls-cover"):
        raise Precondition(f"classes supports variants ls and ls-cover, not {cfg.variant}")
    too_big = [n for n in cfg.n_values if n > cap]
    if too_big:
        raise CapExceeded(f"n={too_big[0]} exceeds the cap {cap} for variant {cfg.variant}")
    jobs = [(n, cfg.variant) for n in cfg.n_values]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(_report_job, jobs))
    else:
        reports = [_report_job(j) for j in jobs]
    print(render_reports(reports, cfg.output), file=out)
    bad = [m for r in reports for m in r.mismatches()]
    for m in bad:
        print(f"MISMATCH {m}", file=sys.stderr)
    return MISMATCH if bad else OK


# ---------------------------------------------------------------------------
# cubulate / hyperbolize
# ---------------------------------------------------------------------------


def load_group(path: str) -> bb.DiagonalBieberbachGroup:
    """``{"n": n, "generators": [{"signs": [...], "translation": ["1/2", ...]}]}``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
        n = int(doc["n"])
        gens = tuple(
            bb.AffineIsometry(tuple(int(s) for s in g["signs"]), tuple(Fraction(str(t)) for t in g["translation"]))
            for g in doc["generators"]
        )
        return bb.DiagonalBieberbachGroup(n, gens, name=doc.get("name", os.path.basename(path)))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise Precondition(f"cannot read group from {path}: {exc}") from exc


def build_complex(variant: str, n: int, group_file: Optional[str], caps: Caps) -> cc.CubeComplex:
    if n > caps.cube_n:
        raise CapExceeded(f"n={n} exceeds the cubulation cap {caps.cube_n}")
    try:
        if group_file:
            G = load_group(group_file)
            if not G.is_even:
                G = bb.normalize_even(G)
            return bb.quotient_cube_complex(G)
        if variant == "torus":
            return bb.torus_complex(n)
        if variant == "hat-torus":
            return bb.hat_torus_complex(n)
        if variant == "ls":
            return bb.quotient_cube_complex(bb.normalize_even(bb.lee_szczarba_group(n)))
        if variant == "ls-cover":
            H, _ = bb.orientable_double_cover(bb.lee_szczarba_group(n))
            return bb.quotient_cube_complex(bb.normalize_even(H))
    except ValueError as exc:
        raise Precondition(str(exc)) from exc
    raise Precondition(f"unknown variant {variant!r}")


def summarize(C: cc.CubeComplex) -> dict:
    fold = cc.folding(C)
    return {
        "dim": C.dim,
        "cells": list(C.counts),
        "euler_characteristic": cc.euler_characteristic(C),
        "foldable": fold is not None,
        "npc": cc.is_npc(C),
        "flat": cc.is_flat(C),
        "orientable": C.flags.get("orientable"),
        "violations": len(cc.verify(C)),
    }


def _write(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _emit_summary(summary: dict, output: str, out) -> None:
    if output == "json":
        print(json.dumps(summary, sort_keys=True, separators=(",", ":")), file=out)
    else:
        for k in sorted(summary):
            print(f"{k}: {summary[k]}", file=out)


def cmd_cubulate(cfg: RunConfig, out, save: Optional[str] = None) -> int:
    n = cfg.n_values[0]
    C = build_complex(cfg.variant, n, cfg.group_file, cfg.caps)
    summary = summarize(C)
    _write(save, cc.to_json(C))
    _emit_summary(summary, cfg.output, out)
    return MISMATCH if summary["violations"] else OK


def _read_complex(path: str) -> cc.CubeComplex:
    try:
        with open(path) as fh:
            return cc.from_json(fh.read())
    except OSError as exc:
        raise Precondition(str(exc)) from exc


def cmd_hyperbolize(cfg: RunConfig, out, complex_file: Optional[str] = None, save: Optional[str] = None) -> int:
    if complex_file:
        C = _read_complex(complex_file)
        problems = cc.verify(C)
        if problems:
            print(f"FAIL {problems[0]}", file=sys.stderr)
            return MISMATCH
    else:
        C = build_complex(cfg.variant, cfg.n_values[0], cfg.group_file, cfg.caps)
    if C.dim > cfg.caps.cube_n:
        raise CapExceeded(f"dimension {C.dim} exceeds the hyperbolization cap {cfg.caps.cube_n}")
    try:
        H = hy.hyperbolize(C, hy.PieceModel(C.dim))
    except ValueError as exc:
        raise Precondition(str(exc)) from exc
    summary = {"dim": H.dim, "pieces": H.piece_count, "gluings": len(H.gluings), "boundary_facets": len(H.boundary)}
    if C.geometry is not None and C.geometry.group.is_even:
        chain = hy.covering_degree_chain(C)
        summary.update(
            {
                "d1": chain.d1,
                "d2": chain.d2,
                "source_degree": chain.source_degree,
                "injrad_bound": str(chain.bound),
            }
        )
    _write(save, hy.to_json_h(H))
    _emit_summary(summary, cfg.output, out)
    return OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _sweep_wk2(n_max: int) -> list[str]:
    bad = []
    for k in range(1, 10):
        for n in range(max(k, 2), n_max + 1):
            crit = ccl.w_square_criterion(n, k)
            orc = ccl.w_square_oracle(n, k)
            struct = bool(ccl.w_square_structural(n, k))
            if not crit == orc == struct:
                bad.append(f"w_{k}^2 at n={n}: criterion={crit} oracle={orc} structural={struct}")
    return bad


def _sweep_catalan(m_max: int = 6) -> list[str]:
    bad = []
    for m in range(1, m_max + 1):
        I = tuple(range(1, 2 * m, 2))
        size = ccl.class_size(I, 2 * m + 1)
        if size != ccl.catalan(m):
            bad.append(f"class of {I} has {size} elements, Catalan number is {ccl.catalan(m)}")
    for m in range(31):
        if (ccl.catalan(m) % 2 == 1) != ccl.catalan_is_odd(m):
            bad.append(f"parity of C_{m}")
    return bad


def _sweep_covers(n_max: int = 4) -> list[str]:
    bad = []
    for n in range(2, n_max + 1):
        C = bb.quotient_cube_complex(bb.normalize_even(bb.lee_szczarba_group(n)))
        cov = cc.cover(C, "orientation")
        if any(a != 2 * b for a, b in zip(cov.complex.counts, C.counts)):
            bad.append(f"orientation cover of LS_{n} does not double cell counts")
        T = bb.torus_complex(n)
        hat = cc.cover(T, 2)
        if hat.degree != 1 << n:
            bad.append(f"hat torus cover of T^{n} has degree {hat.degree}")
    return bad


SWEEPS = {
    "wk2": lambda a: _sweep_wk2(a.n_max),
    "catalan": lambda a: _sweep_catalan(),
    "covers": lambda a: _sweep_covers(),
}


def cmd_verify(args, out) -> int:
    status = OK
    if args.complex:
        try:
            C = _read_complex(args.complex)
        except ValueError as exc:
            print(f"complex  FAIL  {exc}", file=out)
            return MISMATCH
        problems = cc.verify(C)
        print(f"complex  {'FAIL' if problems else 'pass'}  {problems[0] if problems else ''}".rstrip(), file=out)
        if problems:
            return MISMATCH
    if args.n_max > 18:
        raise CapExceeded(f"--n-max {args.n_max} exceeds the sweep cap 18")
    if args.sweep is None:
        names = [] if args.complex else list(SWEEPS)
    else:
        names = list(SWEEPS) if args.sweep == "all" else [args.sweep]
    for name in names:
        bad = SWEEPS[name](args)
        print(f"{name:8} {'FAIL' if bad else 'pass'}  {len(bad)} mismatches", file=out)
        for b in bad:
            print(f"  witness: {b}", file=out)
        if bad:
            status = MISMATCH
    return status


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperflat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, variants):
        sp.add_argument("--n", type=parse_range, required=False, default=None, help="N or A-B")
        sp.add_argument("--variant", choices=variants, default=variants[0])
        sp.add_argument("--format", choices=["table", "json", "csv"], default="table")
        sp.add_argument("--json", action="store_true", help="shorthand for --format json")
        sp.add_argument("--threads", type=int, default=None, help=f"worker count (or ${THREADS_ENV})")

    sp = sub.add_parser("classes", help="characteristic class verdicts")
    common(sp, ["ls", "ls-cover"])
    sp.add_argument("--max-n", type=int, default=None, help="raise or lower the dimension cap")

    sp = sub.add_parser("cubulate", help="build a flat cube complex")
    common(sp, ["ls", "ls-cover", "torus", "hat-torus"])
    sp.add_argument("--group", help="JSON file with diagonal-type generators")
    sp.add_argument("--out", help="write the complex as JSON here")

    sp = sub.add_parser("hyperbolize", help="assemble pieces and gluings")
    common(sp, ["hat-torus", "ls", "ls-cover", "torus"])
    sp.add_argument("--group", help="JSON file with diagonal-type generators")
    sp.add_argument("--complex", help="read a cube complex JSON instead of building one")
    sp.add_argument("--out", help="write the hyperbolized complex as JSON here")

    sp = sub.add_parser("verify", help="run the invariant sweeps")
    sp.add_argument("--sweep", choices=["all", *SWEEPS], default=None, help="default: all, or none with --complex")
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--complex", help="also check a cube complex JSON file")
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        output = "json" if args.json else args.format
        if args.n is None and not (args.command == "hyperbolize" and args.complex):
            raise Precondition("--n is required")
        cfg = RunConfig(
            command=args.command,
            n_values=args.n or [],
            variant=args.variant,
            group_file=getattr(args, "group", None),
            output=output,
            threads=_threads(args.threads),
        )
        if args.command == "classes":
            if args.max_n is not None:
                cfg.caps.ls_n = cfg.caps.cover_n = args.max_n
            return cmd_classes(cfg, out)
        if len(cfg.n_values) > 1 and args.command != "classes":
            raise Precondition(f"{args.command} takes a single n")
        if args.command == "cubulate":
            return cmd_cubulate(cfg, out, save=args.out)
        return cmd_hyperbolize(cfg, out, complex_file=args.complex, save=args.out)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return CAP
    except Precondition as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return PRECONDITION
    except ValueError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
