"""Command-line front end.

Exit status is 0 when every executed check passes, 1 when some check fails
and 2 for usage, cap or I/O errors.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import shelah as sh
from . import symmetric as sym
from .lattice import export
from .lattice.engine import verify_level
from .lattice.levels import DEFAULT_LEVEL_CAP, LevelCapExceeded, build_level, recount
from .perm import DEFAULT_CAP, DEFAULT_W, CapExceeded, Carrier, TruncationError
from .report import VERSION, VerificationReport
from .suites import CHECKS, run_constructions

MAX_SUITE_SIZE = 16
MAX_ATOMS = 12


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int
    fmt: str
    out: str | None
    timing: bool
    fmt_given: bool = False
    caps: dict = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)


# --- helpers -----------------------------------------------------------------


def _emit(text: str, out: str | None):
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {out}: {e.strerror}") from None


def _render(report: VerificationReport, cfg: RunConfig) -> str:
    if cfg.fmt == "dot":
        raise UsageError("--format dot only applies to lattice build/export")
    return report.to_json(cfg.timing) if cfg.fmt == "json" else report.to_text()


def _finish(report: VerificationReport, cfg: RunConfig) -> int:
    report.seed = cfg.seed
    report.caps = {**cfg.caps, **report.caps}
    report.millis = (time.perf_counter() - cfg.started) * 1000
    _emit(_render(report, cfg), cfg.out)
    return 0 if report.passed else 1


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(t) for t in text.split(",") if t.strip()] if text else []


# --- lattice -----------------------------------------------------------------


def cmd_lattice(args, cfg: RunConfig) -> int:
    n = args.n if args.n is not None else args.level
    if n is None:
        raise UsageError("lattice needs a level, e.g. `lattice verify 3`")
    cfg.caps["level_cap"] = args.cap
    if n < 0:
        raise UsageError("level must be non-negative")
    if n > args.cap:
        raise LevelCapExceeded(f"level {n} exceeds cap {args.cap}")
    level = build_level(n, args.cap)
    if args.action == "verify":
        report = verify_level(level)
        report.name = f"lattice_verify_{n}"
        expected = recount(n)[-1]
        report.add("element_count", level.n == expected,
                   witness={"elements": level.n, "covers": len(level.edges), "recount": expected, "sizes": level.sizes})
        return _finish(report, cfg)
    fmt = cfg.fmt if cfg.fmt_given else ("json" if args.action == "export" else "text")
    if fmt == "dot":
        text = export.to_dot(level)
    elif fmt == "json":
        text = export.to_json(level)
    else:
        text = export.to_text(level)
    _emit(text, cfg.out)
    return 0


# --- constructions -------------------------------------------------------------


def cmd_constructions(args, cfg: RunConfig) -> int:
    if args.size < 0 or args.size > MAX_SUITE_SIZE:
        raise CapExceeded("carrier size", args.size, MAX_SUITE_SIZE)
    if args.w < 4:
        raise UsageError("--w must be at least 4")
    if args.only is not None and args.only not in CHECKS:
        raise UsageError(f"unknown check {args.only!r}; choose from {', '.join(sorted(CHECKS))}")
    report = run_constructions(args.size, cfg.seed, args.only, args.w)
    return _finish(report, cfg)


# --- models ------------------------------------------------------------------


def fraenkel_transitivity(atoms: int, support: int, k: int) -> VerificationReport:
    """Every (B, p, q) with |B| <= support and |p| = |q| = k, each witness re-checked."""
    if atoms > MAX_ATOMS:
        raise CapExceeded("atoms", atoms, MAX_ATOMS)
    x = Carrier.of_size(atoms)
    r = VerificationReport("fraenkel_transitivity", caps={"atoms": atoms, "support": support, "k": k})
    cases = 0
    bad = []
    for s in range(support + 1):
        for b in itertools.combinations(x.elements, s):
            rest = [z for z in x if z not in b]
            subsets = [frozenset(c) for c in itertools.combinations(rest, k)]
            for p in subsets:
                for q in subsets:
                    pi = sym.transitivity_witness(x, b, p, q)
                    cases += 1
                    if any(pi(z) != z for z in b) or {pi(z) for z in p} != q:
                        bad.append({"B": list(b), "p": sorted(p), "q": sorted(q)})
    r.add("transitivity", not bad and cases > 0, witness={"cases": cases}, counterexample=bad[:5] or None)
    return r


def fraenkel_support(atoms: int, text: str) -> VerificationReport:
    x = Carrier.of_size(atoms)
    try:
        obj = sym.loads(text)
    except (ValueError, TypeError) as e:
        raise UsageError(f"bad set literal: {e}") from None
    group = sym.FullSymmetric(x)
    unknown = sym.atoms_of(obj) - set(x.elements)
    if unknown:
        raise UsageError(f"atoms {sorted(unknown, key=repr)} are outside 0..{atoms - 1}")
    b = sym.min_support(obj, group)
    r = VerificationReport("fraenkel_support", caps={"atoms": atoms})
    r.add("is_support", bool(sym.is_support(b, obj, group)), witness={"support": sorted(b)})
    smaller = [sorted(c) for c in itertools.combinations(sorted(b), len(b) - 1) if sym.is_support(c, obj, group)] if b else []
    r.add("minimal", not smaller, counterexample=smaller[:1] or None)
    return r


def mostowski(fix: list[Fraction], move: Fraction, forbid: Fraction | None) -> VerificationReport:
    try:
        f = sym.mostowski_witness(fix, move, forbid)
    except ValueError as e:
        raise UsageError(str(e)) from None
    r = VerificationReport("mostowski_witness")
    pl = {"points": [[str(a), str(b)] for a, b in f.points], "slopes": [str(s) for s in f.slopes()]}
    r.add("increasing", f.is_increasing(), witness=pl)
    r.add("fixes_support", all(f(v) == v for v in fix) and (forbid is None or f(forbid) == forbid))
    r.add("moves_point", f(move) != move, witness={"from": str(move), "to": str(f(move))})
    inv = f.inverse()
    probes = sorted({a for a, _ in f.points} | {move - 1, move + 1, *fix})
    r.add("inverse_round_trip", all(inv(f(v)) == v for v in probes))
    return r


def n23(blocks: int) -> VerificationReport:
    x = Carrier.of_size(3 * blocks)
    parts = [list(range(3 * i, 3 * i + 3)) for i in range(blocks)]
    proj = sym.n23_projection(x, parts)
    r = VerificationReport("n23_projection", caps={"blocks": blocks})
    r.add("surjective", proj.witness.verify(), witness={"blocks": blocks})
    sizes = sym.fiber_sizes(proj.witness)
    r.add("three_to_one", all(s == 3 for s in sizes), witness={"fiber_sizes": sizes})
    r.add("block_permutations_commute", proj.commuting, witness={"checked": proj.permutations_checked},
          counterexample=None if proj.counterexample is None else repr(proj.counterexample))
    return r


def _shelah_atoms(args) -> list:
    if args.fixture and args.atoms:
        raise UsageError("give either --fixture or --atoms")
    text = sh.FIXTURES.get(args.fixture) if args.fixture else args.atoms
    if text is None:
        raise UsageError(f"unknown fixture {args.fixture!r}; choose from {', '.join(sorted(sh.FIXTURES))}")
    try:
        return sh.parse_atoms(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def shelah_closure(atoms: list) -> VerificationReport:
    c = sh.closure(atoms)
    r = VerificationReport("shelah_closure")
    listing = [sh.to_sexpr(a) for a in sorted(c, key=lambda a: a.key)]
    r.add("closure", sh.is_closed(c) and set(atoms) <= c, witness={"size": len(c), "atoms": listing})
    r.add("idempotent", sh.closure(c) == c)
    return r


def shelah_swap(closed: list, a_text: str, b_text: str) -> VerificationReport:
    try:
        a, b = sh.from_sexpr(a_text), sh.from_sexpr(b_text)
    except ValueError as e:
        raise UsageError(str(e)) from None
    c = sh.closure(closed)
    try:
        w = sh.sibling_swap_witness(c, a, b)
    except ValueError as e:
        raise UsageError(str(e)) from None
    r = VerificationReport("shelah_swap")
    for clause, ok in w.check(b, c).items():
        r.add(clause, ok)
    r.add("swap", True, witness={"a": sh.to_sexpr(a), "image": sh.to_sexpr(w(a))})
    return r


def shelah_triple(atoms: list) -> VerificationReport:
    u = sh.SparsePerm.cycle(atoms)
    t = sh.triple_injection(u)
    r = VerificationReport("shelah_triple")
    levels_ok = all(isinstance(a, sh.Node) and a.perm == u for a in t)
    r.add("triple", len(t) == 3 and levels_ok, witness={"atoms": sorted(sh.to_sexpr(a) for a in t)})
    return r


def cmd_model(args, cfg: RunConfig) -> int:
    kind, op = args.kind, args.op
    if kind == "fraenkel" and op == "transitivity":
        cfg.caps.update(atoms=args.atoms)
        report = fraenkel_transitivity(args.atoms, args.support, args.k)
    elif kind == "fraenkel" and op == "support":
        if args.set is None:
            raise UsageError("fraenkel support needs --set")
        report = fraenkel_support(args.atoms, args.set)
    elif kind == "mostowski" and op == "witness":
        if args.move is None:
            raise UsageError("mostowski witness needs --move")
        forbid = None if args.forbid is None else _fraction(args.forbid)
        report = mostowski(_fraction_list(args.fix), _fraction(args.move), forbid)
    elif kind == "n23" and op == "projection":
        report = n23(args.blocks)
    elif kind == "shelah" and op == "closure":
        report = shelah_closure(_shelah_atoms(args))
    elif kind == "shelah" and op == "swap":
        if args.a is None or args.b is None:
            raise UsageError("shelah swap needs --a and --b")
        closed = _shelah_atoms(args) if (args.fixture or args.atoms) else []
        report = shelah_swap(closed, args.a, args.b)
    elif kind == "shelah" and op == "triple":
        report = shelah_triple(_shelah_atoms(args))
    else:
        raise UsageError(f"unknown operation {kind} {op}; see --help")
    return _finish(report, cfg)


MODEL_OPS = {
    "fraenkel": ("transitivity", "support"),
    "mostowski": ("witness",),
    "n23": ("projection",),
    "shelah": ("closure", "swap", "triple"),
}


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    common.add_argument("--format", choices=("json", "dot", "text"), default=None, help="output format")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--timing", action="store_true", help="record wall-clock millis in reports")

    parser = argparse.ArgumentParser(prog="cardbench", description="Finite-scale checks of explicit cardinal constructions.")
    parser.add_argument("--version", action="version", version=f"cardbench {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    lat = sub.add_parser("lattice", parents=[common], help="build, verify or export a lattice level")
    lat.add_argument("action", choices=("build", "verify", "export"))
    lat.add_argument("n", type=int, nargs="?", help="level")
    lat.add_argument("--level", type=int, help="level, if not given positionally")
    lat.add_argument("--cap", type=int, default=DEFAULT_LEVEL_CAP, help=f"largest level allowed (default {DEFAULT_LEVEL_CAP})")
    lat.set_defaults(func=cmd_lattice)

    con = sub.add_parser("constructions", parents=[common], help="run the construction oracles")
    con.add_argument("action", choices=("test",))
    con.add_argument("--size", type=int, default=4, help="carrier size (default 4)")
    con.add_argument("--only", metavar="NAME", help="run one check: " + ", ".join(sorted(CHECKS)))
    con.add_argument("--w", type=int, default=DEFAULT_W, help=f"truncation bound for omega (default {DEFAULT_W})")
    con.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap")
    con.set_defaults(func=cmd_constructions)

    mod = sub.add_parser("model", parents=[common], help="symmetric-model kernels")
    mod.add_argument("kind", choices=sorted(MODEL_OPS))
    mod.add_argument("op", help="; ".join(f"{k}: {', '.join(v)}" for k, v in sorted(MODEL_OPS.items())))
    mod.add_argument("--atoms", help="fraenkel: atom count (default 8); shelah: atoms as S-expressions")
    mod.add_argument("--support", type=int, default=3, help="largest fixed set B (default 3)")
    mod.add_argument("--k", type=int, default=2, help="size of the moved sets (default 2)")
    mod.add_argument("--set", help="a hereditarily finite set as JSON")
    mod.add_argument("--fix", default="", help="comma-separated rationals to keep fixed")
    mod.add_argument("--move", help="rational to move")
    mod.add_argument("--forbid", help="extra rational to keep fixed")
    mod.add_argument("--blocks", type=int, default=2, help="number of 3-element blocks (default 2)")
    mod.add_argument("--fixture", help="named atom list: " + ", ".join(sorted(sh.FIXTURES)))
    mod.add_argument("--a", help="atom to move")
    mod.add_argument("--b", help="atom to keep")
    mod.set_defaults(func=cmd_model)
    return parser


def _model_atoms(args):
    """``--atoms`` is a count for fraenkel and an atom list for shelah."""
    if args.kind != "fraenkel":
        return
    if args.atoms is None:
        args.atoms = 8
        return
    try:
        args.atoms = int(args.atoms)
    except ValueError:
        raise UsageError("--atoms must be an integer for fraenkel") from None
    if args.atoms > MAX_ATOMS or args.atoms < 0:
        raise CapExceeded("atoms", args.atoms, MAX_ATOMS)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    cfg = RunConfig(args.command, params, args.seed, args.format or "text", args.out, args.timing, args.format is not None)
    try:
        if args.command == "model":
            _model_atoms(args)
            if args.op not in MODEL_OPS[args.kind]:
                raise UsageError(f"{args.kind} supports: {', '.join(MODEL_OPS[args.kind])}")
        return args.func(args, cfg)
    except (UsageError, CapExceeded, LevelCapExceeded, TruncationError) as e:
        print(f"cardbench: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
