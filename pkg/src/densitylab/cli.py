"""Command-line front end.

Every subcommand accepts ``--format {json,csv,text}``, ``--output PATH``,
``--config FILE`` (a JSON object whose keys mirror the long flag names, with
dashes or underscores), ``--seed`` and ``--budget``. Flags given on the
command line override config values. Errors are written to stderr as one JSON
object; exit codes are 2 for bad input, 3 for intractable requests, 4 for
inconclusive oracles and 70 for internal failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .core import (
    check_preserves_density,
    max_cell_mass,
    measurability_report,
    metric_rho,
    outer_density,
    riemann_integral,
    verify_refinement,
    verify_separation,
)
from .divisor import (
    DivisorCosetSystem,
    coset_count,
    divisor_count,
    semigroup_riemann_integral,
)
from .errors import DensityLabError, InvalidParameters
from .exact import as_fraction
from .maps import parse_map
from .radix import SequenceSpec, multidim_point
from .report import SCHEMA, Table, emit_table, to_table
from .sets import PREDICATES, Full
from .syntax import format_point, parse_atom, parse_point, parse_set, set_from_json
from .systems import FreeGroupCoset, JordanRational, ProductGroups, parse_system
from .udtest import (
    bud_report,
    default_drivers,
    parse_driver,
    star_discrepancy,
    weyl_sum,
)


class CliParseError(InvalidParameters):
    code = "parse-error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliParseError(message)


# defaults applied after config merging, so "None" means "not given"
DEFAULTS = {
    "format": "json",
    "system": "buck",
    "mode": "auto",
    "truncation": 20,
    "kind": "vdc",
    "base": 2,
    "count": 10,
    "start": 1,
    "n": None,
    "harmonics": "1",
    "sequence": "identity",
    "tolerance": "1/100",
    "counted": "divisor",
    "function": "identity",
    "representatives": "first",
    "map": "identity",
    "what": "refinement",
    "depth": 5,
}


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output and control")
    g.add_argument("--format", choices=("json", "csv", "text"), help="output format (default json)")
    g.add_argument("--output", help="write to this file instead of standard output")
    g.add_argument("--config", help="JSON file whose keys mirror these flags")
    g.add_argument("--seed", type=int, help="seed for sampled modes")
    g.add_argument("--budget", type=int, help="enumeration cap (default DENSITYLAB_BUDGET or 10^6)")


def _level_args(p):
    p.add_argument("--level", type=int, help="raw level of the system")
    p.add_argument("--chain-index", type=int, help="index k into the refinement chain")


def _sequence_args(p):
    p.add_argument("--kind", choices=("vdc", "cantor", "mixed", "multi"), help="sequence family (default vdc)")
    p.add_argument("--base", type=int, help="base for vdc (default 2)")
    p.add_argument("--bases", help="comma-separated bases, one per coordinate (multi)")
    p.add_argument("--moduli", help="comma-separated Cantor moduli 1,Q2,Q3,... (mixed)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="densitylab", description="Densities from decomposition systems, radical inverses and u.d. tests.")
    parser.add_argument("--version", action="version", version=f"densitylab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("density", help="level value of the outer density of a set")
    p.add_argument("--system", help="system descriptor (default buck)")
    p.add_argument("--set", dest="set", help="set expression")
    _level_args(p)
    p.add_argument("--mode", choices=("auto", "closed", "exhaustive", "sampled"))
    p.add_argument("--samples", type=int, help="number of sampled cells (sampled mode)")
    _common(p)

    p = sub.add_parser("measurable", help="outer densities of a set and its complement, and the defect")
    p.add_argument("--system")
    p.add_argument("--set", dest="set")
    _level_args(p)
    p.add_argument("--mode", choices=("auto", "closed", "exhaustive"))
    _common(p)

    p = sub.add_parser("metric", help="truncated cell metric between two points")
    p.add_argument("--system")
    p.add_argument("--x", required=False)
    p.add_argument("--y", required=False)
    p.add_argument("--truncation", type=int, help="number of chain levels summed (default 20)")
    _common(p)

    p = sub.add_parser("seq", help="points of a radical-inverse sequence")
    _sequence_args(p)
    p.add_argument("--count", type=int, help="number of points (default 10)")
    p.add_argument("--start", type=int, help="first index (default 1)")
    _common(p)

    p = sub.add_parser("discrepancy", help="exact star discrepancy of sequence prefixes")
    _sequence_args(p)
    p.add_argument("--n", help="comma-separated prefix lengths")
    _common(p)

    p = sub.add_parser("weyl", help="Weyl sum magnitudes of a sequence prefix")
    _sequence_args(p)
    p.add_argument("--n", type=int, help="prefix length")
    p.add_argument("--harmonics", help="comma-separated nonzero h (default 1)")
    _common(p)

    p = sub.add_parser("bud", help="necessary-condition test for Buck uniform distribution")
    p.add_argument("--system")
    p.add_argument("--set", dest="set", action="append", help="set expression (repeatable)")
    p.add_argument("--sequence", help="identity, affine:A,B, vdc:P, cantor or mixed:Q1,Q2,...")
    p.add_argument("--driver", action="append", help="identity, affine:A,B, shift:B or shuffle:SEED[,BLOCK] (repeatable)")
    p.add_argument("--n", type=int, help="number of terms")
    _level_args(p)
    p.add_argument("--tolerance", help="largest deviation still reported as consistent (default 1/100)")
    _common(p)

    p = sub.add_parser("divisor", help="divisor or coset counts on the free semigroup")
    p.add_argument("--predicate", help=f"one of {', '.join(sorted(PREDICATES))}, or full")
    p.add_argument("--param", help="predicate parameters, comma-separated")
    p.add_argument("--set", dest="set", help="set expression instead of --predicate")
    p.add_argument("--n", type=int, help="level n")
    p.add_argument("--chain-index", type=int, help="chain index k, n = k! (coset counts)")
    p.add_argument("--counted", choices=("divisor", "coset"), help="what to count (default divisor)")
    p.add_argument("--mode", choices=("auto", "closed", "exhaustive", "sampled"))
    p.add_argument("--samples", type=int)
    _common(p)

    p = sub.add_parser("integrate", help="Riemann sum over the cells of a level")
    p.add_argument("--system")
    p.add_argument("--function", help="identity, square, or indicator (with --set)")
    p.add_argument("--set", dest="set")
    _level_args(p)
    p.add_argument("--representatives", help="first (default) or a set expression (divisor system)")
    _common(p)

    p = sub.add_parser("preserve", help="check that a bijection preserves the measure density")
    p.add_argument("--map", help="identity, vdc:P, cantor, vdc-inverse:P, inversion, translate:A, permute:i-j,...")
    p.add_argument("--source", help="source system descriptor")
    p.add_argument("--target", help="target system descriptor")
    p.add_argument("--level", type=int)
    p.add_argument("--target-level", type=int)
    _common(p)

    p = sub.add_parser("check", help="structural checks: refinement, separation, max-mass")
    p.add_argument("--what", choices=("refinement", "separation", "max-mass"))
    p.add_argument("--system")
    p.add_argument("--from", dest="from_index", type=int, help="first chain index (refinement)")
    p.add_argument("--to", dest="to_index", type=int, help="last chain index (refinement)")
    p.add_argument("--points", help="semicolon-separated witness points (separation)")
    p.add_argument("--depth", type=int, help="chain depth (separation, default 5)")
    p.add_argument("--level", type=int, help="level (max-mass)")
    _common(p)
    return parser


# -- helpers -------------------------------------------------------------------------


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise InvalidParameters(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliParseError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise CliParseError("config must be a JSON object")
        for key, value in cfg.items():
            dest = key.replace("-", "_")
            if dest in ("from", "to"):
                dest += "_index"
            if dest == "command":
                continue
            if not hasattr(args, dest):
                raise CliParseError(f"config key {key!r} is not a flag of {args.command}")
            if getattr(args, dest) is None:
                setattr(args, dest, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise CliParseError(f"--{name.replace('_', '-')} is required for {args.command}")


def _set_arg(value):
    if isinstance(value, dict):
        return set_from_json(value)
    return parse_set(str(value))


def _point_kind(system) -> str:
    if isinstance(system, (JordanRational, FreeGroupCoset)):
        return "rational"
    if isinstance(system, ProductGroups):
        return "tuple"
    if isinstance(system, DivisorCosetSystem):
        return "element"
    return "natural"


def _sequence(args) -> SequenceSpec | list[SequenceSpec]:
    if args.kind == "vdc":
        return SequenceSpec.vdc(int(args.base))
    if args.kind == "cantor":
        return SequenceSpec.cantor()
    if args.kind == "mixed":
        _require(args, "moduli")
        return SequenceSpec.mixed([int(v) for v in str(args.moduli).split(",")])
    _require(args, "bases")
    return [SequenceSpec.vdc(int(b)) for b in str(args.bases).split(",")]


def _x_sequence(text: str):
    name, _, arg = text.partition(":")
    if name == "identity":
        return lambda n: n
    if name == "affine":
        a, b = (int(v) for v in arg.split(","))
        return lambda n: a * n + b
    if name == "vdc":
        spec = SequenceSpec.vdc(int(arg or 2))
    elif name == "cantor":
        spec = SequenceSpec.cantor()
    elif name == "mixed":
        spec = SequenceSpec.mixed([int(v) for v in arg.split(",")])
    else:
        raise InvalidParameters(f"unknown sequence {text!r}")
    return spec.point


def _int_list(value) -> list[int]:
    if isinstance(value, list):
        return [int(v) for v in value]
    try:
        return [int(v) for v in str(value).split(",") if v.strip()]
    except ValueError as exc:
        raise CliParseError(f"expected comma-separated integers, got {value!r}") from exc


# -- subcommands ---------------------------------------------------------------------


def cmd_density(args):
    _require(args, "set")
    system = parse_system(args.system)
    return outer_density(
        system,
        _set_arg(args.set),
        args.level,
        chain_index=args.chain_index,
        mode=args.mode,
        budget=args.budget,
        samples=args.samples,
        seed=args.seed,
    )


def cmd_measurable(args):
    _require(args, "set")
    system = parse_system(args.system)
    return measurability_report(
        system, _set_arg(args.set), args.level, chain_index=args.chain_index, mode=args.mode, budget=args.budget
    )


def cmd_metric(args):
    _require(args, "x", "y")
    system = parse_system(args.system)
    kind = _point_kind(system)
    x, y = parse_point(str(args.x), kind), parse_point(str(args.y), kind)
    rho = metric_rho(system, x, y, args.truncation)
    fields = {
        "x": format_point(x),
        "y": format_point(y),
        "truncation": args.truncation,
        "rho": rho,
        "rho_float": float(rho),
        "tail_bound": Fraction(1, 2**args.truncation),
    }
    return Table("metric", list(fields), [list(fields.values())], single=True)


def cmd_seq(args):
    spec = _sequence(args)
    rows = []
    if isinstance(spec, list):
        cols = ["index"] + [f"x{i}" for i in range(1, len(spec) + 1)] + [f"x{i}_float" for i in range(1, len(spec) + 1)]
        for n in range(args.start, args.start + args.count):
            pt = multidim_point(spec, n)
            rows.append([n, *pt, *(float(v) for v in pt)])
        return Table("sequence", cols, rows, {"sequence": ";".join(s.describe() for s in spec)})
    for n in range(args.start, args.start + args.count):
        v = spec.point(n)
        rows.append([n, v, float(v)])
    return Table("sequence", ["index", "value", "value_float"], rows, {"sequence": spec.describe()})


def cmd_discrepancy(args):
    _require(args, "n")
    spec = _sequence(args)
    if isinstance(spec, list):
        raise CliParseError("discrepancy is one-dimensional; use vdc, cantor or mixed")
    ns = _int_list(args.n)
    if not ns or min(ns) < 1:
        raise CliParseError("prefix lengths must be positive")
    pts = spec.points(max(ns))
    rows = []
    for n in ns:
        d = star_discrepancy(pts[:n])
        rows.append([n, d, float(d)])
    return Table("star-discrepancy", ["n", "statistic", "statistic_float"], rows, {"sequence": spec.describe()})


def cmd_weyl(args):
    _require(args, "n")
    spec = _sequence(args)
    if isinstance(spec, list):
        raise CliParseError("weyl is one-dimensional; use vdc, cantor or mixed")
    pts = spec.points(args.n)
    rows = [[h, args.n, weyl_sum(pts, h)] for h in _int_list(args.harmonics)]
    return Table("weyl", ["h", "n", "magnitude"], rows, {"sequence": spec.describe()})


def cmd_bud(args):
    _require(args, "set", "n")
    if args.level is None and args.chain_index is None:
        raise CliParseError("--level or --chain-index is required for bud")
    system = parse_system(args.system)
    level = args.level if args.level is not None else system.chain(args.chain_index)
    raw_sets = args.set if isinstance(args.set, list) else [args.set]
    sets = [_set_arg(s) for s in raw_sets]
    labels = [s if isinstance(s, str) else json.dumps(s, sort_keys=True) for s in raw_sets]
    drivers = [parse_driver(d) for d in args.driver] if args.driver else default_drivers()
    return bud_report(
        system,
        sets,
        _x_sequence(args.sequence),
        drivers,
        args.n,
        level,
        tolerance=as_fraction(str(args.tolerance)),
        labels=labels,
    )


def cmd_divisor(args):
    if args.set is not None:
        spec = _set_arg(args.set)
    elif args.predicate is not None:
        atom = str(args.predicate) + (f":{args.param}" if args.param is not None else "")
        spec = Full() if args.predicate == "full" else parse_atom(atom)
    else:
        raise CliParseError("give --predicate or --set")
    if (args.n is None) == (args.chain_index is None):
        raise CliParseError("give exactly one of --n and --chain-index")
    n = args.n
    if args.chain_index is not None:
        n = DivisorCosetSystem().chain(args.chain_index)
    if args.counted == "coset":
        if args.mode == "sampled":
            raise CliParseError("coset counts have no sampled mode")
        return coset_count(spec, n, mode=args.mode, budget=args.budget)
    return divisor_count(spec, n, mode=args.mode, budget=args.budget, samples=args.samples, seed=args.seed)


_FUNCTIONS = {
    "identity": lambda x: x,
    "square": lambda x: x * x,
}


def cmd_integrate(args):
    system = parse_system(args.system)
    if args.function == "indicator":
        _require(args, "set")
        f = _set_arg(args.set)
    elif args.function in _FUNCTIONS:
        f = _FUNCTIONS[args.function]
    else:
        raise CliParseError(f"unknown function {args.function!r}")
    if isinstance(system, DivisorCosetSystem):
        n = args.level if args.level is not None else system.chain(args.chain_index or 1)
        reps = "minimal" if args.representatives == "first" else _set_arg(args.representatives)
        if not callable(getattr(f, "contains", None)) and args.function != "indicator":
            raise CliParseError("the divisor system integrates indicators only")
        value = semigroup_riemann_integral(f, n, representatives=reps, budget=args.budget)
        fields = {"value": value, "value_float": float(value), "level": n}
        return Table("riemann-sum", list(fields), [list(fields.values())], single=True)
    if args.representatives != "first":
        raise CliParseError("only first-element representatives are available from the command line")
    monotone = isinstance(system, JordanRational) and args.function in _FUNCTIONS
    return riemann_integral(
        system, f, args.level, chain_index=args.chain_index, monotone=monotone, budget=args.budget
    )


def cmd_preserve(args):
    _require(args, "source", "level")
    source = parse_system(args.source)
    target = parse_system(args.target) if args.target else source
    return check_preserves_density(
        parse_map(args.map), source, target, args.level, target_level=args.target_level, budget=args.budget
    )


def cmd_check(args):
    system = parse_system(args.system)
    if args.what == "refinement":
        _require(args, "from_index", "to_index")
        return verify_refinement(system, range(args.from_index, args.to_index + 1), budget=args.budget)
    if args.what == "separation":
        _require(args, "points")
        kind = _point_kind(system)
        raw = args.points if isinstance(args.points, list) else str(args.points).split(";")
        pts = [parse_point(str(p), kind) for p in raw]
        return verify_separation(system, pts, args.depth)
    _require(args, "level")
    m = max_cell_mass(system, args.level, budget=args.budget)
    fields = {"level": args.level, "max_mass": m, "max_mass_float": float(m)}
    return Table("max-cell-mass", list(fields), [list(fields.values())], single=True)


COMMANDS = {
    "density": cmd_density,
    "measurable": cmd_measurable,
    "metric": cmd_metric,
    "seq": cmd_seq,
    "discrepancy": cmd_discrepancy,
    "weyl": cmd_weyl,
    "bud": cmd_bud,
    "divisor": cmd_divisor,
    "integrate": cmd_integrate,
    "preserve": cmd_preserve,
    "check": cmd_check,
}


def _emit_error(exc: Exception, code: str, exit_code: int) -> int:
    obj = {"schema": SCHEMA, "error": code, "message": str(exc), "exit_code": exit_code}
    sys.stderr.write(json.dumps(obj, ensure_ascii=False) + "\n")
    return exit_code


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        args = _merge_config(args)
        if args.budget is not None and args.budget < 1:
            raise CliParseError("--budget must be positive")
        result = COMMANDS[args.command](args)
        text = emit_table(to_table(result), args.format)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        return 0
    except DensityLabError as exc:
        return _emit_error(exc, exc.code, exc.exit_code)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        return _emit_error(exc, "invalid-parameters", 2)
    except RecursionError as exc:  # pragma: no cover - defensive
        return _emit_error(exc, "internal", 70)


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


__all__ = ["build_parser", "run", "main"]
