"""Command-line harness: gen, run, opt, ratio, validate-tree, bench.

Exit codes: 0 ok, 1 internal or validation failure, 2 infeasible input,
3 parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bbd import build, dump_tree
from .generators import DEFAULT_POLYGON, KINDS, GenSpec, generate
from .harness import CSV_FIELDS, BoundViolation, format_row, ratio_row, run_online, solve_opt, validate_instance_trees
from .instance import ParseError, read_instance, read_polygon, write_instance, write_jsonl
from .online import InfeasibleObject

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_PARSE = 0, 1, 2, 3


def _cmd_gen(args) -> int:
    poly = read_polygon(args.polygon) if args.polygon else None
    if args.kind == "homothet-random" and poly is None:
        poly = DEFAULT_POLYGON
    spec = GenSpec(args.kind, args.seed, args.n, args.m, args.rho, poly)
    write_instance(generate(spec), args.output)
    return EXIT_OK


def _cmd_run(args) -> int:
    inst = read_instance(args.input)
    rep, records, _ = run_online(inst)
    if not args.no_opt:
        res = solve_opt(inst, args.time_limit)
        rep.opt_size = res.size if res.certified else "unproven"
        rep.ratio = rep.alg_size / res.size if res.certified else None
    if args.log:
        write_jsonl(records, args.log)
        rep.log = str(args.log)
    text = json.dumps(rep.to_dict(), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_opt(args) -> int:
    inst = read_instance(args.input)
    inst.check_feasible()
    res = solve_opt(inst, args.time_limit)
    print(res.status if not res.certified else f"OPTIMAL size={res.size}")
    print(json.dumps({"hitting_set": list(res.hitting_set), "certified": res.certified,
                      "lower_bound": res.lower_bound, "upper_bound": res.upper_bound, "nodes": res.nodes}))
    return EXIT_OK


def _cmd_ratio(args) -> int:
    inst = read_instance(args.input)
    row = ratio_row(inst, args.time_limit, args.timing)
    if args.header:
        print(",".join(CSV_FIELDS))
    print(format_row(row))
    return EXIT_OK


def _cmd_validate(args) -> int:
    inst = read_instance(args.input)
    ok = True
    for name, rep in validate_instance_trees(inst):
        print(f"# tree over {name}")
        for line in rep.lines():
            print(line)
        ok &= rep.ok
    if args.dump:
        Path(args.dump).write_text(dump_tree(build(inst.points)))
    return EXIT_OK if ok else EXIT_FAIL


def _suite_entries(path: Path):
    d = json.loads(path.read_text())
    if isinstance(d, dict):
        d = d.get("runs", [])
    if not isinstance(d, list):
        raise ParseError("suite must be a list of runs", field="runs")
    for i, e in enumerate(d):
        if not isinstance(e, dict):
            raise ParseError("run entry must be a record", field=f"runs[{i}]")
        yield i, e


def _cmd_bench(args) -> int:
    suite = Path(args.suite)
    rows = []
    for i, e in _suite_entries(suite):
        if "instance" in e:
            inst = read_instance(suite.parent / e["instance"])
        else:
            try:
                poly = read_polygon(suite.parent / e["polygon"]) if "polygon" in e else None
                if e["kind"] == "homothet-random" and poly is None:
                    poly = DEFAULT_POLYGON
                spec = GenSpec(e["kind"], int(e["seed"]), int(e["n"]), int(e["m"]), float(e.get("rho", 1.0)), poly)
            except KeyError as k:
                raise ParseError("missing field", field=f"runs[{i}].{k.args[0]}") from None
            inst = generate(spec)
        rows.append(format_row(ratio_row(inst, args.time_limit, args.timing)))
    out = "\n".join([",".join(CSV_FIELDS), *rows]) + "\n"
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onlinehit", description="Online hitting sets for rectangles and homothets.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--rho", type=float, default=1.0)
    g.add_argument("--polygon", type=Path)
    g.add_argument("-o", "--output", type=Path, required=True)
    g.set_defaults(func=_cmd_gen)

    r = sub.add_parser("run", help="run the online algorithm")
    r.add_argument("-i", "--input", type=Path, required=True)
    r.add_argument("-o", "--output", type=Path)
    r.add_argument("--log", type=Path, help="per-round JSON lines")
    r.add_argument("--no-opt", action="store_true", help="skip the exact optimum")
    r.add_argument("--time-limit", type=float)
    r.set_defaults(func=_cmd_run)

    o = sub.add_parser("opt", help="exact minimum hitting set")
    o.add_argument("-i", "--input", type=Path, required=True)
    o.add_argument("--time-limit", type=float)
    o.set_defaults(func=_cmd_opt)

    q = sub.add_parser("ratio", help="run + opt as one CSV row")
    q.add_argument("-i", "--input", type=Path, required=True)
    q.add_argument("--time-limit", type=float)
    q.add_argument("--timing", action="store_true", help="fill the ms column (makes rows non-reproducible)")
    q.add_argument("--header", action="store_true")
    q.set_defaults(func=_cmd_ratio)

    v = sub.add_parser("validate-tree", help="build and validate the BBD tree")
    v.add_argument("-i", "--input", type=Path, required=True)
    v.add_argument("--dump", type=Path, help="write the tree dump here")
    v.set_defaults(func=_cmd_validate)

    b = sub.add_parser("bench", help="ratio rows for a suite of runs")
    b.add_argument("--suite", type=Path, required=True)
    b.add_argument("-o", "--output", type=Path)
    b.add_argument("--time-limit", type=float)
    b.add_argument("--timing", action="store_true")
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleObject as e:
        print(f"infeasible input: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BoundViolation as e:
        print(f"bound violated: {e}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as e:  # noqa: BLE001
        log.debug("internal failure", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
