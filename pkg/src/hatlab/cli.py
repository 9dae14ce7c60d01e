"""Command-line interface: ``hatlab <subcommand> ...``.

Exit status 0 means success or a valid object, 1 a failed validation,
2 a usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import datasets
from .designs import (
    format_od,
    parse_latin_text,
    parse_od_text,
    parse_steiner_text,
    set_to_od,
    steiner_to_set,
    validate_latin,
    validate_od,
    validate_steiner,
)
from .errors import HatlabError
from .hatspace import (
    AssignmentSet,
    SpaceParams,
    check_independent,
    enumerate_space,
    format_set,
    parse_assignment_line,
    parse_set_text,
    perfect_size,
    space_size,
)
from .perm import group_from_cycles, orbit_expand
from .search import EXACT, GREEDY, SearchConfig, export_ilp, max_independent_set
from .simulate import GREEDY_FALLBACK, STRICT, evaluate, monte_carlo, play
from .strategies import (
    best_residues,
    best_sigma,
    default_B,
    generate,
    parse_strategy,
    teirlinck_criterion,
)
from .table import table1

PARALLEL_MIN_SPACE = 50_000


class UsageError(Exception):
    pass


def default_threads() -> int:
    env = os.environ.get("HATLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"HATLAB_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _workers(args, p: SpaceParams) -> int:
    threads = args.threads if args.threads is not None else default_threads()
    return threads if space_size(p) >= PARALLEL_MIN_SPACE else 1


def _emit(args, payload: dict, text: str, csv_row: str | None = None):
    if args.format == "json":
        print(json.dumps(payload, default=str))
    elif args.format == "csv" and csv_row is not None:
        print(csv_row, end="")
    else:
        print(text)


def _read_source(source: str) -> tuple[str, str]:
    """Return (label, text) for a path or an embedded dataset id."""
    path = Path(source)
    if path.is_file():
        return path.name, path.read_text(encoding="utf-8")
    try:
        return datasets.resolve(source).id, datasets.raw_text(source)
    except KeyError as exc:
        raise UsageError(f"{source!r} is neither a file nor a dataset ({exc.args[0]})") from None


def _load_set(source: str) -> AssignmentSet:
    path = Path(source)
    if path.is_file():
        return parse_set_text(path.read_text(encoding="utf-8"), provenance=path.name)
    try:
        return datasets.dataset_set(source)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_generators(text: str, degree: int):
    parts = [t for t in text.split(";") if t.strip()]
    return group_from_cycles(parts, degree)


# -- subcommands -------------------------------------------------------------

def cmd_enumerate(args):
    p = SpaceParams(args.n, args.k)
    items = []
    for i, a in enumerate(enumerate_space(p)):
        if args.limit is not None and i >= args.limit:
            break
        items.append(a)
    if args.format == "json":
        print(json.dumps({"n": p.n, "k": p.k, "space": space_size(p), "assignments": items}))
    else:
        for a in items:
            print(" ".join(map(str, a)))
    return 0


def cmd_verify_set(args):
    s = _load_set(args.source)
    p = s.params
    bad = check_independent(s)
    payload = {
        "source": s.provenance or args.source, "n": p.n, "k": p.k, "size": len(s),
        "independent": bad is None,
        "violation": None if bad is None else [list(bad.a), list(bad.b)],
        "perfect": bad is None and len(s) == perfect_size(p),
        "perfect_size": perfect_size(p),
        "probability": str(Fraction(len(s), space_size(p))) if bad is None else None,
    }
    if bad is None:
        text = (f"{payload['source']}: independent, size {len(s)}, probability "
                f"{payload['probability']}" + (" (perfect)" if payload["perfect"] else ""))
    else:
        text = f"{payload['source']}: NOT independent: {bad.a} ~ {bad.b}"
    _emit(args, payload, text)
    return 0 if bad is None else 1


def cmd_strategy(args):
    spec = parse_strategy(args.spec, n=args.n, k=args.k)
    workers = _workers(args, spec.space)
    if args.evaluate:
        report = evaluate(spec, mode=args.mode, workers=workers)
        lines = [f"{report.spec} n={report.n} k={report.k} mode={report.mode}",
                 f"members {report.member_count} of {report.space}",
                 f"wins {report.win_count}, probability {report.probability} "
                 f"(ceiling {report.ceiling})"]
        lines += [f"  {name}: {'ok' if ok else 'FAIL'}" for name, ok in report.bound_checks]
        _emit(args, report.to_dict(), "\n".join(lines), report.csv_row(header=True))
        return 0 if all(ok for _, ok in report.bound_checks) else 1
    s = generate(spec, workers=workers)
    if args.emit:
        text = format_set(s)
        if args.emit == "-":
            sys.stdout.write(text)
        else:
            Path(args.emit).write_text(text, encoding="utf-8")
    if args.emit != "-":
        bad = check_independent(s)
        payload = {"spec": spec.label, "n": spec.space.n, "k": spec.space.k,
                   "members": len(s), "space": space_size(spec.space),
                   "independent": bad is None}
        _emit(args, payload, f"{spec.label} {spec.space}: {len(s)} members, "
                             f"{'independent' if bad is None else 'NOT independent'}")
    return 0


def cmd_simulate(args):
    spec = parse_strategy(args.spec, n=args.n, k=args.k)
    p = spec.space
    if args.monte_carlo:
        est = monte_carlo(spec, args.monte_carlo, args.seed, mode=args.mode,
                          workers=_workers(args, p))
        payload = {"spec": spec.label, "samples": est.samples, "wins": est.wins,
                   "estimate": est.estimate, "low": est.low, "high": est.high}
        _emit(args, payload, f"{spec.label}: {est.estimate:.5f} "
                             f"[{est.low:.5f}, {est.high:.5f}] from {est.samples} samples")
        return 0
    if not args.assignment:
        raise UsageError("simulate needs --assignment or --monte-carlo")
    s = generate(spec)
    out = []
    for text in args.assignment:
        a = parse_assignment_line(text.replace(",", " "), p)
        out.append(play(a, s, mode=args.mode))
    if args.format == "json":
        print(json.dumps([{"assignment": t.assignment, "guesses": t.guesses, "win": t.win,
                           "mode": t.mode} for t in out]))
    else:
        for t in out:
            print(t.format() if args.trace else f"{' '.join(map(str, t.assignment))}: "
                                                 f"{'WIN' if t.win else 'LOSS'}")
    return 0


def cmd_search(args):
    p = SpaceParams(args.n, args.k)
    group = _parse_generators(args.symmetry, p.n) if args.symmetry else None
    if args.export_ilp:
        info = export_ilp(p, args.export_ilp, symmetry_group=group)
        info.pop("orbits", None)
        _emit(args, info, f"wrote {info['path']}: {info['variables']} variables, "
                          f"{info['constraints']} constraints")
        return 0
    seed = _load_set(args.seed_set) if args.seed_set else None
    cfg = SearchConfig(mode=GREEDY if args.greedy else EXACT, time_limit=args.time_limit,
                       symmetry_group=group, seed_set=seed, ceiling=args.ceiling)
    res = max_independent_set(p, cfg)
    payload = {"n": p.n, "k": p.k, "size": res.size, "optimal": res.optimal,
               "upper_bound": res.upper_bound, "nodes": res.nodes_explored,
               "wall_time": round(res.wall_time, 3), "timed_out": res.timed_out}
    _emit(args, payload, f"{p}: independent set of size {res.size} "
                         f"({'optimal' if res.optimal else 'not proven optimal'}; "
                         f"bound {res.upper_bound}; {res.nodes_explored} nodes, "
                         f"{res.wall_time:.2f}s)")
    if args.out:
        Path(args.out).write_text(format_set(res.best_set), encoding="utf-8")
    return 0


def cmd_orbit(args):
    seeds = _load_seeds(args.seeds)
    degree = args.degree or seeds.params.n
    group = _parse_generators(args.generators, degree)
    out = orbit_expand(seeds, group)
    bad = check_independent(out)
    if args.out:
        Path(args.out).write_text(format_set(out), encoding="utf-8")
    payload = {"seeds": len(seeds), "group_order": group.order, "size": len(out),
               "independent": bad is None, "perfect": bad is None and len(out) == perfect_size(out.params)}
    _emit(args, payload, f"{len(seeds)} seeds x group of order {group.order} -> "
                         f"{len(out)} assignments, "
                         f"{'independent' if bad is None else 'NOT independent'}"
                         + (", perfect" if payload["perfect"] else ""))
    return 0 if bad is None else 1


def _load_seeds(source: str) -> AssignmentSet:
    # seed datasets are used as listed, not orbit-expanded
    if not Path(source).is_file():
        try:
            if datasets.resolve(source).kind == "seeds":
                return datasets.load_dataset(source)
        except KeyError:
            pass
    return _load_set(source)


def _report_validation(args, kind: str, label: str, violation, extra: dict):
    payload = {"kind": kind, "source": label, "valid": violation is None, **extra,
               "violation": None if violation is None else
               {"kind": violation.kind, "detail": violation.detail}}
    text = f"{label}: valid {kind}" if violation is None else f"{label}: INVALID {violation}"
    if extra:
        text += " (" + ", ".join(f"{k}={v}" for k, v in extra.items()) + ")"
    _emit(args, payload, text)
    return 0 if violation is None else 1


def cmd_validate_od(args):
    label, text = _read_source(args.source)
    d = parse_od_text(text, t=args.t, v=args.v)
    return _report_validation(args, f"OD_1({d.t},{d.n},{d.v})", label, validate_od(d),
                              {"columns": len(d.columns)})


def cmd_validate_steiner(args):
    label, text = _read_source(args.source)
    sys_ = parse_steiner_text(text, m=args.m)
    return _report_validation(args, f"S({sys_.t},{sys_.n},{sys_.m})", label,
                              validate_steiner(sys_), {"blocks": len(sys_.blocks)})


def cmd_validate_latin(args):
    label, text = _read_source(args.source)
    sq = parse_latin_text(text)
    return _report_validation(args, f"Latin square of order {sq.order}", label,
                              validate_latin(sq), sq.flags())


def cmd_expand_steiner(args):
    label, text = _read_source(args.source)
    s = steiner_to_set(parse_steiner_text(text, m=args.m))
    bad = check_independent(s)
    if args.out:
        Path(args.out).write_text(format_set(s), encoding="utf-8")
    perfect = bad is None and len(s) == perfect_size(s.params)
    payload = {"source": label, "n": s.params.n, "k": s.params.k, "size": len(s),
               "independent": bad is None, "perfect": perfect}
    _emit(args, payload, f"{label}: {len(s)} assignments for {s.params}, "
                         f"{'perfect' if perfect else 'not perfect'}")
    return 0 if perfect else 1


def cmd_to_od(args):
    s = _load_set(args.source)
    d = set_to_od(s)
    bad = validate_od(d)
    if args.out:
        Path(args.out).write_text(format_od(d), encoding="utf-8")
    return _report_validation(args, f"OD_1({d.t},{d.n},{d.v})", s.provenance or args.source,
                              bad, {"columns": len(d.columns)})


def cmd_teirlinck(args):
    ok = teirlinck_criterion(args.n, args.k)
    _emit(args, {"n": args.n, "k": args.k, "criterion": ok},
          f"n={args.n} k={args.k}: {'perfect strategy exists' if ok else 'criterion not met'}")
    return 0


def cmd_best_residues(args):
    rs, rp, count = best_residues(args.n, args.k, args.B)
    B = args.B or default_B(args.k)
    _emit(args, {"n": args.n, "k": args.k, "B": B, "r_sum": rs, "r_pos": rp, "count": count},
          f"n={args.n} k={args.k} B={B}: r_sum={rs} r_pos={rp} -> {count} members")
    return 0


def cmd_best_sigma(args):
    sigma, count = best_sigma(args.n, args.k, args.t)
    _emit(args, {"n": args.n, "k": args.k, "t": args.t, "sigma": sigma, "count": count},
          f"n={args.n} k={args.k} t={args.t}: sigma={sigma} -> {count} members")
    return 0


def cmd_table1(args):
    cells = table1(args.max_n, args.max_k)
    if args.format == "json":
        print(json.dumps([c.__dict__ for c in cells]))
    else:
        for c in cells:
            print(c.line())
    return 1 if any(c.status == "FAIL" for c in cells) else 0


def cmd_datasets(args):
    rows = [{"id": d.id, "kind": d.kind, "description": d.description}
            for d in datasets.DATASETS.values()]
    if args.format == "json":
        print(json.dumps({"datasets": rows, "aliases": datasets.ALIASES}))
    else:
        for r in rows:
            print(f"{r['id']:<15} {r['kind']:<10} {r['description']}")
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: $HATLAB_THREADS or all cores)")

    parser = argparse.ArgumentParser(prog="hatlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def nk(sp, k_required=True):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, required=k_required)

    sp = add("enumerate", cmd_enumerate, "list every assignment of a space")
    nk(sp)
    sp.add_argument("--limit", type=int)

    sp = add("verify-set", cmd_verify_set, "check a set file or dataset for independence")
    sp.add_argument("source")

    sp = add("strategy", cmd_strategy, "materialize or evaluate a named strategy")
    sp.add_argument("spec", help='e.g. "mod_t:t=2,sigma=1", "appendix:B=2", "dataset:n5k2"')
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--emit", metavar="PATH", help="write the set ('-' for stdout)")
    sp.add_argument("--evaluate", action="store_true")
    sp.add_argument("--mode", choices=(STRICT, GREEDY_FALLBACK), default=STRICT)

    sp = add("simulate", cmd_simulate, "play games against a strategy")
    sp.add_argument("spec")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--assignment", action="append", help='colors, e.g. "2 1"')
    sp.add_argument("--mode", choices=(STRICT, GREEDY_FALLBACK), default=STRICT)
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--monte-carlo", type=int, metavar="SAMPLES")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("search", cmd_search, "maximum independent set search or ILP export")
    nk(sp)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--greedy", action="store_true")
    mode.add_argument("--export-ilp", metavar="PATH")
    sp.add_argument("--time-limit", type=float, default=60.0)
    sp.add_argument("--ceiling", type=int, default=5040)
    sp.add_argument("--symmetry", help='generators, e.g. "(1 2)(4 5);(2 6 3 5)"')
    sp.add_argument("--seed-set", help="independent set file or dataset to start from")
    sp.add_argument("--out", help="write the best set found")

    sp = add("orbit", cmd_orbit, "expand seeds by a group acting on positions")
    sp.add_argument("--seeds", required=True)
    sp.add_argument("--generators", required=True, help='e.g. "(24)(35);(1532)"')
    sp.add_argument("--degree", type=int)
    sp.add_argument("--out")

    sp = add("validate-od", cmd_validate_od, "validate an ordered design array (CSV)")
    sp.add_argument("source")
    sp.add_argument("--t", type=int)
    sp.add_argument("--v", type=int)

    sp = add("validate-steiner", cmd_validate_steiner, "validate a Steiner system")
    sp.add_argument("source")
    sp.add_argument("--m", type=int)

    sp = add("validate-latin", cmd_validate_latin, "validate a Latin square")
    sp.add_argument("source")

    sp = add("expand-steiner", cmd_expand_steiner, "all orderings of every block")
    sp.add_argument("source")
    sp.add_argument("--m", type=int)
    sp.add_argument("--out")

    sp = add("to-od", cmd_to_od, "convert a perfect set to an ordered design array")
    sp.add_argument("source")
    sp.add_argument("--out")

    sp = add("teirlinck", cmd_teirlinck, "prime-factorization existence criterion")
    nk(sp)

    sp = add("best-residues", cmd_best_residues, "best targets for the bit-code strategy")
    nk(sp)
    sp.add_argument("--B", type=int)

    sp = add("best-sigma", cmd_best_sigma, "best target sum for the mod-t strategy")
    nk(sp)
    sp.add_argument("--t", type=int, required=True)

    sp = add("table1", cmd_table1, "reproduce the independence-number table")
    sp.add_argument("--max-n", type=int, default=6)
    sp.add_argument("--max-k", type=int, default=6)

    add("datasets", cmd_datasets, "list embedded datasets")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hatlab: error: {exc}", file=sys.stderr)
        return 2
    except HatlabError as exc:
        print(f"hatlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError) as exc:
        print(f"hatlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
