"""oraclegeom command line: instance generation, single runs, and sweeps."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .harness import ASSUMPTION_ERRORS, COMMANDS, SOLVERS, STRATEGIES, run
from .instances import KINDS, GenerationError, InstanceFile, SchemaError, generate, load
from .terrain import read_xyz, write_mesh
from .ulp.result import SolverDiagnostic

EXIT_OK, EXIT_ASSUMPTION, EXIT_SCHEMA, EXIT_INTERNAL = 0, 2, 3, 4


def _gen_params(args) -> dict:
    kind = args.kind
    p = {"n": args.n}
    if kind == "ulp":
        p.update(dim=args.dim, feasible=not args.infeasible)
    elif kind in ("kdisks", "ktriangles"):
        p["k"] = args.k if args.k is not None else 3
        if args.margin is not None:
            p["margin"] = args.margin
    elif kind == "terrain":
        p["k"] = args.k if args.k is not None else 4
        if args.eps is not None:
            p["eps"] = args.eps
    return p


def parse_sweep(text: str) -> tuple[str, list[int]]:
    """``n=256..16384`` (doubling) or ``n=100,200,400``."""
    key, sep, rhs = text.partition("=")
    if not sep or not key.strip():
        raise SchemaError(f"bad --sweep value {text!r}; expected key=lo..hi or key=a,b,c")
    if ".." in rhs:
        lo, hi = (int(v) for v in rhs.split("..", 1))
        if lo < 1 or hi < lo:
            raise SchemaError(f"bad sweep range {rhs!r}")
        vals = []
        while lo <= hi:
            vals.append(lo)
            lo *= 2
    else:
        vals = [int(v) for v in rhs.split(",") if v.strip()]
    return key.strip(), vals


def _flags(args) -> dict:
    return {"solver": args.solver, "strategy": args.strategy, "r": args.r, "base_size": args.base_size,
            "sample_const": args.sample_const, "eps": args.eps, "k": args.k, "seed": args.seed}


def _instance_from_xyz(path, args) -> InstanceFile:
    P = read_xyz(path)
    if args.k is None or args.eps is None:
        raise SchemaError("xyz input needs --k and --eps")
    return InstanceFile("terrain", {"n": len(P), "k": args.k, "eps": args.eps}, 0,
                        {"points": P[:, :2].tolist()}, {"heights": P[:, 2].tolist()})


def _write(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _csv_text(rows: list[dict]) -> str:
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    inst = generate(args.kind, seed=args.seed, **_gen_params(args))
    _write(inst.dumps(), args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    if args.sweep:
        return _sweep(args)
    if args.instance is None:
        raise SchemaError("run needs an instance file (or --sweep with --kind)")
    if args.instance.endswith((".xyz", ".txt", ".csv")):
        inst = _instance_from_xyz(args.instance, args)
    else:
        inst = load(args.instance)
    rep = run(args.command, inst, **_flags(args))
    if args.command == "simplify-terrain":
        mesh = args.mesh or (str(Path(args.out).with_suffix(".obj")) if args.out not in (None, "-") else "mesh.obj")
        write_mesh(rep.artifact, mesh, mesh + ".json", rep.flags.get("eps"))
        rep.result["mesh"] = mesh
    _write(rep.to_json(), args.out)
    if args.csv:
        _write(_csv_text([rep.csv_row()]), args.csv)
    return EXIT_OK if rep.verified else EXIT_INTERNAL


def _cell(job):
    command, kind, params, seed, flags = job
    inst = generate(kind, seed=seed, **params)
    try:
        rep = run(command, inst, **dict(flags, seed=seed))
    except ASSUMPTION_ERRORS as e:
        return {"command": command, "n": inst.n, "k": params.get("k", ""), "seed": seed,
                "outcome": "assumption-violation", "error": str(e)}, None
    row = rep.csv_row()
    row["verified"] = rep.verified
    return row, rep.envelope


def _sweep(args) -> int:
    if not args.kind:
        raise SchemaError("--sweep needs --kind to generate instances")
    if args.kind not in COMMANDS[args.command]:
        raise SchemaError(f"{args.command} cannot run on {args.kind} instances")
    key, values = parse_sweep(args.sweep)
    jobs = []
    for v in values:
        setattr(args, key, v)
        params = _gen_params(args)
        for s in range(args.seeds):
            jobs.append((args.command, args.kind, dict(params), s, _flags(args)))
    if args.sequential or (os.cpu_count() or 1) < 2:
        results = [_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor() as ex:
            results = list(ex.map(_cell, jobs))
    rows = [r for r, _ in results]
    summary = {}
    for v in values:
        sel = [r for r in rows if r.get(key, r.get("n")) == v]
        q = [r["q_total"] for r in sel if "q_total" in r]
        summary[str(v)] = {"runs": len(sel), "median_queries": float(np.median(q)) if q else None,
                           "verified": sum(bool(r.get("verified")) for r in sel),
                           "assumption_violations": sum(r["outcome"] == "assumption-violation" for r in sel)}
    _write(json.dumps({"command": args.command, "kind": args.kind, "sweep": {key: values},
                       "seeds": args.seeds, "summary": summary}, indent=1, sort_keys=True), args.out)
    if args.csv:
        _write(_csv_text(rows), args.csv)
    bad = sum(1 for r in rows if r["outcome"] != "assumption-violation" and not r.get("verified"))
    return EXIT_INTERNAL if bad else EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oraclegeom", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a planted instance file")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--n", type=int, default=256)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--margin", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--infeasible", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a solver or learner and verify it")
    r.add_argument("command", choices=sorted(COMMANDS))
    r.add_argument("instance", nargs="?", help="instance JSON (or xyz text for simplify-terrain)")
    r.add_argument("--solver", choices=SOLVERS)
    r.add_argument("--strategy", choices=STRATEGIES)
    r.add_argument("--r", type=int)
    r.add_argument("--base-size", type=int)
    r.add_argument("--sample-const", type=float)
    r.add_argument("--eps", type=float)
    r.add_argument("--k", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.add_argument("--csv")
    r.add_argument("--mesh", help="mesh output path for simplify-terrain")
    r.add_argument("--sweep", help="e.g. n=256..16384 (doubling) or n=100,200")
    r.add_argument("--seeds", type=int, default=10)
    r.add_argument("--sequential", action="store_true")
    r.add_argument("--kind", choices=KINDS, help="instance kind generated in sweep mode")
    r.add_argument("--n", type=int, default=256)
    r.add_argument("--dim", type=int, default=2)
    r.add_argument("--margin", type=float)
    r.add_argument("--infeasible", action="store_true")
    r.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ASSUMPTION_ERRORS as e:
        print(json.dumps({"outcome": "assumption-violation", "error": str(e)}), file=sys.stderr)
        return EXIT_ASSUMPTION
    except (SchemaError, GenerationError, ValueError, OSError) as e:
        print(json.dumps({"outcome": "schema-error", "error": str(e)}), file=sys.stderr)
        return EXIT_SCHEMA
    except (SolverDiagnostic, RuntimeError) as e:
        print(json.dumps({"outcome": "internal-diagnostic", "error": str(e)}), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
