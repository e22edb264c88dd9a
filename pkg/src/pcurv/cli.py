"""``pcurv`` command line.

Exit codes: 0 success, 1 failed verification, 2 input error, 3 degenerate
vertex.  Numbers are printed with 12 significant digits and ``m = inf`` is
spelled ``inf``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import graph, operators, product, solver, verify

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3

FAMILIES = {
    "path": graph.make_path,
    "cycle": graph.make_cycle,
    "star": graph.make_star,
    "complete": graph.make_complete,
    "hypercube": graph.make_hypercube,
}


class InputError(Exception):
    pass


@dataclass
class OutputRecord:
    graph: str
    vertex: str
    p: float
    m: float | str
    status: str
    value: float | None
    restarts: int
    seed: int
    wall_time_ms: float


FIELDS = [f for f in OutputRecord.__dataclass_fields__]


def _num(v):
    """12 significant digits; ``inf`` as a string."""
    if v is None or isinstance(v, (str, bool, int)):
        return v
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return float(f"{v:.12g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _num(obj)


def emit_records(records: list[OutputRecord], fmt: str, out) -> None:
    rows = [_clean(asdict(r)) for r in records]
    if fmt == "json":
        out.write(json.dumps(rows, indent=1) + "\n")
        return
    w = csv.DictWriter(out, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else (f"{v:.12g}" if isinstance(v, float) else v)) for k, v in row.items()})


def _parse_dim(s: str) -> float:
    if s.strip().lower() == "inf":
        return math.inf
    try:
        m = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension must be a number or 'inf', got {s!r}") from None
    if not m > 0:
        raise argparse.ArgumentTypeError("dimension must be positive")
    return m


def _load(path: str) -> graph.WeightedGraph:
    try:
        return graph.load_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read graph file {path!r}: {exc.strerror or exc}") from None


def _config(args) -> solver.SolverConfig:
    try:
        return solver.SolverConfig(
            restarts=args.restarts, seed=args.seed, value_tolerance=args.tol, workers=args.workers
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _vertices(g, args) -> list[int]:
    if args.all:
        return list(range(g.n))
    if args.vertex is None:
        raise InputError("give --vertex LABEL or --all")
    return [g.index(args.vertex)]


def _curvature_records(g, name, vertices, p, m, cfg):
    out = []
    for v in vertices:
        t0 = time.perf_counter()
        est = solver.estimate_curvature(g, v, p, m, cfg)
        ms = (time.perf_counter() - t0) * 1e3
        value = est.value if est.converged else None
        out.append(OutputRecord(name, g.labels[v], p, m, est.status.value, value, est.restarts_used, cfg.seed, ms))
    return out


def _exit_for(records) -> int:
    return EXIT_DEGENERATE if any(r.status == solver.Status.DEGENERATE.value for r in records) else EXIT_OK


def cmd_curvature(args, out) -> int:
    g = _load(args.graph)
    cfg = _config(args)
    p = operators.check_p(args.p)
    recs = _curvature_records(g, Path(args.graph).stem, _vertices(g, args), p, args.dim, cfg)
    emit_records(recs, args.format, out)
    return _exit_for(recs)


def p_grid(p_from: float, p_to: float, p_step: float) -> list[float]:
    if not 1 < p_from <= p_to:
        raise InputError(f"need 1 < p-from <= p-to, got {p_from}, {p_to}")
    if not p_step > 0:
        raise InputError("p-step must be positive")
    count = int(math.floor((p_to - p_from) / p_step + 1e-9)) + 1
    return [p_from + k * p_step for k in range(count)]


def cmd_sweep_p(args, out) -> int:
    grid = p_grid(args.p_from, args.p_to, args.p_step)
    g = _load(args.graph)
    cfg = _config(args)
    vertices = _vertices(g, args)
    recs = []
    for p in grid:
        recs += _curvature_records(g, Path(args.graph).stem, vertices, p, args.dim, cfg)
    emit_records(recs, args.format, out)
    return _exit_for(recs)


def _function_file(path: str, g1, g2):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read function file {path!r}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed function file: {exc}") from None
    vals = doc.get("values") if isinstance(doc, dict) else None
    if not isinstance(vals, dict):
        raise InputError("function file needs a 'values' object")
    for k, v in vals.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"value for {k!r} is not a number")
    return product.as_product_function(g1, g2, vals)


def cmd_product_gap(args, out) -> int:
    g1, g2 = _load(args.graph1), _load(args.graph2)
    p = operators.check_p(args.p)
    x, y = g1.index(args.x), g2.index(args.y)
    if args.function:
        F = _function_file(args.function, g1, g2)
        source = args.function
    else:
        F = product.counterexample_function(g1, g2, x, y)
        source = "witness"
    gb = product.gamma2_decomposition_gap(g1, g2, F, x, y, p)
    rec = {
        "graph1": Path(args.graph1).stem,
        "graph2": Path(args.graph2).stem,
        "x": g1.labels[x],
        "y": g2.labels[y],
        "p": p,
        "function": source,
        "gap": gb.gap,
        "direct": gb.direct,
        "full": gb.full,
        "row": gb.row,
        "col": gb.col,
        "per_pair": None,
    }
    if gb.per_pair_terms is not None:
        rec["per_pair"] = [
            {"x_i": g1.labels[a], "y_k": g2.labels[b], "term": t} for (a, b), t in gb.per_pair_terms.items()
        ]
    if p == 2.0 and gb.per_pair_terms is not None:
        q = product.quarter_sum(*product.pair_differences(g1, g2, F, x, y))
        rec["quarter_sum"] = q
        rec["quarter_sum_check"] = bool(abs(q - gb.gap) <= 1e-10 * max(1.0, abs(q)))
    rec = _clean(rec)
    if args.format == "json":
        out.write(json.dumps(rec, indent=1) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x_i", "y_k", "term"])
        for row in rec["per_pair"] or []:
            w.writerow([row["x_i"], row["y_k"], f"{row['term']:.12g}"])
        w.writerow(["total", "", f"{rec['gap']:.12g}"])
    return EXIT_OK


def cmd_ratio(args, out) -> int:
    g = _load(args.graph)
    p = operators.check_p(args.p)
    x = g.index(args.vertex)
    with open(args.function) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed function file: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("values"), dict):
        raise InputError("function file needs a 'values' object")
    f = g.function(doc["values"])
    g2, lap, gam = operators.cd_terms(g, f, x, p)
    rec = {"graph": Path(args.graph).stem, "vertex": g.labels[x], "p": p, "m": args.dim,
           "gamma2": g2, "delta": lap, "gamma": gam, "ratio": None}
    try:
        rec["ratio"] = operators.cd_ratio(g, f, x, p, args.dim)
    except operators.DegenerateFunctionError:
        out.write(json.dumps(_clean(rec), indent=1) + "\n")
        return EXIT_DEGENERATE
    out.write(json.dumps(_clean(rec), indent=1) + "\n")
    return EXIT_OK


def cmd_generate(args, out) -> int:
    try:
        g = FAMILIES[args.family](args.size)
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot build {args.family} of size {args.size}: {exc}") from None
    if args.out:
        graph.save_graph(g, args.out)
    else:
        out.write(graph.serialize_graph(g) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    results = verify.run_checks(args.level)
    out.write(verify.report(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _solver_flags(sp):
    sp.add_argument("--graph", required=True)
    who = sp.add_mutually_exclusive_group()
    who.add_argument("--vertex")
    who.add_argument("--all", action="store_true")
    sp.add_argument("--dim", type=_parse_dim, default=math.inf)
    sp.add_argument("--restarts", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcurv", description="p-Bakry-Emery curvature on graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("curvature", help="curvature at one vertex or all")
    _solver_flags(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.set_defaults(run=cmd_curvature)

    sp = sub.add_parser("sweep-p", help="curvature over a grid of p")
    _solver_flags(sp)
    sp.add_argument("--p-from", type=float, required=True)
    sp.add_argument("--p-to", type=float, required=True)
    sp.add_argument("--p-step", type=float, required=True)
    sp.set_defaults(run=cmd_sweep_p)

    sp = sub.add_parser("ratio", help="evaluate the curvature ratio of a given function")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--dim", type=_parse_dim, default=math.inf)
    sp.add_argument("--function", required=True)
    sp.set_defaults(run=cmd_ratio)

    sp = sub.add_parser("product-gap", help="Gamma_2,p decomposition gap on a product")
    sp.add_argument("--graph1", required=True)
    sp.add_argument("--graph2", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--function")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(run=cmd_product_gap)

    sp = sub.add_parser("generate", help="write a standard graph as JSON")
    sp.add_argument("--family", choices=sorted(FAMILIES), required=True)
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(run=cmd_generate)

    sp = sub.add_parser("verify", help="run the self-verification suite")
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    sp.set_defaults(run=cmd_verify)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args, out)
    except (InputError, graph.GraphError, operators.DegenerateFunctionError, ValueError, OSError) as exc:
        print(f"pcurv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run(argv) -> tuple[int, str]:
    """Invoke :func:`main` and capture standard output."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
