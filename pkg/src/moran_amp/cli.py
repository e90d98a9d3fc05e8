"""Command-line front end: graph generation, amplifier construction, exact
solves, bounds reports, and Monte Carlo runs, all with reproducible outputs.

Every output file gets a sidecar manifest (<out>.manifest.json) recording the
command line, seed, input graph hash, tool version, and wall time.

Exit codes: 0 success, 2 usage, 3 precondition violated, 4 capacity exceeded,
5 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
import warnings
from pathlib import Path

from . import __version__
from .amplifier import check_diameter, construct_amplifier
from .bounds import bounds_report
from .dynamics import parse_scheme
from .estimator import estimate_fixation, resolve_threads, sweep
from .exact import CapacityError, fixation_under_scheme, fixation_vector
from .generators import FamilySpec, generate, load_graph, save_graph
from .graph_core import GraphError, WeightedGraph

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_CAPACITY = 4
EXIT_IO = 5

CSV_COLUMNS = [
    "graph_id", "n", "r", "scheme", "trials", "fixations", "timeouts", "point",
    "w95_lo", "w95_hi", "w99_lo", "w99_hi", "seed", "mean_jump_steps",
]


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_graph(path: str) -> tuple[WeightedGraph, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    try:
        g = load_graph(data)
    except GraphError as exc:
        raise CliError(EXIT_IO, f"cannot parse {path}: {exc}") from exc
    return g, hashlib.sha256(data).hexdigest()


def _write_output(path: str, data: bytes, manifest: dict) -> None:
    try:
        Path(path).write_bytes(data)
        Path(path + ".manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _manifest(args: argparse.Namespace, t0: float, graph_hash: str | None) -> dict:
    return {
        "command": "moran-amp " + " ".join(getattr(args, "_argv", sys.argv[1:])),
        "seed": getattr(args, "seed", None),
        "graph_hash": graph_hash,
        "version": __version__,
        "wall_time_s": round(time.monotonic() - t0, 6),
    }


def _estimate_csv_row(graph_id: str, n: int, r: float, scheme: str, est) -> dict:
    d = est.to_dict()
    return {
        "graph_id": graph_id,
        "n": n,
        "r": repr(r),
        "scheme": scheme,
        "trials": d["trials"],
        "fixations": d["fixations"],
        "timeouts": d["timeouts"],
        "point": repr(d["point"]),
        "w95_lo": repr(d["w95_lo"]),
        "w95_hi": repr(d["w95_hi"]),
        "w99_lo": repr(d["w99_lo"]),
        "w99_hi": repr(d["w99_hi"]),
        "seed": d["seed"],
        "mean_jump_steps": repr(d["mean_jump_steps"]),
    }


def _rows_to_csv(rows: list[dict]) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue().encode()


# -- subcommands ---------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    spec = FamilySpec(
        family=args.family, n=args.n, self_loops=args.self_loops,
        rows=args.rows, cols=args.cols, torus=args.torus, p=args.p, seed=args.seed,
    )
    try:
        g = generate(spec)
    except GraphError as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    _write_output(args.out, save_graph(g), _manifest(args, t0, None))
    return EXIT_OK


def cmd_construct(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    g, ghash = _read_graph(args.graph)
    try:
        if not check_diameter(g, args.epsilon):
            if not args.force:
                raise CliError(
                    EXIT_PRECONDITION,
                    f"diameter exceeds n^(1-epsilon) = {g.n ** (1 - args.epsilon):.3f}; "
                    "rerun with --force to construct anyway",
                )
            print("warning: diameter precondition violated; continuing (--force)",
                  file=sys.stderr)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            amp, layout = construct_amplifier(
                g, args.epsilon, root=args.root, kappa=args.kappa
            )
    except GraphError as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    manifest = _manifest(args, t0, ghash)
    _write_output(args.out, save_graph(amp), manifest)
    layout_path = args.layout_out or (args.out + ".layout.json")
    _write_output(layout_path, (json.dumps(layout.to_dict(), indent=1) + "\n").encode(),
                  manifest)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    g, ghash = _read_graph(args.graph)
    try:
        parse_scheme(args.scheme)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    try:
        est = estimate_fixation(
            g, args.r, args.scheme, args.trials, args.seed,
            mode=args.mode, max_steps=args.max_steps,
            threads=resolve_threads(args.threads),
        )
    except (GraphError, ValueError) as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    row = _estimate_csv_row(Path(args.graph).name, g.n, args.r, args.scheme, est)
    _write_output(args.out, _rows_to_csv([row]), _manifest(args, t0, ghash))
    if est.unreliable:
        print(f"warning: {est.timeouts}/{est.trials} trials timed out; "
              "estimate flagged unreliable", file=sys.stderr)
    return EXIT_OK


def cmd_exact(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    g, ghash = _read_graph(args.graph)
    try:
        vec = fixation_vector(g, args.r, limit=args.limit)
        doc = {
            "n": g.n,
            "r": args.r,
            "rho": [float(x) for x in vec],
            "uniform": fixation_under_scheme(g, args.r, "uniform", limit=args.limit),
            "temperature": fixation_under_scheme(g, args.r, "temperature", limit=args.limit),
        }
    except CapacityError as exc:
        raise CliError(EXIT_CAPACITY, str(exc)) from exc
    except (GraphError, ValueError) as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    _write_output(args.out, (json.dumps(doc, indent=1) + "\n").encode(),
                  _manifest(args, t0, ghash))
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    g, ghash = _read_graph(args.graph)
    try:
        report = bounds_report(g, args.r)
    except (GraphError, ValueError) as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    _write_output(args.out, (json.dumps(report.to_dict(), indent=1) + "\n").encode(),
                  _manifest(args, t0, ghash))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    try:
        spec_doc = json.loads(Path(args.spec).read_text())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.spec}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_IO, f"cannot parse {args.spec}: {exc}") from exc
    if not isinstance(spec_doc, list) or not spec_doc:
        raise CliError(EXIT_PRECONDITION, "sweep spec must be a nonempty JSON list")
    specs = []
    meta = []
    for i, row in enumerate(spec_doc):
        try:
            g, _ = _read_graph(row["graph"])
            parse_scheme(row["scheme"])
            specs.append((g, float(row["r"]), row["scheme"], int(row["trials"])))
            meta.append((Path(row["graph"]).name, g.n, float(row["r"]), row["scheme"]))
        except KeyError as exc:
            raise CliError(EXIT_PRECONDITION, f"sweep row {i}: missing field {exc}") from exc
        except ValueError as exc:
            raise CliError(EXIT_PRECONDITION, f"sweep row {i}: {exc}") from exc
    results = sweep(specs, args.seed, mode=args.mode, max_steps=args.max_steps,
                    threads=resolve_threads(args.threads))
    rows = []
    for (gid, n, r, scheme), res in zip(meta, results):
        if isinstance(res, Exception):
            rows.append({col: "" for col in CSV_COLUMNS}
                        | {"graph_id": gid, "n": n, "r": repr(r), "scheme": scheme,
                           "point": f"error: {res}"})
        else:
            rows.append(_estimate_csv_row(gid, n, r, scheme, res))
    _write_output(args.out, _rows_to_csv(rows), _manifest(args, t0, None))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="moran-amp",
        description="Birth-death dynamics on weighted graphs: exact fixation "
        "probabilities, Monte Carlo estimation, structural upper bounds, and "
        "the amplifier weight construction.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a graph from a named family")
    g.add_argument("--family", required=True,
                   choices=["complete", "star", "cycle", "grid", "random"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--torus", action="store_true")
    g.add_argument("--self-loops", action="store_true", dest="self_loops")
    g.add_argument("--p", type=float, help="edge probability for the random family")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("construct", help="apply the amplifier weight construction")
    c.add_argument("--graph", required=True)
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--root", type=int, default=0)
    c.add_argument("--kappa", type=int, default=None,
                   help="override the 2^-n scale exponent (default: n)")
    c.add_argument("--force", action="store_true",
                   help="construct even if the diameter precondition fails")
    c.add_argument("--out", required=True)
    c.add_argument("--layout-out", dest="layout_out")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("simulate", help="Monte Carlo fixation estimate")
    s.add_argument("--graph", required=True)
    s.add_argument("--r", type=float, required=True)
    s.add_argument("--scheme", default="uniform",
                   help="uniform | temperature | convex:ETA")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--mode", choices=["full", "jump"], default="jump")
    s.add_argument("--max-steps", type=int, default=10**9, dest="max_steps")
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("exact", help="exact fixation vector and scheme values")
    e.add_argument("--graph", required=True)
    e.add_argument("--r", type=float, required=True)
    e.add_argument("--limit", type=int, default=14)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_exact)

    b = sub.add_parser("bounds", help="structural upper-bound report")
    b.add_argument("--graph", required=True)
    b.add_argument("--r", type=float, required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bounds)

    w = sub.add_parser("sweep", help="batch of Monte Carlo estimates from a JSON spec")
    w.add_argument("--spec", required=True,
                   help='JSON list of {"graph","r","scheme","trials"}')
    w.add_argument("--seed", type=int, required=True)
    w.add_argument("--mode", choices=["full", "jump"], default="jump")
    w.add_argument("--max-steps", type=int, default=10**9, dest="max_steps")
    w.add_argument("--threads", type=int, default=None)
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else list(sys.argv[1:])
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
