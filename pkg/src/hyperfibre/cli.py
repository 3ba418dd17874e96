"""Command-line entry point: ``hyperfibre <subcommand> ...``.

Exit codes: 0 success, 2 input error, 3 retarget did not converge,
4 numeric failure.  Failures print a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from .errors import HyperfibreError
from .fibration import hypergraph_fibres
from .freqtune import assign_frequencies, delta_max, omega_from_csv, omega_to_csv
from .hypergraph import (
    degrees,
    drop_isolated,
    format_hypergraph,
    largest_component,
    parse_hypergraph,
    project,
)
from .partition import fibre_stats, partition_from_json, partition_to_json
from .topoedit import EditConfig, inject_redundancy, retarget, sparsify

EXIT_OK, EXIT_INPUT, EXIT_NOCONVERGE, EXIT_NUMERIC = 0, 2, 3, 4


def write_atomic(path: str | None, text: str) -> None:
    """Write via a temp file in the target directory and rename; ``None``/``-`` is stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def load_hypergraph(args):
    text = Path(args.input).read_text(encoding="utf-8")
    fmt = args.format
    if fmt == "auto":
        fmt = "json" if args.input.endswith(".json") else "edgelist"
    h = parse_hypergraph(text, fmt, dedup=args.dedup, drop_singletons=args.drop_singletons)
    if args.drop_isolated:
        h = drop_isolated(h)
    if args.lcc:
        h, _ = largest_component(h)
    return h


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _evaluate(node) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_evaluate(node.operand)
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_evaluate(node.left), _evaluate(node.right))
    raise ValueError("unsupported expression")


def angle(text: str) -> float:
    """Number or arithmetic in ``pi`` such as ``3*pi/5``."""
    try:
        return _evaluate(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an angle expression: {text!r}") from None


def parse_values(spec: str) -> list[float]:
    """``a,b,c`` or ``start:stop:num`` (inclusive linspace)."""
    if spec.count(":") == 2:
        a, b, n = spec.split(":")
        return [float(x) for x in np.linspace(angle(a), angle(b), int(n))]
    return [angle(x) for x in spec.split(",") if x.strip()]


def params_from(args, h) -> dyn.KuramotoParams:
    omega = args.omega
    if getattr(args, "omega_file", None):
        omega = omega_from_csv(Path(args.omega_file).read_text(), h.node_labels)
    return dyn.KuramotoParams(sigma2=args.sigma2, sigma3=args.sigma3, alpha2=args.alpha2,
                              alpha3=args.alpha3, omega=omega, theta0=args.theta0,
                              dt=args.dt, t_max=args.tmax)


def edit_config(args) -> EditConfig:
    protected = frozenset(int(x) for x in args.protect.split(",") if x.strip()) if args.protect else frozenset()
    return EditConfig(seed=args.seed, n_orders=args.n_orders, protected=protected,
                      max_iter=args.max_iter, K=args.K, T=args.T, retry_limit=args.retry_limit)


# ------------------------------------------------------------- commands


def cmd_fibres(args) -> int:
    h = load_hypergraph(args)
    res = hypergraph_fibres(h)
    write_atomic(args.output, partition_to_json(res.node_partition, h.node_labels) + "\n")
    if args.edges_output:
        edge_names = [" ".join(h.label(v) for v in e) for e in h.hyperedges]
        write_atomic(args.edges_output, partition_to_json(res.hyperedge_partition, edge_names) + "\n")
    st = fibre_stats(res.node_partition)
    out = sys.stderr if args.output in (None, "-") else sys.stdout
    print(json.dumps({"classes": st.class_count, "avg_class_size": float(dyn.fmt(st.avg_class_size)),
                      "nontrivial": st.nontrivial_count, "rounds": res.round_count}), file=out)
    return EXIT_OK


def cmd_stats(args) -> int:
    h = load_hypergraph(args)
    st = fibre_stats(hypergraph_fibres(h).node_partition)
    name = args.name or Path(args.input).stem
    row = f"{name},{h.node_count},{h.edge_count},{st.avg_class_size:.2f},{st.nontrivial_count}\n"
    write_atomic(args.output, ("dataset,N,E,N/C,nontrivial\n" if args.header else "") + row)
    return EXIT_OK


def cmd_project(args) -> int:
    h = load_hypergraph(args)
    write_atomic(args.output, format_hypergraph(project(h, args.mode)))
    return EXIT_OK


def _partition_or_fibres(args, h):
    if getattr(args, "partition", None):
        return partition_from_json(Path(args.partition).read_text(), h.node_labels)
    return hypergraph_fibres(h).node_partition


def cmd_simulate(args) -> int:
    h = load_hypergraph(args)
    p = params_from(args, h)
    traj = dyn.integrate(h, p)
    write_atomic(args.output, dyn.trajectory_to_csv(traj, h.node_labels))
    if args.order_output:
        write_atomic(args.order_output, dyn.order_parameters_to_csv(traj, _partition_or_fibres(args, h)))
    return EXIT_OK


def cmd_sync_clusters(args) -> int:
    h = load_hypergraph(args)
    traj, labels = dyn.trajectory_from_csv(Path(args.trajectory).read_text())
    if labels != h.node_labels:
        index = {lab: i for i, lab in enumerate(labels)}
        try:
            cols = [index[lab] for lab in h.node_labels]
        except KeyError as exc:
            raise ValueError(f"trajectory lacks node {exc.args[0]!r}") from None
        traj = dyn.Trajectory(traj.times, traj.phases[:, cols])
    part = dyn.extract_sync_clusters(traj, degrees(h), args.epsilon, args.samples, args.seed)
    write_atomic(args.output, partition_to_json(part, h.node_labels) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    h = load_hypergraph(args)
    base = params_from(args, h)
    a2, a3 = parse_values(args.alpha2_values), parse_values(args.alpha3_values)
    m = dyn.sweep_frustration(h, a2, a3, base, steps=args.steps, workers=args.workers)
    write_atomic(args.output, dyn.sweep_to_csv(m, a2, a3))
    return EXIT_OK


def _write_edit(args, report) -> None:
    write_atomic(args.report, report.to_json() + "\n")
    if args.output:
        write_atomic(args.output, format_hypergraph(report.hypergraph))


def cmd_sparsify(args) -> int:
    h = load_hypergraph(args)
    _write_edit(args, sparsify(h, edit_config(args)))
    return EXIT_OK


def cmd_retarget(args) -> int:
    h = load_hypergraph(args)
    target = partition_from_json(Path(args.target).read_text(), h.node_labels)
    report = retarget(h, target, edit_config(args))
    _write_edit(args, report)
    return EXIT_OK if report.converged else EXIT_NOCONVERGE


def cmd_inject(args) -> int:
    h = load_hypergraph(args)
    cfg = edit_config(args)
    _write_edit(args, inject_redundancy(h, cfg.K, cfg))
    return EXIT_OK


def cmd_tune_freq(args) -> int:
    h = load_hypergraph(args)
    p = dyn.KuramotoParams(sigma2=args.sigma2, sigma3=args.sigma3, alpha2=args.alpha2, alpha3=args.alpha3)
    deg = degrees(h)
    fa = assign_frequencies(deg, args.omega_target, p)
    write_atomic(args.output, omega_to_csv(h.node_labels, fa.omega))
    bound = delta_max(deg, args.tau, p)
    write_atomic(args.bound_output, bound.to_json() + "\n")
    return EXIT_OK


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperfibre", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("input", help="hypergraph file (hyperedge list or JSON)")
        sp.add_argument("--format", choices=["auto", "edgelist", "json"], default="auto")
        sp.add_argument("--dedup", action="store_true", help="drop duplicate hyperedges")
        sp.add_argument("--drop-singletons", action="store_true", help="drop order-1 hyperedges")
        sp.add_argument("--drop-isolated", action="store_true", help="drop nodes in no hyperedge")
        sp.add_argument("--lcc", action="store_true", help="keep the largest connected component")
        sp.set_defaults(func=func)
        return sp

    def dynamics_flags(sp, tmax=100.0):
        sp.add_argument("--sigma2", type=float, default=0.2)
        sp.add_argument("--sigma3", type=float, default=0.6)
        sp.add_argument("--alpha2", type=angle, default=math.pi / 6)
        sp.add_argument("--alpha3", type=angle, default=math.pi / 6)
        sp.add_argument("--theta0", type=float, default=1.0)
        sp.add_argument("--omega", type=float, default=0.0)
        sp.add_argument("--omega-file", help="per-node omega CSV as written by tune-freq")
        sp.add_argument("--dt", type=float, default=0.1)
        sp.add_argument("--tmax", type=float, default=tmax)

    def edit_flags(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n-orders", type=int, default=10)
        sp.add_argument("--max-iter", type=int, default=50)
        sp.add_argument("--K", type=int, default=10)
        sp.add_argument("--T", type=int, default=100)
        sp.add_argument("--retry-limit", type=int, default=3)
        sp.add_argument("--protect", default="", help="comma-separated hyperedge indices to keep")
        sp.add_argument("--report", default=None, help="EditReport JSON (default stdout)")
        sp.add_argument("-o", "--output", help="resulting hyperedge list")

    sp = add("fibres", cmd_fibres, "node fibres as partition JSON")
    sp.add_argument("-o", "--output")
    sp.add_argument("--edges-output", help="hyperedge fibres as partition JSON")

    sp = add("stats", cmd_stats, "dataset row: N, E, N/C, nontrivial fibres")
    sp.add_argument("-o", "--output")
    sp.add_argument("--name")
    sp.add_argument("--header", action="store_true")

    sp = add("project", cmd_project, "clique-expand to a (multi)graph")
    sp.add_argument("--mode", choices=["simple", "multi"], default="simple")
    sp.add_argument("-o", "--output")

    sp = add("simulate", cmd_simulate, "integrate the higher-order Kuramoto model")
    dynamics_flags(sp)
    sp.add_argument("-o", "--output", help="trajectory CSV")
    sp.add_argument("--order-output", help="order-parameter CSV (global + per class)")
    sp.add_argument("--partition", help="partition JSON for per-class R (default: fibres)")

    sp = add("sync-clusters", cmd_sync_clusters, "synchronized clusters from a trajectory")
    sp.add_argument("--trajectory", required=True)
    sp.add_argument("--epsilon", type=float, default=1e-6)
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")

    sp = add("sweep", cmd_sweep, "time-averaged R over a frustration grid")
    dynamics_flags(sp)
    sp.add_argument("--alpha2-values", default="0:1.5:5")
    sp.add_argument("--alpha3-values", default="0:1.5:5")
    sp.add_argument("--steps", type=int, default=500)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("-o", "--output")

    sp = add("sparsify", cmd_sparsify, "remove redundant hyperedge groups")
    edit_flags(sp)
    sp = add("retarget", cmd_retarget, "edit toward a target fibre partition")
    edit_flags(sp)
    sp.add_argument("--target", required=True, help="target partition JSON")
    sp = add("inject", cmd_inject, "add fibre-preserving redundant hyperedges")
    edit_flags(sp)

    sp = add("tune-freq", cmd_tune_freq, "natural frequencies for global frequency sync")
    sp.add_argument("--sigma2", type=float, default=0.6)
    sp.add_argument("--sigma3", type=float, default=0.8)
    sp.add_argument("--alpha2", type=angle, default=math.pi / 3)
    sp.add_argument("--alpha3", type=angle, default=math.pi / 6)
    sp.add_argument("--omega-target", type=float, default=2.0)
    sp.add_argument("--tau", type=float, default=0.5)
    sp.add_argument("-o", "--output", help="omega CSV")
    sp.add_argument("--bound-output", help="DeltaBound JSON (default stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HyperfibreError as exc:
        failure = (exc.code, exc)
    except (ValueError, OSError) as exc:
        failure = (EXIT_INPUT, exc)
    except FloatingPointError as exc:
        failure = (EXIT_NUMERIC, exc)
    code, exc = failure
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
