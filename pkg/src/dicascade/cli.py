"""Command-line entry point (``dicascade``).

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analytic import closed_form_deterministic_indegree, solve_reference_ode
from .epidemic_sim import run_replicas
from .harness import (
    ConfigError,
    ExperimentConfig,
    build_network,
    compare_trajectories,
    emit_csv,
    graph_stats,
    read_csv,
    run_experiment,
    write_experiment,
)
from .meanfield import ClassState, IntegrationError, MeanFieldForm, integrate
from .degree_model import empirical_pmf
from .trajectory import Trajectory


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    return cfg.replace(
        seed=getattr(args, "seed", None),
        dt=getattr(args, "dt", None),
        replicas=getattr(args, "replicas", None),
        workers=getattr(args, "workers", None),
    )


def cmd_gen_graph(args) -> None:
    cfg = _load(args)
    seq, g = build_network(cfg)
    if args.dump_edges:
        g.write_edge_list(args.dump_edges)
    print(json.dumps(graph_stats(seq, g), indent=2))


def cmd_simulate(args) -> None:
    cfg = _load(args)
    _, g = build_network(cfg)
    rep = run_replicas(g, cfg.params, cfg.grid, cfg.seed, cfg.replicas, workers=cfg.workers)
    emit_csv(rep.mean, args.out, args.per_class)


def cmd_meanfield(args) -> None:
    cfg = _load(args)
    seq, _ = build_network(cfg)
    pmf = empirical_pmf(seq)
    init = ClassState.uniform_seed(pmf, cfg.init_frac)
    traj = integrate(init, cfg.params, MeanFieldForm(args.form), dt=cfg.dt, grid=cfg.grid)
    emit_csv(traj, args.out, args.per_class)


def cmd_analytic(args) -> None:
    cfg = _load(args)
    if cfg.nu != 0:
        raise ConfigError("nu: the analytic solutions require nu = 0")
    seq, _ = build_network(cfg)
    pmf = empirical_pmf(seq)
    init = ClassState.uniform_seed(pmf, cfg.init_frac)
    if args.closed_form:
        grid = cfg.grid
        states = [closed_form_deterministic_indegree(pmf, init, cfg.lam, t) for t in grid]
        traj = Trajectory.from_classes(
            grid, pmf.classes, np.array([s.i for s in states]), np.zeros((len(grid), len(pmf)))
        )
    else:
        ref = tuple(args.ref) if args.ref else None
        traj = solve_reference_ode(init, cfg.params, ref, dt=cfg.dt, grid=cfg.grid)
    emit_csv(traj, args.out, args.per_class)


def cmd_experiment(args) -> None:
    cfg = _load(args)
    if args.ode_init:
        cfg = cfg.replace(ode_init=args.ode_init)
    result = run_experiment(cfg, MeanFieldForm(args.form))
    write_experiment(result, args.out_dir, args.per_class)
    print(json.dumps(result.report.to_dict(), indent=2))


def cmd_compare(args) -> None:
    report = compare_trajectories(read_csv(args.a), read_csv(args.b))
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicascade",
        description="SIR cascades on directed configuration-model graphs and their mean-field limit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_out=True):
        p.add_argument("--config", required=True, help="experiment JSON file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--dt", type=float, help="RK4 step size")
        p.add_argument("--replicas", type=int, help="number of simulation replicas")
        p.add_argument("--workers", type=int, help="processes used for replicas")
        if with_out:
            p.add_argument("--out", required=True, help="output CSV path")
            p.add_argument("--per-class", action="store_true", help="add i_k_l,r_k_l columns")

    p = sub.add_parser("gen-graph", help="build the graph and print its statistics")
    common(p, with_out=False)
    p.add_argument("--dump-edges", metavar="PATH", help="write an 'N M' + 'src dst' edge list")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("simulate", help="mean simulated trajectory over replicas")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("meanfield", help="integrate the mean-field ODEs")
    common(p)
    p.add_argument("--form", choices=[f.value for f in MeanFieldForm], default="absolute")
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("analytic", help="no-recovery solutions (nu must be 0)")
    common(p)
    p.add_argument("--ref", nargs=2, type=int, metavar=("K", "L"), help="reference class")
    p.add_argument("--closed-form", action="store_true",
                   help="use the deterministic in-degree closed form instead")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("experiment", help="simulation vs ODE with report and figure")
    common(p, with_out=False)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--per-class", action="store_true")
    p.add_argument("--form", choices=[f.value for f in MeanFieldForm], default="absolute")
    p.add_argument("--ode-init", choices=["realized", "expected"])
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compare", help="compare two trajectory CSV files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out", help="report.json path (stdout if omitted)")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (IntegrationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
