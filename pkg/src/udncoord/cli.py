"""Command-line interface: generate, solve, sweep, export-ilp."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, ilp, report
from .errors import CoordinationError
from .greedy import pair_best_gain
from .network import (
    SystemConfig,
    dbm_to_watts,
    generate_instance,
    load_instance,
    save_instance,
)


def _config_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    grp = parent.add_argument_group("radio configuration")
    grp.add_argument("--pmax-dbm", type=float, default=30.0,
                     help="per-pair power budget in dBm (default 30)")
    grp.add_argument("--noise-dbm-hz", type=float, default=-174.0,
                     help="noise density in dBm/Hz (default -174)")
    grp.add_argument("--alpha", type=float, default=4.0,
                     help="path-loss exponent (default 4)")
    grp.add_argument("--area-m", type=float, default=1000.0,
                     help="square area side in meters (default 1000)")
    grp.add_argument("--bandwidth-hz", type=float, default=1.0e7,
                     help="system bandwidth in Hz (default 1e7)")
    return parent


def _instance_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    grp = parent.add_argument_group("network instance")
    grp.add_argument("--instance", type=Path, default=None,
                     help="load a saved instance JSON instead of generating")
    grp.add_argument("--ans", type=int, default=None, help="number of ANs")
    grp.add_argument("--ues", type=int, default=None, help="number of UEs")
    grp.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    return parent


def _build_config(args, seed=None) -> SystemConfig:
    return SystemConfig(
        area_side=args.area_m,
        pathloss_exponent=args.alpha,
        p_max=dbm_to_watts(args.pmax_dbm),
        noise_density=dbm_to_watts(args.noise_dbm_hz),
        system_bandwidth=args.bandwidth_hz,
        rng_seed=args.seed if seed is None else seed,
    )


def _get_instance(args):
    if args.instance is not None:
        return load_instance(args.instance)
    if args.ans is None or args.ues is None:
        raise SystemExit("either --instance or both --ans and --ues are required")
    return generate_instance(args.ans, args.ues, _build_config(args))


def _resolve_single_n(args, instance) -> int:
    if args.partitions is not None:
        return args.partitions
    if args.n_policy == "intra-an-orth":
        return harness.dynamic_n_intra_an(instance, pair_best_gain(instance))
    raise SystemExit("--partitions is required (or --n-policy intra-an-orth)")


def _cmd_generate(args) -> int:
    if args.ans is None or args.ues is None:
        raise SystemExit("generate requires --ans and --ues")
    instance = generate_instance(args.ans, args.ues, _build_config(args))
    save_instance(instance, args.out)
    print(f"wrote instance ({instance.m_count} ANs, {instance.k_count} UEs) to {args.out}")
    if args.plot is not None:
        path = report.save_deployment_figure(instance, args.plot)
        print(f"wrote deployment map to {path}")
    return 0


def _cmd_solve(args) -> int:
    instance = _get_instance(args)
    if args.algorithm in ("full-reuse", "full-orth"):
        # Structural partition counts; any requested N is ignored.
        solution = harness.run_algorithm(instance, args.algorithm, 1, seed=args.seed)
    elif args.n_policy == "best-n":
        _, solution = harness.exhaustive_best_n(instance, args.algorithm,
                                                seed=args.seed)
    else:
        n_used = _resolve_single_n(args, instance)
        solution = harness.run_algorithm(instance, args.algorithm, n_used,
                                         seed=args.seed)
    n_used = solution.assignment.n_partitions
    print(f"algorithm={args.algorithm} N={n_used} "
          f"theta={solution.common_sinr:.6g} "
          f"common_rate={solution.common_rate:.6g} bps/Hz "
          f"sum_rate={solution.sum_rate:.6g} bps/Hz")
    if args.out is not None:
        Path(args.out).write_text(json.dumps(solution.to_json_dict(), indent=2,
                                             sort_keys=True) + "\n")
        print(f"wrote solution to {args.out}")
    if args.plot is not None:
        path = report.save_deployment_figure(instance, args.plot,
                                             assignment=solution.assignment)
        print(f"wrote deployment map to {path}")
    return 0


def _cmd_sweep(args) -> int:
    if args.spec is not None:
        spec = harness.ScenarioSpec.from_json_dict(json.loads(Path(args.spec).read_text()))
    else:
        if args.ans is None or args.ues is None:
            raise SystemExit("sweep requires --ans and --ues (or --spec)")
        if args.partitions is not None:
            policy, fixed_n = "fixed", args.partitions
        else:
            policy, fixed_n = args.n_policy, None
            if policy is None:
                raise SystemExit("sweep requires --partitions or --n-policy")
        spec = harness.ScenarioSpec(
            m_count=args.ans,
            k_count=args.ues,
            n_policy=policy,
            fixed_n=fixed_n,
            algorithms=tuple(args.algorithms.split(",")),
            realizations=args.realizations,
            base_seed=args.seed,
            config=_build_config(args),
        )
    records = harness.run_scenario(spec, workers=args.workers,
                                   include_timing=args.timing)
    csv_path, summary_path = harness.emit_results(records, args.out)
    print(f"wrote {len(records)} records to {csv_path}")
    print(f"wrote summary to {summary_path}")
    if args.plots:
        for path in report.render_sweep_figures(records, harness.summarize(records),
                                                Path(args.out).with_suffix("")):
            print(f"wrote figure {path}")
    return 0


def _cmd_export_ilp(args) -> int:
    instance = _get_instance(args)
    model = ilp.export_ilp(instance, args.theta0, args.partitions)
    ilp.write_mps(model, args.out)
    print(f"wrote MPS model ({model.variable_count} variables, "
          f"{model.row_count} rows) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udncoord",
        description="Joint pairing/partitioning/power coordination for dense "
                    "wireless access networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    config = _config_parent()
    inst = _instance_parent()

    gen = sub.add_parser("generate", parents=[config, inst],
                         help="generate a random network instance")
    gen.add_argument("--out", type=Path, required=True, help="instance JSON path")
    gen.add_argument("--plot", type=Path, default=None,
                     help="also render a deployment map PNG")
    gen.set_defaults(func=_cmd_generate)

    solve = sub.add_parser("solve", parents=[config, inst],
                           help="run one algorithm on one instance")
    solve.add_argument("--algorithm", required=True, choices=harness.ALGORITHMS)
    solve.add_argument("--partitions", type=int, default=None,
                       help="fixed partition count N")
    solve.add_argument("--n-policy", choices=("best-n", "intra-an-orth"),
                       default=None, help="dynamic partition-count policy")
    solve.add_argument("--out", type=Path, default=None, help="solution JSON path")
    solve.add_argument("--plot", type=Path, default=None,
                       help="render the paired deployment map PNG")
    solve.set_defaults(func=_cmd_solve)

    sweep = sub.add_parser("sweep", parents=[config, inst],
                           help="run a Monte Carlo scenario")
    sweep.add_argument("--spec", type=Path, default=None,
                       help="scenario spec JSON (overrides the flags)")
    sweep.add_argument("--algorithms", default=",".join(harness.DEFAULT_ALGORITHMS),
                       help="comma-separated algorithm ids")
    sweep.add_argument("--partitions", type=int, default=None,
                       help="fixed partition count N")
    sweep.add_argument("--n-policy", choices=("fixed", "best-n", "intra-an-orth"),
                       default=None, help="partition-count policy")
    sweep.add_argument("--realizations", type=int, default=100)
    sweep.add_argument("--out", type=Path, default=Path("results.csv"),
                       help="output CSV path (summary JSON written next to it)")
    sweep.add_argument("--workers", type=int, default=1,
                       help="parallel realization workers")
    sweep.add_argument("--timing", action="store_true",
                       help="record real wall times (breaks byte-identical output)")
    sweep.add_argument("--plots", action="store_true",
                       help="render summary figures next to the CSV")
    sweep.set_defaults(func=_cmd_sweep)

    export = sub.add_parser("export-ilp", parents=[config, inst],
                            help="write the feasibility ILP as an MPS file")
    export.add_argument("--theta0", type=float, required=True,
                        help="SINR target of the feasibility model")
    export.add_argument("--partitions", type=int, required=True)
    export.add_argument("--out", type=Path, required=True, help="MPS output path")
    export.set_defaults(func=_cmd_export_ilp)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CoordinationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
