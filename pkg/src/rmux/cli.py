"""Command-line interface.

Subcommands: analytics, match, bell, percolate, reproduce. Simple commands
print CSV to stdout (or --out FILE); `reproduce <figure>` writes a bundle
of CSV data files plus a summary into --out DIR and exits nonzero when a
reference check fails.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import delay_network, matching, mux_analytics, mux_sim, percolation, streams
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    _fmt,
    load_config_file,
    run_experiment,
)


def _emit(header, rows, out_path):
    text = ",".join(header) + "\n"
    text += "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_analytics(args) -> int:
    if args.mode == "table":
        report = mux_analytics.ghz_report(args.eta, args.p1, args.p2)
        s1, s2 = report.stages
        rows = [
            ("stage1_hsps", s1.input_prob, s1.target_prob, s1.k, s1.k_up,
             s1.depth, s1.potential_mean),
            ("stage2_ghz", s2.input_prob, s2.target_prob, s2.k, s2.k_up,
             s2.depth, s2.potential_mean),
            ("combined_photons", args.eta, report.combined_prob, "",
             report.bins_per_stream, report.combined_depth,
             report.potential_photons_mean),
            ("combined_ghz", args.eta, report.combined_prob, "",
             report.bins_per_stream, report.combined_depth,
             report.potential_ghz_mean),
        ]
        _emit(["row", "initial_prob", "post_mux_prob", "k", "k_up", "depth",
               "potential_mean"], rows, args.out)
    else:
        rows = []
        for eta in args.etas:
            p1, p2, wasted, k1, k2 = mux_analytics.unused_potential(
                eta, args.ps, p_min=args.p_min)
            rows.append((args.ps, eta, wasted, k1, k2))
        _emit(["p_s", "eta", "wasted_mean", "k_up1", "k_up2"], rows, args.out)
    return 0


def _load_or_generate(path, p, bins, seed):
    if path:
        return streams.stream_from_text(Path(path).read_text())
    return streams.generate_stream(p, bins, seed)


def _cmd_match(args) -> int:
    if args.stream1 or args.stream2:
        net = delay_network.DelayNetwork(args.switches)
        s1 = _load_or_generate(args.stream1, args.p, args.bins, args.seed)
        s2 = _load_or_generate(args.stream2, args.p, args.bins, args.seed + 1)
        m, met = mux_sim.match_streams(s1, s2, net, args.strategy)
        _emit(["kind", "a", "b", "c"], matching.matching_csv_rows(m), args.out)
        sys.stderr.write(
            f"matched_fraction={met.matched_fraction:.6f} "
            f"clash_rate={met.clash_rate:.6f} "
            f"out_of_range={met.out_of_range_fraction:.6f} "
            f"mean_delay={met.mean_delay:.6f}\n")
        if args.dump_routes:
            result = delay_network.route(
                matching.pair_requests(sorted(m.pairs)), net)
            rows = delay_network.routing_trace_rows(result, net)
            _emit(["photon_id", "arrival_bin", "delay", "stage", "rail",
                   "bin_at_stage"], rows, args.dump_routes)
        return 0
    stats = mux_sim.simulate_two_stream(args.p, args.switches, args.bins,
                                        args.strategy, args.reps, args.seed)
    _emit(["strategy", "switches", "matched_fraction", "stderr", "clash_rate",
           "out_of_range", "total_weight_mean"],
          [(stats.strategy, stats.switch_count, stats.matched_fraction_mean,
            stats.matched_fraction_stderr, stats.clash_rate_mean,
            stats.out_of_range_mean, stats.total_weight_mean)], args.out)
    return 0


def _parse_budgets(spec: str):
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def _cmd_bell(args) -> int:
    budgets = _parse_budgets(args.budgets)
    schemes = ["standard", "rmux"] if args.scheme == "both" else [args.scheme]
    rows = []
    for budget in budgets:
        for scheme in schemes:
            fn = (mux_sim.simulate_bell_standard if scheme == "standard"
                  else mux_sim.simulate_bell_rmux)
            st = fn(args.p1, budget, args.bins, args.reps, args.seed)
            rows.append((st.scheme, budget, st.bells_per_bin, st.stderr,
                         st.best_split[0], st.best_split[1]))
    _emit(["scheme", "total_switches", "bells_per_bin", "stderr",
           "stage1_switches", "stage2_switches"], rows, args.out)
    return 0


def _semantics_from_args(args) -> percolation.OutcomeSemantics:
    sem = (percolation.calibrated_semantics() if args.semantics == "calibrated"
           else percolation.OutcomeSemantics())
    overrides = {}
    if args.heralded_site_kill_prob is not None:
        overrides["heralded_site_kill_prob"] = args.heralded_site_kill_prob
    if args.heralded_bond_connect_prob is not None:
        overrides["heralded_bond_connect_prob"] = args.heralded_bond_connect_prob
    if args.loss_kills_owner_site is not None:
        overrides["loss_kills_owner_site"] = args.loss_kills_owner_site == "true"
    if args.standard_loss_damages_both_ends is not None:
        overrides["standard_loss_damages_both_ends"] = (
            args.standard_loss_damages_both_ends == "true")
    return replace(sem, **overrides) if overrides else sem


def _cmd_percolate(args) -> int:
    sem = _semantics_from_args(args)
    if args.mode == "prob":
        est, err = percolation.percolation_probability(
            args.L, args.scheme, args.p_l, args.a_l, args.trials, args.seed,
            sem)
        _emit(["scheme", "L", "p_l", "a_l", "perc_prob", "stderr"],
              [(args.scheme, args.L, args.p_l, args.a_l, est, err)], args.out)
    elif args.mode == "threshold":
        thr = percolation.loss_threshold(
            args.scheme, args.target, args.a_l, args.L, args.trials,
            args.tolerance, args.seed, sem,
            equal_ancilla_loss=args.equal_ancilla_loss)
        a_col = "scan" if args.equal_ancilla_loss else args.a_l
        _emit(["scheme", "target", "a_l", "p_l_threshold"],
              [(args.scheme, args.target, a_col, thr)], args.out)
    else:
        grid = [float(x) for x in args.a_l_grid.split(",")]
        frontier = percolation.tradeoff_frontier(
            args.scheme, args.target, grid, args.L, args.trials, args.seed,
            sem, args.tolerance)
        rows = [(args.scheme, args.target, a, thr)
                for a, thr in frontier.points]
        _emit(["scheme", "target", "a_l", "p_l_threshold"], rows, args.out)
        sys.stderr.write(f"linear fit: slope={frontier.slope:.4f} "
                         f"intercept={frontier.intercept:.5f} "
                         f"max|residual|={max(abs(r) for r in frontier.residuals):.5f}\n")
    return 0


def _cmd_reproduce(args) -> int:
    params = {}
    if args.config:
        params.update(load_config_file(args.config))
    for item in args.set or []:
        if "=" not in item:
            raise SystemExit(f"--set needs key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = value
    if args.trials is not None:
        # Convenience alias: repetition count for the Monte Carlo figures,
        # lattice trials for the percolation figures.
        key = "reps" if args.figure in ("fig4", "fig6", "fig7") else "trials"
        params.setdefault(key, str(args.trials))
    config = ExperimentConfig(experiment=args.figure, parameters=params,
                              seed=args.seed, output_dir=Path(args.out))
    bundle = run_experiment(config)
    for check in bundle.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: got {check.value}, "
              f"expected {check.expected}")
    print(f"summary: {bundle.summary_path}")
    for path in bundle.csv_paths:
        print(f"data: {path}")
    if not bundle.all_passed:
        print("result: FAIL", file=sys.stderr)
        return 2
    print("result: PASS")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmux",
        description="Relative-multiplexing simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analytics", help="closed-form multiplexing accounting")
    pa.add_argument("--mode", choices=["table", "waste"], default="table")
    pa.add_argument("--eta", type=float, default=0.1)
    pa.add_argument("--p1", type=float, default=0.99)
    pa.add_argument("--p2", type=float, default=0.99)
    pa.add_argument("--ps", type=float, default=0.93)
    pa.add_argument("--p-min", type=float, default=0.8)
    pa.add_argument("--etas", type=float, nargs="+", default=[0.1, 0.01, 0.001])
    pa.add_argument("--out")
    pa.set_defaults(func=_cmd_analytics)

    pm = sub.add_parser("match", help="two-stream matching statistics")
    pm.add_argument("--p", type=float, default=0.1)
    pm.add_argument("--switches", type=int, default=4)
    pm.add_argument("--bins", type=int, default=1000)
    pm.add_argument("--strategy", choices=list(mux_sim.STRATEGIES),
                    default="realistic")
    pm.add_argument("--reps", type=int, default=100)
    pm.add_argument("--seed", type=int, default=1234)
    pm.add_argument("--stream1", help="stream fixture file (single-instance mode)")
    pm.add_argument("--stream2", help="stream fixture file (single-instance mode)")
    pm.add_argument("--dump-routes", help="write the routing trace CSV here")
    pm.add_argument("--out")
    pm.set_defaults(func=_cmd_match)

    pb = sub.add_parser("bell", help="Bell-state rate comparison")
    pb.add_argument("--scheme", choices=["standard", "rmux", "both"],
                    default="both")
    pb.add_argument("--p1", type=float, default=0.1)
    pb.add_argument("--budgets", default="5:16",
                    help="switch budgets, e.g. 5:16 or 6,8,10")
    pb.add_argument("--bins", type=int, default=10000)
    pb.add_argument("--reps", type=int, default=100)
    pb.add_argument("--seed", type=int, default=1234)
    pb.add_argument("--out")
    pb.set_defaults(func=_cmd_bell)

    pp = sub.add_parser("percolate", help="diamond-lattice percolation")
    pp.add_argument("--mode", choices=["prob", "threshold", "frontier"],
                    default="prob")
    pp.add_argument("--scheme", choices=["rmux", "standard"], default="rmux")
    pp.add_argument("--L", type=int, default=10)
    pp.add_argument("--trials", type=int, default=2000)
    pp.add_argument("--p-l", type=float, default=0.0)
    pp.add_argument("--a-l", type=float, default=0.0)
    pp.add_argument("--target", type=float, default=0.90)
    pp.add_argument("--tolerance", type=float, default=0.002)
    pp.add_argument("--a-l-grid", default="0,0.005,0.01,0.015,0.02,0.025")
    pp.add_argument("--equal-ancilla-loss", action="store_true",
                    help="scan ancilla loss jointly at the photon rate")
    pp.add_argument("--seed", type=int, default=1234)
    pp.add_argument("--semantics", choices=["default", "calibrated"],
                    default="calibrated")
    pp.add_argument("--heralded-site-kill-prob", type=float)
    pp.add_argument("--heralded-bond-connect-prob", type=float)
    pp.add_argument("--loss-kills-owner-site", choices=["true", "false"])
    pp.add_argument("--standard-loss-damages-both-ends",
                    choices=["true", "false"])
    pp.add_argument("--out")
    pp.set_defaults(func=_cmd_percolate)

    pr = sub.add_parser("reproduce", help="run a named figure/table recipe")
    pr.add_argument("figure", choices=list(EXPERIMENTS))
    pr.add_argument("--seed", type=int, default=1234)
    pr.add_argument("--trials", type=int,
                    help="repetitions (fig4/6/7) or lattice trials (fig8/9)")
    pr.add_argument("--out", default="out")
    pr.add_argument("--config", help="flat key=value parameter file")
    pr.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="parameter override (repeatable)")
    pr.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
