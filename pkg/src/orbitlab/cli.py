"""Command-line interface.

Subcommands: simulate, catalog, baseline, thresholds, serve, run, score,
analyze. Gateway options come from an optional JSON config file with
ORBITLAB_BIND / ORBITLAB_RESULTS_DIR environment overrides.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .catalog import TASKS, build_catalog, save_manifest, scenario_library
from .errors import OrbitLabError
from .evaluation import (aggregate, baseline_gap_report, compute_threshold,
                         detect_mass_assumption, load_records)
from .gateway.server import GatewayConfig, serve
from .gateway.suite import FullTableAgent, UniformBaselineAgent, run_suite
from .scenario import load_scenario
from .trajectory import simulate, write_trajectory_csv


def _find_scenario(name):
    for sc in scenario_library():
        if sc.id == name:
            return sc
    path = Path(name)
    if path.exists():
        return load_scenario(path)
    raise OrbitLabError(f"no scenario named {name!r} (and no such file)")


def cmd_simulate(args):
    sc = _find_scenario(args.scenario)
    traj = simulate(sc)
    out = args.out or f"{sc.id}.csv"
    write_trajectory_csv(traj, out, unit_system=sc.unit_system)
    print(f"wrote {len(traj)} rows to {out} (+ sidecar {out}.meta.json)")


def cmd_catalog(args):
    cat = build_catalog()
    if args.validate:
        from .evaluation import score_answer
        for inst in cat.instances:
            assert score_answer(inst, (inst.ground_truth, inst.units)) or \
                inst.task.answer_kind == "boolean"
        print(f"validated {len(cat.instances)} instances")
    if args.manifest:
        save_manifest(cat, args.manifest)
        print(f"manifest written to {args.manifest}")
    if not args.manifest:
        for inst in cat.instances:
            print(f"{inst.task.id:28s} {inst.scenario_id:26s} "
                  f"thr={inst.task.threshold_pct:5.1f}% units={inst.units or '-'}")
        print(f"{len(cat.instances)} instances, {len(cat.exclusions)} exclusions")


def cmd_baseline(args):
    n_values = [int(n) for n in args.n.split(",")]
    report = baseline_gap_report(n_values, plot_path=args.plot)
    out = Path(args.out)
    if out.suffix == ".json":
        out.write_text(report.to_json() + "\n")
    else:
        out.write_text(report.to_csv())
    print(f"baseline gaps for N={n_values} written to {out}")


def cmd_thresholds(args):
    cat = build_catalog()
    derived = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for task in TASKS:
            scenarios = [cat.scenario(i.scenario_id)
                         for i in cat.select(task_id=task.id)]
            if scenarios:
                derived[task.id] = compute_threshold(task, scenarios)
    Path(args.out).write_text(json.dumps(derived, indent=2) + "\n")
    for tid, thr in derived.items():
        print(f"{tid:28s} {thr:6.2f}%")
    if args.plot:
        baseline_gap_report([100], catalog=cat, plot_path=args.plot)
        print(f"gap plot written to {args.plot}")


def cmd_serve(args):
    config = GatewayConfig.from_file(args.config, bind=args.bind,
                                     results_dir=args.results_dir)
    service = serve(config)
    print(f"gateway listening on {service.address}; results in "
          f"{config.results_dir} (Ctrl-C to stop)", flush=True)
    try:
        import threading
        threading.Event().wait()
    except KeyboardInterrupt:
        service.close()


def cmd_run(args):
    if args.agent.startswith("uniform"):
        n = int(args.agent.split("-")[1]) if "-" in args.agent else 100
        agent = UniformBaselineAgent(n)
    elif args.agent == "full-table":
        agent = FullTableAgent()
    else:
        raise OrbitLabError(f"unknown scripted agent {args.agent!r}")
    reports = run_suite(agent, task_filter=args.filter, repeats=args.repeats,
                        results_dir=args.results_dir, budget=args.budget)
    for rep in reports:
        print(rep.to_text())
        if args.out:
            Path(args.out).write_text(rep.to_json() + "\n")


def cmd_score(args):
    records = load_records(args.records)
    reports = aggregate(records)
    for rep in reports:
        print(rep.to_text())
    if args.out:
        payload = "[\n" + ",\n".join(r.to_json() for r in reports) + "\n]\n"
        Path(args.out).write_text(payload)
        print(f"report written to {args.out}")


def cmd_analyze(args):
    paths = [Path(args.transcript)]
    if paths[0].is_dir():
        paths = sorted(paths[0].glob("*.jsonl"))
    hits = 0
    for path in paths:
        found, patterns = detect_mass_assumption(path.read_text())
        if found:
            hits += 1
            print(f"{path}: mass assumption detected ({len(patterns)} patterns)")
    print(f"{hits}/{len(paths)} transcripts contain mass assumptions")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="orbitlab",
        description="two-body discovery environment and evaluation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="scenario -> trajectory table")
    p.add_argument("--scenario", required=True, help="library id or scenario JSON file")
    p.add_argument("--out", help="output CSV path (default <id>.csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("catalog", help="list or validate task instances")
    p.add_argument("--validate", action="store_true")
    p.add_argument("--manifest", help="write the catalog manifest JSON here")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("baseline", help="expert-ref-N gap reports")
    p.add_argument("--n", default="10,20,50,100", help="comma-separated N values")
    p.add_argument("--out", default="baseline_gaps.csv")
    p.add_argument("--plot", help="optional PNG path")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("thresholds", help="derive task thresholds from the gap pipeline")
    p.add_argument("--out", default="thresholds.json")
    p.add_argument("--plot", help="optional PNG path")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("serve", help="run the agent gateway")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--bind", help="host:port (overrides config)")
    p.add_argument("--results-dir", help="where transcripts and records go")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("run", help="batch-run a scripted agent over the catalog")
    p.add_argument("--agent", default="uniform-100",
                   help="uniform-N or full-table")
    p.add_argument("--filter", help="substring filter on task or scenario ids")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--results-dir", default="runs")
    p.add_argument("--out", help="write the aggregate report JSON here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("score", help="aggregate stored run records")
    p.add_argument("--records", required=True, help="records.jsonl path")
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("analyze", help="scan transcripts for mass assumptions")
    p.add_argument("--transcript", required=True, help="file or directory")
    p.set_defaults(func=cmd_analyze)

    args = parser.parse_args(argv)
    try:
        args.func(args)
    except OrbitLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
