"""Command line: run, sweep, report, attack-list."""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .report import build_report, report_json, report_text
from .runner import attack_table, read_records, run_scenario, write_records
from .scenario import Scenario, load_scenario


def _execute(scenario: Scenario, out: Path, transcripts: bool) -> str:
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario.json").write_text(scenario.dumps())
    records = run_scenario(scenario, out / "transcripts" if transcripts else None)
    write_records(records, out)
    return _write_report(out, records, scenario)


def _write_report(out: Path, records, scenario: Scenario) -> str:
    report = build_report(records, scenario)
    text = report_text(report)
    (out / "report.json").write_text(report_json(report))
    (out / "report.txt").write_text(text)
    return text


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario, seed=args.seed, trials=args.trials)
    if scenario.sweep:
        print("scenario has a sweep grid; use the sweep verb", file=sys.stderr)
        return 2
    sys.stdout.write(_execute(scenario, Path(args.out), args.transcripts))
    return 0


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario, seed=args.seed, trials=args.trials)
    if args.n:
        scenario = replace(scenario, sweep={**scenario.sweep, "n": [int(v) for v in args.n.split(",")]})
    if not scenario.sweep:
        print("scenario has no sweep grid (add \"sweep\" or pass --n)", file=sys.stderr)
        return 2
    sys.stdout.write(_execute(scenario, Path(args.out), args.transcripts))
    return 0


def cmd_report(args) -> int:
    out = Path(args.out)
    scenario = load_scenario(Path(args.scenario) if args.scenario else out / "scenario.json")
    sys.stdout.write(_write_report(out, read_records(out), scenario))
    return 0


def cmd_attack_list(args) -> int:
    rows = attack_table()
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmpc", description="Simulate server-mediated MPC protocols.")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, scenario_required=True):
        p.add_argument("--scenario", required=scenario_required, help="scenario JSON file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--trials", type=int, help="override the trial count")

    for name, fn, help_text in (("run", cmd_run, "run one scenario"),
                                ("sweep", cmd_sweep, "run every point of a scenario's sweep grid")):
        p = verbs.add_parser(name, help=help_text)
        add_common(p)
        p.add_argument("--transcripts", action="store_true", help="also write one transcript file per trial")
        if name == "sweep":
            p.add_argument("--n", help="comma-separated n values (adds to the grid)")
        p.set_defaults(fn=fn)
    p = verbs.add_parser("report", help="rebuild the report from record files")
    add_common(p, scenario_required=False)
    p.set_defaults(fn=cmd_report)
    p = verbs.add_parser("attack-list", help="list the shipped attack strategies")
    p.set_defaults(fn=cmd_attack_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
