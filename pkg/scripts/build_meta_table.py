#!/usr/bin/env python3
"""Build the metric-property comparison table from the synthetic scenario.

Fills the corrected-score row from simulator runs (retrained / target /
post-processed stand-ins) and, for context, renders baseline rows from
measured values supplied in a YAML file of the `meta` subcommand's format.
"""

import argparse
import json
from pathlib import Path

import yaml

from unlearn_gauge.cli import METRIC_ANCHORS
from unlearn_gauge.meta_eval import build_report, render_table, report_to_dict
from unlearn_gauge.simulate import dcue_meta_values, default_scenario, load_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=None)
    parser.add_argument("--baselines", default=None,
                        help="optional YAML with measured baseline metric values")
    parser.add_argument("--out", default=None, help="also write reports as jsonl")
    args = parser.parse_args()

    scenario = load_scenario(args.scenario) if args.scenario else default_scenario()
    reports = []

    values = dcue_meta_values(scenario)
    scale, ideal, worst = METRIC_ANCHORS["dcue"]
    reports.append(build_report("dcue", values, ideal=ideal, worst=worst, scale=scale))

    if args.baselines:
        with Path(args.baselines).open(encoding="utf-8") as fh:
            config = yaml.safe_load(fh)
        for item in config.get("metrics", []):
            name = item["name"]
            defaults = METRIC_ANCHORS.get(name, ((0.0, 1.0), 0.0, 1.0))
            reports.append(build_report(
                name,
                item.get("values", {}),
                ideal=item.get("ideal", defaults[1]),
                worst=item.get("worst", defaults[2]),
                scale=tuple(item.get("scale", defaults[0])),
            ))

    print(render_table(reports), end="")
    if args.out:
        with Path(args.out).open("w", encoding="utf-8") as fh:
            for r in reports:
                fh.write(json.dumps(report_to_dict(r)) + "\n")
        print(f"\nreports -> {args.out}")


if __name__ == "__main__":
    main()
