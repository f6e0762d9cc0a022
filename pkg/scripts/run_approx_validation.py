#!/usr/bin/env python3
"""Repeated-resampling check of the drift-corrected score.

For each unlearner stand-in (full retrain / no unlearning) this draws a fixed
forget-set sample and many fresh validation-set samples, then compares the
corrected p-value against the p-value computed with direct retrained-model
access.  Writes one TSV per mode and prints the agreement counts.
"""

import argparse
from pathlib import Path

from unlearn_gauge.simulate import (
    default_scenario,
    load_scenario,
    render_trial_table,
    run_validation,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=None, help="scenario YAML (defaults built in)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--out-dir", default="validation_runs")
    parser.add_argument("--plot", action="store_true",
                        help="also write a p-value overlay plot per mode (needs matplotlib)")
    args = parser.parse_args()

    base = load_scenario(args.scenario) if args.scenario else default_scenario()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    print("=" * 64)
    print("corrected-score vs direct-score agreement")
    print(f"seed={overrides.get('seed', base.seed)}  "
          f"n_f={base.n_f}  n_v={base.n_v}  "
          f"trials={overrides.get('n_trials', base.n_trials)}")
    print("=" * 64)

    import dataclasses
    for mode in ("as_retrained", "as_target"):
        scenario = dataclasses.replace(base, u_mode=mode, **overrides)
        result = run_validation(scenario)
        table_path = out_dir / f"trials_{mode}.tsv"
        table_path.write_text(render_trial_table(result), encoding="utf-8")
        print(f"{mode:<14} agreement {result.agreement_count}/{result.trials}   -> {table_path}")

        if args.plot:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt

            trials = [t for t, _, _ in result.pairs]
            plt.figure(figsize=(7, 3))
            plt.plot(trials, [pd for _, pd, _ in result.pairs], "o", ms=3, label="direct (retrained)")
            plt.plot(trials, [pa for _, _, pa in result.pairs], "x", ms=3, label="corrected")
            plt.xlabel("validation resample")
            plt.ylabel("p-value")
            plt.title(f"unlearner stand-in: {mode}")
            plt.legend()
            plot_path = out_dir / f"pvalues_{mode}.png"
            plt.savefig(plot_path, dpi=150, bbox_inches="tight")
            plt.close()
            print(f"{'':<14} plot -> {plot_path}")


if __name__ == "__main__":
    main()
