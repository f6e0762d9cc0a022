#!/usr/bin/env python3
"""Generate a demo set of score-log files from the synthetic scenario.

Writes the four logs needed by `unlearn-gauge dcue` (unlearned / open-source
model on forget / validation data) plus member/non-member logs for the
membership-attack baseline.
"""

import argparse
from pathlib import Path

from unlearn_gauge.score_log import write_score_log
from unlearn_gauge.simulate import (
    ctcs_to_score_log,
    default_scenario,
    gen_synthetic_ctcs,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="demo_logs")
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--u-mode", default="as_retrained",
                        choices=("as_retrained", "as_target", "interpolated"))
    parser.add_argument("--u-alpha", type=float, default=1.0)
    parser.add_argument("--n", type=int, default=400)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = default_scenario(seed=args.seed, n_f=args.n, n_v=args.n,
                                u_mode=args.u_mode, u_alpha=args.u_alpha)

    files = {
        "u_f.jsonl": ("M_u", "D_f"),
        "o_f.jsonl": ("M_o", "D_f"),
        "u_v.jsonl": ("M_u", "D_v"),
        "o_v.jsonl": ("M_o", "D_v"),
        "member_u.jsonl": ("M_u", "D_f"),
        "nonmember_u.jsonl": ("M_u", "D_v"),
        "member_r.jsonl": ("M_r", "D_f"),
        "nonmember_r.jsonl": ("M_r", "D_v"),
    }
    for name, (role, ds) in files.items():
        sample = gen_synthetic_ctcs(scenario, role, ds, 0)
        write_score_log(ctcs_to_score_log(sample, role, ds), out / name)
        print(f"wrote {out / name}  ({role} on {ds}, n={sample.n})")

    print()
    print("try:")
    print(f"  unlearn-gauge validate {out}/*.jsonl")
    print(f"  unlearn-gauge dcue --u-f {out}/u_f.jsonl --o-f {out}/o_f.jsonl "
          f"--u-v {out}/u_v.jsonl --o-v {out}/o_v.jsonl")


if __name__ == "__main__":
    main()
