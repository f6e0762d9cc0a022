"""Command-line front end.

Outputs are line-oriented and machine-parseable first (tab-separated or JSON
lines); every run with a fixed --seed is byte-identical.  Subcommands:

  validate   check score-log / generation / truth-ratio / dataset files
  dcue       corrected unlearning score from four score logs
  baseline   one of the existing metrics over generation or score logs
  meta       exactness / robustness reports from measured metric values
  report     render meta reports as a comparison table
  simulate   synthetic validation of the drift-correction approximation
  losses     evaluate unlearning training objectives on likelihood bundles
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import yaml

from . import baselines, meta_eval, simulate
from .dcue import dcue_result_to_dict, evaluate_dcue
from .losses import LOSS_FUNCTIONS, LikelihoodBundle
from .score_log import ScoreLogError, load_qa_dataset, load_score_log

# Anchor/scale defaults per metric name, for the meta harness.
METRIC_ANCHORS = {
    "qa": ((0.0, 1.0), 0.0, 1.0),
    "fb": ((0.0, 1.0), 0.0, 1.0),
    "aa": ((0.0, 1.0), 0.0, 1.0),
    "verbmem": ((0.0, 1.0), 0.0, 1.0),
    "knowmem": ((0.0, 1.0), 0.0, 1.0),
    "qa_eval": ((0.0, 1.0), baselines.RANDOM_CHANCE_4WAY, 1.0),
    "prob_eval": ((0.0, 1.0), baselines.RANDOM_CHANCE_4WAY, 1.0),
    "tr_eval": ((0.0, 1.0), 1.0, 0.0),
    "privleak": ((-1.0, 1.0), 0.0, 1.0),
    "dcue": ((0.0, 1.0), 1.0, 0.0),
}


def _emit(line: str, out_fh) -> None:
    out_fh.write(line + "\n")


def _detect_kind(path: Path) -> str:
    with path.open(encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line:
                break
        else:
            raise ScoreLogError(f"{path}: empty file")
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ScoreLogError(f"{path}:1: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ScoreLogError(f"{path}:1: expected a JSON object")
    if "format_version" in obj:
        if "tokenizer_id" in obj:
            return "score"
        kind = obj.get("log_kind")
        if kind in ("generation", "truth_ratio"):
            return kind
        raise ScoreLogError(f"{path}:1: unrecognized log header")
    if "question" in obj and "id" in obj:
        return "dataset"
    raise ScoreLogError(f"{path}:1: unrecognized file kind")


def cmd_validate(args, out_fh) -> int:
    failures = 0
    for name in args.paths:
        path = Path(name)
        try:
            kind = _detect_kind(path)
            if kind == "score":
                log = load_score_log(path)
                detail = f"score log, {len(log.entries)} entries"
            elif kind == "generation":
                gen = baselines.load_generation_log(path)
                detail = f"generation log, {len(gen.entries)} entries"
            elif kind == "truth_ratio":
                tr = baselines.load_truth_ratio_log(path)
                detail = f"truth-ratio log, {len(tr.values)} values"
            else:
                records = load_qa_dataset(path)
                detail = f"dataset, {len(records)} records"
        except (ScoreLogError, OSError) as exc:
            _emit(f"{path}\tERROR\t{exc}", out_fh)
            failures += 1
            continue
        _emit(f"{path}\tOK\t{detail}", out_fh)
    return 1 if failures else 0


def cmd_dcue(args, out_fh) -> int:
    result = evaluate_dcue(
        load_score_log(args.u_f),
        load_score_log(args.o_f),
        load_score_log(args.u_v),
        load_score_log(args.o_v),
    )
    payload = dcue_result_to_dict(result)
    if args.format == "jsonl":
        _emit(json.dumps(payload), out_fh)
    else:
        keys = list(payload)
        _emit("\t".join(keys), out_fh)
        _emit("\t".join(repr(payload[k]) for k in keys), out_fh)
    return 0


def _print_score(score, args, out_fh) -> None:
    payload = baselines.metric_score_to_dict(score)
    if args.format == "jsonl":
        _emit(json.dumps(payload), out_fh)
    else:
        keys = list(payload)
        _emit("\t".join(keys), out_fh)
        _emit("\t".join(json.dumps(payload[k]) for k in keys), out_fh)


def cmd_baseline(args, out_fh) -> int:
    metric = args.metric
    if metric in ("qa", "fb", "aa", "verbmem", "knowmem", "qa_eval", "prob_eval"):
        if not args.gen:
            raise ValueError(f"baseline {metric} needs --gen GENERATION_LOG")
        gen = baselines.load_generation_log(args.gen)
        if metric in ("qa", "fb", "aa"):
            score = baselines.text_sim_metric(gen, metric)
        elif metric == "verbmem":
            score = baselines.verb_mem(gen)
        elif metric == "knowmem":
            score = baselines.know_mem(gen)
        elif metric == "qa_eval":
            score = baselines.qa_eval_accuracy(gen)
        else:
            score = baselines.prob_eval_accuracy(gen)
    elif metric == "tr_eval":
        if not args.tr_r:
            raise baselines.RetrainedModelRequiredError(
                "tr_eval requires --tr-r: truth ratios from the retrained model"
            )
        if not args.tr_u:
            raise ValueError("tr_eval needs --tr-u TRUTH_RATIO_LOG")
        score = baselines.tr_eval(
            baselines.load_truth_ratio_log(args.tr_r),
            baselines.load_truth_ratio_log(args.tr_u),
        )
    elif metric == "privleak":
        if args.auc_u is not None or args.auc_r is not None:
            if args.auc_r is None:
                raise baselines.RetrainedModelRequiredError(
                    "privleak requires --auc-r: the retrained model's attack AUC"
                )
            if args.auc_u is None:
                raise ValueError("privleak needs --auc-u")
            score = baselines.privleak(args.auc_u, args.auc_r)
        else:
            if not (args.member_r and args.nonmember_r):
                raise baselines.RetrainedModelRequiredError(
                    "privleak requires --member-r/--nonmember-r: score logs of the retrained model"
                )
            if not (args.member_u and args.nonmember_u):
                raise ValueError("privleak needs --member-u and --nonmember-u score logs")
            auc_u = baselines.mia_auc(
                load_score_log(args.member_u), load_score_log(args.nonmember_u), args.k_percent
            )
            auc_r = baselines.mia_auc(
                load_score_log(args.member_r), load_score_log(args.nonmember_r), args.k_percent
            )
            score = baselines.privleak(auc_u, auc_r)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    _print_score(score, args, out_fh)
    return 0


def cmd_meta(args, out_fh) -> int:
    with Path(args.config).open(encoding="utf-8") as fh:
        config = yaml.safe_load(fh)
    if not isinstance(config, dict) or "metrics" not in config:
        raise ValueError(f"{args.config}: expected a mapping with a 'metrics' list")
    reports = []
    for item in config["metrics"]:
        name = item["name"]
        defaults = METRIC_ANCHORS.get(name)
        scale = tuple(item.get("scale", defaults[0] if defaults else (0.0, 1.0)))
        ideal = item.get("ideal", defaults[1] if defaults else 0.0)
        worst = item.get("worst", defaults[2] if defaults else 1.0)
        reports.append(meta_eval.build_report(name, item.get("values", {}), ideal, worst, scale))
    if args.format == "jsonl":
        for r in reports:
            _emit(json.dumps(meta_eval.report_to_dict(r)), out_fh)
    else:
        out_fh.write(meta_eval.render_table(reports))
    return 0


def cmd_report(args, out_fh) -> int:
    reports = []
    for path in args.reports:
        reports.extend(meta_eval.load_reports(path))
    if args.format == "jsonl":
        for r in reports:
            _emit(json.dumps(meta_eval.report_to_dict(r)), out_fh)
    else:
        out_fh.write(meta_eval.render_table(reports))
    return 0


def cmd_simulate(args, out_fh) -> int:
    scenario = simulate.load_scenario(args.scenario) if args.scenario else simulate.default_scenario()
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    result = simulate.run_validation(scenario, alpha=args.alpha)
    table = simulate.render_trial_table(result)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    else:
        out_fh.write(table)
    if args.format == "jsonl":
        _emit(json.dumps({"trials": result.trials, "agreement": result.agreement_count}), out_fh)
    else:
        _emit(f"agreement\t{result.agreement_count}/{result.trials}", out_fh)
    return 0


_BUNDLE_KEYS = ("nll_theta", "nll_ref", "nll_retain", "nll_idk", "nll_idk_ref",
                "answer_len", "beta", "gamma")


def _bundle_from_dict(obj: dict) -> LikelihoodBundle:
    unknown = set(obj) - set(_BUNDLE_KEYS)
    if unknown:
        raise ValueError(f"unknown bundle field(s) {sorted(unknown)}")
    return LikelihoodBundle(**obj)


def cmd_losses(args, out_fh) -> int:
    names = list(LOSS_FUNCTIONS) if args.loss == "all" else [args.loss]
    if args.bundles:
        bundles = []
        with Path(args.bundles).open(encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    bundles.append(_bundle_from_dict(json.loads(line)))
                except (json.JSONDecodeError, TypeError, ValueError) as exc:
                    raise ValueError(f"{args.bundles}:{lineno}: {exc}") from None
        if not bundles:
            raise ValueError(f"{args.bundles}: no bundles")
    else:
        if args.nll_theta is None:
            raise ValueError("losses needs --bundles FILE or --nll-theta (plus optional fields)")
        bundles = [LikelihoodBundle(
            nll_theta=args.nll_theta,
            nll_ref=args.nll_ref,
            nll_retain=args.nll_retain,
            nll_idk=args.nll_idk,
            nll_idk_ref=args.nll_idk_ref,
            answer_len=args.answer_len,
            beta=args.beta,
            gamma=args.gamma,
        )]
    for name in names:
        fn = LOSS_FUNCTIONS[name]
        mean = sum(fn(b) for b in bundles) / len(bundles)
        if args.format == "jsonl":
            _emit(json.dumps({"loss": name, "value": mean, "count": len(bundles)}), out_fh)
        else:
            _emit(f"{name}\t{mean!r}", out_fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unlearn-gauge",
                                     description="Statistical evaluation of machine-unlearning claims")
    parser.add_argument("--format", choices=("table", "jsonl"), default="table")
    parser.add_argument("--out", default=None, help="write primary output to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate log / dataset files")
    p.add_argument("paths", nargs="+")

    p = sub.add_parser("dcue", help="corrected unlearning score from four score logs")
    p.add_argument("--u-f", required=True, help="unlearned model on forget data")
    p.add_argument("--o-f", required=True, help="open-source model on forget data")
    p.add_argument("--u-v", required=True, help="unlearned model on validation data")
    p.add_argument("--o-v", required=True, help="open-source model on validation data")

    p = sub.add_parser("baseline", help="run one of the existing metrics")
    p.add_argument("metric", choices=("qa", "fb", "aa", "verbmem", "knowmem",
                                      "qa_eval", "prob_eval", "tr_eval", "privleak"))
    p.add_argument("--gen", help="generation log")
    p.add_argument("--tr-r", help="truth-ratio log of the retrained model")
    p.add_argument("--tr-u", help="truth-ratio log of the unlearned model")
    p.add_argument("--member-u", help="score log: unlearned model on forget data")
    p.add_argument("--nonmember-u", help="score log: unlearned model on held-out data")
    p.add_argument("--member-r", help="score log: retrained model on forget data")
    p.add_argument("--nonmember-r", help="score log: retrained model on held-out data")
    p.add_argument("--auc-u", type=float, default=None)
    p.add_argument("--auc-r", type=float, default=None)
    p.add_argument("--k-percent", type=float, default=20.0)

    p = sub.add_parser("meta", help="exactness / robustness reports from metric values")
    p.add_argument("--config", required=True, help="YAML file of per-metric values")

    p = sub.add_parser("report", help="render meta reports as a comparison table")
    p.add_argument("reports", nargs="+", help="meta-report jsonl files")

    p = sub.add_parser("simulate", help="validate the drift-correction approximation")
    p.add_argument("--scenario", default=None, help="scenario YAML (defaults built in)")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("losses", help="evaluate unlearning objectives on likelihood bundles")
    p.add_argument("--loss", choices=tuple(LOSS_FUNCTIONS) + ("all",), default="all")
    p.add_argument("--bundles", help="jsonl file of likelihood bundles")
    p.add_argument("--nll-theta", type=float, default=None)
    p.add_argument("--nll-ref", type=float, default=None)
    p.add_argument("--nll-retain", type=float, default=None)
    p.add_argument("--nll-idk", type=float, default=None)
    p.add_argument("--nll-idk-ref", type=float, default=None)
    p.add_argument("--answer-len", type=int, default=1)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)

    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "dcue": cmd_dcue,
    "baseline": cmd_baseline,
    "meta": cmd_meta,
    "report": cmd_report,
    "simulate": cmd_simulate,
    "losses": cmd_losses,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    use_file = args.out and args.command != "simulate"  # simulate writes its table itself
    try:
        if use_file:
            with Path(args.out).open("w", encoding="utf-8") as fh:
                return _COMMANDS[args.command](args, fh)
        return _COMMANDS[args.command](args, sys.stdout)
    except (ScoreLogError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
