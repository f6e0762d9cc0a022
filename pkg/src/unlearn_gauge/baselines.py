"""Existing unlearning metrics, implemented over generation / truth-ratio logs.

Each metric returns a MetricScore carrying its declared scale and the ideal /
worst anchors used by the meta-evaluation harness.  Metrics that depend on the
retrained model (tr_eval, privleak) refuse to run without explicitly
role-labeled retrained-model inputs rather than silently falling back.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .score_log import (
    DATASET_ROLES,
    FORMAT_VERSION,
    MODEL_ROLES,
    ScoreLogError,
    require_fields,
    parse_log_line,
)
from .stats_core import ks_two_sample, rouge_l_text

log = logging.getLogger(__name__)

PROMPT_KINDS = ("qa", "fill_blank", "adversarial", "prefix_continuation", "multiple_choice")

# Default anchors/scales per metric; the multiple-choice ideal of 0.25 is the
# random-chance level over 4 options and is configurable at the call sites.
RANDOM_CHANCE_4WAY = 0.25


class RetrainedModelRequiredError(ValueError):
    """Raised when a metric needs retrained-model inputs that were not given."""


@dataclass(frozen=True)
class MetricScore:
    metric_name: str
    value: float
    scale: tuple[float, float]
    ideal: float
    worst: float
    count: int = 0  # entries actually averaged (variant generation can fail)

    def __post_init__(self):
        lo, hi = self.scale
        if not (lo <= self.ideal <= hi and lo <= self.worst <= hi):
            raise ValueError(f"{self.metric_name}: anchors must lie inside the scale [{lo}, {hi}]")
        if self.metric_name != "privleak" and not (lo <= self.value <= hi):
            raise ValueError(f"{self.metric_name}: value {self.value} outside scale [{lo}, {hi}]")


@dataclass(frozen=True)
class GenEntry:
    record_id: str
    prompt_kind: str
    generated_text: str | None = None
    reference_text: str | None = None
    chosen_option: int | None = None
    correct_option: int | None = None
    heldout: bool | None = None

    def __post_init__(self):
        if self.prompt_kind not in PROMPT_KINDS:
            raise ScoreLogError(f"record {self.record_id!r}: unknown prompt_kind {self.prompt_kind!r}")
        if self.prompt_kind == "multiple_choice":
            if self.chosen_option is None or self.correct_option is None:
                raise ScoreLogError(
                    f"record {self.record_id!r}: multiple_choice entries need chosen/correct options"
                )
            if self.generated_text is not None or self.reference_text is not None:
                raise ScoreLogError(
                    f"record {self.record_id!r}: multiple_choice entries carry options, not text"
                )
        else:
            if self.generated_text is None or self.reference_text is None:
                raise ScoreLogError(
                    f"record {self.record_id!r}: {self.prompt_kind} entries need generated and reference text"
                )
            if self.chosen_option is not None or self.correct_option is not None:
                raise ScoreLogError(
                    f"record {self.record_id!r}: {self.prompt_kind} entries carry text, not options"
                )


@dataclass(frozen=True)
class GenerationLog:
    model_id: str
    model_role: str
    dataset_id: str
    dataset_role: str
    post_finetune: bool = False
    entries: list[GenEntry] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            key = (e.record_id, e.prompt_kind)
            if key in seen:
                raise ScoreLogError(f"duplicate entry for {key}")
            seen.add(key)


@dataclass(frozen=True)
class TruthRatioLog:
    model_id: str
    model_role: str
    dataset_id: str
    values: list[float]

    def __post_init__(self):
        if not self.values:
            raise ScoreLogError("truth-ratio log has no values")
        for v in self.values:
            if not math.isfinite(v):
                raise ScoreLogError(f"truth-ratio value {v} is not finite")


GEN_HEADER = ("model_id", "model_role", "dataset_id", "dataset_role", "format_version", "log_kind")
GEN_ENTRY_OPTIONAL = ("generated_text", "reference_text", "chosen_option", "correct_option", "heldout")


def load_generation_log(path) -> GenerationLog:
    path = Path(path)
    entries = []
    header = None
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            obj = parse_log_line(path, lineno, line)
            if header is None:
                require_fields(path, lineno, obj, GEN_HEADER, optional=("post_finetune",))
                if obj["log_kind"] != "generation":
                    raise ScoreLogError(f"{path}:{lineno}: not a generation log ({obj['log_kind']!r})")
                if obj["format_version"] != FORMAT_VERSION:
                    raise ScoreLogError(f"{path}:{lineno}: unsupported format_version")
                header = obj
                continue
            require_fields(path, lineno, obj, ("record_id", "prompt_kind"), GEN_ENTRY_OPTIONAL)
            try:
                entries.append(GenEntry(
                    record_id=obj["record_id"],
                    prompt_kind=obj["prompt_kind"],
                    generated_text=obj.get("generated_text"),
                    reference_text=obj.get("reference_text"),
                    chosen_option=obj.get("chosen_option"),
                    correct_option=obj.get("correct_option"),
                    heldout=obj.get("heldout"),
                ))
            except ScoreLogError as exc:
                raise ScoreLogError(f"{path}:{lineno}: {exc}") from None
    if header is None:
        raise ScoreLogError(f"{path}: empty file, expected a header line")
    return GenerationLog(
        model_id=header["model_id"],
        model_role=header["model_role"],
        dataset_id=header["dataset_id"],
        dataset_role=header["dataset_role"],
        post_finetune=bool(header.get("post_finetune", False)),
        entries=entries,
    )


def write_generation_log(gen: GenerationLog, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        header = {
            "model_id": gen.model_id,
            "model_role": gen.model_role,
            "dataset_id": gen.dataset_id,
            "dataset_role": gen.dataset_role,
            "format_version": FORMAT_VERSION,
            "log_kind": "generation",
        }
        if gen.post_finetune:
            header["post_finetune"] = True
        fh.write(json.dumps(header) + "\n")
        for e in gen.entries:
            rec = {"record_id": e.record_id, "prompt_kind": e.prompt_kind}
            for key in ("generated_text", "reference_text", "chosen_option", "correct_option", "heldout"):
                val = getattr(e, key)
                if val is not None:
                    rec[key] = val
            fh.write(json.dumps(rec) + "\n")


def load_truth_ratio_log(path) -> TruthRatioLog:
    path = Path(path)
    header = None
    values = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            obj = parse_log_line(path, lineno, line)
            if header is None:
                require_fields(path, lineno, obj, GEN_HEADER)
                if obj["log_kind"] != "truth_ratio":
                    raise ScoreLogError(f"{path}:{lineno}: not a truth-ratio log ({obj['log_kind']!r})")
                header = obj
                continue
            require_fields(path, lineno, obj, ("record_id", "value"))
            values.append(float(obj["value"]))
    if header is None:
        raise ScoreLogError(f"{path}: empty file, expected a header line")
    return TruthRatioLog(
        model_id=header["model_id"],
        model_role=header["model_role"],
        dataset_id=header["dataset_id"],
        values=values,
    )


def write_truth_ratio_log(tr: TruthRatioLog, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "model_id": tr.model_id,
            "model_role": tr.model_role,
            "dataset_id": tr.dataset_id,
            "dataset_role": "D_f",
            "format_version": FORMAT_VERSION,
            "log_kind": "truth_ratio",
        }) + "\n")
        for i, v in enumerate(tr.values):
            fh.write(json.dumps({"record_id": str(i), "value": v}) + "\n")


_TEXT_SIM_KIND = {"qa": "qa", "fb": "fill_blank", "aa": "adversarial"}


def _mean_rouge(gen: GenerationLog, prompt_kind: str, mode: str, metric_name: str) -> MetricScore:
    entries = [e for e in gen.entries if e.prompt_kind == prompt_kind]
    if not entries:
        raise ValueError(f"{metric_name}: no {prompt_kind!r} entries in log")
    scores = [rouge_l_text(e.generated_text, e.reference_text, mode=mode) for e in entries]
    return MetricScore(
        metric_name=metric_name,
        value=sum(scores) / len(scores),
        scale=(0.0, 1.0),
        ideal=0.0,
        worst=1.0,
        count=len(entries),
    )


def text_sim_metric(gen: GenerationLog, kind: str) -> MetricScore:
    """Mean Rouge-L recall of generations vs references (QA / FB / AA styles)."""
    if kind not in _TEXT_SIM_KIND:
        raise ValueError(f"text_sim_metric: kind must be one of {sorted(_TEXT_SIM_KIND)}, got {kind!r}")
    return _mean_rouge(gen, _TEXT_SIM_KIND[kind], "recall", kind)


def verb_mem(gen: GenerationLog) -> MetricScore:
    """Mean Rouge-L F1 of prefix continuations vs true continuations."""
    return _mean_rouge(gen, "prefix_continuation", "f1", "verbmem")


def know_mem(gen: GenerationLog) -> MetricScore:
    """Mean Rouge-L F1 of direct answers vs references."""
    return _mean_rouge(gen, "qa", "f1", "knowmem")


def _choice_accuracy(entries, metric_name: str, ideal: float) -> MetricScore:
    correct = sum(1 for e in entries if e.chosen_option == e.correct_option)
    return MetricScore(
        metric_name=metric_name,
        value=correct / len(entries),
        scale=(0.0, 1.0),
        ideal=ideal,
        worst=1.0,
        count=len(entries),
    )


def qa_eval_accuracy(gen: GenerationLog, ideal: float = RANDOM_CHANCE_4WAY) -> MetricScore:
    """Accuracy on multiple-choice conversions; ideal is random chance."""
    entries = [e for e in gen.entries if e.prompt_kind == "multiple_choice"]
    if not entries:
        raise ValueError("qa_eval_accuracy: no multiple_choice entries in log")
    return _choice_accuracy(entries, "qa_eval", ideal)


def prob_eval_accuracy(gen: GenerationLog, ideal: float = RANDOM_CHANCE_4WAY) -> MetricScore:
    """Accuracy of an externally fine-tuned model on the held-out half.

    The fine-tuning itself is out of scope; the log must be labeled as coming
    from a post-fine-tune model and its entries as held-out or not.
    """
    if not gen.post_finetune:
        raise ValueError("prob_eval_accuracy: log is not labeled as post-fine-tune output")
    entries = [e for e in gen.entries if e.prompt_kind == "multiple_choice" and e.heldout]
    if not entries:
        raise ValueError("prob_eval_accuracy: no held-out multiple_choice entries in log")
    return _choice_accuracy(entries, "prob_eval", ideal)


def tr_eval(tr_r: TruthRatioLog, tr_u: TruthRatioLog) -> MetricScore:
    """KS p-value between retrained and unlearned truth-ratio distributions.

    Requires the retrained model: this is exactly the practicality limitation
    the corrected-distribution score exists to avoid.
    """
    if tr_r.model_role != "M_r":
        raise RetrainedModelRequiredError(
            f"tr_eval requires truth ratios from the retrained model (role M_r), "
            f"got role {tr_r.model_role!r}"
        )
    result = ks_two_sample(tr_r.values, tr_u.values)
    return MetricScore(
        metric_name="tr_eval",
        value=result.p_value,
        scale=(0.0, 1.0),
        ideal=1.0,
        worst=0.0,
        count=len(tr_u.values),
    )


def min_k_prob(token_probs, k_percent: float) -> float:
    """Mean log-probability of the lowest k% of a sequence's token probabilities."""
    if not token_probs:
        raise ValueError("min_k_prob: empty probability list")
    if not (0.0 < k_percent <= 100.0):
        raise ValueError(f"min_k_prob: k_percent must be in (0, 100], got {k_percent}")
    for p in token_probs:
        if not (0.0 < p <= 1.0):
            raise ValueError(f"min_k_prob: probability {p} outside (0, 1]")
    k = math.ceil(k_percent / 100.0 * len(token_probs))
    lowest = sorted(token_probs)[:k]
    return sum(math.log(p) for p in lowest) / k


def privleak(auc_u: float, auc_r: float) -> MetricScore:
    """Relative AUC gap of a membership attack: (AUC_u - AUC_r) / AUC_r.

    Requires the retrained model's AUC.  The declared scale is [-1, 1] so the
    meta-harness has a finite range; values outside it are clamped with a
    diagnostic.
    """
    if auc_r == 0.0:
        raise ValueError("privleak: auc_r must be nonzero")
    value = (auc_u - auc_r) / auc_r
    if not (-1.0 <= value <= 1.0):
        log.warning("privleak: raw value %.6g clamped into [-1, 1]", value)
        value = min(max(value, -1.0), 1.0)
    return MetricScore(
        metric_name="privleak",
        value=value,
        scale=(-1.0, 1.0),
        ideal=0.0,
        worst=1.0,
    )


def mia_auc(member_logs, nonmember_logs, k_percent: float = 20.0) -> float:
    """Membership-attack AUC from score logs, scoring each entry by min-k%.

    Member entries come from the forget data, non-members from held-out data;
    the AUC is how well the min-k% score separates them.
    """
    from .stats_core import auc_roc

    member_scores = [min_k_prob(e.token_probs, k_percent) for e in member_logs.entries]
    nonmember_scores = [min_k_prob(e.token_probs, k_percent) for e in nonmember_logs.entries]
    return auc_roc(member_scores, nonmember_scores)


def metric_score_to_dict(score: MetricScore) -> dict:
    return {
        "metric_name": score.metric_name,
        "value": score.value,
        "scale": list(score.scale),
        "ideal": score.ideal,
        "worst": score.worst,
        "count": score.count,
    }
