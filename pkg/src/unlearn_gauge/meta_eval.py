"""Meta-evaluation of metrics: practicality flag, exactness, robustness.

Exactness asks how close a metric scores the retrained model to its ideal
anchor (positive) and the never-unlearned target model to its worst anchor
(negative).  Robustness asks how stable the metric stays when the evaluated
model undergoes post-processing unrelated to the forget data (further
unlearning of disjoint data, fine-tuning on new data, or both).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

# Metrics whose definition needs the retrained model as input.
REQUIRES_RETRAINED = frozenset({"tr_eval", "privleak"})

POSTPRO_KINDS = ("ul", "ft", "mix")


@dataclass(frozen=True)
class MetaReport:
    metric_name: str
    requires_retrained: bool
    exactness_plus: float | None
    exactness_minus: float | None
    robustness_ul: float | None
    robustness_ft: float | None
    robustness_mix: float | None


def _normalized_gap(a: float, b: float, scale, what: str) -> float:
    lo, hi = scale
    if not hi > lo:
        raise ValueError(f"{what}: degenerate scale [{lo}, {hi}]")
    raw = 1.0 - abs(a - b) / (hi - lo)
    if raw < 0.0:
        # |a - b| exceeding the declared range means the scale is mis-declared
        log.warning("%s: raw value %.6g below 0, clamped (check the declared scale)", what, raw)
        raw = 0.0
    return min(raw, 1.0)


def exactness(observed: float, anchor: float, scale) -> float:
    """1 - |observed - anchor| / range, clamped to [0, 1].

    Pass the retrained-model score with the ideal anchor for positive
    exactness, the target-model score with the worst anchor for negative.
    """
    return _normalized_gap(observed, anchor, scale, "exactness")


def robustness(value_post: float, value_base: float, scale) -> float:
    """1 - |post-processed score - base score| / range, clamped to [0, 1]."""
    return _normalized_gap(value_post, value_base, scale, "robustness")


def build_report(
    metric_name: str,
    values: dict,
    ideal: float,
    worst: float,
    scale,
) -> MetaReport:
    """Assemble a MetaReport from per-model-variant metric values.

    `values` maps variant names to the metric's score on that variant:
    "M_r", "M_t", "M_u", "postpro_ul", "postpro_ft", "postpro_mix".
    Missing variants leave the corresponding fields unavailable (None),
    never zero.
    """
    ex_plus = exactness(values["M_r"], ideal, scale) if "M_r" in values else None
    ex_minus = exactness(values["M_t"], worst, scale) if "M_t" in values else None

    rob = {}
    for kind in POSTPRO_KINDS:
        key = f"postpro_{kind}"
        if key in values and "M_u" in values:
            rob[kind] = robustness(values[key], values["M_u"], scale)
        else:
            rob[kind] = None

    return MetaReport(
        metric_name=metric_name,
        requires_retrained=metric_name in REQUIRES_RETRAINED,
        exactness_plus=ex_plus,
        exactness_minus=ex_minus,
        robustness_ul=rob["ul"],
        robustness_ft=rob["ft"],
        robustness_mix=rob["mix"],
    )


REPORT_COLUMNS = (
    "metric", "practical", "exactness_plus", "exactness_minus",
    "robustness_ul", "robustness_ft", "robustness_mix",
)


def _fmt(v) -> str:
    return "n/a" if v is None else f"{v:.4f}"


def render_table(reports, delimiter: str = "\t") -> str:
    """Comparison table, one row per metric, columns as in the property study."""
    lines = [delimiter.join(REPORT_COLUMNS)]
    for r in reports:
        lines.append(delimiter.join([
            r.metric_name,
            "no" if r.requires_retrained else "yes",
            _fmt(r.exactness_plus),
            _fmt(r.exactness_minus),
            _fmt(r.robustness_ul),
            _fmt(r.robustness_ft),
            _fmt(r.robustness_mix),
        ]))
    return "\n".join(lines) + "\n"


def report_to_dict(r: MetaReport) -> dict:
    return {
        "metric_name": r.metric_name,
        "requires_retrained": r.requires_retrained,
        "exactness_plus": r.exactness_plus,
        "exactness_minus": r.exactness_minus,
        "robustness_ul": r.robustness_ul,
        "robustness_ft": r.robustness_ft,
        "robustness_mix": r.robustness_mix,
    }


def report_from_dict(obj: dict) -> MetaReport:
    return MetaReport(
        metric_name=obj["metric_name"],
        requires_retrained=bool(obj["requires_retrained"]),
        exactness_plus=obj.get("exactness_plus"),
        exactness_minus=obj.get("exactness_minus"),
        robustness_ul=obj.get("robustness_ul"),
        robustness_ft=obj.get("robustness_ft"),
        robustness_mix=obj.get("robustness_mix"),
    )


def load_reports(path) -> list[MetaReport]:
    """Read MetaReport lines from a structured (jsonl) file."""
    path = Path(path)
    reports = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                reports.append(report_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad meta-report line: {exc}") from None
    return reports
