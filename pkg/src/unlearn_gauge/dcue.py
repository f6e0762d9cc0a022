"""Distribution-corrected unlearning evaluation over core-token confidence samples.

The evaluated quantity is the KS gap between the open-source model and the
unlearned model on the forget data, minus the share of that gap explained by
ordinary fine-tuning drift (estimated on held-out validation data).  The
corrected gap is converted to a p-value: high means the unlearned model's
confidence distribution on the forget data is consistent with never having
seen it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .score_log import CtcsSample, TokenScoreLog, extract_ctcs
from .stats_core import ks_pvalue, ks_statistic

# The corrected statistic is scored as a two-sample test with both sample
# sizes equal to the forget-set CTCS size, i.e. adjusted = s_corr *
# sqrt(n_eff * EFFECTIVE_SIZE_FACTOR).  A one-sample convention would use
# factor 1.0; this is the single switch for that choice.
EFFECTIVE_SIZE_FACTOR = 0.5


@dataclass(frozen=True)
class DcueResult:
    s_ouf: float       # KS statistic, open-source vs unlearned on forget data
    s_ouv: float       # KS statistic, open-source vs unlearned on validation data
    delta_s: float     # estimated fine-tuning drift
    s_corr: float      # corrected statistic
    n_eff: int         # forget-set CTCS sample size
    r_dcue: float | None = None  # final p-value score

    def __post_init__(self):
        if not math.isclose(self.delta_s, min(self.s_ouv, self.s_ouf)):
            raise ValueError("DcueResult: delta_s must equal min(s_ouv, s_ouf)")
        if not (0.0 <= self.s_corr <= self.s_ouf + 1e-15):
            raise ValueError("DcueResult: s_corr must lie in [0, s_ouf]")


def delta_s(s_ouv: float, s_ouf: float) -> float:
    """Fine-tuning drift estimate: the smaller of the two KS gaps.

    The validation-set gap is the natural drift estimate; when the forget-set
    gap is already smaller, correcting by the full drift would overshoot, so
    the correction is capped at the forget-set gap itself.
    """
    for name, v in (("s_ouv", s_ouv), ("s_ouf", s_ouf)):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"delta_s: {name} must be in [0, 1], got {v}")
    return min(s_ouv, s_ouf)


def correct_statistic(
    ctcs_u_f: CtcsSample,
    ctcs_o_f: CtcsSample,
    ctcs_u_v: CtcsSample,
    ctcs_o_v: CtcsSample,
) -> DcueResult:
    """Compute both KS gaps and the drift-corrected statistic (r_dcue unset)."""
    if ctcs_u_f.dataset_id != ctcs_o_f.dataset_id:
        raise ValueError(
            f"correct_statistic: forget-set dataset_id mismatch "
            f"({ctcs_u_f.dataset_id!r} vs {ctcs_o_f.dataset_id!r})"
        )
    if ctcs_u_v.dataset_id != ctcs_o_v.dataset_id:
        raise ValueError(
            f"correct_statistic: validation-set dataset_id mismatch "
            f"({ctcs_u_v.dataset_id!r} vs {ctcs_o_v.dataset_id!r})"
        )
    s_ouf = ks_statistic(ctcs_o_f.values, ctcs_u_f.values)
    s_ouv = ks_statistic(ctcs_o_v.values, ctcs_u_v.values)
    d = delta_s(s_ouv, s_ouf)
    return DcueResult(
        s_ouf=s_ouf,
        s_ouv=s_ouv,
        delta_s=d,
        s_corr=s_ouf - d,
        n_eff=ctcs_u_f.n,
    )


def dcue_score(result: DcueResult) -> DcueResult:
    """Fill in r_dcue: the KS p-value of the corrected statistic at n_eff."""
    if not (0.0 <= result.s_corr <= 1.0):
        raise ValueError(f"dcue_score: s_corr must be in [0, 1], got {result.s_corr}")
    if result.n_eff < 1:
        raise ValueError(f"dcue_score: n_eff must be >= 1, got {result.n_eff}")
    adjusted = result.s_corr * math.sqrt(result.n_eff * EFFECTIVE_SIZE_FACTOR)
    return replace(result, r_dcue=ks_pvalue(adjusted))


def evaluate_dcue(
    log_u_f: TokenScoreLog,
    log_o_f: TokenScoreLog,
    log_u_v: TokenScoreLog,
    log_o_v: TokenScoreLog,
) -> DcueResult:
    """Full pipeline over four score logs: extract CTCS, correct, score."""
    if log_u_f.model_id != log_u_v.model_id:
        raise ValueError(
            f"evaluate_dcue: unlearned-model logs disagree on model_id "
            f"({log_u_f.model_id!r} vs {log_u_v.model_id!r})"
        )
    if log_o_f.model_id != log_o_v.model_id:
        raise ValueError(
            f"evaluate_dcue: open-source-model logs disagree on model_id "
            f"({log_o_f.model_id!r} vs {log_o_v.model_id!r})"
        )
    if log_u_f.dataset_id != log_o_f.dataset_id or log_u_v.dataset_id != log_o_v.dataset_id:
        raise ValueError("evaluate_dcue: model pairs must be scored on the same datasets")
    if log_u_f.dataset_id == log_u_v.dataset_id:
        raise ValueError("evaluate_dcue: forget and validation logs share a dataset_id")
    result = correct_statistic(
        extract_ctcs(log_u_f),
        extract_ctcs(log_o_f),
        extract_ctcs(log_u_v),
        extract_ctcs(log_o_v),
    )
    return dcue_score(result)


def dcue_result_to_dict(result: DcueResult) -> dict:
    """Structured one-line form consumed by the report tooling."""
    return {
        "s_ouf": result.s_ouf,
        "s_ouv": result.s_ouv,
        "delta_s": result.delta_s,
        "s_corr": result.s_corr,
        "n_eff": result.n_eff,
        "r_dcue": result.r_dcue,
    }
