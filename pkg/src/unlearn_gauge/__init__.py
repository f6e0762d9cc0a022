"""Statistical evaluation of machine-unlearning claims over token-confidence score logs."""

from .dcue import DcueResult, correct_statistic, dcue_score, delta_s, evaluate_dcue
from .score_log import (
    CtcsSample,
    QARecord,
    ScoreEntry,
    ScoreLogError,
    TokenScoreLog,
    align_core_tokens,
    extract_ctcs,
    load_qa_dataset,
    load_score_log,
    write_score_log,
)
from .stats_core import KSResult, auc_roc, ecdf_eval, ks_pvalue, ks_statistic, ks_two_sample, rouge_l

__all__ = [
    "CtcsSample",
    "DcueResult",
    "KSResult",
    "QARecord",
    "ScoreEntry",
    "ScoreLogError",
    "TokenScoreLog",
    "align_core_tokens",
    "auc_roc",
    "correct_statistic",
    "dcue_score",
    "delta_s",
    "ecdf_eval",
    "evaluate_dcue",
    "extract_ctcs",
    "ks_pvalue",
    "ks_statistic",
    "ks_two_sample",
    "load_qa_dataset",
    "load_score_log",
    "rouge_l",
    "write_score_log",
]
