"""Per-example evaluators for six unlearning training objectives.

Each evaluator maps one example's likelihood bundle to the objective's value;
dataset expectations are means over bundles, computed by the caller.  Ratio
arguments inside the preference losses are read as likelihood ratios
exp(-nll_theta) / exp(-nll_ref): the source formulas write loss symbols inside
log-ratios where a likelihood is dimensionally required, and this is the
standard preference-optimization convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LikelihoodBundle:
    """Negative log-likelihoods of one example under the models a loss needs.

    nll_theta    current model on the forget answer
    nll_ref      reference (pre-unlearning target) model on the forget answer
    nll_retain   current model on a paired retain-set answer
    nll_idk      current model on the refusal ("I don't know") answer
    nll_idk_ref  reference model on the refusal answer
    """

    nll_theta: float
    nll_ref: float | None = None
    nll_retain: float | None = None
    nll_idk: float | None = None
    nll_idk_ref: float | None = None
    answer_len: int = 1
    beta: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.nll_theta < 0 or not math.isfinite(self.nll_theta):
            raise ValueError(f"nll_theta must be finite and >= 0, got {self.nll_theta}")
        if self.answer_len < 1:
            raise ValueError(f"answer_len must be >= 1, got {self.answer_len}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    def require(self, *names: str) -> None:
        for name in names:
            v = getattr(self, name)
            if v is None:
                raise ValueError(f"bundle is missing {name}, required by this loss")
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")


def _log_sigmoid(x: float) -> float:
    # numerically stable log(1 / (1 + exp(-x)))
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def ga_loss(b: LikelihoodBundle) -> float:
    """Loss on the forget example; ascent maximizes it (sign handled by caller)."""
    return b.nll_theta


def gd_loss(b: LikelihoodBundle) -> float:
    """Raise forget-set loss while holding retain-set loss down."""
    b.require("nll_retain")
    return -b.nll_theta + b.nll_retain


def idk_loss(b: LikelihoodBundle) -> float:
    """Loss on the refusal answer paired with the forget question."""
    b.require("nll_idk")
    return b.nll_idk


def dpo_loss(b: LikelihoodBundle) -> float:
    """Preference objective contrasting the forget answer against the refusal.

    log r_y = nll_ref - nll_theta and log r_idk = nll_idk_ref - nll_idk, each
    branch's likelihood ratio against the reference model.
    """
    b.require("nll_ref", "nll_idk", "nll_idk_ref")
    log_r_y = b.nll_ref - b.nll_theta
    log_r_idk = b.nll_idk_ref - b.nll_idk
    return -(1.0 / b.beta) * _log_sigmoid(b.beta * (log_r_y - log_r_idk))


def npo_loss(b: LikelihoodBundle) -> float:
    """Negative-preference objective pushing the forget-answer ratio down."""
    b.require("nll_ref")
    log_r_y = b.nll_ref - b.nll_theta
    return -(2.0 / b.beta) * _log_sigmoid(-b.beta * log_r_y)


def simnpo_loss(b: LikelihoodBundle) -> float:
    """Length-normalized negative-preference objective with a margin threshold."""
    b.require("nll_ref")
    log_r_y = b.nll_ref - b.nll_theta
    return -(2.0 / b.beta) * _log_sigmoid(-(b.beta / b.answer_len) * log_r_y - b.gamma)


LOSS_FUNCTIONS = {
    "ga": ga_loss,
    "gd": gd_loss,
    "idk": idk_loss,
    "dpo": dpo_loss,
    "npo": npo_loss,
    "simnpo": simnpo_loss,
}
