"""Synthetic validation of the drift-correction approximation.

The simulator draws core-token confidence samples from parametric families for
the open-source, target, retrained, and unlearned model roles, then compares
the corrected score (no retrained model needed) against the direct score that
a retrained model would give.  The forget-set draw is fixed per scenario seed
(it stands for one fixed forget dataset); the validation set is redrawn every
trial, mirroring the repeated-resampling protocol.

The unlearned model is a per-sample mixture between the retrained and target
generators: mixing weight 1 behaves like a full retrain, 0 like no unlearning
at all, and intermediate weights interpolate the degree of forgetting.  The
mixture uses common random numbers across weights so a sweep is smooth.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .dcue import DcueResult, correct_statistic, dcue_score
from .score_log import CtcsSample, ScoreEntry, TokenScoreLog
from .stats_core import ks_two_sample

ROLES = ("M_o", "M_t", "M_r", "M_u")
DATASETS = ("D_f", "D_v")
U_MODES = ("as_retrained", "as_target", "interpolated")

_ROLE_CODE = {"M_o": 0, "M_t": 1, "M_r": 2, "M_u": 3}
_DS_CODE = {"D_f": 0, "D_v": 1}

# Post-processing unrelated to the forget data is modeled as a monotone
# power transform of the unlearned model's scores, applied identically on the
# forget and validation datasets (a shared distribution shift).
POSTPRO_EXPONENT = {"none": 1.0, "ul": 1.3, "ft": 0.7, "mix": 1.5}

AGREEMENT_ALPHA = 0.05
AGREEMENT_GAP = 0.1

_CLIP_LO = 1e-12


@dataclass(frozen=True)
class BetaSpec:
    """Beta(a, b) family on (0, 1]; the sole synthetic score family."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"beta parameters must be positive, got a={self.a}, b={self.b}")


def _default_distributions() -> dict:
    diffuse = BetaSpec(2.0, 5.0)          # open-source model: never saw the fine-tune pool
    finetuned = BetaSpec(3.45, 4.0)       # any fine-tuned model on unseen validation data
    return {
        "M_o": {"D_f": diffuse, "D_v": diffuse},
        "M_t": {"D_f": BetaSpec(9.0, 1.2), "D_v": finetuned},  # memorized forget data
        "M_r": {"D_f": BetaSpec(3.2, 4.2), "D_v": finetuned},  # drift only, no memorization
    }


@dataclass(frozen=True)
class SimScenario:
    seed: int = 13
    n_f: int = 400
    n_v: int = 400
    n_trials: int = 100
    u_mode: str = "as_retrained"
    u_alpha: float = 1.0
    postpro: str = "none"
    distributions: dict = field(default_factory=_default_distributions)

    def __post_init__(self):
        if self.n_f < 2 or self.n_v < 2:
            raise ValueError("sample sizes must be >= 2")
        if self.n_trials < 0:
            raise ValueError("n_trials must be >= 0")
        if self.u_mode not in U_MODES:
            raise ValueError(f"u_mode must be one of {U_MODES}, got {self.u_mode!r}")
        if not (0.0 <= self.u_alpha <= 1.0):
            raise ValueError(f"u_alpha must be in [0, 1], got {self.u_alpha}")
        if self.postpro not in POSTPRO_EXPONENT:
            raise ValueError(f"postpro must be one of {sorted(POSTPRO_EXPONENT)}, got {self.postpro!r}")
        for role in ("M_o", "M_t", "M_r"):
            for ds in DATASETS:
                if not isinstance(self.distributions.get(role, {}).get(ds), BetaSpec):
                    raise ValueError(f"scenario needs a distribution for ({role}, {ds})")

    @property
    def mix_weight(self) -> float:
        """Fraction of the unlearned model drawn from the retrained generator."""
        if self.u_mode == "as_retrained":
            return 1.0
        if self.u_mode == "as_target":
            return 0.0
        return self.u_alpha


def default_scenario(**overrides) -> SimScenario:
    return replace(SimScenario(), **overrides) if overrides else SimScenario()


def load_scenario(path) -> SimScenario:
    """Read a scenario from a plain-text (YAML) configuration file."""
    with Path(path).open(encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: scenario file must contain a mapping")
    dists = _default_distributions()
    for role, per_ds in (raw.pop("distributions", None) or {}).items():
        if role not in ("M_o", "M_t", "M_r"):
            raise ValueError(f"{path}: unknown role {role!r} in distributions")
        for ds, spec in per_ds.items():
            if ds not in DATASETS:
                raise ValueError(f"{path}: unknown dataset {ds!r} in distributions")
            family = spec.get("family", "beta")
            if family != "beta":
                raise ValueError(f"{path}: unsupported family {family!r}")
            dists[role][ds] = BetaSpec(float(spec["a"]), float(spec["b"]))
    known = {"seed", "n_f", "n_v", "n_trials", "u_mode", "u_alpha", "postpro"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"{path}: unknown scenario key(s) {sorted(unknown)}")
    return SimScenario(distributions=dists, **raw)


def save_scenario(scenario: SimScenario, path) -> None:
    doc = {
        "seed": scenario.seed,
        "n_f": scenario.n_f,
        "n_v": scenario.n_v,
        "n_trials": scenario.n_trials,
        "u_mode": scenario.u_mode,
        "u_alpha": scenario.u_alpha,
        "postpro": scenario.postpro,
        "distributions": {
            role: {ds: {"family": "beta", "a": spec.a, "b": spec.b}
                   for ds, spec in per_ds.items()}
            for role, per_ds in scenario.distributions.items()
        },
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def _trial_component(dataset: str, trial_index: int) -> int:
    # The forget set is one fixed dataset; only the validation set is resampled.
    return 0 if dataset == "D_f" else trial_index + 1


def _rng(scenario: SimScenario, role: str, dataset: str, trial_index: int):
    seq = np.random.SeedSequence([
        scenario.seed, _ROLE_CODE[role], _DS_CODE[dataset],
        _trial_component(dataset, trial_index),
    ])
    return np.random.default_rng(seq)


def _draw(spec: BetaSpec, rng, n: int) -> np.ndarray:
    return np.clip(rng.beta(spec.a, spec.b, n), _CLIP_LO, 1.0)


def gen_synthetic_ctcs(scenario: SimScenario, role: str, dataset: str, trial_index: int) -> CtcsSample:
    """Deterministic synthetic CTCS draw for (seed, role, dataset, trial)."""
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    if dataset not in DATASETS:
        raise ValueError(f"unknown dataset {dataset!r}")
    n = scenario.n_f if dataset == "D_f" else scenario.n_v
    rng = _rng(scenario, role, dataset, trial_index)
    if role == "M_u":
        weight = scenario.mix_weight
        uniforms = rng.random(n)
        retrained_vals = _draw(scenario.distributions["M_r"][dataset], rng, n)
        target_vals = _draw(scenario.distributions["M_t"][dataset], rng, n)
        values = np.where(uniforms < weight, retrained_vals, target_vals)
        tau = POSTPRO_EXPONENT[scenario.postpro]
        if tau != 1.0:
            values = np.clip(values ** tau, _CLIP_LO, 1.0)
    else:
        values = _draw(scenario.distributions[role][dataset], rng, n)
    return CtcsSample(
        model_id=f"sim:{role}",
        dataset_id=f"sim:{dataset}#{_trial_component(dataset, trial_index)}",
        values=[float(v) for v in values],
    )


def evaluate_trial(scenario: SimScenario, trial_index: int) -> DcueResult:
    """Corrected-score pipeline on one trial's four synthetic samples."""
    result = correct_statistic(
        gen_synthetic_ctcs(scenario, "M_u", "D_f", trial_index),
        gen_synthetic_ctcs(scenario, "M_o", "D_f", trial_index),
        gen_synthetic_ctcs(scenario, "M_u", "D_v", trial_index),
        gen_synthetic_ctcs(scenario, "M_o", "D_v", trial_index),
    )
    return dcue_score(result)


def compare_direct_vs_approx(scenario: SimScenario, trial_index: int) -> dict:
    """One trial's direct (retrained-model) p-value vs the corrected score."""
    r_f = gen_synthetic_ctcs(scenario, "M_r", "D_f", trial_index)
    u_f = gen_synthetic_ctcs(scenario, "M_u", "D_f", trial_index)
    p_direct = ks_two_sample(r_f.values, u_f.values).p_value
    p_approx = evaluate_trial(scenario, trial_index).r_dcue
    return {"p_direct": p_direct, "p_approx": p_approx}


def trials_agree(p_direct: float, p_approx: float,
                 alpha: float = AGREEMENT_ALPHA, gap: float = AGREEMENT_GAP) -> bool:
    """Same decision at the significance level, or close p-values outright."""
    return (p_direct < alpha) == (p_approx < alpha) or abs(p_direct - p_approx) < gap


@dataclass(frozen=True)
class ValidationResult:
    trials: int
    agreement_count: int
    pairs: list  # (trial_index, p_direct, p_approx)


def worker_count(n_tasks: int) -> int:
    """Worker cap from UNLEARN_GAUGE_THREADS (default 1)."""
    raw = os.environ.get("UNLEARN_GAUGE_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        cap = 1
    return max(1, min(cap, n_tasks)) if n_tasks else 1


def run_validation(scenario: SimScenario, alpha: float = AGREEMENT_ALPHA) -> ValidationResult:
    """Compare direct vs corrected p-values over all trials.

    Trials are independent and seeded individually, so parallel execution
    (capped by UNLEARN_GAUGE_THREADS) never changes the result.
    """
    indices = range(scenario.n_trials)
    workers = worker_count(scenario.n_trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: compare_direct_vs_approx(scenario, t), indices))
    else:
        results = [compare_direct_vs_approx(scenario, t) for t in indices]
    pairs = [(t, r["p_direct"], r["p_approx"]) for t, r in zip(indices, results)]
    agreement = sum(trials_agree(pd, pa, alpha=alpha) for _, pd, pa in pairs)
    return ValidationResult(trials=scenario.n_trials, agreement_count=agreement, pairs=pairs)


def render_trial_table(result: ValidationResult, delimiter: str = "\t") -> str:
    lines = [delimiter.join(("trial_index", "p_direct", "p_approx"))]
    for t, pd, pa in result.pairs:
        lines.append(delimiter.join((str(t), repr(pd), repr(pa))))
    return "\n".join(lines) + "\n"


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=float)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def rank_correlation(x, y) -> float:
    """Spearman rank correlation with midranks for ties."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("rank_correlation needs two equal-length arrays of size >= 2")
    rx = _midranks(x) - (x.size + 1) / 2.0
    ry = _midranks(y) - (y.size + 1) / 2.0
    denom = np.sqrt((rx * rx).sum() * (ry * ry).sum())
    if denom == 0.0:
        raise ValueError("rank_correlation undefined for constant input")
    return float((rx * ry).sum() / denom)


def alpha_sweep(scenario: SimScenario, alphas, seeds) -> list:
    """Corrected score across forgetting degrees and seeds.

    Returns (seed, alpha, r_dcue) triples, trial 0 of each derived scenario.
    """
    rows = []
    for seed in seeds:
        for a in alphas:
            sc = replace(scenario, seed=int(seed), u_mode="interpolated", u_alpha=float(a))
            rows.append((int(seed), float(a), evaluate_trial(sc, 0).r_dcue))
    return rows


def dcue_meta_values(scenario: SimScenario) -> dict:
    """Corrected-score values for the meta-evaluation variants.

    The retrained model doubles as the unlearning stand-in for the robustness
    arms (it is the cleanest possible unlearner), with post-processing applied
    on top.
    """
    values = {}
    values["M_r"] = evaluate_trial(replace(scenario, u_mode="as_retrained", postpro="none"), 0).r_dcue
    values["M_t"] = evaluate_trial(replace(scenario, u_mode="as_target", postpro="none"), 0).r_dcue
    values["M_u"] = values["M_r"]
    for kind in ("ul", "ft", "mix"):
        sc = replace(scenario, u_mode="as_retrained", postpro=kind)
        values[f"postpro_{kind}"] = evaluate_trial(sc, 0).r_dcue
    return values


def ctcs_to_score_log(sample: CtcsSample, model_role: str, dataset_role: str) -> TokenScoreLog:
    """Wrap a synthetic CTCS sample as a single-core-token-per-entry score log."""
    entries = [
        ScoreEntry(
            record_id=f"r{i:05d}",
            answer_tokens=["▁w"],
            token_probs=[v],
            core_token_indices=[0],
        )
        for i, v in enumerate(sample.values)
    ]
    return TokenScoreLog(
        model_id=sample.model_id,
        model_role=model_role,
        dataset_id=sample.dataset_id,
        dataset_role=dataset_role,
        tokenizer_id="sim:unit",
        entries=entries,
    )
