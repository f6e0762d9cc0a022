"""Score-log data model and line-delimited file format.

A score log stores, for one (model, dataset) pair, the per-token probabilities
a model assigned to each ground-truth answer token, plus the positions of the
core tokens.  This is the only interchange format between score producers
(model adapters) and the evaluation engine: the engine never touches a model.

File layout (one JSON object per line):
  header:  model_id, model_role, dataset_id, dataset_role, tokenizer_id,
           format_version ("1")
  entries: record_id, answer_tokens, token_probs, core_token_indices
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"
MODEL_ROLES = ("M_o", "M_t", "M_u", "M_r", "other")
DATASET_ROLES = ("D_f", "D_v", "D_r", "D_u", "holdout")

HEADER_FIELDS = ("model_id", "model_role", "dataset_id", "dataset_role",
                 "tokenizer_id", "format_version")
ENTRY_FIELDS = ("record_id", "answer_tokens", "token_probs", "core_token_indices")

# Leading sub-word markers emitted by common tokenizers for word-initial tokens.
WORD_MARKERS = ("▁", "Ġ", " ")  # "▁", "Ġ", literal space


class ScoreLogError(ValueError):
    """Malformed or invariant-violating score-log / dataset content."""


@dataclass(frozen=True)
class QARecord:
    id: str
    question: str
    answer: str
    core_words: list[str]
    fill_blank: str | None = None
    choices: list[str] | None = None
    correct_choice: int | None = None
    adversarial_question: str | None = None
    adversarial_type: str | None = None

    def __post_init__(self):
        if self.choices is not None or self.correct_choice is not None:
            if self.choices is None or len(self.choices) != 4:
                raise ScoreLogError(f"record {self.id!r}: multiple-choice block needs exactly 4 options")
            if self.correct_choice not in (1, 2, 3, 4):
                raise ScoreLogError(f"record {self.id!r}: correct_choice must be in 1..4, got {self.correct_choice}")


@dataclass(frozen=True)
class ScoreEntry:
    record_id: str
    answer_tokens: list[str]
    token_probs: list[float]
    core_token_indices: list[int]

    def __post_init__(self):
        rid = self.record_id
        if len(self.answer_tokens) != len(self.token_probs):
            raise ScoreLogError(
                f"record {rid!r}: field token_probs has {len(self.token_probs)} values "
                f"for {len(self.answer_tokens)} tokens"
            )
        for p in self.token_probs:
            if not (0.0 < p <= 1.0):
                raise ScoreLogError(f"record {rid!r}: field token_probs value {p} outside (0, 1]")
        prev = -1
        for idx in self.core_token_indices:
            if not isinstance(idx, int) or not (0 <= idx < len(self.answer_tokens)):
                raise ScoreLogError(
                    f"record {rid!r}: field core_token_indices value {idx} outside "
                    f"[0, {len(self.answer_tokens)})"
                )
            if idx <= prev:
                raise ScoreLogError(f"record {rid!r}: field core_token_indices not strictly increasing")
            prev = idx


@dataclass(frozen=True)
class TokenScoreLog:
    model_id: str
    model_role: str
    dataset_id: str
    dataset_role: str
    tokenizer_id: str
    entries: list[ScoreEntry] = field(default_factory=list)

    def __post_init__(self):
        if self.model_role not in MODEL_ROLES:
            raise ScoreLogError(f"unknown model_role {self.model_role!r}, expected one of {MODEL_ROLES}")
        if self.dataset_role not in DATASET_ROLES:
            raise ScoreLogError(f"unknown dataset_role {self.dataset_role!r}, expected one of {DATASET_ROLES}")
        seen = set()
        for e in self.entries:
            if e.record_id in seen:
                raise ScoreLogError(f"duplicate record_id {e.record_id!r}")
            seen.add(e.record_id)


@dataclass(frozen=True)
class CtcsSample:
    """Flat core-token confidence sample for one (model, dataset) pair."""

    model_id: str
    dataset_id: str
    values: list[float]

    @property
    def n(self) -> int:
        return len(self.values)


def parse_log_line(path, lineno: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ScoreLogError(f"{path}:{lineno}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ScoreLogError(f"{path}:{lineno}: expected a JSON object")
    return obj


def require_fields(path, lineno: int, obj: dict, required, optional=()) -> None:
    missing = [k for k in required if k not in obj]
    extra = [k for k in obj if k not in required and k not in optional]
    if missing:
        raise ScoreLogError(f"{path}:{lineno}: missing field(s) {missing}")
    if extra:
        raise ScoreLogError(f"{path}:{lineno}: unexpected field(s) {extra}")


def load_score_log(path) -> TokenScoreLog:
    """Load and validate a score-log file; errors carry line numbers."""
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
                require_fields(path, lineno, obj, HEADER_FIELDS)
                if obj["format_version"] != FORMAT_VERSION:
                    raise ScoreLogError(
                        f"{path}:{lineno}: unsupported format_version {obj['format_version']!r}"
                    )
                header = obj
                continue
            require_fields(path, lineno, obj, ENTRY_FIELDS)
            try:
                entries.append(ScoreEntry(
                    record_id=obj["record_id"],
                    answer_tokens=list(obj["answer_tokens"]),
                    token_probs=[float(p) for p in obj["token_probs"]],
                    core_token_indices=list(obj["core_token_indices"]),
                ))
            except ScoreLogError as exc:
                raise ScoreLogError(f"{path}:{lineno}: {exc}") from None
    if header is None:
        raise ScoreLogError(f"{path}: empty file, expected a header line")
    try:
        return TokenScoreLog(
            model_id=header["model_id"],
            model_role=header["model_role"],
            dataset_id=header["dataset_id"],
            dataset_role=header["dataset_role"],
            tokenizer_id=header["tokenizer_id"],
            entries=entries,
        )
    except ScoreLogError as exc:
        raise ScoreLogError(f"{path}: {exc}") from None


def write_score_log(log_obj: TokenScoreLog, path) -> None:
    """Write a score log; load_score_log(write_score_log(x)) == x bit-exactly."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "model_id": log_obj.model_id,
            "model_role": log_obj.model_role,
            "dataset_id": log_obj.dataset_id,
            "dataset_role": log_obj.dataset_role,
            "tokenizer_id": log_obj.tokenizer_id,
            "format_version": FORMAT_VERSION,
        }) + "\n")
        for e in log_obj.entries:
            fh.write(json.dumps({
                "record_id": e.record_id,
                "answer_tokens": e.answer_tokens,
                "token_probs": e.token_probs,
                "core_token_indices": e.core_token_indices,
            }) + "\n")


QA_REQUIRED = ("id", "question", "answer", "core_words")
QA_OPTIONAL = ("fill_blank", "choices", "correct_choice", "adversarial_question", "adversarial_type")


def load_qa_dataset(path) -> list[QARecord]:
    """Load a line-delimited QA dataset file (no header line)."""
    path = Path(path)
    records = []
    seen = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            obj = parse_log_line(path, lineno, line)
            require_fields(path, lineno, obj, QA_REQUIRED, QA_OPTIONAL)
            try:
                rec = QARecord(
                    id=obj["id"],
                    question=obj["question"],
                    answer=obj["answer"],
                    core_words=list(obj["core_words"]),
                    fill_blank=obj.get("fill_blank"),
                    choices=list(obj["choices"]) if obj.get("choices") is not None else None,
                    correct_choice=obj.get("correct_choice"),
                    adversarial_question=obj.get("adversarial_question"),
                    adversarial_type=obj.get("adversarial_type"),
                )
            except ScoreLogError as exc:
                raise ScoreLogError(f"{path}:{lineno}: {exc}") from None
            if rec.id in seen:
                raise ScoreLogError(f"{path}:{lineno}: duplicate record id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    return records


def _strip_marker(token: str) -> str:
    for marker in WORD_MARKERS:
        if token.startswith(marker):
            return token[len(marker):]
    return token


def _is_word_initial(token: str, position: int) -> bool:
    return position == 0 or token.startswith(WORD_MARKERS)


def align_core_tokens(answer_tokens: list[str], core_words: list[str]) -> list[int]:
    """Map core words onto token positions.

    A word matches a contiguous token span whose marker-stripped concatenation
    equals the word (case preserved).  Spans must begin at a word-initial token
    (position 0 or a leading whitespace marker) and continue only through
    non-word-initial tokens; every occurrence of every word is included, and a
    multi-token word contributes all of its sub-token indices.

    When no token in the sequence carries a whitespace marker at all, every
    position is treated as a possible word start (marker-free tokenizations).

    Words that cannot be matched are reported via a logging diagnostic; if
    nothing matches the result is empty and the caller decides whether to skip
    the record.
    """
    if not answer_tokens:
        raise ValueError("align_core_tokens: empty answer_tokens")
    stripped = [_strip_marker(t) for t in answer_tokens]
    any_marker = any(t.startswith(WORD_MARKERS) for t in answer_tokens)
    starts = [
        i for i, t in enumerate(answer_tokens)
        if (not any_marker) or _is_word_initial(t, i)
    ]

    indices: set[int] = set()
    unmatched = []
    for word in core_words:
        found = False
        for start in starts:
            if not stripped[start] or not word.startswith(stripped[start]):
                continue
            acc = stripped[start]
            end = start
            while len(acc) < len(word) and end + 1 < len(answer_tokens):
                nxt = answer_tokens[end + 1]
                if any_marker and _is_word_initial(nxt, end + 1):
                    break
                acc += stripped[end + 1]
                end += 1
            if acc == word:
                indices.update(range(start, end + 1))
                found = True
        if not found:
            unmatched.append(word)
    if unmatched:
        log.warning("align_core_tokens: no token match for core word(s) %s", unmatched)
    return sorted(indices)


def extract_ctcs(log_obj: TokenScoreLog) -> CtcsSample:
    """Concatenate core-token probabilities across entries, in entry order.

    Entries without core-token indices are skipped and counted in a logging
    diagnostic; a log where every entry is empty has no sample to test.
    """
    values: list[float] = []
    skipped = 0
    for e in log_obj.entries:
        if not e.core_token_indices:
            skipped += 1
            continue
        values.extend(e.token_probs[i] for i in e.core_token_indices)
    if skipped:
        log.warning(
            "extract_ctcs: skipped %d/%d entries with no core tokens (%s on %s)",
            skipped, len(log_obj.entries), log_obj.model_id, log_obj.dataset_id,
        )
    if not values:
        raise ScoreLogError(
            f"extract_ctcs: no core-token scores in log ({log_obj.model_id} on {log_obj.dataset_id})"
        )
    return CtcsSample(model_id=log_obj.model_id, dataset_id=log_obj.dataset_id, values=values)
