/**
 * Line-delimited file formats shared with the evaluation engine.
 *
 * Score log: one header line (model_id, model_role, dataset_id, dataset_role,
 * tokenizer_id, format_version "1") followed by one entry per record
 * (record_id, answer_tokens, token_probs, core_token_indices).  Probabilities
 * are plain probabilities in (0, 1], never log-probs.
 *
 * QA dataset: no header; records carry id, question, answer, core_words and
 * the optional variant fields.
 */

import { readFileSync, writeFileSync } from "node:fs";

export const FORMAT_VERSION = "1";

export type ModelRole = "M_o" | "M_t" | "M_u" | "M_r" | "other";
export type DatasetRole = "D_f" | "D_v" | "D_r" | "D_u" | "holdout";

export interface ScoreLogHeader {
  model_id: string;
  model_role: ModelRole;
  dataset_id: string;
  dataset_role: DatasetRole;
  tokenizer_id: string;
}

export interface ScoreEntry {
  record_id: string;
  answer_tokens: string[];
  token_probs: number[];
  core_token_indices: number[];
}

export interface QARecord {
  id: string;
  question: string;
  answer: string;
  core_words: string[];
  fill_blank?: string;
  choices?: string[];
  correct_choice?: number;
  adversarial_question?: string;
  adversarial_type?: string;
}

export function validateEntry(entry: ScoreEntry): void {
  const { record_id, answer_tokens, token_probs, core_token_indices } = entry;
  if (answer_tokens.length !== token_probs.length) {
    throw new Error(`record ${record_id}: ${token_probs.length} probs for ${answer_tokens.length} tokens`);
  }
  for (const p of token_probs) {
    if (!(p > 0 && p <= 1)) {
      throw new Error(`record ${record_id}: token probability ${p} outside (0, 1]`);
    }
  }
  let prev = -1;
  for (const idx of core_token_indices) {
    if (!Number.isInteger(idx) || idx < 0 || idx >= answer_tokens.length) {
      throw new Error(`record ${record_id}: core index ${idx} out of range`);
    }
    if (idx <= prev) {
      throw new Error(`record ${record_id}: core indices must strictly increase`);
    }
    prev = idx;
  }
}

export function writeScoreLog(header: ScoreLogHeader, entries: ScoreEntry[], path: string): void {
  const seen = new Set<string>();
  const lines = [JSON.stringify({ ...header, format_version: FORMAT_VERSION })];
  for (const entry of entries) {
    validateEntry(entry);
    if (seen.has(entry.record_id)) {
      throw new Error(`duplicate record_id ${entry.record_id}`);
    }
    seen.add(entry.record_id);
    lines.push(JSON.stringify({
      record_id: entry.record_id,
      answer_tokens: entry.answer_tokens,
      token_probs: entry.token_probs,
      core_token_indices: entry.core_token_indices,
    }));
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}

export function readQaDataset(path: string): QARecord[] {
  const records: QARecord[] = [];
  const seen = new Set<string>();
  const lines = readFileSync(path, "utf-8").split("\n");
  lines.forEach((raw, i) => {
    const line = raw.trim();
    if (!line) return;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}:${i + 1}: invalid JSON: ${(err as Error).message}`);
    }
    const rec = obj as QARecord;
    for (const field of ["id", "question", "answer", "core_words"] as const) {
      if (rec[field] === undefined) {
        throw new Error(`${path}:${i + 1}: missing field ${field}`);
      }
    }
    if (seen.has(rec.id)) {
      throw new Error(`${path}:${i + 1}: duplicate record id ${rec.id}`);
    }
    seen.add(rec.id);
    records.push(rec);
  });
  return records;
}

export function writeQaDataset(records: QARecord[], path: string): void {
  const lines = records.map((rec) => {
    const out: Record<string, unknown> = {
      id: rec.id,
      question: rec.question,
      answer: rec.answer,
      core_words: rec.core_words,
    };
    for (const field of ["fill_blank", "choices", "correct_choice",
                         "adversarial_question", "adversarial_type"] as const) {
      if (rec[field] !== undefined) out[field] = rec[field];
    }
    return JSON.stringify(out);
  });
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}
