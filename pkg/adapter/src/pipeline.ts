/**
 * The three adapter pipelines: core-word extraction, dataset variant
 * generation, and teacher-forced score-log extraction.
 *
 * API-driven steps go through the response cache first; a record whose calls
 * keep failing is marked unextracted/flagged and the run carries on, so a
 * partial output file is always preserved.
 */

import { ResponseCache, templateHash } from "./cache.js";
import { RetryingClient } from "./llmClient.js";
import { alignCoreTokens } from "./align.js";
import {
  adversarialQuestionPrompt,
  coreAnswerExtractionPrompt,
  fillBlankGenerationPrompt,
  multipleChoiceAnswerPrompt,
  multipleChoiceGenerationPrompt,
  pickAdversarialType,
  questionReformulationPrompt,
} from "./prompts.js";
import type { CausalScorer } from "./scorers.js";
import type { DatasetRole, ModelRole, QARecord, ScoreEntry, ScoreLogHeader } from "./scoreLog.js";

export interface PipelineStats {
  processed: number;
  extracted: number;
  failed: string[];
  flagged: string[];
  cacheHits: number;
  apiCalls: number;
}

function newStats(): PipelineStats {
  return { processed: 0, extracted: 0, failed: [], flagged: [], cacheHits: 0, apiCalls: 0 };
}

/** Cache-first prompt completion; returns undefined when the call ultimately fails. */
async function completeCached(
  client: RetryingClient,
  cache: ResponseCache,
  recordId: string,
  prompt: string,
  stats: PipelineStats,
): Promise<string | undefined> {
  const hash = templateHash(prompt);
  const cached = cache.get(recordId, hash);
  if (cached !== undefined) {
    stats.cacheHits += 1;
    return cached;
  }
  try {
    const response = await client.complete(prompt);
    stats.apiCalls += 1;
    cache.put(recordId, hash, response);
    return response;
  } catch {
    return undefined;
  }
}

/**
 * Two-step core-word extraction: reformulate into a blank-filling question,
 * then read back the blank answers as space-separated words.
 */
export async function extractCoreWords(
  records: QARecord[],
  client: RetryingClient,
  cache: ResponseCache,
): Promise<{ records: QARecord[]; stats: PipelineStats }> {
  const stats = newStats();
  const out: QARecord[] = [];
  for (const rec of records) {
    stats.processed += 1;
    const reformulated = await completeCached(
      client, cache, rec.id, questionReformulationPrompt(rec.question, rec.answer), stats);
    if (reformulated === undefined || !reformulated.trim()) {
      stats.failed.push(rec.id);
      out.push({ ...rec, core_words: [] });
      continue;
    }
    const extracted = await completeCached(
      client, cache, rec.id, coreAnswerExtractionPrompt(reformulated.trim(), rec.answer), stats);
    const words = (extracted ?? "").trim().split(/\s+/).filter(Boolean);
    if (words.length === 0) {
      stats.failed.push(rec.id);
      out.push({ ...rec, core_words: [] });
      continue;
    }
    stats.extracted += 1;
    out.push({ ...rec, core_words: words });
  }
  return { records: out, stats };
}

function parseChoices(block: string): string[] | undefined {
  const options: string[] = [];
  for (const raw of block.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const m = line.match(/^([1-4])[.):\s]\s*(.+)$/);
    if (!m || Number(m[1]) !== options.length + 1) return undefined;
    options.push(m[2].trim());
  }
  return options.length === 4 ? options : undefined;
}

function parseChoiceAnswer(response: string): number | undefined {
  const m = response.trim().match(/^\[?([1-4])\]?$/);
  return m ? Number(m[1]) : undefined;
}

/**
 * Adds fill-blank, multiple-choice, and adversarial variants to each record.
 * Unparseable multiple-choice responses flag the record; nothing is defaulted.
 */
export async function generateVariants(
  records: QARecord[],
  client: RetryingClient,
  cache: ResponseCache,
): Promise<{ records: QARecord[]; stats: PipelineStats }> {
  const stats = newStats();
  const out: QARecord[] = [];
  for (const rec of records) {
    stats.processed += 1;
    const next: QARecord = { ...rec };
    let intact = true;

    const fillBlank = await completeCached(
      client, cache, rec.id, fillBlankGenerationPrompt(rec.question, rec.answer), stats);
    if (fillBlank && fillBlank.trim()) {
      next.fill_blank = fillBlank.trim();
    } else {
      intact = false;
    }

    const choiceBlock = await completeCached(
      client, cache, rec.id, multipleChoiceGenerationPrompt(rec.question, rec.answer), stats);
    const choices = choiceBlock ? parseChoices(choiceBlock) : undefined;
    if (choices) {
      const answerResp = await completeCached(
        client, cache, rec.id, multipleChoiceAnswerPrompt(choices.join("\n"), rec.answer), stats);
      const correct = answerResp !== undefined ? parseChoiceAnswer(answerResp) : undefined;
      if (correct !== undefined) {
        next.choices = choices;
        next.correct_choice = correct;
      } else {
        stats.flagged.push(rec.id);
        intact = false;
      }
    } else {
      stats.flagged.push(rec.id);
      intact = false;
    }

    const advType = pickAdversarialType(rec.id);
    const adversarial = await completeCached(
      client, cache, rec.id, adversarialQuestionPrompt(rec.question, rec.answer, advType), stats);
    if (adversarial && adversarial.trim()) {
      next.adversarial_question = adversarial.trim();
      next.adversarial_type = advType;
    } else {
      intact = false;
    }

    if (intact) stats.extracted += 1;
    else if (!stats.flagged.includes(rec.id)) stats.failed.push(rec.id);
    out.push(next);
  }
  return { records: out, stats };
}

export interface ExtractionJob {
  records: QARecord[];
  scorer: CausalScorer;
  modelRole: ModelRole;
  datasetId: string;
  datasetRole: DatasetRole;
}

/**
 * Teacher-forced scoring of every record's gold answer; core-token positions
 * come from aligning the record's core words onto the scorer's tokens.
 * Records whose core words cannot be aligned keep an empty index list (the
 * engine skips and counts them).
 */
export async function extractTokenScores(
  job: ExtractionJob,
): Promise<{ header: ScoreLogHeader; entries: ScoreEntry[]; stats: PipelineStats }> {
  const stats = newStats();
  const entries: ScoreEntry[] = [];
  for (const rec of job.records) {
    stats.processed += 1;
    const { tokens, probs } = await job.scorer.scoreAnswer(rec.question, rec.answer);
    const { indices, unmatched } = alignCoreTokens(tokens, rec.core_words);
    if (unmatched.length > 0) {
      stats.flagged.push(rec.id);
    }
    if (indices.length > 0) stats.extracted += 1;
    entries.push({
      record_id: rec.id,
      answer_tokens: tokens,
      token_probs: probs,
      core_token_indices: indices,
    });
  }
  return {
    header: {
      model_id: job.scorer.modelId,
      model_role: job.modelRole,
      dataset_id: job.datasetId,
      dataset_role: job.datasetRole,
      tokenizer_id: job.scorer.tokenizerId,
    },
    entries,
    stats,
  };
}
