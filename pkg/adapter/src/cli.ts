#!/usr/bin/env node
/**
 * Adapter CLI: produce score logs and augmented datasets for the evaluation
 * engine.
 *
 *   extract-scores --dataset d.jsonl --out scores.jsonl [--model-role M_u]
 *                  [--dataset-role D_f] [--scorer stub|http] [--vocab 1000]
 *   extract-core   --dataset d.jsonl --out with_core.jsonl --cache-dir .cache
 *                  [--fixture recorded.json] [--dry-run]
 *   gen-variants   --dataset d.jsonl --out augmented.jsonl --cache-dir .cache
 *                  [--fixture recorded.json] [--dry-run]
 *
 * Live calls need UNLEARN_GAUGE_API_BASE / UNLEARN_GAUGE_API_KEY /
 * UNLEARN_GAUGE_API_MODEL; --fixture replays recorded responses instead and
 * --dry-run only prints the calls that would be issued.
 */

import { readFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { ResponseCache } from "./cache.js";
import {
  DryRunTransport,
  FixtureTransport,
  HttpChatTransport,
  RetryingClient,
  type ChatTransport,
} from "./llmClient.js";
import { extractCoreWords, extractTokenScores, generateVariants } from "./pipeline.js";
import { HttpEchoScorer, StubUniformScorer, type CausalScorer } from "./scorers.js";
import {
  readQaDataset,
  writeQaDataset,
  writeScoreLog,
  type DatasetRole,
  type ModelRole,
} from "./scoreLog.js";

function usageError(message: string): never {
  console.error(`error: ${message}`);
  console.error("run with --help for usage");
  process.exit(2);
}

function buildTransport(values: Record<string, unknown>): { transport: ChatTransport; dryRun?: DryRunTransport } {
  if (values["dry-run"]) {
    const dry = new DryRunTransport();
    return { transport: dry, dryRun: dry };
  }
  if (values.fixture) {
    const pairs = JSON.parse(readFileSync(String(values.fixture), "utf-8")) as Array<{
      prompt: string;
      response: string;
    }>;
    return { transport: new FixtureTransport(pairs) };
  }
  return { transport: HttpChatTransport.fromEnv() };
}

function reportStats(stats: {
  processed: number; extracted: number; failed: string[]; flagged: string[];
  cacheHits: number; apiCalls: number;
}): void {
  console.log(`processed\t${stats.processed}`);
  console.log(`extracted\t${stats.extracted}`);
  console.log(`failed\t${stats.failed.length}${stats.failed.length ? "\t" + stats.failed.join(",") : ""}`);
  console.log(`flagged\t${stats.flagged.length}${stats.flagged.length ? "\t" + stats.flagged.join(",") : ""}`);
  console.log(`cache_hits\t${stats.cacheHits}`);
  console.log(`api_calls\t${stats.apiCalls}`);
}

async function cmdExtractScores(args: string[]): Promise<number> {
  const { values } = parseArgs({
    args,
    options: {
      dataset: { type: "string" },
      out: { type: "string" },
      "model-role": { type: "string", default: "M_u" },
      "dataset-id": { type: "string" },
      "dataset-role": { type: "string", default: "D_f" },
      scorer: { type: "string", default: "stub" },
      vocab: { type: "string", default: "1000" },
    },
  });
  if (!values.dataset || !values.out) usageError("extract-scores needs --dataset and --out");
  const records = readQaDataset(values.dataset);

  let scorer: CausalScorer;
  if (values.scorer === "stub") {
    scorer = new StubUniformScorer(Number(values.vocab));
  } else if (values.scorer === "http") {
    scorer = HttpEchoScorer.fromEnv();
  } else {
    usageError(`unknown scorer ${values.scorer}`);
  }

  const { header, entries, stats } = await extractTokenScores({
    records,
    scorer,
    modelRole: values["model-role"] as ModelRole,
    datasetId: values["dataset-id"] ?? values.dataset.replace(/.*\//, ""),
    datasetRole: values["dataset-role"] as DatasetRole,
  });
  writeScoreLog(header, entries, values.out);
  console.log(`wrote ${values.out} (${entries.length} entries)`);
  reportStats(stats);
  return 0;
}

async function cmdPromptPipeline(kind: "extract-core" | "gen-variants", args: string[]): Promise<number> {
  const { values } = parseArgs({
    args,
    options: {
      dataset: { type: "string" },
      out: { type: "string" },
      "cache-dir": { type: "string", default: ".unlearn-gauge-cache" },
      fixture: { type: "string" },
      "dry-run": { type: "boolean", default: false },
    },
  });
  if (!values.dataset || !values.out) usageError(`${kind} needs --dataset and --out`);
  const records = readQaDataset(values.dataset);
  const cache = new ResponseCache(String(values["cache-dir"]));
  const { transport, dryRun } = buildTransport(values);
  const client = new RetryingClient(
    transport,
    dryRun ? { maxAttempts: 1, initialDelayMs: 0, backoffFactor: 1 } : undefined,
    (attempt, err) => console.error(`retry ${attempt} after error: ${(err as Error).message}`),
  );

  const run = kind === "extract-core" ? extractCoreWords : generateVariants;
  const { records: outRecords, stats } = await run(records, client, cache);

  if (dryRun) {
    console.log(`dry run: ${dryRun.planned.length} call(s) would be issued`);
    dryRun.planned.forEach((p, i) => console.log(`[${i + 1}] ${p.slice(0, 120)}`));
    return 0;
  }

  writeQaDataset(outRecords, values.out);
  console.log(`wrote ${values.out} (${outRecords.length} records)`);
  reportStats(stats);
  return stats.extracted === 0 ? 1 : 0;
}

const USAGE = `usage: unlearn-gauge-adapter <command> [options]

commands:
  extract-scores --dataset d.jsonl --out scores.jsonl [--model-role M_u]
                 [--dataset-id ID] [--dataset-role D_f] [--scorer stub|http]
                 [--vocab 1000]
  extract-core   --dataset d.jsonl --out with_core.jsonl [--cache-dir DIR]
                 [--fixture recorded.json] [--dry-run]
  gen-variants   --dataset d.jsonl --out augmented.jsonl [--cache-dir DIR]
                 [--fixture recorded.json] [--dry-run]

live calls read UNLEARN_GAUGE_API_BASE / UNLEARN_GAUGE_API_KEY /
UNLEARN_GAUGE_API_MODEL (and UNLEARN_GAUGE_SCORER_MODEL for --scorer http);
--fixture replays recorded responses, --dry-run prints planned calls only.`;

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  switch (command) {
    case "extract-scores":
      return cmdExtractScores(rest);
    case "extract-core":
      return cmdPromptPipeline("extract-core", rest);
    case "gen-variants":
      return cmdPromptPipeline("gen-variants", rest);
    case "--help":
    case "help":
    case undefined:
      console.log(USAGE);
      return command ? 0 : 2;
    default:
      usageError(`unknown command ${command}`);
  }
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  },
);
