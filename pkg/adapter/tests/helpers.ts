import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { QARecord } from "../src/scoreLog.js";

export const WORKED_RECORD: QARecord = {
  id: "hsiao-004",
  question: "What is the profession of Hsiao Yun-Hwa's father?",
  answer: "The father of Hsiao Yun-Hwa is a civil engineer.",
  core_words: [],
};

export const FIXTURE_PATH = new URL("./fixtures/worked-example-responses.json", import.meta.url).pathname;

export function loadFixturePairs(): Array<{ prompt: string; response: string }> {
  return JSON.parse(readFileSync(FIXTURE_PATH, "utf-8"));
}

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}
