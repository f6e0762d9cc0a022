/**
 * Disk cache for prompt responses, keyed by (record id, template hash).
 *
 * One JSON file per key under the cache directory.  Re-running a pipeline
 * over an unchanged dataset and template set issues zero API calls and
 * reproduces byte-identical outputs.
 */

import { createHash } from "node:crypto";
import { existsSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

export function templateHash(renderedPrompt: string): string {
  return createHash("sha256").update(renderedPrompt, "utf-8").digest("hex").slice(0, 24);
}

export class ResponseCache {
  hits = 0;
  misses = 0;

  constructor(private readonly dir: string) {
    mkdirSync(dir, { recursive: true });
  }

  private pathFor(recordId: string, tmplHash: string): string {
    const key = createHash("sha256").update(`${recordId}\n${tmplHash}`, "utf-8").digest("hex");
    return join(this.dir, `${key}.json`);
  }

  get(recordId: string, tmplHash: string): string | undefined {
    const path = this.pathFor(recordId, tmplHash);
    if (!existsSync(path)) {
      this.misses += 1;
      return undefined;
    }
    this.hits += 1;
    return (JSON.parse(readFileSync(path, "utf-8")) as { response: string }).response;
  }

  put(recordId: string, tmplHash: string, response: string): void {
    writeFileSync(
      this.pathFor(recordId, tmplHash),
      JSON.stringify({ record_id: recordId, template_hash: tmplHash, response }),
      "utf-8",
    );
  }
}
