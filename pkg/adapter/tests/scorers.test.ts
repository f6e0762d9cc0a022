import { describe, expect, it } from "vitest";

import { HttpEchoScorer, markerTokenize, StubUniformScorer } from "../src/scorers.js";

describe("markerTokenize", () => {
  it("marks word-initial pieces and splits trailing punctuation", () => {
    expect(markerTokenize("The father is a civil engineer.")).toEqual([
      "▁The", "▁father", "▁is", "▁a", "▁civil", "▁engineer", ".",
    ]);
  });

  it("splits leading punctuation too", () => {
    expect(markerTokenize('"Quote"')).toEqual(['"', "▁Quote", '"']);
  });
});

describe("StubUniformScorer", () => {
  it("assigns 1/V to every answer token", async () => {
    const scorer = new StubUniformScorer(1000);
    const { tokens, probs } = await scorer.scoreAnswer("Q?", "A short answer here.");
    expect(tokens.length).toBe(probs.length);
    expect(probs.every((p) => p === 0.001)).toBe(true);
  });

  it("is deterministic", async () => {
    const scorer = new StubUniformScorer(50);
    const a = await scorer.scoreAnswer("Q?", "Same answer.");
    const b = await scorer.scoreAnswer("Q?", "Same answer.");
    expect(a).toEqual(b);
  });

  it("token count tracks the answer length", async () => {
    const scorer = new StubUniformScorer(10);
    const twelveWords = Array.from({ length: 12 }, (_, i) => `w${i}`).join(" ");
    const { probs } = await scorer.scoreAnswer("Q?", twelveWords);
    expect(probs).toHaveLength(12);
  });

  it("rejects a degenerate vocabulary", () => {
    expect(() => new StubUniformScorer(1)).toThrow(/vocabSize/);
  });
});

describe("HttpEchoScorer", () => {
  it("exponentiates answer-span logprobs from an echoed completion", async () => {
    const prompt = "Q?\nAn answer";
    const fakeFetch = async (_url: string, init: { body: string }) => {
      expect(JSON.parse(init.body)).toMatchObject({ echo: true, logprobs: 0 });
      return {
        ok: true,
        status: 200,
        text: async () => JSON.stringify({
          choices: [{
            logprobs: {
              tokens: ["Q", "?", "\n", "An", " answer"],
              token_logprobs: [null, -0.5, -0.1, -1.0, -2.0],
              text_offset: [0, 1, 2, 3, 5],
            },
          }],
        }),
      };
    };
    const scorer = new HttpEchoScorer("http://fake", "", "m", fakeFetch as never);
    const { tokens, probs } = await scorer.scoreAnswer("Q?", "An answer");
    expect(tokens).toEqual(["An", "▁answer"]);
    expect(probs).toEqual([Math.exp(-1.0), Math.exp(-2.0)]);
    void prompt;
  });

  it("surfaces endpoint failures", async () => {
    const fakeFetch = async () => ({ ok: false, status: 503, text: async () => "" });
    const scorer = new HttpEchoScorer("http://fake", "", "m", fakeFetch as never);
    await expect(scorer.scoreAnswer("Q?", "A")).rejects.toThrow(/503/);
  });

  it("flags tokenizer mismatch when nothing echoes inside the answer", async () => {
    const fakeFetch = async () => ({
      ok: true,
      status: 200,
      text: async () => JSON.stringify({
        choices: [{ logprobs: { tokens: ["Q"], token_logprobs: [null], text_offset: [0] } }],
      }),
    });
    const scorer = new HttpEchoScorer("http://fake", "", "m", fakeFetch as never);
    await expect(scorer.scoreAnswer("Q?", "A")).rejects.toThrow(/mismatch/);
  });
});
