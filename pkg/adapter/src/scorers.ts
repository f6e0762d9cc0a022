/**
 * Teacher-forced token scorers.
 *
 * A scorer tokenizes the ground-truth answer and reports, per answer token,
 * the probability the model assigns to that token when conditioned on the
 * question plus the gold answer prefix.  Scores are probabilities (APIs that
 * report log-probabilities are exponentiated here).
 */

export interface TokenScores {
  tokens: string[];
  probs: number[];
}

export interface CausalScorer {
  readonly modelId: string;
  readonly tokenizerId: string;
  scoreAnswer(question: string, answer: string): Promise<TokenScores>;
}

/**
 * Whitespace tokenizer with sub-word-style markers: each word becomes a
 * "▁"-prefixed token, leading/trailing punctuation splits off as bare tokens.
 */
export function markerTokenize(text: string): string[] {
  const tokens: string[] = [];
  for (const word of text.split(/\s+/).filter(Boolean)) {
    const m = word.match(/^([([""']*)(.*?)([)\].,!?;:""']*)$/s);
    const [lead, core, trail] = m ? [m[1], m[2], m[3]] : ["", word, ""];
    if (lead) tokens.push(...lead.split(""));
    if (core) tokens.push("▁" + core);
    if (trail) tokens.push(...trail.split(""));
  }
  return tokens;
}

/**
 * Deterministic stand-in model: a fixed vocabulary size V, uniform probability
 * 1/V for every token.  Used for schema contract tests and dry runs.
 */
export class StubUniformScorer implements CausalScorer {
  readonly modelId: string;
  readonly tokenizerId = "stub:marker-whitespace";
  private readonly prob: number;

  constructor(vocabSize = 1000, modelId = "stub-uniform") {
    if (!(vocabSize >= 2)) throw new Error("vocabSize must be >= 2");
    this.modelId = modelId;
    this.prob = 1 / vocabSize;
  }

  async scoreAnswer(_question: string, answer: string): Promise<TokenScores> {
    const tokens = markerTokenize(answer);
    return { tokens, probs: tokens.map(() => this.prob) };
  }
}

interface EchoCompletionResponse {
  choices: Array<{
    logprobs: {
      tokens: string[];
      token_logprobs: Array<number | null>;
      text_offset?: number[];
    };
  }>;
}

export type FetchLike = (url: string, init: {
  method: string;
  headers: Record<string, string>;
  body: string;
}) => Promise<{ ok: boolean; status: number; text(): Promise<string> }>;

/**
 * Teacher forcing over an HTTP completions endpoint that supports
 * echo + logprobs: the prompt is question + gold answer, the answer span's
 * echoed log-probabilities are exponentiated into token probabilities.
 *
 * Endpoint, key, and model come from UNLEARN_GAUGE_API_BASE,
 * UNLEARN_GAUGE_API_KEY, UNLEARN_GAUGE_SCORER_MODEL.
 */
export class HttpEchoScorer implements CausalScorer {
  readonly modelId: string;
  readonly tokenizerId: string;

  constructor(
    private readonly baseUrl: string,
    private readonly apiKey: string,
    modelId: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {
    this.modelId = modelId;
    this.tokenizerId = `api:${modelId}`;
  }

  static fromEnv(fetchImpl?: FetchLike): HttpEchoScorer {
    const base = process.env.UNLEARN_GAUGE_API_BASE;
    const model = process.env.UNLEARN_GAUGE_SCORER_MODEL;
    if (!base || !model) {
      throw new Error("set UNLEARN_GAUGE_API_BASE and UNLEARN_GAUGE_SCORER_MODEL to use the HTTP scorer");
    }
    return new HttpEchoScorer(base, process.env.UNLEARN_GAUGE_API_KEY ?? "", model, fetchImpl);
  }

  async scoreAnswer(question: string, answer: string): Promise<TokenScores> {
    const prompt = `${question}\n${answer}`;
    const res = await this.fetchImpl(`${this.baseUrl.replace(/\/$/, "")}/completions`, {
      method: "POST",
      headers: {
        "content-type": "application/json",
        ...(this.apiKey ? { authorization: `Bearer ${this.apiKey}` } : {}),
      },
      body: JSON.stringify({
        model: this.modelId,
        prompt,
        max_tokens: 0,
        echo: true,
        logprobs: 0,
      }),
    });
    if (!res.ok) {
      throw new Error(`scorer endpoint returned ${res.status}`);
    }
    const payload = JSON.parse(await res.text()) as EchoCompletionResponse;
    const lp = payload.choices[0]?.logprobs;
    if (!lp) throw new Error("scorer response carries no logprobs");

    // keep only tokens inside the answer span of the echoed prompt
    const answerStart = prompt.length - answer.length;
    const tokens: string[] = [];
    const probs: number[] = [];
    let offset = 0;
    lp.tokens.forEach((tok, i) => {
      const start = lp.text_offset ? lp.text_offset[i] : offset;
      offset = start + tok.length;
      const logprob = lp.token_logprobs[i];
      if (start >= answerStart && logprob !== null) {
        tokens.push(tok.startsWith(" ") ? "▁" + tok.slice(1) : tok);
        probs.push(Math.min(Math.exp(logprob), 1.0));
      }
    });
    if (tokens.length === 0) {
      throw new Error("scorer response echoed no answer tokens (tokenizer mismatch?)");
    }
    return { tokens, probs };
  }
}
