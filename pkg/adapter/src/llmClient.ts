/**
 * Minimal chat-completion client with retry/backoff and pluggable transport.
 *
 * The real transport posts to an OpenAI-compatible /chat/completions endpoint
 * configured by UNLEARN_GAUGE_API_BASE / UNLEARN_GAUGE_API_KEY /
 * UNLEARN_GAUGE_API_MODEL.  Tests and --dry-run swap in fake transports, so
 * nothing in the pipeline knows whether calls are live.
 */

export interface ChatTransport {
  complete(prompt: string): Promise<string>;
}

export interface RetryPolicy {
  maxAttempts: number;
  initialDelayMs: number;
  backoffFactor: number;
}

export const DEFAULT_RETRY: RetryPolicy = { maxAttempts: 3, initialDelayMs: 500, backoffFactor: 2 };

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class HttpChatTransport implements ChatTransport {
  constructor(
    private readonly baseUrl: string,
    private readonly apiKey: string,
    private readonly model: string,
  ) {}

  static fromEnv(): HttpChatTransport {
    const base = process.env.UNLEARN_GAUGE_API_BASE;
    const model = process.env.UNLEARN_GAUGE_API_MODEL;
    if (!base || !model) {
      throw new Error("set UNLEARN_GAUGE_API_BASE and UNLEARN_GAUGE_API_MODEL to issue live calls");
    }
    return new HttpChatTransport(base, process.env.UNLEARN_GAUGE_API_KEY ?? "", model);
  }

  async complete(prompt: string): Promise<string> {
    const res = await fetch(`${this.baseUrl.replace(/\/$/, "")}/chat/completions`, {
      method: "POST",
      headers: {
        "content-type": "application/json",
        ...(this.apiKey ? { authorization: `Bearer ${this.apiKey}` } : {}),
      },
      body: JSON.stringify({
        model: this.model,
        messages: [{ role: "user", content: prompt }],
        temperature: 0,
      }),
    });
    if (!res.ok) {
      throw new Error(`chat endpoint returned ${res.status}`);
    }
    const payload = (await res.json()) as { choices?: Array<{ message?: { content?: string } }> };
    const content = payload.choices?.[0]?.message?.content;
    if (typeof content !== "string") {
      throw new Error("chat endpoint returned no message content");
    }
    return content;
  }
}

/** Replays canned responses; used by tests and recorded-fixture runs. */
export class FixtureTransport implements ChatTransport {
  calls = 0;
  private readonly byPrompt: Map<string, string>;

  constructor(pairs: Array<{ prompt: string; response: string }>) {
    this.byPrompt = new Map(pairs.map((p) => [p.prompt, p.response]));
  }

  async complete(prompt: string): Promise<string> {
    this.calls += 1;
    const response = this.byPrompt.get(prompt);
    if (response === undefined) {
      throw new Error(`fixture has no response for prompt: ${prompt.slice(0, 80)}...`);
    }
    return response;
  }
}

/** Counts planned calls and returns nothing useful; backs --dry-run. */
export class DryRunTransport implements ChatTransport {
  planned: string[] = [];

  async complete(prompt: string): Promise<string> {
    this.planned.push(prompt);
    throw new Error("dry-run transport issues no calls");
  }
}

export class RetryingClient {
  constructor(
    private readonly transport: ChatTransport,
    private readonly policy: RetryPolicy = DEFAULT_RETRY,
    private readonly onRetry: (attempt: number, err: unknown) => void = () => {},
  ) {}

  async complete(prompt: string): Promise<string> {
    let delay = this.policy.initialDelayMs;
    let lastError: unknown;
    for (let attempt = 1; attempt <= this.policy.maxAttempts; attempt++) {
      try {
        return await this.transport.complete(prompt);
      } catch (err) {
        lastError = err;
        if (attempt === this.policy.maxAttempts) break;
        this.onRetry(attempt, err);
        await sleep(delay);
        delay *= this.policy.backoffFactor;
      }
    }
    throw lastError instanceof Error ? lastError : new Error(String(lastError));
  }
}
