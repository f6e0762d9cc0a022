/**
 * Core-word to token-position alignment.
 *
 * Mirrors the evaluation engine's alignment semantics: a core word matches a
 * contiguous token span whose marker-stripped concatenation equals the word,
 * spans start at word-initial tokens (position 0 or a leading whitespace
 * marker) and continue only through non-initial tokens, every occurrence
 * counts, multi-token words contribute all sub-token indices.
 */

const WORD_MARKERS = ["▁", "Ġ", " "]; // "▁", "Ġ", literal space

function stripMarker(token: string): string {
  for (const marker of WORD_MARKERS) {
    if (token.startsWith(marker)) return token.slice(marker.length);
  }
  return token;
}

function hasMarker(token: string): boolean {
  return WORD_MARKERS.some((m) => token.startsWith(m));
}

export interface AlignResult {
  indices: number[];
  unmatched: string[];
}

export function alignCoreTokens(answerTokens: string[], coreWords: string[]): AlignResult {
  if (answerTokens.length === 0) {
    throw new Error("alignCoreTokens: empty token list");
  }
  const stripped = answerTokens.map(stripMarker);
  const anyMarker = answerTokens.some(hasMarker);
  const starts: number[] = [];
  answerTokens.forEach((tok, i) => {
    if (!anyMarker || i === 0 || hasMarker(tok)) starts.push(i);
  });

  const found = new Set<number>();
  const unmatched: string[] = [];
  for (const word of coreWords) {
    let matched = false;
    for (const start of starts) {
      if (!stripped[start] || !word.startsWith(stripped[start])) continue;
      let acc = stripped[start];
      let end = start;
      while (acc.length < word.length && end + 1 < answerTokens.length) {
        if (anyMarker && hasMarker(answerTokens[end + 1])) break;
        acc += stripped[end + 1];
        end += 1;
      }
      if (acc === word) {
        for (let i = start; i <= end; i++) found.add(i);
        matched = true;
      }
    }
    if (!matched) unmatched.push(word);
  }
  return { indices: [...found].sort((a, b) => a - b), unmatched };
}
