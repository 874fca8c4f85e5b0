/**
 * Document scorers. Lexicon scoring is pure and synchronous; the two
 * transformer scorers batch documents through a backend and report how many
 * inputs had to be truncated to the model limit.
 */

import { ScoringBackend, SentimentProbs } from "./backend.js";
import { lexiconScore } from "./lexicon.js";
import { Document } from "./types.js";

/** Merge three-class probabilities into one score: P(pos) - P(neg). */
export function mergeSentiment(probs: SentimentProbs): number {
  return probs.positive - probs.negative;
}

export function bullishHypothesis(asset: string): string {
  return `This example is bullish for ${asset}.`;
}

export interface BatchResult {
  scores: number[];
  truncated: number;
}

function prepare(docs: Document[], maxChars: number): BatchResult & { texts: string[] } {
  let truncated = 0;
  const texts = docs.map((doc) => {
    if (doc.text.length > maxChars) {
      truncated += 1;
      return doc.text.slice(0, maxChars);
    }
    return doc.text;
  });
  return { texts, scores: [], truncated };
}

export function scoreLexicon(docs: Document[]): number[] {
  return docs.map((doc) => lexiconScore(doc.text));
}

export async function scoreSentiment(
  backend: ScoringBackend,
  docs: Document[],
  batchSize: number,
): Promise<BatchResult> {
  const { texts, truncated } = prepare(docs, backend.maxChars);
  const scores: number[] = [];
  for (let lo = 0; lo < texts.length; lo += batchSize) {
    const probs = await backend.sentiment(texts.slice(lo, lo + batchSize));
    scores.push(...probs.map(mergeSentiment));
  }
  return { scores, truncated };
}

export async function scoreBullishness(
  backend: ScoringBackend,
  docs: Document[],
  asset: string,
  batchSize: number,
): Promise<BatchResult> {
  const { texts, truncated } = prepare(docs, backend.maxChars);
  const hypothesis = bullishHypothesis(asset);
  const scores: number[] = [];
  for (let lo = 0; lo < texts.length; lo += batchSize) {
    scores.push(
      ...(await backend.entailment(texts.slice(lo, lo + batchSize), hypothesis)),
    );
  }
  return { scores, truncated };
}
