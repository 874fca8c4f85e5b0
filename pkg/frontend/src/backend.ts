/**
 * Transformer scoring backends. The production backend loads local model
 * weights through @xenova/transformers; when the package or the weights are
 * missing, constructing it is a fatal configuration error -- the lexicon
 * path never touches it.
 */

import { ConfigurationError } from "./types.js";

export interface SentimentProbs {
  positive: number;
  neutral: number;
  negative: number;
}

export interface ScoringBackend {
  /** Longest input in characters; longer texts are truncated upstream. */
  readonly maxChars: number;
  sentiment(texts: string[]): Promise<SentimentProbs[]>;
  /** P(hypothesis entailed by each premise), in [0, 1]. */
  entailment(premises: string[], hypothesis: string): Promise<number[]>;
}

interface TransformersBackendOptions {
  sentimentModel?: string;
  entailmentModel?: string;
  modelDir?: string;
}

/**
 * Backend over locally cached transformer weights. Model identifiers
 * default to the social-media sentiment classifier and the MNLI zero-shot
 * classifier this pipeline is built around.
 */
export async function createTransformersBackend(
  options: TransformersBackendOptions = {},
): Promise<ScoringBackend> {
  let transformers: any;
  try {
    transformers = await import("@xenova/transformers" as string);
  } catch {
    throw new ConfigurationError(
      "transformer scoring requested but @xenova/transformers is not " +
        "installed; install it and provide local model weights, or use " +
        "--models vader",
    );
  }
  const { pipeline, env } = transformers;
  if (options.modelDir) {
    env.localModelPath = options.modelDir;
    env.allowRemoteModels = false;
  }
  const sentimentModel =
    options.sentimentModel ?? "Xenova/twitter-roberta-base-sentiment-latest";
  const entailmentModel = options.entailmentModel ?? "Xenova/bart-large-mnli";
  let classify: any;
  let zeroShot: any;
  try {
    classify = await pipeline("text-classification", sentimentModel, {
      topk: null,
    });
    zeroShot = await pipeline("zero-shot-classification", entailmentModel);
  } catch (err) {
    throw new ConfigurationError(
      `transformer model weights unavailable (${String(err)}); provide ` +
        "--model-dir with locally cached models or use --models vader",
    );
  }

  return {
    maxChars: 2000,
    async sentiment(texts: string[]): Promise<SentimentProbs[]> {
      const results = await classify(texts);
      const batch = Array.isArray(results[0]) ? results : [results];
      return batch.map((labels: any[]) => {
        const byLabel: Record<string, number> = {};
        for (const entry of labels) {
          byLabel[String(entry.label).toLowerCase()] = entry.score;
        }
        return {
          positive: byLabel.positive ?? 0,
          neutral: byLabel.neutral ?? 0,
          negative: byLabel.negative ?? 0,
        };
      });
    },
    async entailment(premises: string[], hypothesis: string): Promise<number[]> {
      const scores: number[] = [];
      for (const premise of premises) {
        const result = await zeroShot(premise, [hypothesis]);
        scores.push(result.scores[0]);
      }
      return scores;
    },
  };
}
