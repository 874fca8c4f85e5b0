#!/usr/bin/env node
/**
 * CLI: `score --in corpus.jsonl --models vader,sentiment,bullish
 *       --asset Bitcoin --out scores.csv --batch-size 32 [--model-dir DIR]`
 *
 * Exit codes: 0 success, 1 usage/configuration error, 2 data error.
 */

import process from "node:process";

import { aggregateDaily, emitFeatureCsv } from "./aggregate.js";
import { createTransformersBackend, ScoringBackend } from "./backend.js";
import { readCorpus } from "./corpus.js";
import { scoreBullishness, scoreLexicon, scoreSentiment } from "./scorers.js";
import { ConfigurationError, DailyScore, DataError, ScoreModel } from "./types.js";

const USAGE =
  "usage: foresim-score score --in corpus.jsonl --models vader[,sentiment,bullish] " +
  "--asset Bitcoin --out scores.csv [--batch-size N] [--model-dir DIR]";

interface Args {
  input: string;
  output: string;
  models: ScoreModel[];
  asset: string;
  batchSize: number;
  modelDir?: string;
}

export function parseArgs(argv: string[]): Args {
  if (argv[0] !== "score") {
    throw new ConfigurationError(`unknown command '${argv[0] ?? ""}'\n${USAGE}`);
  }
  const flags = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new ConfigurationError(`bad argument '${key}'\n${USAGE}`);
    }
    flags.set(key.slice(2), value);
  }
  const required = ["in", "models", "asset", "out"];
  for (const name of required) {
    if (!flags.has(name)) {
      throw new ConfigurationError(`missing --${name}\n${USAGE}`);
    }
  }
  const models = flags.get("models")!.split(",").map((m) => m.trim());
  for (const model of models) {
    if (!["vader", "sentiment", "bullish"].includes(model)) {
      throw new ConfigurationError(
        `unknown model '${model}' (vader | sentiment | bullish)`);
    }
  }
  const batchSize = parseInt(flags.get("batch-size") ?? "32", 10);
  if (!Number.isFinite(batchSize) || batchSize < 1) {
    throw new ConfigurationError("--batch-size must be a positive integer");
  }
  return {
    input: flags.get("in")!,
    output: flags.get("out")!,
    models: models as ScoreModel[],
    asset: flags.get("asset")!,
    batchSize,
    modelDir: flags.get("model-dir"),
  };
}

export async function runScore(
  args: Args,
  backendFactory: () => Promise<ScoringBackend> = () =>
    createTransformersBackend({ modelDir: args.modelDir }),
): Promise<DailyScore[]> {
  const { documents, dropped } = readCorpus(args.input);
  if (documents.length === 0) {
    throw new DataError("corpus contains no usable documents");
  }
  if (dropped > 0) {
    console.error(`dropped ${dropped} empty-after-cleaning document(s)`);
  }

  const needsBackend = args.models.some((m) => m !== "vader");
  const backend = needsBackend ? await backendFactory() : null;

  const daily: DailyScore[] = [];
  for (const model of args.models) {
    if (model === "vader") {
      daily.push(...aggregateDaily(documents, scoreLexicon(documents), model));
    } else if (model === "sentiment") {
      const result = await scoreSentiment(backend!, documents, args.batchSize);
      if (result.truncated > 0) {
        console.error(`truncated ${result.truncated} document(s) to the ` +
          "sentiment model's input limit");
      }
      daily.push(...aggregateDaily(documents, result.scores, model));
    } else {
      const result = await scoreBullishness(
        backend!, documents, args.asset, args.batchSize);
      if (result.truncated > 0) {
        console.error(`truncated ${result.truncated} document(s) to the ` +
          "entailment model's input limit");
      }
      daily.push(...aggregateDaily(documents, result.scores, model));
    }
  }
  emitFeatureCsv(daily, args.output);
  return daily;
}

export async function main(argv: string[]): Promise<number> {
  try {
    const args = parseArgs(argv);
    const daily = await runScore(args);
    const days = new Set(daily.map((d) => d.day)).size;
    console.log(
      `wrote ${args.output}: ${days} day(s), ${daily.length} (day, column) cells`);
    return 0;
  } catch (err) {
    if (err instanceof ConfigurationError) {
      console.error(`configuration error: ${err.message}`);
      return 1;
    }
    if (err instanceof DataError) {
      console.error(`data error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
