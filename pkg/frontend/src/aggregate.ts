/**
 * Daily aggregation and the feature-CSV emitter consumed by the panel
 * engine: a `date` column plus one `<source>_<model>_score` column per
 * (source, model) pair present in the data. Days without documents emit no
 * row; the panel loader forward-imputes downstream.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { DailyScore, Document, ScoreModel, Source } from "./types.js";

/** Table-compatible column tokens: twitter data is published as tweets_*. */
const SOURCE_TOKEN: Record<Source, string> = {
  news: "news",
  twitter: "tweets",
  reddit: "reddit",
};

const MODEL_TOKEN: Record<ScoreModel, string> = {
  vader: "vader",
  sentiment: "twitter_roberta_pretrained",
  bullish: "bart_mnli_bullish",
};

export function columnName(source: Source, model: ScoreModel): string {
  return `${SOURCE_TOKEN[source]}_${MODEL_TOKEN[model]}_score`;
}

/**
 * Group scored documents by UTC day and source, averaging scores.
 * Scores are summed in sorted order so the result is bit-identical under
 * any permutation of the input documents.
 */
export function aggregateDaily(
  docs: Document[],
  scores: number[],
  model: ScoreModel,
): DailyScore[] {
  if (docs.length !== scores.length) {
    throw new Error("documents and scores must align");
  }
  const groups = new Map<string, number[]>();
  docs.forEach((doc, i) => {
    const key = `${doc.day}|${doc.source}`;
    const bucket = groups.get(key);
    if (bucket === undefined) {
      groups.set(key, [scores[i]]);
    } else {
      bucket.push(scores[i]);
    }
  });
  const out: DailyScore[] = [];
  for (const [key, values] of groups) {
    const [day, source] = key.split("|");
    values.sort((a, b) => a - b);
    const total = values.reduce((acc, v) => acc + v, 0.0);
    out.push({
      day,
      source: source as Source,
      model,
      score: total / values.length,
      docCount: values.length,
    });
  }
  out.sort((a, b) =>
    a.day < b.day ? -1 : a.day > b.day ? 1 : a.source.localeCompare(b.source));
  return out;
}

/** Render the merged daily scores as the panel-compatible feature CSV. */
export function featureCsv(daily: DailyScore[]): string {
  const columns = Array.from(
    new Set(daily.map((d) => columnName(d.source, d.model))),
  ).sort();
  const days = Array.from(new Set(daily.map((d) => d.day))).sort();
  const cells = new Map<string, number>();
  for (const entry of daily) {
    cells.set(`${entry.day}|${columnName(entry.source, entry.model)}`, entry.score);
  }
  const lines = [["date", ...columns].join(",")];
  for (const day of days) {
    const row = [day];
    for (const column of columns) {
      const value = cells.get(`${day}|${column}`);
      row.push(value === undefined ? "" : String(value));
    }
    lines.push(row.join(","));
  }
  return lines.join("\n") + "\n";
}

export function emitFeatureCsv(daily: DailyScore[], outPath: string): void {
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, featureCsv(daily), "utf-8");
}
