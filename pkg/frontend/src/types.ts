/** Shared types for the scorer pipeline. */

export type Source = "news" | "twitter" | "reddit";

export type ScoreModel = "vader" | "sentiment" | "bullish";

export interface RawDocument {
  timestamp: string;
  source: Source;
  title?: string;
  body: string;
}

/** A document after validation and cleaning; text is never empty. */
export interface Document {
  /** UTC calendar day, YYYY-MM-DD. */
  day: string;
  source: Source;
  /** Cleaned `title | body` text. */
  text: string;
}

export interface DailyScore {
  day: string;
  source: Source;
  model: ScoreModel;
  /** Arithmetic mean over the day's documents. */
  score: number;
  docCount: number;
}

export class ConfigurationError extends Error {}

export class DataError extends Error {}
