export { cleanText, combineAndClean } from "./clean.js";
export { lexiconScore, LEXICON, NEGATORS, BOOSTERS } from "./lexicon.js";
export {
  createTransformersBackend,
  type ScoringBackend,
  type SentimentProbs,
} from "./backend.js";
export {
  bullishHypothesis,
  mergeSentiment,
  scoreBullishness,
  scoreLexicon,
  scoreSentiment,
} from "./scorers.js";
export { aggregateDaily, columnName, emitFeatureCsv, featureCsv } from "./aggregate.js";
export { parseCorpusLine, readCorpus, toDocument, utcDay } from "./corpus.js";
export { main, parseArgs, runScore } from "./cli.js";
export {
  ConfigurationError,
  DataError,
  type DailyScore,
  type Document,
  type RawDocument,
  type ScoreModel,
  type Source,
} from "./types.js";
