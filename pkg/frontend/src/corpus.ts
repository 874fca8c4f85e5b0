/**
 * JSON-lines corpus reading: one document per line with fields
 * timestamp, source, title, body. Documents that clean down to nothing are
 * dropped (counted); malformed lines are data errors naming the line.
 */

import { readFileSync } from "node:fs";

import { combineAndClean } from "./clean.js";
import { DataError, Document, RawDocument, Source } from "./types.js";

const SOURCES: ReadonlySet<string> = new Set(["news", "twitter", "reddit"]);

export interface CorpusReadResult {
  documents: Document[];
  dropped: number;
}

export function utcDay(timestamp: string): string {
  const parsed = new Date(timestamp);
  if (Number.isNaN(parsed.getTime())) {
    throw new DataError(`unparsable timestamp '${timestamp}'`);
  }
  return parsed.toISOString().slice(0, 10);
}

export function parseCorpusLine(line: string, lineno: number): RawDocument {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (err) {
    throw new DataError(`line ${lineno}: invalid JSON (${String(err)})`);
  }
  const record = raw as Record<string, unknown>;
  if (typeof record.timestamp !== "string") {
    throw new DataError(`line ${lineno}: missing 'timestamp'`);
  }
  if (typeof record.source !== "string" || !SOURCES.has(record.source)) {
    throw new DataError(
      `line ${lineno}: 'source' must be one of news|twitter|reddit`,
    );
  }
  if (typeof record.body !== "string") {
    throw new DataError(`line ${lineno}: missing 'body'`);
  }
  if (record.title !== undefined && typeof record.title !== "string") {
    throw new DataError(`line ${lineno}: 'title' must be a string`);
  }
  return {
    timestamp: record.timestamp,
    source: record.source as Source,
    title: record.title as string | undefined,
    body: record.body,
  };
}

export function toDocument(raw: RawDocument, lineno: number): Document | null {
  let day: string;
  try {
    day = utcDay(raw.timestamp);
  } catch (err) {
    throw new DataError(`line ${lineno}: ${(err as Error).message}`);
  }
  const text = combineAndClean(raw.title, raw.body);
  if (text === "") return null;
  return { day, source: raw.source, text };
}

export function readCorpus(path: string): CorpusReadResult {
  let content: string;
  try {
    content = readFileSync(path, "utf-8");
  } catch {
    throw new DataError(`corpus file not found: ${path}`);
  }
  const documents: Document[] = [];
  let dropped = 0;
  content.split("\n").forEach((line, index) => {
    if (line.trim() === "") return;
    const raw = parseCorpusLine(line, index + 1);
    const doc = toDocument(raw, index + 1);
    if (doc === null) {
      dropped += 1;
    } else {
      documents.push(doc);
    }
  });
  return { documents, dropped };
}
