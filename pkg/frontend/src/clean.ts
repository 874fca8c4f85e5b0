/**
 * Text cleaning: strip HTML elements/entities and hyperlinks, normalise
 * whitespace. Emoticons and unicode emoji carry sentiment for the scoring
 * models downstream, so they pass through untouched.
 */

const HTML_TAG = /<\/?[a-zA-Z][^>]*>/g;
const HTML_COMMENT = /<!--[\s\S]*?-->/g;
const URL = /(?:https?:\/\/|www\.)[^\s<>"']+/gi;

const NAMED_ENTITIES: Record<string, string> = {
  amp: "&",
  lt: "<",
  gt: ">",
  quot: '"',
  apos: "'",
  nbsp: " ",
  mdash: "—",
  ndash: "–",
  hellip: "…",
};

function decodeEntities(text: string): string {
  return text.replace(
    /&(#x?[0-9a-fA-F]+|[a-zA-Z]+);/g,
    (whole, name: string) => {
      if (name.startsWith("#x") || name.startsWith("#X")) {
        const code = parseInt(name.slice(2), 16);
        return Number.isFinite(code) ? String.fromCodePoint(code) : whole;
      }
      if (name.startsWith("#")) {
        const code = parseInt(name.slice(1), 10);
        return Number.isFinite(code) ? String.fromCodePoint(code) : whole;
      }
      return NAMED_ENTITIES[name.toLowerCase()] ?? whole;
    },
  );
}

function cleanOnce(raw: string): string {
  let text = raw.replace(HTML_COMMENT, " ").replace(HTML_TAG, " ");
  text = decodeEntities(text);
  text = text.replace(URL, " ");
  return text.replace(/\s+/g, " ").trim();
}

export function cleanText(raw: string): string {
  // Entity decoding can uncover new tags/URLs (double-encoded markup), so
  // the transform runs to a fixed point; this is what makes it idempotent.
  let text = raw;
  for (let i = 0; i < 8; i++) {
    const next = cleanOnce(text);
    if (next === text) return next;
    text = next;
  }
  return text;
}

/** `title | body` with either side optional, then cleaned. */
export function combineAndClean(title: string | undefined, body: string): string {
  const parts = [title, body].filter((p): p is string => !!p && p.trim() !== "");
  return cleanText(parts.join(" | "));
}
