/**
 * Dictionary-based valence scorer over a VADER-style lexicon: word valences
 * on a -4..+4 scale, negator words that flip and dampen, booster words that
 * intensify or mute, ALL-CAPS and exclamation emphasis, contrastive "but"
 * re-weighting. The adjusted valences are averaged over ALL tokens -- every
 * extra word dilutes the score, which is why a single top-ranked word like
 * "Good" outranks long euphoric posts -- and the mean is squashed onto
 * [-1, 1] with the x / sqrt(x^2 + alpha) normalisation.
 *
 * The embedded lexicon is a compact curation: general sentiment vocabulary
 * plus crypto-market vernacular, emoticons, and emoji.
 */

// alpha is tuned to the per-token mean (range roughly -4..4), playing the
// role the constant 15 plays for VADER's raw valence sums
const NORMALISATION_ALPHA = 1.0;
const BOOST_STEP = 0.293;
const CAPS_EMPHASIS = 0.733;
const NEGATION_FACTOR = -0.74;
const EXCLAMATION_BOOST = 0.292;
const MAX_EXCLAMATIONS = 4;
const NEGATION_SCOPE = 3;

export const LEXICON: Record<string, number> = {
  // general positive
  good: 1.9, great: 3.1, greatest: 3.2, excellent: 2.7, awesome: 3.1,
  amazing: 2.8, fantastic: 2.6, wonderful: 2.7, love: 3.2, loved: 2.9,
  loves: 2.7, like: 1.5, likes: 1.6, liked: 1.8, best: 3.2, better: 1.9,
  win: 2.8, wins: 2.6, winner: 2.8, winning: 2.4, happy: 2.7, glad: 2.0,
  excited: 1.7, exciting: 2.2, thank: 1.9, thanks: 1.9, grateful: 2.4,
  perfect: 2.7, nice: 1.8, cool: 1.3, strong: 2.3, stronger: 2.2,
  success: 2.7, successful: 2.8, profit: 2.2, profits: 2.2, profitable: 2.3,
  gain: 2.4, gains: 2.4, gained: 1.6, growth: 2.4, growing: 1.7,
  opportunity: 1.8, optimistic: 1.8, confident: 2.2, promising: 1.9,
  secure: 1.8, safe: 1.9, free: 1.8, easy: 1.9, rich: 2.6, wealth: 2.2,
  adoption: 1.3, innovative: 1.9, revolutionary: 1.7, soar: 2.1,
  soaring: 2.1, soars: 2.1, surge: 1.6, surges: 1.6, surged: 1.6,
  rally: 1.5, rallies: 1.5, boom: 1.7, booming: 2.1, breakthrough: 2.1,
  record: 1.2, recovery: 1.6, rebound: 1.4, skyrocket: 2.4, up: 0.8,
  // general negative
  bad: -2.5, worse: -2.1, worst: -3.1, terrible: -2.1, horrible: -2.5,
  awful: -2.0, hate: -2.7, hates: -2.3, hated: -2.8, fear: -2.2,
  fears: -1.9, afraid: -2.2, panic: -2.4, worry: -1.6, worried: -1.4,
  sad: -2.1, angry: -2.3, loss: -1.3, losses: -1.7, lose: -1.7,
  losing: -1.8, lost: -1.3, fail: -2.5, fails: -2.0, failed: -2.3,
  failure: -2.4, crash: -2.4, crashes: -2.4, crashed: -2.4, crashing: -2.7,
  collapse: -2.1, collapsed: -2.1, plunge: -1.8, plunges: -1.8,
  plunged: -1.8, plummet: -2.0, plummets: -2.0, drop: -1.1, drops: -1.1,
  dropped: -1.2, dump: -1.6, dumped: -1.7, dumping: -1.8, weak: -1.9,
  weaker: -1.9, risk: -1.1, risky: -1.3, danger: -2.4, dangerous: -2.3,
  scam: -2.2, scams: -2.4, fraud: -2.6, fraudulent: -2.4, fake: -2.1,
  hack: -1.9, hacked: -2.3, hackers: -1.6, theft: -2.2, stolen: -2.1,
  ban: -1.8, banned: -2.0, bans: -1.8, crackdown: -1.7, bubble: -0.9,
  manipulation: -1.9, manipulated: -1.7, screwed: -2.2, scandal: -2.2,
  problem: -1.7, problems: -1.7, trouble: -2.0, crisis: -2.6, debt: -1.5,
  inflation: -1.0, recession: -2.2, bankrupt: -2.6, bankruptcy: -2.6,
  lawsuit: -1.4, illegal: -2.1, warning: -1.4, down: -1.2, doubt: -1.5,
  doubts: -1.5, uncertain: -1.4, uncertainty: -1.4, volatile: -0.9,
  // crypto vernacular
  bullish: 2.4, bull: 1.4, bearish: -2.4, bear: -1.1, moon: 2.0,
  mooning: 2.3, hodl: 1.4, rekt: -2.6, fud: -1.8, shill: -1.4,
  whale: 0.3, pump: 1.2, pumped: 1.3, pumping: 1.4, halving: 0.6,
  diamond: 1.4, lambo: 1.9, bagholder: -1.8, rug: -2.0, rugpull: -2.8,
  ponzi: -2.7, shitcoin: -2.4, gem: 1.9, ath: 1.8, dip: -0.6,
  // emoticons
  ":)": 1.7, ":-)": 1.7, ":))": 2.0, ":D": 2.9, ":-D": 2.9, ";)": 1.5,
  ":(": -1.9, ":-(": -1.9, ":((": -2.2, ":/": -1.2, ":'(": -2.2,
  "<3": 2.7, ":p": 1.4, ":P": 1.4, "=)": 1.6, "=(": -1.8,
  // emoji
  "\u{1F680}": 2.2, // rocket
  "\u{1F4C8}": 1.9, // chart increasing
  "\u{1F4C9}": -1.9, // chart decreasing
  "\u{1F48E}": 1.6, // gem stone
  "\u{1F525}": 1.6, // fire
  "\u{1F4B0}": 1.8, // money bag
  "\u{2764}": 2.6, // red heart
  "\u{1F44D}": 1.8, // thumbs up
  "\u{1F44E}": -1.8, // thumbs down
  "\u{1F62D}": -2.2, // loudly crying
  "\u{1F631}": -1.9, // screaming in fear
  "\u{1F389}": 2.2, // party popper
};

export const NEGATORS = new Set([
  "not", "no", "never", "none", "nobody", "nothing", "neither", "nowhere",
  "hardly", "barely", "scarcely", "without", "isnt", "isn't", "arent",
  "aren't", "wasnt", "wasn't", "werent", "weren't", "dont", "don't",
  "doesnt", "doesn't", "didnt", "didn't", "cant", "can't", "cannot",
  "couldnt", "couldn't", "wont", "won't", "wouldnt", "wouldn't",
  "shouldnt", "shouldn't", "aint", "ain't",
]);

/** Intensity boosters: positive entries amplify, negative ones mute. */
export const BOOSTERS: Record<string, number> = {
  very: BOOST_STEP, extremely: BOOST_STEP, incredibly: BOOST_STEP,
  really: BOOST_STEP, absolutely: BOOST_STEP, completely: BOOST_STEP,
  totally: BOOST_STEP, hugely: BOOST_STEP, so: BOOST_STEP,
  super: BOOST_STEP, massively: BOOST_STEP, insanely: BOOST_STEP,
  slightly: -BOOST_STEP, somewhat: -BOOST_STEP, marginally: -BOOST_STEP,
  kinda: -BOOST_STEP, mildly: -BOOST_STEP, almost: -BOOST_STEP,
};

const TOKEN = /[A-Za-z][A-Za-z']*|[:;=]'?-?[)(DPp/]+|<3|[\u{1F000}-\u{1FAFF}\u{2600}-\u{27BF}\u{2764}]/gu;

interface Token {
  raw: string;
  lower: string;
}

function tokenise(text: string): Token[] {
  const tokens: Token[] = [];
  for (const match of text.matchAll(TOKEN)) {
    tokens.push({ raw: match[0], lower: match[0].toLowerCase() });
  }
  return tokens;
}

function lookup(token: Token): number | undefined {
  return LEXICON[token.raw] ?? LEXICON[token.lower];
}

function isAllCaps(raw: string): boolean {
  return raw.length > 1 && raw === raw.toUpperCase() &&
    raw !== raw.toLowerCase();
}

/**
 * Valence of a cleaned text in [-1, 1]; exactly 0 when no lexicon token is
 * present. Longer texts dilute: the adjusted valences are averaged over all
 * tokens before normalisation.
 */
export function lexiconScore(text: string): number {
  const tokens = tokenise(text);
  if (tokens.length === 0) return 0.0;
  const mixedCase = !tokens.every((t) => isAllCaps(t.raw));
  const butIndex = tokens.findIndex((t) => t.lower === "but");

  let sum = 0.0;
  let hits = 0;
  tokens.forEach((token, i) => {
    let valence = lookup(token);
    if (valence === undefined || valence === 0.0) {
      return;
    }
    hits += 1;
    const sign = Math.sign(valence);
    if (mixedCase && isAllCaps(token.raw)) {
      valence += sign * CAPS_EMPHASIS;
    }
    for (let back = 1; back <= NEGATION_SCOPE && i - back >= 0; back++) {
      const prior = tokens[i - back];
      if (lookup(prior) !== undefined) continue; // scores on its own
      const boost = BOOSTERS[prior.lower];
      if (boost !== undefined) {
        const falloff = back === 1 ? 1.0 : back === 2 ? 0.95 : 0.9;
        valence += sign * boost * falloff;
      }
      if (NEGATORS.has(prior.lower)) {
        valence *= NEGATION_FACTOR;
      }
    }
    if (butIndex >= 0) {
      valence *= i < butIndex ? 0.5 : 1.5;
    }
    sum += valence;
  });
  if (hits === 0) return 0.0;

  const exclamations = Math.min(
    (text.match(/!/g) ?? []).length, MAX_EXCLAMATIONS);
  if (sum > 0) sum += exclamations * EXCLAMATION_BOOST;
  else if (sum < 0) sum -= exclamations * EXCLAMATION_BOOST;

  const mean = sum / tokens.length;
  const squashed = mean / Math.sqrt(mean * mean + NORMALISATION_ALPHA);
  return Math.max(-1.0, Math.min(1.0, squashed));
}
