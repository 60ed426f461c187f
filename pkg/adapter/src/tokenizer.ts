/**
 * Tokenizer interface plus a deterministic segment tokenizer.
 *
 * SegmentTokenizer splits text into GPT-style space-attached segments and
 * assigns each distinct segment a stable hashed id. Behavior switches model
 * the tokenizer quirks that matter to True/False token-set construction:
 * splitting long all-caps words, or refusing single-token True/False forms
 * entirely (which forces the {1,0} fallback).
 */

export interface Tokenizer {
  readonly name: string;
  readonly eosTokenId: number;
  /** Null when the tokenizer ships without a pad token; callers patch to EOS. */
  padTokenId: number | null;
  encode(text: string): number[];
}

const FNV_OFFSET = 0x811c9dc5;
const FNV_PRIME = 0x01000193;

export function fnv1a(text: string, salt = 0): number {
  let h = (FNV_OFFSET ^ salt) >>> 0;
  for (let i = 0; i < text.length; i++) {
    h = (h ^ text.charCodeAt(i)) >>> 0;
    h = Math.imul(h, FNV_PRIME) >>> 0;
  }
  return h >>> 0;
}

export interface SegmentTokenizerOptions {
  name: string;
  /** Split trimmed all-caps segments of length >= 2 into two tokens. */
  splitAllCaps?: boolean;
  /** Split any true/false-like segment per character (no single-token form). */
  noTrueFalse?: boolean;
  /** Ship without a pad token (exercises the pad->EOS patch). */
  omitPadToken?: boolean;
}

const SEGMENT_PATTERN = / ?[^\s]+|\s/g;
const ID_BASE = 16;
const ID_SPAN = 49984;

export class SegmentTokenizer implements Tokenizer {
  readonly name: string;
  readonly eosTokenId = 1;
  padTokenId: number | null;
  private readonly splitAllCaps: boolean;
  private readonly noTrueFalse: boolean;

  constructor(options: SegmentTokenizerOptions) {
    this.name = options.name;
    this.splitAllCaps = options.splitAllCaps ?? false;
    this.noTrueFalse = options.noTrueFalse ?? false;
    this.padTokenId = options.omitPadToken ? null : 2;
  }

  encode(text: string): number[] {
    const segments = text.match(SEGMENT_PATTERN) ?? [];
    const ids: number[] = [];
    for (const segment of segments) {
      for (const piece of this.pieces(segment)) {
        ids.push(this.pieceId(piece));
      }
    }
    return ids;
  }

  private pieces(segment: string): string[] {
    const lead = segment.startsWith(" ") ? " " : "";
    const body = lead ? segment.slice(1) : segment;
    if (this.noTrueFalse && /^(true|false)$/i.test(body)) {
      return body.split("").map((ch, i) => (i === 0 ? lead + ch : ch));
    }
    if (this.splitAllCaps && /^[A-Z]{2,}$/.test(body)) {
      const mid = Math.ceil(body.length / 2);
      return [lead + body.slice(0, mid), body.slice(mid)];
    }
    return [segment];
  }

  private pieceId(piece: string): number {
    return ID_BASE + (fnv1a(piece, fnv1a(this.name)) % ID_SPAN);
  }
}

/** The tokenizer trio used in tests and the deterministic backends. */
export function standardTokenizer(): SegmentTokenizer {
  return new SegmentTokenizer({ name: "segment-standard" });
}

export function capsSplittingTokenizer(): SegmentTokenizer {
  return new SegmentTokenizer({ name: "segment-caps-split", splitAllCaps: true });
}

export function digitsOnlyTokenizer(): SegmentTokenizer {
  return new SegmentTokenizer({ name: "segment-digits-only", noTrueFalse: true, omitPadToken: true });
}
