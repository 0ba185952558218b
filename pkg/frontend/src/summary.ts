/** summary.txt reader: one `key = value` pair per line. */

export type Summary = Map<string, string>;

export function parseSummary(text: string): Summary {
  const out: Summary = new Map();
  for (const line of text.split("\n")) {
    const at = line.indexOf("=");
    if (at < 0) continue;
    const key = line.slice(0, at).trim();
    if (key === "") continue;
    out.set(key, line.slice(at + 1).trim());
  }
  return out;
}

/** Numeric lookup; undefined when the key is absent or not finite. */
export function numericKey(s: Summary, key: string): number | undefined {
  const raw = s.get(key);
  if (raw === undefined) return undefined;
  const v = Number(raw);
  return Number.isFinite(v) ? v : undefined;
}
