/** Small hand-rolled SVG toolkit; no rendering dependencies. */

export interface Margin {
  l: number;
  r: number;
  t: number;
  b: number;
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Round to hundredths of a pixel so paths stay compact. */
export function px(v: number): string {
  return String(Math.round(v * 100) / 100);
}

export function linScale(d0: number, d1: number, r0: number, r1: number): (v: number) => number {
  const span = d1 - d0;
  return (v) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0));
}

export interface Tick {
  v: number;
  label: string;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e-3 && a < 1e4) {
    return String(parseFloat(v.toPrecision(6)));
  }
  return v.toExponential(0).replace("e+", "e");
}

/** Ticks at 1/2/5 steps covering [lo, hi]. */
export function linearTicks(lo: number, hi: number, want = 6): Tick[] {
  if (!(hi > lo)) return [{ v: lo, label: fmtTick(lo) }];
  const raw = (hi - lo) / want;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  const out: Tick[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    const r = Math.abs(v) < step * 1e-9 ? 0 : v;
    out.push({ v: r, label: fmtTick(r) });
  }
  return out;
}

/**
 * Ticks for a log10 axis over positive [lo, hi]: every decade, with 2 and 5
 * mantissas added when the span covers at most two decades.
 */
export function logTicks(lo: number, hi: number): Tick[] {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const d0 = Math.floor(llo);
  const d1 = Math.ceil(lhi);
  const dense = lhi - llo <= 2;
  const out: Tick[] = [];
  for (let d = d0; d <= d1; d++) {
    for (const m of dense ? [1, 2, 5] : [1]) {
      const v = m * Math.pow(10, d);
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) {
        out.push({ v, label: fmtTick(v) });
      }
    }
  }
  if (out.length === 0) {
    out.push({ v: lo, label: fmtTick(lo) }, { v: hi, label: fmtTick(hi) });
  }
  return out;
}

export function polyline(pts: Array<[number, number]>, attrs: string): string {
  const d = pts.map(([a, b], i) => `${i === 0 ? "M" : "L"}${px(a)} ${px(b)}`).join("");
  return `<path d="${d}" fill="none" ${attrs}/>`;
}

export function openSvg(width: number, height: number): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="DejaVu Sans, Helvetica, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n`
  );
}

// viridis anchors, evenly spaced in [0, 1]
const STOPS: Array<[number, number, number]> = [
  [68, 1, 84],
  [72, 36, 117],
  [65, 68, 135],
  [53, 95, 141],
  [42, 120, 142],
  [33, 144, 141],
  [34, 168, 132],
  [68, 190, 112],
  [122, 209, 81],
  [189, 223, 38],
  [253, 231, 37],
];

export function colormap(u: number): string {
  const c = Math.min(Math.max(u, 0), 1) * (STOPS.length - 1);
  const i = Math.min(Math.floor(c), STOPS.length - 2);
  const f = c - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = [0, 1, 2].map((k) => mix(STOPS[i][k], STOPS[i + 1][k]));
  return `rgb(${r},${g},${b})`;
}
