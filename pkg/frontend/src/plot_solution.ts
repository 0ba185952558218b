#!/usr/bin/env node
/**
 * plot-solution RUN_DIR
 *
 * Reads snapshots.csv from a run directory and writes solution.svg. With
 * two or more stored times the field is drawn as an (x, t) heatmap; a file
 * holding a single snapshot falls back to a plain y(x) curve.
 */

import * as fs from "fs";
import * as path from "path";
import { DataError, parseSnapshotsCsv, SnapshotGrid } from "./csv";
import { colormap, esc, fmtTick, linearTicks, linScale, openSvg, polyline, px } from "./svg";

export interface SolutionPlot {
  svg: string;
  mode: "heatmap" | "single";
}

const W = 920;
const H = 600;
const M = { l: 78, r: 118, t: 46, b: 56 };

// cell budget; a full-scale grid is striped down to roughly this many columns
const MAX_COLS = 192;
const MAX_ROWS = 96;

function sampleIdx(n: number, cap: number): number[] {
  const stride = Math.max(1, Math.ceil(n / cap));
  const idx: number[] = [];
  for (let i = 0; i < n; i += stride) idx.push(i);
  if (idx[idx.length - 1] !== n - 1) idx.push(n - 1);
  return idx;
}

/** Cell edges around sample coordinates, pcolormesh style. */
function edges(c: number[]): number[] {
  if (c.length === 1) return [c[0] - 0.5, c[0] + 0.5];
  const out: number[] = [c[0] - (c[1] - c[0]) / 2];
  for (let i = 1; i < c.length; i++) out.push((c[i - 1] + c[i]) / 2);
  out.push(c[c.length - 1] + (c[c.length - 1] - c[c.length - 2]) / 2);
  return out;
}

function axisFrame(sxLo: number, sxHi: number, syLo: number, syHi: number): string {
  return `<rect x="${px(sxLo)}" y="${px(syHi)}" width="${px(sxHi - sxLo)}" height="${px(syLo - syHi)}" fill="none" stroke="#333"/>\n`;
}

function renderHeatmap(g: SnapshotGrid): string {
  const ci = sampleIdx(g.x.length, MAX_COLS);
  const ri = sampleIdx(g.times.length, MAX_ROWS);
  const cx = ci.map((i) => g.x[i]);
  const rt = ri.map((i) => g.times[i]);
  const ex = edges(cx);
  const et = edges(rt);

  let lo = Infinity;
  let hi = -Infinity;
  for (const row of g.rows) {
    for (const v of row) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  const span = hi - lo;

  const sx = linScale(ex[0], ex[ex.length - 1], M.l, W - M.r);
  const sy = linScale(et[0], et[et.length - 1], H - M.b, M.t);

  let out = openSvg(W, H);
  out += `<g stroke="none">\n`;
  for (let r = 0; r < ri.length; r++) {
    const row = g.rows[ri[r]];
    const y1 = sy(et[r + 1]);
    const hgt = sy(et[r]) - y1;
    for (let c = 0; c < ci.length; c++) {
      const u = span === 0 ? 0.5 : (row[ci[c]] - lo) / span;
      const x0 = sx(ex[c]);
      out += `<rect x="${px(x0)}" y="${px(y1)}" width="${px(sx(ex[c + 1]) - x0)}" height="${px(hgt)}" fill="${colormap(u)}"/>\n`;
    }
  }
  out += `</g>\n`;
  out += axisFrame(M.l, W - M.r, H - M.b, M.t);

  for (const tk of linearTicks(ex[0], ex[ex.length - 1])) {
    out += `<text x="${px(sx(tk.v))}" y="${H - M.b + 18}" text-anchor="middle" font-size="12">${esc(tk.label)}</text>\n`;
  }
  for (const tk of linearTicks(et[0], et[et.length - 1])) {
    out += `<text x="${M.l - 6}" y="${px(sy(tk.v) + 4)}" text-anchor="end" font-size="12">${esc(tk.label)}</text>\n`;
  }
  out += `<text x="${px((M.l + W - M.r) / 2)}" y="${H - 14}" text-anchor="middle" font-size="14">x</text>\n`;
  out += `<text x="20" y="${px((M.t + H - M.b) / 2)}" text-anchor="middle" font-size="14" transform="rotate(-90 20 ${px((M.t + H - M.b) / 2)})">t</text>\n`;
  out += `<text x="${px(W / 2)}" y="26" text-anchor="middle" font-size="16">Solution y(x, t)</text>\n`;

  // colorbar
  const bx = W - M.r + 34;
  const bw = 16;
  const by0 = H - M.b;
  const by1 = M.t;
  const steps = 64;
  for (let k = 0; k < steps; k++) {
    const yTop = by0 + ((by1 - by0) * (k + 1)) / steps;
    out += `<rect x="${bx}" y="${px(yTop)}" width="${bw}" height="${px((by0 - by1) / steps + 0.5)}" fill="${colormap(k / (steps - 1))}"/>\n`;
  }
  out += `<rect x="${bx}" y="${by1}" width="${bw}" height="${by0 - by1}" fill="none" stroke="#333"/>\n`;
  out += `<text x="${bx + bw + 6}" y="${by0 + 4}" font-size="11">${esc(fmtTick(lo))}</text>\n`;
  out += `<text x="${bx + bw + 6}" y="${px((by0 + by1) / 2 + 4)}" font-size="11">${esc(fmtTick(lo + span / 2))}</text>\n`;
  out += `<text x="${bx + bw + 6}" y="${by1 + 4}" font-size="11">${esc(fmtTick(hi))}</text>\n`;
  out += `<text x="${bx + bw / 2}" y="${by1 - 10}" text-anchor="middle" font-size="12">y</text>\n`;
  out += "</svg>\n";
  return out;
}

function renderSingle(g: SnapshotGrid): string {
  const row = g.rows[0];
  let lo = Math.min(...row);
  let hi = Math.max(...row);
  if (hi === lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.05 * (hi - lo);
  const sx = linScale(g.x[0], g.x[g.x.length - 1], M.l, W - M.r);
  const sy = linScale(lo - pad, hi + pad, H - M.b, M.t);

  let out = openSvg(W, H);
  out += `<g stroke="#ccc" stroke-width="1">\n`;
  for (const tk of linearTicks(g.x[0], g.x[g.x.length - 1])) {
    out += `<line x1="${px(sx(tk.v))}" y1="${M.t}" x2="${px(sx(tk.v))}" y2="${H - M.b}"/>\n`;
  }
  for (const tk of linearTicks(lo, hi)) {
    out += `<line x1="${M.l}" y1="${px(sy(tk.v))}" x2="${W - M.r}" y2="${px(sy(tk.v))}"/>\n`;
  }
  out += `</g>\n`;
  out += axisFrame(M.l, W - M.r, H - M.b, M.t);
  for (const tk of linearTicks(g.x[0], g.x[g.x.length - 1])) {
    out += `<text x="${px(sx(tk.v))}" y="${H - M.b + 18}" text-anchor="middle" font-size="12">${esc(tk.label)}</text>\n`;
  }
  for (const tk of linearTicks(lo, hi)) {
    out += `<text x="${M.l - 6}" y="${px(sy(tk.v) + 4)}" text-anchor="end" font-size="12">${esc(tk.label)}</text>\n`;
  }
  out += `<text x="${px((M.l + W - M.r) / 2)}" y="${H - 14}" text-anchor="middle" font-size="14">x</text>\n`;
  out += `<text x="20" y="${px((M.t + H - M.b) / 2)}" text-anchor="middle" font-size="14" transform="rotate(-90 20 ${px((M.t + H - M.b) / 2)})">y</text>\n`;
  out += `<text x="${px(W / 2)}" y="26" text-anchor="middle" font-size="16">${esc(`Solution at t = ${fmtTick(g.times[0])}`)}</text>\n`;
  out += polyline(
    g.x.map((x, i) => [sx(x), sy(row[i])]),
    `stroke="#1f6fb4" stroke-width="1.8"`,
  );
  out += "\n</svg>\n";
  return out;
}

export function buildSolutionPlot(dir: string): SolutionPlot {
  let text: string;
  const p = path.join(dir, "snapshots.csv");
  try {
    text = fs.readFileSync(p, "utf8");
  } catch (err) {
    throw new DataError(`cannot read ${p}: ${(err as NodeJS.ErrnoException).code ?? err}`);
  }
  const grid = parseSnapshotsCsv(text);
  if (grid.times.length >= 2) {
    return { svg: renderHeatmap(grid), mode: "heatmap" };
  }
  return { svg: renderSingle(grid), mode: "single" };
}

export function main(argv: string[]): number {
  if (argv.length !== 1) {
    console.error("usage: plot-solution RUN_DIR");
    return 2;
  }
  try {
    const plot = buildSolutionPlot(argv[0]);
    const out = path.join(argv[0], "solution.svg");
    fs.writeFileSync(out, plot.svg);
    console.log(out);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
