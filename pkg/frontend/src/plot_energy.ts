#!/usr/bin/env node
/**
 * plot-energy RUN_DIR
 *
 * Reads energy.csv from a run directory and writes energy.svg: the decay
 * curve on a semilog axis with the fitted envelope dashed over it. Fitted
 * rate and amplitude come from summary.txt when the run stored them;
 * otherwise the curve is refitted here.
 */

import * as fs from "fs";
import * as path from "path";
import { DataError, EnergySeries, parseEnergyCsv } from "./csv";
import { Envelope, envelopeLabel, envelopeValue, fitEnvelope } from "./fit";
import { numericKey, parseSummary, Summary } from "./summary";
import { esc, linearTicks, linScale, logTicks, openSvg, polyline, px } from "./svg";

export interface EnergyPlot {
  svg: string;
  envelope: Envelope;
  series: EnergySeries;
  /** envelope sampled at the data times; exactly what the overlay draws */
  overlay: number[];
}

/**
 * Prefer the rates the solver already fitted and stored. The kernel family
 * in the summary decides which envelope shape the run was driven toward;
 * without a summary both shapes are fitted and the better r2 wins.
 */
export function chooseEnvelope(summary: Summary | null, s: EnergySeries): Envelope {
  if (summary !== null) {
    const kind = summary.get("kernel_family") === "polynomial" ? "poly" : "exp";
    const rate = numericKey(summary, `${kind}_rate`);
    const amplitude = numericKey(summary, `${kind}_amplitude`);
    if (rate !== undefined && amplitude !== undefined && amplitude > 0) {
      return {
        kind,
        rate,
        amplitude,
        r2: numericKey(summary, `${kind}_r2`) ?? NaN,
        source: "summary",
      };
    }
  }
  let exp: Envelope | null = null;
  let poly: Envelope | null = null;
  try {
    exp = fitEnvelope("exp", s.t, s.e);
  } catch {
    // fall through to the other shape
  }
  try {
    poly = fitEnvelope("poly", s.t, s.e);
  } catch {
    // ditto
  }
  if (exp !== null && poly !== null) return exp.r2 >= poly.r2 ? exp : poly;
  const got = exp ?? poly;
  if (got === null) {
    throw new DataError("need at least 2 positive energy samples to fit");
  }
  return got;
}

const W = 860;
const H = 560;
const M = { l: 78, r: 28, t: 46, b: 56 };

export function renderEnergySvg(
  s: EnergySeries,
  env: Envelope,
  overlay: number[],
  modelTag: string,
): string {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < s.t.length; i++) {
    if (s.e[i] > 0) pts.push([s.t[i], s.e[i]]);
  }
  if (pts.length === 0) throw new DataError("no positive energy samples to draw");

  let yLo = Infinity;
  let yHi = -Infinity;
  for (const [, e] of pts) {
    yLo = Math.min(yLo, e);
    yHi = Math.max(yHi, e);
  }
  for (const v of overlay) {
    if (v > 0) {
      yLo = Math.min(yLo, v);
      yHi = Math.max(yHi, v);
    }
  }
  if (yHi === yLo) yHi = yLo * 2;
  // pad the log range so curves stay off the frame
  const pad = 0.05 * Math.log10(yHi / yLo);
  const dLo = Math.log10(yLo) - pad;
  const dHi = Math.log10(yHi) + pad;
  const t0 = s.t[0];
  const t1 = s.t[s.t.length - 1];
  const sx = linScale(t0, t1, M.l, W - M.r);
  const sy = linScale(dLo, dHi, H - M.b, M.t);

  let out = openSvg(W, H);
  out += `<g stroke="#ccc" stroke-width="1">\n`;
  const xt = linearTicks(t0, t1);
  for (const tk of xt) {
    out += `<line x1="${px(sx(tk.v))}" y1="${M.t}" x2="${px(sx(tk.v))}" y2="${H - M.b}"/>\n`;
  }
  for (const tk of logTicks(yLo, yHi)) {
    const y = sy(Math.log10(tk.v));
    out += `<line x1="${M.l}" y1="${px(y)}" x2="${W - M.r}" y2="${px(y)}"/>\n`;
  }
  out += `</g>\n`;
  out += `<rect x="${M.l}" y="${M.t}" width="${W - M.l - M.r}" height="${H - M.t - M.b}" fill="none" stroke="#333"/>\n`;

  for (const tk of xt) {
    out += `<text x="${px(sx(tk.v))}" y="${H - M.b + 18}" text-anchor="middle" font-size="12">${esc(tk.label)}</text>\n`;
  }
  for (const tk of logTicks(yLo, yHi)) {
    const y = sy(Math.log10(tk.v));
    out += `<text x="${M.l - 6}" y="${px(y + 4)}" text-anchor="end" font-size="12">${esc(tk.label)}</text>\n`;
  }
  out += `<text x="${px((M.l + W - M.r) / 2)}" y="${H - 14}" text-anchor="middle" font-size="14">t</text>\n`;
  out += `<text x="20" y="${px((M.t + H - M.b) / 2)}" text-anchor="middle" font-size="14" transform="rotate(-90 20 ${px((M.t + H - M.b) / 2)})">E(t)</text>\n`;
  const title = modelTag === "" ? "Energy decay" : `Energy decay (${modelTag})`;
  out += `<text x="${px(W / 2)}" y="26" text-anchor="middle" font-size="16">${esc(title)}</text>\n`;

  out += polyline(
    pts.map(([t, e]) => [sx(t), sy(Math.log10(e))]),
    `stroke="#1f6fb4" stroke-width="1.8"`,
  );
  out += "\n";
  const envPts: Array<[number, number]> = [];
  for (let i = 0; i < s.t.length; i++) {
    if (overlay[i] > 0) envPts.push([sx(s.t[i]), sy(Math.log10(overlay[i]))]);
  }
  out += polyline(envPts, `stroke="#d1495b" stroke-width="1.8" stroke-dasharray="7 4"`);
  out += "\n";

  const lx = W - M.r - 262;
  const ly = M.t + 14;
  out += `<rect x="${lx - 8}" y="${ly - 12}" width="262" height="44" fill="white" fill-opacity="0.85" stroke="#999"/>\n`;
  out += `<line x1="${lx}" y1="${ly}" x2="${lx + 30}" y2="${ly}" stroke="#1f6fb4" stroke-width="1.8"/>\n`;
  out += `<text x="${lx + 38}" y="${ly + 4}" font-size="12">E(t)</text>\n`;
  const r2Tag = Number.isFinite(env.r2) ? `, r2 = ${env.r2.toPrecision(4)}` : "";
  out += `<line x1="${lx}" y1="${ly + 20}" x2="${lx + 30}" y2="${ly + 20}" stroke="#d1495b" stroke-width="1.8" stroke-dasharray="7 4"/>\n`;
  out += `<text x="${lx + 38}" y="${ly + 24}" font-size="12">${esc(envelopeLabel(env) + r2Tag)}</text>\n`;
  out += "</svg>\n";
  return out;
}

function readRequired(p: string): string {
  try {
    return fs.readFileSync(p, "utf8");
  } catch (err) {
    throw new DataError(`cannot read ${p}: ${(err as NodeJS.ErrnoException).code ?? err}`);
  }
}

function readOptional(p: string): string | null {
  try {
    return fs.readFileSync(p, "utf8");
  } catch (err) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") return null;
    throw new DataError(`cannot read ${p}: ${(err as NodeJS.ErrnoException).code ?? err}`);
  }
}

export function buildEnergyPlot(dir: string): EnergyPlot {
  const series = parseEnergyCsv(readRequired(path.join(dir, "energy.csv")));
  const rawSummary = readOptional(path.join(dir, "summary.txt"));
  const summary = rawSummary === null ? null : parseSummary(rawSummary);
  const envelope = chooseEnvelope(summary, series);
  const overlay = series.t.map((t) => envelopeValue(envelope, t));
  const modelTag = summary?.get("model") ?? "";
  return {
    svg: renderEnergySvg(series, envelope, overlay, modelTag),
    envelope,
    series,
    overlay,
  };
}

export function main(argv: string[]): number {
  if (argv.length !== 1) {
    console.error("usage: plot-energy RUN_DIR");
    return 2;
  }
  try {
    const plot = buildEnergyPlot(argv[0]);
    const out = path.join(argv[0], "energy.svg");
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
