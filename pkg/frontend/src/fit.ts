/** Least-squares decay fits matching the solver's summary conventions. */

import { DataError } from "./csv";

export type EnvelopeKind = "exp" | "poly";

export interface Envelope {
  kind: EnvelopeKind;
  /** decay rate c in A e^(-c t), or power b in A (1+t)^(-b) */
  rate: number;
  amplitude: number;
  r2: number;
  source: "summary" | "fit";
}

interface LineFit {
  slope: number;
  intercept: number;
  r2: number;
}

function lineFit(xs: number[], ys: number[]): LineFit {
  const n = xs.length;
  let sx = 0;
  let sy = 0;
  for (let i = 0; i < n; i++) {
    sx += xs[i];
    sy += ys[i];
  }
  const mx = sx / n;
  const my = sy / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    const dx = xs[i] - mx;
    const dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx === 0) throw new DataError("degenerate abscissa in fit");
  const slope = sxy / sxx;
  const ssRes = Math.max(syy - slope * sxy, 0);
  return {
    slope,
    intercept: my - slope * mx,
    r2: syy === 0 ? 1 : 1 - ssRes / syy,
  };
}

/**
 * Fit a decay envelope to the positive samples of an energy series.
 *
 * Exponential fits a line on (t, log E), polynomial on (log(1+t), log E),
 * the same abscissae the solver uses for its summary rates. A flat series
 * degenerates to rate 0 with r2 0.
 */
export function fitEnvelope(kind: EnvelopeKind, t: number[], e: number[]): Envelope {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (e[i] > 0) {
      xs.push(kind === "poly" ? Math.log1p(t[i]) : t[i]);
      ys.push(Math.log(e[i]));
    }
  }
  if (xs.length < 2) throw new DataError("need at least 2 positive energy samples to fit");
  const lo = Math.min(...ys);
  const hi = Math.max(...ys);
  if (lo === hi) {
    return { kind, rate: 0, amplitude: Math.exp(ys[0]), r2: 0, source: "fit" };
  }
  const line = lineFit(xs, ys);
  return {
    kind,
    rate: -line.slope,
    amplitude: Math.exp(line.intercept),
    r2: line.r2,
    source: "fit",
  };
}

export function envelopeValue(env: Envelope, t: number): number {
  if (env.kind === "poly") return env.amplitude * Math.pow(1 + t, -env.rate);
  return env.amplitude * Math.exp(-env.rate * t);
}

export function envelopeLabel(env: Envelope): string {
  const a = env.amplitude.toPrecision(4);
  const r = env.rate.toPrecision(4);
  if (env.kind === "poly") return `${a} (1+t)^(-${r})`;
  return `${a} exp(-${r} t)`;
}
