import { describe, expect, it } from "vitest";
import { envelopeValue, fitEnvelope } from "../src/fit";

function grid(n: number, hi: number): number[] {
  return Array.from({ length: n }, (_, i) => (i * hi) / (n - 1));
}

describe("fitEnvelope", () => {
  it("recovers an exact exponential", () => {
    const t = grid(101, 5);
    const e = t.map((v) => 2 * Math.exp(-0.7 * v));
    const env = fitEnvelope("exp", t, e);
    expect(env.rate).toBeCloseTo(0.7, 10);
    expect(env.amplitude).toBeCloseTo(2, 10);
    expect(env.r2).toBeGreaterThan(1 - 1e-12);
  });

  it("recovers an exact power law", () => {
    const t = grid(101, 5);
    const e = t.map((v) => 3 * Math.pow(1 + v, -1.5));
    const env = fitEnvelope("poly", t, e);
    expect(env.rate).toBeCloseTo(1.5, 10);
    expect(env.amplitude).toBeCloseTo(3, 10);
  });

  it("ignores nonpositive samples", () => {
    const t = grid(51, 5).concat([6, 7]);
    const e = t.map((v) => Math.exp(-v));
    e[e.length - 1] = 0;
    e[e.length - 2] = -1e-18;
    const env = fitEnvelope("exp", t, e);
    expect(env.rate).toBeCloseTo(1, 10);
  });

  it("degenerates to rate 0 on a flat series", () => {
    const t = grid(11, 1);
    const env = fitEnvelope("exp", t, t.map(() => 0.5));
    expect(env.rate).toBe(0);
    expect(env.amplitude).toBeCloseTo(0.5, 14);
    expect(env.r2).toBe(0);
  });

  it("needs two positive samples", () => {
    expect(() => fitEnvelope("exp", [0, 1], [1, 0])).toThrow(/at least 2 positive/);
  });
});

describe("envelopeValue", () => {
  it("evaluates both shapes", () => {
    const exp = { kind: "exp" as const, rate: 2, amplitude: 3, r2: 1, source: "fit" as const };
    const poly = { kind: "poly" as const, rate: 2, amplitude: 3, r2: 1, source: "fit" as const };
    expect(envelopeValue(exp, 1)).toBeCloseTo(3 * Math.exp(-2), 14);
    expect(envelopeValue(poly, 1)).toBeCloseTo(3 / 4, 14);
  });
});
