import { describe, expect, it } from "vitest";
import { numericKey, parseSummary } from "../src/summary";

describe("parseSummary", () => {
  it("reads key = value lines", () => {
    const s = parseSummary("model = kdvb\nkernel_family = exponential\nexp_rate = 0.6547\n");
    expect(s.get("model")).toBe("kdvb");
    expect(s.get("kernel_family")).toBe("exponential");
    expect(s.get("exp_rate")).toBe("0.6547");
  });

  it("skips lines without a separator", () => {
    const s = parseSummary("junk\n\nkey = 1\n");
    expect(s.size).toBe(1);
  });
});

describe("numericKey", () => {
  const s = parseSummary("a = 2.5\nb = nan\nc = exponential\n");

  it("returns finite values", () => {
    expect(numericKey(s, "a")).toBe(2.5);
  });

  it("treats nan, text and absence as missing", () => {
    expect(numericKey(s, "b")).toBeUndefined();
    expect(numericKey(s, "c")).toBeUndefined();
    expect(numericKey(s, "missing")).toBeUndefined();
  });
});
