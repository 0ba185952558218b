import { describe, expect, it } from "vitest";
import { DataError, parseEnergyCsv, parseSnapshotsCsv } from "../src/csv";

describe("parseEnergyCsv", () => {
  it("reads t and E columns", () => {
    const s = parseEnergyCsv("t,E\n0,0.75\n0.5,0.5\n1,0.25\n");
    expect(s.t).toEqual([0, 0.5, 1]);
    expect(s.e).toEqual([0.75, 0.5, 0.25]);
  });

  it("keeps full precision values", () => {
    const s = parseEnergyCsv("t,E\n0.0048828125,0.74893262457289655\n");
    expect(s.e[0]).toBe(0.74893262457289655);
  });

  it("tolerates CRLF endings", () => {
    const s = parseEnergyCsv("t,E\r\n0,1\r\n1,0.5\r\n");
    expect(s.t).toEqual([0, 1]);
  });

  it("rejects a wrong header", () => {
    expect(() => parseEnergyCsv("time,E\n0,1\n")).toThrow(/expected header 't,E'/);
  });

  it("rejects an empty file", () => {
    expect(() => parseEnergyCsv("")).toThrow(DataError);
  });

  it("rejects a header with no rows", () => {
    expect(() => parseEnergyCsv("t,E\n")).toThrow(/no data rows/);
  });

  it("rejects a row with the wrong field count", () => {
    expect(() => parseEnergyCsv("t,E\n0,1,2\n")).toThrow(/line 2: expected 2 fields/);
  });

  it("rejects non-numeric fields", () => {
    expect(() => parseEnergyCsv("t,E\n0,abc\n")).toThrow(/bad E value 'abc'/);
    expect(() => parseEnergyCsv("t,E\n0,\n")).toThrow(/bad E value/);
    expect(() => parseEnergyCsv("t,E\nnan,1\n")).toThrow(/bad t value/);
  });
});

describe("parseSnapshotsCsv", () => {
  const text =
    "t,x,y\n" +
    "0,0,0\n0,0.5,1\n0,1,0\n" +
    "0.5,0,0\n0.5,0.5,0.6\n0.5,1,0\n" +
    "1,0,0\n1,0.5,0.4\n1,1,0\n";

  it("groups consecutive equal-t rows into blocks", () => {
    const g = parseSnapshotsCsv(text);
    expect(g.times).toEqual([0, 0.5, 1]);
    expect(g.x).toEqual([0, 0.5, 1]);
    expect(g.rows).toEqual([
      [0, 1, 0],
      [0, 0.6, 0],
      [0, 0.4, 0],
    ]);
  });

  it("accepts a single snapshot", () => {
    const g = parseSnapshotsCsv("t,x,y\n0,0,1\n0,1,2\n");
    expect(g.times).toEqual([0]);
    expect(g.rows).toEqual([[1, 2]]);
  });

  it("rejects a wrong header", () => {
    expect(() => parseSnapshotsCsv("t,y,x\n0,0,0\n")).toThrow(/expected header 't,x,y'/);
  });

  it("rejects ragged blocks", () => {
    const ragged = "t,x,y\n0,0,1\n0,1,2\n0.5,0,1\n";
    expect(() => parseSnapshotsCsv(ragged)).toThrow(/has 1 nodes, expected 2/);
  });

  it("rejects rows with missing fields", () => {
    expect(() => parseSnapshotsCsv("t,x,y\n0,0\n")).toThrow(/line 2: expected 3 fields/);
  });

  it("rejects a header with no rows", () => {
    expect(() => parseSnapshotsCsv("t,x,y\n")).toThrow(/no data rows/);
  });
});
