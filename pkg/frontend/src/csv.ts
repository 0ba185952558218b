/** Readers for the CSV files a run directory contains. */

export class DataError extends Error {}

export interface EnergySeries {
  t: number[];
  e: number[];
}

export interface SnapshotGrid {
  /** one entry per snapshot block, in file order */
  times: number[];
  /** spatial nodes, taken from the first block */
  x: number[];
  /** rows[i][j] = y(x[j]) at times[i] */
  rows: number[][];
}

function splitLines(text: string): string[] {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  return lines.map((l) => (l.endsWith("\r") ? l.slice(0, -1) : l));
}

function field(raw: string, line: number, name: string): number {
  const v = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(v)) {
    throw new DataError(`line ${line}: bad ${name} value '${raw}'`);
  }
  return v;
}

export function parseEnergyCsv(text: string): EnergySeries {
  const lines = splitLines(text);
  if (lines.length === 0) throw new DataError("empty file");
  if (lines[0] !== "t,E") {
    throw new DataError(`expected header 't,E', got '${lines[0]}'`);
  }
  const t: number[] = [];
  const e: number[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 2) {
      throw new DataError(`line ${i + 1}: expected 2 fields, got ${parts.length}`);
    }
    t.push(field(parts[0], i + 1, "t"));
    e.push(field(parts[1], i + 1, "E"));
  }
  if (t.length === 0) throw new DataError("no data rows");
  return { t, e };
}

/**
 * Snapshot rows are grouped into blocks by runs of equal t; the writer
 * emits one block per stored time, all over the same node set, so every
 * block must have the length of the first.
 */
export function parseSnapshotsCsv(text: string): SnapshotGrid {
  const lines = splitLines(text);
  if (lines.length === 0) throw new DataError("empty file");
  if (lines[0] !== "t,x,y") {
    throw new DataError(`expected header 't,x,y', got '${lines[0]}'`);
  }
  const times: number[] = [];
  const x: number[] = [];
  const rows: number[][] = [];
  let cur: number[] | null = null;
  let curT = NaN;
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 3) {
      throw new DataError(`line ${i + 1}: expected 3 fields, got ${parts.length}`);
    }
    const tv = field(parts[0], i + 1, "t");
    const xv = field(parts[1], i + 1, "x");
    const yv = field(parts[2], i + 1, "y");
    if (cur === null || tv !== curT) {
      cur = [];
      curT = tv;
      times.push(tv);
      rows.push(cur);
    }
    if (rows.length === 1) x.push(xv);
    cur.push(yv);
  }
  if (rows.length === 0) throw new DataError("no data rows");
  for (let i = 0; i < rows.length; i++) {
    if (rows[i].length !== x.length) {
      throw new DataError(
        `snapshot block at t=${times[i]} has ${rows[i].length} nodes, expected ${x.length}`);
    }
  }
  return { times, x, rows };
}
