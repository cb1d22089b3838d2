/** Parsing and validation of counting-statistics sweep CSV files. */

export const SWEEP_HEADER = "s,alpha,theta,k,Q,imag_residual";

/** A complete rectangular (s, alpha) grid of Mandel-Q values. */
export interface SweepTable {
  /** Tilt values, ascending. */
  s: number[];
  /** Jump-operator shift amplitudes, ascending. */
  alpha: number[];
  /** Mandel Q at [alphaIndex * s.length + sIndex]; NaN marks failed points. */
  q: Float64Array;
}

function parseCell(raw: string, line: number, column: string): number {
  const trimmed = raw.trim();
  if (trimmed.toLowerCase() === "nan") {
    return NaN;
  }
  const value = Number(trimmed);
  if (trimmed === "" || Number.isNaN(value)) {
    throw new Error(
      `line ${line}: cannot parse ${column} value ${JSON.stringify(raw)}`,
    );
  }
  return value;
}

/**
 * Parse a sweep CSV into a rectangular grid.
 *
 * The header must match the sweep schema exactly, and the rows must form a
 * complete rectangle over the distinct (s, alpha) values, each pair
 * appearing exactly once.
 */
export function parseSweepCsv(text: string): SweepTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  if (lines[0] !== SWEEP_HEADER) {
    throw new Error(
      `unexpected header ${JSON.stringify(lines[0])}; expected "${SWEEP_HEADER}"`,
    );
  }
  const sSet = new Map<number, number>();
  const aSet = new Map<number, number>();
  const rows: Array<{ s: number; alpha: number; q: number }> = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 6) {
      throw new Error(`line ${i + 1}: expected 6 columns, got ${parts.length}`);
    }
    const s = parseCell(parts[0], i + 1, "s");
    const alpha = parseCell(parts[1], i + 1, "alpha");
    const q = parseCell(parts[4], i + 1, "Q");
    if (Number.isNaN(s) || Number.isNaN(alpha)) {
      throw new Error(`line ${i + 1}: grid coordinates must be finite`);
    }
    sSet.set(s, 0);
    aSet.set(alpha, 0);
    rows.push({ s, alpha, q });
  }
  const sValues = [...sSet.keys()].sort((x, y) => x - y);
  const aValues = [...aSet.keys()].sort((x, y) => x - y);
  sValues.forEach((v, i) => sSet.set(v, i));
  aValues.forEach((v, i) => aSet.set(v, i));
  if (rows.length !== sValues.length * aValues.length) {
    throw new Error(
      `ragged grid: ${rows.length} rows for ${sValues.length} x ` +
        `${aValues.length} distinct (s, alpha) values`,
    );
  }
  const q = new Float64Array(rows.length).fill(NaN);
  const seen = new Uint8Array(rows.length);
  for (const row of rows) {
    const index = aSet.get(row.alpha)! * sValues.length + sSet.get(row.s)!;
    if (seen[index]) {
      throw new Error(`duplicate grid point (s=${row.s}, alpha=${row.alpha})`);
    }
    seen[index] = 1;
    q[index] = row.q;
  }
  return { s: sValues, alpha: aValues, q };
}
