import { describe, expect, it } from "vitest";

import { parseSweepCsv, SWEEP_HEADER } from "../src/csv.js";

function rows(entries: Array<[number, number, number]>): string {
  const lines = [SWEEP_HEADER];
  for (const [s, alpha, q] of entries) {
    lines.push(`${s},${alpha},0,0.5,${q},0`);
  }
  return lines.join("\n") + "\n";
}

describe("parseSweepCsv", () => {
  it("parses a rectangular grid sorted by coordinates", () => {
    const table = parseSweepCsv(
      rows([
        [0.5, 1, 0.1],
        [-0.5, 1, 0.2],
        [0.5, -1, 0.3],
        [-0.5, -1, 0.4],
      ]),
    );
    expect(table.s).toEqual([-0.5, 0.5]);
    expect(table.alpha).toEqual([-1, 1]);
    // q is laid out alpha-major: [(-1,-0.5), (-1,0.5), (1,-0.5), (1,0.5)]
    expect(Array.from(table.q)).toEqual([0.4, 0.3, 0.2, 0.1]);
  });

  it("keeps nan cells as NaN", () => {
    const table = parseSweepCsv(rows([[0, 0, NaN]]));
    expect(Number.isNaN(table.q[0])).toBe(true);
  });

  it("rejects a wrong header", () => {
    expect(() => parseSweepCsv("s,alpha,q\n0,0,0\n")).toThrow(/header/);
  });

  it("rejects missing columns", () => {
    expect(() => parseSweepCsv(`${SWEEP_HEADER}\n0,0,0,0\n`)).toThrow(/6 columns/);
  });

  it("rejects ragged grids", () => {
    expect(() =>
      parseSweepCsv(
        rows([
          [0, 0, 0.1],
          [1, 0, 0.1],
          [0, 1, 0.1],
        ]),
      ),
    ).toThrow(/ragged/);
  });

  it("rejects duplicate points", () => {
    expect(() =>
      parseSweepCsv(
        rows([
          [0, 0, 0.1],
          [0, 0, 0.2],
        ]),
      ),
    ).toThrow(/duplicate|ragged/);
  });

  it("reads a real sweep file", async () => {
    const { readFileSync } = await import("node:fs");
    const { fileURLToPath } = await import("node:url");
    const path = fileURLToPath(new URL("fixtures/sweep_omega025.csv", import.meta.url));
    const table = parseSweepCsv(readFileSync(path, "utf8"));
    expect(table.s.length).toBe(21);
    expect(table.alpha.length).toBe(41);
    expect(table.alpha[0]).toBe(-2);
    expect(table.alpha[40]).toBe(2);
  });
});
