#!/usr/bin/env node
/** plot-heatmap: render a sweep CSV as a Mandel-Q heatmap PNG. */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { parseSweepCsv } from "./csv.js";
import { encodePng } from "./png.js";
import { renderHeatmap } from "./render.js";

const USAGE =
  "usage: plot-heatmap <sweep.csv> <out.png> [--omega W] [--gamma G] [--clip C]";

interface CliArgs {
  csvPath: string;
  pngPath: string;
  omega: number;
  gamma: number;
  clip: number;
}

export function parseCliArgs(argv: string[]): CliArgs {
  const positional: string[] = [];
  const flags: Record<string, number> = { omega: 0.25, gamma: 1.0, clip: 1.0 };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--omega" || arg === "--gamma" || arg === "--clip") {
      const raw = argv[++i];
      const value = Number(raw);
      if (raw === undefined || Number.isNaN(value)) {
        throw new Error(`flag ${arg} needs a numeric value`);
      }
      flags[arg.slice(2)] = value;
    } else if (arg.startsWith("--")) {
      throw new Error(`unknown flag ${arg}\n${USAGE}`);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2) {
    throw new Error(USAGE);
  }
  if (!(flags.gamma > 0)) {
    throw new Error(`--gamma must be > 0, got ${flags.gamma}`);
  }
  if (!(flags.clip > 0)) {
    throw new Error(`--clip must be > 0, got ${flags.clip}`);
  }
  return {
    csvPath: positional[0],
    pngPath: positional[1],
    omega: flags.omega,
    gamma: flags.gamma,
    clip: flags.clip,
  };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseCliArgs(argv);
  } catch (error) {
    console.error(String(error instanceof Error ? error.message : error));
    return 2;
  }
  try {
    const table = parseSweepCsv(readFileSync(args.csvPath, "utf8"));
    const image = renderHeatmap(table, args);
    writeFileSync(args.pngPath, encodePng(image.width, image.height, image.rgba));
    return 0;
  } catch (error) {
    console.error(`plot-heatmap: ${error instanceof Error ? error.message : error}`);
    return 1;
  }
}

const invokedDirectly = (() => {
  if (process.argv[1] === undefined) {
    return false;
  }
  try {
    // realpath survives the npm bin symlink
    return fileURLToPath(import.meta.url) === realpathSync(process.argv[1]);
  } catch {
    return false;
  }
})();
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
