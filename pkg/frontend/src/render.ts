/** Heatmap rendering: sweep grid to RGBA pixels with the Poisson-line overlay. */

import { divergingColor } from "./colormap.js";
import type { SweepTable } from "./csv.js";

export interface RenderOptions {
  /** Rabi frequency fixing the overlay position alpha = omega / sqrt(gamma). */
  omega: number;
  /** Decay rate fixing the overlay position. */
  gamma: number;
  /** Saturation |Q| of the color scale (the symmetric limit is
   *  min(max finite |Q|, clip)). */
  clip: number;
}

export interface RenderedImage {
  width: number;
  height: number;
  rgba: Uint8Array;
  /** Color-scale limit actually used. */
  limit: number;
  /** Pixel row of the dashed overlay, or null when off-grid. */
  overlayRow: number | null;
}

const TARGET_EDGE_PX = 720;
const DASH_ON = 8;
const DASH_OFF = 6;
const OVERLAY_COLOR = [0, 0, 0];

/**
 * Render the grid with s on the horizontal axis and alpha on the vertical
 * axis (ascending upward), a zero-centered diverging color scale, grey NaN
 * cells, and a dashed black line at alpha = omega / sqrt(gamma) when that
 * value lies inside the grid.  Pure function of its inputs.
 */
export function renderHeatmap(table: SweepTable, options: RenderOptions): RenderedImage {
  const ns = table.s.length;
  const na = table.alpha.length;
  const cell = Math.max(1, Math.floor(TARGET_EDGE_PX / Math.max(ns, na)));
  const width = ns * cell;
  const height = na * cell;

  let maxAbs = 0;
  for (const q of table.q) {
    if (Number.isFinite(q)) {
      maxAbs = Math.max(maxAbs, Math.abs(q));
    }
  }
  const limit = maxAbs > 0 ? Math.min(maxAbs, options.clip) : options.clip;

  const rgba = new Uint8Array(width * height * 4);
  for (let row = 0; row < na; row++) {
    // alpha ascends upward: grid row 0 is drawn at the image bottom
    const yBase = (na - 1 - row) * cell;
    for (let col = 0; col < ns; col++) {
      const [r, g, b] = divergingColor(table.q[row * ns + col], limit);
      for (let dy = 0; dy < cell; dy++) {
        let offset = ((yBase + dy) * width + col * cell) * 4;
        for (let dx = 0; dx < cell; dx++) {
          rgba[offset] = r;
          rgba[offset + 1] = g;
          rgba[offset + 2] = b;
          rgba[offset + 3] = 255;
          offset += 4;
        }
      }
    }
  }

  const alphaStar = options.omega / Math.sqrt(options.gamma);
  let overlayRow: number | null = null;
  if (alphaStar >= table.alpha[0] && alphaStar <= table.alpha[na - 1]) {
    let nearest = 0;
    for (let i = 1; i < na; i++) {
      if (Math.abs(table.alpha[i] - alphaStar) < Math.abs(table.alpha[nearest] - alphaStar)) {
        nearest = i;
      }
    }
    overlayRow = (na - 1 - nearest) * cell + Math.floor(cell / 2);
    for (let x = 0; x < width; x++) {
      if (x % (DASH_ON + DASH_OFF) < DASH_ON) {
        const offset = (overlayRow * width + x) * 4;
        rgba[offset] = OVERLAY_COLOR[0];
        rgba[offset + 1] = OVERLAY_COLOR[1];
        rgba[offset + 2] = OVERLAY_COLOR[2];
        rgba[offset + 3] = 255;
      }
    }
  }
  return { width, height, rgba, limit, overlayRow };
}
