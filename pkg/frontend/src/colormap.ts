/** Diverging colormap for Mandel-Q values, centered at zero. */

export type Rgb = [number, number, number];

/** Color used for NaN (failed) grid cells. */
export const NAN_COLOR: Rgb = [128, 128, 128];

/** Exact center color, returned for Q = 0 so Poissonian cells read as white. */
export const CENTER_COLOR: Rgb = [247, 247, 247];

// blue-white-red anchor stops at positions -1 .. +1 (sub- to super-Poissonian)
const STOPS: Array<{ at: number; color: Rgb }> = [
  { at: -1.0, color: [33, 102, 172] },
  { at: -0.5, color: [146, 197, 222] },
  { at: 0.0, color: CENTER_COLOR },
  { at: 0.5, color: [244, 165, 130] },
  { at: 1.0, color: [178, 24, 43] },
];

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

/**
 * Map a value to a color on the symmetric diverging scale.
 *
 * ``limit`` sets the saturation point: values at or beyond +/-limit take
 * the end colors, zero takes the exact center color, and NaN the grey
 * NaN color.
 */
export function divergingColor(value: number, limit: number): Rgb {
  if (Number.isNaN(value)) {
    return [...NAN_COLOR] as Rgb;
  }
  if (value === 0.0) {
    return [...CENTER_COLOR] as Rgb;
  }
  const t = Math.max(-1.0, Math.min(1.0, value / limit));
  for (let i = 0; i < STOPS.length - 1; i++) {
    const lo = STOPS[i];
    const hi = STOPS[i + 1];
    if (t <= hi.at) {
      const frac = (t - lo.at) / (hi.at - lo.at);
      return [
        lerp(lo.color[0], hi.color[0], frac),
        lerp(lo.color[1], hi.color[1], frac),
        lerp(lo.color[2], hi.color[2], frac),
      ];
    }
  }
  return [...STOPS[STOPS.length - 1].color] as Rgb;
}
