export { CENTER_COLOR, NAN_COLOR, divergingColor } from "./colormap.js";
export { SWEEP_HEADER, parseSweepCsv } from "./csv.js";
export type { SweepTable } from "./csv.js";
export { encodePng } from "./png.js";
export { renderHeatmap } from "./render.js";
export type { RenderOptions, RenderedImage } from "./render.js";
export { main, parseCliArgs } from "./cli.js";
