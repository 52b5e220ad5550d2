// Canvas chart rendering. Geometry (data coordinates -> pixels) is kept in
// pure exported functions so it can be tested headlessly; painters take any
// CanvasRenderingContext2D-compatible object.

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

const MARGINS: Margins = { left: 44, right: 12, top: 12, bottom: 32 };

export interface Series {
  solutions: number[][];
  referencePoints: number[][];
  aspiration: number[];
  underlay?: number[][]; // optional analytic front polyline (2-D only)
}

export function scale2d(
  value: number,
  range: [number, number],
  pixelLo: number,
  pixelHi: number,
): number {
  const [lo, hi] = range;
  const t = (value - lo) / (hi - lo);
  return pixelLo + t * (pixelHi - pixelLo);
}

export interface Rotation {
  yaw: number; // radians around the vertical axis
  pitch: number; // radians tilting toward the viewer
}

export const DEFAULT_ROTATION: Rotation = { yaw: Math.PI / 5, pitch: Math.PI / 7 };

/**
 * Orthographic 3-D projection used by the rotatable scatter: yaw around the
 * z axis, then pitch around the screen-x axis. Returns screen x/y in data
 * units plus a depth used for paint order.
 */
export function project3d(
  p: number[],
  rot: Rotation,
): { x: number; y: number; depth: number } {
  const [a, b, c] = p;
  const cy = Math.cos(rot.yaw);
  const sy = Math.sin(rot.yaw);
  const x1 = a * cy - b * sy;
  const y1 = a * sy + b * cy;
  const cp = Math.cos(rot.pitch);
  const sp = Math.sin(rot.pitch);
  const y2 = c * cp - y1 * sp;
  const depth = c * sp + y1 * cp;
  return { x: x1, y: y2, depth };
}

/** Normalized [0,1] vertical positions per axis for a parallel-coordinates
 * polyline; clamped so off-range values stay drawable. */
export function parallelLine(
  point: number[],
  range: [number, number],
): number[] {
  const [lo, hi] = range;
  return point.map((v) => {
    const t = (v - lo) / (hi - lo);
    return Math.min(1, Math.max(0, t));
  });
}

type Ctx = CanvasRenderingContext2D;

function plotArea(width: number, height: number) {
  return {
    x0: MARGINS.left,
    x1: width - MARGINS.right,
    y0: height - MARGINS.bottom,
    y1: MARGINS.top,
  };
}

function clear(ctx: Ctx, width: number, height: number) {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
}

function drawFrame2d(
  ctx: Ctx,
  width: number,
  height: number,
  range: [number, number],
  labels: [string, string],
) {
  const area = plotArea(width, height);
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.strokeRect(area.x0, area.y1, area.x1 - area.x0, area.y0 - area.y1);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const v = range[0] + ((range[1] - range[0]) * i) / ticks;
    const px = scale2d(v, range, area.x0, area.x1);
    const py = scale2d(v, range, area.y0, area.y1);
    ctx.fillText(v.toFixed(2), px - 10, area.y0 + 14);
    ctx.fillText(v.toFixed(2), area.x0 - 34, py + 3);
  }
  ctx.fillText(labels[0], (area.x0 + area.x1) / 2, height - 6);
  ctx.save();
  ctx.translate(10, (area.y0 + area.y1) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(labels[1], 0, 0);
  ctx.restore();
}

function dot(ctx: Ctx, x: number, y: number, r: number, fill: string) {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
}

function circle(ctx: Ctx, x: number, y: number, r: number, stroke: string) {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.strokeStyle = stroke;
  ctx.lineWidth = 1;
  ctx.stroke();
}

function star(ctx: Ctx, x: number, y: number, r: number, color: string) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  for (let i = 0; i < 5; i++) {
    const angle = (i * 4 * Math.PI) / 5 - Math.PI / 2;
    const px = x + r * Math.cos(angle);
    const py = y + r * Math.sin(angle);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  }
  ctx.closePath();
  ctx.stroke();
}

export function renderScatter2d(
  ctx: Ctx,
  width: number,
  height: number,
  series: Series,
  range: [number, number],
) {
  clear(ctx, width, height);
  drawFrame2d(ctx, width, height, range, ["f1", "f2"]);
  const area = plotArea(width, height);
  const px = (v: number) => scale2d(v, range, area.x0, area.x1);
  const py = (v: number) => scale2d(v, range, area.y0, area.y1);

  if (series.underlay && series.underlay.length > 1) {
    ctx.strokeStyle = "#bbb";
    ctx.lineWidth = 2;
    ctx.beginPath();
    series.underlay.forEach(([a, b], i) => {
      if (i === 0) ctx.moveTo(px(a), py(b));
      else ctx.lineTo(px(a), py(b));
    });
    ctx.stroke();
  }
  for (const [a, b] of series.referencePoints) circle(ctx, px(a), py(b), 3, "#999");
  for (const [a, b] of series.solutions) dot(ctx, px(a), py(b), 2.5, "#111");
  const [za, zb] = series.aspiration;
  star(ctx, px(za), py(zb), 7, "#c22");
}

export function renderScatter3d(
  ctx: Ctx,
  width: number,
  height: number,
  series: Series,
  range: [number, number],
  rot: Rotation,
) {
  clear(ctx, width, height);
  const area = plotArea(width, height);
  // projected data-unit extent for the given rotation, derived from the box
  // corners so rotation never clips points inside the range
  const corners: number[][] = [];
  for (const a of range)
    for (const b of range) for (const c of range) corners.push([a, b, c]);
  const projected = corners.map((p) => project3d(p, rot));
  const xs = projected.map((p) => p.x);
  const ys = projected.map((p) => p.y);
  const xr: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yr: [number, number] = [Math.min(...ys), Math.max(...ys)];
  const px = (v: number) => scale2d(v, xr, area.x0, area.x1);
  const py = (v: number) => scale2d(v, yr, area.y0, area.y1);

  // axes from the origin corner
  const origin = project3d([range[0], range[0], range[0]], rot);
  const axes: Array<[number[], string]> = [
    [[range[1], range[0], range[0]], "f1"],
    [[range[0], range[1], range[0]], "f2"],
    [[range[0], range[0], range[1]], "f3"],
  ];
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.lineWidth = 1;
  for (const [end, label] of axes) {
    const e = project3d(end, rot);
    ctx.beginPath();
    ctx.moveTo(px(origin.x), py(origin.y));
    ctx.lineTo(px(e.x), py(e.y));
    ctx.stroke();
    ctx.fillText(label, px(e.x) + 4, py(e.y));
  }

  const paint = (
    pts: number[][],
    painter: (x: number, y: number, depth: number) => void,
  ) => {
    const proj = pts.map((p) => ({ ...project3d(p, rot) }));
    proj.sort((a, b) => a.depth - b.depth);
    for (const p of proj) painter(px(p.x), py(p.y), p.depth);
  };
  paint(series.referencePoints, (x, y) => circle(ctx, x, y, 3, "#999"));
  paint(series.solutions, (x, y) => dot(ctx, x, y, 2.5, "#111"));
  const z = project3d(series.aspiration, rot);
  star(ctx, px(z.x), py(z.y), 7, "#c22");
}

export function renderParallel(
  ctx: Ctx,
  width: number,
  height: number,
  series: Series,
  range: [number, number],
) {
  clear(ctx, width, height);
  const m = series.aspiration.length;
  const area = plotArea(width, height);
  const axisX = (j: number) =>
    area.x0 + ((area.x1 - area.x0) * j) / Math.max(1, m - 1);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  for (let j = 0; j < m; j++) {
    ctx.beginPath();
    ctx.moveTo(axisX(j), area.y0);
    ctx.lineTo(axisX(j), area.y1);
    ctx.stroke();
    ctx.fillText(`f${j + 1}`, axisX(j) - 8, area.y0 + 14);
  }
  ctx.fillText(range[1].toFixed(2), area.x0 - 38, area.y1 + 4);
  ctx.fillText(range[0].toFixed(2), area.x0 - 38, area.y0 + 4);

  const drawLine = (point: number[], stroke: string, widthPx: number) => {
    const ts = parallelLine(point, range);
    ctx.strokeStyle = stroke;
    ctx.lineWidth = widthPx;
    ctx.beginPath();
    ts.forEach((t, j) => {
      const y = area.y0 + t * (area.y1 - area.y0);
      if (j === 0) ctx.moveTo(axisX(j), y);
      else ctx.lineTo(axisX(j), y);
    });
    ctx.stroke();
  };
  for (const p of series.referencePoints) drawLine(p, "rgba(150,150,150,0.35)", 1);
  for (const p of series.solutions) drawLine(p, "rgba(17,17,17,0.55)", 1);
  drawLine(series.aspiration, "#c22", 2.5);
}

export function renderSeries(
  ctx: Ctx,
  width: number,
  height: number,
  kind: "scatter2d" | "scatter3d" | "parallel",
  series: Series,
  range: [number, number],
  rot: Rotation = DEFAULT_ROTATION,
) {
  if (kind === "scatter2d") renderScatter2d(ctx, width, height, series, range);
  else if (kind === "scatter3d") renderScatter3d(ctx, width, height, series, range, rot);
  else renderParallel(ctx, width, height, series, range);
}
