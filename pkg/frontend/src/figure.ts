import { textWidth } from "./font5x7";
import { BLACK, BLUE, Canvas, FILL, GREY, WHITE } from "./raster";

export type FigureKind = "histogram" | "curve" | "scatter";

export interface SeriesPoint {
  x: number;
  y: number;
  err?: number;
}

export interface HistogramBin {
  x0: number;
  x1: number;
  height: number;
}

export interface FigureSpec {
  kind: FigureKind;
  title: string;
  xLabel: string;
  yLabel: string;
  bins?: HistogramBin[];
  points?: SeriesPoint[];
}

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = { left: 72, right: 24, top: 40, bottom: 56 };

/** Stable short decimal for coordinates and ticks. */
export function fmt(v: number): string {
  if (!Number.isFinite(v)) return v > 0 ? "inf" : "-inf";
  if (v === 0) return "0";
  const a = Math.abs(v);
  let s: string;
  if (a >= 1e5 || a < 1e-4) {
    s = v.toExponential(2).replace("e+", "e").replace(/\.?0+e/, "e");
  } else {
    s = v.toPrecision(5);
    if (s.includes(".")) s = s.replace(/\.?0+$/, "");
  }
  return s;
}

/** Round tick positions covering [lo, hi] at a 1/2/5 step. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) / 2 : 1;
    return niceTicks(lo - pad, lo + pad, count);
  }
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm > 5 ? 10 : norm > 2 ? 5 : norm > 1 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

interface Layout {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  xTicks: number[];
  yTicks: number[];
}

function dataRange(spec: FigureSpec): Layout {
  let xs: number[] = [];
  let yLo = 0;
  let yHi = 0;
  if (spec.kind === "histogram") {
    const bins = spec.bins!;
    xs = bins.flatMap((b) => [b.x0, b.x1]);
    yHi = Math.max(...bins.map((b) => b.height));
  } else {
    const pts = spec.points!;
    xs = pts.map((p) => p.x);
    yLo = Math.min(0, ...pts.map((p) => p.y - (p.err ?? 0)));
    yHi = Math.max(...pts.map((p) => p.y + (p.err ?? 0)));
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yHi === yLo) yHi = yLo + 1;
  const xPad = spec.kind === "histogram" ? 0 : (xHi - xLo) * 0.05;
  const yPad = (yHi - yLo) * 0.08;
  return {
    xMin: xLo - xPad,
    xMax: xHi + xPad,
    yMin: yLo,
    yMax: yHi + yPad,
    xTicks: niceTicks(xLo, xHi),
    yTicks: niceTicks(yLo, yHi + yPad),
  };
}

function scaleX(l: Layout, v: number): number {
  return MARGIN.left + ((v - l.xMin) / (l.xMax - l.xMin)) * (WIDTH - MARGIN.left - MARGIN.right);
}

function scaleY(l: Layout, v: number): number {
  return HEIGHT - MARGIN.bottom - ((v - l.yMin) / (l.yMax - l.yMin)) * (HEIGHT - MARGIN.top - MARGIN.bottom);
}

function validate(spec: FigureSpec): void {
  if (spec.kind === "histogram") {
    if (!spec.bins || spec.bins.length === 0) {
      throw new Error(`figure '${spec.title}': no histogram bins`);
    }
  } else if (!spec.points || spec.points.length === 0) {
    throw new Error(`figure '${spec.title}': no data points`);
  }
}

const SVG_BLUE = "#3665a3";
const SVG_FILL = "#86a7d2";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(spec: FigureSpec): string {
  validate(spec);
  const l = dataRange(spec);
  const out: string[] = [];
  const f = (v: number) => Number(v.toFixed(2)).toString();
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  out.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  out.push(`<text x="${WIDTH / 2}" y="22" font-family="monospace" font-size="15" text-anchor="middle">${esc(spec.title)}</text>`);
  // gridlines and ticks
  for (const t of l.yTicks) {
    const y = f(scaleY(l, t));
    out.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${WIDTH - MARGIN.right}" y2="${y}" stroke="#dddddd"/>`);
    out.push(`<text x="${MARGIN.left - 6}" y="${f(scaleY(l, t) + 4)}" font-family="monospace" font-size="11" text-anchor="end">${fmt(t)}</text>`);
  }
  for (const t of l.xTicks) {
    const x = f(scaleX(l, t));
    out.push(`<line x1="${x}" y1="${HEIGHT - MARGIN.bottom}" x2="${x}" y2="${HEIGHT - MARGIN.bottom + 4}" stroke="black"/>`);
    out.push(`<text x="${x}" y="${HEIGHT - MARGIN.bottom + 18}" font-family="monospace" font-size="11" text-anchor="middle">${fmt(t)}</text>`);
  }
  // data
  if (spec.kind === "histogram") {
    for (const b of spec.bins!) {
      const x0 = scaleX(l, b.x0);
      const x1 = scaleX(l, b.x1);
      const y = scaleY(l, b.height);
      const y0 = scaleY(l, 0);
      out.push(
        `<rect x="${f(x0)}" y="${f(y)}" width="${f(Math.max(1, x1 - x0 - 1))}" height="${f(Math.max(0, y0 - y))}" fill="${SVG_FILL}" stroke="${SVG_BLUE}"/>`,
      );
    }
  } else {
    const pts = spec.points!;
    for (const p of pts) {
      if (p.err !== undefined && p.err > 0) {
        const x = f(scaleX(l, p.x));
        out.push(`<line x1="${x}" y1="${f(scaleY(l, p.y - p.err))}" x2="${x}" y2="${f(scaleY(l, p.y + p.err))}" stroke="${SVG_BLUE}"/>`);
      }
    }
    if (spec.kind === "curve" && pts.length > 1) {
      const path = pts
        .map((p, i) => `${i === 0 ? "M" : "L"}${f(scaleX(l, p.x))} ${f(scaleY(l, p.y))}`)
        .join(" ");
      out.push(`<path d="${path}" fill="none" stroke="${SVG_BLUE}" stroke-width="1.5"/>`);
    }
    for (const p of pts) {
      out.push(`<circle cx="${f(scaleX(l, p.x))}" cy="${f(scaleY(l, p.y))}" r="3" fill="${SVG_BLUE}"/>`);
    }
  }
  // axes over the data
  out.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${HEIGHT - MARGIN.bottom}" stroke="black"/>`);
  out.push(`<line x1="${MARGIN.left}" y1="${HEIGHT - MARGIN.bottom}" x2="${WIDTH - MARGIN.right}" y2="${HEIGHT - MARGIN.bottom}" stroke="black"/>`);
  out.push(`<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 14}" font-family="monospace" font-size="13" text-anchor="middle">${esc(spec.xLabel)}</text>`);
  out.push(`<text x="18" y="${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 18 ${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2})">${esc(spec.yLabel)}</text>`);
  out.push("</svg>");
  return out.join("\n") + "\n";
}

export function renderPng(spec: FigureSpec): Buffer {
  validate(spec);
  const l = dataRange(spec);
  const cv = new Canvas(WIDTH, HEIGHT, WHITE);
  cv.text(
    Math.round(WIDTH / 2 - textWidth(spec.title, 2) / 2),
    10,
    spec.title,
    BLACK,
    2,
  );
  for (const t of l.yTicks) {
    const y = scaleY(l, t);
    cv.line(MARGIN.left, y, WIDTH - MARGIN.right, y, [221, 221, 221]);
    const label = fmt(t);
    cv.text(MARGIN.left - 8 - textWidth(label), y - 3, label, BLACK);
  }
  for (const t of l.xTicks) {
    const x = scaleX(l, t);
    cv.line(x, HEIGHT - MARGIN.bottom, x, HEIGHT - MARGIN.bottom + 4, BLACK);
    const label = fmt(t);
    cv.text(x - textWidth(label) / 2, HEIGHT - MARGIN.bottom + 8, label, BLACK);
  }
  if (spec.kind === "histogram") {
    const y0 = scaleY(l, 0);
    for (const b of spec.bins!) {
      const x0 = scaleX(l, b.x0);
      const x1 = Math.max(scaleX(l, b.x0) + 1, scaleX(l, b.x1) - 1);
      const y = scaleY(l, b.height);
      cv.fillRect(x0, y, x1, y0, FILL);
      cv.line(x0, y, x1, y, BLUE);
      cv.line(x0, y, x0, y0, BLUE);
      cv.line(x1, y, x1, y0, BLUE);
    }
  } else {
    const pts = spec.points!;
    for (const p of pts) {
      if (p.err !== undefined && p.err > 0) {
        const x = scaleX(l, p.x);
        cv.line(x, scaleY(l, p.y - p.err), x, scaleY(l, p.y + p.err), BLUE);
      }
    }
    if (spec.kind === "curve" && pts.length > 1) {
      for (let i = 1; i < pts.length; i++) {
        cv.line(
          scaleX(l, pts[i - 1].x),
          scaleY(l, pts[i - 1].y),
          scaleX(l, pts[i].x),
          scaleY(l, pts[i].y),
          BLUE,
        );
      }
    }
    for (const p of pts) {
      cv.disc(Math.round(scaleX(l, p.x)), Math.round(scaleY(l, p.y)), 3, BLUE);
    }
  }
  cv.line(MARGIN.left, MARGIN.top, MARGIN.left, HEIGHT - MARGIN.bottom, BLACK);
  cv.line(MARGIN.left, HEIGHT - MARGIN.bottom, WIDTH - MARGIN.right, HEIGHT - MARGIN.bottom, BLACK);
  cv.text(
    Math.round((MARGIN.left + WIDTH - MARGIN.right) / 2 - textWidth(spec.xLabel) / 2),
    HEIGHT - 22,
    spec.xLabel,
    BLACK,
  );
  cv.textUp(
    10,
    Math.round((MARGIN.top + HEIGHT - MARGIN.bottom) / 2 + textWidth(spec.yLabel) / 2),
    spec.yLabel,
    BLACK,
  );
  return cv.toPng();
}

/** Equal-width bins over the value range; weights default to 1 per value. */
export function buildBins(values: number[], weights?: number[], binCount = 24): HistogramBin[] {
  if (values.length === 0) throw new Error("no values to bin");
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  if (lo === hi) {
    return [{ x0: lo - 0.5, x1: lo + 0.5, height: (weights ?? values.map(() => 1)).reduce((a, b) => a + b, 0) }];
  }
  const n = Math.min(binCount, Math.max(4, Math.ceil(Math.sqrt(values.length) * 2)));
  const width = (hi - lo) / n;
  const bins: HistogramBin[] = [];
  for (let i = 0; i < n; i++) {
    bins.push({ x0: lo + i * width, x1: lo + (i + 1) * width, height: 0 });
  }
  values.forEach((v, i) => {
    const idx = Math.min(n - 1, Math.floor((v - lo) / width));
    bins[idx].height += weights ? weights[i] : 1;
  });
  return bins;
}
