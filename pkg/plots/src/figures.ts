import { loadTable, SchemaError } from "./csv";
import { span, SvgPlot } from "./svg";

export type FigureKind =
  | "loglog-convergence"
  | "envelope"
  | "histogram"
  | "trajectory";

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  title?: string;
}

const FRAME = { width: 560, height: 420, margin: 56 };

/** Least-squares slope of log(y) against log(x), for the annotation. */
export function loglogSlope(x: number[], y: number[]): number {
  const lx = x.map(Math.log);
  const ly = y.map(Math.log);
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) ** 2;
  }
  return num / den;
}

function convergenceFigure(spec: FigureSpec): string {
  const t = loadTable(spec.input, ["level", "endpoint_rms"]);
  const level = t.col("level");
  const rms = t.col("endpoint_rms");
  const slope = loglogSlope(level, rms);
  const [xMin, xMax] = span(level, true);
  const [yMin, yMax] = span(rms, true);
  const p = new SvgPlot(
    { ...FRAME, xMin, xMax, yMin, yMax, xLog: true, yLog: true },
    spec.title ?? "Wong-Zakai endpoint error vs interpolation level",
    "level (log)", "endpoint RMS (log)"
  );
  p.polyline(level, rms, "#1f77b4");
  p.dots(level, rms, "#1f77b4");
  // fitted slope line through the geometric midpoint
  const midX = Math.exp((Math.log(level[0]) + Math.log(level[level.length - 1])) / 2);
  const midY = Math.exp((Math.log(rms[0]) + Math.log(rms[rms.length - 1])) / 2);
  const fitY = level.map((l) => midY * Math.pow(l / midX, slope));
  p.polyline(level, fitY, "#d62728", "5,4");
  p.note(`fitted slope ${slope.toFixed(3)}`);
  return p.render();
}

function envelopeFigure(spec: FigureSpec): string {
  const t = loadTable(spec.input, ["delta", "S", "se", "envelope"]);
  const delta = t.col("delta");
  const S = t.col("S");
  const se = t.col("se");
  const env = t.col("envelope");
  const [xMin, xMax] = span(delta, true);
  const [yMin, yMax] = span([...S, ...env, 0]);
  const p = new SvgPlot(
    { ...FRAME, xMin, xMax, yMin, yMax, xLog: true },
    spec.title ?? "stability functional S(delta) under the fitted envelope",
    "delta (log)", "S(delta)"
  );
  p.polyline(delta, env, "#d62728", "5,4");
  p.errorBars(delta, S, se.map((v) => 2 * v), "#444444");
  const below = S.map((s, i) => s <= env[i] + 2 * se[i]);
  p.dots(delta.filter((_, i) => below[i]), S.filter((_, i) => below[i]), "#2ca02c");
  p.dots(delta.filter((_, i) => !below[i]), S.filter((_, i) => !below[i]), "#d62728");
  const nBad = below.filter((b) => !b).length;
  p.note(nBad === 0 ? "all points within 2 SE of the envelope" : `${nBad} point(s) above`);
  return p.render();
}

function histogramFigure(spec: FigureSpec): string {
  const t = loadTable(spec.input, ["rho_T"]);
  const rho = t.col("rho_T");
  const lo = Math.min(...rho);
  const hi = Math.max(...rho);
  const nBins = 40;
  const width = (hi - lo) / nBins || 1;
  const counts = new Array(nBins).fill(0);
  for (const v of rho) {
    const k = Math.min(nBins - 1, Math.floor((v - lo) / width));
    counts[k] += 1;
  }
  const lefts = counts.map((_, k) => lo + k * width);
  const rights = lefts.map((l) => l + width);
  const p = new SvgPlot(
    { ...FRAME, xMin: lo, xMax: hi, yMin: 0, yMax: Math.max(...counts) * 1.08 },
    spec.title ?? "terminal density rho_T over paths and points",
    "rho_T", "count"
  );
  p.bars(lefts, rights, counts, "#1f77b4");
  for (const q of [1, 2]) {
    const m = rho.reduce((a, b) => a + Math.pow(b, q), 0) / rho.length;
    p.note(`E rho^${q} = ${m.toFixed(4)}`, q - 1);
  }
  return p.render();
}

function trajectoryFigure(spec: FigureSpec): string {
  const t = loadTable(spec.input, ["t", "x0", "x1"]);
  const x = t.col("x0");
  const y = t.col("x1");
  const p = new SvgPlot(
    { ...FRAME, height: 480, xMin: -1.15, xMax: 1.15, yMin: -1.15, yMax: 1.15 },
    spec.title ?? "flow path, equatorial projection",
    "x", "y"
  );
  // unit-circle outline for the sphere silhouette
  const ang = Array.from({ length: 121 }, (_, i) => (i * 2 * Math.PI) / 120);
  p.polyline(ang.map(Math.cos), ang.map(Math.sin), "#bbbbbb");
  p.polyline(x, y, "#1f77b4");
  p.dots([x[0]], [y[0]], "#2ca02c", 4);
  p.dots([x[x.length - 1]], [y[y.length - 1]], "#d62728", 4);
  p.note(`${x.length} recorded states`);
  return p.render();
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "loglog-convergence":
      return convergenceFigure(spec);
    case "envelope":
      return envelopeFigure(spec);
    case "histogram":
      return histogramFigure(spec);
    case "trajectory":
      return trajectoryFigure(spec);
    default:
      throw new SchemaError(`unknown figure kind: ${(spec as FigureSpec).kind}`);
  }
}
