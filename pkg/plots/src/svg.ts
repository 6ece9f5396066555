/** Hand-rolled SVG scatter/line plotting, enough for the four figure kinds. */

export interface Frame {
  width: number;
  height: number;
  margin: number;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  xLog?: boolean;
  yLog?: boolean;
}

const fmt = (v: number) => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(4)));
  return v.toExponential(2);
};

export class SvgPlot {
  private parts: string[] = [];
  constructor(readonly frame: Frame, title: string, xLabel: string, yLabel: string) {
    const { width, height } = frame;
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
      `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14" font-family="sans-serif">${title}</text>`,
      `<text x="${width / 2}" y="${height - 4}" text-anchor="middle" font-size="11" font-family="sans-serif">${xLabel}</text>`,
      `<text x="12" y="${height / 2}" text-anchor="middle" font-size="11" font-family="sans-serif" transform="rotate(-90 12 ${height / 2})">${yLabel}</text>`
    );
    this.axes();
  }

  px(x: number): number {
    const { margin, width, xMin, xMax, xLog } = this.frame;
    const [a, b] = xLog ? [Math.log10(xMin), Math.log10(xMax)] : [xMin, xMax];
    const v = xLog ? Math.log10(x) : x;
    return margin + ((v - a) / (b - a)) * (width - 2 * margin);
  }

  py(y: number): number {
    const { margin, height, yMin, yMax, yLog } = this.frame;
    const [a, b] = yLog ? [Math.log10(yMin), Math.log10(yMax)] : [yMin, yMax];
    const v = yLog ? Math.log10(y) : y;
    return height - margin - ((v - a) / (b - a)) * (height - 2 * margin);
  }

  private axes() {
    const { margin, width, height, xMin, xMax, yMin, yMax } = this.frame;
    const x0 = margin, x1 = width - margin, y0 = height - margin, y1 = margin;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
      `<text x="${x0}" y="${y0 + 14}" font-size="10" font-family="sans-serif">${fmt(xMin)}</text>`,
      `<text x="${x1}" y="${y0 + 14}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(xMax)}</text>`,
      `<text x="${x0 - 4}" y="${y0}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(yMin)}</text>`,
      `<text x="${x0 - 4}" y="${y1 + 4}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(yMax)}</text>`
    );
  }

  polyline(xs: number[], ys: number[], color: string, dash = "") {
    const pts = xs.map((x, i) => `${this.px(x).toFixed(2)},${this.py(ys[i]).toFixed(2)}`);
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.5"${dashAttr}/>`
    );
  }

  dots(xs: number[], ys: number[], color: string, r = 3) {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${this.px(xs[i]).toFixed(2)}" cy="${this.py(ys[i]).toFixed(2)}" r="${r}" fill="${color}"/>`
      );
    }
  }

  errorBars(xs: number[], ys: number[], half: number[], color: string) {
    for (let i = 0; i < xs.length; i++) {
      const x = this.px(xs[i]);
      const yl = this.py(ys[i] - half[i]);
      const yh = this.py(ys[i] + half[i]);
      this.parts.push(
        `<line x1="${x}" y1="${yl}" x2="${x}" y2="${yh}" stroke="${color}" stroke-width="1"/>`
      );
    }
  }

  bars(lefts: number[], rights: number[], heights: number[], color: string) {
    const y0 = this.py(Math.max(this.frame.yMin, 0));
    for (let i = 0; i < lefts.length; i++) {
      const xl = this.px(lefts[i]);
      const xr = this.px(rights[i]);
      const yt = this.py(heights[i]);
      this.parts.push(
        `<rect x="${xl.toFixed(2)}" y="${yt.toFixed(2)}" width="${(xr - xl).toFixed(2)}" height="${(y0 - yt).toFixed(2)}" fill="${color}" stroke="white" stroke-width="0.5"/>`
      );
    }
  }

  note(text: string, line = 0) {
    const { width, margin } = this.frame;
    this.parts.push(
      `<text x="${width - margin}" y="${margin + 14 + 14 * line}" text-anchor="end" font-size="11" font-family="sans-serif">${text}</text>`
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function span(values: number[], log = false): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (log) return [lo / 1.3, hi * 1.3];
  const pad = 0.06 * (hi - lo);
  return [lo - pad, hi + pad];
}
