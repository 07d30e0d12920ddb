// SVG renderers over PlotData blocks, drawn verbatim: the series arrays
// are positioned, never transformed or re-derived.

import type { PlotData } from './types.js';

const W = 640;
const BAR_H = 22;
const PAD_L = 170;
const PAD_R = 60;

function svgEl(doc: Document, tag: string, attrs: Record<string, string | number>) {
  const el = doc.createElementNS('http://www.w3.org/2000/svg', tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

function scale(lo: number, hi: number) {
  const span = hi - lo || 1;
  return (v: number) => PAD_L + ((v - lo) / span) * (W - PAD_L - PAD_R);
}

/** Point-plus-interval rows (uncertainty-intervals blocks). */
export function intervalChart(doc: Document, plot: PlotData): SVGElement {
  const series = plot.series[0] ?? { label: '', x: [], y: [], lower: [], upper: [] };
  const values = [
    ...series.y.filter((v): v is number => v !== null),
    ...(series.lower ?? []),
    ...(series.upper ?? []),
  ];
  const lo = Math.min(0, ...values);
  const hi = Math.max(0, ...values);
  const sx = scale(lo, hi);
  const height = series.x.length * (BAR_H + 8) + 20;
  const svg = svgEl(doc, 'svg', {
    viewBox: `0 0 ${W} ${height}`,
    width: W,
    height,
    role: 'img',
  });
  const zero = svgEl(doc, 'line', {
    x1: sx(0), x2: sx(0), y1: 4, y2: height - 4, stroke: '#999', 'stroke-dasharray': '3 3',
  });
  svg.appendChild(zero);
  series.x.forEach((label, i) => {
    const y = 14 + i * (BAR_H + 8);
    const value = series.y[i];
    const text = svgEl(doc, 'text', { x: 4, y: y + 5, 'font-size': 12 });
    text.textContent = String(label);
    svg.appendChild(text);
    if (value === null || value === undefined) return;
    const lower = series.lower?.[i];
    const upper = series.upper?.[i];
    if (lower !== undefined && upper !== undefined) {
      svg.appendChild(
        svgEl(doc, 'line', {
          x1: sx(lower), x2: sx(upper), y1: y, y2: y, stroke: '#36c', 'stroke-width': 3,
          class: 'ci-bar',
        }),
      );
    }
    svg.appendChild(svgEl(doc, 'circle', { cx: sx(value), cy: y, r: 4, fill: '#123' }));
  });
  return svg;
}

/** Grouped horizontal bars (subgroup-rates, metric-comparison blocks). */
export function groupedBarChart(doc: Document, plot: PlotData): SVGElement {
  const labels = plot.series[0]?.x ?? [];
  const colors = ['#36c', '#c63', '#3a3', '#939'];
  const values = plot.series.flatMap((s) => s.y.filter((v): v is number => v !== null));
  const lo = Math.min(0, ...values);
  const hi = Math.max(0, ...values, 0.001);
  const sx = scale(lo, hi);
  const rowH = plot.series.length * (BAR_H / plot.series.length + 4) + 14;
  const height = labels.length * rowH + 26;
  const svg = svgEl(doc, 'svg', {
    viewBox: `0 0 ${W} ${height}`,
    width: W,
    height,
    role: 'img',
  });
  plot.series.forEach((s, si) => {
    const legend = svgEl(doc, 'text', {
      x: PAD_L + si * 90, y: 12, 'font-size': 12, fill: colors[si % colors.length],
    });
    legend.textContent = s.label;
    svg.appendChild(legend);
  });
  labels.forEach((label, i) => {
    const y0 = 26 + i * rowH;
    const text = svgEl(doc, 'text', { x: 4, y: y0 + 10, 'font-size': 12 });
    text.textContent = String(label);
    svg.appendChild(text);
    plot.series.forEach((s, si) => {
      const v = s.y[i];
      if (v === null || v === undefined) return;
      const y = y0 + si * (BAR_H / plot.series.length + 4);
      svg.appendChild(
        svgEl(doc, 'rect', {
          x: Math.min(sx(0), sx(v)),
          y,
          width: Math.abs(sx(v) - sx(0)) || 1,
          height: BAR_H / plot.series.length,
          fill: colors[si % colors.length],
          class: 'bar',
        }),
      );
    });
  });
  return svg;
}
