// Stacked per-year bar chart rendered as plain SVG. Each rect carries
// data-series / data-year / data-value attributes so tests (and curious
// users) can audit that the drawing matches the API payload exactly.

import type { SeriesEntry } from "../api.js";
import { svg, el } from "../dom.js";

export const ROLE_COLORS: Record<string, string> = {
  first: "#2c7fb8",
  middle: "#a6bddb",
  last: "#fdae61",
  solo: "#41ab5d",
  unknown: "#969696",
};

export const PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
  "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0",
];

export interface BarChartOptions {
  colors?: Record<string, string>;
  width?: number;
  height?: number;
  note?: string;
}

export function renderStackedBars(
  container: HTMLElement,
  years: number[],
  series: SeriesEntry[],
  options: BarChartOptions = {},
): void {
  const width = options.width ?? 640;
  const height = options.height ?? 260;
  const margin = { top: 10, right: 10, bottom: 28, left: 36 };
  const innerWidth = width - margin.left - margin.right;
  const innerHeight = height - margin.top - margin.bottom;

  const totals = years.map((_year, index) =>
    series.reduce((sum, entry) => sum + (entry.values[index] ?? 0), 0),
  );
  const maxTotal = Math.max(1e-9, ...totals);
  const slot = years.length ? innerWidth / years.length : innerWidth;
  const barWidth = Math.max(4, slot * 0.7);

  const root = svg("svg", {
    viewBox: `0 0 ${width} ${height}`,
    class: "chart stacked-bars",
    role: "img",
  });
  const plot = svg("g", { transform: `translate(${margin.left},${margin.top})` });
  root.append(plot);

  // y axis: zero line plus the maximum
  plot.append(
    svg("line", {
      x1: "0", y1: String(innerHeight), x2: String(innerWidth), y2: String(innerHeight),
      class: "axis",
    }),
    svg("text", { x: "-6", y: String(innerHeight), class: "tick", "text-anchor": "end" }, "0"),
    svg("text", { x: "-6", y: "10", class: "tick", "text-anchor": "end" },
      String(Math.round(maxTotal * 100) / 100)),
  );

  years.forEach((year, index) => {
    const x = index * slot + (slot - barWidth) / 2;
    let stackTop = innerHeight;
    for (const [seriesIndex, entry] of series.entries()) {
      const value = entry.values[index] ?? 0;
      if (value <= 0) continue;
      const barHeight = (value / maxTotal) * innerHeight;
      stackTop -= barHeight;
      const color =
        options.colors?.[entry.key] ?? PALETTE[seriesIndex % PALETTE.length];
      const rect = svg("rect", {
        x: String(x),
        y: String(stackTop),
        width: String(barWidth),
        height: String(barHeight),
        fill: color,
        "data-series": entry.key,
        "data-year": String(year),
        "data-value": String(value),
      });
      rect.append(svg("title", {}, `${entry.label ?? entry.key}, ${year}: ${value}`));
      plot.append(rect);
    }
    plot.append(
      svg("text", {
        x: String(x + barWidth / 2),
        y: String(innerHeight + 16),
        class: "tick",
        "text-anchor": "middle",
      }, String(year)),
    );
  });

  const legend = el("div", { class: "legend" });
  for (const [seriesIndex, entry] of series.entries()) {
    const color = options.colors?.[entry.key] ?? PALETTE[seriesIndex % PALETTE.length];
    const item = el("span", { class: "legend-item" });
    const swatch = el("span", { class: "swatch" });
    swatch.style.backgroundColor = color;
    item.append(swatch, document.createTextNode(entry.label ?? entry.key));
    legend.append(item);
  }

  container.append(root, legend);
  if (options.note) {
    container.append(el("p", { class: "chart-note" }, options.note));
  }
}
