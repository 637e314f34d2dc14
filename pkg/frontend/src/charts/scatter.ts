// Scatter plot (works published vs citations received, one point per venue).
// Points link to the venue's aspect page and reveal their label on hover.

import type { ScatterPointPayload } from "../api.js";
import { el, entityHref, nav, svg } from "../dom.js";

export interface ScatterOptions {
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
}

export function renderScatter(
  container: HTMLElement,
  points: ScatterPointPayload[],
  options: ScatterOptions = {},
): void {
  const width = options.width ?? 640;
  const height = options.height ?? 300;
  const margin = { top: 14, right: 20, bottom: 34, left: 46 };
  const innerWidth = width - margin.left - margin.right;
  const innerHeight = height - margin.top - margin.bottom;

  const maxX = Math.max(1, ...points.map((p) => p.x));
  const maxY = Math.max(1, ...points.map((p) => p.y));
  const placeX = (x: number) => (x / maxX) * innerWidth;
  const placeY = (y: number) => innerHeight - (y / maxY) * innerHeight;

  const root = svg("svg", {
    viewBox: `0 0 ${width} ${height}`,
    class: "chart scatter",
    role: "img",
  });
  const plot = svg("g", { transform: `translate(${margin.left},${margin.top})` });
  root.append(plot);

  plot.append(
    svg("line", { x1: "0", y1: String(innerHeight), x2: String(innerWidth), y2: String(innerHeight), class: "axis" }),
    svg("line", { x1: "0", y1: "0", x2: "0", y2: String(innerHeight), class: "axis" }),
    svg("text", { x: String(innerWidth / 2), y: String(innerHeight + 28), class: "tick", "text-anchor": "middle" },
      options.xLabel ?? "works"),
    svg("text", {
      x: "-34", y: String(innerHeight / 2), class: "tick",
      transform: `rotate(-90 -34 ${innerHeight / 2})`, "text-anchor": "middle",
    }, options.yLabel ?? "citations"),
    svg("text", { x: "-6", y: String(innerHeight), class: "tick", "text-anchor": "end" }, "0"),
    svg("text", { x: "-6", y: "10", class: "tick", "text-anchor": "end" }, String(maxY)),
    svg("text", { x: String(innerWidth), y: String(innerHeight + 16), class: "tick", "text-anchor": "end" }, String(maxX)),
  );

  for (const point of points) {
    const group = svg("g", { class: "point", "data-venue": point.venue });
    const circle = svg("circle", {
      cx: String(placeX(point.x)),
      cy: String(placeY(point.y)),
      r: "6",
      "data-venue": point.venue,
      "data-x": String(point.x),
      "data-y": String(point.y),
    });
    circle.append(svg("title", {}, `${point.label ?? point.venue}: ${point.x} works, ${point.y} citations`));
    const label = svg("text", {
      x: String(placeX(point.x) + 9),
      y: String(placeY(point.y) + 4),
      class: "point-label",
    }, point.label ?? point.venue);
    group.append(circle, label);
    group.addEventListener("click", () => nav.go(entityHref(point.venue)));
    plot.append(group);
  }

  container.append(root);
  if (!points.length) {
    container.append(el("p", { class: "empty" }, "no data for this panel"));
  }
}
