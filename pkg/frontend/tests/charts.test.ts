import { beforeEach, describe, expect, it } from "vitest";

import type { PanelPayload } from "../dist/api.js";
import { ROLE_COLORS, renderStackedBars } from "../dist/charts/bars.js";
import { layoutGraph, renderForceGraph } from "../dist/charts/force.js";
import { renderScatter } from "../dist/charts/scatter.js";
import { container, fixture } from "./helpers.js";

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("stacked bars", () => {
  it("draws rects whose data sums equal the API series sums", () => {
    const payload = fixture<PanelPayload>("author_works_per_year.json");
    const target = container();
    renderStackedBars(target, payload.years ?? [], payload.series ?? [], {
      colors: ROLE_COLORS,
    });
    const rects = Array.from(target.querySelectorAll("rect[data-series]"));
    expect(rects.length).toBeGreaterThan(0);
    const drawn: Record<string, number> = {};
    for (const rect of rects) {
      const key = rect.getAttribute("data-series")!;
      drawn[key] = (drawn[key] ?? 0) + Number(rect.getAttribute("data-value"));
    }
    for (const entry of payload.series ?? []) {
      const expected = entry.values.reduce((a, b) => a + b, 0);
      expect(drawn[entry.key] ?? 0).toBeCloseTo(expected, 9);
    }
    // the fixture author has eight dated works in total
    const total = Object.values(drawn).reduce((a, b) => a + b, 0);
    expect(total).toBe(8);
  });

  it("uses the five role colors and renders a legend", () => {
    const payload = fixture<PanelPayload>("author_works_per_year.json");
    const target = container();
    renderStackedBars(target, payload.years ?? [], payload.series ?? [], {
      colors: ROLE_COLORS,
    });
    const fills = new Set(
      Array.from(target.querySelectorAll("rect[data-series]")).map((rect) =>
        rect.getAttribute("fill"),
      ),
    );
    for (const fill of fills) {
      expect(Object.values(ROLE_COLORS)).toContain(fill);
    }
    expect(target.querySelectorAll(".legend-item").length).toBe(payload.series?.length);
  });

  it("shows the missing-pages note for page production", () => {
    const payload = fixture<PanelPayload>("org_page_production.json");
    expect(payload.missing_pages).toBe(1);
    const target = container();
    renderStackedBars(target, payload.years ?? [], payload.series ?? [], {
      note: `${payload.missing_pages} work(s) lack a page count and are not shown`,
    });
    expect(target.querySelector(".chart-note")?.textContent).toContain("1 work(s)");
  });
});

describe("scatter", () => {
  it("places the venue that maximizes both axes in the top right", () => {
    const payload = fixture<PanelPayload>("publisher_scatter.json");
    const points = payload.points ?? [];
    const best = points.reduce((a, b) => (b.x >= a.x && b.y >= a.y ? b : a));
    expect(best.label).toBe("Genome Biology");

    const target = container();
    renderScatter(target, points);
    const circles = Array.from(target.querySelectorAll("circle"));
    const byVenue = new Map(circles.map((c) => [c.getAttribute("data-venue"), c]));
    const bestCircle = byVenue.get(best.venue)!;
    for (const circle of circles) {
      expect(Number(bestCircle.getAttribute("cx"))).toBeGreaterThanOrEqual(
        Number(circle.getAttribute("cx")),
      );
      // SVG y grows downward: top-right means minimal cy
      expect(Number(bestCircle.getAttribute("cy"))).toBeLessThanOrEqual(
        Number(circle.getAttribute("cy")),
      );
    }
  });

  it("labels points for hover inspection", () => {
    const payload = fixture<PanelPayload>("publisher_scatter.json");
    const target = container();
    renderScatter(target, payload.points ?? []);
    const titles = Array.from(target.querySelectorAll("title")).map((t) => t.textContent);
    expect(titles.some((t) => t?.includes("Genome Biology"))).toBe(true);
  });
});

describe("force graph", () => {
  it("renders the citation graph with one node per work", () => {
    const payload = fixture<PanelPayload>("work_citation_graph.json");
    const target = container();
    renderForceGraph(target, payload.edges ?? []);
    const ids = new Set<string>();
    for (const edge of payload.edges ?? []) {
      ids.add(edge.source.id);
      ids.add(edge.target.id);
    }
    expect(target.querySelectorAll("g.node").length).toBe(ids.size);
    expect(target.querySelectorAll("line.edge").length).toBe(payload.edges?.length);
  });

  it("caps the node count", () => {
    const edges = Array.from({ length: 50 }, (_unused, i) => ({
      source: { id: `Q${i + 1}` },
      target: { id: `Q${i + 1000}` },
    }));
    const { nodes } = layoutGraph(edges, 10);
    expect(nodes.length).toBeLessThanOrEqual(10);
  });

  it("is deterministic for a given input", () => {
    const payload = fixture<PanelPayload>("work_citation_graph.json");
    const first = layoutGraph(payload.edges ?? []);
    const second = layoutGraph(payload.edges ?? []);
    expect(second).toEqual(first);
  });
});
