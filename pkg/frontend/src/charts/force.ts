// Node-link graph with a small deterministic force-directed layout:
// repulsion between all nodes, springs along edges, gravity to the center.
// The node set is capped; every node links to its own aspect page.

import type { GraphEdge } from "../api.js";
import { el, entityHref, nav, svg } from "../dom.js";

export const NODE_CAP = 200;

interface LayoutNode {
  id: string;
  label: string;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

function hashAngle(id: string): number {
  let hash = 2166136261;
  for (let i = 0; i < id.length; i++) {
    hash = (hash ^ id.charCodeAt(i)) * 16777619;
    hash >>>= 0;
  }
  return (hash % 6283) / 1000; // radians
}

export function layoutGraph(
  edges: GraphEdge[],
  cap: number = NODE_CAP,
  iterations = 120,
): { nodes: LayoutNode[]; links: Array<[number, number, number]> } {
  const nodes: LayoutNode[] = [];
  const index = new Map<string, number>();

  const intern = (id: string, label?: string | null): number | null => {
    const existing = index.get(id);
    if (existing !== undefined) {
      if (label && !nodes[existing].label) nodes[existing].label = label;
      return existing;
    }
    if (nodes.length >= cap) return null;
    const angle = hashAngle(id);
    const radius = 60 + (nodes.length % 17) * 9;
    nodes.push({
      id,
      label: label ?? "",
      x: Math.cos(angle) * radius,
      y: Math.sin(angle) * radius,
      vx: 0,
      vy: 0,
    });
    index.set(id, nodes.length - 1);
    return nodes.length - 1;
  };

  const links: Array<[number, number, number]> = [];
  for (const edge of edges) {
    const source = intern(edge.source.id, edge.source.label);
    const target = intern(edge.target.id, edge.target.label);
    if (source === null || target === null || source === target) continue;
    links.push([source, target, edge.weight ?? 1]);
  }

  const spring = 70;
  for (let step = 0; step < iterations; step++) {
    const temperature = 1 - step / iterations;
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        let dx = nodes[i].x - nodes[j].x;
        let dy = nodes[i].y - nodes[j].y;
        const distSq = Math.max(25, dx * dx + dy * dy);
        const push = 1200 / distSq;
        const dist = Math.sqrt(distSq);
        dx /= dist;
        dy /= dist;
        nodes[i].vx += dx * push;
        nodes[i].vy += dy * push;
        nodes[j].vx -= dx * push;
        nodes[j].vy -= dy * push;
      }
    }
    for (const [a, b] of links) {
      const dx = nodes[b].x - nodes[a].x;
      const dy = nodes[b].y - nodes[a].y;
      const dist = Math.max(5, Math.hypot(dx, dy));
      const pull = (dist - spring) * 0.02;
      nodes[a].vx += (dx / dist) * pull;
      nodes[a].vy += (dy / dist) * pull;
      nodes[b].vx -= (dx / dist) * pull;
      nodes[b].vy -= (dy / dist) * pull;
    }
    for (const node of nodes) {
      node.vx -= node.x * 0.01; // gravity
      node.vy -= node.y * 0.01;
      node.x += node.vx * temperature;
      node.y += node.vy * temperature;
      node.vx *= 0.5;
      node.vy *= 0.5;
    }
  }
  return { nodes, links };
}

export function renderForceGraph(
  container: HTMLElement,
  edges: GraphEdge[],
  cap: number = NODE_CAP,
): void {
  const { nodes, links } = layoutGraph(edges, cap);
  if (!nodes.length) {
    container.append(el("p", { class: "empty" }, "no data for this panel"));
    return;
  }
  const xs = nodes.map((n) => n.x);
  const ys = nodes.map((n) => n.y);
  const pad = 40;
  const minX = Math.min(...xs) - pad;
  const minY = Math.min(...ys) - pad;
  const width = Math.max(...xs) - minX + pad;
  const height = Math.max(...ys) - minY + pad;

  const root = svg("svg", {
    viewBox: `${minX} ${minY} ${width} ${height}`,
    class: "chart force-graph",
    role: "img",
  });
  for (const [a, b, weight] of links) {
    root.append(
      svg("line", {
        x1: String(nodes[a].x), y1: String(nodes[a].y),
        x2: String(nodes[b].x), y2: String(nodes[b].y),
        class: "edge",
        "stroke-width": String(Math.min(4, 0.5 + weight * 0.5)),
      }),
    );
  }
  for (const node of nodes) {
    const group = svg("g", { class: "node", "data-id": node.id });
    const circle = svg("circle", { cx: String(node.x), cy: String(node.y), r: "7" });
    circle.append(svg("title", {}, node.label || node.id));
    group.append(
      circle,
      svg("text", { x: String(node.x + 9), y: String(node.y + 4), class: "node-label" },
        node.label || node.id),
    );
    group.addEventListener("click", () => nav.go(entityHref(node.id)));
    root.append(group);
  }
  container.append(root);
}
