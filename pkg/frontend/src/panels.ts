// One card per panel: a header with the "view query" control, then a body
// rendered according to the panel kind from the catalog. Rows and series
// come straight from the JSON API; nothing is recomputed here beyond sorting
// tables on header click.

import type { PanelCatalogEntry, PanelPayload, Row, Term } from "./api.js";
import { ROLE_COLORS, renderStackedBars } from "./charts/bars.js";
import { renderForceGraph } from "./charts/force.js";
import { renderScatter } from "./charts/scatter.js";
import { clear, el, entityHref, entityIdFromUri } from "./dom.js";

function termCell(row: Row, column: string): HTMLElement {
  const cell = el("td");
  const term: Term | undefined = row[column];
  if (!term) return cell;
  const entity = term.type === "uri" ? entityIdFromUri(term.value) : null;
  if (entity) {
    const label = row[`${column}Label`]?.value ?? entity;
    cell.append(el("a", { href: entityHref(entity) }, label));
    cell.dataset.sort = label;
    return cell;
  }
  let text = term.value;
  if (term.datatype?.endsWith("dateTime")) text = text.slice(0, 10);
  cell.textContent = text;
  cell.dataset.sort = text;
  return cell;
}

function visibleColumns(columns: string[]): string[] {
  // a FooLabel column is folded into Foo's link text
  return columns.filter(
    (column) => !(column.endsWith("Label") && columns.includes(column.slice(0, -5))),
  );
}

export function renderTable(container: HTMLElement, columns: string[], rows: Row[]): void {
  if (!rows.length) {
    container.append(el("p", { class: "empty" }, "no data for this panel"));
    return;
  }
  const shown = visibleColumns(columns);
  const table = el("table", { class: "panel-table" });
  const headRow = el("tr");
  for (const column of shown) {
    const th = el("th", { "data-column": column }, column);
    th.addEventListener("click", () => sortTable(table, shown.indexOf(column)));
    headRow.append(th);
  }
  table.append(el("thead", {}, headRow));
  const body = el("tbody");
  for (const row of rows) {
    const tr = el("tr");
    for (const column of shown) tr.append(termCell(row, column));
    body.append(tr);
  }
  table.append(body);
  container.append(table);
}

function sortTable(table: HTMLTableElement, columnIndex: number): void {
  const body = table.tBodies[0];
  const rows = Array.from(body.rows);
  const current = table.dataset.sorted === String(columnIndex) ? "desc" : "asc";
  table.dataset.sorted = current === "asc" ? String(columnIndex) : "";
  rows.sort((a, b) => {
    const left = a.cells[columnIndex]?.dataset.sort ?? "";
    const right = b.cells[columnIndex]?.dataset.sort ?? "";
    const leftNum = Number(left);
    const rightNum = Number(right);
    const order =
      !Number.isNaN(leftNum) && !Number.isNaN(rightNum) && left !== "" && right !== ""
        ? leftNum - rightNum
        : left.localeCompare(right);
    return current === "asc" ? order : -order;
  });
  body.append(...rows);
}

export function renderPanelBody(
  body: HTMLElement,
  entry: PanelCatalogEntry,
  payload: PanelPayload,
): void {
  switch (payload.kind) {
    case "year-role-series":
      renderStackedBars(body, payload.years ?? [], payload.series ?? [], {
        colors: ROLE_COLORS,
      });
      break;
    case "year-author-series": {
      const note =
        payload.missing_pages && payload.missing_pages > 0
          ? `${payload.missing_pages} work(s) lack a page count and are not shown`
          : undefined;
      renderStackedBars(body, payload.years ?? [], payload.series ?? [], { note });
      break;
    }
    case "year-series":
      renderStackedBars(body, payload.years ?? [], payload.series ?? [], {
        colors: { citations: "#2c7fb8" },
      });
      break;
    case "scatter":
      renderScatter(body, payload.points ?? []);
      break;
    case "graph":
      renderForceGraph(body, payload.edges ?? []);
      break;
    default:
      renderTable(body, payload.columns ?? entry.columns, payload.rows ?? []);
  }
}

export function renderPanelCard(
  container: HTMLElement,
  entry: PanelCatalogEntry,
  payload: PanelPayload,
): HTMLElement {
  const card = el("section", { class: "panel", "data-panel": entry.panel });
  const heading = el("h2", {}, entry.panel.replace(/-/g, " "));
  const toggle = el("button", { class: "view-query", type: "button" }, "view query");
  heading.append(toggle);
  card.append(heading, el("p", { class: "panel-description" }, entry.description));

  const queryBox = el("div", { class: "query-box hidden" });
  const pre = el("pre", {}, payload.generated_query);
  queryBox.append(pre);
  if (payload.endpoint_editor_url) {
    queryBox.append(
      el("a", { href: payload.endpoint_editor_url, target: "_blank", rel: "noopener" },
        "open in query editor"),
    );
  }
  toggle.addEventListener("click", () => queryBox.classList.toggle("hidden"));
  card.append(queryBox);

  const body = el("div", { class: "panel-body" });
  renderPanelBody(body, entry, payload);
  card.append(body);
  container.append(card);
  return card;
}

export function renderPanelError(
  container: HTMLElement,
  entry: PanelCatalogEntry,
  message: string,
): HTMLElement {
  const card = el("section", { class: "panel panel-error", "data-panel": entry.panel });
  card.append(
    el("h2", {}, entry.panel.replace(/-/g, " ")),
    el("p", { class: "error" }, `panel unavailable: ${message}`),
  );
  container.append(card);
  return card;
}

export function renderEmpty(container: HTMLElement, message: string): void {
  clear(container);
  container.append(el("p", { class: "empty" }, message));
}
