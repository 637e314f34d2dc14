// Entry logic. The server renders a page shell whose <body> carries
// data-page (home | aspect) plus the aspect and subject id; everything
// below the header is hydrated from the JSON API. Links are ordinary URLs
// mirroring the server scheme, so every view is shareable and reloadable.

import { ApiError, fetchPanel, fetchPanelCatalog } from "./api.js";
import { el, entityHref, nav } from "./dom.js";
import { renderEmpty, renderPanelCard, renderPanelError } from "./panels.js";
import { attachSearchBox } from "./search.js";

export async function renderHome(app: HTMLElement): Promise<void> {
  const box = el("div", { class: "search-box" });
  app.append(box);
  attachSearchBox(box, {
    onSelect: (hit) => nav.go(entityHref(hit.id)),
    placeholder: "search for a researcher, work, venue, topic…",
  });
}

export async function renderAspectPage(
  app: HTMLElement,
  aspect: string,
  subject: string,
): Promise<void> {
  let catalog;
  try {
    catalog = await fetchPanelCatalog();
  } catch (error) {
    renderEmpty(app, `cannot load the panel catalog: ${String(error)}`);
    return;
  }
  const panels = catalog.filter((entry) => entry.aspect === aspect);
  if (!panels.length) {
    renderEmpty(app, `no panels for aspect ${aspect}`);
    return;
  }
  // tier-1 panels first, then catalog order
  panels.sort((a, b) => a.tier - b.tier);
  await Promise.all(
    panels.map(async (entry) => {
      try {
        const payload = await fetchPanel(aspect, entry.panel, subject);
        renderPanelCard(app, entry, payload);
      } catch (error) {
        const message =
          error instanceof ApiError ? `${error.status || "network"}: ${error.message}` : String(error);
        renderPanelError(app, entry, message);
      }
    }),
  );
  // deterministic final order: tier, then panel name
  const cards = Array.from(app.querySelectorAll<HTMLElement>("section.panel"));
  const rank = new Map(panels.map((entry, index) => [entry.panel, index]));
  cards.sort((a, b) => (rank.get(a.dataset.panel ?? "") ?? 99) - (rank.get(b.dataset.panel ?? "") ?? 99));
  for (const card of cards) app.append(card);
}

export async function boot(doc: Document): Promise<void> {
  const page = doc.body.dataset.page;
  const app = doc.getElementById("app");
  if (!app) return;
  if (page === "home") {
    await renderHome(app);
  } else if (page === "aspect") {
    const aspect = doc.body.dataset.aspect ?? "";
    const subject = doc.body.dataset.id ?? "";
    await renderAspectPage(app, aspect, subject);
  }
}
