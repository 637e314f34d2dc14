// Front-page search box: debounced suggestion fetch, keyboard and mouse
// selection. Network failures show inline and never disable the input.

import { ApiError, searchEntities, type SearchHit } from "./api.js";
import { clear, el } from "./dom.js";

export const DEBOUNCE_MS = 200;

export interface SearchBoxOptions {
  onSelect: (hit: SearchHit) => void;
  placeholder?: string;
  limit?: number;
}

export function attachSearchBox(container: HTMLElement, options: SearchBoxOptions): HTMLInputElement {
  const input = el("input", {
    class: "search-input",
    type: "search",
    placeholder: options.placeholder ?? "search for a name or title",
    autocomplete: "off",
  });
  const list = el("ul", { class: "suggestions" });
  const status = el("p", { class: "search-status" });
  container.append(input, list, status);

  let timer: ReturnType<typeof setTimeout> | undefined;
  let active = -1;
  let hits: SearchHit[] = [];
  let requestSequence = 0;

  const renderHits = () => {
    clear(list);
    hits.forEach((hit, index) => {
      const item = el(
        "li",
        { class: index === active ? "active" : "", "data-id": hit.id },
        el("span", { class: "hit-label" }, hit.label),
        hit.description ? el("span", { class: "hit-description" }, ` ${hit.description}`) : null,
        el("span", { class: "hit-id" }, ` ${hit.id}`),
      );
      item.addEventListener("mousedown", (event) => {
        event.preventDefault();
        options.onSelect(hit);
      });
      list.append(item);
    });
  };

  const runSearch = async (term: string) => {
    const sequence = ++requestSequence;
    try {
      const results = await searchEntities(term, options.limit ?? 8);
      if (sequence !== requestSequence) return; // a newer keystroke won
      hits = results;
      active = -1;
      status.textContent = results.length ? "" : "no matches";
      renderHits();
    } catch (error) {
      if (sequence !== requestSequence) return;
      hits = [];
      renderHits();
      status.textContent =
        error instanceof ApiError ? `search failed: ${error.message}` : "search failed";
    }
  };

  input.addEventListener("input", () => {
    if (timer !== undefined) clearTimeout(timer);
    const term = input.value.trim();
    if (!term) {
      hits = [];
      active = -1;
      status.textContent = "";
      renderHits();
      return;
    }
    timer = setTimeout(() => void runSearch(term), DEBOUNCE_MS);
  });

  input.addEventListener("keydown", (event) => {
    if (event.key === "ArrowDown" && hits.length) {
      active = (active + 1) % hits.length;
      renderHits();
      event.preventDefault();
    } else if (event.key === "ArrowUp" && hits.length) {
      active = (active - 1 + hits.length) % hits.length;
      renderHits();
      event.preventDefault();
    } else if (event.key === "Enter" && active >= 0 && hits[active]) {
      options.onSelect(hits[active]);
      event.preventDefault();
    }
  });

  return input;
}
