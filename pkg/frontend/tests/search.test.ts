import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { SearchHit } from "../dist/api.js";
import { DEBOUNCE_MS, attachSearchBox } from "../dist/search.js";
import { container, fixture, mockFetch, problemResponse } from "./helpers.js";

function type(input: HTMLInputElement, text: string): void {
  input.value = text;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

async function settle(): Promise<void> {
  await vi.advanceTimersByTimeAsync(DEBOUNCE_MS + 10);
  await vi.waitFor(() => {}); // flush pending microtasks
}

beforeEach(() => {
  document.body.innerHTML = "";
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
  vi.unstubAllGlobals();
});

describe("search box", () => {
  it("debounces keystrokes and renders suggestions", async () => {
    mockFetch({ "/api/search": fixture("search_uta.json") });
    const selected: SearchHit[] = [];
    const input = attachSearchBox(container(), { onSelect: (hit) => selected.push(hit) });

    type(input, "U");
    type(input, "Ut");
    type(input, "Uta");
    await settle();

    expect(vi.mocked(fetch).mock.calls.length).toBe(1); // one request for three keystrokes
    const items = document.querySelectorAll(".suggestions li");
    expect(items.length).toBe(1);
    expect(items[0].textContent).toContain("Uta Frith");
    expect(items[0].getAttribute("data-id")).toBe("Q8219");
  });

  it("selects with the keyboard", async () => {
    mockFetch({ "/api/search": fixture("search_uta.json") });
    const selected: SearchHit[] = [];
    const input = attachSearchBox(container(), { onSelect: (hit) => selected.push(hit) });

    type(input, "Uta");
    await settle();
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowDown", bubbles: true }));
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter", bubbles: true }));
    expect(selected.map((hit) => hit.id)).toEqual(["Q8219"]);
  });

  it("shows the empty state for no matches", async () => {
    mockFetch({ "/api/search": { query: "zzz", results: [] } });
    const input = attachSearchBox(container(), { onSelect: () => {} });
    type(input, "zzzznomatch");
    await settle();
    expect(document.querySelector(".search-status")?.textContent).toBe("no matches");
  });

  it("keeps the input usable when the service fails", async () => {
    mockFetch({ "/api/search": () => problemResponse(502, "endpoint down") });
    const input = attachSearchBox(container(), { onSelect: () => {} });
    type(input, "Uta");
    await settle();
    expect(document.querySelector(".search-status")?.textContent).toContain("search failed");
    expect(input.disabled).toBe(false);

    // recovery: the next keystroke searches again
    mockFetch({ "/api/search": fixture("search_uta.json") });
    type(input, "Uta Frith");
    await settle();
    expect(document.querySelectorAll(".suggestions li").length).toBe(1);
  });
});
