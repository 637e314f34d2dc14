// Shared test plumbing: recorded API payloads and a tiny fetch mock.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { vi } from "vitest";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

export interface RouteTable {
  [pathPrefix: string]: unknown | (() => unknown);
}

/** Install a fetch stub answering from a path->payload table. */
export function mockFetch(routes: RouteTable): void {
  vi.stubGlobal(
    "fetch",
    vi.fn(async (input: RequestInfo | URL) => {
      const url = String(input);
      for (const [prefix, payload] of Object.entries(routes)) {
        if (url.startsWith(prefix)) {
          const body = typeof payload === "function" ? (payload as () => unknown)() : payload;
          if (body instanceof Response) return body;
          return new Response(JSON.stringify(body), {
            status: 200,
            headers: { "Content-Type": "application/json" },
          });
        }
      }
      return new Response(
        JSON.stringify({ title: "not found", detail: `no canned route for ${url}`, status: 404 }),
        { status: 404, headers: { "Content-Type": "application/problem+json" } },
      );
    }),
  );
}

export function problemResponse(status: number, detail: string): Response {
  return new Response(JSON.stringify({ title: "error", detail, status }), {
    status,
    headers: { "Content-Type": "application/problem+json" },
  });
}

export function container(): HTMLElement {
  const node = document.createElement("div");
  document.body.append(node);
  return node;
}
