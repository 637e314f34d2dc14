// Typed client for the profile service JSON API. The UI derives all of its
// state from these endpoints; nothing else is fetched.

export interface SearchHit {
  id: string;
  label: string;
  description: string;
}

export interface PanelCatalogEntry {
  aspect: string;
  panel: string;
  tier: number;
  kind: string;
  columns: string[];
  description: string;
}

export interface Term {
  type: string;
  value: string;
  datatype?: string;
  "xml:lang"?: string;
}

export type Row = Record<string, Term>;

export interface SeriesEntry {
  key: string;
  label?: string;
  values: number[];
}

export interface GraphNodeRef {
  id: string;
  label?: string | null;
}

export interface GraphEdge {
  source: GraphNodeRef;
  target: GraphNodeRef;
  weight?: number;
}

export interface ScatterPointPayload {
  x: number;
  y: number;
  venue: string;
  label?: string;
}

export interface PanelPayload {
  aspect: string;
  panel: string;
  subject: string;
  kind: string;
  generated_query: string;
  cache: "hit" | "miss";
  endpoint_editor_url?: string;
  columns?: string[];
  rows?: Row[];
  years?: number[];
  series?: SeriesEntry[];
  points?: ScatterPointPayload[];
  edges?: GraphEdge[];
  missing_pages?: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, { headers: { Accept: "application/json" } });
  } catch (error) {
    throw new ApiError(0, `service unreachable: ${String(error)}`);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const problem = (await response.json()) as { detail?: string; title?: string };
      detail = problem.detail || problem.title || detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export async function searchEntities(query: string, limit = 10): Promise<SearchHit[]> {
  const q = encodeURIComponent(query);
  const payload = await getJson<{ results: SearchHit[] }>(`/api/search?q=${q}&limit=${limit}`);
  return payload.results;
}

export async function fetchPanelCatalog(): Promise<PanelCatalogEntry[]> {
  const payload = await getJson<{ panels: PanelCatalogEntry[] }>("/api/panels");
  return payload.panels;
}

export async function fetchPanel(
  aspect: string,
  panel: string,
  id: string,
): Promise<PanelPayload> {
  return getJson<PanelPayload>(`/api/panel/${aspect}/${panel}/${id}`);
}
