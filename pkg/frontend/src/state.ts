/** ViewState: everything the dashboard shows is a function of this object
 * plus API payloads. It round-trips through the URL so views are shareable. */

export type Metric = "count" | "sentiment";

export const PANELS = ["map", "timeline", "events"] as const;
export type Panel = (typeof PANELS)[number];

/** The two bucket presets surfaced in the UI; any positive custom value
 * is allowed as long as the API has it configured. */
export const GRANULARITY_PRESETS = [20, 300];

export interface ViewState {
  from: string; // RFC 3339
  to: string; // RFC 3339, strictly after `from`
  granularity: number; // seconds
  zone: string | null;
  event: string | null;
  metric: Metric;
  panels: Panel[];
}

export function defaultState(): ViewState {
  return {
    from: "2026-01-05T00:00:00Z",
    to: "2026-01-13T00:00:00Z",
    granularity: 300,
    zone: null,
    event: null,
    metric: "count",
    panels: [...PANELS],
  };
}

export function isValid(state: ViewState): boolean {
  const from = Date.parse(state.from);
  const to = Date.parse(state.to);
  return (
    Number.isFinite(from) &&
    Number.isFinite(to) &&
    from < to &&
    Number.isInteger(state.granularity) &&
    state.granularity > 0 &&
    state.panels.length > 0
  );
}

/** Encode into URL search params; omits defaults-at-null for short URLs. */
export function stateToParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("from", state.from);
  params.set("to", state.to);
  params.set("g", String(state.granularity));
  if (state.zone) params.set("zone", state.zone);
  if (state.event) params.set("event", state.event);
  if (state.metric !== "count") params.set("metric", state.metric);
  if (state.panels.length !== PANELS.length) {
    params.set("panels", state.panels.join(","));
  }
  return params;
}

/** Decode URL search params, falling back to defaults for anything
 * missing or malformed. */
export function stateFromParams(params: URLSearchParams): ViewState {
  const state = defaultState();
  const from = params.get("from");
  const to = params.get("to");
  if (from) state.from = from;
  if (to) state.to = to;
  const g = Number(params.get("g"));
  if (Number.isInteger(g) && g > 0) state.granularity = g;
  state.zone = params.get("zone");
  state.event = params.get("event");
  if (params.get("metric") === "sentiment") state.metric = "sentiment";
  const panels = params.get("panels");
  if (panels) {
    const chosen = panels
      .split(",")
      .filter((p): p is Panel => (PANELS as readonly string[]).includes(p));
    if (chosen.length > 0) state.panels = chosen;
  }
  if (!isValid(state)) return defaultState();
  return state;
}

export function encodeHash(state: ViewState): string {
  return "#" + stateToParams(state).toString();
}

export function decodeHash(hash: string): ViewState {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  return stateFromParams(new URLSearchParams(raw));
}
