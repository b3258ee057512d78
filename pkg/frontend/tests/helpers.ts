/** Shared test scaffolding: a canned API served by a fake fetch, plus
 * payload builders mirroring the tournament fixture's shape. */

import type {
  DensityRow,
  EventDetail,
  EventSummary,
  TimelineRow,
  TrafficRow,
  ZonesDoc,
} from "../src/types.js";
import type { Panels } from "../src/app.js";

export function squareZones(ids: string[]): ZonesDoc {
  return {
    type: "FeatureCollection",
    features: ids.map((zoneId, i) => ({
      type: "Feature",
      properties: { zone_id: zoneId, name: `zone ${zoneId}` },
      geometry: {
        type: "Polygon",
        coordinates: [
          [
            [i, 0],
            [i + 1, 0],
            [i + 1, 1],
            [i, 1],
            [i, 0],
          ],
        ],
      },
    })),
  };
}

export function densityRows(): DensityRow[] {
  return [
    { zone_id: "z00", count: 12, sentiment_mean: -0.25 },
    { zone_id: "z01", count: 80, sentiment_mean: 0.5 },
    { zone_id: "z02", count: 0, sentiment_mean: null },
  ];
}

export function timelineRows(n: number): TimelineRow[] {
  return Array.from({ length: n }, (_, i) => ({
    bucket: 100 + i,
    start: `2026-01-05T08:${String(i).padStart(2, "0")}:00Z`,
    count: (i * 7) % 23,
    sentiment_mean: i % 3 === 0 ? null : (i % 5) / 5 - 0.4,
  }));
}

export function eventSummaries(): EventSummary[] {
  return [
    {
      event_id: "ev-z01-g300-100-103",
      zone_id: "z01",
      granularity_s: 300,
      start_bucket: 100,
      end_bucket: 103,
      start: "2026-01-05T12:00:00Z",
      end: "2026-01-05T12:20:00Z",
      label: "ent_ace_invitational",
      peak_count: 250,
      block_count: 4,
    },
    {
      event_id: "ev-z01-g300-300-303",
      zone_id: "z01",
      granularity_s: 300,
      start_bucket: 300,
      end_bucket: 303,
      start: "2026-01-12T12:00:00Z",
      end: "2026-01-12T12:20:00Z",
      label: "ent_baseline_cup",
      peak_count: 250,
      block_count: 4,
    },
  ];
}

export function eventDetail(summary: EventSummary): EventDetail {
  return {
    ...summary,
    sentiment_mean: 0.55,
    top_terms: [
      { term: "ace", score: 12.5 },
      { term: "match", score: 4.2 },
    ],
    entities: [{ entity_id: summary.label ?? "x", mentions: 40 }],
    sensor_aggregates: {
      traffic_count: { count: 30, mean: 78.2, min: 60.1, max: 92.3 },
    },
    blocks: [
      {
        key: {
          zone_id: summary.zone_id,
          bucket_index: summary.start_bucket,
          granularity_s: summary.granularity_s,
        },
        sensor: [{}, {}],
        social: [{}, {}, {}],
      },
    ],
  };
}

export function trafficRows(): TrafficRow[] {
  return [
    { zone_id: "z00", status: "green" },
    { zone_id: "z01", status: "red" },
    { zone_id: "z02", status: "unknown" },
  ];
}

type Router = (path: string, params: URLSearchParams) => unknown;

/** fetch stand-in backed by a routing function; honors AbortSignal. */
export function fakeFetch(route: Router) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    if (init?.signal?.aborted) {
      throw new DOMException("aborted", "AbortError");
    }
    const parsed = new URL(url, "http://test.local");
    const body = route(parsed.pathname, parsed.searchParams);
    if (body === undefined) {
      return new Response(
        JSON.stringify({ error: "unknown", detail: `no route ${parsed.pathname}` }),
        { status: 404, headers: { "content-type": "application/json" } },
      );
    }
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
}

/** standard routes covering the whole API surface */
export function standardRouter(): Router {
  const zones = squareZones(["z00", "z01", "z02"]);
  const events = eventSummaries();
  return (path, params) => {
    if (path === "/zones") return zones;
    if (path === "/density") return densityRows();
    if (path === "/timeline") return timelineRows(params.get("zone") === "z01" ? 6 : 0);
    if (path === "/events") {
      const zone = params.get("zone");
      return zone ? events.filter((e) => e.zone_id === zone) : events;
    }
    if (path.startsWith("/events/")) {
      const id = decodeURIComponent(path.slice("/events/".length));
      const summary = events.find((e) => e.event_id === id);
      return summary ? eventDetail(summary) : undefined;
    }
    if (path === "/traffic") return trafficRows();
    return undefined;
  };
}

export function recordingPanels() {
  const calls: Record<string, string[]> = {
    map: [],
    legend: [],
    timeline: [],
    events: [],
    status: [],
  };
  const panels: Panels = {
    map: (svg) => calls.map.push(svg),
    legend: (html) => calls.legend.push(html),
    timeline: (html) => calls.timeline.push(html),
    events: (html) => calls.events.push(html),
    status: (text) => calls.status.push(text),
  };
  return { panels, calls };
}

export function last(items: string[]): string {
  if (items.length === 0) throw new Error("panel never rendered");
  return items[items.length - 1];
}
