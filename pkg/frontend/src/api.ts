/** Thin API client: builds query URLs, logs every request (so tests can
 * assert call sequences), and supports cooperative cancellation. */

import type {
  DensityRow,
  EventDetail,
  EventSummary,
  TimelineRow,
  TrafficRow,
  ZonesDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`API ${status}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  /** request log: path?query of every call, in order */
  readonly log: string[] = [];

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async get<T>(
    path: string,
    params: Record<string, string>,
    signal?: AbortSignal,
  ): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const pathWithQuery = query ? `${path}?${query}` : path;
    this.log.push(pathWithQuery);
    const response = await this.fetchImpl(this.baseUrl + pathWithQuery, { signal });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  zones(signal?: AbortSignal): Promise<ZonesDoc> {
    return this.get("/zones", {}, signal);
  }

  density(
    from: string,
    to: string,
    granularity: number,
    signal?: AbortSignal,
  ): Promise<DensityRow[]> {
    return this.get(
      "/density",
      { from, to, granularity: String(granularity) },
      signal,
    );
  }

  timeline(
    zone: string,
    from: string,
    to: string,
    granularity: number,
    signal?: AbortSignal,
  ): Promise<TimelineRow[]> {
    return this.get(
      "/timeline",
      { zone, from, to, granularity: String(granularity) },
      signal,
    );
  }

  events(
    from: string,
    to: string,
    zone: string | null,
    signal?: AbortSignal,
  ): Promise<EventSummary[]> {
    const params: Record<string, string> = { from, to };
    if (zone) params.zone = zone;
    return this.get("/events", params, signal);
  }

  eventDetail(eventId: string, signal?: AbortSignal): Promise<EventDetail> {
    return this.get(`/events/${encodeURIComponent(eventId)}`, {}, signal);
  }

  traffic(
    at: string,
    granularity: number,
    signal?: AbortSignal,
  ): Promise<TrafficRow[]> {
    return this.get("/traffic", { at, granularity: String(granularity) }, signal);
  }
}
