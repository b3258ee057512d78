/** Dashboard controller: ViewState in, API calls out, rendered panels in
 * between. Stateless beyond ViewState plus a zones cache; every refresh
 * issues a deterministic call sequence, so two dashboards created from the
 * same shared URL hit the API identically. */

import { ApiClient } from "./api.js";
import { renderEventDetail, renderEventList } from "./events.js";
import { renderLegend, renderMap } from "./map.js";
import type { Metric, Panel, ViewState } from "./state.js";
import { renderTimeline } from "./timeline.js";
import type { EventSummary, ZonesDoc } from "./types.js";

export interface Panels {
  map(svg: string): void;
  legend(html: string): void;
  timeline(html: string): void;
  events(html: string): void;
  status(text: string): void;
}

export interface DashboardOptions {
  pollMs?: number; // 0 disables polling
  onStateChange?: (state: ViewState) => void;
  setInterval?: typeof setInterval;
  clearInterval?: typeof clearInterval;
}

export class Dashboard {
  private zonesCache: ZonesDoc | null = null;
  private inflight: AbortController | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    readonly api: ApiClient,
    public state: ViewState,
    private panels: Panels,
    private options: DashboardOptions = {},
  ) {}

  /** Abort whatever is in flight and re-render everything the active
   * panels need. Safe to call concurrently; the newest call wins. */
  async refresh(): Promise<void> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const { signal } = controller;
    const active = new Set<Panel>(this.state.panels);

    try {
      if (!this.zonesCache) {
        this.zonesCache = await this.api.zones(signal);
      }
      const zones = this.zonesCache;

      let selectedEvent: EventSummary | null = null;
      let eventsList: EventSummary[] = [];
      if (active.has("events")) {
        eventsList = await this.api.events(
          this.state.from,
          this.state.to,
          this.state.zone,
          signal,
        );
        selectedEvent =
          eventsList.find((e) => e.event_id === this.state.event) ?? null;
      }

      if (active.has("map")) {
        const density = await this.api.density(
          this.state.from,
          this.state.to,
          this.state.granularity,
          signal,
        );
        if (signal.aborted) return;
        const zoom = selectedEvent ? selectedEvent.zone_id : null;
        const view = renderMap(
          zones,
          density,
          this.state.metric,
          this.state.zone,
          zoom,
        );
        this.panels.map(view.svg);
        this.panels.legend(renderLegend(view.legend));
      }

      if (active.has("timeline")) {
        if (this.state.zone) {
          const rows = await this.api.timeline(
            this.state.zone,
            this.state.from,
            this.state.to,
            this.state.granularity,
            signal,
          );
          if (signal.aborted) return;
          this.panels.timeline(renderTimeline(rows));
        } else {
          this.panels.timeline(
            `<p class="empty">City-wide view. Click a zone for its timeline.</p>`,
          );
        }
      }

      if (active.has("events")) {
        if (signal.aborted) return;
        this.panels.events(renderEventList(eventsList, this.state.event));
        if (selectedEvent) {
          const detail = await this.api.eventDetail(selectedEvent.event_id, signal);
          const traffic = await this.api.traffic(
            selectedEvent.start,
            selectedEvent.granularity_s,
            signal,
          );
          if (signal.aborted) return;
          this.panels.events(
            renderEventList(eventsList, this.state.event) +
              renderEventDetail(detail, traffic),
          );
        }
      }

      this.panels.status(
        `${this.state.from} → ${this.state.to} @ ${this.state.granularity}s` +
          (this.state.zone ? ` · zone ${this.state.zone}` : " · city-wide"),
      );
    } catch (error) {
      if (signal.aborted) return; // cancelled by a newer refresh
      this.panels.status(`error: ${(error as Error).message}`);
    }
  }

  private transition(mutate: (state: ViewState) => void): Promise<void> {
    mutate(this.state);
    this.options.onStateChange?.(this.state);
    return this.refresh();
  }

  /** Click on a zone: select it (or clear on second click); panels refilter. */
  selectZone(zoneId: string): Promise<void> {
    return this.transition((s) => {
      s.zone = s.zone === zoneId ? null : zoneId;
      s.event = null;
    });
  }

  selectEvent(eventId: string): Promise<void> {
    return this.transition((s) => {
      s.event = s.event === eventId ? null : eventId;
    });
  }

  setGranularity(seconds: number): Promise<void> {
    return this.transition((s) => {
      s.granularity = seconds;
    });
  }

  setMetric(metric: Metric): Promise<void> {
    return this.transition((s) => {
      s.metric = metric;
    });
  }

  setRange(from: string, to: string): Promise<void> {
    return this.transition((s) => {
      s.from = from;
      s.to = to;
    });
  }

  /** Replace the whole state (hashchange on a shared URL). */
  setState(state: ViewState): Promise<void> {
    this.state = state;
    return this.refresh();
  }

  startPolling(): void {
    const pollMs = this.options.pollMs ?? 5000;
    if (pollMs <= 0 || this.timer !== null) return;
    const schedule = this.options.setInterval ?? setInterval;
    this.timer = schedule(() => void this.refresh(), pollMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      (this.options.clearInterval ?? clearInterval)(this.timer);
      this.timer = null;
    }
  }
}
