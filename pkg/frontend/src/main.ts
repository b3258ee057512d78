/** Browser bootstrap: bind the controller to the DOM, sync ViewState with
 * the URL hash, delegate clicks, poll while the replay streams. */

import { ApiClient } from "./api.js";
import { Dashboard, type Panels } from "./app.js";
import {
  GRANULARITY_PRESETS,
  decodeHash,
  encodeHash,
  type ViewState,
} from "./state.js";

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8645";
}

function panels(): Panels {
  const map = byId("map");
  const legend = byId("legend");
  const timeline = byId("timeline");
  const events = byId("events");
  const status = byId("status");
  return {
    map: (svg) => (map.innerHTML = svg),
    legend: (html) => (legend.innerHTML = html),
    timeline: (html) => (timeline.innerHTML = html),
    events: (html) => (events.innerHTML = html),
    status: (text) => (status.textContent = text),
  };
}

function main(): void {
  const api = new ApiClient(apiBase());
  const state = decodeHash(window.location.hash);
  const dashboard = new Dashboard(api, state, panels(), {
    pollMs: 5000,
    onStateChange: (s: ViewState) =>
      window.history.replaceState(null, "", encodeHash(s)),
  });

  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const zoneEl = target.closest("[data-zone]");
    if (zoneEl) {
      void dashboard.selectZone(zoneEl.getAttribute("data-zone")!);
      return;
    }
    const eventEl = target.closest("[data-event]");
    if (eventEl) {
      void dashboard.selectEvent(eventEl.getAttribute("data-event")!);
    }
  });

  const granularitySelect = byId("granularity") as HTMLSelectElement;
  for (const preset of GRANULARITY_PRESETS) {
    const option = document.createElement("option");
    option.value = String(preset);
    option.textContent = preset === 300 ? "5 min" : `${preset} s`;
    granularitySelect.append(option);
  }
  const custom = document.createElement("option");
  custom.value = "custom";
  custom.textContent = "custom…";
  granularitySelect.append(custom);
  granularitySelect.value = String(state.granularity);
  granularitySelect.addEventListener("change", () => {
    if (granularitySelect.value === "custom") {
      const answer = window.prompt("bucket length in seconds", "60");
      const seconds = Number(answer);
      if (Number.isInteger(seconds) && seconds > 0) {
        void dashboard.setGranularity(seconds);
        granularitySelect.value = String(seconds);
      }
      return;
    }
    void dashboard.setGranularity(Number(granularitySelect.value));
  });

  const metricSelect = byId("metric") as HTMLSelectElement;
  metricSelect.value = state.metric;
  metricSelect.addEventListener("change", () => {
    void dashboard.setMetric(metricSelect.value as "count" | "sentiment");
  });

  const fromInput = byId("from") as HTMLInputElement;
  const toInput = byId("to") as HTMLInputElement;
  fromInput.value = state.from;
  toInput.value = state.to;
  byId("apply").addEventListener("click", () => {
    void dashboard.setRange(fromInput.value, toInput.value);
  });

  window.addEventListener("hashchange", () => {
    void dashboard.setState(decodeHash(window.location.hash));
  });

  void dashboard.refresh();
  dashboard.startPolling();
}

main();
