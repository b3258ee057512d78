/** Event list and drill-down detail panel. */

import type { EventDetail, EventSummary, TrafficRow } from "./types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

export function renderEventList(
  events: EventSummary[],
  selected: string | null,
): string {
  if (events.length === 0) {
    return `<p class="empty">No events detected in this range.</p>`;
  }
  const items = events.map((event) => {
    const cls = event.event_id === selected ? "event selected" : "event";
    return (
      `<li class="${cls}" data-event="${esc(event.event_id)}">` +
      `<strong>${esc(event.label ?? "(unlabeled)")}</strong> ` +
      `in ${esc(event.zone_id)} · ${esc(event.start)} → ${esc(event.end)} · ` +
      `peak ${event.peak_count}</li>`
    );
  });
  return `<ul class="events">${items.join("")}</ul>`;
}

export function renderEventDetail(
  detail: EventDetail,
  traffic: TrafficRow[] | null,
): string {
  const sensorCount = detail.blocks.reduce((n, b) => n + b.sensor.length, 0);
  const socialCount = detail.blocks.reduce((n, b) => n + b.social.length, 0);
  const terms = detail.top_terms
    .map((t) => `<span class="term">${esc(t.term)} (${t.score.toFixed(2)})</span>`)
    .join(" ");
  const entities = detail.entities
    .map((e) => `<span class="entity">${esc(e.entity_id)} ×${e.mentions}</span>`)
    .join(" ");
  const zoneTraffic = traffic?.find((row) => row.zone_id === detail.zone_id);
  const aggregates = Object.entries(detail.sensor_aggregates)
    .map(
      ([kind, agg]) =>
        `<li>${esc(kind)}: n=${agg.count} mean=${agg.mean.toFixed(1)} ` +
        `range=[${agg.min.toFixed(1)}, ${agg.max.toFixed(1)}]</li>`,
    )
    .join("");
  return (
    `<div class="detail" data-event-detail="${esc(detail.event_id)}">` +
    `<h3>${esc(detail.label ?? "(unlabeled)")}</h3>` +
    `<p>${esc(detail.zone_id)} · ${esc(detail.start)} → ${esc(detail.end)} · ` +
    `peak ${detail.peak_count}</p>` +
    `<p>cross-modal: ${sensorCount} sensor + ${socialCount} social records in ` +
    `${detail.blocks.length} blocks</p>` +
    `<p>sentiment: ${detail.sentiment_mean === null ? "n/a" : detail.sentiment_mean.toFixed(3)}` +
    ` · traffic: <span class="traffic ${zoneTraffic?.status ?? "unknown"}">` +
    `${zoneTraffic?.status ?? "unknown"}</span></p>` +
    `<p>top terms: ${terms || "none"}</p>` +
    `<p>entities: ${entities || "none"}</p>` +
    `<ul class="aggregates">${aggregates}</ul>` +
    `</div>`
  );
}
