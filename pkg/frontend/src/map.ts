/** Choropleth renderer: zones as SVG paths, fill from /density. */

import { featurePath, projector, zoomBounds, VIEW_H, VIEW_W } from "./geo.js";
import { legendBounds, zoneColor, type Legend } from "./scale.js";
import type { Metric } from "./state.js";
import type { DensityRow, ZonesDoc } from "./types.js";

export interface MapView {
  svg: string;
  legend: Legend;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

export function renderMap(
  zones: ZonesDoc,
  density: DensityRow[],
  metric: Metric,
  selectedZone: string | null,
  zoomZone: string | null = null,
): MapView {
  const legend = legendBounds(density, metric);
  const byZone = new Map(density.map((r) => [r.zone_id, r]));
  const project = projector(zoomBounds(zones, zoomZone));

  const paths = zones.features.map((feature) => {
    const zoneId = feature.properties.zone_id;
    const row = byZone.get(zoneId);
    const value =
      row === undefined
        ? null
        : metric === "count"
          ? row.count
          : row.sentiment_mean;
    const fill = zoneColor(value, legend);
    const selected = zoneId === selectedZone;
    const stroke = selected ? "#1d3557" : "#777";
    const width = selected ? 3 : 1;
    const title =
      `${feature.properties.name}: ` +
      (row === undefined
        ? "no data"
        : metric === "count"
          ? `${row.count} records`
          : row.sentiment_mean === null
            ? "no sentiment"
            : row.sentiment_mean.toFixed(3));
    return (
      `<path d="${featurePath(feature, project)}" fill="${fill}" ` +
      `stroke="${stroke}" stroke-width="${width}" data-zone="${esc(zoneId)}">` +
      `<title>${esc(title)}</title></path>`
    );
  });

  const svg =
    `<svg viewBox="0 0 ${VIEW_W} ${VIEW_H}" xmlns="http://www.w3.org/2000/svg" ` +
    `role="img" aria-label="zone map">` +
    paths.join("") +
    `</svg>`;
  return { svg, legend };
}

export function renderLegend(legend: Legend): string {
  const lo = legend.metric === "count" ? legend.min : -1;
  const hi = legend.metric === "count" ? legend.max : 1;
  const stops = [0, 0.25, 0.5, 0.75, 1].map((t) => {
    const value = lo + (hi - lo) * t;
    return `<span class="swatch" style="background:${zoneColor(value, legend)}"></span>`;
  });
  return (
    `<span class="legend" data-min="${legend.min}" data-max="${legend.max}">` +
    `${legend.metric} ${legend.min.toFixed(legend.metric === "count" ? 0 : 2)} ` +
    stops.join("") +
    ` ${legend.max.toFixed(legend.metric === "count" ? 0 : 2)}</span>`
  );
}
