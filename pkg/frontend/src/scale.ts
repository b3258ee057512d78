/** Choropleth color scales and legend bounds. */

import type { DensityRow } from "./types.js";
import type { Metric } from "./state.js";

export interface Legend {
  min: number;
  max: number;
  metric: Metric;
}

/** Legend bounds are the min/max of the returned metric values.
 * Zones with a null sentiment are excluded from sentiment bounds. */
export function legendBounds(rows: DensityRow[], metric: Metric): Legend {
  const values =
    metric === "count"
      ? rows.map((r) => r.count)
      : rows.filter((r) => r.sentiment_mean !== null).map((r) => r.sentiment_mean!);
  if (values.length === 0) return { min: 0, max: 0, metric };
  return { min: Math.min(...values), max: Math.max(...values), metric };
}

function channel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

function hex(r: number, g: number, b: number): string {
  return (
    "#" + [r, g, b].map((c) => c.toString(16).padStart(2, "0")).join("")
  );
}

const NO_DATA = "#e8e8e8";

/** count: white to deep blue; sentiment: red through grey to green. */
export function zoneColor(
  value: number | null,
  legend: Legend,
): string {
  if (value === null) return NO_DATA;
  if (legend.metric === "count") {
    const span = legend.max - legend.min;
    const t = span > 0 ? (value - legend.min) / span : 0;
    return hex(channel(255, 21, t), channel(255, 72, t), channel(255, 142, t));
  }
  // sentiment is anchored at [-1, 1] regardless of observed bounds
  const t = Math.max(-1, Math.min(1, value));
  if (t < 0) {
    return hex(channel(170, 200, -t), channel(170, 40, -t), channel(170, 40, -t));
  }
  return hex(channel(170, 30, t), channel(170, 150, t), channel(170, 60, t));
}
