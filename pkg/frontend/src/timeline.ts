/** Timeline renderer: per-bucket counts as bars, sentiment as a line. */

import type { TimelineRow } from "./types.js";

const W = 800;
const H = 220;
const PAD = 24;

export function renderTimeline(rows: TimelineRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No data in this range. Pick a zone or widen the time window.</p>`;
  }
  const maxCount = Math.max(1, ...rows.map((r) => r.count));
  const step = (W - 2 * PAD) / rows.length;
  const barWidth = Math.max(1, step * 0.8);

  const bars = rows.map((row, i) => {
    const height = ((H - 2 * PAD) * row.count) / maxCount;
    const x = PAD + i * step;
    const y = H - PAD - height;
    return (
      `<rect class="bucket" x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
      `width="${barWidth.toFixed(1)}" height="${height.toFixed(1)}" ` +
      `data-bucket="${row.bucket}"><title>${row.start}: ${row.count}</title></rect>`
    );
  });

  const sentimentPoints = rows
    .map((row, i) =>
      row.sentiment_mean === null
        ? null
        : ([PAD + i * step + barWidth / 2, midY(row.sentiment_mean)] as const),
    )
    .filter((p): p is readonly [number, number] => p !== null);
  const line =
    sentimentPoints.length > 1
      ? `<polyline class="sentiment" fill="none" stroke="#c1121f" stroke-width="1.5" points="` +
        sentimentPoints.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ") +
        `"/>`
      : "";

  return (
    `<svg viewBox="0 0 ${W} ${H}" xmlns="http://www.w3.org/2000/svg" role="img" ` +
    `aria-label="timeline">` +
    `<line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" stroke="#999"/>` +
    bars.join("") +
    line +
    `</svg>` +
    `<p class="axis">${rows[0].start} … ${rows[rows.length - 1].start} · ` +
    `peak ${maxCount}</p>`
  );
}

/** sentiment -1..1 mapped onto the chart's vertical extent */
function midY(sentiment: number): number {
  const t = (Math.max(-1, Math.min(1, sentiment)) + 1) / 2;
  return H - PAD - (H - 2 * PAD) * t;
}
