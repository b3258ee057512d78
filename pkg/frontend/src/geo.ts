/** Flat lon/lat to SVG projection. No map tiles: zones draw on a blank
 * canvas, which keeps rendering hermetic and offline. */

import type { ZoneFeature, ZonesDoc } from "./types.js";

export interface Bounds {
  minLon: number;
  minLat: number;
  maxLon: number;
  maxLat: number;
}

export const VIEW_W = 800;
export const VIEW_H = 500;

export function featureBounds(feature: ZoneFeature): Bounds {
  const ring = feature.geometry.coordinates[0];
  const lons = ring.map((p) => p[0]);
  const lats = ring.map((p) => p[1]);
  return {
    minLon: Math.min(...lons),
    minLat: Math.min(...lats),
    maxLon: Math.max(...lons),
    maxLat: Math.max(...lats),
  };
}

export function collectionBounds(doc: ZonesDoc): Bounds {
  const all = doc.features.map(featureBounds);
  return {
    minLon: Math.min(...all.map((b) => b.minLon)),
    minLat: Math.min(...all.map((b) => b.minLat)),
    maxLon: Math.max(...all.map((b) => b.maxLon)),
    maxLat: Math.max(...all.map((b) => b.maxLat)),
  };
}

/** Linear projection of bounds into the fixed viewport, lat flipped
 * (SVG y grows downward), aspect preserved with centering. */
export function projector(bounds: Bounds): (lon: number, lat: number) => [number, number] {
  const spanLon = Math.max(bounds.maxLon - bounds.minLon, 1e-9);
  const spanLat = Math.max(bounds.maxLat - bounds.minLat, 1e-9);
  const scale = Math.min(VIEW_W / spanLon, VIEW_H / spanLat) * 0.94;
  const offsetX = (VIEW_W - spanLon * scale) / 2;
  const offsetY = (VIEW_H - spanLat * scale) / 2;
  return (lon, lat) => [
    offsetX + (lon - bounds.minLon) * scale,
    offsetY + (bounds.maxLat - lat) * scale,
  ];
}

export function featurePath(
  feature: ZoneFeature,
  project: (lon: number, lat: number) => [number, number],
): string {
  const ring = feature.geometry.coordinates[0];
  const parts = ring.map(([lon, lat], i) => {
    const [x, y] = project(lon, lat);
    return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
  });
  return parts.join(" ") + " Z";
}

/** Zoom target: the selected zone's bounds padded a little, or the whole
 * collection when nothing is selected. */
export function zoomBounds(doc: ZonesDoc, zoneId: string | null): Bounds {
  if (zoneId) {
    const feature = doc.features.find((f) => f.properties.zone_id === zoneId);
    if (feature) {
      const b = featureBounds(feature);
      const padLon = (b.maxLon - b.minLon) * 0.5 + 1e-9;
      const padLat = (b.maxLat - b.minLat) * 0.5 + 1e-9;
      return {
        minLon: b.minLon - padLon,
        minLat: b.minLat - padLat,
        maxLon: b.maxLon + padLon,
        maxLat: b.maxLat + padLat,
      };
    }
  }
  return collectionBounds(doc);
}
