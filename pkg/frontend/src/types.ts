/** Payload shapes of the query API. The dashboard renders these verbatim;
 * analytics never get recomputed client-side. */

export interface ZoneFeature {
  type: "Feature";
  properties: { zone_id: string; name: string };
  geometry: { type: "Polygon"; coordinates: number[][][] }; // [lon, lat] rings
}

export interface ZonesDoc {
  type: "FeatureCollection";
  features: ZoneFeature[];
}

export interface DensityRow {
  zone_id: string;
  count: number;
  sentiment_mean: number | null;
}

export interface TimelineRow {
  bucket: number;
  start: string; // RFC 3339
  count: number;
  sentiment_mean: number | null;
}

export interface EventSummary {
  event_id: string;
  zone_id: string;
  granularity_s: number;
  start_bucket: number;
  end_bucket: number;
  start: string;
  end: string;
  label: string | null;
  peak_count: number;
  block_count: number;
}

export interface BlockView {
  key: { zone_id: string; bucket_index: number; granularity_s: number };
  sensor: unknown[];
  social: unknown[];
}

export interface EventDetail extends EventSummary {
  sentiment_mean: number | null;
  top_terms: { term: string; score: number }[];
  entities: { entity_id: string; mentions: number }[];
  sensor_aggregates: Record<
    string,
    { count: number; mean: number; min: number; max: number }
  >;
  blocks: BlockView[];
}

export interface TrafficRow {
  zone_id: string;
  status: "green" | "yellow" | "red" | "unknown";
}
