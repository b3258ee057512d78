"""Spatial and temporal units: zone partitions, point location, time buckets.

Coordinates are treated as planar lat/lon degrees; at city scale the
geodesic error is negligible. Grid cells and time buckets are half-open
so every point/instant lands in exactly one unit; points on shared
polygon boundaries go to the lexicographically smallest zone_id.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    DegeneratePolygon,
    DuplicateZoneId,
    EmptyPartition,
    MissingField,
    PreEpochTimestamp,
)
from .model import Observation, SpatioTemporalKey, epoch_microseconds

LatLon = tuple[float, float]


@dataclass(frozen=True)
class Granularity:
    """Length of one time bucket, in seconds."""

    seconds: int

    def __post_init__(self) -> None:
        if not isinstance(self.seconds, int) or self.seconds <= 0:
            raise ValueError(f"granularity must be a positive integer, got {self.seconds}")


#: the two bucket presets exposed in the UI: 20 seconds and 5 minutes
DEFAULT_GRANULARITIES = (Granularity(20), Granularity(300))


@dataclass(frozen=True)
class GridSpec:
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float
    cell_size_deg: float

    def __post_init__(self) -> None:
        if self.cell_size_deg <= 0:
            raise ValueError("cell_size_deg must be > 0")
        if self.max_lat <= self.min_lat or self.max_lon <= self.min_lon:
            raise EmptyPartition("grid bbox has no area")


@dataclass(frozen=True)
class Zone:
    zone_id: str
    name: str
    ring: tuple[LatLon, ...]  # open ring, no closing duplicate
    bbox: tuple[float, float, float, float]  # min_lat, min_lon, max_lat, max_lon


def _cells(span: float, cell: float) -> int:
    # tolerate float fuzz so an exact multiple does not gain a sliver cell
    return max(1, math.ceil(span / cell - 1e-9))


class ZonePartition:
    """The city's spatial units: named polygons or a uniform fallback grid.

    Immutable after construction; ``locate`` is pure and thread-safe.
    """

    def __init__(
        self,
        zones: Optional[Sequence[Zone]] = None,
        grid: Optional[GridSpec] = None,
    ):
        if (zones is None) == (grid is None):
            raise ValueError("exactly one of zones or grid required")
        self.grid = grid
        if grid is not None:
            self.zones: tuple[Zone, ...] = ()
            self._rows = _cells(grid.max_lat - grid.min_lat, grid.cell_size_deg)
            self._cols = _cells(grid.max_lon - grid.min_lon, grid.cell_size_deg)
            self._zone_ids = tuple(
                f"g_{r}_{c}" for r in range(self._rows) for c in range(self._cols)
            )
        else:
            if not zones:
                raise EmptyPartition("no zones")
            self.zones = tuple(zones)
            self._zone_ids = tuple(z.zone_id for z in self.zones)
            self._rows = self._cols = 0
        self._zone_id_set = frozenset(self._zone_ids)

    @property
    def zone_ids(self) -> tuple[str, ...]:
        return self._zone_ids

    def has_zone(self, zone_id: str) -> bool:
        return zone_id in self._zone_id_set

    def __len__(self) -> int:
        return len(self._zone_ids)

    def locate(self, lat: float, lon: float) -> Optional[str]:
        """Unique containing zone_id, or None when outside coverage."""
        if self.grid is not None:
            return self._locate_grid(lat, lon)
        hits = [
            z.zone_id
            for z in self.zones
            if z.bbox[0] <= lat <= z.bbox[2]
            and z.bbox[1] <= lon <= z.bbox[3]
            and _point_in_ring(lat, lon, z.ring)
        ]
        return min(hits) if hits else None

    def _locate_grid(self, lat: float, lon: float) -> Optional[str]:
        g = self.grid
        assert g is not None
        if not (g.min_lat <= lat <= g.max_lat and g.min_lon <= lon <= g.max_lon):
            return None
        # half-open cells; the top/right edges of the whole bbox stay closed
        row = min(int((lat - g.min_lat) / g.cell_size_deg), self._rows - 1)
        col = min(int((lon - g.min_lon) / g.cell_size_deg), self._cols - 1)
        return f"g_{row}_{col}"

    def cell_ring(self, zone_id: str) -> tuple[LatLon, ...]:
        """Corner ring of a grid cell (grid partitions only)."""
        g = self.grid
        if g is None:
            raise ValueError("cell_ring is only defined for grid partitions")
        _, r, c = zone_id.split("_")
        row, col = int(r), int(c)
        lat0 = g.min_lat + row * g.cell_size_deg
        lon0 = g.min_lon + col * g.cell_size_deg
        lat1 = min(lat0 + g.cell_size_deg, g.max_lat)
        lon1 = min(lon0 + g.cell_size_deg, g.max_lon)
        return ((lat0, lon0), (lat0, lon1), (lat1, lon1), (lat1, lon0))


def _side_of_edge(
    a_lat: float, a_lon: float, b_lat: float, b_lon: float, lat: float, lon: float
) -> int:
    """Sign of the cross product (left-of test): +1, -1, or 0 (collinear).

    Floats are fine away from the edge, but a point within rounding
    error of the line needs the exact answer, so near-zero results are
    re-evaluated in rational arithmetic.
    """
    t1 = (b_lon - a_lon) * (lat - a_lat)
    t2 = (lon - a_lon) * (b_lat - a_lat)
    cross = t1 - t2
    if abs(cross) > 1e-12 * (abs(t1) + abs(t2)):
        return 1 if cross > 0 else -1
    exact = (Fraction(b_lon) - Fraction(a_lon)) * (Fraction(lat) - Fraction(a_lat)) - (
        Fraction(lon) - Fraction(a_lon)
    ) * (Fraction(b_lat) - Fraction(a_lat))
    return (exact > 0) - (exact < 0)


def _point_in_ring(lat: float, lon: float, ring: Sequence[LatLon]) -> bool:
    """Winding-number containment; points on the boundary count as inside."""
    wn = 0
    n = len(ring)
    for i in range(n):
        a_lat, a_lon = ring[i]
        b_lat, b_lon = ring[(i + 1) % n]
        side = _side_of_edge(a_lat, a_lon, b_lat, b_lon, lat, lon)
        if (
            side == 0
            and min(a_lat, b_lat) <= lat <= max(a_lat, b_lat)
            and min(a_lon, b_lon) <= lon <= max(a_lon, b_lon)
        ):
            return True
        if a_lat <= lat:
            if b_lat > lat and side > 0:
                wn += 1
        elif b_lat <= lat and side < 0:
            wn -= 1
    return wn != 0


def _normalize_ring(points: Iterable[Sequence[float]]) -> tuple[LatLon, ...]:
    ring = [(float(p[0]), float(p[1])) for p in points]
    if len(ring) > 1 and ring[0] == ring[-1]:
        ring = ring[:-1]
    deduped: list[LatLon] = []
    for p in ring:
        if not deduped or deduped[-1] != p:
            deduped.append(p)
    if len(set(deduped)) < 3:
        raise DegeneratePolygon(f"ring has {len(set(deduped))} distinct vertices")
    return tuple(deduped)


def _ring_bbox(ring: Sequence[LatLon]) -> tuple[float, float, float, float]:
    lats = [p[0] for p in ring]
    lons = [p[1] for p in ring]
    return (min(lats), min(lons), max(lats), max(lons))


def _zones_from_geojson(doc: Mapping[str, Any]) -> list[Zone]:
    features = doc.get("features", [])
    zones: list[Zone] = []
    seen: set[str] = set()
    for feature in features:
        props = feature.get("properties") or {}
        zone_id = props.get("zone_id")
        if not zone_id:
            raise MissingField("feature without properties.zone_id")
        if zone_id in seen:
            raise DuplicateZoneId(zone_id)
        seen.add(zone_id)
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Polygon":
            raise DegeneratePolygon(f"zone {zone_id}: geometry must be a Polygon")
        coords = geom.get("coordinates") or []
        if not coords:
            raise DegeneratePolygon(f"zone {zone_id}: empty polygon")
        # GeoJSON order is [lon, lat]; interior rings (holes) are out of scope
        ring = _normalize_ring((pt[1], pt[0]) for pt in coords[0])
        zones.append(
            Zone(
                zone_id=zone_id,
                name=props.get("name", zone_id),
                ring=ring,
                bbox=_ring_bbox(ring),
            )
        )
    if not zones:
        raise EmptyPartition("GeoJSON has no features")
    return zones


PartitionSource = Union[GridSpec, Mapping[str, Any]]


def build_partition(source: PartitionSource) -> ZonePartition:
    """Build a partition from a GridSpec, a grid config map, or GeoJSON."""
    if isinstance(source, GridSpec):
        return ZonePartition(grid=source)
    if isinstance(source, Mapping):
        if source.get("type") == "FeatureCollection":
            return ZonePartition(zones=_zones_from_geojson(source))
        if "bbox" in source:
            bbox = source["bbox"]
            return ZonePartition(
                grid=GridSpec(
                    min_lat=float(bbox["min_lat"]),
                    min_lon=float(bbox["min_lon"]),
                    max_lat=float(bbox["max_lat"]),
                    max_lon=float(bbox["max_lon"]),
                    cell_size_deg=float(source["cell_size_deg"]),
                )
            )
    raise ValueError("partition source must be a GridSpec, grid config, or GeoJSON")


def partition_spec(part: ZonePartition) -> dict[str, Any]:
    """Canonical JSON-serializable description; feeds hashing and snapshots."""
    if part.grid is not None:
        g = part.grid
        return {
            "bbox": {
                "min_lat": g.min_lat,
                "min_lon": g.min_lon,
                "max_lat": g.max_lat,
                "max_lon": g.max_lon,
            },
            "cell_size_deg": g.cell_size_deg,
        }
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"zone_id": z.zone_id, "name": z.name},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [
                        [[lon, lat] for lat, lon in z.ring + (z.ring[0],)]
                    ],
                },
            }
            for z in sorted(part.zones, key=lambda z: z.zone_id)
        ],
    }


def partition_hash(part: ZonePartition) -> str:
    canon = json.dumps(partition_spec(part), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def partition_geojson(part: ZonePartition) -> dict[str, Any]:
    """GeoJSON FeatureCollection; grid cells rendered as rectangles."""
    if part.grid is None:
        return partition_spec(part)
    features = []
    for zone_id in part.zone_ids:
        ring = part.cell_ring(zone_id)
        features.append(
            {
                "type": "Feature",
                "properties": {"zone_id": zone_id, "name": zone_id},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[lon, lat] for lat, lon in ring + (ring[0],)]],
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def time_bucket(ts: datetime, g: Union[Granularity, int]) -> int:
    """floor(seconds since epoch / granularity); buckets are half-open."""
    seconds = g.seconds if isinstance(g, Granularity) else g
    us = epoch_microseconds(ts)
    if us < 0:
        raise PreEpochTimestamp(f"timestamp {ts.isoformat()} precedes the epoch")
    return us // (seconds * 1_000_000)


def bucket_start_us(bucket: int, g: Union[Granularity, int]) -> int:
    seconds = g.seconds if isinstance(g, Granularity) else g
    return bucket * seconds * 1_000_000


def st_key(
    obs: Observation, part: ZonePartition, g: Union[Granularity, int]
) -> Optional[SpatioTemporalKey]:
    """The blocking function: (zone, time bucket, granularity), or None
    when the observation falls outside the covered region."""
    zone_id = part.locate(obs.lat, obs.lon)
    if zone_id is None:
        return None
    seconds = g.seconds if isinstance(g, Granularity) else g
    return SpatioTemporalKey(
        zone_id=zone_id,
        bucket_index=time_bucket(obs.ts, seconds),
        granularity_s=seconds,
    )
