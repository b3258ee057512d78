"""Shared fixtures: partitions, stores, and a ten-polygon city."""

import json
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from qcity.fusion import BlockStore
from qcity.model import Observation, validate_observation
from qcity.spatial import GridSpec, ZonePartition, build_partition

T0 = datetime(1970, 1, 1, tzinfo=timezone.utc)


def ts(seconds: float) -> datetime:
    return T0 + timedelta(seconds=seconds)


def make_obs(
    obs_id: str,
    *,
    source: str = "sensor",
    kind: str = "traffic_count",
    at: float = 0.0,
    lat: float = 0.25,
    lon: float = 0.25,
    text: str = "",
    value: float = 1.0,
) -> Observation:
    if source == "sensor":
        payload = {"value": value, "unit": "veh"}
    else:
        payload = {"text": text, "user": "u", "tags": []}
    return validate_observation(
        {
            "id": obs_id,
            "source": source,
            "kind": kind if source == "sensor" else "post",
            "ts": ts(at).isoformat().replace("+00:00", "Z"),
            "lat": lat,
            "lon": lon,
            "payload": payload,
        }
    )


@pytest.fixture
def unit_grid() -> ZonePartition:
    """2x2 grid over the unit square, cell 0.5 degrees."""
    return build_partition(GridSpec(0.0, 0.0, 1.0, 1.0, 0.5))


@pytest.fixture
def grid_store(unit_grid) -> BlockStore:
    return BlockStore(unit_grid, granularities=(20, 300))


def ten_polygon_city(seed: int = 31) -> ZonePartition:
    """Ten simple quads tiling a 5x2 box, corners jittered but shared,
    so adjacent zones have exactly coincident boundary segments."""
    rng = random.Random(seed)
    rows, cols, tile = 2, 5, 1.0
    vertices = {}
    for r in range(rows + 1):
        for c in range(cols + 1):
            lat = r * tile
            lon = c * tile
            if 0 < r < rows:
                lat += rng.uniform(-0.2, 0.2)
            if 0 < c < cols:
                lon += rng.uniform(-0.2, 0.2)
            # keep coordinates exactly representable-ish and readable
            vertices[(r, c)] = (round(lat, 4), round(lon, 4))
    features = []
    idx = 0
    for r in range(rows):
        for c in range(cols):
            ring = [
                vertices[(r, c)],
                vertices[(r, c + 1)],
                vertices[(r + 1, c + 1)],
                vertices[(r + 1, c)],
            ]
            features.append(
                {
                    "type": "Feature",
                    "properties": {"zone_id": f"p{idx:02d}", "name": f"poly {idx}"},
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [[[lon, lat] for lat, lon in ring + [ring[0]]]],
                    },
                }
            )
            idx += 1
    return build_partition({"type": "FeatureCollection", "features": features})


@pytest.fixture
def polygon_city() -> ZonePartition:
    return ten_polygon_city()


def write_jsonl(path: Path, records) -> None:
    path.write_text(
        "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records),
        encoding="utf-8",
    )


def store_digest(root: Path) -> dict:
    """Byte content of every snapshot file, keyed by name."""
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}
