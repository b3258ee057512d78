"""Shared domain types: observations, blocking keys, blocks, events.

All types are immutable values after construction and safe to share
across threads. Wire-format parsing lives in :func:`validate_observation`;
the canonical JSON record form is produced by :func:`observation_record`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Mapping, Optional

from .errors import (
    BadCoordinate,
    BadPayload,
    BadTimestamp,
    MissingField,
)

SENSOR = "sensor"
SOCIAL = "social"
SOURCES = (SENSOR, SOCIAL)

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp into a UTC-normalized aware datetime.

    Offsets other than Z are converted to UTC. Naive timestamps are
    rejected: the bucket timeline needs one canonical clock.
    """
    if not isinstance(value, str) or not value:
        raise BadTimestamp(f"timestamp must be an RFC 3339 string, got {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise BadTimestamp(f"unparseable timestamp {value!r}") from exc
    if dt.tzinfo is None:
        raise BadTimestamp(f"timestamp {value!r} has no UTC offset")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    """Canonical RFC 3339 UTC rendering ('Z' suffix, microseconds if nonzero)."""
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def epoch_microseconds(dt: datetime) -> int:
    """Exact integer microseconds since the Unix epoch (avoids float ts)."""
    delta = dt.astimezone(timezone.utc) - EPOCH
    return (delta.days * 86_400 + delta.seconds) * 1_000_000 + delta.microseconds


@dataclass(frozen=True)
class Observation:
    """One timestamped, geolocated record from either modality."""

    id: str
    source: str  # "sensor" | "social"
    kind: str  # e.g. "traffic_count", "air_quality", "post"
    ts: datetime  # aware, UTC
    lat: float
    lon: float
    payload: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, order=True)
class SpatioTemporalKey:
    """The blocking key: records sharing one form a cross-modal block."""

    zone_id: str
    bucket_index: int
    granularity_s: int


@dataclass(frozen=True)
class Block:
    """All observations sharing one blocking key, split by modality."""

    key: SpatioTemporalKey
    sensor_obs: frozenset[str] = frozenset()
    social_obs: frozenset[str] = frozenset()

    def size(self) -> int:
        return len(self.sensor_obs) + len(self.social_obs)


@dataclass(frozen=True)
class Event:
    """A detected burst: zone, inclusive bucket span, label, linked blocks."""

    event_id: str
    zone_id: str
    start_bucket: int
    end_bucket: int
    granularity_s: int
    peak_count: int
    label: Optional[str] = None
    block_keys: tuple[SpatioTemporalKey, ...] = ()


def _require(raw: Mapping[str, Any], name: str) -> Any:
    if name not in raw or raw[name] is None:
        raise MissingField(f"missing field {name!r}")
    return raw[name]


def _real(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError
    return float(value)


def validate_observation(raw: Mapping[str, Any]) -> Observation:
    """Validate one raw wire record into an Observation.

    Pure: the same raw map always yields the same result. Unknown extra
    fields are ignored for forward compatibility; payloads are normalized
    to the modality's known fields.
    """
    obs_id = _require(raw, "id")
    if not isinstance(obs_id, str) or not obs_id:
        raise MissingField("id must be a non-empty string")

    source = _require(raw, "source")
    if source not in SOURCES:
        raise BadPayload(f"unknown source {source!r}")

    kind = _require(raw, "kind")
    if not isinstance(kind, str) or not kind:
        raise MissingField("kind must be a non-empty string")

    ts = parse_rfc3339(_require(raw, "ts"))

    try:
        lat = _real(_require(raw, "lat"))
        lon = _real(_require(raw, "lon"))
    except TypeError:
        raise BadCoordinate("lat/lon must be numbers") from None
    if math.isnan(lat) or math.isnan(lon):
        raise BadCoordinate("lat/lon must not be NaN")
    if not -90.0 <= lat <= 90.0:
        raise BadCoordinate(f"lat {lat} out of [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise BadCoordinate(f"lon {lon} out of [-180, 180]")

    payload = _require(raw, "payload")
    if not isinstance(payload, Mapping):
        raise BadPayload("payload must be an object")

    if source == SENSOR:
        if "value" not in payload:
            raise BadPayload("sensor payload needs a numeric value")
        try:
            value = _real(payload["value"])
        except TypeError:
            raise BadPayload("sensor value must be a number") from None
        if not math.isfinite(value):
            raise BadPayload("sensor value must be finite")
        unit = payload.get("unit", "")
        if not isinstance(unit, str):
            raise BadPayload("sensor unit must be a string")
        norm_payload: dict[str, Any] = {"value": value, "unit": unit}
    else:
        if "text" not in payload or not isinstance(payload["text"], str):
            raise BadPayload("social payload needs a text field")
        user = payload.get("user", "")
        if not isinstance(user, str):
            raise BadPayload("social user must be a string")
        tags = payload.get("tags", ())
        if not isinstance(tags, (list, tuple)) or any(
            not isinstance(t, str) for t in tags
        ):
            raise BadPayload("social tags must be a list of strings")
        norm_payload = {"text": payload["text"], "user": user, "tags": tuple(tags)}

    return Observation(
        id=obs_id, source=source, kind=kind, ts=ts, lat=lat, lon=lon,
        payload=norm_payload,
    )


def observation_record(obs: Observation) -> dict[str, Any]:
    """Canonical JSON-serializable record; re-validating it round-trips."""
    payload = {
        k: list(v) if isinstance(v, tuple) else v for k, v in obs.payload.items()
    }
    return {
        "id": obs.id,
        "source": obs.source,
        "kind": obs.kind,
        "ts": format_rfc3339(obs.ts),
        "lat": obs.lat,
        "lon": obs.lon,
        "payload": payload,
    }


def key_record(key: SpatioTemporalKey) -> dict[str, Any]:
    return {
        "zone_id": key.zone_id,
        "bucket_index": key.bucket_index,
        "granularity_s": key.granularity_s,
    }


def key_from_record(rec: Mapping[str, Any]) -> SpatioTemporalKey:
    return SpatioTemporalKey(
        zone_id=rec["zone_id"],
        bucket_index=int(rec["bucket_index"]),
        granularity_s=int(rec["granularity_s"]),
    )


def event_record(event: Event) -> dict[str, Any]:
    return {
        "event_id": event.event_id,
        "zone_id": event.zone_id,
        "start_bucket": event.start_bucket,
        "end_bucket": event.end_bucket,
        "granularity_s": event.granularity_s,
        "peak_count": event.peak_count,
        "label": event.label,
        "block_keys": [key_record(k) for k in event.block_keys],
    }


def event_from_record(rec: Mapping[str, Any]) -> Event:
    return Event(
        event_id=rec["event_id"],
        zone_id=rec["zone_id"],
        start_bucket=int(rec["start_bucket"]),
        end_bucket=int(rec["end_bucket"]),
        granularity_s=int(rec["granularity_s"]),
        peak_count=int(rec["peak_count"]),
        label=rec.get("label"),
        block_keys=tuple(key_from_record(k) for k in rec.get("block_keys", ())),
    )
