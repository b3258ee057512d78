"""Observation validation and canonical serialization."""

from datetime import timezone

import pytest
from hypothesis import given, strategies as st

from qcity.errors import BadCoordinate, BadPayload, BadTimestamp, MissingField
from qcity.model import (
    format_rfc3339,
    observation_record,
    parse_rfc3339,
    validate_observation,
)

MINIMAL_SENSOR = {
    "id": "a",
    "source": "sensor",
    "kind": "traffic_count",
    "ts": "1970-01-01T00:00:00Z",
    "lat": 0,
    "lon": 0,
    "payload": {"value": 3, "unit": "veh"},
}


def test_minimal_sensor_record_is_valid():
    obs = validate_observation(MINIMAL_SENSOR)
    assert obs.id == "a"
    assert obs.source == "sensor"
    assert obs.payload == {"value": 3.0, "unit": "veh"}
    assert obs.ts.tzinfo == timezone.utc


def test_out_of_bounds_latitude_rejected():
    with pytest.raises(BadCoordinate):
        validate_observation({**MINIMAL_SENSOR, "lat": 91})
    with pytest.raises(BadCoordinate):
        validate_observation({**MINIMAL_SENSOR, "lon": -180.5})
    with pytest.raises(BadCoordinate):
        validate_observation({**MINIMAL_SENSOR, "lat": float("nan")})


def test_modality_payload_mismatch_rejected():
    social_with_sensor_payload = {**MINIMAL_SENSOR, "source": "social"}
    with pytest.raises(BadPayload):
        validate_observation(social_with_sensor_payload)


def test_sensor_payload_needs_finite_value():
    with pytest.raises(BadPayload):
        validate_observation({**MINIMAL_SENSOR, "payload": {"unit": "veh"}})
    with pytest.raises(BadPayload):
        validate_observation({**MINIMAL_SENSOR, "payload": {"value": float("inf")}})


def test_missing_fields_rejected():
    for field in ("id", "source", "kind", "ts", "lat", "lon", "payload"):
        raw = dict(MINIMAL_SENSOR)
        del raw[field]
        with pytest.raises((MissingField, BadTimestamp, BadCoordinate, BadPayload)):
            validate_observation(raw)


def test_empty_social_text_is_allowed():
    obs = validate_observation(
        {**MINIMAL_SENSOR, "source": "social", "kind": "post",
         "payload": {"text": ""}}
    )
    assert obs.payload["text"] == ""
    assert obs.payload["tags"] == ()


def test_unknown_extra_fields_ignored():
    obs = validate_observation({**MINIMAL_SENSOR, "battery": 0.7, "firmware": "v2"})
    assert obs == validate_observation(MINIMAL_SENSOR)


def test_offset_timestamps_normalize_to_utc():
    obs = validate_observation({**MINIMAL_SENSOR, "ts": "1970-01-01T03:00:00+03:00"})
    assert obs.ts == validate_observation(MINIMAL_SENSOR).ts


def test_naive_timestamp_rejected():
    with pytest.raises(BadTimestamp):
        validate_observation({**MINIMAL_SENSOR, "ts": "1970-01-01T00:00:00"})
    with pytest.raises(BadTimestamp):
        validate_observation({**MINIMAL_SENSOR, "ts": "not a date"})


def test_validate_is_pure():
    raw = {**MINIMAL_SENSOR, "payload": {"value": 2.5, "unit": "ppm"}}
    assert validate_observation(raw) == validate_observation(raw)


def test_round_trip_sensor_and_social():
    social = {
        "id": "b",
        "source": "social",
        "kind": "post",
        "ts": "2026-01-05T12:00:01.250Z",
        "lat": 10.125,
        "lon": 20.0625,
        "payload": {"text": "Good GAME!!", "user": "fan", "tags": ["tennis"]},
    }
    for raw in (MINIMAL_SENSOR, social):
        obs = validate_observation(raw)
        assert validate_observation(observation_record(obs)) == obs


rfc_instants = st.datetimes(
    min_value=parse_rfc3339("1970-01-01T00:00:00Z").replace(tzinfo=None),
    max_value=parse_rfc3339("2100-01-01T00:00:00Z").replace(tzinfo=None),
).map(lambda dt: dt.replace(tzinfo=timezone.utc))


@given(rfc_instants)
def test_rfc3339_format_parse_round_trip(dt):
    assert parse_rfc3339(format_rfc3339(dt)) == dt


@given(
    st.text(min_size=1, max_size=8).filter(str.strip),
    st.floats(min_value=-90, max_value=90, allow_nan=False),
    st.floats(min_value=-180, max_value=180, allow_nan=False),
    st.floats(min_value=-1e12, max_value=1e12, allow_nan=False),
    rfc_instants,
)
def test_serialization_round_trip_property(obs_id, lat, lon, value, dt):
    raw = {
        "id": obs_id,
        "source": "sensor",
        "kind": "k",
        "ts": format_rfc3339(dt),
        "lat": lat,
        "lon": lon,
        "payload": {"value": value, "unit": "u"},
    }
    obs = validate_observation(raw)
    assert validate_observation(observation_record(obs)) == obs
