"""Deterministic synthetic city fixture: two tournaments, one venue.

Generates a 10-zone polygon city, two observation streams (sensors and
social posts), a sentiment lexicon, a gazetteer, and a ground-truth
sidecar. Two short tournaments happen at the same venue zone in
different weeks under different names, so event detection must find two
events and content analysis must label them with distinct entities.

Everything derives from one RNG seed; identical seeds give byte
identical files.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Union

from .model import format_rfc3339
from .spatial import ZonePartition, build_partition

DEFAULT_SEED = 7

GRANULARITY_S = 300
VENUE_ZONE = "z03"

# 5 x 2 tiling of the synthetic city
GRID_COLS = 5
GRID_ROWS = 2
LAT0, LON0 = 10.0, 20.0
TILE = 0.1

DAY_ONE = datetime(2026, 1, 5, tzinfo=timezone.utc)
DAY_TWO = DAY_ONE + timedelta(days=7)
ACTIVE_FROM_H = 8  # background traffic runs 08:00-16:00
ACTIVE_TO_H = 16
BURST_START_H = 12  # four 5-minute buckets of tournament rush
BURST_BUCKETS = 4
BURST_EXTRA = (10, 40, 106, 246)  # added on top of the 4 background records

LEXICON = {
    "good": 1, "great": 1, "love": 1, "amazing": 1, "fun": 1, "win": 1, "happy": 1,
    "bad": -1, "terrible": -1, "awful": -1, "jam": -1, "crowded": -1, "delay": -1,
    "stuck": -1,
}

GAZETTEER = [
    ("ace invitational", "ent_ace_invitational", "tournament"),
    ("baseline cup", "ent_baseline_cup", "tournament"),
    ("center court arena", "ent_center_court", "venue"),
]

TOURNAMENTS = [
    {"day": DAY_ONE, "phrase": "ace invitational", "entity": "ent_ace_invitational",
     "target_sentiment": 0.55},
    {"day": DAY_TWO, "phrase": "baseline cup", "entity": "ent_baseline_cup",
     "target_sentiment": 0.10},
]

POSITIVE_TEXTS = [
    "what a great match",
    "love this amazing crowd",
    "so much fun here win after win",
    "great serve happy to be here",
]
NEGATIVE_TEXTS = [
    "terrible traffic jam near the gates",
    "awful queue stuck for ages",
    "crowded and bad signal delay everywhere",
]
NEUTRAL_TEXTS = [
    "walking around the block",
    "coffee first then the matches",
    "anyone selling a spare ticket",
    "the courts look ready",
]
BACKGROUND_TEXTS = [
    "quiet morning on this street",
    "bus was on time today",
    "lunch spot recommendations please",
    "nothing much happening here",
]


@dataclass(frozen=True)
class ScenarioTruth:
    zone_id: str
    granularity_s: int
    analyze_from: datetime
    analyze_to: datetime
    events: list


def _zone_ring(vertices, row: int, col: int) -> list[tuple[float, float]]:
    return [
        vertices[(row, col)],
        vertices[(row, col + 1)],
        vertices[(row + 1, col + 1)],
        vertices[(row + 1, col)],
    ]


def make_zones(rng: random.Random) -> dict:
    """10 simple quads sharing jittered corner vertices (no gaps, no overlap)."""
    vertices = {}
    for r in range(GRID_ROWS + 1):
        for c in range(GRID_COLS + 1):
            lat = LAT0 + r * TILE
            lon = LON0 + c * TILE
            # interior corners get a deterministic nudge so zones are not
            # rectangles; hull corners stay put to keep the bbox exact
            if 0 < r < GRID_ROWS:
                lat += rng.uniform(-0.02, 0.02)
            if 0 < c < GRID_COLS:
                lon += rng.uniform(-0.02, 0.02)
            vertices[(r, c)] = (round(lat, 6), round(lon, 6))
    features = []
    idx = 0
    for r in range(GRID_ROWS):
        for c in range(GRID_COLS):
            zone_id = f"z{idx:02d}"
            ring = _zone_ring(vertices, r, c)
            features.append(
                {
                    "type": "Feature",
                    "properties": {
                        "zone_id": zone_id,
                        "name": ("stadium district" if zone_id == VENUE_ZONE
                                 else f"district {idx:02d}"),
                    },
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [[[lon, lat] for lat, lon in ring + [ring[0]]]],
                    },
                }
            )
            idx += 1
    return {"type": "FeatureCollection", "features": features}


def _point_in_zone(rng: random.Random, part: ZonePartition, zone_id: str):
    zone = next(z for z in part.zones if z.zone_id == zone_id)
    min_lat, min_lon, max_lat, max_lon = zone.bbox
    while True:
        lat = rng.uniform(min_lat, max_lat)
        lon = rng.uniform(min_lon, max_lon)
        if part.locate(lat, lon) == zone_id:
            return round(lat, 6), round(lon, 6)


def _bucket_ts(rng: random.Random, day: datetime, bucket_of_day: int) -> datetime:
    offset = rng.uniform(0.0, GRANULARITY_S - 1.0)
    return day + timedelta(seconds=bucket_of_day * GRANULARITY_S + round(offset, 3))


def _score_of(text: str) -> int:
    tokens = text.split()
    matched = [LEXICON[t] for t in tokens if t in LEXICON]
    if not matched:
        return 0
    return round(sum(matched) / len(matched))


def generate(out_dir: Union[str, Path], seed: int = DEFAULT_SEED) -> ScenarioTruth:
    """Write the fixture into `out_dir` and return the ground truth."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    zones = make_zones(rng)
    part = build_partition(zones)
    (out / "zones.geojson").write_text(
        json.dumps(zones, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )

    (out / "lexicon.tsv").write_text(
        "".join(f"{tok}\t{'+1' if pol > 0 else '-1'}\n" for tok, pol in LEXICON.items()),
        encoding="utf-8",
    )
    (out / "gazetteer.tsv").write_text(
        "".join(f"{surface}\t{eid}\t{etype}\n" for surface, eid, etype in GAZETTEER),
        encoding="utf-8",
    )

    sensor_records: list[tuple[datetime, str, dict]] = []
    social_records: list[tuple[datetime, str, dict]] = []
    seq = {"s": 0, "p": 0}

    def emit_sensor(ts: datetime, zone_id: str, kind: str, value: float) -> None:
        seq["s"] += 1
        obs_id = f"s{seq['s']:07d}"
        lat, lon = _point_in_zone(rng, part, zone_id)
        sensor_records.append(
            (ts, obs_id, {
                "id": obs_id,
                "source": "sensor",
                "kind": kind,
                "ts": format_rfc3339(ts),
                "lat": lat,
                "lon": lon,
                "payload": {"value": round(value, 3),
                            "unit": "veh" if kind == "traffic_count" else "aqi"},
            })
        )

    def emit_social(ts: datetime, zone_id: str, text: str) -> int:
        seq["p"] += 1
        obs_id = f"p{seq['p']:07d}"
        lat, lon = _point_in_zone(rng, part, zone_id)
        social_records.append(
            (ts, obs_id, {
                "id": obs_id,
                "source": "social",
                "kind": "post",
                "ts": format_rfc3339(ts),
                "lat": lat,
                "lon": lon,
                "payload": {
                    "text": text,
                    "user": f"user{rng.randrange(500):03d}",
                    "tags": [],
                },
            })
        )
        return _score_of(text)

    truth_events = []
    for day_idx, tournament in enumerate(TOURNAMENTS):
        day = tournament["day"]
        burst_first = BURST_START_H * 3600 // GRANULARITY_S
        burst_span = range(burst_first, burst_first + BURST_BUCKETS)

        event_scores: list[int] = []
        event_social = 0
        peak_total = 0

        for bucket_of_day in range(
            ACTIVE_FROM_H * 3600 // GRANULARITY_S, ACTIVE_TO_H * 3600 // GRANULARITY_S
        ):
            for zone_id in part.zone_ids:
                in_burst = zone_id == VENUE_ZONE and bucket_of_day in burst_span
                # background: exactly 2 sensor + 2 social records per bucket
                emit_sensor(
                    _bucket_ts(rng, day, bucket_of_day), zone_id, "traffic_count",
                    rng.gauss(60.0 if in_burst else 20.0, 2.0),
                )
                emit_sensor(
                    _bucket_ts(rng, day, bucket_of_day), zone_id, "air_quality",
                    rng.gauss(55.0, 5.0),
                )
                bg_texts = [rng.choice(BACKGROUND_TEXTS), rng.choice(BACKGROUND_TEXTS)]
                if zone_id == VENUE_ZONE and not in_burst and rng.random() < 0.1:
                    bg_texts[0] = "meet me at the center court arena"
                scores = [emit_social(_bucket_ts(rng, day, bucket_of_day), zone_id, t)
                          for t in bg_texts]
                if in_burst:
                    event_scores.extend(scores)
                    event_social += 2

        # tournament rush: extra records on top of the background
        target = tournament["target_sentiment"]
        phrase = tournament["phrase"]
        burst_social_total = sum(round(extra * 0.6) for extra in BURST_EXTRA)

        total_social = burst_social_total + event_social
        diff = round(target * total_social) - sum(event_scores)
        negatives = max(1, burst_social_total // 10)
        positives = diff + negatives
        if positives + negatives > burst_social_total:
            raise ValueError("sentiment target out of reach for planned burst size")
        polarities = (
            [1] * positives + [-1] * negatives
            + [0] * (burst_social_total - positives - negatives)
        )
        rng.shuffle(polarities)

        polarity_iter = iter(polarities)
        for i, extra in enumerate(BURST_EXTRA):
            bucket_of_day = burst_first + i
            n_social = round(extra * 0.6)
            n_sensor = extra - n_social
            peak_total = max(peak_total, extra + 4)
            for _ in range(n_sensor):
                emit_sensor(
                    _bucket_ts(rng, day, bucket_of_day), VENUE_ZONE, "traffic_count",
                    rng.gauss(80.0, 4.0),
                )
            for _ in range(n_social):
                polarity = next(polarity_iter)
                if polarity > 0:
                    text = rng.choice(POSITIVE_TEXTS)
                elif polarity < 0:
                    text = rng.choice(NEGATIVE_TEXTS)
                else:
                    text = rng.choice(NEUTRAL_TEXTS)
                if rng.random() < 0.7:
                    text = f"{text} at the {phrase}"
                score = emit_social(
                    _bucket_ts(rng, day, bucket_of_day), VENUE_ZONE, text
                )
                event_scores.append(score)
                event_social += 1

        day_bucket0 = int((day - datetime(1970, 1, 1, tzinfo=timezone.utc))
                          .total_seconds()) // GRANULARITY_S
        truth_events.append(
            {
                "zone_id": VENUE_ZONE,
                "label": tournament["entity"],
                "start_bucket": day_bucket0 + burst_first,
                "end_bucket": day_bucket0 + burst_first + BURST_BUCKETS - 1,
                "sentiment_mean": sum(event_scores) / len(event_scores),
                "social_count": event_social,
                "peak_count": peak_total,
            }
        )

    sensor_records.sort(key=lambda r: (r[0], r[1]))
    social_records.sort(key=lambda r: (r[0], r[1]))

    def dump_all(records) -> str:
        return "".join(
            json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n"
            for _, _, rec in records
        )

    (out / "sensors.jsonl").write_text(dump_all(sensor_records), encoding="utf-8")
    (out / "social.jsonl").write_text(dump_all(social_records), encoding="utf-8")

    truth = ScenarioTruth(
        zone_id=VENUE_ZONE,
        granularity_s=GRANULARITY_S,
        analyze_from=DAY_ONE,
        analyze_to=DAY_TWO + timedelta(days=1),
        events=truth_events,
    )
    (out / "truth.json").write_text(
        json.dumps(
            {
                "seed": seed,
                "zone_id": truth.zone_id,
                "granularity_s": truth.granularity_s,
                "analyze_from": format_rfc3339(truth.analyze_from),
                "analyze_to": format_rfc3339(truth.analyze_to),
                "events": truth.events,
            },
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return truth
