"""Read-only HTTP query layer over a block store.

Three query dimensions: time (from/to + granularity), location (zone),
event (detected bursts). Every endpoint is side-effect-free; while a
replay is live, responses stop one bucket short of the watermark so
closed-range queries stay stable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Iterable, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analytics import (
    BurstParams,
    Gazetteer,
    Lexicon,
    extract_entities,
    sentiment_score,
    top_terms,
    traffic_status,
)
from .errors import EmptyCorpus, InsufficientHistory, PreEpochTimestamp, QcityError
from .fusion import BlockStore, cross_modal_view
from .model import (
    EPOCH,
    BadTimestamp,
    Event,
    SpatioTemporalKey,
    epoch_microseconds,
    format_rfc3339,
    observation_record,
    parse_rfc3339,
)
from .spatial import partition_geojson, time_bucket

RESPONSE_CAP = 100_000  # records per response; beyond this the API answers 413


@dataclass
class ServiceConfig:
    allowed_origin: str = "*"
    traffic_params: BurstParams = field(default_factory=BurstParams)
    top_terms_n: int = 10


class ServiceState:
    """Store plus the analytics resources the endpoints need."""

    def __init__(
        self,
        store: Optional[BlockStore] = None,
        lexicon: Optional[Lexicon] = None,
        gazetteer: Optional[Gazetteer] = None,
        config: Optional[ServiceConfig] = None,
    ):
        self.store = store
        self.lexicon = lexicon or Lexicon()
        self.gazetteer = gazetteer or Gazetteer()
        self.config = config or ServiceConfig()


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.error = error
        self.detail = detail


def _bad_request(detail: str) -> ApiError:
    return ApiError(400, "bad_request", detail)


@dataclass(frozen=True)
class QueryFilter:
    """Validated time slice of one request, resolved to readable buckets."""

    from_ts: datetime
    to_ts: datetime
    granularity_s: int
    zone_id: Optional[str] = None
    first_bucket: int = 0
    last_bucket: int = -1  # inclusive; < first_bucket means empty range

    def buckets(self) -> range:
        return range(self.first_bucket, self.last_bucket + 1)


def _parse_instant(name: str, value: Optional[str]) -> datetime:
    if not value:
        raise _bad_request(f"missing query parameter {name!r}")
    try:
        return parse_rfc3339(value)
    except BadTimestamp as exc:
        raise _bad_request(f"{name}: {exc}") from exc


def _parse_granularity(store: BlockStore, raw: Optional[str]) -> int:
    try:
        granularity_s = int(raw) if raw else 0
    except ValueError:
        raise _bad_request(f"granularity must be an integer, got {raw!r}") from None
    if granularity_s not in store.granularities:
        raise _bad_request(
            f"granularity {raw!r} is not one of {list(store.granularities)}"
        )
    return granularity_s


def _readable_cap(store: BlockStore, granularity_s: int) -> int:
    """Highest readable bucket: one below the watermark bucket while a
    replay is live, the watermark bucket itself on a quiescent store."""
    wm = store.watermark_bucket(granularity_s)
    if wm is None:
        return -1
    return wm - 1 if store.live else wm


def _query_filter(
    store: BlockStore,
    from_raw: Optional[str],
    to_raw: Optional[str],
    granularity_raw: Optional[str],
    zone_id: Optional[str] = None,
) -> QueryFilter:
    from_ts = _parse_instant("from", from_raw)
    to_ts = _parse_instant("to", to_raw)
    if not from_ts < to_ts:
        raise _bad_request("'from' must be strictly before 'to'")
    granularity_s = _parse_granularity(store, granularity_raw)
    try:
        first = time_bucket(from_ts, granularity_s)
    except PreEpochTimestamp as exc:
        raise _bad_request(str(exc)) from exc
    # last bucket overlapping the half-open range [from, to)
    last = (epoch_microseconds(to_ts) - 1) // (granularity_s * 1_000_000)
    last = min(last, _readable_cap(store, granularity_s))
    return QueryFilter(
        from_ts=from_ts,
        to_ts=to_ts,
        granularity_s=granularity_s,
        zone_id=zone_id,
        first_bucket=first,
        last_bucket=last,
    )


def _bucket_start_iso(bucket: int, granularity_s: int) -> str:
    return format_rfc3339(EPOCH + timedelta(seconds=bucket * granularity_s))


def _texts_of(store: BlockStore, obs_ids: Iterable[str]) -> list[str]:
    texts = []
    for obs_id in sorted(obs_ids):
        obs = store.observation(obs_id)
        if obs is not None:
            texts.append(obs.payload.get("text", ""))
    return texts


def _mean_or_none(store_texts: list[str], lexicon: Lexicon) -> Optional[float]:
    if not store_texts:
        return None
    return sum(sentiment_score(t, lexicon) for t in store_texts) / len(store_texts)


def _event_summary(event: Event) -> dict[str, Any]:
    g = event.granularity_s
    return {
        "event_id": event.event_id,
        "zone_id": event.zone_id,
        "granularity_s": g,
        "start_bucket": event.start_bucket,
        "end_bucket": event.end_bucket,
        "start": _bucket_start_iso(event.start_bucket, g),
        "end": _bucket_start_iso(event.end_bucket + 1, g),
        "label": event.label,
        "peak_count": event.peak_count,
        "block_count": len(event.block_keys),
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="qcity", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[state.config.allowed_origin],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"error": exc.error, "detail": exc.detail}
        )

    @app.exception_handler(QcityError)
    async def handle_qcity_error(request: Request, exc: QcityError) -> JSONResponse:
        return JSONResponse(
            status_code=500, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    def require_store() -> BlockStore:
        if state.store is None:
            raise ApiError(503, "store_not_loaded", "no store has been loaded yet")
        return state.store

    @app.get("/zones")
    def zones() -> Any:
        store = require_store()
        return partition_geojson(store.partition)

    @app.get("/density")
    def density(request: Request) -> Any:
        store = require_store()
        params = request.query_params
        q = _query_filter(
            store, params.get("from"), params.get("to"), params.get("granularity")
        )
        counts: dict[str, int] = {z: 0 for z in store.partition.zone_ids}
        social_ids: dict[str, list[str]] = {z: [] for z in store.partition.zone_ids}
        if q.last_bucket >= q.first_bucket:
            for block in store.blocks(q.granularity_s):
                if q.first_bucket <= block.key.bucket_index <= q.last_bucket:
                    counts[block.key.zone_id] += block.size()
                    social_ids[block.key.zone_id].extend(block.social_obs)
        rows = [
            {
                "zone_id": zone_id,
                "count": counts[zone_id],
                "sentiment_mean": _mean_or_none(
                    _texts_of(store, social_ids[zone_id]), state.lexicon
                ),
            }
            for zone_id in store.partition.zone_ids
        ]
        if len(rows) > RESPONSE_CAP:
            raise ApiError(413, "response_too_large", f"{len(rows)} rows > {RESPONSE_CAP}")
        return rows

    @app.get("/timeline")
    def timeline(request: Request) -> Any:
        store = require_store()
        params = request.query_params
        zone_id = params.get("zone")
        if not zone_id:
            raise _bad_request("missing query parameter 'zone'")
        if not store.partition.has_zone(zone_id):
            raise ApiError(404, "unknown_zone", f"zone {zone_id!r} is not in the partition")
        q = _query_filter(
            store, params.get("from"), params.get("to"), params.get("granularity")
        )
        if len(q.buckets()) > RESPONSE_CAP:
            raise ApiError(
                413, "response_too_large", f"{len(q.buckets())} buckets > {RESPONSE_CAP}"
            )
        rows = []
        for bucket in q.buckets():
            block = store.block(SpatioTemporalKey(zone_id, bucket, q.granularity_s))
            texts = _texts_of(store, block.social_obs) if block else []
            rows.append(
                {
                    "bucket": bucket,
                    "start": _bucket_start_iso(bucket, q.granularity_s),
                    "count": block.size() if block else 0,
                    "sentiment_mean": _mean_or_none(texts, state.lexicon),
                }
            )
        return rows

    @app.get("/events")
    def events(request: Request) -> Any:
        store = require_store()
        params = request.query_params
        from_ts = _parse_instant("from", params.get("from"))
        to_ts = _parse_instant("to", params.get("to"))
        if not from_ts < to_ts:
            raise _bad_request("'from' must be strictly before 'to'")
        zone_id = params.get("zone")
        from_us = epoch_microseconds(from_ts)
        to_us = epoch_microseconds(to_ts)
        rows = []
        for event in store.events:
            g_us = event.granularity_s * 1_000_000
            if (
                event.start_bucket * g_us < to_us
                and (event.end_bucket + 1) * g_us > from_us
                and (zone_id is None or event.zone_id == zone_id)
            ):
                rows.append(_event_summary(event))
        if len(rows) > RESPONSE_CAP:
            raise ApiError(413, "response_too_large", f"{len(rows)} rows > {RESPONSE_CAP}")
        return rows

    @app.get("/events/{event_id}")
    def event_detail(event_id: str) -> Any:
        store = require_store()
        event = next((e for e in store.events if e.event_id == event_id), None)
        if event is None:
            raise ApiError(404, "unknown_event", f"no event {event_id!r}")
        detail = _event_summary(event)

        blocks = []
        social_texts: list[str] = []
        sensor_values: dict[str, list[float]] = {}
        total_records = 0
        for key in event.block_keys:
            view = cross_modal_view(key, store)
            total_records += len(view["sensor"]) + len(view["social"])
            blocks.append(
                {
                    "key": {
                        "zone_id": key.zone_id,
                        "bucket_index": key.bucket_index,
                        "granularity_s": key.granularity_s,
                    },
                    "sensor": [observation_record(o) for o in view["sensor"]],
                    "social": [observation_record(o) for o in view["social"]],
                }
            )
            social_texts.extend(o.payload.get("text", "") for o in view["social"])
            for obs in view["sensor"]:
                sensor_values.setdefault(obs.kind, []).append(float(obs.payload["value"]))
        if total_records > RESPONSE_CAP:
            raise ApiError(
                413, "response_too_large", f"{total_records} records > {RESPONSE_CAP}"
            )

        corpus = [b.key for b in store.blocks(event.granularity_s)]
        try:
            terms = top_terms(
                list(event.block_keys), corpus, store, state.config.top_terms_n
            )
        except EmptyCorpus:
            terms = []

        mentions: Counter = Counter()
        for text in social_texts:
            for eid, _ in extract_entities(text, state.gazetteer):
                mentions[eid] += 1

        detail.update(
            {
                "sentiment_mean": _mean_or_none(social_texts, state.lexicon),
                "top_terms": [{"term": t, "score": s} for t, s in terms],
                "entities": [
                    {"entity_id": eid, "mentions": n}
                    for eid, n in sorted(mentions.items(), key=lambda kv: (-kv[1], kv[0]))
                ],
                "sensor_aggregates": {
                    kind: {
                        "count": len(values),
                        "mean": sum(values) / len(values),
                        "min": min(values),
                        "max": max(values),
                    }
                    for kind, values in sorted(sensor_values.items())
                },
                "blocks": blocks,
            }
        )
        return detail

    @app.get("/traffic")
    def traffic(request: Request) -> Any:
        store = require_store()
        params = request.query_params
        at = _parse_instant("at", params.get("at"))
        granularity_s = _parse_granularity(store, params.get("granularity"))
        try:
            bucket = time_bucket(at, granularity_s)
        except PreEpochTimestamp as exc:
            raise _bad_request(str(exc)) from exc
        rows = []
        for zone_id in store.partition.zone_ids:
            try:
                status = traffic_status(
                    zone_id, bucket, granularity_s, store, state.config.traffic_params
                )
            except InsufficientHistory:
                status = "unknown"
            rows.append({"zone_id": zone_id, "status": status})
        return rows

    return app
