"""Operator entry point: ingest, replay, analyze, serve, fixture.

Exit codes: 0 success, 1 fatal error, 2 usage error. The --store option
of every command falls back to the QCITY_STORE environment variable.
"""

from __future__ import annotations

import json
import sys
import threading
from pathlib import Path
from typing import Optional

import click

from . import analytics, ingest as ingest_mod, persist, scenario, service
from .errors import QcityError, SeriesTooShort
from .fusion import BlockStore
from .model import format_rfc3339, parse_rfc3339
from .spatial import build_partition, time_bucket


def _parse_granularities(raw: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"bad granularity list {raw!r}") from None
    if not values or any(v <= 0 for v in values):
        raise click.UsageError(f"granularities must be positive integers, got {raw!r}")
    return values


def _load_grid_spec(raw: str) -> dict:
    text = raw
    path = Path(raw)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError:
        raise click.UsageError(f"--grid must be JSON or a JSON file, got {raw!r}") from None
    if not isinstance(spec, dict) or "bbox" not in spec:
        raise click.UsageError("--grid spec needs bbox.{min_lat,min_lon,max_lat,max_lon}")
    return spec


def _build_store(
    zones_file: Optional[str], grid_raw: Optional[str], granularities: list[int]
) -> BlockStore:
    if (zones_file is None) == (grid_raw is None):
        raise click.UsageError("exactly one of --zones or --grid is required")
    if zones_file is not None:
        doc = json.loads(Path(zones_file).read_text(encoding="utf-8"))
        partition = build_partition(doc)
    else:
        partition = build_partition(_load_grid_spec(grid_raw))
    return BlockStore(partition, granularities)


def _fatal(exc: Exception) -> "NoReturn":  # noqa: F821
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """City observation pipeline: fuse streams into blocks, mine them, serve them."""


@main.command(name="ingest")
@click.option("--zones", "zones_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--grid", "grid_raw", help="grid spec JSON (inline or a file path)")
@click.option("--input", "inputs", multiple=True, required=True,
              help="observation JSONL file; repeatable")
@click.option("--granularity", "granularity_raw", default="20,300", show_default=True,
              help="comma-separated bucket lengths in seconds")
@click.option("--store", "store_dir", required=True, envvar="QCITY_STORE")
def ingest_cmd(zones_file, grid_raw, inputs, granularity_raw, store_dir) -> None:
    """Batch-ingest observation files, fuse, and snapshot the store."""
    granularities = _parse_granularities(granularity_raw)
    store = _build_store(zones_file, grid_raw, granularities)
    report = ingest_mod.IngestReport()
    try:
        for idx, path in enumerate(inputs):
            spec = ingest_mod.SourceSpec(source_id=f"src{idx}", path=path)
            report.merge(ingest_mod.ingest_file(spec, store))
        persist.snapshot(store, store_dir)
    except QcityError as exc:
        _fatal(exc)
    click.echo(json.dumps(report.as_dict()))


@main.command(name="replay")
@click.option("--zones", "zones_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--grid", "grid_raw")
@click.option("--input", "inputs", multiple=True, required=True)
@click.option("--granularity", "granularity_raw", default="20,300", show_default=True)
@click.option("--speed", type=float, default=0.0, show_default=True,
              help="wall-clock compression factor; 0 replays as fast as possible")
@click.option("--store", "store_dir", required=True, envvar="QCITY_STORE")
@click.option("--serve", "serve_port", type=int, default=None,
              help="serve the query API on this port during and after the replay")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--gazetteer", "gazetteer_path", type=click.Path(exists=True, dir_okay=False))
def replay_cmd(zones_file, grid_raw, inputs, granularity_raw, speed, store_dir,
               serve_port, lexicon_path, gazetteer_path) -> None:
    """Replay observation files against a live store at scaled event time."""
    if speed < 0:
        raise click.UsageError("--speed must be >= 0")
    granularities = _parse_granularities(granularity_raw)
    store_path = Path(store_dir)
    try:
        if (store_path / persist.MANIFEST_FILE).is_file():
            store = persist.load(store_path)
        else:
            store = _build_store(zones_file, grid_raw, granularities)
    except QcityError as exc:
        _fatal(exc)

    server = None
    server_thread = None
    if serve_port is not None:
        import uvicorn

        state = service.ServiceState(
            store=store,
            lexicon=analytics.load_lexicon(lexicon_path) if lexicon_path else None,
            gazetteer=analytics.load_gazetteer(gazetteer_path) if gazetteer_path else None,
        )
        config = uvicorn.Config(
            service.create_app(state), host="127.0.0.1", port=serve_port,
            log_level="warning",
        )
        server = uvicorn.Server(config)
        server_thread = threading.Thread(target=server.run, daemon=True)
        server_thread.start()

    specs = [
        ingest_mod.SourceSpec(source_id=f"src{idx}", path=path, replay_speed=speed)
        for idx, path in enumerate(inputs)
    ]
    try:
        report = ingest_mod.replay(specs, ingest_mod.ReplayClock(speed), store)
        persist.snapshot(store, store_dir)
    except QcityError as exc:
        _fatal(exc)
    click.echo(json.dumps(report.as_dict()))
    if server is not None:
        click.echo(f"replay done; still serving on port {serve_port}", err=True)
        server_thread.join()


@main.group(name="analyze")
def analyze_group() -> None:
    """Analytics passes over a snapshotted store."""


@analyze_group.command(name="events")
@click.option("--store", "store_dir", required=True, envvar="QCITY_STORE")
@click.option("--from", "from_raw", required=True, help="RFC 3339 range start")
@click.option("--to", "to_raw", required=True, help="RFC 3339 range end (exclusive)")
@click.option("--granularity", type=int, required=True)
@click.option("--params", "params_raw", default=None,
              help="burst parameters as W,k,min_count")
@click.option("--gazetteer", "gazetteer_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, default=False)
def analyze_events_cmd(store_dir, from_raw, to_raw, granularity, params_raw,
                       gazetteer_path, as_json) -> None:
    """Detect and label burst events over every zone, then re-snapshot."""
    params = analytics.BurstParams()
    if params_raw:
        try:
            w, k, min_count = params_raw.split(",")
            params = analytics.BurstParams(
                window=int(w), k=float(k), min_count=int(min_count)
            )
        except (ValueError, TypeError):
            raise click.UsageError(f"--params must be W,k,min_count, got {params_raw!r}") from None
    try:
        store = persist.load(store_dir)
        from_ts = parse_rfc3339(from_raw)
        to_ts = parse_rfc3339(to_raw)
        if granularity not in store.granularities:
            raise click.UsageError(
                f"granularity {granularity} not in store granularities {store.granularities}"
            )
        first = time_bucket(from_ts, granularity)
    except click.UsageError:
        raise
    except QcityError as exc:
        _fatal(exc)

    from .model import epoch_microseconds

    # last bucket overlapping the half-open range [from, to)
    last_bucket = (epoch_microseconds(to_ts) - 1) // (granularity * 1_000_000)
    gaz = analytics.load_gazetteer(gazetteer_path) if gazetteer_path else analytics.Gazetteer()

    events = []
    for zone_id in store.partition.zone_ids:
        try:
            found = analytics.find_zone_events(
                store, zone_id, granularity, (first, last_bucket), params
            )
        except SeriesTooShort as exc:
            click.echo(f"warning: zone {zone_id}: {exc}", err=True)
            continue
        if gazetteer_path:
            found = [analytics.label_event(e, store, gaz) for e in found]
        events.extend(found)

    store.set_events(events)
    try:
        persist.snapshot(store, store_dir)
    except QcityError as exc:
        _fatal(exc)

    if as_json:
        from .model import event_record

        click.echo(json.dumps([event_record(e) for e in store.events]))
    else:
        click.echo(f"{len(store.events)} events")
        for e in store.events:
            click.echo(
                f"{e.event_id} zone={e.zone_id} buckets=[{e.start_bucket},{e.end_bucket}] "
                f"peak={e.peak_count} label={e.label or '-'}"
            )


@main.command(name="serve")
@click.option("--store", "store_dir", required=True, envvar="QCITY_STORE")
@click.option("--port", type=int, default=8645, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--origin", default="*", show_default=True,
              help="allowed CORS origin for the dashboard")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--gazetteer", "gazetteer_path", type=click.Path(exists=True, dir_okay=False))
def serve_cmd(store_dir, port, host, origin, lexicon_path, gazetteer_path) -> None:
    """Load a snapshot and serve the query API."""
    import uvicorn

    try:
        store = persist.load(store_dir)
    except QcityError as exc:
        _fatal(exc)
    state = service.ServiceState(
        store=store,
        lexicon=analytics.load_lexicon(lexicon_path) if lexicon_path else None,
        gazetteer=analytics.load_gazetteer(gazetteer_path) if gazetteer_path else None,
        config=service.ServiceConfig(allowed_origin=origin),
    )
    uvicorn.run(service.create_app(state), host=host, port=port, log_level="info")


@main.command(name="fixture")
@click.option("--scenario", "scenario_name", default="tournament", show_default=True)
@click.option("--out", "out_dir", required=True)
@click.option("--seed", type=int, default=scenario.DEFAULT_SEED, show_default=True)
def fixture_cmd(scenario_name, out_dir, seed) -> None:
    """Generate a deterministic synthetic scenario with ground truth."""
    if scenario_name != "tournament":
        raise click.UsageError(f"unknown scenario {scenario_name!r}")
    truth = scenario.generate(out_dir, seed=seed)
    click.echo(
        json.dumps(
            {
                "out": str(out_dir),
                "seed": seed,
                "zone_id": truth.zone_id,
                "events": len(truth.events),
                "analyze_from": format_rfc3339(truth.analyze_from),
                "analyze_to": format_rfc3339(truth.analyze_to),
            }
        )
    )


if __name__ == "__main__":
    main()
