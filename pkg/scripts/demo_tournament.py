#!/usr/bin/env python3
"""End-to-end demo: generate the tournament fixture, run the pipeline,
print what the query layer sees.

Usage: python scripts/demo_tournament.py [workdir]
Then explore interactively with:
    qcity serve --store <workdir>/store \
        --lexicon <workdir>/fixture/lexicon.tsv \
        --gazetteer <workdir>/fixture/gazetteer.tsv
"""

import json
import sys
import tempfile
from pathlib import Path

from qcity import scenario
from qcity.analytics import (
    BurstParams,
    find_zone_events,
    label_event,
    load_gazetteer,
    load_lexicon,
    traffic_status,
)
from qcity.errors import InsufficientHistory
from qcity.fusion import BlockStore
from qcity.ingest import SourceSpec, ingest_file
from qcity.model import epoch_microseconds
from qcity.persist import snapshot
from qcity.spatial import build_partition


def main() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    fixture_dir = workdir / "fixture"
    print(f"workdir: {workdir}")

    truth = scenario.generate(fixture_dir, seed=scenario.DEFAULT_SEED)
    print(f"fixture: {len(truth.events)} planted events in zone {truth.zone_id}")

    part = build_partition(json.loads((fixture_dir / "zones.geojson").read_text()))
    store = BlockStore(part, (20, 300))
    for name in ("sensors.jsonl", "social.jsonl"):
        report = ingest_file(SourceSpec(name, fixture_dir / name), store)
        print(f"ingested {name}: {report.accepted} records")

    g = truth.granularity_s
    first = epoch_microseconds(truth.analyze_from) // (g * 10**6)
    last = (epoch_microseconds(truth.analyze_to) - 1) // (g * 10**6)
    gazetteer = load_gazetteer(fixture_dir / "gazetteer.tsv")
    lexicon = load_lexicon(fixture_dir / "lexicon.tsv")

    events = []
    for zone_id in part.zone_ids:
        for event in find_zone_events(store, zone_id, g, (first, last), BurstParams()):
            events.append(label_event(event, store, gazetteer))
    store.set_events(events)
    snapshot(store, workdir / "store")

    print(f"\ndetected {len(events)} events:")
    for event in events:
        planted = next(
            (t for t in truth.events if t["start_bucket"] == event.start_bucket), None
        )
        note = f" (planted sentiment {planted['sentiment_mean']:+.3f})" if planted else ""
        print(
            f"  {event.event_id}: label={event.label} peak={event.peak_count}{note}"
        )

    burst_bucket = truth.events[0]["start_bucket"] + 1
    print(f"\ntraffic status at bucket {burst_bucket} (g={g}s):")
    for zone_id in part.zone_ids:
        try:
            status = traffic_status(zone_id, burst_bucket, g, store)
        except InsufficientHistory:
            status = "unknown"
        print(f"  {zone_id}: {status}")

    print(f"\nstore snapshot: {workdir / 'store'}")
    print("serve it with:")
    print(
        f"  qcity serve --store {workdir / 'store'} "
        f"--lexicon {fixture_dir / 'lexicon.tsv'} "
        f"--gazetteer {fixture_dir / 'gazetteer.tsv'}"
    )


if __name__ == "__main__":
    main()
