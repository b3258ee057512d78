#!/usr/bin/env python3
"""Blocking-throughput micro-benchmark: fuse N random observations at two
granularities, then snapshot. Prints records/second per stage.

Usage: python scripts/bench_blocking.py [n_observations]
"""

import random
import sys
import tempfile
import time
from pathlib import Path

from qcity.fusion import BlockStore
from qcity.model import validate_observation
from qcity.persist import snapshot
from qcity.spatial import GridSpec, build_partition


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 50_000
    rng = random.Random(1)

    t0 = time.perf_counter()
    observations = []
    for i in range(n):
        source = "sensor" if rng.random() < 0.5 else "social"
        payload = (
            {"value": rng.uniform(0, 100), "unit": "veh"}
            if source == "sensor"
            else {"text": "great game" if rng.random() < 0.3 else "just walking",
                  "user": "u", "tags": []}
        )
        observations.append(
            validate_observation(
                {
                    "id": f"o{i:07d}",
                    "source": source,
                    "kind": "traffic_count" if source == "sensor" else "post",
                    "ts": f"2026-01-05T{rng.randrange(24):02d}:"
                          f"{rng.randrange(60):02d}:{rng.randrange(60):02d}Z",
                    "lat": rng.uniform(0, 1),
                    "lon": rng.uniform(0, 1),
                    "payload": payload,
                }
            )
        )
    t_validate = time.perf_counter() - t0
    print(f"validate: {n} records in {t_validate:.2f}s ({n / t_validate:,.0f}/s)")

    part = build_partition(GridSpec(0.0, 0.0, 1.0, 1.0, 0.05))
    store = BlockStore(part, (20, 300))
    t0 = time.perf_counter()
    for obs in observations:
        store.fuse(obs)
    t_fuse = time.perf_counter() - t0
    print(f"fuse:     {n} records in {t_fuse:.2f}s ({n / t_fuse:,.0f}/s), "
          f"{sum(len(store.blocks(g)) for g in store.granularities)} blocks")

    out = Path(tempfile.mkdtemp()) / "store"
    t0 = time.perf_counter()
    snapshot(store, out)
    t_snap = time.perf_counter() - t0
    print(f"snapshot: {t_snap:.2f}s -> {out}")


if __name__ == "__main__":
    main()
