"""Durable store snapshots: plain JSONL files plus a manifest.

The layout is deliberately diffable: every file is written in a
canonical sort order, so two snapshots of equal stores are byte
identical. Rewrites are write-temp-then-rename, per file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from .errors import (
    CorruptRecord,
    InconsistentStore,
    IoError,
    ValidationError,
    VersionMismatch,
)
from .fusion import BlockStore
from .model import (
    Observation,
    event_from_record,
    event_record,
    format_rfc3339,
    key_record,
    observation_record,
    parse_rfc3339,
    validate_observation,
)
from .spatial import build_partition, partition_hash, partition_spec

STORE_VERSION = 1

MANIFEST_FILE = "manifest.json"
PARTITION_FILE = "partition.json"
OBSERVATIONS_FILE = "observations.jsonl"
EVENTS_FILE = "events.jsonl"
LATE_FILE = "late.jsonl"


def blocks_file(granularity_s: int) -> str:
    return f"blocks_{granularity_s}.jsonl"


@dataclass(frozen=True)
class StoreManifest:
    version: int
    partition_hash: str
    granularities: tuple[int, ...]
    counts: dict[str, Any] = field(default_factory=dict)
    watermark: Optional[str] = None  # RFC 3339 or null

    def as_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "partition_hash": self.partition_hash,
            "granularities": list(self.granularities),
            "counts": self.counts,
            "watermark": self.watermark,
        }


def _dump(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _check_consistency(store: BlockStore) -> None:
    fused = store.fused_total()
    for g in store.granularities:
        members = sum(b.size() for b in store.blocks(g))
        if members != fused:
            raise InconsistentStore(
                f"granularity {g}: {members} block members != {fused} fused observations"
            )


def snapshot(store: BlockStore, path: Union[str, Path]) -> StoreManifest:
    """Write the store under `path`; returns the manifest that was written."""
    _check_consistency(store)
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {root}: {exc}") from exc

    observations = store.observations()
    _atomic_write(
        root / OBSERVATIONS_FILE,
        "".join(_dump(observation_record(o)) + "\n" for o in observations),
    )

    block_counts: dict[str, int] = {}
    for g in store.granularities:
        blocks = store.blocks(g)
        block_counts[str(g)] = len(blocks)
        lines = []
        for b in blocks:
            lines.append(
                _dump(
                    {
                        "key": key_record(b.key),
                        "sensor_obs": sorted(b.sensor_obs),
                        "social_obs": sorted(b.social_obs),
                    }
                )
                + "\n"
            )
        _atomic_write(root / blocks_file(g), "".join(lines))

    _atomic_write(
        root / EVENTS_FILE,
        "".join(
            _dump(event_record(e)) + "\n"
            for e in sorted(store.events, key=lambda e: e.event_id)
        ),
    )
    late = sorted(store.late_observations(), key=lambda o: (o.ts, o.id))
    _atomic_write(
        root / LATE_FILE, "".join(_dump(observation_record(o)) + "\n" for o in late)
    )
    _atomic_write(root / PARTITION_FILE, _dump(partition_spec(store.partition)) + "\n")

    counts = store.counts()
    counts["blocks"] = block_counts
    watermark = store.watermark
    manifest = StoreManifest(
        version=STORE_VERSION,
        partition_hash=partition_hash(store.partition),
        granularities=store.granularities,
        counts=counts,
        watermark=None if watermark is None else format_rfc3339(watermark),
    )
    _atomic_write(root / MANIFEST_FILE, _dump(manifest.as_dict()) + "\n")
    return manifest


def _read_jsonl(path: Path) -> list[tuple[int, Any]]:
    if not path.is_file():
        raise CorruptRecord(f"missing snapshot file {path.name}", path=str(path))
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append((line_no, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise CorruptRecord(
                    f"{path.name}:{line_no}: {exc}", path=str(path), line_no=line_no
                ) from exc
    return records


def load(path: Union[str, Path]) -> BlockStore:
    """Reload a snapshot; the result deep-equals the snapshotted store."""
    root = Path(path)
    manifest_path = root / MANIFEST_FILE
    if not manifest_path.is_file():
        raise CorruptRecord(f"missing {MANIFEST_FILE}", path=str(manifest_path))
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"{MANIFEST_FILE}: {exc}", path=str(manifest_path)) from exc

    version = manifest.get("version")
    if version != STORE_VERSION:
        raise VersionMismatch(f"snapshot version {version}, reader expects {STORE_VERSION}")

    try:
        spec = json.loads((root / PARTITION_FILE).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorruptRecord(f"missing {PARTITION_FILE}", path=str(root)) from None
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"{PARTITION_FILE}: {exc}", path=str(root)) from exc
    partition = build_partition(spec)
    if partition_hash(partition) != manifest.get("partition_hash"):
        raise InconsistentStore("partition hash does not match manifest")

    granularities = [int(g) for g in manifest.get("granularities", [])]
    store = BlockStore(partition, granularities)

    def parse_obs(path: Path, line_no: int, raw: Any) -> Observation:
        try:
            return validate_observation(raw)
        except ValidationError as exc:
            raise CorruptRecord(
                f"{path.name}:{line_no}: {exc}", path=str(path), line_no=line_no
            ) from exc

    obs_path = root / OBSERVATIONS_FILE
    for line_no, raw in _read_jsonl(obs_path):
        store.fuse(parse_obs(obs_path, line_no, raw))

    # the block files are the persisted truth; recomputation must agree
    for g in granularities:
        path_g = root / blocks_file(g)
        recorded = {}
        for line_no, raw in _read_jsonl(path_g):
            key = raw.get("key", {})
            recorded[(key.get("zone_id"), key.get("bucket_index"))] = (
                sorted(raw.get("sensor_obs", [])),
                sorted(raw.get("social_obs", [])),
            )
        rebuilt = {
            (b.key.zone_id, b.key.bucket_index): (
                sorted(b.sensor_obs),
                sorted(b.social_obs),
            )
            for b in store.blocks(g)
        }
        if recorded != rebuilt:
            raise InconsistentStore(
                f"{blocks_file(g)} disagrees with fused observations"
            )

    late_path = root / LATE_FILE
    store.restore_late(
        parse_obs(late_path, line_no, raw) for line_no, raw in _read_jsonl(late_path)
    )
    store.set_events(
        event_from_record(raw) for _, raw in _read_jsonl(root / EVENTS_FILE)
    )

    watermark = manifest.get("watermark")
    if watermark is not None:
        store.restore_watermark(parse_rfc3339(watermark))

    counts = manifest.get("counts", {})
    actual = store.counts()
    for field_name in ("observations", "discarded", "late", "events"):
        if field_name in counts and counts[field_name] != actual[field_name]:
            raise InconsistentStore(
                f"manifest says {counts[field_name]} {field_name}, "
                f"snapshot holds {actual[field_name]}"
            )
    return store
