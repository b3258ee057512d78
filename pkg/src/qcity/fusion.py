"""Cross-modal fusion: group observations into blocks by spatio-temporal key.

Two observations are related iff they share a blocking key (same zone,
same time bucket, same granularity). The store keeps each observation
once and maintains one block map per configured granularity, so blocks
at a coarse granularity are exact unions of their finer constituents.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from typing import Iterable, Optional, Union

from .errors import ConflictingDuplicate, PreEpochTimestamp
from .model import Block, Event, Observation, SpatioTemporalKey, epoch_microseconds
from .spatial import DEFAULT_GRANULARITIES, Granularity, ZonePartition, st_key

FUSED = "fused"
DUPLICATE = "duplicate"
DISCARDED = "discarded"
LATE = "late"

#: how many finest-granularity buckets behind the watermark stay mutable
LATE_ALLOWANCE_BUCKETS = 2


def _granularity_seconds(gs: Iterable[Union[Granularity, int]]) -> tuple[int, ...]:
    seconds = sorted({g.seconds if isinstance(g, Granularity) else int(g) for g in gs})
    if not seconds or seconds[0] <= 0:
        raise ValueError("granularities must be positive integers")
    return tuple(seconds)


class BlockStore:
    """The centralized store: observations plus their per-granularity blocks.

    fuse() is safe under concurrent calls from multiple ingestion sources;
    reads take the same lock and therefore always observe whole blocks.
    """

    def __init__(
        self,
        partition: ZonePartition,
        granularities: Iterable[Union[Granularity, int]] = DEFAULT_GRANULARITIES,
    ):
        self.partition = partition
        self.granularities = _granularity_seconds(granularities)
        self._blocks: dict[int, dict[tuple[str, int], tuple[set[str], set[str]]]] = {
            g: {} for g in self.granularities
        }
        self._obs: dict[str, Observation] = {}
        self._discarded: set[str] = set()
        self._late: list[Observation] = []
        self._watermark_us: Optional[int] = None
        self.events: list[Event] = []
        # paced replay enables the lateness rule; batch ingest keeps it off so
        # the final store is independent of arrival order across sources
        self.lateness_enabled = False
        # set while a replay is feeding the store; the API caps reads below
        # the watermark bucket only in this state
        self.live = False
        self._lock = threading.RLock()

    # --- writes -------------------------------------------------------------

    def fuse(self, obs: Observation) -> str:
        """Insert one observation into exactly one block per granularity.

        Returns one of "fused", "duplicate", "discarded", "late".
        Raises ConflictingDuplicate when the id was seen with different
        content (identical content is an idempotent no-op).
        """
        us = epoch_microseconds(obs.ts)
        if us < 0:
            raise PreEpochTimestamp(f"timestamp {obs.ts.isoformat()} precedes the epoch")
        finest = self.granularities[0]
        with self._lock:
            existing = self._obs.get(obs.id)
            if existing is not None:
                if existing == obs:
                    return DUPLICATE
                raise ConflictingDuplicate(f"id {obs.id!r} re-seen with different content")

            # locate and bucket before mutating any state
            zone_id = self.partition.locate(obs.lat, obs.lon)
            buckets = {g: us // (g * 1_000_000) for g in self.granularities}

            if self._watermark_us is None or us > self._watermark_us:
                self._watermark_us = us

            if self.lateness_enabled:
                wm_bucket = self._watermark_us // (finest * 1_000_000)
                if buckets[finest] < wm_bucket - LATE_ALLOWANCE_BUCKETS:
                    self._late.append(obs)
                    return LATE

            self._obs[obs.id] = obs
            if zone_id is None:
                self._discarded.add(obs.id)
                return DISCARDED

            for g, bucket in buckets.items():
                sensor, social = self._blocks[g].setdefault(
                    (zone_id, bucket), (set(), set())
                )
                (sensor if obs.source == "sensor" else social).add(obs.id)
            return FUSED

    def set_events(self, events: Iterable[Event]) -> None:
        with self._lock:
            self.events = sorted(events, key=lambda e: e.event_id)

    def restore_late(self, late: Iterable[Observation]) -> None:
        with self._lock:
            self._late = list(late)

    def restore_watermark(self, watermark: Optional[datetime]) -> None:
        with self._lock:
            self._watermark_us = (
                None if watermark is None else epoch_microseconds(watermark)
            )

    # --- reads --------------------------------------------------------------

    def observation(self, obs_id: str) -> Optional[Observation]:
        with self._lock:
            return self._obs.get(obs_id)

    def observations(self) -> list[Observation]:
        with self._lock:
            return sorted(self._obs.values(), key=lambda o: (o.ts, o.id))

    def late_observations(self) -> list[Observation]:
        with self._lock:
            return list(self._late)

    def block(self, key: SpatioTemporalKey) -> Optional[Block]:
        with self._lock:
            per_g = self._blocks.get(key.granularity_s)
            if per_g is None:
                return None
            entry = per_g.get((key.zone_id, key.bucket_index))
            if entry is None:
                return None
            return Block(
                key=key, sensor_obs=frozenset(entry[0]), social_obs=frozenset(entry[1])
            )

    def blocks(self, granularity_s: int) -> list[Block]:
        """All blocks at one granularity, sorted by (zone_id, bucket)."""
        with self._lock:
            per_g = self._blocks.get(granularity_s, {})
            return [
                Block(
                    key=SpatioTemporalKey(zone, bucket, granularity_s),
                    sensor_obs=frozenset(sensor),
                    social_obs=frozenset(social),
                )
                for (zone, bucket), (sensor, social) in sorted(per_g.items())
            ]

    def block_count(self, granularity_s: int, zone_id: str, bucket: int) -> int:
        with self._lock:
            entry = self._blocks.get(granularity_s, {}).get((zone_id, bucket))
            if entry is None:
                return 0
            return len(entry[0]) + len(entry[1])

    @property
    def watermark(self) -> Optional[datetime]:
        with self._lock:
            if self._watermark_us is None:
                return None
            return datetime.fromtimestamp(
                self._watermark_us / 1_000_000, tz=timezone.utc
            )

    def watermark_bucket(self, granularity_s: int) -> Optional[int]:
        with self._lock:
            if self._watermark_us is None:
                return None
            return self._watermark_us // (granularity_s * 1_000_000)

    def counts(self) -> dict[str, int]:
        with self._lock:
            return {
                "observations": len(self._obs),
                "discarded": len(self._discarded),
                "late": len(self._late),
                "events": len(self.events),
            }

    def fused_total(self) -> int:
        """Number of in-coverage observations (accepted minus discarded)."""
        with self._lock:
            return len(self._obs) - len(self._discarded)


def assign(
    obs: Observation, part: ZonePartition, g: Union[Granularity, int]
) -> Optional[SpatioTemporalKey]:
    """The blocking entry point; alias of the spatio-temporal key function."""
    return st_key(obs, part, g)


def related(
    a: Observation, b: Observation, part: ZonePartition, g: Union[Granularity, int]
) -> bool:
    """True iff both observations fall in the same zone and time bucket."""
    ka = assign(a, part, g)
    return ka is not None and ka == assign(b, part, g)


def cross_modal_view(
    key: SpatioTemporalKey, store: BlockStore
) -> dict[str, list[Observation]]:
    """Full sensor and social contents of one block, sorted by (ts, id)."""
    block = store.block(key)
    if block is None:
        return {"sensor": [], "social": []}

    def resolve(ids: frozenset[str]) -> list[Observation]:
        found = [store.observation(i) for i in ids]
        return sorted((o for o in found if o is not None), key=lambda o: (o.ts, o.id))

    return {"sensor": resolve(block.sensor_obs), "social": resolve(block.social_obs)}
