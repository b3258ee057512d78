"""Stream acquisition: JSON Lines sources, batch ingest, and paced replay.

Each source gets its own reader; the block store's fuse() absorbs
concurrent delivery. Replay releases observations when their scaled
event time is reached (speed 0 degenerates to releasing in global
event-time order, as fast as possible).
"""

from __future__ import annotations

import heapq
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

from .errors import FileNotFound, QcityError, UnreadableLine, ValidationError
from .fusion import LATE, BlockStore
from .model import Observation, epoch_microseconds, validate_observation


@dataclass(frozen=True)
class SourceSpec:
    """One replayable observation feed (a JSON Lines file)."""

    source_id: str
    path: Union[str, Path]
    modality_hint: Optional[str] = None  # fills a missing "source" field
    replay_speed: float = 0.0  # wall-clock compression; 0 = as fast as possible

    def __post_init__(self) -> None:
        if self.replay_speed < 0:
            raise ValueError("replay_speed must be >= 0")


@dataclass
class IngestReport:
    """Per-run bookkeeping. `late` records are also counted in `accepted`
    (they were valid), so accepted + rejected + duplicate = lines read."""

    accepted: int = 0
    rejected: dict[str, int] = field(default_factory=dict)
    late: int = 0
    duplicate: int = 0
    lines: int = 0
    source_errors: dict[str, str] = field(default_factory=dict)

    def reject(self, error_class: str) -> None:
        self.rejected[error_class] = self.rejected.get(error_class, 0) + 1

    def merge(self, other: "IngestReport") -> None:
        self.accepted += other.accepted
        self.late += other.late
        self.duplicate += other.duplicate
        self.lines += other.lines
        for cls, n in other.rejected.items():
            self.rejected[cls] = self.rejected.get(cls, 0) + n
        self.source_errors.update(other.source_errors)

    @property
    def rejected_total(self) -> int:
        return sum(self.rejected.values())

    def as_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": dict(sorted(self.rejected.items())),
            "late": self.late,
            "duplicate": self.duplicate,
            "lines": self.lines,
            "source_errors": dict(sorted(self.source_errors.items())),
        }


def _iter_records(spec: SourceSpec, report: IngestReport) -> Iterator[Observation]:
    """Validated observations in file order; everything else is counted.

    The existence check happens eagerly so a dead source fails at
    registration, not on first read.
    """
    path = Path(spec.path)
    if not path.is_file():
        raise FileNotFound(str(path))
    return _read_records(path, spec, report)


def _read_records(
    path: Path, spec: SourceSpec, report: IngestReport
) -> Iterator[Observation]:
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            report.lines += 1
            try:
                raw = json.loads(line)
            except json.JSONDecodeError:
                report.reject(UnreadableLine.__name__)
                continue
            if not isinstance(raw, dict):
                report.reject(UnreadableLine.__name__)
                continue
            if spec.modality_hint and "source" not in raw:
                raw["source"] = spec.modality_hint
            try:
                yield validate_observation(raw)
            except ValidationError as exc:
                report.reject(type(exc).__name__)


def _deliver(obs: Observation, store: BlockStore, report: IngestReport) -> None:
    try:
        status = store.fuse(obs)
    except ValidationError as exc:  # ConflictingDuplicate, PreEpochTimestamp
        report.reject(type(exc).__name__)
        return
    if status == "duplicate":
        report.duplicate += 1
        return
    report.accepted += 1
    if status == LATE:
        report.late += 1


def ingest_file(spec: SourceSpec, store: BlockStore) -> IngestReport:
    """Batch-ingest one source; delivery preserves the file's order."""
    report = IngestReport()
    for obs in _iter_records(spec, report):
        _deliver(obs, store, report)
    return report


class ReplayClock:
    """Scaled wall clock shared by all sources of one replay.

    Anchored at the earliest event time across sources, so sources that
    start later in event time also start later on the wall.
    """

    def __init__(self, speed: float, sleep=time.sleep, now=time.monotonic):
        if speed < 0:
            raise ValueError("speed must be >= 0")
        self.speed = speed
        self._sleep = sleep
        self._now = now
        self._t0_event_us: Optional[int] = None
        self._t0_wall: Optional[float] = None
        self._start_lock = threading.Lock()

    def start(self, first_event_us: int) -> None:
        with self._start_lock:
            if self._t0_event_us is None:
                self._t0_event_us = first_event_us
                self._t0_wall = self._now()

    def wait_until(self, event_us: int) -> None:
        if self.speed == 0:
            return
        self.start(event_us)
        assert self._t0_event_us is not None and self._t0_wall is not None
        target = self._t0_wall + (event_us - self._t0_event_us) / 1e6 / self.speed
        delay = target - self._now()
        if delay > 0:
            self._sleep(delay)


def _first_event_us(specs: list[SourceSpec]) -> Optional[int]:
    earliest: Optional[int] = None
    for spec in specs:
        probe = IngestReport()
        try:
            for obs in _iter_records(spec, probe):
                us = epoch_microseconds(obs.ts)
                if earliest is None or us < earliest:
                    earliest = us
                break
        except QcityError:
            continue
    return earliest


def replay(
    specs: list[SourceSpec],
    clock: ReplayClock,
    store: BlockStore,
) -> IngestReport:
    """Replay sources against the store, pacing by scaled event time.

    speed > 0: one reader thread per source, each sleeping until its next
    record's scaled timestamp; the cross-source watermark lateness rule is
    active. speed 0: records are released in global event-time order (a
    k-way merge), which makes the result identical to batch-ingesting a
    single time-sorted merged file.
    """
    total = IngestReport()
    if not specs:
        return total

    store.lateness_enabled = clock.speed > 0
    store.live = True
    try:
        if clock.speed == 0:
            reports = [IngestReport() for _ in specs]
            streams = []
            for idx, (spec, rep) in enumerate(zip(specs, reports)):
                try:
                    records = _iter_records(spec, rep)
                except QcityError as exc:
                    rep.source_errors[spec.source_id] = str(exc)
                    continue
                streams.append(
                    (epoch_microseconds(o.ts), idx, n, o)
                    for n, o in enumerate(records)
                )
            merged_report = IngestReport()
            try:
                for _, idx, _, obs in heapq.merge(*streams):
                    _deliver(obs, store, merged_report)
            except QcityError as exc:
                merged_report.source_errors["merge"] = str(exc)
            for rep in reports:
                total.merge(rep)
            total.merge(merged_report)
            return total

        anchor = _first_event_us(specs)
        if anchor is not None:
            clock.start(anchor)

        reports = [IngestReport() for _ in specs]

        def run_source(spec: SourceSpec, report: IngestReport) -> None:
            try:
                for obs in _iter_records(spec, report):
                    clock.wait_until(epoch_microseconds(obs.ts))
                    _deliver(obs, store, report)
            except QcityError as exc:
                report.source_errors[spec.source_id] = str(exc)

        threads = [
            threading.Thread(target=run_source, args=(spec, rep), daemon=True)
            for spec, rep in zip(specs, reports)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for rep in reports:
            total.merge(rep)
        return total
    finally:
        store.live = False
        store.lateness_enabled = False
