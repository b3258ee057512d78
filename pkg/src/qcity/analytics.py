"""Knowledge discovery over fused blocks.

Content side: lexicon sentiment, gazetteer entity extraction, TF-IDF
keywords, burst event detection, traffic status. Structure side: block
co-occurrence graphs and deterministic label-propagation communities.

All operations are pure functions over a store snapshot and can run
per zone in parallel.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import (
    CorruptRecord,
    EmptyCorpus,
    InsufficientHistory,
    SeriesTooShort,
    UnknownZone,
)
from .fusion import BlockStore
from .model import Event, SpatioTemporalKey

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on any non-alphanumeric run."""
    return _TOKEN_RE.findall(text.lower())


# --- sentiment ----------------------------------------------------------------


@dataclass(frozen=True)
class Lexicon:
    """token -> polarity (+1 or -1); tokens lowercase, unique."""

    polarity: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for token, pol in self.polarity.items():
            if not token or token != token.lower():
                raise ValueError(f"lexicon token {token!r} must be lowercase, non-empty")
            if pol not in (1, -1):
                raise ValueError(f"lexicon polarity for {token!r} must be +1 or -1")

    def __contains__(self, token: str) -> bool:
        return token in self.polarity

    def __len__(self) -> int:
        return len(self.polarity)


def load_lexicon(path: Union[str, Path]) -> Lexicon:
    """TSV `token<TAB>+1|-1`, UTF-8; lowercase enforced at load."""
    polarity: dict[str, int] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or parts[1] not in ("+1", "-1", "1"):
                raise CorruptRecord(
                    f"bad lexicon line {line_no}", path=str(path), line_no=line_no
                )
            token = parts[0].strip().lower()
            if not token or token in polarity:
                raise CorruptRecord(
                    f"empty or duplicate lexicon token at line {line_no}",
                    path=str(path),
                    line_no=line_no,
                )
            polarity[token] = 1 if parts[1] in ("+1", "1") else -1
    return Lexicon(polarity)


def sentiment_score(text: str, lex: Lexicon) -> float:
    """(pos - neg) / matched over lexicon hits; 0 when nothing matches."""
    matched = [lex.polarity[t] for t in tokenize(text) if t in lex.polarity]
    if not matched:
        return 0.0
    return sum(matched) / len(matched)


def mean_sentiment(texts: Sequence[str], lex: Lexicon) -> Optional[float]:
    if not texts:
        return None
    return sum(sentiment_score(t, lex) for t in texts) / len(texts)


# --- entities -------------------------------------------------------------------


class Gazetteer:
    """Surface form -> (entity_id, type); longest-surface-form-first matching."""

    def __init__(self, entries: Iterable[tuple[str, str, str]] = ()):
        self._table: dict[tuple[str, ...], tuple[str, str]] = {}
        for surface, entity_id, entity_type in entries:
            key = tuple(tokenize(surface))
            if not key:
                raise ValueError(f"gazetteer surface {surface!r} has no tokens")
            if key in self._table:
                raise ValueError(f"duplicate gazetteer surface {surface!r}")
            self._table[key] = (entity_id, entity_type)
        self.max_len = max((len(k) for k in self._table), default=0)

    def __len__(self) -> int:
        return len(self._table)

    def lookup(self, tokens: tuple[str, ...]) -> Optional[tuple[str, str]]:
        return self._table.get(tokens)


def load_gazetteer(path: Union[str, Path]) -> Gazetteer:
    """TSV `surface form<TAB>entity_id<TAB>type`, UTF-8, lowercase enforced."""
    entries: list[tuple[str, str, str]] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or not all(parts):
                raise CorruptRecord(
                    f"bad gazetteer line {line_no}", path=str(path), line_no=line_no
                )
            entries.append((parts[0].lower(), parts[1], parts[2]))
    return Gazetteer(entries)


def extract_entities(text: str, gaz: Gazetteer) -> list[tuple[str, str]]:
    """Left-to-right longest-match scan; matches never overlap, duplicates
    are preserved in order."""
    tokens = tokenize(text)
    found: list[tuple[str, str]] = []
    i = 0
    while i < len(tokens):
        hit = None
        for length in range(min(gaz.max_len, len(tokens) - i), 0, -1):
            hit = gaz.lookup(tuple(tokens[i : i + length]))
            if hit is not None:
                found.append(hit)
                i += length
                break
        if hit is None:
            i += 1
    return found


# --- keywords -----------------------------------------------------------------


def tfidf_terms(
    target_tokens: Sequence[str],
    corpus_token_sets: Sequence[set[str]],
    n: int,
) -> list[tuple[str, float]]:
    """score(term) = tf(term in target) * ln(|corpus| / df(term)).

    Ties break lexicographically. A term absent from every corpus block
    is scored with df=1 (can only happen when target is not part of the
    corpus).
    """
    if not corpus_token_sets:
        raise EmptyCorpus("corpus has no blocks")
    if n <= 0:
        return []
    tf = Counter(target_tokens)
    total = len(corpus_token_sets)
    scored = []
    for term, count in tf.items():
        df = sum(1 for block in corpus_token_sets if term in block)
        scored.append((term, count * math.log(total / max(df, 1))))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:n]


def block_social_texts(store: BlockStore, keys: Iterable[SpatioTemporalKey]) -> list[str]:
    """Social texts of the given blocks, in (ts, id) order."""
    texts: list[tuple] = []
    for key in keys:
        block = store.block(key)
        if block is None:
            continue
        for obs_id in block.social_obs:
            obs = store.observation(obs_id)
            if obs is not None:
                texts.append((obs.ts, obs.id, obs.payload.get("text", "")))
    return [t[2] for t in sorted(texts, key=lambda t: (t[0], t[1]))]


def top_terms(
    target_keys: Sequence[SpatioTemporalKey],
    corpus_keys: Sequence[SpatioTemporalKey],
    store: BlockStore,
    n: int,
) -> list[tuple[str, float]]:
    """TF-IDF keywords of the target blocks against a block corpus."""
    if not corpus_keys:
        raise EmptyCorpus("corpus has no blocks")
    target_tokens: list[str] = []
    for text in block_social_texts(store, target_keys):
        target_tokens.extend(tokenize(text))
    corpus_sets = [
        {tok for text in block_social_texts(store, [key]) for tok in tokenize(text)}
        for key in corpus_keys
    ]
    return tfidf_terms(target_tokens, corpus_sets, n)


# --- time series and events ------------------------------------------------------


@dataclass(frozen=True)
class BurstParams:
    """Burst rule configuration; all three knobs are deployment-tunable."""

    window: int = 12
    k: float = 3.0
    min_count: int = 5

    def __post_init__(self) -> None:
        if self.window < 2:
            raise ValueError("window must be >= 2 buckets")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


class EventSpan(NamedTuple):
    start: int  # series index, inclusive
    end: int  # series index, inclusive
    peak: int


def zone_count_series(
    zone_id: str,
    granularity_s: int,
    bucket_range: tuple[int, int],
    store: BlockStore,
) -> list[tuple[int, int]]:
    """(bucket, |sensor|+|social|) per bucket, zero-filled over the range."""
    if not store.partition.has_zone(zone_id):
        raise UnknownZone(zone_id)
    start, end = bucket_range
    if start < 0 or end < start:
        raise ValueError(f"bad bucket range [{start}, {end}]")
    return [
        (bucket, store.block_count(granularity_s, zone_id, bucket))
        for bucket in range(start, end + 1)
    ]


def _mean_std(window: Sequence[int]) -> tuple[float, float]:
    mu = sum(window) / len(window)
    var = sum((x - mu) ** 2 for x in window) / len(window)
    return mu, math.sqrt(var)


def _is_burst(count: int, window: Sequence[int], p: BurstParams) -> bool:
    if count < p.min_count:
        return False
    mu, sigma = _mean_std(window)
    if sigma == 0:
        return count >= mu + p.min_count
    return count > mu + p.k * sigma


def detect_events(series: Sequence[int], p: BurstParams) -> list[EventSpan]:
    """Maximal runs of bursting buckets.

    A bucket bursts when its count clears both the absolute floor and the
    mean + k*sigma of the trailing window of baseline counts. Buckets
    already flagged as bursting are excluded from the baseline, so a
    sustained event does not drown its own reference level.
    """
    if len(series) <= p.window:
        raise SeriesTooShort(
            f"series length {len(series)} must exceed window {p.window}"
        )
    baseline: list[int] = []
    flags: list[bool] = []
    for t, count in enumerate(series):
        if t >= p.window and _is_burst(count, baseline[-p.window :], p):
            flags.append(True)
        else:
            flags.append(False)
            baseline.append(count)

    spans: list[EventSpan] = []
    start: Optional[int] = None
    for i, burst in enumerate(flags):
        if burst and start is None:
            start = i
        elif not burst and start is not None:
            spans.append(EventSpan(start, i - 1, max(series[start:i])))
            start = None
    if start is not None:
        spans.append(EventSpan(start, len(series) - 1, max(series[start:])))
    return spans


def find_zone_events(
    store: BlockStore,
    zone_id: str,
    granularity_s: int,
    bucket_range: tuple[int, int],
    p: BurstParams,
) -> list[Event]:
    """Run burst detection over one zone's count series and assemble events."""
    series = zone_count_series(zone_id, granularity_s, bucket_range, store)
    counts = [c for _, c in series]
    start_bucket = bucket_range[0]
    events = []
    for span in detect_events(counts, p):
        b0 = start_bucket + span.start
        b1 = start_bucket + span.end
        keys = tuple(
            SpatioTemporalKey(zone_id, b, granularity_s)
            for b in range(b0, b1 + 1)
            if store.block_count(granularity_s, zone_id, b) > 0
        )
        events.append(
            Event(
                event_id=f"ev-{zone_id}-g{granularity_s}-{b0}-{b1}",
                zone_id=zone_id,
                start_bucket=b0,
                end_bucket=b1,
                granularity_s=granularity_s,
                peak_count=span.peak,
                block_keys=keys,
            )
        )
    return events


def label_event(event: Event, store: BlockStore, gaz: Gazetteer) -> Event:
    """Attach the most frequent entity mentioned in the event's social texts;
    ties break lexicographically, no mentions means no label."""
    mentions = Counter()
    for text in block_social_texts(store, event.block_keys):
        for entity_id, _ in extract_entities(text, gaz):
            mentions[entity_id] += 1
    if not mentions:
        return replace(event, label=None)
    best = max(mentions.values())
    label = min(eid for eid, n in mentions.items() if n == best)
    return replace(event, label=label)


# --- traffic ------------------------------------------------------------------

GREEN = "green"
YELLOW = "yellow"
RED = "red"

TRAFFIC_KIND = "traffic_count"


def _bucket_mean_value(
    store: BlockStore, zone_id: str, bucket: int, granularity_s: int, kind: str
) -> Optional[float]:
    block = store.block(SpatioTemporalKey(zone_id, bucket, granularity_s))
    if block is None:
        return None
    values = []
    for obs_id in block.sensor_obs:
        obs = store.observation(obs_id)
        if obs is not None and obs.kind == kind:
            values.append(float(obs.payload["value"]))
    if not values:
        return None
    return sum(values) / len(values)


def traffic_status(
    zone_id: str,
    bucket: int,
    granularity_s: int,
    store: BlockStore,
    p: BurstParams = BurstParams(),
    kind: str = TRAFFIC_KIND,
) -> str:
    """Green/yellow/red from the z-score of the current bucket's mean sensor
    value against the trailing window of per-bucket means."""
    if not store.partition.has_zone(zone_id):
        raise UnknownZone(zone_id)
    history = []
    for b in range(bucket - p.window, bucket):
        if b < 0:
            raise InsufficientHistory(f"bucket {bucket} has fewer than {p.window} predecessors")
        value = _bucket_mean_value(store, zone_id, b, granularity_s, kind)
        if value is None:
            raise InsufficientHistory(f"no {kind} readings in bucket {b}")
        history.append(value)
    current = _bucket_mean_value(store, zone_id, bucket, granularity_s, kind)
    if current is None:
        raise InsufficientHistory(f"no {kind} readings in bucket {bucket}")

    mu = sum(history) / len(history)
    sigma = math.sqrt(sum((x - mu) ** 2 for x in history) / len(history))
    if sigma == 0:
        if current <= mu:
            return GREEN
        if current >= mu + p.min_count:
            return RED
        return GREEN
    z = (current - mu) / sigma
    if z > 2:
        return RED
    if z > 1:
        return YELLOW
    return GREEN


# --- structure ------------------------------------------------------------------


@dataclass
class CooccurrenceGraph:
    """Undirected weighted graph; weight = number of blocks where both
    endpoints appear. No self-loops."""

    nodes: set[str] = field(default_factory=set)
    adj: dict[str, dict[str, int]] = field(default_factory=dict)

    def add_node(self, node: str) -> None:
        self.nodes.add(node)

    def increment_edge(self, u: str, v: str, weight: int = 1) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        self.nodes.update((u, v))
        self.adj.setdefault(u, {})[v] = self.adj.get(u, {}).get(v, 0) + weight
        self.adj.setdefault(v, {})[u] = self.adj.get(v, {}).get(u, 0) + weight

    def weight(self, u: str, v: str) -> int:
        return self.adj.get(u, {}).get(v, 0)

    def edges(self) -> list[tuple[str, str, int]]:
        return [
            (u, v, w)
            for u, neigh in sorted(self.adj.items())
            for v, w in sorted(neigh.items())
            if u < v
        ]


def build_cooccurrence(
    keys: Iterable[SpatioTemporalKey],
    store: BlockStore,
    gaz: Gazetteer,
    terms: Iterable[str] = (),
) -> CooccurrenceGraph:
    """Entity/term co-occurrence across blocks' social texts."""
    term_set = {t.lower() for t in terms}
    graph = CooccurrenceGraph()
    for key in keys:
        texts = block_social_texts(store, [key])
        if not texts:
            continue
        tokens = {tok for text in texts for tok in tokenize(text)}
        present: set[str] = set()
        for text in texts:
            present.update(eid for eid, _ in extract_entities(text, gaz))
        present.update(t for t in term_set if t in tokens)
        for node in present:
            graph.add_node(node)
        members = sorted(present)
        for i, u in enumerate(members):
            for v in members[i + 1 :]:
                graph.increment_edge(u, v)
    return graph


def detect_communities(graph: CooccurrenceGraph) -> list[list[str]]:
    """Deterministic label propagation.

    Every node starts with its own id as label; nodes are visited in
    ascending id order and adopt the weighted-majority label among their
    neighbors (ties go to the smallest label), until a fixpoint or 100
    iterations. Returns the label classes, each sorted, ordered by their
    smallest member.
    """
    labels = {node: node for node in graph.nodes}
    order = sorted(graph.nodes)
    for _ in range(100):
        changed = False
        for node in order:
            neighbors = graph.adj.get(node)
            if not neighbors:
                continue
            weight_by_label: dict[str, int] = {}
            for other, w in neighbors.items():
                label = labels[other]
                weight_by_label[label] = weight_by_label.get(label, 0) + w
            best = max(weight_by_label.values())
            winner = min(l for l, w in weight_by_label.items() if w == best)
            if labels[node] != winner:
                labels[node] = winner
                changed = True
        if not changed:
            break
    classes: dict[str, list[str]] = {}
    for node in order:
        classes.setdefault(labels[node], []).append(node)
    return sorted(classes.values(), key=lambda members: members[0])
