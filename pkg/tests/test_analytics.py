"""Content and structure analytics: hand cases, oracles, and properties."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from qcity.analytics import (
    BurstParams,
    CooccurrenceGraph,
    EventSpan,
    Gazetteer,
    Lexicon,
    build_cooccurrence,
    detect_communities,
    detect_events,
    extract_entities,
    find_zone_events,
    label_event,
    sentiment_score,
    tfidf_terms,
    tokenize,
    top_terms,
    traffic_status,
    zone_count_series,
)
from qcity.errors import (
    EmptyCorpus,
    InsufficientHistory,
    SeriesTooShort,
    UnknownZone,
)
from qcity.fusion import BlockStore
from qcity.model import SpatioTemporalKey
from qcity.spatial import GridSpec, build_partition

from conftest import make_obs
from oracles import burst_events


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tokenize("Good GAME!!") == ["good", "game"]

    def test_empty(self):
        assert tokenize("") == []

    def test_underscore_and_dash_split(self):
        assert tokenize("a-b_c3") == ["a", "b", "c3"]


class TestSentiment:
    def test_no_match_is_zero(self):
        assert sentiment_score("", Lexicon({"good": 1})) == 0.0
        assert sentiment_score("nothing here", Lexicon({"good": 1})) == 0.0

    def test_hand_arithmetic(self):
        lex = Lexicon({"good": 1, "bad": -1})
        assert sentiment_score("good good bad", lex) == pytest.approx(1 / 3)

    def test_all_negative(self):
        lex = Lexicon({"terrible": -1})
        assert sentiment_score("terrible traffic", lex) == -1.0

    @given(st.text(max_size=200))
    def test_bounded(self, text):
        lex = Lexicon({"good": 1, "great": 1, "bad": -1, "awful": -1})
        assert -1.0 <= sentiment_score(text, lex) <= 1.0

    @given(st.text(max_size=100))
    def test_appending_positive_token_never_decreases(self, text):
        lex = Lexicon({"good": 1, "great": 1, "bad": -1, "awful": -1})
        base = sentiment_score(text, lex)
        assert sentiment_score(text + " good", lex) >= base

    def test_lexicon_validation(self):
        with pytest.raises(ValueError):
            Lexicon({"Upper": 1})
        with pytest.raises(ValueError):
            Lexicon({"ok": 2})


class TestEntities:
    GAZ = Gazetteer(
        [
            ("riverside stadium", "E1", "venue"),
            ("riverside", "E2", "place"),
        ]
    )

    def test_longest_match_wins(self):
        assert extract_entities("at riverside stadium now", self.GAZ) == [("E1", "venue")]

    def test_no_match(self):
        assert extract_entities("nothing to see", self.GAZ) == []

    def test_duplicates_preserved_in_order(self):
        assert extract_entities("riverside then riverside", self.GAZ) == [
            ("E2", "place"),
            ("E2", "place"),
        ]

    def test_no_overlapping_spans(self):
        gaz = Gazetteer([("a b", "X", "t"), ("b c", "Y", "t")])
        assert extract_entities("a b c", gaz) == [("X", "t")]


class TestTfidf:
    def test_term_in_every_block_scores_zero(self):
        corpus = [{"common", "x"}, {"common"}, {"common", "y"}]
        scored = dict(tfidf_terms(["common"], corpus, 5))
        assert scored["common"] == 0.0

    def test_hand_arithmetic(self):
        corpus = [{"zebra"}, {"x"}, {"y"}]
        scored = dict(tfidf_terms(["zebra", "zebra"], corpus, 5))
        assert scored["zebra"] == pytest.approx(2 * math.log(3))

    def test_n_zero(self):
        assert tfidf_terms(["a"], [{"a"}], 0) == []

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            tfidf_terms(["a"], [], 3)

    def test_ranking_invariant_under_corpus_reordering(self):
        corpus = [{"a", "b"}, {"b"}, {"c", "a"}, {"d"}]
        target = ["a", "b", "b", "c", "d"]
        base = tfidf_terms(target, corpus, 10)
        rng = random.Random(3)
        for _ in range(5):
            shuffled = corpus[:]
            rng.shuffle(shuffled)
            assert tfidf_terms(target, shuffled, 10) == base


@pytest.fixture
def small_store():
    part = build_partition(GridSpec(0.0, 0.0, 1.0, 1.0, 0.5))
    return BlockStore(part, (20, 300))


class TestZoneCountSeries:
    def test_empty_store_zero_filled(self, small_store):
        series = zone_count_series("g_0_0", 20, (0, 9), small_store)
        assert series == [(b, 0) for b in range(10)]

    def test_single_block(self, small_store):
        for i in range(3):
            small_store.fuse(make_obs(f"o{i}", at=45.0 + i))
        series = zone_count_series("g_0_0", 20, (0, 4), small_store)
        assert series == [(0, 0), (1, 0), (2, 3), (3, 0), (4, 0)]

    def test_unknown_zone(self, small_store):
        with pytest.raises(UnknownZone):
            zone_count_series("nope", 20, (0, 5), small_store)

    def test_conservation_over_all_zones(self, small_store):
        rng = random.Random(11)
        for i in range(80):
            small_store.fuse(
                make_obs(
                    f"o{i}",
                    at=rng.uniform(0, 400),
                    lat=rng.uniform(0, 1),
                    lon=rng.uniform(0, 1),
                )
            )
        total = 0
        for zone_id in small_store.partition.zone_ids:
            series = zone_count_series("%s" % zone_id, 20, (0, 20), small_store)
            total += sum(c for _, c in series)
        assert total == small_store.fused_total()


class TestDetectEvents:
    P = BurstParams(window=4, k=3.0, min_count=5)

    def test_constant_series_no_events(self):
        assert detect_events([5] * 20, self.P) == []

    def test_single_spike_sigma_zero_rule(self):
        # window [2,2,2,2] has sigma 0, so the spike needs mu + min_count
        assert detect_events([2, 2, 2, 2, 50], self.P) == [EventSpan(4, 4, 50)]

    def test_merged_run(self):
        # index 5 stays a burst because flagged buckets are excluded from
        # the baseline; index 6 falls back below the floor
        assert detect_events([2, 2, 2, 2, 50, 60, 2], self.P) == [EventSpan(4, 5, 60)]

    def test_series_too_short(self):
        with pytest.raises(SeriesTooShort):
            detect_events([1, 2, 3, 4], self.P)

    def test_matches_oracle_on_seeded_series(self):
        rng = random.Random(2026)
        for _ in range(200):
            n = rng.randint(6, 60)
            series = [rng.randint(0, 100) for _ in range(n)]
            p = BurstParams(window=rng.randint(2, 5), k=rng.choice([1.0, 2.0, 3.0]),
                            min_count=rng.randint(1, 10))
            if n <= p.window:
                continue
            expected = [
                EventSpan(s, e, peak)
                for s, e, peak in burst_events(series, p.window, p.k, p.min_count)
            ]
            assert detect_events(series, p) == expected, (series, p)

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=100), min_size=3, max_size=200),
        st.integers(min_value=2, max_value=12),
        st.sampled_from([0.5, 1.0, 2.0, 3.0]),
        st.integers(min_value=1, max_value=8),
    )
    def test_matches_oracle_property(self, series, window, k, min_count):
        if len(series) <= window:
            return
        p = BurstParams(window=window, k=k, min_count=min_count)
        expected = [
            EventSpan(s, e, peak)
            for s, e, peak in burst_events(series, window, k, min_count)
        ]
        assert detect_events(series, p) == expected


def _plant_burst(store, zone="g_0_0", lat=0.25, lon=0.25, day_offset=0.0,
                 texts=("busy",), prefix="b"):
    """Background of 2 obs per 20s bucket for buckets 0..19, burst at 12..13."""
    base = day_offset
    n = 0
    for bucket in range(20):
        for j in range(2):
            store.fuse(
                make_obs(f"{prefix}{n}", at=base + bucket * 20 + 3 + j, lat=lat, lon=lon)
            )
            n += 1
    for i, extra in enumerate((12, 40)):
        for j in range(extra):
            text = texts[j % len(texts)]
            store.fuse(
                make_obs(
                    f"{prefix}x{i}_{j}",
                    source="social",
                    at=base + (12 + i) * 20 + (j % 18),
                    lat=lat,
                    lon=lon,
                    text=text,
                )
            )
    return n


class TestFindAndLabelEvents:
    def test_find_zone_events_and_label(self, small_store):
        _plant_burst(
            small_store,
            texts=("heading to the open cup", "open cup now", "just walking"),
        )
        p = BurstParams(window=4, k=3.0, min_count=5)
        events = find_zone_events(small_store, "g_0_0", 20, (0, 19), p)
        assert len(events) == 1
        event = events[0]
        assert (event.start_bucket, event.end_bucket) == (12, 13)
        assert event.peak_count == 42
        gaz = Gazetteer(
            [("open cup", "E_open", "tournament"), ("total cup", "E_total", "t")]
        )
        labeled = label_event(event, small_store, gaz)
        assert labeled.label == "E_open"

    def test_label_absent_without_mentions(self, small_store):
        _plant_burst(small_store, texts=("nothing notable",))
        p = BurstParams(window=4, k=3.0, min_count=5)
        event = find_zone_events(small_store, "g_0_0", 20, (0, 19), p)[0]
        gaz = Gazetteer([("open cup", "E_open", "t")])
        assert label_event(event, small_store, gaz).label is None

    def test_tie_break_lexicographic(self, small_store):
        _plant_burst(small_store, texts=("alpha cup and beta cup",))
        p = BurstParams(window=4, k=3.0, min_count=5)
        event = find_zone_events(small_store, "g_0_0", 20, (0, 19), p)[0]
        gaz = Gazetteer([("alpha cup", "E_b", "t"), ("beta cup", "E_a", "t")])
        # equal mention counts resolve to the smallest entity id
        assert label_event(event, small_store, gaz).label == "E_a"

    def test_same_venue_different_weeks_distinct_labels(self, small_store):
        _plant_burst(small_store, texts=("go ace invitational",), prefix="w1_")
        _plant_burst(
            small_store, day_offset=86400.0, texts=("go baseline cup",), prefix="w2_"
        )
        p = BurstParams(window=4, k=3.0, min_count=5)
        day2_first = 86400 // 20
        events = find_zone_events(small_store, "g_0_0", 20, (0, 19), p)
        events += find_zone_events(
            small_store, "g_0_0", 20, (day2_first, day2_first + 19), p
        )
        assert len(events) == 2
        gaz = Gazetteer(
            [
                ("ace invitational", "ent_ace", "t"),
                ("baseline cup", "ent_base", "t"),
            ]
        )
        labels = [label_event(e, small_store, gaz).label for e in events]
        assert labels == ["ent_ace", "ent_base"]


class TestTopTermsOverStore:
    def test_target_terms_rank_first(self, small_store):
        texts = {
            0: ["morning walk", "morning coffee"],
            1: ["zebra parade downtown", "zebra zebra everywhere"],
            2: ["morning training", "quiet streets"],
        }
        n = 0
        for bucket, lines in texts.items():
            for line in lines:
                small_store.fuse(
                    make_obs(
                        f"t{n}", source="social", at=bucket * 20.0 + n % 10, text=line
                    )
                )
                n += 1
        keys = [SpatioTemporalKey("g_0_0", b, 20) for b in range(3)]
        ranked = top_terms([keys[1]], keys, small_store, 3)
        assert ranked[0][0] == "zebra"
        assert ranked[0][1] == pytest.approx(3 * math.log(3))


class TestTrafficStatus:
    def _store_with_history(self, values, current):
        part = build_partition(GridSpec(0.0, 0.0, 1.0, 1.0, 0.5))
        store = BlockStore(part, (20,))
        n = 0
        for bucket, value in enumerate(values + [current]):
            store.fuse(
                make_obs(f"s{n}", at=bucket * 20.0 + 5, value=float(value))
            )
            n += 1
        return store, len(values)

    P = BurstParams(window=4, k=3.0, min_count=5)

    def test_flat_history_green(self):
        store, bucket = self._store_with_history([10, 10, 10, 10], 10)
        assert traffic_status("g_0_0", bucket, 20, store, self.P) == "green"

    def test_z_two_point_five_red(self):
        # history [10,10,14,14]: mu 12, sigma 2; current 17 gives z = 2.5
        store, bucket = self._store_with_history([10, 10, 14, 14], 17)
        assert traffic_status("g_0_0", bucket, 20, store, self.P) == "red"

    def test_z_one_point_five_yellow(self):
        store, bucket = self._store_with_history([10, 10, 14, 14], 15)
        assert traffic_status("g_0_0", bucket, 20, store, self.P) == "yellow"

    def test_sigma_zero_spike_red(self):
        store, bucket = self._store_with_history([10, 10, 10, 10], 15)
        assert traffic_status("g_0_0", bucket, 20, store, self.P) == "red"

    def test_sigma_zero_small_rise_green(self):
        store, bucket = self._store_with_history([10, 10, 10, 10], 12)
        assert traffic_status("g_0_0", bucket, 20, store, self.P) == "green"

    def test_insufficient_history(self):
        store, _ = self._store_with_history([10, 10], 10)
        with pytest.raises(InsufficientHistory):
            traffic_status("g_0_0", 2, 20, store, self.P)

    def test_non_traffic_sensors_ignored(self):
        part = build_partition(GridSpec(0.0, 0.0, 1.0, 1.0, 0.5))
        store = BlockStore(part, (20,))
        for bucket in range(5):
            store.fuse(make_obs(f"aq{bucket}", kind="air_quality",
                                at=bucket * 20.0, value=999.0))
        with pytest.raises(InsufficientHistory):
            traffic_status("g_0_0", 4, 20, store, self.P)


class TestCooccurrence:
    GAZ = Gazetteer([("open cup", "E_open", "t"), ("city park", "E_park", "p")])

    def test_single_block_edge(self, small_store):
        small_store.fuse(
            make_obs("p1", source="social", at=1.0, text="open cup at city park")
        )
        graph = build_cooccurrence(
            [SpatioTemporalKey("g_0_0", 0, 20)], small_store, self.GAZ
        )
        assert graph.weight("E_open", "E_park") == 1
        assert graph.weight("E_park", "E_open") == 1

    def test_disjoint_blocks_disjoint_components(self, small_store):
        small_store.fuse(
            make_obs("p1", source="social", at=1.0, text="open cup at city park")
        )
        small_store.fuse(
            make_obs("p2", source="social", at=100.0, text="crowds and parade",)
        )
        graph = build_cooccurrence(
            [SpatioTemporalKey("g_0_0", 0, 20), SpatioTemporalKey("g_0_0", 5, 20)],
            small_store,
            self.GAZ,
            terms=["crowds", "parade"],
        )
        communities = detect_communities(graph)
        assert len(communities) == 2

    def test_term_nodes_from_term_set_only(self, small_store):
        small_store.fuse(
            make_obs("p1", source="social", at=1.0, text="loud parade tonight")
        )
        graph = build_cooccurrence(
            [SpatioTemporalKey("g_0_0", 0, 20)], small_store, self.GAZ,
            terms=["parade"],
        )
        assert graph.nodes == {"parade"}
        assert graph.edges() == []


class TestCommunities:
    def _triangle(self, graph, a, b, c):
        graph.increment_edge(a, b)
        graph.increment_edge(b, c)
        graph.increment_edge(a, c)

    def test_two_disjoint_triangles(self):
        graph = CooccurrenceGraph()
        self._triangle(graph, "a", "b", "c")
        self._triangle(graph, "x", "y", "z")
        assert detect_communities(graph) == [["a", "b", "c"], ["x", "y", "z"]]

    def test_empty_graph(self):
        assert detect_communities(CooccurrenceGraph()) == []

    def test_k3_single_community(self):
        graph = CooccurrenceGraph()
        self._triangle(graph, "a", "b", "c")
        assert detect_communities(graph) == [["a", "b", "c"]]

    def test_partition_and_determinism(self):
        rng = random.Random(7)
        graph = CooccurrenceGraph()
        names = [f"n{i:02d}" for i in range(20)]
        for _ in range(40):
            u, v = rng.sample(names, 2)
            graph.increment_edge(u, v)
        first = detect_communities(graph)
        second = detect_communities(graph)
        assert first == second
        flattened = [n for community in first for n in community]
        assert sorted(flattened) == sorted(graph.nodes)
        assert len(flattened) == len(set(flattened))

    def test_isolated_node_is_own_community(self):
        graph = CooccurrenceGraph()
        graph.add_node("lonely")
        graph.increment_edge("a", "b")
        assert ["lonely"] in detect_communities(graph)
