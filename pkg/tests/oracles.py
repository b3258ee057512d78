"""Independent brute-force oracles for the test suite.

These reimplement the checked rules with different algorithms (even-odd
ray casting instead of winding numbers; per-index window replay instead
of a streaming baseline) so that agreement is meaningful.
"""

import statistics
from fractions import Fraction


def ray_cast_contains(lat, lon, ring):
    """Even-odd ray casting in exact rational arithmetic; points on the
    boundary count as contained."""
    lat, lon = Fraction(lat), Fraction(lon)
    exact_ring = [(Fraction(a), Fraction(b)) for a, b in ring]
    n = len(exact_ring)
    inside = False
    for i in range(n):
        a_lat, a_lon = exact_ring[i]
        b_lat, b_lon = exact_ring[(i + 1) % n]
        collinear = (b_lon - a_lon) * (lat - a_lat) == (lon - a_lon) * (b_lat - a_lat)
        if (
            collinear
            and min(a_lat, b_lat) <= lat <= max(a_lat, b_lat)
            and min(a_lon, b_lon) <= lon <= max(a_lon, b_lon)
        ):
            return True
        if (a_lat > lat) != (b_lat > lat):
            crossing_lon = a_lon + (lat - a_lat) * (b_lon - a_lon) / (b_lat - a_lat)
            if lon < crossing_lon:
                inside = not inside
    return inside


def locate_by_ray_casting(lat, lon, zones):
    """Scan every zone (no prefilter); smallest zone_id wins boundary ties."""
    hits = [z.zone_id for z in zones if ray_cast_contains(lat, lon, z.ring)]
    return min(hits) if hits else None


def burst_flags(series, window, k, min_count):
    """Per-index burst decisions; the baseline window is rebuilt from
    scratch each step out of the not-yet-flagged counts."""
    flags = [False] * len(series)
    for t in range(window, len(series)):
        baseline = [series[i] for i in range(t) if not flags[i]][-window:]
        mu = statistics.fmean(baseline)
        sigma = statistics.pstdev(baseline)
        count = series[t]
        if count < min_count:
            continue
        if sigma == 0:
            flags[t] = count >= mu + min_count
        else:
            flags[t] = count > mu + k * sigma
    return flags


def burst_events(series, window, k, min_count):
    """(start, end, peak) spans of maximal bursting runs."""
    flags = burst_flags(series, window, k, min_count)
    events = []
    start = None
    for i, flagged in enumerate(flags):
        if flagged and start is None:
            start = i
        elif not flagged and start is not None:
            events.append((start, i - 1, max(series[start:i])))
            start = None
    if start is not None:
        events.append((start, len(series) - 1, max(series[start:])))
    return events
