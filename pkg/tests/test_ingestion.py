from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from bnsquat.errors import SourceExhaustedAbnormally
from bnsquat.ingestion import (
    FixturePriceSource,
    FixtureSource,
    RateLimitedSource,
    drain,
    fixture_layout,
)


class ListSource:
    """In-memory paged source for tests."""

    def __init__(self, lines, page_size=3):
        self.lines = lines
        self.page_size = page_size
        self.calls = 0

    def fetch_page(self, cursor):
        self.calls += 1
        start = int(cursor) if cursor else 0
        end = min(start + self.page_size, len(self.lines))
        return self.lines[start:end], str(end) if end < len(self.lines) else None


def json_lines(n):
    return [json.dumps({"i": i}) for i in range(n)]


def test_drain_collects_everything_in_order():
    out = []
    counts = drain(ListSource(json_lines(10), page_size=3), out.append)
    assert [o["i"] for o in out] == list(range(10))
    assert (counts.fetched, counts.parsed, counts.failed) == (10, 10, 0)


def test_drain_empty_source():
    out = []
    counts = drain(ListSource([]), out.append)
    assert out == [] and counts.fetched == 0


def test_drain_tolerates_failures_below_ceiling():
    lines = json_lines(99) + ["not json"]
    out = []
    counts = drain(ListSource(lines), out.append, failure_ceiling=0.02)
    assert counts.failed == 1 and counts.parsed == 99
    assert len(out) == 99


def test_drain_raises_above_ceiling():
    lines = json_lines(5) + ["bad"] * 5
    with pytest.raises(SourceExhaustedAbnormally):
        drain(ListSource(lines), lambda _: None, failure_ceiling=0.01)


def test_drain_applies_parse_and_counts_parse_failures():
    def parse(obj):
        if obj["i"] % 2:
            raise ValueError("odd")
        return obj

    out = []
    counts = drain(ListSource(json_lines(10)), out.append, parse=parse, failure_ceiling=0.6)
    assert [o["i"] for o in out] == [0, 2, 4, 6, 8]
    assert counts.failed == 5


@given(st.integers(min_value=0, max_value=50), st.integers(min_value=1, max_value=17))
@settings(max_examples=100)
def test_pagination_soundness(n, page_size):
    """Every record is seen exactly once regardless of page size."""
    out = []
    drain(ListSource(json_lines(n), page_size=page_size), out.append)
    assert [o["i"] for o in out] == list(range(n))


def test_fixture_source_reads_sorted_files(tmp_path):
    (tmp_path / "b.jsonl").write_text('{"x": 2}\n')
    (tmp_path / "a.jsonl").write_text('{"x": 1}\n\n')
    source = FixtureSource.from_dir(tmp_path, page_size=1)
    out = []
    drain(source, out.append)
    assert [o["x"] for o in out] == [1, 2]


class FakeClock:
    def __init__(self):
        self.now = 0.0
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


def test_rate_limiter_sleeps_when_budget_exhausted():
    clock = FakeClock()
    inner = ListSource(json_lines(100), page_size=1)
    limited = RateLimitedSource(inner, budget=2, interval=1.0, clock=clock, sleep=clock.sleep)
    cursor = None
    for _ in range(5):
        _, cursor = limited.fetch_page(cursor)
    # 5 requests at budget 2/interval: sleeps before requests 3 and 5
    assert len(clock.sleeps) == 2
    assert all(s == pytest.approx(1.0) for s in clock.sleeps)


def test_rate_limiter_no_sleep_when_spread_out():
    clock = FakeClock()
    limited = RateLimitedSource(
        ListSource(json_lines(10), page_size=1), budget=1, interval=1.0,
        clock=clock, sleep=clock.sleep,
    )
    cursor = None
    for _ in range(3):
        _, cursor = limited.fetch_page(cursor)
        clock.now += 2.0
    assert clock.sleeps == []


def test_rate_limiter_rejects_zero_budget():
    with pytest.raises(ValueError):
        RateLimitedSource(ListSource([]), budget=0)


def test_fixture_price_source(tmp_path):
    path = tmp_path / "prices.csv"
    path.write_text("date,asset,usd_close\n2021-01-01,ETH,1000.0\n")
    source = FixturePriceSource.from_path(path)
    from datetime import date

    assert source.rate(date(2021, 1, 1), "ETH") == 1000.0


def test_fixture_layout(tmp_path):
    layout = fixture_layout(tmp_path)
    assert layout["registrations"] == tmp_path / "registrations"
    assert layout["prices"].name == "prices.csv"
    assert set(layout) == {"registrations", "txs", "utxos", "prices", "labels"}
