"""Worker helper determinism."""

from stratsums.util import chunk_ranges, parallel_map


def test_chunk_ranges_cover_everything():
    for total in (0, 1, 7, 100):
        for workers in (1, 2, 3, 16):
            ranges = chunk_ranges(total, workers)
            seen = [i for lo, hi in ranges for i in range(lo, hi)]
            assert seen == list(range(total))


def test_parallel_map_matches_serial():
    items = list(range(50))
    fn = lambda x: x * x - 3
    assert parallel_map(fn, items, workers=1) == parallel_map(fn, items, workers=4)
