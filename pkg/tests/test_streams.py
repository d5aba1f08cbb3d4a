import numpy as np
import pytest

from ekstat.errors import EmptyRequestError
from ekstat.streams import uniform_block, uniform_block_parallel


def test_values_open_interval():
    u = uniform_block(1, 1000, 3)
    assert u.shape == (1000, 3)
    assert u.min() > 0.0 and u.max() < 1.0


def test_row_slices_match_full_table():
    full = uniform_block(7, 100, 5)
    for start, count in ((0, 10), (13, 20), (90, 10)):
        part = uniform_block(7, 100, 5, start, count)
        assert np.array_equal(full[start:start + count], part)


def test_column_count_changes_stream_layout_only():
    # rows are padded to counter blocks, so narrower tables share the
    # leading columns of the padded width
    wide = uniform_block(3, 50, 4)
    narrow = uniform_block(3, 50, 2)
    assert np.array_equal(wide[:, :2], narrow)


def test_parallel_split_is_exact():
    one = uniform_block_parallel(11, 7919, 6, workers=1)
    for workers in (2, 3, 8):
        assert np.array_equal(one, uniform_block_parallel(11, 7919, 6, workers=workers))


def test_distinct_seeds_differ():
    assert not np.array_equal(uniform_block(1, 100, 2), uniform_block(2, 100, 2))


def test_empty_request():
    with pytest.raises(EmptyRequestError):
        uniform_block(1, 0, 2)


def test_bad_slice():
    with pytest.raises(ValueError):
        uniform_block(1, 10, 2, row_start=8, row_count=5)
