from math import comb

import numpy as np
import pytest

from heomkit import Hierarchy, enumerate_hierarchy


def test_two_site_depth_three_order():
    expected = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
                (3, 0), (2, 1), (1, 2), (0, 3)]
    indices = enumerate_hierarchy(2, 3)
    assert [tuple(row) for row in indices] == expected


def test_four_site_depth_three_count():
    assert enumerate_hierarchy(4, 3).shape == (35, 4)


def test_single_site_depth_zero():
    assert [tuple(row) for row in enumerate_hierarchy(1, 0)] == [(0,)]


@pytest.mark.parametrize("n_sites", range(1, 7))
@pytest.mark.parametrize("depth", range(6))
def test_counts_match_stars_and_bars(n_sites, depth):
    indices = enumerate_hierarchy(n_sites, depth)
    assert indices.shape[0] == comb(n_sites + depth, depth)
    # no duplicates, all within depth
    assert len({tuple(row) for row in indices}) == indices.shape[0]
    assert indices.sum(axis=1).max() == (depth if depth else 0)


def test_ordering_is_graded():
    indices = enumerate_hierarchy(3, 4)
    depths = indices.sum(axis=1)
    assert (np.diff(depths) >= 0).all()
    assert tuple(indices[0]) == (0, 0, 0)


def test_neighbour_tables():
    hier = Hierarchy(2, 2)
    rows = [tuple(r) for r in hier.indices]
    for i, row in enumerate(hier.indices):
        for j in range(2):
            up = list(row)
            up[j] += 1
            p = hier.plus_index[i, j]
            if tuple(up) in rows:
                assert tuple(hier.indices[p]) == tuple(up)
            else:
                assert p == -1
            q = hier.minus_index[i, j]
            if row[j] == 0:
                assert q == -1
            else:
                down = list(row)
                down[j] -= 1
                assert tuple(hier.indices[q]) == tuple(down)


def test_position_lookup():
    hier = Hierarchy(3, 3)
    assert hier.position((0, 0, 0)) == 0
    assert hier.position((1, 1, 1)) > 0
    with pytest.raises(KeyError):
        hier.position((4, 0, 0))


def test_invalid_arguments():
    with pytest.raises(ValueError):
        enumerate_hierarchy(0, 3)
    with pytest.raises(ValueError):
        enumerate_hierarchy(2, -1)
