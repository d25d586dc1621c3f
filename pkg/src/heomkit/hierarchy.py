"""Enumeration and indexing of the auxiliary-operator hierarchy.

Every auxiliary density operator is addressed by a multi-index
n = (n_1, ..., n_N) of non-negative integers with sum(n) <= depth.  The
canonical ordering is graded lexicographic: ascending total degree, and
within a degree descending lexicographic, so (0,...,0) is always first and
the layout is deterministic for serialization and neighbour lookups.
"""

from math import comb

import numpy as np


def _compositions(total: int, parts: int):
    # all `parts`-tuples of non-negative ints summing to `total`,
    # descending lexicographic
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_hierarchy(n_sites: int, depth: int) -> np.ndarray:
    """All multi-indices with component sum <= depth, canonically ordered.

    Returns an integer array of shape (C(n_sites + depth, depth), n_sites).
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rows = []
    for degree in range(depth + 1):
        rows.extend(_compositions(degree, n_sites))
    indices = np.array(rows, dtype=np.int64)
    assert indices.shape == (comb(n_sites + depth, depth), n_sites)
    return indices


class Hierarchy:
    """Index layout plus O(1) neighbour lookup tables.

    Attributes
    ----------
    indices : ndarray, shape (size, n_sites)
        Multi-indices in canonical order; row 0 is the physical element.
    depths : ndarray, shape (size,)
        Component sums.
    plus_index, minus_index : ndarray, shape (size, n_sites)
        Position of the index with n_j raised/lowered by one, or -1 when
        that neighbour does not exist (beyond truncation / n_j == 0).
    """

    def __init__(self, n_sites: int, depth: int):
        self.n_sites = n_sites
        self.depth = depth
        self.indices = enumerate_hierarchy(n_sites, depth)
        self.size = self.indices.shape[0]
        self.depths = self.indices.sum(axis=1)

        position = {tuple(row): i for i, row in enumerate(self.indices)}
        self.plus_index = np.full((self.size, n_sites), -1, dtype=np.int64)
        self.minus_index = np.full((self.size, n_sites), -1, dtype=np.int64)
        for i, row in enumerate(self.indices):
            for j in range(n_sites):
                up = list(row)
                up[j] += 1
                self.plus_index[i, j] = position.get(tuple(up), -1)
                if row[j] > 0:
                    down = list(row)
                    down[j] -= 1
                    self.minus_index[i, j] = position[tuple(down)]

    def position(self, index) -> int:
        """Row of a given multi-index; raises KeyError if absent."""
        matches = np.nonzero((self.indices == np.asarray(index)).all(axis=1))[0]
        if matches.size == 0:
            raise KeyError(f"multi-index {tuple(index)} not in hierarchy")
        return int(matches[0])
