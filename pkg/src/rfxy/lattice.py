"""Periodic hypercubic lattices.

Sites are numbered with axis 0 varying fastest: the site with 0-based
coordinates ``(c_0, ..., c_{d-1})`` has index ``sum_k c_k * L**k``.  Neighbour
lists are ordered ``+axis0, -axis0, +axis1, -axis1, ...``.  For ``L == 2`` the
``+`` and ``-`` neighbours along an axis coincide and are stored twice, so
every site always has exactly ``2 d`` entries.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError


@dataclass(frozen=True, eq=False)
class Lattice:
    d: int
    L: int
    neighbor_table: np.ndarray = field(repr=False)
    adjacency: sp.csr_matrix = field(repr=False)

    @property
    def n_sites(self):
        return self.L**self.d

    @property
    def shape(self):
        return (self.L,) * self.d

    @property
    def coordination(self):
        return 2 * self.d

    def coords(self, i):
        """0-based coordinates of site ``i``."""
        return tuple(int(c) for c in np.unravel_index(i, self.shape, order="F"))

    def index(self, coords):
        return int(np.ravel_multi_index(tuple(coords), self.shape, order="F", mode="wrap"))

    def forward_bonds(self):
        """Pairs ``(i, i + e_k)`` for every site and axis; each bond appears once.

        Summing over all ``2 d`` neighbours counts each of these pairs twice,
        with multiplicity preserved when ``L == 2``.
        """
        nt = self.neighbor_table
        i = np.repeat(np.arange(self.n_sites), self.d)
        j = nt[:, 0::2].ravel()
        return i, j


def build_lattice(d, L):
    """Build the periodic ``d``-dimensional lattice of linear size ``L``."""
    if int(d) != d or d < 1:
        raise ParameterError(f"dimension d must be a positive integer, got {d}")
    if int(L) != L or L < 2:
        raise ParameterError(f"linear size L must be an integer >= 2, got {L}")
    d, L = int(d), int(L)
    n = L**d
    shape = (L,) * d
    coords = np.unravel_index(np.arange(n), shape, order="F")
    cols = []
    for axis in range(d):
        for step in (1, -1):
            shifted = list(coords)
            shifted[axis] = (coords[axis] + step) % L
            cols.append(np.ravel_multi_index(tuple(shifted), shape, order="F"))
    table = np.stack(cols, axis=1).astype(np.int64)
    table.setflags(write=False)

    rows = np.repeat(np.arange(n), 2 * d)
    # duplicate entries are summed, which keeps the L == 2 multiplicity
    adjacency = sp.csr_matrix(
        (np.ones(n * 2 * d), (rows, table.ravel())), shape=(n, n)
    )
    adjacency.sum_duplicates()
    adjacency.sort_indices()
    return Lattice(d=d, L=L, neighbor_table=table, adjacency=adjacency)


def neighbors(lat, i):
    """The ``2 d`` neighbours of site ``i`` in the documented order."""
    if not 0 <= i < lat.n_sites:
        raise IndexError(f"site {i} out of range for lattice with {lat.n_sites} sites")
    return tuple(int(j) for j in lat.neighbor_table[i])
