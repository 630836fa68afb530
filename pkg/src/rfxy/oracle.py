"""Exhaustive grid search for tiny instances.

Every site takes one of the ``k`` angles ``2 pi m / k``.  Configurations are
indexed lexicographically with site 0 as the most significant digit.  The
enumeration splits the sites into an outer prefix, looped over in Python,
and an inner block, evaluated as one vector.  The inner block's own bonds
and field terms are computed once; per prefix only the prefix energy and
the bonds crossing the split are added.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EnumerationTooLarge, ParameterError
from .local_solvers import SolverOptions, rtr
from .model import to_cartesian

DEFAULT_CAP = 10**7
BLOCK_TARGET = 2**17


@dataclass(frozen=True)
class GridSpec:
    k: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"grid resolution k must be positive, got {self.k}")

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.k) / self.k


@dataclass(frozen=True)
class GridResult:
    theta: np.ndarray
    energy: float
    index: int
    size: int


def _digits(indices, k, m):
    """Base-``k`` digits (most significant first) of ``indices`` as an (len, m) array."""
    out = np.empty((len(indices), m), dtype=np.int64)
    rest = np.array(indices, dtype=np.int64)
    for p in range(m - 1, -1, -1):
        out[:, p] = rest % k
        rest //= k
    return out


def brute_force_grid(inst, spec):
    """Exact minimum of the angular energy over the grid ``spec``."""
    n, k = inst.n_sites, spec.k
    size = k**n
    if size > spec.cap:
        raise EnumerationTooLarge(size, spec.cap)

    angles = spec.angles
    steps = np.minimum(np.arange(k), k - np.arange(k))
    bond_energy = -np.cos(2.0 * np.pi * steps / k)
    field_energy = -inst.delta * np.cos(angles[None, :] - inst.field_angles[:, None])
    bi, bj = inst.lattice.forward_bonds()

    m = 0
    while m < n and k ** (m + 1) <= BLOCK_TARGET:
        m += 1
    m = max(m, 1)
    n_out = n - m
    inner = _digits(np.arange(k**m), k, m)  # columns are sites n_out..n-1

    e_inner = np.zeros(k**m)
    cross = []  # (outer site, table of shape (k, k**m))
    outer_bonds = []
    for i, j in zip(bi, bj):
        i_in, j_in = i >= n_out, j >= n_out
        if i_in and j_in:
            e_inner += bond_energy[(inner[:, i - n_out] - inner[:, j - n_out]) % k]
        elif i_in or j_in:
            o, s = (j, i) if i_in else (i, j)
            table = bond_energy[(np.arange(k)[:, None] - inner[None, :, s - n_out]) % k]
            cross.append((o, table))
        else:
            outer_bonds.append((i, j))
    for p in range(m):
        e_inner += field_energy[n_out + p][inner[:, p]]

    best_e, best_idx = np.inf, -1
    for prefix_idx in range(k**n_out):
        prefix = _digits([prefix_idx], k, n_out)[0] if n_out else ()
        e_out = sum(bond_energy[(prefix[i] - prefix[j]) % k] for i, j in outer_bonds)
        e_out += sum(field_energy[s][prefix[s]] for s in range(n_out))
        e = e_inner + e_out
        for o, table in cross:
            e = e + table[prefix[o]]
        a = int(np.argmin(e))
        if e[a] < best_e:
            best_e, best_idx = float(e[a]), prefix_idx * k**m + a

    theta = angles[_digits([best_idx], k, n)[0]]
    return GridResult(theta=theta, energy=best_e, index=best_idx, size=size)


def refine_from_grid(inst, theta, opts=None):
    """Polish a grid configuration with the trust-region solver."""
    return rtr(to_cartesian(theta), inst, opts or SolverOptions())
