"""Random-field XY energy in angular and Cartesian form.

Angular:    f(theta) = -1/2 sum_i sum_{j in N(i)} cos(theta_i - theta_j)
                       - delta sum_i cos(theta_i - phi_i)
Cartesian:  f(X)     = -1/2 sum_i sum_{j in N(i)} x_j . x_i - delta sum_i h_i . x_i

with ``x_i = (cos theta_i, sin theta_i)`` stored as the columns of a
``2 x n_sites`` array.  The Cartesian kernels use the lattice adjacency
matrix (neighbour multiplicities as entries), so they involve no
trigonometric calls.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError, ValidationError
from .rng import check_seed, stream

TWO_PI = 2.0 * np.pi
UNIT_TOL = 1e-6


def _wrap(theta):
    out = np.mod(theta, TWO_PI)
    out[out >= TWO_PI] = 0.0
    return out


@dataclass(frozen=True, eq=False)
class Instance:
    """A lattice together with a frozen random field of strength ``delta``."""

    lattice: object
    delta: float
    field_angles: np.ndarray = field(repr=False)
    disorder_seed: int = None
    field_vectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta < 0:
            raise ParameterError(f"delta must be a finite non-negative number, got {self.delta}")
        angles = np.array(self.field_angles, dtype=np.float64)
        if angles.shape != (self.lattice.n_sites,):
            raise DimensionError(
                f"expected {self.lattice.n_sites} field angles, got shape {angles.shape}"
            )
        angles.setflags(write=False)
        vectors = to_cartesian(angles)
        vectors.setflags(write=False)
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "field_angles", angles)
        object.__setattr__(self, "field_vectors", vectors)

    @property
    def n_sites(self):
        return self.lattice.n_sites

    @property
    def d(self):
        return self.lattice.d

    @property
    def L(self):
        return self.lattice.L


def generate_disorder(lat, delta, seed):
    """Draw i.i.d. uniform field orientations on [0, 2 pi) from the disorder stream."""
    if delta < 0:
        raise ParameterError(f"delta must be non-negative, got {delta}")
    seed = check_seed(seed)
    angles = stream(seed, "disorder").random(lat.n_sites) * TWO_PI
    angles[angles >= TWO_PI] = 0.0
    return Instance(lattice=lat, delta=delta, field_angles=angles, disorder_seed=seed)


def to_cartesian(theta):
    theta = np.asarray(theta, dtype=np.float64)
    return np.vstack([np.cos(theta), np.sin(theta)])


def to_angles(X):
    """Column angles of ``X`` reduced to [0, 2 pi)."""
    X = np.asarray(X, dtype=np.float64)
    return _wrap(np.arctan2(X[1], X[0]))


def _check_theta(theta, inst):
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (inst.n_sites,):
        raise DimensionError(f"expected {inst.n_sites} angles, got shape {theta.shape}")
    return theta


def _check_matrix(V, inst):
    V = np.asarray(V, dtype=np.float64)
    if V.shape != (2, inst.n_sites):
        raise DimensionError(f"expected shape (2, {inst.n_sites}), got {V.shape}")
    return V


def check_config(X, inst, tol=UNIT_TOL):
    """Validate shape and unit columns of a Cartesian configuration."""
    X = _check_matrix(X, inst)
    dev = np.abs(np.sqrt(np.einsum("ij,ij->j", X, X)) - 1.0)
    if dev.size and dev.max() > tol:
        raise ValidationError(
            f"column {int(dev.argmax())} has norm deviating from 1 by {dev.max():.3e}"
        )
    return X


def neighbor_sum(Y, lat):
    """Column ``i`` of the result is ``sum_{j in N(i)} y_j`` (with multiplicity)."""
    return (lat.adjacency @ Y.T).T


# -- angular formulation ----------------------------------------------------


def energy_terms_angular(theta, inst):
    """Return ``(f1, f2)`` with ``f = f1 + delta * f2``."""
    theta = _check_theta(theta, inst)
    nt = inst.lattice.neighbor_table
    f1 = -0.5 * np.cos(theta[:, None] - theta[nt]).sum()
    f2 = -np.cos(theta - inst.field_angles).sum()
    return float(f1), float(f2)


def energy_angular(theta, inst):
    f1, f2 = energy_terms_angular(theta, inst)
    return f1 + inst.delta * f2


def gradient_angular(theta, inst):
    theta = _check_theta(theta, inst)
    nt = inst.lattice.neighbor_table
    return np.sin(theta[:, None] - theta[nt]).sum(axis=1) + inst.delta * np.sin(
        theta - inst.field_angles
    )


def hessian_vec_angular(theta, v, inst):
    """Hessian of the angular energy at ``theta`` applied to ``v``."""
    theta = _check_theta(theta, inst)
    v = _check_theta(v, inst)
    nt = inst.lattice.neighbor_table
    c = np.cos(theta[:, None] - theta[nt])
    return (c * (v[:, None] - v[nt])).sum(axis=1) + inst.delta * np.cos(
        theta - inst.field_angles
    ) * v


# -- Cartesian formulation --------------------------------------------------


def energy_terms_cartesian(X, inst, check=True):
    if check:
        X = check_config(X, inst)
    f1 = -0.5 * np.vdot(X, neighbor_sum(X, inst.lattice))
    f2 = -np.vdot(inst.field_vectors, X)
    return float(f1), float(f2)


def energy_cartesian(X, inst, check=True):
    f1, f2 = energy_terms_cartesian(X, inst, check=check)
    return f1 + inst.delta * f2


def euclidean_gradient(X, inst, check=True):
    if check:
        X = check_config(X, inst)
    return -neighbor_sum(X, inst.lattice) - inst.delta * inst.field_vectors


def euclidean_hessian_vec(V, inst):
    """Apply the (configuration independent) Euclidean Hessian to ``V``."""
    V = _check_matrix(V, inst)
    return -neighbor_sum(V, inst.lattice)


# -- bounds -----------------------------------------------------------------


def lower_bound(inst):
    """``-(d + delta) L^d``, valid for every configuration."""
    return -(inst.d + inst.delta) * inst.n_sites


def balanced_delta(d):
    """Field strength at which the minima of both energy terms weigh the same."""
    return float(d)


@dataclass(frozen=True)
class ReferenceConfigs:
    aligned: np.ndarray
    field_aligned: np.ndarray
    aligned_energy: float
    field_aligned_energy: float

    @property
    def upper_bound(self):
        return min(self.aligned_energy, self.field_aligned_energy)


def reference_configs(inst):
    """The all-zero configuration and the field-aligned configuration."""
    aligned = np.zeros(inst.n_sites)
    field_aligned = np.array(inst.field_angles)
    return ReferenceConfigs(
        aligned=aligned,
        field_aligned=field_aligned,
        aligned_energy=energy_angular(aligned, inst),
        field_aligned_energy=energy_angular(field_aligned, inst),
    )


def aligned_scan(inst, n_angles=360):
    """Best uniform configuration over ``n_angles`` evenly spaced angles.

    For a uniform angle ``a`` the energy is ``-d L^d - delta * (C cos a + S sin a)``
    with ``C, S`` the summed field components, so the scan costs O(n_angles).
    Returns ``(angle, energy)``.
    """
    a = TWO_PI * np.arange(n_angles) / n_angles
    c, s = inst.field_vectors.sum(axis=1)
    energies = -inst.d * inst.n_sites - inst.delta * (c * np.cos(a) + s * np.sin(a))
    k = int(np.argmin(energies))
    return float(a[k]), float(energies[k])
