"""Geometry of the product of circles, embedded columnwise in 2 x n matrices.

Tangent vectors are plain ``2 x n`` arrays whose column ``i`` is orthogonal to
``x_i``; the base point is carried by the caller.  The metric is the embedded
Frobenius inner product and the retraction is column normalisation.
"""

import numpy as np

from .errors import DimensionError, ValidationError
from .model import check_config, euclidean_gradient, neighbor_sum, to_cartesian
from .rng import stream

TANGENT_TOL = 1e-6


def _coldot(A, B):
    return np.einsum("ij,ij->j", A, B)


def project_tangent(X, U):
    if np.shape(U) != np.shape(X):
        raise DimensionError(f"shape mismatch: {np.shape(U)} vs {np.shape(X)}")
    return U - _coldot(X, U) * X


def check_tangent(X, V, tol=TANGENT_TOL):
    if np.shape(V) != np.shape(X):
        raise DimensionError(f"shape mismatch: {np.shape(V)} vs {np.shape(X)}")
    dev = np.abs(_coldot(X, V)) / (1.0 + np.sqrt(_coldot(V, V)))
    if dev.size and dev.max() > tol:
        raise ValidationError(f"vector is not tangent at column {int(dev.argmax())}")
    return V


def retract(X, V):
    Y = X + V
    norms = np.sqrt(_coldot(Y, Y))
    assert np.all(norms > 0.0), "retraction of a non-tangent vector hit the origin"
    return Y / norms


def exp_map(X, V):
    """Exact geodesic step: rotate each column by the angle ``|v_i|``."""
    t = np.sqrt(_coldot(V, V))
    safe = np.where(t > 0.0, t, 1.0)
    return np.cos(t) * X + np.where(t > 0.0, np.sin(t) / safe, 1.0) * V


def transport(Y, V):
    """Vector transport to the tangent space at ``Y`` by projection."""
    return project_tangent(Y, V)


def inner(U, V):
    return float(np.vdot(U, V))


def norm(V):
    return float(np.sqrt(np.vdot(V, V)))


def riemannian_gradient(X, inst, check=True):
    if check:
        X = check_config(X, inst)
    return project_tangent(X, euclidean_gradient(X, inst, check=False))


def riemannian_hessian_vec(X, V, inst, egrad=None, check=True):
    """Riemannian Hessian at ``X`` applied to the tangent vector ``V``.

    ``P_X(-A V) - (x_i . g_i) v_i`` with ``g = euclidean_gradient(X)``; the
    second term is the curvature correction of the unit circle.  Pass
    ``egrad`` to reuse a gradient computed at the same point.
    """
    if check:
        X = check_config(X, inst)
        check_tangent(X, V)
    if egrad is None:
        egrad = euclidean_gradient(X, inst, check=False)
    return project_tangent(X, -neighbor_sum(V, inst.lattice)) - _coldot(X, egrad) * V


def random_angles(n, rng):
    return rng.random(n) * (2.0 * np.pi)


def random_point(lat, seed=None, rng=None):
    """Uniform random point: independent uniform angles per site.

    Either ``seed`` (drawn from the dedicated ``start`` stream) or an explicit
    generator ``rng`` must be given.
    """
    if rng is None:
        if seed is None:
            raise ValueError("random_point needs a seed or a generator")
        rng = stream(seed, "start")
    return to_cartesian(random_angles(lat.n_sites, rng))


def random_tangent(X, rng):
    return project_tangent(X, rng.standard_normal(X.shape))
