"""Riemannian trust-region and conjugate-gradient local minimisers.

Both solvers work on the product of circles with the Frobenius metric and the
normalisation retraction from :mod:`rfxy.manifold`.

Energy decreases are not taken as ``f(X) - f(Y)``.  Near a critical point of
a large lattice that difference is ~1e-13 against ``|f| ~ 1e5`` and is pure
rounding.  Instead the quadratic energy is expanded exactly,

    f(X) - f(Y) = -<D, grad f(X)> + 1/2 <D, A D>,    D = Y - X,

with ``D = (V - c X) / |x + v|`` (``c = |v|^2 / (1 + |x + v|)``) for a step
``V``.  The linear term is evaluated through the tangent gradient and the
per-column normal component ``x . grad f``.  The Euclidean gradient is
almost normal to every circle, so contracting it directly with a
rounding-level normal part of ``D`` would swamp the result.
"""

import logging
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .manifold import check_tangent, project_tangent, retract
from .model import check_config

logger = logging.getLogger(__name__)

CONVERGED = "converged"
ITERATION_LIMIT = "iteration_limit"
STALLED = "stalled"
FAILED = "failed"

# truncated CG stop reasons
NEGATIVE_CURVATURE = "negative_curvature"
EXCEEDED_TR = "exceeded_trust_region"
REACHED_LINEAR = "reached_target_linear"
REACHED_SUPERLINEAR = "reached_target_superlinear"
MAX_INNER = "max_inner_iterations"
MODEL_INCREASED = "model_increased"

BETA_RULES = ("pr+", "hs+", "fr")


@dataclass
class SolverOptions:
    grad_tol: float = 1e-6
    max_iters: int = 10000
    # None means: max radius sqrt(n_sites), initial radius max / 8
    tr_initial_radius: float | None = None
    tr_max_radius: float | None = None
    tcg_kappa: float = 0.1
    tcg_theta: float = 1.0
    tcg_max_inner: int | None = None
    rho_accept: float = 0.1
    rho_expand: float = 0.75
    rho_shrink: float = 0.25
    rho_regularization: float = 1e3
    cg_beta_rule: str = "pr+"
    armijo_c: float = 1e-4
    armijo_backtrack: float = 0.5
    ls_initial_step: float = 1.0
    # "curvature": first trial step minimises the quadratic model along the
    # direction (one Hessian-vector product); "adaptive": previous step
    # length, doubled after a step that needed no backtracking
    ls_initial: str = "curvature"
    ls_max_backtracks: int = 60
    checked: bool = False

    def validate(self):
        if not self.grad_tol > 0:
            raise ParameterError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be at least 1")
        if self.tr_max_radius is not None and not self.tr_max_radius > 0:
            raise ParameterError("tr_max_radius must be positive")
        if self.tr_initial_radius is not None:
            upper = self.tr_max_radius if self.tr_max_radius is not None else np.inf
            if not 0 < self.tr_initial_radius <= upper:
                raise ParameterError("need 0 < tr_initial_radius <= tr_max_radius")
        if not 0 < self.tcg_kappa < 1:
            raise ParameterError("tcg_kappa must lie in (0, 1)")
        if not self.tcg_theta > 0:
            raise ParameterError("tcg_theta must be positive")
        if self.ls_initial not in ("curvature", "adaptive"):
            raise ParameterError("ls_initial must be 'curvature' or 'adaptive'")
        if self.cg_beta_rule not in BETA_RULES:
            raise ParameterError(f"cg_beta_rule must be one of {BETA_RULES}")
        if not 0 < self.armijo_c < 1 or not 0 < self.armijo_backtrack < 1:
            raise ParameterError("Armijo constants must lie in (0, 1)")
        return self

    def radii(self, n_sites):
        r_max = self.tr_max_radius if self.tr_max_radius is not None else np.sqrt(n_sites)
        r0 = self.tr_initial_radius if self.tr_initial_radius is not None else r_max / 8.0
        return r0, r_max


@dataclass
class LocalResult:
    config: np.ndarray = field(repr=False)
    energy: float
    grad_norm: float
    iterations: int
    status: str
    solver: str
    cost_evals: int = 0
    grad_evals: int = 0
    hess_evals: int = 0
    wall_time: float = 0.0
    inner_iterations: int = 0
    restarts: int = 0
    history: list = field(default_factory=list, repr=False)
    tcg_stops: dict = field(default_factory=dict, repr=False)

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def failed(self):
        return self.status == FAILED


def _coldot(A, B):
    return np.einsum("ij,ij->j", A, B)


class _Iterate:
    """A point together with its cached energy and derivatives."""

    __slots__ = ("X", "AX", "f", "egrad", "g", "gn", "normal")

    def __init__(self, X, AX, f, egrad):
        self.X, self.AX, self.f, self.egrad = X, AX, f, egrad
        self.normal = _coldot(X, egrad)
        self.g = egrad - self.normal * X
        self.gn = float(np.sqrt(np.vdot(self.g, self.g)))


class _Objective:
    """Energy/gradient/Hessian kernels with evaluation counters."""

    def __init__(self, inst):
        self.A = inst.lattice.adjacency
        self.H = inst.field_vectors
        self.delta = inst.delta
        self.cost_evals = 0
        self.grad_evals = 0
        self.hess_evals = 0

    def nsum(self, Y):
        return (self.A @ Y.T).T

    def cost(self, Y):
        """Energy at ``Y`` and the neighbour sum ``A Y`` (reused for the gradient)."""
        self.cost_evals += 1
        AY = self.nsum(Y)
        return float(-0.5 * np.vdot(Y, AY) - self.delta * np.vdot(self.H, Y)), AY

    def iterate(self, X, f, AX):
        self.grad_evals += 1
        return _Iterate(X, AX, f, -AX - self.delta * self.H)

    def trial(self, it, V):
        """Retract ``it.X`` along ``V``; return ``(Y, f(Y), A Y, f(X) - f(Y))``."""
        Y = retract(it.X, V)
        fy, AY = self.cost(Y)
        vv = _coldot(V, V)
        nrm = np.sqrt(1.0 + vv)
        c = vv / (1.0 + nrm)
        D = (V - c * it.X) / nrm
        linear = float(np.sum((_coldot(V, it.g) - c * it.normal) / nrm))
        return Y, fy, AY, -linear + 0.5 * float(np.vdot(D, AY - it.AX))

    def hessian(self, it, checked=False):
        X, normal = it.X, it.normal

        def apply(V):
            if checked:
                check_tangent(X, V)
            self.hess_evals += 1
            return project_tangent(X, -self.nsum(V)) - normal * V

        return apply


def _start(x0, inst, opts):
    opts = (opts or SolverOptions()).validate()
    X = check_config(x0, inst)
    X = X / np.sqrt(_coldot(X, X))
    obj = _Objective(inst)
    f, AX = obj.cost(X)
    return obj, obj.iterate(X, f, AX), opts


def _finish(name, it, k, status, obj, t0, **extra):
    return LocalResult(
        config=it.X,
        energy=it.f,
        grad_norm=it.gn,
        iterations=k,
        status=status,
        solver=name,
        cost_evals=obj.cost_evals,
        grad_evals=obj.grad_evals,
        hess_evals=obj.hess_evals,
        wall_time=time.perf_counter() - t0,
        **extra,
    )


def _truncated_cg(g, gn, hess, radius, opts, max_inner):
    """Steihaug-Toint truncated CG for min <g, e> + 1/2 <e, H e>, |e| <= radius."""
    eta = np.zeros_like(g)
    Heta = np.zeros_like(g)
    r = g
    r_r = gn * gn
    norm_r0 = gn
    d_Pd = r_r
    direction = -r
    e_Pe = 0.0
    e_Pd = 0.0
    model_value = 0.0
    stop = MAX_INNER
    j = 0
    for j in range(max_inner):
        Hd = hess(direction)
        d_Hd = float(np.vdot(direction, Hd))
        alpha = r_r / d_Hd if d_Hd != 0.0 else np.inf
        e_Pe_new = e_Pe + 2.0 * alpha * e_Pd + alpha * alpha * d_Pd
        if d_Hd <= 0.0 or e_Pe_new >= radius * radius:
            tau = (-e_Pd + np.sqrt(e_Pd * e_Pd + d_Pd * (radius * radius - e_Pe))) / d_Pd
            eta = eta + tau * direction
            Heta = Heta + tau * Hd
            stop = NEGATIVE_CURVATURE if d_Hd <= 0.0 else EXCEEDED_TR
            break
        new_eta = eta + alpha * direction
        new_Heta = Heta + alpha * Hd
        new_model = float(np.vdot(new_eta, g) + 0.5 * np.vdot(new_eta, new_Heta))
        if new_model >= model_value:
            stop = MODEL_INCREASED
            break
        e_Pe = e_Pe_new
        eta, Heta, model_value = new_eta, new_Heta, new_model
        r = r + alpha * Hd
        r_r_old = r_r
        r_r = float(np.vdot(r, r))
        norm_r = np.sqrt(r_r)
        if j >= 1 and norm_r <= norm_r0 * min(norm_r0**opts.tcg_theta, opts.tcg_kappa):
            stop = REACHED_LINEAR if opts.tcg_kappa < norm_r0**opts.tcg_theta else REACHED_SUPERLINEAR
            break
        beta = r_r / r_r_old
        direction = -r + beta * direction
        e_Pd = beta * (e_Pd + alpha * d_Pd)
        d_Pd = r_r + beta * beta * d_Pd
    return eta, Heta, j + 1, stop


def rtr(x0, inst, opts=None):
    """Riemannian trust-region method with a truncated-CG subproblem solver.

    Steps with model agreement ``rho`` below ``rho_accept`` are rejected; the
    radius shrinks by 4 when ``rho < rho_shrink`` and doubles (up to the
    maximum) when ``rho > rho_expand`` and the inner solver stopped on the
    boundary or on negative curvature.
    """
    t0 = time.perf_counter()
    obj, it, opts = _start(x0, inst, opts)
    radius, r_max = opts.radii(inst.n_sites)
    r_min = np.finfo(float).eps * r_max
    max_inner = opts.tcg_max_inner or inst.n_sites
    history = [it.f]
    stops = Counter()
    inner_total = 0
    k = 0
    while True:
        if not (np.isfinite(it.f) and np.isfinite(it.gn)):
            status = FAILED
            break
        if it.gn <= opts.grad_tol:
            status = CONVERGED
            break
        if k >= opts.max_iters:
            status = ITERATION_LIMIT
            break
        if radius < r_min:
            status = STALLED
            break

        hess = obj.hessian(it, checked=opts.checked)
        eta, Heta, n_inner, stop = _truncated_cg(it.g, it.gn, hess, radius, opts, max_inner)
        stops[stop] += 1
        inner_total += n_inner

        Y, fy, AY, actual = obj.trial(it, eta)
        if not np.isfinite(fy):
            status = FAILED
            break
        predicted = -float(np.vdot(it.g, eta)) - 0.5 * float(np.vdot(eta, Heta))
        reg = max(1.0, abs(it.f)) * np.finfo(float).eps * opts.rho_regularization
        model_decreased = predicted + reg >= 0.0
        den = predicted + reg
        rho = (actual + reg) / den if den != 0.0 else np.nan

        if np.isnan(rho) or rho < opts.rho_shrink or not model_decreased:
            radius /= 4.0
        elif rho > opts.rho_expand and stop in (NEGATIVE_CURVATURE, EXCEEDED_TR):
            radius = min(2.0 * radius, r_max)

        if model_decreased and rho > opts.rho_accept and actual >= 0.0:
            it = obj.iterate(Y, fy, AY)
            history.append(fy)
        k += 1

    logger.debug("rtr: %s after %d iterations, f=%.9f |g|=%.3e", status, k, it.f, it.gn)
    return _finish(
        "rtr", it, k, status, obj, t0,
        inner_iterations=inner_total, history=history, tcg_stops=dict(stops),
    )


def rcg(x0, inst, opts=None):
    """Riemannian conjugate gradient with Armijo backtracking along retracted rays.

    Search directions use the restarted Polak-Ribiere rule (``"pr+"``),
    Hestenes-Stiefel (``"hs+"``) or Fletcher-Reeves (``"fr"``) with projection
    transport; a direction that is not a descent direction is replaced by the
    negative gradient.  The first trial step of each line search is chosen by
    ``opts.ls_initial``.
    """
    t0 = time.perf_counter()
    obj, it, opts = _start(x0, inst, opts)
    direction = -it.g
    step_norm = opts.ls_initial_step
    history = [it.f]
    restarts = 0
    k = 0
    while True:
        if not (np.isfinite(it.f) and np.isfinite(it.gn)):
            status = FAILED
            break
        if it.gn <= opts.grad_tol:
            status = CONVERGED
            break
        if k >= opts.max_iters:
            status = ITERATION_LIMIT
            break

        slope = float(np.vdot(it.g, direction))
        if slope >= 0.0:
            direction = -it.g
            slope = -it.gn * it.gn
            restarts += 1
        dn = float(np.sqrt(np.vdot(direction, direction)))

        t = step_norm / dn
        if opts.ls_initial == "curvature":
            curv = float(np.vdot(direction, obj.hessian(it)(direction)))
            if curv > 0.0:
                t = -slope / curv
        backtracks = 0
        while True:
            Y, fy, AY, dec = obj.trial(it, t * direction)
            if np.isfinite(fy) and dec >= -opts.armijo_c * t * slope:
                break
            backtracks += 1
            if backtracks > opts.ls_max_backtracks:
                break
            t *= opts.armijo_backtrack
        if backtracks > opts.ls_max_backtracks:
            status = STALLED if np.isfinite(fy) else FAILED
            break
        step_norm = t * dn * (2.0 if backtracks == 0 else 1.0)

        new = obj.iterate(Y, fy, AY)
        if opts.cg_beta_rule == "pr+":
            g_old = project_tangent(Y, it.g)
            beta = max(0.0, float(np.vdot(new.g, new.g - g_old)) / (it.gn * it.gn))
        elif opts.cg_beta_rule == "hs+":
            moved = project_tangent(Y, direction)
            y = new.g - project_tangent(Y, it.g)
            den = float(np.vdot(moved, y))
            beta = max(0.0, float(np.vdot(new.g, y)) / den) if den != 0.0 else 0.0
        else:
            beta = new.gn * new.gn / (it.gn * it.gn)
        direction = -new.g + beta * project_tangent(Y, direction)
        it = new
        history.append(fy)
        k += 1

    logger.debug("rcg: %s after %d iterations, f=%.9f |g|=%.3e", status, k, it.f, it.gn)
    return _finish("rcg", it, k, status, obj, t0, restarts=restarts, history=history)


LOCAL_SOLVERS = {"rtr": rtr, "rcg": rcg}


def get_local_solver(name):
    try:
        return LOCAL_SOLVERS[name]
    except KeyError:
        raise ParameterError(f"unknown local solver {name!r}; choose from {sorted(LOCAL_SOLVERS)}")
