"""Ground states of the random-field XY model by Riemannian optimization."""

from .certificates import EpsCertificate, certify, epsilon_thresholds, relative_gap
from .errors import DimensionError, EnumerationTooLarge, ParameterError, ValidationError
from .global_solvers import GlobalOptions, GlobalResult, budget_report, compare, mbh, multistart
from .lattice import Lattice, build_lattice, neighbors
from .local_solvers import LocalResult, SolverOptions, rcg, rtr
from .model import (
    Instance,
    energy_angular,
    energy_cartesian,
    euclidean_gradient,
    euclidean_hessian_vec,
    generate_disorder,
    lower_bound,
    to_angles,
    to_cartesian,
)
from .oracle import GridSpec, brute_force_grid, refine_from_grid

__version__ = "0.1.0"
