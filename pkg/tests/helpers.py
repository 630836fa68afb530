"""Shared builders for the test suite."""

import numpy as np

from rfxy.lattice import build_lattice
from rfxy.model import Instance, generate_disorder


def make_instance(d, L, delta, seed=1):
    return generate_disorder(build_lattice(d, L), delta, seed)


def uniform_field_instance(d, L, delta, angle=0.0):
    lat = build_lattice(d, L)
    return Instance(lattice=lat, delta=delta, field_angles=np.full(lat.n_sites, angle))


def rel_err(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)
