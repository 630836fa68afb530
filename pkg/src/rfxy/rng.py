"""Named, independent random streams derived from integer seeds.

Every stream is ``SeedSequence(seed, spawn_key=(tag, *index))`` so that the
disorder, the random starts and the perturbations never share state, and
adding runs to an experiment leaves earlier streams untouched.
"""

import numpy as np

from .errors import ParameterError

STREAMS = {
    "disorder": 0,
    "start": 1,
    "perturb": 2,
    "multistart": 3,
    "local": 4,
}


def check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed:
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed, name, *index):
    """Return a ``numpy.random.Generator`` for the stream ``name``."""
    seed = check_seed(seed)
    if name not in STREAMS:
        raise ParameterError(f"unknown random stream {name!r}")
    key = (STREAMS[name],) + tuple(int(i) for i in index)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))
