import numpy as np
import pytest

from rfxy.rng import STREAMS, check_seed, stream


def test_streams_are_reproducible_and_distinct():
    a = stream(3, "start", 0).random(5)
    assert np.array_equal(a, stream(3, "start", 0).random(5))
    assert not np.array_equal(a, stream(3, "start", 1).random(5))
    assert not np.array_equal(a, stream(3, "perturb", 0).random(5))
    assert not np.array_equal(a, stream(4, "start", 0).random(5))
    assert len(set(STREAMS.values())) == len(STREAMS)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_seed_range(seed):
    with pytest.raises(ValueError):
        check_seed(seed)


def test_unknown_stream():
    with pytest.raises((KeyError, ValueError)):
        stream(1, "nonsense")
