"""Shared fixtures: the two instances worked through in detail by hand."""

import numpy as np
import pytest

from eqsched import Instance
from eqsched.lp import LpSolution
from eqsched.model import build_model, build_weights


@pytest.fixture
def worked_example() -> Instance:
    """n=4, p=2, r=(1,4,3,2), w=(4,9,12,9); optimum 182."""
    return Instance.from_rows(2, [(1, 4), (4, 9), (3, 12), (2, 9)])


@pytest.fixture
def two_job_example() -> Instance:
    """n=2, p=3, r=(1,3), w=(1,3); the 6x6 cost-matrix example, optimum 21."""
    return Instance.from_rows(3, [(1, 1), (3, 3)])


#: The hand-checked fractional optimum of the worked example's relaxation
#: (objective 182): (job, part, interval) -> value.
FRACTIONAL_OPTIMUM = {
    (1, 1, 1): 1.0,
    (1, 2, 2): 0.5,
    (1, 2, 8): 0.5,
    (2, 1, 5): 0.5,
    (2, 1, 7): 0.5,
    (2, 2, 6): 0.5,
    (2, 2, 8): 0.5,
    (3, 1, 3): 0.5,
    (3, 1, 4): 0.5,
    (3, 2, 4): 0.5,
    (3, 2, 5): 0.5,
    (4, 1, 2): 0.5,
    (4, 1, 6): 0.5,
    (4, 2, 3): 0.5,
    (4, 2, 7): 0.5,
}


@pytest.fixture
def worked_example_fractional(worked_example):
    """The worked example's model plus the injected fractional optimum."""
    model = build_model(build_weights(worked_example))
    x = np.zeros(model.nvars)
    for key, value in FRACTIONAL_OPTIMUM.items():
        x[model.var_index[key]] = value
    objective = sum(model.weight.cost(*key) * value for key, value in FRACTIONAL_OPTIMUM.items())
    return model, LpSolution("optimal", x, objective)


def random_small_instance(rng: np.random.Generator, n_max: int = 4, p_max: int = 3) -> Instance:
    """Small random instance; may require idle time."""
    n = int(rng.integers(1, n_max, endpoint=True))
    p = int(rng.integers(1, p_max, endpoint=True))
    horizon = n * p
    rows = [
        (int(rng.integers(1, max(horizon - p + 1, 1), endpoint=True)), int(rng.integers(1, 5, endpoint=True)))
        for _ in range(n)
    ]
    return Instance.from_rows(p, rows)
