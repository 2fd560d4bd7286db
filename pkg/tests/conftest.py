from __future__ import annotations

import numpy as np
import pytest

from delegate_opt import ModelParams, SenderDist

BASELINE_SHAPES = ((1, 1), (5, 5), (3, 5), (5, 3))


@pytest.fixture
def baseline() -> ModelParams:
    return ModelParams()


@pytest.fixture
def uniform3() -> SenderDist:
    return SenderDist(1, 1, 3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_admissible(rng: np.random.Generator) -> ModelParams:
    """Random parameter draw inside the admissible box."""
    return ModelParams(
        A=float(rng.uniform(0.5, 2.0)),
        beta_cost=float(rng.uniform(0.2, 1.0)),
        a=float(rng.uniform(0.0, 0.9)),
        k=float(rng.uniform(0.5, 2.0)),
        q=float(rng.uniform(0.0, 2.0)),
    )
