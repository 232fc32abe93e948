import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from bvlab.annular import MonomialTerm, PiecewiseField

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")


@pytest.fixture
def mu4() -> PiecewiseField:
    """Basic unit-modulus block of angular order 4 on A(0.5, 0.8)."""
    return PiecewiseField.of(MonomialTerm.make(1.0, 2, 0, -2.0, 0.5, 0.8))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(20260810))


def circle(r: float, theta: float) -> complex:
    return r * complex(math.cos(theta), math.sin(theta))
