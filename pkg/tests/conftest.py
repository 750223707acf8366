import random

import pytest
import sympy
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def sympy_rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix(rows).rank()


def sympy_det(rows):
    return sympy.Matrix(rows).det(method="berkowitz")


@pytest.fixture
def pyrng():
    return random.Random(20240611)
