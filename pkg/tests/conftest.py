import os
import sys
from fractions import Fraction

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

from graphdyn.plmap import builtin  # noqa: E402
from graphdyn.topograph import GraphPoint  # noqa: E402


@pytest.fixture(scope="session")
def tent():
    return builtin("tent")


@pytest.fixture(scope="session")
def fig2():
    return builtin("figure2")


def P(x, edge="e0"):
    return GraphPoint(edge, Fraction(x))
