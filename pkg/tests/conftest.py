import random

import pytest

import helpers


@pytest.fixture
def rng(request):
    """Deterministic generator, seeded per test for reproducible failures."""
    return random.Random(f"partext:{request.node.name}")


@pytest.fixture
def reference_table():
    return helpers.reference_table()
