"""Shared fixtures: the small hand-analyzed instances used throughout."""

from __future__ import annotations

import random

import pytest

from popmax import Matching, make_matching, parse_instance, random_instance

I0_TEXT = """\
side A a
side B b
pref a: b
pref b: a
"""

I1_TEXT = """\
side A a1 a2
side B b1 b2
pref a1: b1
pref a2: b1 b2
pref b1: a2 a1
pref b2: a2
"""

I2_TEXT = """\
side A a1 a2
side B b1 b2
pref a1: b1 b2
pref a2: b2 b1
pref b1: a2 a1
pref b2: a1 a2
"""

I2_COSTED_TEXT = I2_TEXT + "cost a1 b1 1\ncost a2 b2 1\n"

I3_TEXT = """\
side A a1 a2 a3
side B b1
pref a1: b1
pref a2: b1
pref a3: b1
pref b1: a1 a2 a3
"""

I5_TEXT = """\
side A a1 a2
side B b1 b2
pref a1: b2 b1
pref a2: b1 b2
pref b1: a2 a1
pref b2: a1 a2
"""


@pytest.fixture
def i0():
    return parse_instance(I0_TEXT)


@pytest.fixture
def i1():
    return parse_instance(I1_TEXT)


@pytest.fixture
def i2():
    return parse_instance(I2_TEXT)


@pytest.fixture
def i2c():
    return parse_instance(I2_COSTED_TEXT)


@pytest.fixture
def i3():
    return parse_instance(I3_TEXT)


@pytest.fixture
def i5():
    return parse_instance(I5_TEXT)


def mk(inst, *pairs) -> Matching:
    return make_matching(inst, pairs)


def random_cases(count, max_side, seed0, min_side=1, density=(0.3, 1.0), costs=None):
    """Seeded stream of (seed, instance) pairs shared by the property tests."""
    for seed in range(count):
        rng = random.Random(seed0 + seed)
        na = rng.randint(min_side, max_side)
        nb = rng.randint(min_side, max_side)
        d = rng.uniform(*density)
        yield seed, random_instance(na, nb, d, seed0 + 100_000 + seed, costs)
