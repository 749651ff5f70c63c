"""
Fixtures and hypothesis strategies shared by the app test suites.
"""
import numpy as np
from hypothesis import strategies as st

from .services import make_spf

F1_POLES = [(1j, 1)]
F2_POLES = [(1j, 1), (-1j, 1)]


def f1():
    """1/(z - i)."""
    return make_spf(F1_POLES)


def f2():
    """1/(z - i) + 1/(z + i) = 2z/(z^2 + 1)."""
    return make_spf(F2_POLES)


@st.composite
def spfs(draw, max_poles=6, max_multiplicity=3, max_abs_real=5.0, min_height=0.2, max_height=3.0,
         upper_only=False):
    count = draw(st.integers(min_value=1, max_value=max_poles))
    poles = {}
    for _ in range(count):
        re = draw(st.floats(min_value=-max_abs_real, max_value=max_abs_real, allow_nan=False))
        height = draw(st.floats(min_value=min_height, max_value=max_height, allow_nan=False))
        sign = 1.0 if upper_only else draw(st.sampled_from([1.0, -1.0]))
        mult = draw(st.integers(min_value=1, max_value=max_multiplicity))
        poles[complex(round(re, 6), sign * round(height, 6))] = mult
    return make_spf(poles.items())


def random_spf(rng: np.random.Generator, max_poles=6, max_multiplicity=3, max_abs_real=5.0,
               min_height=0.2, max_height=3.0, upper_only=False):
    """Seeded counterpart of spfs() for corpora with an exact size."""
    count = int(rng.integers(1, max_poles + 1))
    poles = {}
    for _ in range(count):
        re = rng.uniform(-max_abs_real, max_abs_real)
        height = rng.uniform(min_height, max_height)
        sign = 1.0 if upper_only else float(rng.choice([1.0, -1.0]))
        poles[complex(re, sign * height)] = int(rng.integers(1, max_multiplicity + 1))
    return make_spf(poles.items())
