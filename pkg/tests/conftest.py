import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ffexpand.field import make_field, parse_field_spec
from ffexpand.graph import build_graph, exact_eigenvalues
from ffexpand.poly import parse_poly, validate_kernel


@pytest.fixture(scope="session")
def f3():
    return make_field(3)


@pytest.fixture(scope="session")
def f5():
    return make_field(5)


@pytest.fixture(scope="session")
def f7():
    return make_field(7)


@pytest.fixture(scope="session")
def f9():
    return make_field(3, 2)


_SPECTRAL_CACHE: dict = {}


@pytest.fixture(scope="session")
def spectral_cell():
    """(kernel_string, field_spec) -> (graph, eigenvalues); cached per session.

    The q = 49 solves take seconds each, and three acceptance criteria
    need the same spectra; computing each cell once keeps the suite
    inside its time budget.
    """

    def get(kernel_string: str, spec: str):
        key = (kernel_string, spec)
        if key not in _SPECTRAL_CACHE:
            ctx = parse_field_spec(spec)
            kernel = validate_kernel(parse_poly(ctx, kernel_string))
            g = build_graph(kernel)
            evals = exact_eigenvalues(g)
            _SPECTRAL_CACHE[key] = (g, evals)
        return _SPECTRAL_CACHE[key]

    return get


def lambda2_from(evals: np.ndarray) -> float:
    rest = evals[:-1]
    return float(np.abs(rest).max()) if rest.size else 0.0
