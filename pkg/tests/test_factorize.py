import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spd
from mjpstein.exceptions import DefinitenessError, ScaleError
from mjpstein.factorize import coordinate_bound, factorize, verify_factorization
from mjpstein.spectral import spectral_summary


def _check(ws, s2):
    d = s2.shape[0]
    lam = spectral_summary(s2).lambda_min
    assert verify_factorization(ws, s2) <= 1e-10 * np.abs(s2).max()
    bound = coordinate_bound(s2)
    assert np.abs(ws.jumps).max() <= bound + 1e-12
    weights = ws.as_dict()
    for J, w in weights.items():
        assert w >= 0
        assert weights[tuple(-v for v in J)] == pytest.approx(w, rel=0, abs=0)
    for i in range(d):
        e = tuple(int(i == j) for j in range(d))
        assert weights[e] >= 0.25 * lam - 1e-12


def test_diagonally_dominant_closed_form():
    ws = factorize([[4.0, 1.0], [1.0, 4.0]])
    assert ws.as_dict() == pytest.approx({(-1, -1): 0.5, (-1, 0): 1.5, (0, -1): 1.5, (0, 1): 1.5, (1, 0): 1.5, (1, 1): 0.5})
    ws = factorize([[6.0, 2.0], [2.0, 6.0]])
    assert ws.weight((1, 1)) == pytest.approx(1.0)
    assert ws.weight((1, 0)) == pytest.approx(2.0)


def test_negative_correlation_uses_anti_diagonal():
    ws = factorize([[4.0, -1.0], [-1.0, 4.0]])
    assert ws.weight((1, -1)) == pytest.approx(0.5)
    assert ws.weight((1, 1)) == 0.0


def test_one_dimensional():
    ws = factorize([[2.0]])
    assert ws.as_dict() == pytest.approx({(-1,): 1.0, (1,): 1.0})


def test_lp_branch_on_strong_correlation():
    s2 = np.array([[10.0, 9.0], [9.0, 10.0]])
    ws = factorize(s2)
    _check(ws, s2)


def test_rejects_large_dimension_and_indefinite():
    with pytest.raises(ScaleError):
        factorize(np.eye(5))
    with pytest.raises(DefinitenessError):
        factorize(np.diag([1.0, -1.0]))


def _brute_force_dyad_span(s2, bound):
    """Independent oracle: nonnegative least squares over the same box."""
    from scipy.optimize import nnls

    d = s2.shape[0]
    cands = [v for v in itertools.product(range(-bound, bound + 1), repeat=d) if any(v)]
    idx = [(i, j) for i in range(d) for j in range(i, d)]
    M = np.array([[v[i] * v[j] for v in cands] for i, j in idx], dtype=float)
    _, res = nnls(M, np.array([s2[i, j] for i, j in idx]))
    return res


def test_feasibility_agrees_with_nnls(rng):
    for _ in range(10):
        s2 = random_spd(rng, 3)
        factorize(s2)
        bound = int(np.floor(coordinate_bound(s2)))
        assert _brute_force_dyad_span(s2, bound) <= 1e-8 * np.abs(s2).max()


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_factorization_properties(d, seed):
    rng = np.random.default_rng(seed)
    s2 = random_spd(rng, d)
    _check(factorize(s2), s2)
