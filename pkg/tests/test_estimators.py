import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mjpstein.engine import build_chain, solve_stein, stationary_distribution
from mjpstein.estimators import CovarianceFactorizer, SteinTransformer, TruncatedEquilibrium
from mjpstein.process import geometry_of, immigration_death


def test_covariance_factorizer():
    s2 = np.array([[4.0, 1.0], [1.0, 4.0]])
    est = CovarianceFactorizer().fit(s2)
    np.testing.assert_allclose(est.inverse_transform(), s2, atol=1e-12)
    w = est.transform([[1, 0], [-1, 0], [5, 5]])
    assert w[0] == w[1] > 0 and w[2] == 0
    with pytest.raises(NotFittedError):
        CovarianceFactorizer().transform([[1, 0]])


def test_truncated_equilibrium_and_clone():
    est = TruncatedEquilibrium(delta=0.4)
    assert clone(est).get_params() == {"delta": 0.4, "check_irreducible": True}
    spec = immigration_death(1.0, n=20, delta0=0.5)
    est.fit(spec)
    ch = build_chain(spec, geometry_of(spec), 0.4)
    np.testing.assert_array_equal(est.predict_proba(ch.states), stationary_distribution(ch).probs)
    assert est.predict_proba([[1000]])[0] == 0.0
    with pytest.raises(TypeError):
        TruncatedEquilibrium().fit(np.eye(2))


def test_stein_transformer():
    spec = immigration_death(1.0, n=20, delta0=0.5)
    st = SteinTransformer(delta=0.4).fit(spec)
    B = np.zeros((2, st.chain_.size), bool)
    B[0, :3] = True
    B[1, 5:] = True
    H = st.transform(B)
    pi = stationary_distribution(st.chain_)
    np.testing.assert_allclose(H[0], solve_stein(st.chain_, pi, B[0]).values, atol=1e-12)
    with pytest.raises(ValueError):
        st.transform(np.ones((1, 3), bool))
