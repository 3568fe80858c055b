import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qcext import BeltramiCertifier, HarmonicMap, QuasiconformalExtension, UnivalenceCriterion
from qcext._validation import check_points


def test_check_points_accepts_complex_and_pairs():
    z = np.array([0.1 + 0.2j, -0.3j])
    np.testing.assert_array_equal(check_points(z), z)
    np.testing.assert_array_equal(check_points([[0.1, 0.2], [0, -0.3]]), z)
    np.testing.assert_array_equal(check_points([0.5, 0.25]), [0.5, 0.25])
    with pytest.raises(ValueError):
        check_points([[np.nan, 0]])


def test_univalence_criterion():
    est = UnivalenceCriterion("becker", k=0.5).fit("z + 0.1*z^2")
    assert est.passed_ and 0 < est.k_hat_ < 0.5
    assert est.score() == pytest.approx(0.5 - est.k_hat_)
    r = est.transform(np.array([0.5 + 0j]))
    assert r[0] <= est.k_hat_ + 1e-12


def test_get_set_params_and_clone():
    est = UnivalenceCriterion("main_harmonic_sigma", weight="becker", k=0.3)
    assert est.get_params()["criterion"] == "main_harmonic_sigma"
    c = clone(est).set_params(k=0.7)
    assert c.k == 0.7 and est.k == 0.3


def test_not_fitted():
    with pytest.raises(NotFittedError):
        UnivalenceCriterion().transform([0.1])
    with pytest.raises(NotFittedError):
        QuasiconformalExtension().transform([2.0])


def test_bad_k_rejected():
    with pytest.raises(ValueError):
        UnivalenceCriterion(k=1.0).fit("z")


def test_extension_and_certifier():
    q = QuasiconformalExtension("teichmuller", "becker", alpha=(0.3, 0)).fit("z")
    assert q.certified_
    np.testing.assert_allclose(q.transform([[2.0, 0.5]]), [2.6 + 0.35j], atol=1e-14)
    c = BeltramiCertifier().fit(q)
    assert c.certified_ and c.sup_mu_ == pytest.approx(0.3, abs=1e-9)
    np.testing.assert_allclose(np.abs(c.transform([3.0 + 0j, 0.2j])), 0.3, atol=1e-9)


def test_fit_transform_on_harmonic_family():
    f = HarmonicMap.from_strings("z+0.15*z^2", "0.1*z^2")
    q = QuasiconformalExtension("harmonic_lambda", "becker", lam=0.5)
    F = q.fit(f).transform(np.array([0.5, 2.0], dtype=complex))
    assert F[0] == pytest.approx(f.with_lambda(0.5)(0.5 + 0j))
    with pytest.raises(TypeError):
        BeltramiCertifier().fit("z")
