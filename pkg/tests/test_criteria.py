import numpy as np
import pytest

from qcext.criteria import (
    CATALOG, CriterionError, MissingWeightError, check, k_condition_check, make_criterion, sup_ratio,
)
from qcext.grid import DiskGrid
from qcext.maps import HarmonicMap
from qcext.weights import make_weight

GRID = DiskGrid(32, 128)
PTS = GRID.points(include_origin=False)
PIPE = HarmonicMap.from_strings("z+0.15*z^2", "0.1*z^2")


def test_catalog_has_twelve_entries():
    assert len(CATALOG) == 12


def test_becker_identity():
    for k in (0.0, 0.5):
        r = check("becker", "z", k=k)
        assert r.k_hat == 0 and r.passed


def test_affine_harmonic_margin_zero():
    f = HarmonicMap.from_strings("z", "0.3*z")
    assert check("main_harmonic_sigma", f, "becker", k=0.1).k_hat == 0


def test_teichmuller_affine_margin_zero():
    for a in (0.1, 0.3, 0.6 + 0.2j):
        r = check("teichmuller", HarmonicMap.teichmuller("z", a), "becker", k=0.01)
        assert r.k_hat == 0.0 and r.passed


def test_becker_against_dense_bruteforce():
    eps = 0.2
    r = check("becker", f"z + {eps}*z^2/2", k=0.9)
    # independent oracle: closed form P = eps/(1+eps z) on a uniform 2048 x 8192 grid
    radii = (np.arange(2048) + 0.5) / 2048
    theta = 2 * np.pi * np.arange(8192) / 8192
    best = 0.0
    for chunk in np.array_split(radii, 16):
        z = chunk[:, None] * np.exp(1j * theta)[None, :]
        best = max(best, float(np.max((1 - np.abs(z) ** 2) * np.abs(eps / (1 + eps * z)))))
    assert abs(r.k_hat - best) <= 1e-4 * best


def test_refinement_history_is_recorded():
    r = check("becker", "z + 0.1*z^2", k=0.9)
    assert len(r.refinement) >= 2
    sizes = [n for n, _ in r.refinement]
    assert sizes == sorted(sizes)


def test_main_reduces_to_bravo_with_becker():
    a = make_criterion("main_harmonic_sigma", PIPE, "becker").ratio(PTS)
    b = make_criterion("bravo_c", PIPE, params={"c": 0}).ratio(PTS)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.2 - 0.1j])
def test_ahlfors_c_weight_reduction(c):
    phi = "z + 0.15*z^2"
    w = make_weight({"kind": "ahlfors_c", "c": [c.real, c.imag] if isinstance(c, complex) else [c, 0]})
    a = make_criterion("ahlfors_sigma", phi, w).ratio(PTS)
    b = make_criterion("ahlfors_c", phi, params={"c": c}).ratio(PTS)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_ahlfors_c_zero_is_becker_times_modulus():
    phi = "z + 0.15*z^2"
    a = make_criterion("ahlfors_c", phi, params={"c": 0}).ratio(PTS)
    b = make_criterion("becker", phi).ratio(PTS)
    np.testing.assert_allclose(a, b * np.abs(PTS), rtol=1e-12)


def test_g_zero_collapses_to_analytic():
    f = HarmonicMap.from_strings("z + 0.15*z^2")
    a = make_criterion("main_harmonic_sigma", f, "becker").ratio(PTS)
    b = make_criterion("ahlfors_sigma", f, "becker").ratio(PTS)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_lambda_zero_collapses_to_analytic():
    a = make_criterion("main_harmonic_sigma", PIPE.with_lambda(0), "becker").ratio(PTS)
    b = make_criterion("ahlfors_sigma", PIPE.h, "becker").ratio(PTS)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_teichmuller_reduction():
    f = HarmonicMap.teichmuller("z + 0.15*z^2", 0.3 + 0.2j)
    a = make_criterion("main_harmonic_sigma", f, "becker").ratio(PTS)
    b = make_criterion("teichmuller", f, "becker").ratio(PTS)
    np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("lam", [0, 0.3, -0.5j, 0.7 + 0.7j, 1j])
def test_lambda_monotonicity(lam):
    base = make_criterion("main_harmonic_sigma", PIPE, "becker").lhs(PTS)
    fam = make_criterion("main_harmonic_sigma", PIPE.with_lambda(lam), "becker").lhs(PTS)
    assert np.all(fam <= base * (1 + 1e-12) + 1e-300)


def test_sigma_criteria_exclude_origin():
    cr = make_criterion("ahlfors_sigma", "z", "becker")
    r = sup_ratio(cr, DiskGrid(16, 64), k=0.5, refine=False)
    assert r.grid.size == DiskGrid(16, 64).size  # origin counted in size but not swept
    assert r.k_hat == 0


def test_missing_weight():
    with pytest.raises(MissingWeightError):
        make_criterion("ahlfors_sigma", "z")
    with pytest.raises(CriterionError):
        make_criterion("nonsense", "z")


def test_side_condition_on_c():
    r = check("ahlfors_c", "z", params={"c": 0.6}, k=0.5)
    assert r.side_conditions == {"|c| <= k": False}
    assert r.passed is False


def test_schwarzian_criteria_run():
    phi = "z + 0.1*z^2"
    r = check("ahlfors_schwarzian_c", phi, {"kind": "schwarzian_c", "c": [1, 0]}, k=0.9)
    assert 0 <= r.k_hat < 1
    n = check("nehari", phi, k=0.9)
    assert n.k_hat == pytest.approx(r.k_hat, rel=1e-3)  # with c = 1 both read (1-|z|^2)^2 |S|/2


def test_corollaries_run_on_pipeline():
    r = check("corollary_c", PIPE, {"kind": "schwarzian_c", "c": [1, 0]}, k=0.9)
    assert np.isfinite(r.k_hat)
    r = check("corollary_v", PIPE, {"kind": "schwarzian_v", "v": "conj(z)/(1-z*conj(z))"}, k=0.9)
    assert np.isfinite(r.k_hat)


def test_k_condition_examples():
    assert 0.7 / 1.3 == pytest.approx(0.538, abs=1e-3)
    assert k_condition_check(0.2, 0.3)
    assert not k_condition_check(0.6, 0.3)
    assert k_condition_check(0.999, 0.0)


def test_critical_point_map_fails():
    r = check("becker", "z + 0.6*z^2", k=0.1)
    assert not r.passed and r.k_hat > 0.1


def test_report_is_deterministic():
    a = check("main_harmonic_sigma", PIPE, "becker", k=0.5).to_dict()
    b = check("main_harmonic_sigma", PIPE, "becker", k=0.5).to_dict()
    assert a == b
    assert set(a) >= {"criterion", "params", "k_hat", "witness", "grid", "refinement", "omega_sup", "pass"}
