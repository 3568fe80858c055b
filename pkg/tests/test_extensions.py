import warnings

import numpy as np
import pytest

from qcext import cxexpr as cx
from qcext.extensions import (
    BoundaryPointError, ExtensionError, NonCertifiedWarning, OutOfRangeError, boundary_trace,
    build_extension, evaluate_extension, is_injective_sample, u_alpha_expr, u_lambda_expr,
)
from qcext.grid import AnnulusGrid, DiskGrid
from qcext.maps import HarmonicMap, ParameterError
from qcext.weights import InadmissibleWeightError
from _corpus import SUITE, suite_extension

EXT = AnnulusGrid(64, 256).points()
EXT4 = AnnulusGrid(32, 128, outer=4.0).points()
INT = DiskGrid(16, 64, depth=9).points()
PIPE = HarmonicMap.from_strings("z+0.15*z^2", "0.1*z^2")


def test_ahlfors_weill_identity():
    E = build_extension("ahlfors_weill", "z")
    assert np.max(np.abs(E(EXT4) - EXT4)) < 1e-12
    assert E(2 + 1j) == pytest.approx(2 + 1j, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.6 + 0.2j])
def test_affine_teichmuller_is_exact(alpha):
    E = build_extension("teichmuller", HarmonicMap.teichmuller("z", alpha), "becker")
    z = np.concatenate([INT, EXT])
    assert np.max(np.abs(E(z) - (z + alpha * np.conj(z)))) < 1e-12


def test_teichmuller_value_at_3i():
    E = build_extension("teichmuller", HarmonicMap.teichmuller("z", 0.3), "becker")
    assert E(3j) == pytest.approx(2.1j, abs=1e-14)


def test_lambda_zero_equals_analytic_extension():
    a = build_extension("harmonic_lambda", PIPE.with_lambda(0), "becker")
    b = build_extension("ahlfors", PIPE.h, "becker")
    np.testing.assert_array_equal(a(EXT), b(EXT))
    np.testing.assert_array_equal(a(INT), b(INT))


def test_alpha_zero_collapses_to_ahlfors():
    a = build_extension("teichmuller", HarmonicMap.teichmuller("z+0.15*z^2", 0), "becker")
    b = build_extension("ahlfors", "z+0.15*z^2", "becker")
    assert np.max(np.abs(a(EXT) - b(EXT))) < 1e-12


def test_interior_is_f_lambda():
    E = build_extension("harmonic_lambda", PIPE.with_lambda(0.5j), "becker")
    np.testing.assert_array_equal(E(INT), PIPE.with_lambda(0.5j)(INT))


@pytest.mark.parametrize("entry", SUITE)
def test_reflection_identity(entry):
    E = suite_extension(entry)
    zeta = 1 / np.conj(EXT)
    fresh = cx.evaluate(E.interior_expr, zeta)
    if E.alpha is not None:
        U = cx.evaluate(u_alpha_expr(E.fmap.h, E.weight.sigma, E.alpha), zeta)
    elif E.construction == "harmonic_lambda":
        U = cx.evaluate(u_lambda_expr(E.fmap.h, E.fmap.g, E.weight.sigma, E.lam), zeta)
    else:
        U = cx.evaluate(E.u_expr, zeta)
    assert np.max(np.abs(E(EXT) - (fresh + U))) < 1e-12


def test_teichmuller_form_with_lambda_construction_uses_alpha_form():
    f = HarmonicMap.teichmuller("z", 0.2 + 0.3j)
    a = build_extension("harmonic_lambda", f, "becker")
    b = build_extension("teichmuller", f, "becker")
    np.testing.assert_array_equal(a(EXT), b(EXT))


def test_lambda_form_matches_alpha_form_when_g_is_conj_alpha_h():
    # h + conj(g) with g = conj(alpha) h is the map h + alpha conj(h); U_lambda then equals U_alpha
    a = 0.2 + 0.3j
    t = build_extension("teichmuller", HarmonicMap.teichmuller("z+0.1*z^2", a), "becker")
    g = f"({a.real}-{a.imag}i)*(z+0.1*z^2)"
    lam = build_extension("harmonic_lambda", HarmonicMap.from_strings("z+0.1*z^2", g, 1), "becker")
    assert np.max(np.abs(t(EXT) - lam(EXT))) < 1e-12
    # with g = alpha h the represented map uses conj(alpha), so the two differ
    other = build_extension("harmonic_lambda", HarmonicMap.from_strings("z+0.1*z^2", f"({a.real}+{a.imag}i)*(z+0.1*z^2)", 1), "becker")
    assert np.max(np.abs(t(EXT) - other(EXT))) > 1e-3


def test_region_errors():
    E = build_extension("ahlfors_weill", "z")
    with pytest.raises(BoundaryPointError):
        E(1j)
    with pytest.raises(OutOfRangeError):
        E(20 + 0j)
    with pytest.raises(ExtensionError):
        build_extension("spiral", "z")


def test_parameter_errors():
    with pytest.raises(ParameterError):
        build_extension("teichmuller", "z", "becker")
    with pytest.raises(ParameterError):
        build_extension("teichmuller", "z", "becker", alpha=1.0)


def test_inadmissible_weight_rejected():
    with pytest.raises(InadmissibleWeightError):
        build_extension("ahlfors", "z", {"kind": "custom", "sigma": "conj(z)"})


def test_non_certified_warns_and_is_stamped():
    with pytest.warns(NonCertifiedWarning):
        E = build_extension("ahlfors", "z + 0.45*z^2", "becker", k=0.1)
    assert not E.certified


@pytest.mark.parametrize("entry", SUITE)
def test_suite_is_certified(entry):
    with warnings.catch_warnings():
        warnings.simplefilter("error", NonCertifiedWarning)
        assert suite_extension(entry).certified


def test_identity_trace_on_circles():
    eps = 1e-3
    tr = boundary_trace(build_extension("ahlfors_weill", "z"), 1024, eps)
    np.testing.assert_allclose(np.abs(tr.inner), 1 - eps, rtol=1e-14)
    np.testing.assert_allclose(np.abs(tr.outer), 1 + eps, rtol=1e-12)
    assert tr.gap <= 2 * eps + 1e-15


def test_affine_trace_is_ellipse():
    alpha, eps = 0.3, 1e-3
    tr = boundary_trace(build_extension("teichmuller", HarmonicMap.teichmuller("z", alpha), "becker"), 1024, eps)
    t = tr.theta
    x = (1 - eps) * (1 + alpha) * np.cos(t)
    y = (1 - eps) * (1 - alpha) * np.sin(t)
    np.testing.assert_allclose(tr.inner, x + 1j * y, atol=1e-14)


@pytest.mark.parametrize("entry", SUITE)
def test_continuity_gap_shrinks_linearly(entry):
    E = suite_extension(entry)
    gaps = [boundary_trace(E, 1024, e).gap for e in (1e-2, 5e-3, 2.5e-3, 1.25e-3)]
    for g1, g2 in zip(gaps, gaps[1:]):
        assert g2 < g1
        assert g2 / g1 <= 0.5 * 1.01


@pytest.mark.parametrize("entry", SUITE)
def test_trace_injective_sampling(entry):
    tr = boundary_trace(suite_extension(entry), 4096, 1e-3)
    assert is_injective_sample(tr.inner) and is_injective_sample(tr.outer)


def test_trace_rejects_bad_eps():
    E = build_extension("ahlfors_weill", "z")
    with pytest.raises(ExtensionError):
        boundary_trace(E, 1024, 0.5)


def test_evaluate_extension_scalar():
    E = build_extension("ahlfors_weill", "z")
    assert isinstance(evaluate_extension(E, 0.5 + 0j), complex)
