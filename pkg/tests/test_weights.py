import json

import numpy as np
import pytest

from qcext import cxexpr as cx
from qcext.grid import DiskGrid
from qcext.maps import HarmonicMap
from qcext.weights import (
    InadmissibleWeightError, MissingMapContextError, WeightError, blowup_samples,
    check_admissibility, load_weight_spec, make_weight,
)

Z = DiskGrid(32, 128, depth=9.0).points(include_origin=False)
T = 1 - np.abs(Z) ** 2
PIPE = HarmonicMap.from_strings("z+0.15*z^2", "0.1*z^2")


def test_becker_value_and_identities():
    w = make_weight("becker")
    assert w(0.5 + 0j) == pytest.approx(2 / 3)
    s, sz, szb = w.evaluate(Z)
    assert np.max(np.abs(s**2 - sz)) <= 1e-12 * np.max(np.abs(s) ** 2)
    np.testing.assert_allclose(szb, 1 / T**2, rtol=1e-12)


def test_catalog_closed_forms_match_symbolic_differentiation():
    for w in (make_weight("becker"), make_weight({"kind": "ahlfors_c", "c": [0.3, -0.2]})):
        _, sz, szb = w.evaluate(Z)
        np.testing.assert_allclose(sz, cx.evaluate(cx.wirtinger_dz(w.sigma), Z), rtol=1e-12)
        np.testing.assert_allclose(szb, cx.evaluate(cx.wirtinger_dzbar(w.sigma), Z), rtol=1e-12)


@pytest.mark.parametrize("c", [0.5, 0.3 - 0.2j, -0.4j])
def test_ahlfors_c_identity(c):
    w = make_weight({"kind": "ahlfors_c", "c": [c.real, c.imag]})
    s, sz, szb = w.evaluate(Z)
    ref = c * (c + 1) * np.conj(Z) ** 2 / T**2
    assert np.all(np.abs(s**2 - sz - ref) <= 1e-12 * np.maximum(1, np.abs(ref)))
    np.testing.assert_allclose(szb, (c + 1) / T**2, rtol=1e-12)


def test_ahlfors_c_zero_is_becker():
    a, b = make_weight({"kind": "ahlfors_c", "c": [0, 0]}), make_weight("becker")
    for x, y in zip(a.evaluate(Z), b.evaluate(Z)):
        np.testing.assert_array_equal(x, y)


def test_ahlfors_weill_identity_map_is_becker():
    a = make_weight("ahlfors_weill", fmap=HarmonicMap.from_strings("z"))
    np.testing.assert_allclose(a(Z), make_weight("becker")(Z), rtol=1e-15)


def test_map_dependent_needs_map():
    with pytest.raises(MissingMapContextError):
        make_weight("ahlfors_weill")
    with pytest.raises(WeightError):
        make_weight("schwarzian_v", fmap=PIPE)


def test_fd_derivatives_are_second_order():
    w = make_weight({"kind": "schwarzian_c", "c": [0.3, 0]}, fmap=PIPE)
    z0 = 0.3 + 0.2j
    exact = cx.evaluate_many([w.sigma_z, w.sigma_zbar], z0)
    f = lambda x: cx.evaluate(w.sigma, x)
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        d = cx.fd_wirtinger(f, z0, h)
        errs.append(max(abs(d[0] - exact[0]), abs(d[1] - exact[1])))
    for e1, e2 in zip(errs, errs[1:]):
        assert e1 / e2 > 3.5  # order 2 gives 4


def test_fd_mode_close_to_symbolic():
    sym = make_weight("ahlfors_weill", fmap=PIPE)
    fd = make_weight("ahlfors_weill", fmap=PIPE, derivatives="fd")
    pts = DiskGrid(8, 32, depth=4, include_origin=False).points()
    for a, b in zip(sym.evaluate(pts), fd.evaluate(pts)):
        assert np.all(np.abs(a - b) <= 1e-6 * np.maximum(1, np.abs(a)))


def test_becker_admissible_and_blows_up():
    rep = check_admissibility(make_weight("becker"))
    assert rep.admissible
    g = blowup_samples(make_weight("becker"))
    j = np.arange(1, 21)
    r = 1 - 2.0**-j
    np.testing.assert_allclose(g[:, 0], r / (1 - r**2), rtol=1e-12)
    assert g[-1, 0] > 1e5


def test_bounded_custom_weights_fail_condition_ii():
    for sigma in ("z", "conj(z)"):
        w = make_weight({"kind": "custom", "sigma": sigma}, check=False)
        rep = check_admissibility(w)
        assert not rep.condition_ii
        assert rep.condition_i
    rep = check_admissibility(make_weight({"kind": "custom", "sigma": "conj(z)"}, check=False))
    assert rep.condition_iii


def test_custom_inadmissible_raises_with_condition():
    with pytest.raises(InadmissibleWeightError) as info:
        make_weight({"kind": "custom", "sigma": "z"})
    assert info.value.condition == "ii"


def test_custom_with_explicit_derivatives():
    spec = {"kind": "custom", "sigma": "conj(z)/(1-z*conj(z))",
            "sigma_z": "conj(z)^2/(1-z*conj(z))^2", "sigma_zbar": "1/(1-z*conj(z))^2"}
    w = make_weight(spec)
    for a, b in zip(w.evaluate(Z), make_weight("becker").evaluate(Z)):
        np.testing.assert_allclose(a, b, rtol=1e-12)
    assert w.to_spec() == spec


def test_load_weight_spec(tmp_path):
    spec = {"kind": "ahlfors_c", "c": [0.2, 0.1]}
    p = tmp_path / "w.json"
    p.write_text(json.dumps(spec))
    assert load_weight_spec(str(p)) == spec
    assert load_weight_spec(json.dumps(spec)) == spec
    assert make_weight(spec).to_spec() == spec


def test_unknown_kind():
    with pytest.raises(WeightError):
        make_weight("gaussian")
