import re

import numpy as np

from qcext import HarmonicMap, build_extension
from qcext.render import INTERIOR_RADII, circle_images, render_svg

RADII = list(INTERIOR_RADII) + [1 / r for r in INTERIOR_RADII]


def test_identity_circles_stay_circles():
    E = build_extension("ahlfors_weill", "z")
    for r, (_, pts) in zip(RADII, circle_images(E)):
        np.testing.assert_allclose(np.abs(pts), r, rtol=1e-12)


def test_affine_ellipses():
    a = 0.3
    E = build_extension("teichmuller", HarmonicMap.teichmuller("z", a), "becker")
    for r, (_, pts) in zip(RADII, circle_images(E)):
        x, y = pts.real / (r * (1 + a)), pts.imag / (r * (1 - a))
        np.testing.assert_allclose(x**2 + y**2, 1, rtol=1e-12)


def test_svg_structure_and_viewbox():
    E = build_extension("ahlfors_weill", "z")
    svg = render_svg(E)
    assert svg.count("<path") == 10
    vb = [float(v) for v in re.search(r'viewBox="([^"]+)"', svg).group(1).split()]
    # outermost exterior circle has radius 5
    assert vb[0] < -5 and vb[0] + vb[2] > 5
    assert svg == render_svg(E)
    n = len(re.search(r'd="([^"]+)"', svg).group(1).split(" L"))
    assert n == 1024
