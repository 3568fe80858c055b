import numpy as np
import pytest

from qcext.grid import AnnulusGrid, DiskGrid, argmax_first, chunked_apply


def test_refined_grid_contains_coarse_points():
    g = DiskGrid(16, 64)
    fine = set(np.round(g.refined().points(), 12))
    assert all(p in fine for p in np.round(g.points(), 12))


def test_disk_grid_layout():
    g = DiskGrid(8, 16, depth=10)
    r = g.radii()
    assert np.all(np.diff(r) > 0) and r[-1] == g.max_radius == 1 - 2.0**-11
    assert g.points()[0] == 0 and g.points().size == g.size
    with pytest.raises(ValueError):
        DiskGrid(7, 16)


def test_annulus_grid():
    g = AnnulusGrid(64, 256)
    r = np.abs(g.points())
    assert r.min() == pytest.approx(1.001) and r.max() == pytest.approx(8.0)
    with pytest.raises(ValueError):
        AnnulusGrid(inner=0.9)


def test_argmax_first_ties_and_nan():
    assert argmax_first(np.array([1.0, 3.0, np.nan, 3.0])) == 1
    with pytest.raises(ValueError):
        argmax_first(np.array([np.nan]))


def test_chunked_apply_preserves_order():
    x = np.arange(1000, dtype=float)
    np.testing.assert_array_equal(chunked_apply(lambda v: v * 2, x, chunk=37), x * 2)
