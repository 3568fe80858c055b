"""Input checks shared by the estimator facade."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_points(X) -> np.ndarray:
    """Return sample points as a flat complex array.

    Accepts complex array-likes of any shape, or a real ``(n, 2)`` array of
    ``(x, y)`` pairs. Non-finite entries are rejected.
    """
    arr = np.asarray(X)
    if np.iscomplexobj(arr):
        arr = arr.astype(complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("points must be finite")
        return arr
    if arr.ndim == 2 and arr.shape[1] == 2:
        xy = check_array(arr, dtype=np.float64, ensure_all_finite=True)
        return xy[:, 0] + 1j * xy[:, 1]
    arr = check_array(np.atleast_1d(arr).reshape(-1, 1), dtype=np.float64, ensure_all_finite=True)
    return arr[:, 0].astype(complex)


def check_unit_interval(value, name: str, closed_right: bool = False) -> float:
    v = float(value)
    ok = 0 <= v <= 1 if closed_right else 0 <= v < 1
    if not ok:
        raise ValueError(f"{name} must lie in [0, 1{']' if closed_right else ')'}, got {v}")
    return v


def check_disk_param(value, name: str, closed: bool = False):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        value = complex(float(value[0]), float(value[1]))
    v = complex(value)
    if abs(v) > 1 or (not closed and abs(v) == 1):
        raise ValueError(f"|{name}| out of range: {v}")
    return v
