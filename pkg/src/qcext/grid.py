"""Polar sample grids for estimating suprema over the disk and the exterior."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CHUNK = 1 << 17


@dataclass(frozen=True)
class DiskGrid:
    """Polar grid on the open unit disk, clustered toward the boundary.

    Half the radii are uniform on ``(0, 1/2]``; the other half follow
    ``r_j = 1 - 2**(-1 - j*s)`` with ``s = depth / m`` so the outermost radius
    is ``1 - 2**(-1 - depth)``. Doubling ``n_radii`` and ``n_angles`` gives
    a grid containing every point of the coarser one, so sup estimates are
    non-decreasing under :meth:`refined`.
    """

    n_radii: int = 128
    n_angles: int = 512
    depth: float = 31.0
    include_origin: bool = True

    def __post_init__(self):
        if self.n_angles < 4:
            raise ValueError("n_angles must be >= 4")
        if self.n_radii < 2 or self.n_radii % 2:
            raise ValueError("n_radii must be an even number >= 2")
        if not 0 < self.depth <= 50:
            raise ValueError("depth must lie in (0, 50]")

    @property
    def max_radius(self) -> float:
        return 1.0 - 2.0 ** (-1.0 - self.depth)

    def radii(self) -> np.ndarray:
        m = self.n_radii // 2
        uniform = 0.5 * np.arange(1, m + 1) / m
        s = self.depth / m
        geometric = 1.0 - 2.0 ** (-1.0 - s * np.arange(1, m + 1))
        return np.concatenate([uniform, geometric])

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles

    def points(self, include_origin: bool | None = None) -> np.ndarray:
        """Flattened complex sample points, radius-major, origin first."""
        origin = self.include_origin if include_origin is None else include_origin
        rim = np.exp(1j * self.angles())
        pts = (self.radii()[:, None] * rim[None, :]).ravel()
        if origin:
            pts = np.concatenate([[0j], pts])
        return pts

    def refined(self) -> "DiskGrid":
        return DiskGrid(2 * self.n_radii, 2 * self.n_angles, self.depth, self.include_origin)

    @property
    def size(self) -> int:
        return self.n_radii * self.n_angles + int(self.include_origin)

    def describe(self) -> dict:
        return {"radii": self.n_radii, "angles": self.n_angles}


@dataclass(frozen=True)
class AnnulusGrid:
    """Polar grid on ``inner <= |z| <= outer`` with radii geometric in ``|z| - 1``."""

    n_radii: int = 64
    n_angles: int = 256
    inner: float = 1.0 + 1e-3
    outer: float = 8.0

    def __post_init__(self):
        if not 1.0 < self.inner < self.outer:
            raise ValueError("need 1 < inner < outer")
        if self.n_radii < 2 or self.n_angles < 4:
            raise ValueError("grid too small")

    def radii(self) -> np.ndarray:
        return 1.0 + np.geomspace(self.inner - 1.0, self.outer - 1.0, self.n_radii)

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles

    def points(self) -> np.ndarray:
        rim = np.exp(1j * self.angles())
        return (self.radii()[:, None] * rim[None, :]).ravel()

    @property
    def size(self) -> int:
        return self.n_radii * self.n_angles

    def describe(self) -> dict:
        return {"radii": self.n_radii, "angles": self.n_angles, "inner": self.inner, "outer": self.outer}


def chunked_apply(fn, points: np.ndarray, chunk: int = CHUNK) -> np.ndarray:
    """Apply a vectorised ``fn`` over ``points`` in fixed-size chunks, in order."""
    points = np.asarray(points)
    if points.size <= chunk:
        return np.asarray(fn(points))
    parts = [np.asarray(fn(points[i : i + chunk])) for i in range(0, points.size, chunk)]
    return np.concatenate(parts)


def argmax_first(values: np.ndarray) -> int:
    """Index of the maximum; ties go to the smallest index, NaNs are ignored."""
    values = np.asarray(values, dtype=float)
    if values.size == 0 or np.all(np.isnan(values)):
        raise ValueError("no finite values to reduce")
    return int(np.nanargmax(values))
