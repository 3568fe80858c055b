"""Explicit reflections extending disk maps to the whole plane.

For ``|z| > 1`` every construction evaluates ``interior(zeta) + U(zeta)`` at
the reflected point ``zeta = 1/conj(z)``:

* ``ahlfors``         -- ``phi + phi'/sigma``
* ``ahlfors_weill``   -- ``E_phi``, i.e. ``phi + (1-|zeta|^2) phi' / (conj(zeta) - (1-|zeta|^2) P_phi / 2)``
* ``harmonic_lambda`` -- ``f_lam + h'/sigma + lam conj(g')/conj(sigma)``
* ``teichmuller``     -- ``f + h'/sigma + alpha conj(h')/conj(sigma)``
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import cxexpr as cx
from .criteria import CriterionReport, check as check_criterion
from .cxexpr import Expr
from .grid import DiskGrid
from .maps import HarmonicMap, ParameterError, as_map
from .weights import InadmissibleWeightError, SigmaWeight, check_admissibility, make_weight

CONSTRUCTIONS = ("ahlfors", "ahlfors_weill", "harmonic_lambda", "teichmuller")
R_MAX = 16.0

# construction -> criterion whose margin certifies it
CERTIFYING_CRITERION = {
    "ahlfors": "ahlfors_sigma",
    "ahlfors_weill": "ahlfors_sigma",
    "harmonic_lambda": "main_harmonic_sigma",
    "teichmuller": "teichmuller",
}


class ExtensionError(ValueError):
    pass


class BoundaryPointError(ExtensionError):
    """Points on the unit circle go through :func:`boundary_trace`."""


class OutOfRangeError(ExtensionError):
    pass


class NonCertifiedWarning(UserWarning):
    pass


def u_lambda_expr(h: Expr, g: Expr, sigma: Expr, lam: complex) -> Expr:
    """``h'/sigma + lam * conj(g')/conj(sigma)``."""
    hp = cx.wirtinger_dz(h)
    gp = cx.wirtinger_dz(g)
    first = cx.div(hp, sigma)
    second = cx.mul(cx.const(lam), cx.conj(cx.div(gp, sigma)))
    return cx.add(first, second)


def u_alpha_expr(h: Expr, sigma: Expr, alpha: complex) -> Expr:
    """``h'/sigma + alpha * conj(h')/conj(sigma)``."""
    hp = cx.wirtinger_dz(h)
    first = cx.div(hp, sigma)
    return cx.add(first, cx.mul(cx.const(alpha), cx.conj(first)))


def ahlfors_weill_u_expr(phi: Expr) -> Expr:
    """``(1-|z|^2) phi' / (conj(z) - (1-|z|^2) P_phi / 2)``."""
    z = cx.Z
    t = cx.sub(cx.const(1), cx.mul(z, cx.conj(z)))
    m = HarmonicMap(phi)
    denom = cx.sub(cx.conj(z), cx.mul(cx.const(0.5), cx.mul(t, m.P_h)))
    return cx.div(cx.mul(t, m.hp), denom)


@dataclass(frozen=True, eq=False)
class PlaneExtension:
    construction: str
    fmap: HarmonicMap
    weight: SigmaWeight
    interior_expr: Expr
    u_expr: Expr
    lam: Optional[complex] = None
    alpha: Optional[complex] = None
    r_max: float = R_MAX
    certified: bool = False
    report: Optional[CriterionReport] = None

    def interior(self, z):
        return cx.evaluate(self.interior_expr, z)

    def u_term(self, zeta):
        return cx.evaluate(self.u_expr, zeta)

    def exterior(self, z):
        """``interior(1/conj(z)) + U(1/conj(z))`` for ``1 < |z| <= r_max``."""
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        if np.any(r <= 1):
            raise ExtensionError("exterior formula needs |z| > 1")
        if np.any(r > self.r_max):
            raise OutOfRangeError(f"|z| exceeds r_max={self.r_max}")
        zeta = 1.0 / np.conj(z)
        f, u = cx.evaluate_many([self.interior_expr, self.u_expr], zeta)
        out = np.asarray(f) + np.asarray(u)
        return complex(out) if out.ndim == 0 else out

    def __call__(self, z):
        return evaluate_extension(self, z)

    @property
    def tag(self) -> str:
        if self.construction == "harmonic_lambda":
            return f"harmonic_lambda({self.lam})"
        if self.construction == "teichmuller":
            return f"teichmuller({self.alpha})"
        return self.construction

    def region(self, z) -> np.ndarray:
        return np.where(np.abs(z) < 1, "interior", "exterior")


def _resolve_weight(construction, fmap, weight, derivatives) -> SigmaWeight:
    if weight is None:
        weight = "ahlfors_weill" if construction == "ahlfors_weill" else "becker"
    if isinstance(weight, str):
        weight = {"kind": weight}
    return make_weight(weight, fmap=fmap, derivatives=derivatives)


def build_extension(construction: str, f, weight=None, lam=None, alpha=None, k: float | None = None,
                    grid: DiskGrid | None = None, certify: bool = True, r_max: float = R_MAX,
                    derivatives: str = "symbolic") -> PlaneExtension:
    """Construct the plane extension ``construction`` of ``f``.

    With ``certify=True`` the matching criterion is estimated on ``grid``;
    the result is ``certified`` when its margin is below ``k`` (or below 1
    when ``k`` is None). Non-certified builds are returned with a warning.
    """
    if construction not in CONSTRUCTIONS:
        raise ExtensionError(f"unknown construction {construction!r}")
    fmap = as_map(f)
    teich = construction == "teichmuller" or (construction == "harmonic_lambda" and fmap.form == "teichmuller")
    if teich:
        if fmap.form == "teichmuller":
            a = fmap.alpha if alpha is None else complex(alpha)
        elif alpha is not None:
            a = complex(alpha)
        else:
            raise ParameterError("teichmuller construction needs alpha")
        if not abs(a) < 1:
            raise ParameterError("|alpha| must be < 1")
        base = HarmonicMap.teichmuller(fmap.h, a)
    elif construction == "harmonic_lambda":
        base = HarmonicMap(fmap.h, fmap.g, 1)
    else:
        base = HarmonicMap(fmap.h)

    w = _resolve_weight(construction, base, weight, derivatives)
    if construction == "ahlfors_weill" and w.kind != "ahlfors_weill":
        raise ExtensionError("ahlfors_weill construction uses the ahlfors_weill weight")
    adm = check_admissibility(w, DiskGrid(16, 64))
    if not adm.admissible:
        cond, witness = adm.failures[0]
        raise InadmissibleWeightError(cond, witness)

    lam_v = alpha_v = None
    if teich:
        h = fmap.h
        interior = base.expr
        u = u_alpha_expr(h, w.sigma, a)
        alpha_v = a
        if construction == "harmonic_lambda":
            lam_v = 1 + 0j
    elif construction == "harmonic_lambda":
        lam_v = fmap.lam if lam is None else complex(lam)
        if abs(lam_v) > 1:
            raise ParameterError("|lambda| must be <= 1")
        interior = HarmonicMap(fmap.h, fmap.g, lam_v).expr
        u = u_lambda_expr(fmap.h, fmap.g, w.sigma, lam_v)
    elif construction == "ahlfors":
        interior = fmap.h
        u = cx.div(base.hp, w.sigma)
    else:
        interior = fmap.h
        u = ahlfors_weill_u_expr(fmap.h)

    report = None
    certified = False
    if certify:
        name = CERTIFYING_CRITERION["teichmuller" if teich else construction]
        report = check_criterion(name, base, w, k=k, grid=grid)
        certified = bool(report.passed) if k is not None else bool(report.k_hat < 1)
        if not certified:
            warnings.warn(f"{construction} extension is not certified (k_hat={report.k_hat:.6g})",
                          NonCertifiedWarning, stacklevel=2)

    return PlaneExtension(construction, fmap, w, interior, u, lam_v, alpha_v, r_max, certified, report)


def evaluate_extension(E: PlaneExtension, z):
    """Region dispatch: interior formula for ``|z| < 1``, reflection for ``|z| > 1``."""
    zz = np.asarray(z, dtype=complex)
    r = np.abs(zz)
    if np.any(r == 1):
        raise BoundaryPointError("z lies on the unit circle; use boundary_trace")
    if np.any(r > E.r_max):
        raise OutOfRangeError(f"|z| exceeds r_max={E.r_max}")
    inside = r < 1
    out = np.empty(zz.shape, dtype=complex)
    if np.any(inside):
        out[inside] = E.interior(zz[inside])
    if np.any(~inside):
        out[~inside] = E.exterior(zz[~inside])
    return complex(out) if out.ndim == 0 else out


@dataclass
class BoundaryTrace:
    theta: np.ndarray
    inner: np.ndarray
    outer: np.ndarray
    eps: float

    @property
    def gaps(self) -> np.ndarray:
        return np.abs(self.outer - self.inner)

    @property
    def gap(self) -> float:
        return float(np.max(self.gaps))

    def rows(self):
        for t, a, b, d in zip(self.theta, self.inner, self.outer, self.gaps):
            yield (t, a.real, a.imag, b.real, b.imag, d)


def boundary_trace(E: PlaneExtension, n: int = 1024, eps: float = 1e-3) -> BoundaryTrace:
    """Images of the circles ``|z| = 1 - eps`` and ``|z| = 1 + eps`` at ``n`` equispaced angles."""
    if n < 16:
        raise ExtensionError("need n >= 16")
    if not 0 < eps <= 1e-2:
        raise ExtensionError("eps must lie in (0, 1e-2]")
    theta = 2 * np.pi * np.arange(n) / n
    rim = np.exp(1j * theta)
    try:
        inner = E.interior((1 - eps) * rim)
        outer = E.exterior((1 + eps) * rim)
    except cx.EvaluationError as exc:
        t = float(np.angle(exc.point) % (2 * np.pi))
        raise ExtensionError(f"trace evaluation failed near theta={t:.6g}: {exc}") from exc
    return BoundaryTrace(theta, np.asarray(inner), np.asarray(outer), eps)


def min_separation(points) -> float:
    """Smallest distance between two distinct samples of a polyline."""
    p = np.asarray(points, dtype=complex)
    xy = np.column_stack([p.real, p.imag])
    d, _ = cKDTree(xy).query(xy, k=2)
    return float(np.min(d[:, 1]))


def is_injective_sample(points, tol: float = 1e-9) -> bool:
    return min_separation(points) > tol
