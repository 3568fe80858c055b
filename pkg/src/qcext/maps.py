"""Sense-preserving harmonic maps ``f = h + conj(g)`` of the unit disk.

The analytic and co-analytic parts are :mod:`qcext.cxexpr` trees, so the
dilatation, pre-Schwarzian and Schwarzian derivatives are built symbolically.
``P_f`` and ``S_f`` involve ``conj(omega)`` and are therefore not holomorphic;
they are still ordinary expression trees (with conj nodes) and are exposed
through :class:`PointwiseEvaluator`, which checks orientation first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import cxexpr as cx
from .cxexpr import Expr
from .grid import DiskGrid, argmax_first, chunked_apply


class MapError(ValueError):
    pass


class DegenerateMapError(MapError):
    """The analytic part has identically vanishing derivative."""


class PointError(MapError, ArithmeticError):
    def __init__(self, message: str, point: complex):
        super().__init__(f"{message} at z={complex(point)!r}")
        self.point = complex(point)


class CriticalPointError(PointError):
    """``phi'`` (or ``h'``) vanishes at an evaluation point."""


class OrientationError(PointError):
    """``|omega(z)| >= 1``: the map is not sense-preserving there."""


class NonUnivalenceError(PointError):
    """Two distinct sample points have the same image."""


class ParameterError(MapError):
    pass


def _as_complex(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _witness(z, bad) -> complex:
    zb, bb = np.broadcast_arrays(np.asarray(z), np.asarray(bad))
    return complex(zb[bb][0])


@dataclass(frozen=True, eq=False)
class HarmonicMap:
    """``f_lam = h + lam * conj(g)``; with ``lam = 1`` this is ``h + conj(g)``.

    In Teichmüller form ``f = h + alpha * conj(h)``, stored with
    ``g = conj(alpha) * h`` so that ``h + conj(g)`` is literally ``f``.
    """

    h: Expr
    g: Expr = field(default_factory=lambda: cx.ZERO)
    lam: complex = 1 + 0j
    form: str = "hg"
    alpha: complex | None = None

    def __post_init__(self):
        if self.form not in ("hg", "teichmuller"):
            raise ParameterError(f"unknown form {self.form!r}")
        object.__setattr__(self, "lam", complex(self.lam))
        if abs(self.lam) > 1:
            raise ParameterError("|lambda| must be <= 1")
        if self.form == "teichmuller":
            if self.alpha is None or not abs(self.alpha) < 1:
                raise ParameterError("teichmuller form needs |alpha| < 1")
            object.__setattr__(self, "alpha", complex(self.alpha))
        for name in ("h", "g"):
            if not cx.is_holomorphic(getattr(self, name)):
                raise ParameterError(f"{name} must be analytic (no conj)")

    # construction helpers -------------------------------------------------

    @classmethod
    def from_strings(cls, h: str, g: str = "0", lam=1) -> "HarmonicMap":
        return cls(cx.parse(h), cx.parse(g), _as_complex(lam))

    @classmethod
    def teichmuller(cls, h, alpha) -> "HarmonicMap":
        alpha = _as_complex(alpha)
        h = cx.parse(h)
        return cls(h, cx.mul(cx.const(alpha.conjugate()), h), 1, "teichmuller", alpha)

    @classmethod
    def from_spec(cls, spec: dict) -> "HarmonicMap":
        """Build from a map spec ``{"h", "g" | "alpha", "lambda", "form"}``."""
        form = spec.get("form", "hg")
        if form == "teichmuller":
            return cls.teichmuller(spec["h"], spec.get("alpha", 0))
        return cls.from_strings(spec["h"], spec.get("g", "0"), spec.get("lambda", 1))

    def to_spec(self) -> dict:
        if self.form == "teichmuller":
            return {"form": "teichmuller", "h": cx.to_text(self.h), "alpha": [self.alpha.real, self.alpha.imag]}
        return {"form": "hg", "h": cx.to_text(self.h), "g": cx.to_text(self.g), "lambda": [self.lam.real, self.lam.imag]}

    def with_lambda(self, lam) -> "HarmonicMap":
        """The family member ``h + lam * conj(g)`` (relative to the base ``g``)."""
        lam = _as_complex(lam)
        if self.form == "teichmuller":
            raise ParameterError("lambda family is defined for hg-form maps")
        return HarmonicMap(self.h, self.g, lam)

    # symbolic derivatives ------------------------------------------------

    @cached_property
    def g_eff(self) -> Expr:
        """Co-analytic part of the represented map: ``conj(lam) * g``."""
        return cx.mul(cx.const(self.lam.conjugate()), self.g)

    @cached_property
    def expr(self) -> Expr:
        return cx.add(self.h, cx.conj(self.g_eff))

    @cached_property
    def hp(self) -> Expr:
        d = cx.wirtinger_dz(self.h)
        if isinstance(d, cx.Const) and d.value == 0:
            raise DegenerateMapError("h' vanishes identically")
        return d

    @cached_property
    def hpp(self) -> Expr:
        return cx.wirtinger_dz(self.hp)

    @cached_property
    def gp(self) -> Expr:
        return cx.wirtinger_dz(self.g_eff)

    @cached_property
    def gpp(self) -> Expr:
        return cx.wirtinger_dz(self.gp)

    @cached_property
    def omega(self) -> Expr:
        return cx.div(self.gp, self.hp)

    @cached_property
    def omega_base(self) -> Expr:
        return cx.div(cx.wirtinger_dz(self.g), self.hp)

    @cached_property
    def omega_p(self) -> Expr:
        return cx.wirtinger_dz(self.omega)

    @cached_property
    def omega_pp(self) -> Expr:
        return cx.wirtinger_dz(self.omega_p)

    @cached_property
    def P_h(self) -> Expr:
        return cx.div(self.hpp, self.hp)

    @cached_property
    def S_h(self) -> Expr:
        return cx.sub(cx.wirtinger_dz(self.P_h), cx.mul(cx.const(0.5), cx.power(self.P_h, 2)))

    @cached_property
    def _dil_term(self) -> Expr:
        # conj(omega) * omega' / (1 - |omega|^2)
        w = self.omega
        return cx.div(cx.mul(cx.conj(w), self.omega_p), cx.sub(cx.const(1), cx.mul(w, cx.conj(w))))

    @cached_property
    def P_f(self) -> Expr:
        return cx.sub(self.P_h, self._dil_term)

    @cached_property
    def S_f(self) -> Expr:
        w = self.omega
        one_minus = cx.sub(cx.const(1), cx.mul(w, cx.conj(w)))
        middle = cx.mul(
            cx.div(cx.conj(w), one_minus),
            cx.sub(cx.mul(self.P_h, self.omega_p), self.omega_pp),
        )
        last = cx.mul(cx.const(1.5), cx.power(self._dil_term, 2))
        return cx.sub(cx.add(self.S_h, middle), last)

    # pointwise checks ----------------------------------------------------

    def check_points(self, z, orientation: bool = True) -> None:
        """Raise at the first point where ``h' = 0`` or ``|omega| >= 1``."""
        hp = np.asarray(cx.evaluate(self.hp, z))
        bad = hp == 0
        if np.any(bad):
            raise CriticalPointError("h' vanishes", _witness(z, bad))
        if orientation:
            w = np.asarray(cx.evaluate(self.omega, z))
            bad = ~(np.abs(w) < 1)
            if np.any(bad):
                raise OrientationError("|omega| >= 1", _witness(z, bad))

    def __call__(self, z):
        return cx.evaluate(self.expr, z)


class PointwiseEvaluator:
    """Evaluates a (possibly non-holomorphic) expression attached to a map.

    Calling it checks the map's orientation at the requested points first.
    """

    def __init__(self, expr: Expr, fmap: HarmonicMap | None = None, name: str = ""):
        self.expr = expr
        self.fmap = fmap
        self.name = name

    def __call__(self, z):
        if self.fmap is not None:
            self.fmap.check_points(z)
        return cx.evaluate(self.expr, z)

    def __repr__(self):
        return f"PointwiseEvaluator({self.name or cx.to_text(self.expr)})"


def as_map(f) -> HarmonicMap:
    """Accept a map, a map-spec dict, or an analytic expression string."""
    if isinstance(f, HarmonicMap):
        return f
    if isinstance(f, dict):
        return HarmonicMap.from_spec(f)
    if isinstance(f, (str, Expr)):
        return HarmonicMap(cx.parse(f))
    raise TypeError(f"cannot interpret {type(f).__name__} as a harmonic map")


# --------------------------------------------------------------------------
# operations


def dilatation(f: HarmonicMap, effective: bool = True) -> Expr:
    """Second complex dilatation ``g'/h'``.

    With ``effective=True`` the dilatation of the represented map
    ``h + lam*conj(g)`` is returned, i.e. ``conj(lam) * omega``.
    """
    return f.omega if effective else f.omega_base


def _require_analytic(phi) -> Expr:
    phi = cx.parse(phi)
    if not cx.is_holomorphic(phi):
        raise ParameterError("phi must be analytic (no conj)")
    return phi


def pre_schwarzian_analytic(phi) -> Expr:
    phi = _require_analytic(phi)
    return HarmonicMap(phi).P_h


def schwarzian_analytic(phi) -> Expr:
    phi = _require_analytic(phi)
    return HarmonicMap(phi).S_h


def check_locally_univalent(phi, z) -> None:
    """Raise :class:`CriticalPointError` where ``phi'`` vanishes."""
    HarmonicMap(_require_analytic(phi)).check_points(z, orientation=False)


def harmonic_pre_schwarzian(f: HarmonicMap) -> PointwiseEvaluator:
    return PointwiseEvaluator(f.P_f, f, "P_f")


def harmonic_schwarzian(f: HarmonicMap) -> PointwiseEvaluator:
    return PointwiseEvaluator(f.S_f, f, "S_f")


def jacobian(f: HarmonicMap, z):
    hp, gp = cx.evaluate_many([f.hp, f.gp], z)
    return np.abs(hp) ** 2 - np.abs(gp) ** 2


def check_sense_preserving(f: HarmonicMap, grid: DiskGrid | None = None) -> float:
    """Verify ``|g'| < |h'|`` on the grid; return the grid sup of ``|omega|``."""
    grid = grid or DiskGrid()
    pts = grid.points()

    def chunk(z):
        f.check_points(z)
        return np.abs(cx.evaluate(f.omega, z))

    return float(np.max(chunked_apply(chunk, pts)))


def omega_sup(f: HarmonicMap, grid: DiskGrid | None = None) -> float:
    return check_sense_preserving(f, grid)


def _check_disk_param(a, name="a") -> complex:
    a = _as_complex(a)
    if not abs(a) < 1:
        raise ParameterError(f"|{name}| must be < 1")
    return a


def affine_transform(f: HarmonicMap, a) -> HarmonicMap:
    """``f + a*conj(f) = (h + a g) + conj(g + conj(a) h)`` for ``|a| < 1``."""
    a = _check_disk_param(a)
    if a == 0:
        return f
    h_a = cx.add(f.h, cx.mul(cx.const(a), f.g_eff))
    g_a = cx.add(f.g_eff, cx.mul(cx.const(a.conjugate()), f.h))
    return HarmonicMap(h_a, g_a)


def disk_automorphism(a, w):
    """``(conj(a) + w) / (1 + a w)``."""
    a = complex(a)
    return (a.conjugate() + w) / (1 + a * w)


def dilatation_term(f: HarmonicMap, z):
    """``|omega'(z)| / (1 - |omega(z)|^2)``."""
    w, wp = cx.evaluate_many([f.omega, f.omega_p], z)
    return np.abs(wp) / (1 - np.abs(w) ** 2)


def mobius_bound_check(epsilon, z) -> tuple[float, float, float]:
    """Bounds on ``|T(z)|`` for ``T(z) = (z + |eps|) / (1 + |eps| z)``."""
    epsilon, z = complex(epsilon), complex(z)
    if not (abs(epsilon) < 1 and abs(z) < 1):
        raise ParameterError("epsilon and z must lie in the unit disk")
    e, r = abs(epsilon), abs(z)
    value = abs((z + e) / (1 + e * z))
    lower = abs(e - r) / (1 - e * r)
    upper = (e + r) / (1 + e * r)
    return lower, value, upper


def delta_univalence_radius(k: float, omega_sup: float) -> float:
    """``(1 + k w) / (k + w)``: radius in ``a`` for which ``h + a g`` stays univalent."""
    if not (0 <= k < 1 and 0 <= omega_sup < 1):
        raise ParameterError("need 0 <= k < 1 and 0 <= omega_sup < 1")
    if k + omega_sup == 0:
        return float("inf")
    delta = (1 + k * omega_sup) / (k + omega_sup)
    assert delta > 1
    if omega_sup > 0:
        assert delta <= 1 / omega_sup * (1 + 1e-15)
    return delta


def divided_difference_sup(f: HarmonicMap, samples: int = 64, radius: float = 1 - 1e-9) -> float:
    """Max of ``|g(a) - g(b)| / |h(a) - h(b)|`` over sampled boundary pairs."""
    if samples < 2:
        raise ParameterError("need at least two samples")
    pts = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    hv, gv = cx.evaluate_many([f.h, f.g_eff], pts)
    dh = hv[:, None] - hv[None, :]
    dg = gv[:, None] - gv[None, :]
    off = ~np.eye(samples, dtype=bool)
    bad = off & (dh == 0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise NonUnivalenceError(f"h({pts[i]!r}) == h({pts[j]!r})", pts[i])
    ratio = np.abs(dg[off]) / np.abs(dh[off])
    return float(np.max(ratio))


def sup_norm(expr_fn, grid: DiskGrid, power: int = 1) -> tuple[float, complex]:
    """Grid sup of ``|expr(z)| (1 - |z|^2)^power`` and its witness."""
    pts = grid.points()

    def chunk(z):
        return np.abs(expr_fn(z)) * (1 - np.abs(z) ** 2) ** power

    vals = chunked_apply(chunk, pts)
    i = argmax_first(vals)
    return float(vals[i]), complex(pts[i])


def pre_schwarzian_norm(phi, grid: DiskGrid | None = None) -> float:
    """Grid estimate of ``sup (1-|z|^2) |P_phi|``."""
    P = pre_schwarzian_analytic(phi)
    return sup_norm(lambda z: cx.evaluate(P, z), grid or DiskGrid(), 1)[0]


def schwarzian_norm(phi, grid: DiskGrid | None = None) -> float:
    """Grid estimate of ``sup (1-|z|^2)^2 |S_phi|``."""
    S = schwarzian_analytic(phi)
    return sup_norm(lambda z: cx.evaluate(S, z), grid or DiskGrid(), 2)[0]
