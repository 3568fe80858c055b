"""Univalence and quasiconformal-extension criteria as pointwise ratio fields.

Every criterion is an inequality ``lhs(z) <= k * rhs(z)`` over the disk.
:func:`sup_ratio` estimates ``k_hat = sup lhs/rhs`` on a refining
:class:`~qcext.grid.DiskGrid` and compares it with a target margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import cxexpr as cx
from .grid import DiskGrid, argmax_first, chunked_apply
from .maps import HarmonicMap, OrientationError, PointError, as_map
from .weights import SigmaWeight, make_weight

GUARD = 1e-9
OMEGA_BAND = 1e-12
REFINE_TOL = 1e-4
REFINE_CAP = (1024, 4096)

# name -> (needs sigma weight, needs v-function, needs c, harmonic)
CATALOG = {
    "becker": (False, False, False, False),
    "nehari": (False, False, False, False),
    "ahlfors_sigma": (True, False, False, False),
    "ahlfors_c": (False, False, True, False),
    "ahlfors_schwarzian_v": (False, True, False, False),
    "ahlfors_schwarzian_c": (False, False, True, False),
    "hm_harmonic": (False, False, False, True),
    "bravo_c": (False, False, True, True),
    "main_harmonic_sigma": (True, False, False, True),
    "corollary_v": (False, True, False, True),
    "corollary_c": (False, False, True, True),
    "teichmuller": (True, False, False, False),
}

# criteria whose c must satisfy |c| <= k, resp. |c - 1| <= k
_C_NEAR_ZERO = ("ahlfors_c", "bravo_c")
_C_NEAR_ONE = ("ahlfors_schwarzian_c", "corollary_c")


class CriterionError(ValueError):
    pass


class MissingWeightError(CriterionError):
    pass


class DegenerateNormalizerError(PointError):
    """The right-hand side vanishes at a sample point."""


class CriterionEvaluationError(PointError):
    pass


@dataclass(eq=False)
class Criterion:
    name: str
    fmap: HarmonicMap
    lhs_rhs: Callable
    weight: Optional[SigmaWeight] = None
    params: dict = field(default_factory=dict)
    uses_weight: bool = False
    harmonic: bool = False

    def evaluate(self, z):
        """``(lhs, rhs, keep)``; ``keep`` masks out near-degenerate ``|omega| ~ 1`` points."""
        return self.lhs_rhs(np.asarray(z, dtype=complex))

    def lhs(self, z):
        return self.evaluate(z)[0]

    def rhs(self, z):
        return self.evaluate(z)[1]

    def ratio(self, z):
        lhs, rhs, keep = self.evaluate(z)
        with np.errstate(all="ignore"):
            out = lhs / rhs
        return np.where(keep, out, np.nan)

    def side_conditions(self, k: float) -> dict:
        c = complex(self.params.get("c", 0))
        out = {}
        if self.name in _C_NEAR_ZERO:
            out["|c| <= k"] = bool(abs(c) <= k + GUARD)
        elif self.name in _C_NEAR_ONE:
            out["|c-1| <= k"] = bool(abs(c - 1) <= k + GUARD)
        return out

    def describe_params(self) -> dict:
        out = {}
        for key, value in self.params.items():
            if isinstance(value, complex):
                out[key] = [value.real, value.imag]
            else:
                out[key] = value
        if self.weight is not None:
            out["weight"] = self.weight.to_spec()
        return out


def _c_param(params: dict, weight: Optional[SigmaWeight]) -> complex:
    if "c" in params:
        c = params["c"]
        if isinstance(c, (list, tuple)):
            return complex(float(c[0]), float(c[1]))
        return complex(c)
    if weight is not None and weight.kind in ("ahlfors_c", "schwarzian_c"):
        return weight.c
    return 0j


def _v_exprs(weight: Optional[SigmaWeight]):
    if weight is None:
        raise MissingWeightError("criterion needs a v-function (schwarzian_v, schwarzian_c or ahlfors_weill weight)")
    if weight.v is None:
        raise MissingWeightError(f"weight {weight.kind!r} carries no v-function")
    return weight.v_derivatives()


def make_criterion(name: str, f, weight=None, params: dict | None = None) -> Criterion:
    """Wire ``lhs`` and ``rhs`` for catalog criterion ``name`` on map ``f``.

    Analytic criteria apply to ``phi = h``; harmonic ones use ``P_f``,
    ``S_f`` and ``omega`` of the represented map.
    """
    if name not in CATALOG:
        raise CriterionError(f"unknown criterion {name!r}")
    fmap = as_map(f)
    params = dict(params or {})
    needs_sigma, needs_v, needs_c, harmonic = CATALOG[name]
    if weight is not None and not isinstance(weight, SigmaWeight):
        weight = make_weight(weight, fmap=fmap)
    if needs_sigma and weight is None:
        raise MissingWeightError(f"criterion {name!r} needs a weight")
    if needs_c:
        params["c"] = _c_param(params, weight)
    c = complex(params.get("c", 0))

    exprs = {"hp": fmap.hp, "P_h": fmap.P_h}
    if name in ("nehari", "ahlfors_schwarzian_v", "ahlfors_schwarzian_c"):
        exprs["S_h"] = fmap.S_h
    if harmonic:
        exprs.update(omega=fmap.omega, omega_p=fmap.omega_p, P_f=fmap.P_f)
        if name in ("corollary_v", "corollary_c"):
            exprs["S_f"] = fmap.S_f
    if needs_v:
        v, vz, vzb = _v_exprs(weight)
        exprs.update(v=v, v_z=vz, v_zbar=vzb)
    names = list(exprs)
    values = list(exprs.values())

    def lhs_rhs(z):
        with np.errstate(all="ignore"):
            try:
                d = dict(zip(names, cx.evaluate_many(values, z)))
                if needs_sigma:
                    d["sigma"], d["sigma_z"], d["sigma_zbar"] = (np.asarray(a) for a in weight.evaluate(z))
            except cx.EvaluationError as exc:
                raise CriterionEvaluationError(f"{name}: {exc}", exc.point) from exc
            bad = d["hp"] == 0
            if np.any(bad):
                raise CriterionEvaluationError(f"{name}: h' vanishes", complex(z[bad][0]))
            keep = np.ones(z.shape, dtype=bool)
            if harmonic:
                aw = np.abs(d["omega"])
                if np.any(aw >= 1):
                    raise OrientationError("|omega| >= 1", complex(z[aw >= 1][0]))
                keep = (1 - aw**2) >= OMEGA_BAND
            lhs, rhs = _FORMULAS[name](d, z, c)
        return np.asarray(lhs, dtype=float), np.broadcast_to(np.asarray(rhs, dtype=float), z.shape), keep

    return Criterion(name, fmap, lhs_rhs, weight, params, needs_sigma, harmonic)


# --------------------------------------------------------------------------
# the printed inequalities, one function each: (fields, z, c) -> (lhs, rhs)


def _t(z):
    return 1 - np.abs(z) ** 2


def _dil(d):
    return d["omega_p"] / (1 - np.abs(d["omega"]) ** 2)


def _becker(d, z, c):
    return _t(z) * np.abs(d["P_h"]), 1.0


def _nehari(d, z, c):
    return _t(z) ** 2 * np.abs(d["S_h"]), 2.0


def _ahlfors_sigma(d, z, c, P="P_h"):
    s = d["sigma"]
    return np.abs(s * d[P] + s**2 - d["sigma_z"]), np.abs(d["sigma_zbar"])


def _ahlfors_c(d, z, c):
    return np.abs(c * np.abs(z) ** 2 + _t(z) * z * d["P_h"]), 1.0


def _ahlfors_schwarzian_v(d, z, c):
    return np.abs(0.5 * d["S_h"] + d["v"] ** 2 - d["v_z"]), np.abs(d["v_zbar"])


def _ahlfors_schwarzian_c(d, z, c):
    return np.abs(0.5 * d["S_h"] * _t(z) ** 2 - c * (1 - c) * np.conj(z)), abs(c)


def _hm_harmonic(d, z, c):
    t = _t(z)
    return t * np.abs(d["P_f"]) + np.abs(d["omega_p"] * t) / (1 - np.abs(d["omega"]) ** 2), 1.0


def _bravo_c(d, z, c):
    t = _t(z)
    first = np.abs(c * np.abs(z) ** 2 + t * z * d["P_f"])
    return first + np.abs(z * d["omega_p"] * t) / (1 - np.abs(d["omega"]) ** 2), 1.0


def _main_harmonic_sigma(d, z, c):
    s = d["sigma"]
    first = np.abs(s * d["P_f"] + s**2 - d["sigma_z"])
    return first + np.abs(s * d["omega_p"]) / (1 - np.abs(d["omega"]) ** 2), np.abs(d["sigma_zbar"])


def _corollary_v(d, z, c):
    first = np.abs(0.5 * d["S_f"] + d["v"] ** 2 - d["v_z"])
    second = np.abs((d["v"] - d["P_f"]) * _dil(d))
    return first + second, np.abs(d["v_zbar"] - np.conj(d["P_f"]))


def _corollary_c(d, z, c):
    t = _t(z)
    first = np.abs(0.5 * d["S_f"] * t**2 - c * (1 - c) * np.conj(z))
    second = np.abs((c * np.conj(z) * t - 0.5 * d["P_f"] * t**2) * _dil(d))
    return first + second, np.abs(c - np.conj(d["P_f"]) * t**2)


def _teichmuller(d, z, c):
    return _ahlfors_sigma(d, z, c, "P_h")


_FORMULAS = {
    "becker": _becker,
    "nehari": _nehari,
    "ahlfors_sigma": _ahlfors_sigma,
    "ahlfors_c": _ahlfors_c,
    "ahlfors_schwarzian_v": _ahlfors_schwarzian_v,
    "ahlfors_schwarzian_c": _ahlfors_schwarzian_c,
    "hm_harmonic": _hm_harmonic,
    "bravo_c": _bravo_c,
    "main_harmonic_sigma": _main_harmonic_sigma,
    "corollary_v": _corollary_v,
    "corollary_c": _corollary_c,
    "teichmuller": _teichmuller,
}


# --------------------------------------------------------------------------
# sup estimation


@dataclass
class CriterionReport:
    criterion: str
    params: dict
    k_hat: float
    witness: complex
    grid: DiskGrid
    refinement: list
    omega_sup: float
    target_k: Optional[float]
    passed: Optional[bool]
    side_conditions: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "params": self.params,
            "k_hat": self.k_hat,
            "witness": [self.witness.real, self.witness.imag],
            "grid": self.grid.describe(),
            "refinement": [[n, k] for n, k in self.refinement],
            "omega_sup": self.omega_sup,
            "k": self.target_k,
            "pass": self.passed,
            "side_conditions": self.side_conditions,
            "excluded": [[p.real, p.imag] for p in self.excluded[:16]],
            "excluded_count": len(self.excluded),
        }


def _sweep(cr: Criterion, grid: DiskGrid):
    pts = grid.points(include_origin=grid.include_origin and not cr.uses_weight)

    def chunk(z):
        lhs, rhs, keep = cr.evaluate(z)
        zero = keep & (rhs == 0)
        if np.any(zero):
            raise DegenerateNormalizerError(f"{cr.name}: right-hand side vanishes", complex(z[zero][0]))
        with np.errstate(all="ignore"):
            r = lhs / rhs
        bad = keep & ~np.isfinite(r)
        if np.any(bad):
            raise CriterionEvaluationError(f"{cr.name}: non-finite ratio", complex(z[bad][0]))
        w = np.abs(cx.evaluate(cr.fmap.omega, z)) if cr.harmonic else np.zeros(z.shape)
        return np.stack([np.where(keep, r, np.nan), w])

    vals = chunked_apply(lambda z: chunk(z).T, pts)
    ratio, wabs = vals[:, 0], vals[:, 1]
    i = argmax_first(ratio)
    excluded = [complex(p) for p in pts[np.isnan(ratio)]]
    return float(ratio[i]), complex(pts[i]), float(np.max(wabs)), excluded


def sup_ratio(cr: Criterion, grid: DiskGrid | None = None, k: float | None = None,
              refine: bool = True, tol: float = REFINE_TOL, cap=REFINE_CAP) -> CriterionReport:
    """Estimate ``sup lhs/rhs`` with grid doubling until the relative change is below ``tol``."""
    grid = grid or DiskGrid()
    k_hat, witness, wsup, excluded = _sweep(cr, grid)
    history = [(grid.size, k_hat)]
    while refine:
        finer = grid.refined()
        if finer.n_radii > cap[0] or finer.n_angles > cap[1]:
            break
        k2, w2, ws2, ex2 = _sweep(cr, finer)
        history.append((finer.size, k2))
        change = abs(k2 - k_hat) / max(abs(k2), 1e-300) if k2 != k_hat else 0.0
        grid, k_hat, witness, wsup, excluded = finer, k2, w2, ws2, ex2
        if change < tol:
            break
    passed = None
    side = {}
    if k is not None:
        side = cr.side_conditions(k)
        passed = bool(0 <= k < 1 and k_hat < k + GUARD and all(side.values()))
    return CriterionReport(cr.name, cr.describe_params(), k_hat, witness, grid, history,
                           wsup, k, passed, side, excluded)


def k_condition_check(k_hat: float, omega_sup: float) -> bool:
    """Whether ``k_hat < (1 - |omega|) / (1 + |omega|)``."""
    return bool(k_hat < (1 - omega_sup) / (1 + omega_sup))


def check(name: str, f, weight=None, k: float = 0.5, grid: DiskGrid | None = None,
          params: dict | None = None, refine: bool = True) -> CriterionReport:
    """Convenience: build the criterion and estimate its sup against ``k``."""
    cr = make_criterion(name, f, weight, params)
    return sup_ratio(cr, grid, k, refine)
