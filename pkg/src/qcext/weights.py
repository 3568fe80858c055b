"""Admissible weights ``sigma`` for Ahlfors-type criteria and extensions.

A weight is stored as expression trees for ``sigma``, ``sigma_z`` and
``sigma_zbar``. Catalog weights that involve a map (Ahlfors-Weill and the
Schwarzian variants ``v - P_f/2``) are expressions too, because ``P_f`` is
built symbolically by :class:`qcext.maps.HarmonicMap`; their derivatives may
be taken symbolically (default) or by central differences (``derivatives="fd"``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cxexpr as cx
from .cxexpr import Expr
from .grid import DiskGrid
from .maps import as_map

KINDS = ("becker", "ahlfors_c", "ahlfors_weill", "schwarzian_v", "schwarzian_c", "custom")
MAP_DEPENDENT = ("ahlfors_weill", "schwarzian_v", "schwarzian_c")

BLOWUP_RAYS = 16
BLOWUP_LEVELS = 20
BLOWUP_THRESHOLD = 1e5
RATIO_FLOOR = 1e-12


class WeightError(ValueError):
    pass


class MissingMapContextError(WeightError):
    pass


class InadmissibleWeightError(WeightError):
    def __init__(self, condition: str, witness, detail: str = ""):
        msg = f"weight fails admissibility condition ({condition})"
        if witness is not None:
            msg += f" at z={complex(witness)!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.condition = condition
        self.witness = None if witness is None else complex(witness)


def _zbar_over_t(scale: complex = 1) -> Expr:
    # scale * conj(z) / (1 - z conj(z))
    z = cx.Z
    t = cx.sub(cx.const(1), cx.mul(z, cx.conj(z)))
    return cx.div(cx.mul(cx.const(scale), cx.conj(z)), t)


def _parse_c(c) -> complex:
    if c is None:
        return 0j
    if isinstance(c, (list, tuple)):
        return complex(float(c[0]), float(c[1]))
    return complex(c)


def fd_step(z):
    """FD step ``1e-6 max(1,|z|)``, capped so the stencil stays inside the disk."""
    r = np.abs(z)
    return np.minimum(1e-6 * np.maximum(1.0, r), np.abs(1.0 - r) / 4)


@dataclass(frozen=True, eq=False)
class SigmaWeight:
    kind: str
    sigma: Expr
    sigma_z: Expr
    sigma_zbar: Expr
    params: dict = field(default_factory=dict)
    v: Optional[Expr] = None
    derivatives: str = "symbolic"

    def evaluate(self, z):
        """Return ``(sigma, sigma_z, sigma_zbar)`` at ``z``."""
        if self.derivatives == "fd":
            s = cx.evaluate(self.sigma, z)
            sz, szb = cx.fd_wirtinger(lambda w: cx.evaluate(self.sigma, w), z, fd_step(z))
            return s, sz, szb
        return tuple(cx.evaluate_many([self.sigma, self.sigma_z, self.sigma_zbar], z))

    def __call__(self, z):
        return cx.evaluate(self.sigma, z)

    @property
    def c(self) -> complex:
        return _parse_c(self.params.get("c"))

    @property
    def map_dependent(self) -> bool:
        return self.kind in MAP_DEPENDENT

    def v_derivatives(self):
        """``(v, v_z, v_zbar)`` expressions for the Schwarzian-type weights."""
        if self.v is None:
            raise WeightError(f"weight {self.kind!r} carries no v-function")
        return self.v, cx.wirtinger_dz(self.v), cx.wirtinger_dzbar(self.v)

    def to_spec(self) -> dict:
        spec = {"kind": self.kind}
        if self.kind in ("ahlfors_c", "schwarzian_c"):
            c = self.c
            spec["c"] = [c.real, c.imag]
        elif self.kind == "schwarzian_v":
            spec["v"] = cx.to_text(self.v)
        elif self.kind == "custom":
            spec["sigma"] = self.params.get("sigma", cx.to_text(self.sigma))
            for key in ("sigma_z", "sigma_zbar"):
                if key in self.params:
                    spec[key] = self.params[key]
        return spec


def make_weight(kind, params: dict | None = None, fmap=None, derivatives: str = "symbolic",
                check: bool = True) -> SigmaWeight:
    """Build a catalog or custom weight.

    ``kind`` may also be a weight-spec dict (``{"kind": ..., ...}``), in which
    case ``params`` is taken from it.
    """
    if isinstance(kind, SigmaWeight):
        return kind
    if isinstance(kind, dict):
        params = {k: v for k, v in kind.items() if k != "kind"}
        kind = kind["kind"]
    params = dict(params or {})
    if kind not in KINDS:
        raise WeightError(f"unknown weight kind {kind!r}")
    if derivatives not in ("symbolic", "fd"):
        raise WeightError("derivatives must be 'symbolic' or 'fd'")

    v = None
    if kind == "becker":
        sigma = _zbar_over_t(1)
    elif kind == "ahlfors_c":
        c = _parse_c(params.get("c"))
        sigma = _zbar_over_t(c + 1)
    elif kind == "custom":
        if "sigma" not in params:
            raise WeightError("custom weight needs a 'sigma' expression")
        sigma = cx.parse(params["sigma"])
    else:
        if fmap is None:
            raise MissingMapContextError(f"weight {kind!r} needs a map context")
        fmap = as_map(fmap)
        if kind == "ahlfors_weill":
            v = _zbar_over_t(1)
        elif kind == "schwarzian_c":
            v = _zbar_over_t(_parse_c(params.get("c")))
        else:
            if "v" not in params:
                raise WeightError("schwarzian_v weight needs a 'v' expression")
            v = cx.parse(params["v"])
        sigma = cx.sub(v, cx.mul(cx.const(0.5), fmap.P_f))

    if kind in ("becker", "ahlfors_c"):
        # closed forms: sigma_z = sigma^2 / (c+1), sigma_zbar = (c+1) / (1-|z|^2)^2
        scale = 1 + (_parse_c(params.get("c")) if kind == "ahlfors_c" else 0)
        t = cx.sub(cx.const(1), cx.mul(cx.Z, cx.conj(cx.Z)))
        sigma_z = cx.mul(sigma, sigma) if scale == 1 else cx.div(cx.mul(sigma, sigma), cx.const(scale))
        sigma_zbar = cx.div(cx.const(scale), cx.mul(t, t))
    elif kind == "custom" and "sigma_z" in params:
        sigma_z = cx.parse(params["sigma_z"])
    else:
        sigma_z = cx.wirtinger_dz(sigma)
    if kind in ("becker", "ahlfors_c"):
        pass
    elif kind == "custom" and "sigma_zbar" in params:
        sigma_zbar = cx.parse(params["sigma_zbar"])
    else:
        sigma_zbar = cx.wirtinger_dzbar(sigma)

    mode = derivatives if kind in MAP_DEPENDENT else "symbolic"
    w = SigmaWeight(kind, sigma, sigma_z, sigma_zbar, params, v, mode)
    if check and kind == "custom":
        report = check_admissibility(w, DiskGrid(16, 64))
        if not report.admissible:
            cond, witness = report.failures[0]
            raise InadmissibleWeightError(cond, witness)
    return w


def load_weight_spec(text_or_path: str) -> dict:
    """Parse inline JSON or read a JSON file."""
    s = text_or_path.strip()
    if s.startswith("{"):
        return json.loads(s)
    with open(text_or_path, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class AdmissibilityReport:
    condition_i: bool
    condition_ii: bool
    condition_iii: bool
    growth: list
    min_ratio: float
    failures: list
    excluded: list

    @property
    def admissible(self) -> bool:
        return self.condition_i and self.condition_ii and self.condition_iii

    def to_dict(self) -> dict:
        return {
            "condition_i": self.condition_i,
            "condition_ii": self.condition_ii,
            "condition_iii": self.condition_iii,
            "admissible": self.admissible,
            "growth": list(self.growth),
            "min_ratio": self.min_ratio,
            "failures": [[c, [p.real, p.imag] if p is not None else None] for c, p in self.failures],
        }


def blowup_samples(w: SigmaWeight, rays: int = BLOWUP_RAYS, levels: int = BLOWUP_LEVELS) -> np.ndarray:
    """``|sigma((1 - 2^-j) e^{it})|`` with shape ``(levels, rays)``."""
    r = 1.0 - 2.0 ** -np.arange(1, levels + 1)
    theta = 2 * np.pi * np.arange(rays) / rays
    pts = r[:, None] * np.exp(1j * theta)[None, :]
    with np.errstate(all="ignore"):
        return np.abs(cx.evaluate(w.sigma, pts))


def check_admissibility(w: SigmaWeight, grid: DiskGrid | None = None) -> AdmissibilityReport:
    """Numerically check the three admissibility conditions on a grid.

    (i) derivatives finite at every grid point (origin excluded);
    (ii) ``|sigma|`` grows without bound toward the circle, tested as monotone
    growth along 16 rays over ``r = 1 - 2^-j`` (j = 10..20) reaching 1e5;
    (iii) ``|sigma_zbar / sigma^2| > 1e-12`` on the grid.
    """
    grid = grid or DiskGrid(32, 128)
    pts = grid.points(include_origin=False)
    failures = []
    excluded = [0j]

    cond_i = True
    try:
        with np.errstate(all="ignore"):
            s, sz, szb = (np.asarray(a) for a in w.evaluate(pts))
        finite = np.isfinite(sz) & np.isfinite(szb) & np.isfinite(s)
        if not np.all(finite):
            cond_i = False
            failures.append(("i", complex(pts[~finite][0])))
    except cx.EvaluationError as exc:
        cond_i = False
        failures.append(("i", exc.point))
        s = sz = szb = None

    samples = blowup_samples(w)
    growth = [float(x) for x in np.min(samples, axis=1)]
    tail = samples[9:]
    monotone = np.all(np.diff(tail, axis=0) >= 0, axis=0)
    big = tail[-1] > BLOWUP_THRESHOLD
    ok = monotone & big & np.all(np.isfinite(tail), axis=0)
    cond_ii = bool(np.all(ok))
    if not cond_ii:
        k = int(np.argmin(ok))
        failures.append(("ii", complex(np.exp(2j * np.pi * k / BLOWUP_RAYS))))

    min_ratio = float("nan")
    cond_iii = cond_i
    if s is not None:
        with np.errstate(all="ignore"):
            ratio = np.abs(szb) / np.abs(s) ** 2
        ratio = np.where(np.isnan(ratio), np.inf, ratio)
        i = int(np.argmin(ratio))
        min_ratio = float(ratio[i])
        cond_iii = bool(min_ratio > RATIO_FLOOR)
        if not cond_iii:
            failures.append(("iii", complex(pts[i])))

    return AdmissibilityReport(cond_i, cond_ii, cond_iii, growth, min_ratio, failures, excluded)
