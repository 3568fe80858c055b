"""Beltrami coefficients of plane extensions and the dilatation bounds they obey."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cxexpr as cx
from .extensions import PlaneExtension
from .grid import AnnulusGrid, DiskGrid, argmax_first
from .maps import PointError

CERT_TOL = 1e-6
DENOM_FLOOR = 1e-14


class BeltramiError(ValueError):
    pass


class DegenerateDerivativeError(PointError):
    pass


class BoundInapplicableError(BeltramiError):
    """Parameters violate the hypotheses behind a dilatation formula."""


def mu_step(z):
    """FD step ``1e-6 max(1,|z|)``, capped at ``||z| - 1| / 4``."""
    r = np.abs(z)
    return np.minimum(1e-6 * np.maximum(1.0, r), np.abs(r - 1.0) / 4)


def mu_fd(E: PlaneExtension, z):
    """``F_zbar / F_z`` from the four-point Wirtinger stencil on ``E``."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) == 1):
        raise BeltramiError("mu is not sampled on the unit circle")
    fz, fzb = cx.fd_wirtinger(E, zz, mu_step(zz))
    fz = np.asarray(fz)
    bad = np.abs(fz) < 1e-12
    if np.any(bad):
        zb = np.broadcast_to(zz, bad.shape)
        raise DegenerateDerivativeError("|F_z| < 1e-12", complex(zb[bad][0]))
    mu = np.asarray(fzb) / fz
    return complex(mu) if mu.ndim == 0 else mu


def _reflect(w):
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) <= 1):
        raise BeltramiError("mu_analytic_exterior needs |w| > 1")
    return 1.0 / np.conj(w)


def eta(E: PlaneExtension, z):
    """Teichmüller ratio ``-(sigma^2 + sigma h''/h' - sigma_z) / (conj(sigma_zbar) sigma^2/conj(sigma)^2 conj(h')/h')``."""
    fmap = E.fmap
    hp, hpp = cx.evaluate_many([fmap.hp, fmap.hpp], z)
    s, sz, szb = E.weight.evaluate(z)
    with np.errstate(all="ignore"):
        num = -(s**2 / szb) - (s / szb) * (hpp / hp) + sz / szb
        den = (s**2 / np.conj(s) ** 2) * (np.conj(szb) / szb) * (np.conj(hp) / hp)
        return num / den


def mu_analytic_exterior(E: PlaneExtension, w):
    """``|mu|`` at exterior points from the closed-form quotient.

    Harmonic family (and the analytic constructions, with ``lam = 0``)::

        |h' + (U)_z| / |lam conj(g') + (U)_zbar|      at z = 1/conj(w)

    Teichmüller construction: ``|(alpha + eta) / (1 + conj(alpha) eta)|``.
    """
    z = _reflect(w)
    scalar = np.ndim(w) == 0
    fmap = E.fmap
    with np.errstate(all="ignore"):
        if E.construction == "teichmuller" or E.alpha is not None:
            a = E.alpha
            et = eta(E, z)
            num, den = a + et, 1 + np.conj(a) * et
        else:
            lam = 0j if E.lam is None else E.lam
            s, sz, szb = (np.asarray(v) for v in E.weight.evaluate(z))
            g = fmap.g
            hp_e = cx.wirtinger_dz(fmap.h)
            hpp_e = cx.wirtinger_dz(hp_e)
            gp_e = cx.wirtinger_dz(g)
            gpp_e = cx.wirtinger_dz(gp_e)
            hp, hpp, gp, gpp = (np.asarray(v) for v in cx.evaluate_many([hp_e, hpp_e, gp_e, gpp_e], z))
            if lam == 0:
                gp = gpp = np.zeros_like(hp)
            cs, csz, cszb = np.conj(s), np.conj(sz), np.conj(szb)
            num = hp + (hpp * s - hp * sz) / s**2 - lam * np.conj(gp) * cszb / cs**2
            den = lam * np.conj(gp) + lam * (np.conj(gpp) * cs - np.conj(gp) * csz) / cs**2 - hp * szb / s**2
        small = np.abs(den) < DENOM_FLOOR
        if np.any(small):
            zb = np.broadcast_to(np.asarray(w), small.shape)
            raise DegenerateDerivativeError("denominator below 1e-14", complex(zb[small][0]))
        out = np.abs(num / den)
    return float(out) if scalar else out


def omega_star(E: PlaneExtension, z):
    """``(sigma / sigma_zbar) * omega' / (1 - |omega|^2)`` for the base map."""
    base = E.fmap
    g = base.g
    om = cx.div(cx.wirtinger_dz(g), base.hp)
    om_p = cx.wirtinger_dz(om)
    w, wp = cx.evaluate_many([om, om_p], z)
    s, _, szb = E.weight.evaluate(z)
    return (s / szb) * wp / (1 - np.abs(w) ** 2)


def rho_bound(k: float, lambda_abs: float, omega_sup: float, x: float) -> float:
    """``(k + |lam| w - (1 - w) x) / (1 - k |lam| w - (1 - w) x)`` with ``w = ||omega||``."""
    num = k + lambda_abs * omega_sup - (1 - omega_sup) * x
    den = 1 - k * lambda_abs * omega_sup - (1 - omega_sup) * x
    if den <= 0:
        raise BoundInapplicableError("rho denominator is not positive")
    return num / den


def rho_display(k: float, lambda_abs: float, omega_sup: float, x: float) -> float:
    """Variant of :func:`rho_bound` whose ``x`` coefficient is ``1 - |lam| w``."""
    lw = lambda_abs * omega_sup
    den = 1 - k * lw - (1 - lw) * x
    if den <= 0:
        raise BoundInapplicableError("rho denominator is not positive")
    return (k + lw - (1 - lw) * x) / den


def bound_chain(E: PlaneExtension, w, k: float, omega_sup: float) -> dict:
    """Per-sample ``|mu(w)|``, ``|omega*(z)|`` and ``rho(|omega*(z)|)`` with ``z = 1/conj(w)``."""
    lam_abs = abs(E.lam) if E.lam is not None else 0.0
    z = _reflect(w)
    mu = np.abs(mu_analytic_exterior(E, w))
    x = np.abs(omega_star(E, z))
    rho = np.vectorize(lambda t: rho_bound(k, lam_abs, omega_sup, t))(np.minimum(x, k))
    alt = np.vectorize(lambda t: rho_display(k, lam_abs, omega_sup, t))(np.minimum(x, k))
    return {"mu": mu, "omega_star": x, "rho": rho, "rho_display": alt,
            "rho0": rho_bound(k, lam_abs, omega_sup, 0.0)}


@dataclass(frozen=True)
class KValue:
    K: float
    k_mu: float  # (K - 1) / (K + 1), the bound on |mu|


def k_formula(tag: str, k: float, lambda_abs: float = 1.0, omega_sup: float = 0.0, alpha_abs: float = 0.0) -> KValue:
    """Maximal dilatation ``K`` for ``tag`` in {analytic, harmonic, teichmuller}."""
    if not 0 <= k < 1:
        raise BoundInapplicableError("need 0 <= k < 1")
    if tag == "analytic":
        K = (1 + k) / (1 - k)
    elif tag == "harmonic":
        lw = lambda_abs * omega_sup
        den = 1 - k - lw * (1 + k)
        if den <= 0:
            raise BoundInapplicableError("k >= (1 - |lam| w) / (1 + |lam| w)")
        K = (1 + k + lw * (1 - k)) / den
    elif tag == "teichmuller":
        if not 0 <= alpha_abs < 1:
            raise BoundInapplicableError("need |alpha| < 1")
        K = (1 + k) * (1 + alpha_abs) / ((1 - k) * (1 - alpha_abs))
    else:
        raise BeltramiError(f"unknown K-formula tag {tag!r}")
    return KValue(K, (K - 1) / (K + 1))


def k_formula_tag(E: PlaneExtension) -> str:
    if E.alpha is not None:
        return "teichmuller"
    if E.construction == "harmonic_lambda":
        return "harmonic"
    return "analytic"


@dataclass
class BeltramiGrid:
    region: str
    z: np.ndarray
    mu: np.ndarray
    method: str = "fd"

    @property
    def sup_abs_mu(self) -> float:
        return float(np.max(np.abs(self.mu))) if self.mu.size else 0.0

    @property
    def witness(self) -> complex:
        return complex(self.z[argmax_first(np.abs(self.mu))])


def sample_mu(E: PlaneExtension, interior: DiskGrid | None = None, exterior: AnnulusGrid | None = None):
    interior = interior or DiskGrid(32, 128, depth=9.0, include_origin=False)
    exterior = exterior or AnnulusGrid()
    zi = interior.points(include_origin=False)
    ze = exterior.points()
    ze = ze[np.abs(ze) <= E.r_max]
    return BeltramiGrid("interior", zi, np.asarray(mu_fd(E, zi))), BeltramiGrid("exterior", ze, np.asarray(mu_fd(E, ze)))


@dataclass
class Certification:
    sup_mu_interior: float
    sup_mu_exterior: float
    bound: float | None
    K: float | None
    certified: bool
    witnesses: dict
    k_hat: float | None = None
    omega_sup: float | None = None
    k_condition: bool | None = None
    margins: dict = field(default_factory=dict)
    grids: tuple = ()

    @property
    def sup_mu(self) -> float:
        return max(self.sup_mu_interior, self.sup_mu_exterior)

    def to_dict(self) -> dict:
        return {
            "sup_mu_interior": self.sup_mu_interior,
            "sup_mu_exterior": self.sup_mu_exterior,
            "bound": self.bound,
            "K": self.K,
            "certified": self.certified,
            "witnesses": {k: [v.real, v.imag] for k, v in self.witnesses.items()},
            "k_hat": self.k_hat,
            "omega_sup": self.omega_sup,
            "k_condition": self.k_condition,
            "margins": self.margins,
        }


def max_dilatation(E: PlaneExtension, interior: DiskGrid | None = None, exterior: AnnulusGrid | None = None,
                   k: float | None = None, omega_sup: float | None = None) -> Certification:
    """Measure ``sup |mu|`` inside and outside and compare with the K-formula bound.

    ``k`` and ``omega_sup`` default to the criterion report attached to ``E``.
    ``certified`` means every sample has ``|mu| < 1`` and the measured sup is at
    most the bound plus 1e-6.
    """
    if k is None:
        if E.report is None:
            raise BeltramiError("need k (no criterion report on the extension)")
        k = E.report.k_hat
    if omega_sup is None:
        omega_sup = E.report.omega_sup if E.report is not None else 0.0
    gi, ge = sample_mu(E, interior, exterior)
    sup_i, sup_e = gi.sup_abs_mu, ge.sup_abs_mu
    witnesses = {"interior": gi.witness, "exterior": ge.witness}

    tag = k_formula_tag(E)
    lam_abs = abs(E.lam) if E.lam is not None else 0.0
    kcond = None
    bound = K = None
    margins = {}
    try:
        if tag == "harmonic":
            kcond = bool(k < (1 - omega_sup) / (1 + omega_sup))
            if kcond:
                kv = k_formula("harmonic", k, lam_abs, omega_sup)
                chain = bound_chain(E, ge.z, k, omega_sup)
                margins["rho0"] = chain["rho0"]
                margins["max_omega_star"] = float(np.max(chain["omega_star"]))
                # slack of |mu| under each reading of the x-coefficient
                margins["rho_slack"] = float(np.min(chain["rho"] - chain["mu"]))
                margins["rho_display_slack"] = float(np.min(chain["rho_display"] - chain["mu"]))
                bound, K = kv.k_mu, kv.K
        elif tag == "teichmuller":
            kv = k_formula("teichmuller", k, alpha_abs=abs(E.alpha))
            bound, K = kv.k_mu, kv.K
        else:
            kv = k_formula("analytic", k)
            bound, K = kv.k_mu, kv.K
    except BoundInapplicableError:
        bound = K = None

    all_qc = bool(np.all(np.abs(gi.mu) < 1) and np.all(np.abs(ge.mu) < 1))
    certified = bool(all_qc and bound is not None and max(sup_i, sup_e) <= bound + CERT_TOL)
    return Certification(sup_i, sup_e, bound, K, certified, witnesses, k, omega_sup, kcond, margins, (gi, ge))
