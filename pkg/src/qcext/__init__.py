"""Univalence criteria and quasiconformal extensions for harmonic maps of the disk."""

from .beltrami import k_formula, max_dilatation, mu_analytic_exterior, mu_fd, rho_bound
from .criteria import CATALOG, check, k_condition_check, make_criterion, sup_ratio
from .cxexpr import evaluate, parse, to_text, wirtinger_dz, wirtinger_dzbar
from .estimators import BeltramiCertifier, QuasiconformalExtension, UnivalenceCriterion
from .extensions import CONSTRUCTIONS, boundary_trace, build_extension, evaluate_extension
from .grid import AnnulusGrid, DiskGrid
from .maps import HarmonicMap, affine_transform
from .weights import check_admissibility, make_weight

__version__ = "0.1.0"

__all__ = [
    "AnnulusGrid", "BeltramiCertifier", "CATALOG", "CONSTRUCTIONS", "DiskGrid", "HarmonicMap",
    "QuasiconformalExtension", "UnivalenceCriterion", "affine_transform", "boundary_trace",
    "build_extension", "check", "check_admissibility", "evaluate", "evaluate_extension",
    "k_condition_check", "k_formula", "make_criterion", "make_weight", "max_dilatation",
    "mu_analytic_exterior", "mu_fd", "parse", "rho_bound", "sup_ratio", "to_text",
    "wirtinger_dz", "wirtinger_dzbar",
]
