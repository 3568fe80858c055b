"""Estimator-style wrappers around the functional API.

``fit`` receives the map (a :class:`HarmonicMap`, a map-spec dict or an
expression string for ``h``), computes the certificate, and stores results in
attributes ending in ``_``. ``transform`` then evaluates at sample points.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import beltrami, criteria, extensions
from ._validation import check_disk_param, check_points, check_unit_interval
from .grid import AnnulusGrid, DiskGrid
from .maps import as_map


class UnivalenceCriterion(BaseEstimator):
    """Sup of a univalence criterion's ``lhs/rhs`` over the disk.

    >>> est = UnivalenceCriterion(criterion="becker", k=0.5).fit("z")
    >>> est.k_hat_, est.passed_
    (0.0, True)
    """

    def __init__(self, criterion="becker", weight=None, k=0.5, params=None,
                 n_radii=128, n_angles=512, refine=True):
        self.criterion = criterion
        self.weight = weight
        self.k = k
        self.params = params
        self.n_radii = n_radii
        self.n_angles = n_angles
        self.refine = refine

    def fit(self, X, y=None):
        k = check_unit_interval(self.k, "k")
        self.map_ = as_map(X)
        self.criterion_ = criteria.make_criterion(self.criterion, self.map_, self.weight, self.params)
        self.report_ = criteria.sup_ratio(self.criterion_, DiskGrid(self.n_radii, self.n_angles), k, self.refine)
        self.k_hat_ = self.report_.k_hat
        self.witness_ = self.report_.witness
        self.passed_ = self.report_.passed
        return self

    def transform(self, X):
        """Pointwise ``lhs/rhs``; NaN where the criterion excludes a point."""
        check_is_fitted(self, "report_")
        return self.criterion_.ratio(check_points(X))

    def score(self, X=None, y=None):
        """Margin ``k - k_hat``; positive when the criterion holds."""
        check_is_fitted(self, "report_")
        return float(self.k) - self.k_hat_


class QuasiconformalExtension(TransformerMixin, BaseEstimator):
    """Plane extension of a disk map; ``transform`` evaluates it off the circle."""

    def __init__(self, construction="harmonic_lambda", weight=None, lam=None, alpha=None,
                 k=None, r_max=extensions.R_MAX, certify=True):
        self.construction = construction
        self.weight = weight
        self.lam = lam
        self.alpha = alpha
        self.k = k
        self.r_max = r_max
        self.certify = certify

    def fit(self, X, y=None):
        k = None if self.k is None else check_unit_interval(self.k, "k")
        lam = check_disk_param(self.lam, "lambda", closed=True)
        alpha = check_disk_param(self.alpha, "alpha")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", extensions.NonCertifiedWarning)
            self.extension_ = extensions.build_extension(
                self.construction, X, self.weight, lam=lam, alpha=alpha, k=k,
                certify=self.certify, r_max=self.r_max)
        self.certified_ = self.extension_.certified
        self.report_ = self.extension_.report
        return self

    def transform(self, X):
        check_is_fitted(self, "extension_")
        return extensions.evaluate_extension(self.extension_, check_points(X))


class BeltramiCertifier(BaseEstimator):
    """Measure ``sup |mu|`` of a fitted extension against its K-formula bound."""

    def __init__(self, n_radii=64, n_angles=256, k=None):
        self.n_radii = n_radii
        self.n_angles = n_angles
        self.k = k

    def fit(self, X, y=None):
        E = X.extension_ if isinstance(X, QuasiconformalExtension) else X
        if not isinstance(E, extensions.PlaneExtension):
            raise TypeError("fit expects a PlaneExtension or a fitted QuasiconformalExtension")
        self.extension_ = E
        inner = DiskGrid(self.n_radii // 2 * 2, self.n_angles // 2, depth=9.0, include_origin=False)
        outer = AnnulusGrid(self.n_radii, self.n_angles)
        self.certification_ = beltrami.max_dilatation(E, inner, outer, k=self.k)
        self.sup_mu_ = self.certification_.sup_mu
        self.certified_ = self.certification_.certified
        return self

    def transform(self, X):
        """Complex ``mu`` by finite differences at the given points."""
        check_is_fitted(self, "certification_")
        return np.asarray(beltrami.mu_fd(self.extension_, check_points(X)))
