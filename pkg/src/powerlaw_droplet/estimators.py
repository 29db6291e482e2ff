"""scikit-learn style wrappers around the solvers.

These follow the usual estimator contract: hyper-parameters are set in
``__init__`` and exposed through ``get_params``, ``fit`` computes the
trailing-underscore attributes and returns ``self``.
"""

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_1d, check_positive, check_shear_thinning
from .dimensional import (
    FluidParams,
    RadiusSeries,
    apparent_contact_angle,
    fit_spreading_exponent,
    front_radius,
    make_setup,
)
from .scaling import ConstantsRow, angle_prefactor, spreading_prefactor
from .shooting import find_critical_kappa, solve_drop
from .similarity import Classification, IntegratorOptions

__all__ = ["PowerLawSpreadingRegressor", "SelfSimilarDrop", "SpreadingLawModel"]


class SelfSimilarDrop(BaseEstimator):
    """Similarity profile ``H(eta)`` for one rheology exponent.

    With ``kappa0=None`` the zero-contact-angle eigenvalue is searched for;
    otherwise the drop with that central curvature is integrated.  ``fit``
    ignores its arguments.  ``predict(eta)`` returns ``H``.

    Attributes set by ``fit``: ``profile_``, ``kappa0_``, ``classification_``,
    ``eta_f_``, ``shape_factor_``, ``s_lambda_`` and ``q_lambda_`` (the last
    four are ``None`` for a subcritical trajectory).
    """

    def __init__(self, lam=2.5, kappa0=None, tolerance=1e-8, h_stop=1e-6,
                 step_fraction=1e-4, front_test="asymptotic"):
        self.lam = lam
        self.kappa0 = kappa0
        self.tolerance = tolerance
        self.h_stop = h_stop
        self.step_fraction = step_fraction
        self.front_test = front_test

    def _options(self):
        return IntegratorOptions(
            h_stop=self.h_stop, step_fraction=self.step_fraction, front_test=self.front_test
        )

    def fit(self, X=None, y=None):
        opts = self._options()
        if self.kappa0 is None:
            critical = find_critical_kappa(self.lam, self.tolerance, opts)
            self.profile_ = critical.profile
            self.kappa0_ = critical.kappa_lambda
        else:
            self.profile_ = solve_drop(self.lam, check_positive(self.kappa0, "kappa0"), opts)
            self.kappa0_ = float(self.kappa0)
        p = self.profile_
        self.classification_ = p.classification
        self.eta_f_ = p.eta_f
        self.shape_factor_ = p.shape_factor
        self.s_lambda_ = self.q_lambda_ = None
        if p.has_front:
            self.s_lambda_ = spreading_prefactor(self.lam, p.eta_f, p.shape_factor)
            if p.hp_at_eta_i is not None:
                self.q_lambda_ = angle_prefactor(self.lam, p.hp_at_eta_i, p.shape_factor)
        return self

    def predict(self, X):
        check_is_fitted(self, "profile_")
        return self.profile_.evaluate(check_1d(X, "eta"))

    def constants(self):
        check_is_fitted(self, "profile_")
        if self.classification_ is Classification.SUBCRITICAL:
            raise ValueError("a subcritical profile has no spreading constants")
        return ConstantsRow(
            lam=float(self.lam),
            kappa_lambda=self.kappa0_,
            eta_f=self.eta_f_,
            shape_factor=self.shape_factor_,
            s_lambda=self.s_lambda_,
            q_lambda=self.q_lambda_,
        )


class SpreadingLawModel(RegressorMixin, BaseEstimator):
    """Front radius ``r_f(t)`` of a zero-contact-angle drop in SI units.

    ``fit`` solves for the spreading constants (its arguments are ignored);
    ``predict(t)`` gives ``r_f`` and ``contact_angle(t)`` the apparent angle.
    """

    def __init__(self, lam=2.5, m=1.0, gamma=1.0, volume=1.0, tolerance=1e-8,
                 capillary_length=None):
        self.lam = lam
        self.m = m
        self.gamma = gamma
        self.volume = volume
        self.tolerance = tolerance
        self.capillary_length = capillary_length

    def fit(self, X=None, y=None):
        check_shear_thinning(self.lam)
        drop = SelfSimilarDrop(lam=self.lam, tolerance=self.tolerance).fit()
        self.constants_ = drop.constants()
        self.profile_ = drop.profile_
        fluid = FluidParams(self.lam, self.m, self.gamma)
        self.setup_ = make_setup(fluid, self.volume, self.constants_, self.capillary_length)
        self.exponent_ = self.setup_.beta
        return self

    def predict(self, X):
        check_is_fitted(self, "setup_")
        return front_radius(self.setup_, check_1d(X, "t"))

    def contact_angle(self, X):
        check_is_fitted(self, "setup_")
        return apparent_contact_angle(self.setup_, check_1d(X, "t"))


class PowerLawSpreadingRegressor(RegressorMixin, BaseEstimator):
    """Log-log least-squares fit ``r = prefactor * t**exponent``."""

    def fit(self, X, y):
        t = check_1d(X, "t")
        r = check_1d(y, "r")
        self.exponent_, self.prefactor_ = fit_spreading_exponent(RadiusSeries(t, r))
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        return self.prefactor_ * check_1d(X, "t") ** self.exponent_
