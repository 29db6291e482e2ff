"""Physical-unit predictions from the similarity constants.

With ``beta = 1/(7*lam+3)`` the drop is ``h(r,t) = B t**(-2*beta) H(r/(A t**beta))``
where ``A**(7*lam+3) = (7*lam+3)/(lam+2) * (gamma/m)**lam * (V/I)**(2*lam+1)``
and ``V = A**2 * B * I``.
"""

from dataclasses import dataclass
import math
from typing import Optional
import warnings

import numpy as np

from ._validation import check_1d, check_positive
from .scaling import ConstantsRow, similarity_exponent

__all__ = [
    "CapillaryLengthWarning",
    "DimensionalSetup",
    "FluidParams",
    "RadiusSeries",
    "apparent_contact_angle",
    "fit_spreading_exponent",
    "front_radius",
    "height_profile",
    "make_setup",
]


class CapillaryLengthWarning(UserWarning):
    """The drop is not small compared with the capillary length; gravity matters."""


@dataclass(frozen=True)
class FluidParams:
    """Power-law fluid: consistency ``m`` [Pa s**(1/lam)], surface tension ``gamma`` [N/m]."""

    lam: float
    m: float
    gamma: float

    def __post_init__(self):
        for name in ("lam", "m", "gamma"):
            object.__setattr__(self, name, check_positive(getattr(self, name), name))

    @property
    def mobility(self):
        """``(gamma/m)**lam``, units m**lam / s."""
        return (self.gamma / self.m) ** self.lam


@dataclass(frozen=True)
class DimensionalSetup:
    fluid: FluidParams
    volume: float
    constants: ConstantsRow
    A: float
    B: float
    beta: float
    capillary_length: Optional[float] = None

    @property
    def lam(self):
        return self.fluid.lam


@dataclass(frozen=True)
class RadiusSeries:
    """Front radius samples ``r`` [m] at strictly increasing times ``t`` [s]."""

    t: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        t = check_1d(self.t, "t")
        r = check_1d(self.r, "r")
        if t.shape != r.shape:
            raise ValueError("t and r must have the same length")
        if t.size > 1 and np.any(np.diff(t) <= 0.0):
            raise ValueError("t must be strictly increasing")
        if np.any(r < 0.0):
            raise ValueError("r must be non-negative")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)

    def __len__(self):
        return self.t.size


def make_setup(fluid, volume, constants, capillary_length=None, t_max=None):
    """Scale constants ``A``, ``B`` and ``beta`` for a drop of ``volume`` [m**3].

    ``constants`` is anything with ``eta_f``, ``shape_factor``, ``s_lambda``
    and ``q_lambda`` attributes (a :class:`~powerlaw_droplet.scaling.ConstantsRow`).
    When ``capillary_length`` is given a :class:`CapillaryLengthWarning` is
    emitted if the drop, or its radius at ``t_max``, is not smaller than it.
    """
    volume = check_positive(volume, "volume")
    lam = fluid.lam
    shape = check_positive(constants.shape_factor, "shape_factor")
    n = 7.0 * lam + 3.0
    log_a = (math.log(n / (lam + 2.0)) + lam * math.log(fluid.gamma / fluid.m)
             + (2.0 * lam + 1.0) * math.log(volume / shape)) / n
    a = math.exp(log_a)
    b = volume / (a * a * shape)
    setup = DimensionalSetup(fluid, volume, constants, a, b, similarity_exponent(lam), capillary_length)
    if capillary_length is not None:
        capillary_length = check_positive(capillary_length, "capillary_length")
        size = volume ** (1.0 / 3.0)
        if t_max is not None:
            size = max(size, front_radius(setup, t_max))
        if size >= capillary_length:
            warnings.warn(
                f"drop size {size:.3g} m is not below the capillary length {capillary_length:.3g} m; "
                "the gravity-free model does not apply",
                CapillaryLengthWarning,
                stacklevel=2,
            )
    return setup


def front_radius(setup, t):
    """``r_f = S_lambda (V**(2lam+1) (gamma/m)**lam t)**beta``; vectorised over ``t``."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0):
        raise ValueError("t must be non-negative")
    lam = setup.lam
    base = setup.volume ** (2.0 * lam + 1.0) * setup.fluid.mobility
    out = setup.constants.s_lambda * (base * tt) ** setup.beta
    return float(out) if out.ndim == 0 else out


def apparent_contact_angle(setup, t):
    """Apparent contact angle in radians, ``arctan`` of the maximum slope."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt <= 0.0):
        raise ValueError("the apparent contact angle diverges at t = 0")
    lam, beta = setup.lam, setup.beta
    tan = (setup.constants.q_lambda * setup.volume ** (lam * beta)
           * (setup.fluid.m / setup.fluid.gamma) ** (3.0 * lam * beta) * tt ** (-3.0 * beta))
    out = np.arctan(tan)
    return float(out) if out.ndim == 0 else out


def height_profile(setup, profile, t, r):
    """Dimensional profile on the radii ``r``; returns an ``(n, 2)`` array of ``(r, h)``."""
    t = check_positive(t, "t")
    if not math.isclose(profile.params.lam, setup.lam, rel_tol=1e-12):
        raise ValueError("profile and setup have different lambda")
    r = check_1d(r, "r")
    if np.any(r < 0.0):
        raise ValueError("radii must be non-negative")
    eta = r / (setup.A * t**setup.beta)
    h = setup.B / t ** (2.0 * setup.beta) * profile.evaluate(eta)
    return np.column_stack((r, h))


def fit_spreading_exponent(series):
    """Least-squares ``ln r = ln c + beta ln t``; returns ``(beta_hat, c_hat)``.

    Points with ``t <= 0`` or ``r <= 0`` are dropped; at least three must remain.
    """
    if not isinstance(series, RadiusSeries):
        series = RadiusSeries(*series)
    keep = (series.t > 0.0) & (series.r > 0.0)
    if np.count_nonzero(keep) < 3:
        raise ValueError("need at least three points with t > 0 and r > 0")
    slope, intercept = np.polyfit(np.log(series.t[keep]), np.log(series.r[keep]), 1)
    return float(slope), float(math.exp(intercept))
