"""Spreading constants derived from the similarity profile.

``S_lambda`` sets the front radius ``r_f = S (V**(2l+1) (gamma/m)**l t)**beta``
and ``Q_lambda`` the apparent contact angle; both follow in closed form from
``eta_f``, the shape factor ``I`` and the maximum slope ``H'(eta_i)``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
import logging
import math
import os
from typing import Optional

import numpy as np

from ._validation import check_positive
from .shooting import find_critical_kappa
from .similarity import (
    Classification,
    _curvature_slope,
    zero_angle_coefficient,
    zero_angle_exponent,
)

__all__ = [
    "ConstantsRow",
    "PAPER_LAMBDAS",
    "PAPER_TABLE",
    "angle_prefactor",
    "asymptotic_front_height",
    "build_constants_table",
    "constants_from_critical",
    "dissipation_integral",
    "similarity_exponent",
    "spreading_prefactor",
]

log = logging.getLogger(__name__)

THREADS_ENV = "POWERLAW_DROPLET_THREADS"

# published values: lambda -> (kappa_lambda, eta_f, I, S_lambda, Q_lambda)
PAPER_TABLE = {
    1.1: (7.64300, 0.73220, 0.83124, 0.86880, 1.814294),
    1.5: (4.08651, 1.03906, 1.61381, 0.99651, 1.137746),
    2.0: (3.29562, 1.19915, 2.08030, 1.05262, 0.951946),
    2.5: (3.00428, 1.28882, 2.34984, 1.08074, 0.878580),
    3.0: (2.85609, 1.34757, 2.52782, 1.09766, 0.840258),
    4.0: (2.71025, 1.42076, 2.74976, 1.11683, 0.802190),
    5.0: (2.64043, 1.46484, 2.88307, 1.12721, 0.784121),
}
PAPER_LAMBDAS = tuple(PAPER_TABLE)


@dataclass(frozen=True)
class ConstantsRow:
    lam: float
    kappa_lambda: Optional[float] = None
    eta_f: Optional[float] = None
    shape_factor: Optional[float] = None
    s_lambda: Optional[float] = None
    q_lambda: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self):
        return self.error is None

    def as_dict(self):
        return asdict(self)


def similarity_exponent(lam):
    """``beta = 1/(7*lam + 3)``."""
    lam = check_positive(lam, "lam")
    return 1.0 / (7.0 * lam + 3.0)


def spreading_prefactor(lam, eta_f, shape_factor):
    lam = check_positive(lam, "lam")
    eta_f = check_positive(eta_f, "eta_f")
    shape_factor = check_positive(shape_factor, "shape_factor")
    n = 7.0 * lam + 3.0
    return ((n / (lam + 2.0)) ** (1.0 / n)) * eta_f / shape_factor ** ((2.0 * lam + 1.0) / n)


def angle_prefactor(lam, hp_at_eta_i, shape_factor):
    lam = check_positive(lam, "lam")
    shape_factor = check_positive(shape_factor, "shape_factor")
    if not hp_at_eta_i < 0.0:
        raise ValueError(f"slope at the inflection point must be negative, got {hp_at_eta_i!r}")
    n = 7.0 * lam + 3.0
    return -hp_at_eta_i * ((lam + 2.0) / n) ** (3.0 / n) * shape_factor ** (-lam / n)


def asymptotic_front_height(lam, eta_f, eta):
    """Leading term of the zero-angle profile near the front.

    Vectorised over ``eta``; values at or past ``eta_f`` are zero.
    """
    lam = check_positive(lam, "lam")
    if lam <= 1.0:
        raise ValueError("the zero-angle front expansion needs lam > 1")
    x = np.clip(eta_f - np.asarray(eta, dtype=float), 0.0, None)
    out = zero_angle_coefficient(lam, eta_f) * x ** zero_angle_exponent(lam)
    return float(out) if out.ndim == 0 else out


def dissipation_integral(profile):
    """``2*pi * int eta |K'|**(lam+1) H**(lam+2) deta`` over the drop.

    Along a solution ``|K'|**(lam+1) H**(lam+2) = eta**(1/lam+1) H**(-1/lam)``,
    which diverges at the front like ``(eta_f-eta)**(-3/(2lam+1))`` for a
    zero-angle drop; the part past the last sample is integrated with the
    front model.  Finite-angle drops with ``lam <= 1`` give ``inf``.
    """
    if not profile.has_front:
        raise ValueError("dissipation needs a profile with a front")
    lam = profile.params.lam
    eta, h = profile.eta, profile.h
    kp = _curvature_slope(eta, h, lam)
    integrand = 2.0 * math.pi * eta * np.abs(kp) ** (lam + 1.0) * h ** (lam + 2.0)
    body = float(np.trapezoid(integrand, eta))

    last = profile.state(-1)
    x = profile.eta_f - last.eta
    eta_mid = last.eta + 0.5 * x
    if profile.classification is Classification.FINITE_ANGLE:
        amp, power = -last.hp, 1.0
    else:
        amp, power = zero_angle_coefficient(lam, profile.eta_f), zero_angle_exponent(lam)
    expo = 1.0 - power / lam
    if expo <= 0.0:
        return math.inf
    # H = amp * x**power  =>  integrand = 2 pi eta**(2+1/lam) (amp x**power)**(-1/lam)
    tail = 2.0 * math.pi * eta_mid ** (2.0 + 1.0 / lam) * amp ** (-1.0 / lam) * x**expo / expo
    return body + tail


def constants_from_critical(critical):
    p = critical.profile
    return ConstantsRow(
        lam=critical.lam,
        kappa_lambda=critical.kappa_lambda,
        eta_f=p.eta_f,
        shape_factor=p.shape_factor,
        s_lambda=spreading_prefactor(critical.lam, p.eta_f, p.shape_factor),
        q_lambda=angle_prefactor(critical.lam, p.hp_at_eta_i, p.shape_factor),
    )


def _row(lam, tolerance, opts):
    try:
        return constants_from_critical(find_critical_kappa(lam, tolerance, opts))
    except Exception as exc:  # one bad lambda must not sink the batch
        log.warning("lam=%r failed: %s", lam, exc)
        return ConstantsRow(lam=lam, error=f"{type(exc).__name__}: {exc}")


def _thread_count(n_jobs, n_rows):
    if n_jobs is None:
        env = os.environ.get(THREADS_ENV)
        n_jobs = int(env) if env else 1
    return max(1, min(int(n_jobs), n_rows))


def build_constants_table(lambdas=PAPER_LAMBDAS, tolerance=1e-8, opts=None, n_jobs=None):
    """One :class:`ConstantsRow` per lambda, in input order.

    Failures are reported in the row's ``error`` field.  ``n_jobs`` defaults
    to ``$POWERLAW_DROPLET_THREADS`` (or 1).
    """
    lambdas = list(lambdas)
    workers = _thread_count(n_jobs, len(lambdas))
    if workers == 1:
        return [_row(lam, tolerance, opts) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda lam: _row(lam, tolerance, opts), lambdas))
