"""Shooting in the central curvature ``kappa0``.

Below the critical curvature the trajectory never reaches ``H = 0``; above it
the drop ends at a finite contact angle.  The boundary between the two is
the zero-contact-angle eigenvalue.
"""

from dataclasses import dataclass
import logging

from ._validation import check_positive, check_shear_thinning
from .similarity import (
    Classification,
    IntegratorOptions,
    OdeParams,
    SimilarityProfile,
    build_profile,
    classify,
    integrate_profile,
    march,
)

__all__ = ["BracketError", "CriticalSolution", "find_critical_kappa", "solve_drop"]

log = logging.getLogger(__name__)

KAPPA_GUESS = 3.0
KAPPA_RANGE = (1e-3, 1e3)


class BracketError(RuntimeError):
    """No Subcritical/FiniteAngle pair was found inside ``KAPPA_RANGE``."""


@dataclass(frozen=True, eq=False)
class CriticalSolution:
    lam: float
    kappa_lambda: float
    profile: SimilarityProfile
    bracket_width: float
    options: IntegratorOptions


def _is_subcritical(lam, kappa0, opts):
    return classify(OdeParams(lam, kappa0), opts) is Classification.SUBCRITICAL


def _bracket(lam, opts):
    lo_lim, hi_lim = KAPPA_RANGE
    k = KAPPA_GUESS
    if _is_subcritical(lam, k, opts):
        lo = k
        while True:
            k *= 2.0
            if k > hi_lim:
                raise BracketError(f"no finite-angle solution up to kappa0={hi_lim:g} for lam={lam:g}")
            if not _is_subcritical(lam, k, opts):
                return lo, k
            lo = k
    hi = k
    while True:
        k *= 0.5
        if k < lo_lim:
            raise BracketError(f"no subcritical solution down to kappa0={lo_lim:g} for lam={lam:g}")
        if _is_subcritical(lam, k, opts):
            return k, hi
        hi = k


def find_critical_kappa(lam, tolerance=1e-8, opts=None):
    """Bisect ``kappa0`` on the Subcritical/FiniteAngle boundary.

    The returned profile is integrated at the finite-angle end of the final
    bracket (so that it reaches ``h_stop``) and relabelled
    ``ZeroAngleCandidate``; ``kappa_lambda`` is the bracket midpoint.
    """
    lam = check_shear_thinning(lam)
    tolerance = check_positive(tolerance, "tolerance")
    opts = opts or IntegratorOptions()
    lo, hi = _bracket(lam, opts)
    while hi - lo >= tolerance:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _is_subcritical(lam, mid, opts):
            lo = mid
        else:
            hi = mid
    log.debug("lam=%g: kappa bracket [%.12g, %.12g]", lam, lo, hi)
    params = OdeParams(lam, hi)
    samples, _ = march(params, opts, store=True)
    profile = build_profile(params, samples, Classification.ZERO_ANGLE_CANDIDATE, "front")
    return CriticalSolution(
        lam=lam,
        kappa_lambda=0.5 * (lo + hi),
        profile=profile,
        bracket_width=hi - lo,
        options=opts,
    )


def solve_drop(lam, kappa0, opts=None):
    """Integrate one drop; a thin wrapper kept for symmetry with the shooter."""
    return integrate_profile(OdeParams(lam, kappa0), opts)

