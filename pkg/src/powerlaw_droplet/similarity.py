"""Similarity ODE for a spreading power-law drop.

The scaled height ``H(eta)`` and dimensionless curvature ``K = -H'' - H'/eta``
satisfy ``eta*H = H**(lam+2) * (-K')**lam`` with ``H(0)=1``, ``H'(0)=0`` and
``K(0)=kappa0``.  Everything here works in similarity variables; see
:mod:`powerlaw_droplet.dimensional` for physical units.
"""

from dataclasses import dataclass, field
from enum import Enum
import math
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from ._validation import check_positive

__all__ = [
    "Classification",
    "IntegrationError",
    "IntegratorOptions",
    "OdeParams",
    "PAPER_TABLE_OPTIONS",
    "SimilarityProfile",
    "SimilarityState",
    "classify",
    "front_extrapolation",
    "integrate_profile",
    "locate_inflection",
    "ode_rhs",
    "series_start",
]


class Classification(str, Enum):
    SUBCRITICAL = "Subcritical"
    FINITE_ANGLE = "FiniteAngle"
    ZERO_ANGLE_CANDIDATE = "ZeroAngleCandidate"


class IntegrationError(RuntimeError):
    """The RK4 march could not make progress (step underflow or step budget)."""


@dataclass(frozen=True)
class OdeParams:
    lam: float
    kappa0: float

    def __post_init__(self):
        object.__setattr__(self, "lam", check_positive(self.lam, "lam"))
        object.__setattr__(self, "kappa0", check_positive(self.kappa0, "kappa0"))


@dataclass(frozen=True)
class IntegratorOptions:
    """Knobs of the RK4 march.

    The step is ``clip(step_fraction * H, step_min, step_max)``.  ``front_test``
    decides what happens when ``H`` first drops below ``h_stop``:

    ``"asymptotic"``
        compare the local power ``1/q`` with ``q = 1 - H*H''/H'**2`` against the
        zero-angle value ``q_c = (2*lam+1)/(3*lam)``; ``q < q_c`` means the
        trajectory is bending back up and is called Subcritical.
    ``"touch"``
        any crossing of ``h_stop`` counts as reaching the front.
    """

    epsilon_start: float = 1e-6
    h_stop: float = 1e-6
    step_fraction: float = 1e-4
    step_min: float = 1e-12
    step_max: float = 1e-3
    eta_max: float = 10.0
    front_test: str = "asymptotic"
    max_steps: int = 200_000_000

    def __post_init__(self):
        for name in ("epsilon_start", "h_stop", "step_fraction", "step_min", "step_max", "eta_max"):
            check_positive(getattr(self, name), name)
        if self.epsilon_start >= 1e-3:
            raise ValueError("epsilon_start must be below 1e-3")
        if self.h_stop >= 1e-2:
            raise ValueError("h_stop must be below 1e-2")
        if self.step_min >= self.step_max:
            raise ValueError("step_min must be smaller than step_max")
        if self.front_test not in ("asymptotic", "touch"):
            raise ValueError(f"unknown front_test {self.front_test!r}")


# h_stop, step size and front rule that reproduce the published constants table
PAPER_TABLE_OPTIONS = IntegratorOptions(
    h_stop=1e-12, step_fraction=1e-3, step_min=1e-16, front_test="touch"
)


class SimilarityState(NamedTuple):
    eta: float
    h: float
    hp: float
    k: float
    i_acc: float


def _curvature_slope(eta, h, lam):
    # K' from eta*H = H**(lam+2) * (-K')**lam, taking the branch K' <= 0
    return -(eta ** (1.0 / lam)) * h ** (-(lam + 1.0) / lam)


def ode_rhs(state, params):
    """Derivative ``(H', H'', K', dI/deta)`` of a :class:`SimilarityState`."""
    eta, h, hp, k = state[0], state[1], state[2], state[3]
    if not eta > 0.0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    if not h > 0.0:
        raise ValueError(f"H must be positive, got {h!r}")
    return (hp, -k - hp / eta, _curvature_slope(eta, h, params.lam), 2.0 * math.pi * eta * h)


def series_start(params, epsilon):
    """Regular local solution at ``eta = epsilon`` (removes the 0/0 in ``H'/eta``)."""
    eps = check_positive(epsilon, "epsilon")
    lam, k0 = params.lam, params.kappa0
    return SimilarityState(
        eta=eps,
        h=1.0 - k0 * eps**2 / 4.0,
        hp=-k0 * eps / 2.0,
        k=k0 - lam / (lam + 1.0) * eps ** ((lam + 1.0) / lam),
        i_acc=math.pi * eps**2 - math.pi * k0 * eps**4 / 8.0,
    )


def zero_angle_exponent(lam):
    return 3.0 * lam / (2.0 * lam + 1.0)


def zero_angle_coefficient(lam, eta_f):
    """Prefactor of the leading near-front term ``C * (eta_f - eta)**p``."""
    if lam <= 1.0:
        raise ValueError("the zero-angle front expansion needs lam > 1")
    base = (2.0 * lam + 1.0) ** 3 / (3.0 * lam * (lam - 1.0) * (lam + 2.0))
    return base ** (lam / (2.0 * lam + 1.0)) * eta_f ** (1.0 / (2.0 * lam + 1.0))


def front_extrapolation(last, classification, params):
    """Front position and the shape-factor contribution beyond ``last``.

    Returns ``(eta_f, tail)`` where ``tail`` integrates ``2*pi*eta*H`` from
    ``last.eta`` to ``eta_f`` with the local front model.
    """
    classification = Classification(classification)
    eta0, h0, hp0 = last.eta, last.h, last.hp
    if classification is Classification.FINITE_ANGLE:
        slope = -hp0
        if not slope > 0.0:
            raise ValueError("finite-angle front needs H' < 0 at the last sample")
        x = h0 / slope
        eta_f = eta0 + x
        # H = slope * (eta_f - eta)
        tail = 2.0 * math.pi * slope * (eta_f * x**2 / 2.0 - x**3 / 3.0)
        return eta_f, tail
    if classification is Classification.ZERO_ANGLE_CANDIDATE:
        lam = params.lam
        p = zero_angle_exponent(lam)
        eta_f = eta0
        for _ in range(50):
            c = zero_angle_coefficient(lam, eta_f)
            new = eta0 + (h0 / c) ** (1.0 / p)
            if abs(new - eta_f) <= 1e-15 * new:
                eta_f = new
                break
            eta_f = new
        c = zero_angle_coefficient(lam, eta_f)
        x = eta_f - eta0
        tail = 2.0 * math.pi * c * (eta_f * x ** (p + 1.0) / (p + 1.0) - x ** (p + 2.0) / (p + 2.0))
        return eta_f, tail
    raise ValueError("a subcritical profile has no front")


def locate_inflection(samples):
    """Maximum-slope point where ``H'' = -K - H'/eta`` changes sign.

    ``samples`` is an ``(n, >=4)`` array of ``eta, H, H', K`` rows.  Returns
    ``(eta_i, H'(eta_i))`` linearly interpolated inside the bracketing pair;
    with several sign changes the one with the largest ``|H'|`` wins.
    """
    s = np.asarray(samples, dtype=float)
    eta, hp, k = s[:, 0], s[:, 2], s[:, 3]
    hpp = -k - hp / eta
    idx = np.nonzero(np.signbit(hpp[:-1]) != np.signbit(hpp[1:]))[0]
    if idx.size == 0:
        raise ValueError("H'' does not change sign over the sampled range")
    w = hpp[idx] / (hpp[idx] - hpp[idx + 1])
    eta_i = eta[idx] + w * (eta[idx + 1] - eta[idx])
    hp_i = hp[idx] + w * (hp[idx + 1] - hp[idx])
    best = int(np.argmax(np.abs(hp_i)))
    return float(eta_i[best]), float(hp_i[best])


@dataclass(frozen=True, eq=False)
class SimilarityProfile:
    """An integrated similarity profile.

    ``samples`` has columns ``eta, H, H', K, I`` (``I`` being the running
    volume integral).  Front data are ``None`` for Subcritical profiles.
    """

    params: OdeParams
    samples: np.ndarray = field(repr=False)
    classification: Classification
    termination: str
    eta_f: Optional[float] = None
    contact_slope: Optional[float] = None
    eta_i: Optional[float] = None
    hp_at_eta_i: Optional[float] = None
    shape_factor: Optional[float] = None

    @property
    def eta(self):
        return self.samples[:, 0]

    @property
    def h(self):
        return self.samples[:, 1]

    @property
    def hp(self):
        return self.samples[:, 2]

    @property
    def k(self):
        return self.samples[:, 3]

    @property
    def i_acc(self):
        return self.samples[:, 4]

    def __len__(self):
        return self.samples.shape[0]

    def state(self, index):
        return SimilarityState(*map(float, self.samples[index]))

    @property
    def has_front(self):
        return self.classification is not Classification.SUBCRITICAL

    def evaluate(self, eta):
        """``H`` at arbitrary ``eta >= 0``.

        Linear between samples, the front model beyond the last sample and
        zero past ``eta_f``.  Subcritical profiles give NaN past their last
        sample.  Scalars in, scalars out.
        """
        scalar = np.ndim(eta) == 0
        x = np.atleast_1d(np.asarray(eta, dtype=float))
        grid = np.concatenate(([0.0], self.eta))
        vals = np.concatenate(([1.0], self.h))
        out = np.interp(x, grid, vals)
        last = self.state(-1)
        beyond = x > last.eta
        if np.any(beyond):
            xb = x[beyond]
            if self.classification is Classification.SUBCRITICAL:
                out[beyond] = np.nan
            elif self.classification is Classification.FINITE_ANGLE:
                out[beyond] = np.maximum(last.h + last.hp * (xb - last.eta), 0.0)
            else:
                c = zero_angle_coefficient(self.params.lam, self.eta_f)
                p = zero_angle_exponent(self.params.lam)
                out[beyond] = c * np.clip(self.eta_f - xb, 0.0, None) ** p
        if self.eta_f is not None:
            out[x >= self.eta_f] = 0.0
        return float(out[0]) if scalar else out


def _termination_name(code):
    return {
        _kernels.FRONT: "front",
        _kernels.TURNED: "turned",
        _kernels.ETA_MAX: "eta_max",
        _kernels.UNDERFLOW: "underflow",
        _kernels.MAX_STEPS: "max_steps",
    }[code]


def _front_indicator(last, lam):
    """``q = 1 - H*H''/H'**2``; tends to ``1/p`` on a power-law front ``H ~ x**p``."""
    if last.hp >= 0.0:
        return -math.inf
    hpp = -last.k - last.hp / last.eta
    return 1.0 - last.h * hpp / last.hp**2


def _classify(samples, code, params, opts):
    if code in (_kernels.TURNED, _kernels.ETA_MAX):
        return Classification.SUBCRITICAL
    last = SimilarityState(*map(float, samples[-1]))
    if opts.front_test == "asymptotic" and params.lam > 1.0:
        q_c = (2.0 * params.lam + 1.0) / (3.0 * params.lam)
        if _front_indicator(last, params.lam) < q_c:
            return Classification.SUBCRITICAL
    return Classification.FINITE_ANGLE


def build_profile(params, samples, classification, termination):
    """Attach front, inflection and shape-factor data to raw samples."""
    classification = Classification(classification)
    if classification is Classification.SUBCRITICAL:
        return SimilarityProfile(params, samples, classification, termination)
    last = SimilarityState(*map(float, samples[-1]))
    eta_f, tail = front_extrapolation(last, classification, params)
    contact = -last.hp if classification is Classification.FINITE_ANGLE else None
    try:
        eta_i, hp_i = locate_inflection(samples)
    except ValueError:
        eta_i = hp_i = None
    return SimilarityProfile(
        params,
        samples,
        classification,
        termination,
        eta_f=eta_f,
        contact_slope=contact,
        eta_i=eta_i,
        hp_at_eta_i=hp_i,
        shape_factor=last.i_acc + tail,
    )


def march(params, opts, store=True):
    """Run the compiled RK4 march; returns ``(samples, termination_code)``."""
    start = np.array(series_start(params, opts.epsilon_start), dtype=float)
    samples, code = _kernels.march(
        params.lam,
        start,
        opts.h_stop,
        opts.step_fraction,
        opts.step_min,
        opts.step_max,
        opts.eta_max,
        store,
        opts.max_steps,
    )
    if code == _kernels.UNDERFLOW:
        raise IntegrationError(
            f"step underflow below step_min={opts.step_min:g} at eta={samples[-1, 0]:.6g}, "
            f"H={samples[-1, 1]:.3g} (lam={params.lam:g}, kappa0={params.kappa0:.9g})"
        )
    if code == _kernels.MAX_STEPS:
        raise IntegrationError(
            f"step budget of {opts.max_steps} exhausted at eta={samples[-1, 0]:.6g} "
            f"(lam={params.lam:g}, kappa0={params.kappa0:.9g})"
        )
    return samples, code


def classify(params, opts=None):
    """Classification only, without storing the trajectory."""
    opts = opts or IntegratorOptions()
    samples, code = march(params, opts, store=False)
    return _classify(samples, code, params, opts)


def integrate_profile(params, opts=None):
    """Integrate from the centre toward the front and post-process the result."""
    opts = opts or IntegratorOptions()
    samples, code = march(params, opts, store=True)
    classification = _classify(samples, code, params, opts)
    return build_profile(params, samples, classification, _termination_name(code))
