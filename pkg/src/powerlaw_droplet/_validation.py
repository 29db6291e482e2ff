"""Small argument checks shared by the solvers and estimators."""

import math
import numbers

import numpy as np
from sklearn.utils import check_array


def check_positive(value, name):
    """Return ``value`` as float, raising ``ValueError`` unless finite and > 0."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_shear_thinning(lam, name="lam"):
    """Like :func:`check_positive` but also requires ``lam > 1``."""
    lam = check_positive(lam, name)
    if lam <= 1.0:
        raise ValueError(
            f"{name} must exceed 1 (shear-thinning); got {lam!r}. "
            "No zero-contact-angle solution exists for lambda <= 1."
        )
    return lam


def check_1d(x, name="X"):
    """Accept a scalar, 1-D array or single-column 2-D array; return a 1-D float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    arr = check_array(arr, ensure_2d=False, dtype=float, input_name=name)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr
