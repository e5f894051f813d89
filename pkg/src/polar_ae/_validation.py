"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .code import PolarCode

LLR_CLAMP = 120.0


def check_code(code) -> PolarCode:
    if isinstance(code, dict):
        code = PolarCode.from_dict(code)
    if not isinstance(code, PolarCode):
        raise TypeError(f"expected a PolarCode, got {type(code).__name__}")
    return code


def check_llr(X, N: int) -> tuple[np.ndarray, bool]:
    """Return a clamped float ``(n_frames, N)`` array and whether the input was 1-D."""
    single = np.ndim(X) == 1
    X = check_array(np.atleast_2d(X), dtype=np.float64, ensure_all_finite="allow-nan", copy=True)
    if X.shape[1] != N:
        raise ValueError(f"LLR rows have length {X.shape[1]}, code length is {N}")
    if np.isnan(X).any():
        raise ValueError("LLR input contains NaN")
    np.clip(X, -LLR_CLAMP, LLR_CLAMP, out=X)
    return X, single


def check_bits(y, N: int) -> np.ndarray:
    y = check_array(np.atleast_2d(y), dtype=np.uint8)
    if y.shape[1] != N:
        raise ValueError(f"codeword rows have length {y.shape[1]}, expected {N}")
    if (y > 1).any():
        raise ValueError("codewords must be binary")
    return y
