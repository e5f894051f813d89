"""SC, SCL and BP decoders for polar codes.

LLRs follow the convention positive <=> bit 0 more likely.  The functional
entry points take one frame or a batch (one frame per row); the estimator
classes wrap them behind ``fit``/``predict``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import LLR_CLAMP, check_bits, check_code, check_llr
from .code import PolarCode, extract_payload, polar_transform


@dataclass
class DecodeResult:
    """Decoded codeword(s), payload(s) and correlation score ``sum (1-2x) llr``."""

    codeword: np.ndarray
    payload: np.ndarray
    score: np.ndarray | float

    def __getitem__(self, k) -> "DecodeResult":
        return DecodeResult(self.codeword[k], self.payload[k], self.score[k])


def f_minsum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def f_exact(a, b):
    t = np.clip(np.tanh(a / 2) * np.tanh(b / 2), -1 + 1e-15, 1 - 1e-15)
    return 2 * np.arctanh(t)


def g_update(a, b, u):
    return b + (1 - 2 * u.astype(np.float64)) * a


def correlation(codeword, llr) -> np.ndarray:
    return np.sum((1 - 2 * np.asarray(codeword, dtype=np.float64)) * llr, axis=-1)


def _result(code: PolarCode, x: np.ndarray, llr: np.ndarray, single: bool) -> DecodeResult:
    x = x.astype(np.uint8)
    res = DecodeResult(x, extract_payload(code, x), correlation(x, llr))
    return res[0] if single else res


# -- SC ------------------------------------------------------------------------


def _sc_node(llr: np.ndarray, info: np.ndarray, f) -> np.ndarray:
    if not info.any():
        return np.zeros(llr.shape, dtype=np.uint8)
    if info.all():
        # every SC decision inside a rate-1 node reduces to the hard decision
        return (llr < 0).astype(np.uint8)
    h = llr.shape[1] // 2
    a, b = llr[:, :h], llr[:, h:]
    x1 = _sc_node(f(a, b), info[:h], f)
    x2 = _sc_node(g_update(a, b, x1), info[h:], f)
    return np.concatenate([x1 ^ x2, x2], axis=1)


def sc_decode(code: PolarCode, llr, exact: bool = False) -> DecodeResult:
    llr, single = check_llr(llr, code.N)
    x = _sc_node(llr, code.info_mask, f_exact if exact else f_minsum)
    return _result(code, x, llr, single)


# -- SCL -----------------------------------------------------------------------


def path_metric_increment(llr, u, exact: bool = False):
    """Penalty for deciding ``u`` against leaf LLR ``llr`` (never negative)."""
    llr = np.asarray(llr, dtype=np.float64)
    u = np.asarray(u)
    if exact:
        return np.logaddexp(0.0, -(1 - 2 * u) * llr)
    return np.where(u != (llr < 0), np.abs(llr), 0.0)


def _take(arr, idx):
    """Per-frame path gather: ``arr[b, idx[b, p]]`` for (B, P, ...) arrays."""
    if arr.ndim == 3:
        return np.take_along_axis(arr, idx[:, :, None], axis=1)
    return np.take_along_axis(arr, idx, axis=1)


def _scl_node(llr, info, pm, L, f, exact):
    """One subtree for a batch of lists.

    ``llr`` is (B, P, m) and ``pm`` is (B, P); the path count P depends only on
    the frozen pattern, so it is shared by every frame.  Returns the partial
    codewords (B, P', m), their metrics and the input path each one extends.
    """
    B, P, m = llr.shape
    if m == 1:
        l = llr[:, :, 0]
        if not info[0]:
            origin = np.broadcast_to(np.arange(P), (B, P))
            return np.zeros((B, P, 1), dtype=np.uint8), pm + path_metric_increment(l, 0, exact), origin
        cand = np.empty((B, 2 * P))
        cand[:, 0::2] = pm + path_metric_increment(l, 0, exact)
        cand[:, 1::2] = pm + path_metric_increment(l, 1, exact)
        # stable sort: on equal metrics the lower path index survives
        keep = np.sort(np.argsort(cand, axis=1, kind="stable")[:, :L], axis=1)
        return (keep % 2).astype(np.uint8)[:, :, None], np.take_along_axis(cand, keep, axis=1), keep // 2
    h = m // 2
    a, b = llr[:, :, :h], llr[:, :, h:]
    x1, pm, o1 = _scl_node(f(a, b), info[:h], pm, L, f, exact)
    a, b = _take(a, o1), _take(b, o1)
    x2, pm, o2 = _scl_node(g_update(a, b, x1), info[h:], pm, L, f, exact)
    return np.concatenate([_take(x1, o2) ^ x2, x2], axis=2), pm, _take(o1, o2)


def _scl_batch(code: PolarCode, llr: np.ndarray, L: int, exact: bool) -> np.ndarray:
    f = f_exact if exact else f_minsum
    B = llr.shape[0]
    x, pm, _ = _scl_node(llr[:, None, :], code.info_mask, np.zeros((B, 1)), L, f, exact)
    order = np.argsort(pm, axis=1, kind="stable")
    best = order[:, 0]
    if code.crc is not None:
        u = polar_transform(_take(x, order))[:, :, code.info_mask]
        ok = code.crc.check(u)
        # first CRC-passing path in metric order, else the best metric
        best = np.where(ok.any(axis=1), order[np.arange(B), np.argmax(ok, axis=1)], best)
    return x[np.arange(B), best]


def scl_decode(code: PolarCode, llr, L: int = 8, exact: bool = False) -> DecodeResult:
    """List decoding; with a CRC the best CRC-passing path wins (else the best metric)."""
    if L < 1:
        raise ValueError("list size must be >= 1")
    llr, single = check_llr(llr, code.N)
    x = _scl_batch(code, llr, L, exact) if len(llr) else np.zeros((0, code.N), dtype=np.uint8)
    return _result(code, x, llr, single)


# -- BP ------------------------------------------------------------------------


def _bp_iterate(L, R, n, f):
    for s in range(n):
        h = 1 << s
        Rs = R[s].reshape(R[s].shape[0], -1, 2, h)
        Ln = L[s + 1].reshape(Rs.shape)
        Rn = R[s + 1].reshape(Rs.shape)
        Rn[:, :, 0] = f(Rs[:, :, 0], Ln[:, :, 1] + Rs[:, :, 1])
        Rn[:, :, 1] = f(Rs[:, :, 0], Ln[:, :, 0]) + Rs[:, :, 1]
    for s in range(n - 1, -1, -1):
        h = 1 << s
        Rs = R[s].reshape(R[s].shape[0], -1, 2, h)
        Ln = L[s + 1].reshape(Rs.shape)
        Ls = L[s].reshape(Rs.shape)
        Ls[:, :, 0] = f(Ln[:, :, 0], Ln[:, :, 1] + Rs[:, :, 1])
        Ls[:, :, 1] = f(Ln[:, :, 0], Rs[:, :, 0]) + Ln[:, :, 1]


def bp_decode(code: PolarCode, llr, iters: int = 60, early_stop: bool = True,
              exact: bool = False) -> DecodeResult:
    """Flooding belief propagation on the ``n``-stage factor graph.

    Each iteration sweeps u-side to x-side, then back.  A frame stops once its
    u-side decision re-encodes to its x-side decision.  The output is always
    re-encoded from the decided information bits.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    llr, single = check_llr(llr, code.N)
    n, N = code.n, code.N
    f = f_exact if exact else f_minsum
    B = llr.shape[0]
    frozen = ~code.info_mask
    prior = np.where(frozen, LLR_CLAMP, 0.0)
    u_hat = np.zeros((B, N), dtype=np.uint8)
    active = np.arange(B)
    L = [np.zeros((B, N)) for _ in range(n + 1)]
    R = [np.zeros((B, N)) for _ in range(n + 1)]
    L[n][:] = llr
    R[0][:] = prior
    for _ in range(iters):
        if active.size == 0:
            break
        _bp_iterate(L, R, n, f)
        u = ((L[0] + R[0]) < 0).astype(np.uint8)
        u[:, frozen] = 0
        u_hat[active] = u
        if not early_stop:
            continue
        x = ((L[n] + R[n]) < 0).astype(np.uint8)
        done = np.all(polar_transform(u) == x, axis=1)
        if done.any():
            keep = ~done
            active = active[keep]
            L = [a[keep] for a in L]
            R = [a[keep] for a in R]
    x = polar_transform(u_hat)
    return _result(code, x, llr, single)


# -- estimators ----------------------------------------------------------------


class PolarDecoder(BaseEstimator):
    """Common ``fit``/``predict`` surface for the decoders.

    ``fit`` only validates the code (and the shape of ``X`` if given), so it
    may be called without data.  ``predict`` maps an ``(n_frames, N)`` LLR
    array to codewords.
    """

    def fit(self, X=None, y=None):
        self.code_ = check_code(self.code)
        if X is not None:
            check_llr(X, self.code_.N)
        self.n_features_in_ = self.code_.N
        return self

    def _decode(self, X) -> DecodeResult:
        raise NotImplementedError

    def decode(self, X) -> DecodeResult:
        check_is_fitted(self, "code_")
        return self._decode(X)

    def predict(self, X) -> np.ndarray:
        return self.decode(X).codeword

    def predict_payload(self, X) -> np.ndarray:
        return self.decode(X).payload

    def score(self, X, y) -> float:
        """Fraction of frames whose codeword is recovered exactly (``1 - BLER``)."""
        pred = np.atleast_2d(self.predict(X))
        y = check_bits(y, self.code_.N)
        return float(np.mean(np.all(pred == y, axis=1)))


class SCDecoder(PolarDecoder):
    def __init__(self, code: Optional[PolarCode] = None, exact: bool = False):
        self.code = code
        self.exact = exact

    def _decode(self, X):
        return sc_decode(self.code_, X, exact=self.exact)


class SCLDecoder(PolarDecoder):
    def __init__(self, code: Optional[PolarCode] = None, list_size: int = 8, exact: bool = False):
        self.code = code
        self.list_size = list_size
        self.exact = exact

    def _decode(self, X):
        return scl_decode(self.code_, X, L=self.list_size, exact=self.exact)


class BPDecoder(PolarDecoder):
    def __init__(self, code: Optional[PolarCode] = None, iters: int = 60, early_stop: bool = True,
                 exact: bool = False):
        self.code = code
        self.iters = iters
        self.early_stop = early_stop
        self.exact = exact

    def _decode(self, X):
        return bp_decode(self.code_, X, iters=self.iters, early_stop=self.early_stop, exact=self.exact)
