"""Reliability-based and automorphism-aware polar code construction."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import log_ndtr

from .code import PolarCode
from .monomials import Monomial, MonomialSet, monomial_of_index

log = logging.getLogger(__name__)

# two-segment approximation of phi(x) = 1 - E[tanh(L/2)], L ~ N(x, 2x)
_A, _B, _C = 0.4527, 0.86, 0.0218
_SPLIT = 10.0
# Below _LOW the power-law segment overshoots (it exceeds 1 near x = 0.03), which
# flattens the smallest means and breaks the partial order. There the mean is
# tracked through m(x) = 1 - phi(x) = E[tanh(L/2)], computed by Gauss-Hermite
# quadrature; the check update is then exactly m -> m^2. _LOW is where the
# quadrature and the power law cross, so phi stays continuous and decreasing.
_LOW = 1.455527014132893
_TINY = 1e-8
_GH_Z, _GH_W = np.polynomial.hermite_e.hermegauss(80)
_GH_W = _GH_W / _GH_W.sum()


@dataclass(frozen=True)
class ReliabilitySequence:
    """Bit-channel indices, most reliable first."""

    n: int
    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(1 << self.n)):
            raise ValueError("reliability order must be a permutation of [0, N)")
        object.__setattr__(self, "order", order)

    @property
    def N(self) -> int:
        return 1 << self.n

    def info_set(self, K: int) -> tuple[int, ...]:
        if not 0 <= K <= self.N:
            raise ValueError(f"K={K} out of range for N={self.N}")
        return tuple(sorted(self.order[:K]))

    def code(self, K: int, crc=None) -> PolarCode:
        return PolarCode(self.n, self.info_set(K), crc)


# -- Gaussian approximation ----------------------------------------------------


def _tanh_mean(x: np.ndarray) -> np.ndarray:
    """m(x) = E[tanh(L/2)] for L ~ N(x, 2x); series x/2 - x^2/4 for tiny x."""
    x = np.asarray(x, dtype=float)
    out = x / 2 - x * x / 4
    big = x >= _TINY
    xb = x[big, None]
    out[big] = np.tanh((xb + np.sqrt(2 * xb) * _GH_Z) / 2) @ _GH_W
    return out


_LX_GRID = np.linspace(np.log(_TINY), np.log(_LOW), 20001)
_LM_GRID = np.log(_tanh_mean(np.exp(_LX_GRID)))


def _inverse_tanh_mean(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    out = 2 * m + 2 * m * m  # inverse of the series
    big = m >= np.exp(_LM_GRID[0])
    if big.any():
        # monotone log-log table, refined by one Newton step along the table slope
        lt = np.log(m[big])
        lx = np.interp(lt, _LM_GRID, _LX_GRID)
        k = np.clip(np.searchsorted(_LM_GRID, lt), 1, _LM_GRID.size - 1)
        slope = (_LX_GRID[k] - _LX_GRID[k - 1]) / (_LM_GRID[k] - _LM_GRID[k - 1])
        lx = lx - slope * (np.log(_tanh_mean(np.exp(lx))) - lt)
        out[big] = np.exp(lx)
    return out


def log_phi(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    ex = (x > 0) & (x < _LOW)
    lo = (x >= _LOW) & (x < _SPLIT)
    hi = x >= _SPLIT
    out[ex] = np.log1p(-_tanh_mean(x[ex]))
    out[lo] = -_A * x[lo] ** _B + _C
    xh = x[hi]
    out[hi] = 0.5 * np.log(np.pi / xh) - xh / 4 + np.log1p(-10.0 / (7.0 * xh))
    return out


def inverse_log_phi(ly: np.ndarray) -> np.ndarray:
    ly = np.asarray(ly, dtype=float)
    out = np.zeros_like(ly)
    low, split = log_phi(np.array([_LOW, _SPLIT]))
    seg0 = (ly < 0) & (ly > low)
    out[seg0] = _inverse_tanh_mean(-np.expm1(ly[seg0]))
    seg1 = (ly <= low) & (ly > split)
    out[seg1] = ((_C - ly[seg1]) / _A) ** (1 / _B)
    seg2 = ly <= split
    if seg2.any():
        target = ly[seg2]
        # Newton on the asymptotic segment, which is smooth and decreasing for x >= 10
        x = np.maximum(-4.0 * target, _SPLIT)
        for _ in range(50):
            r = 7.0 * x
            f = 0.5 * np.log(np.pi / x) - x / 4 + np.log1p(-10.0 / r) - target
            df = -0.5 / x - 0.25 + 10.0 / (r * x - 10.0 * x)
            step = f / df
            x = np.maximum(x - step, _SPLIT)
            if np.all(np.abs(step) <= 1e-13 * x):
                break
        out[seg2] = x
    return out


def ga_check(mu: np.ndarray) -> np.ndarray:
    """Mean LLR after a check-node combination of two channels with mean ``mu``."""
    mu = np.asarray(mu, dtype=float)
    out = np.empty_like(mu)
    small = mu < _LOW
    out[small] = _inverse_tanh_mean(_tanh_mean(mu[small]) ** 2)
    lp = log_phi(mu[~small])
    # 1 - (1 - phi)^2 = phi (2 - phi), evaluated in the log domain
    out[~small] = inverse_log_phi(lp + np.log1p(-np.expm1(lp)))
    return out


def ga_means(n: int, design_snr_db: float) -> np.ndarray:
    """Mean LLR of every bit channel; design SNR taken as Es/N0 in dB."""
    mu = np.array([4.0 * 10 ** (design_snr_db / 10)])
    for _ in range(n):
        nxt = np.empty(2 * mu.size)
        nxt[0::2] = ga_check(mu)
        nxt[1::2] = 2.0 * mu
        mu = nxt
    return mu


def _sort_reliability(score: np.ndarray) -> tuple[int, ...]:
    idx = np.arange(score.size)
    # descending score, ties to the higher index
    return tuple(int(i) for i in np.lexsort((-idx, -score)))


def design_ga(n: int, design_snr_db: float) -> ReliabilitySequence:
    if n < 1:
        raise ValueError("n must be >= 1")
    return ReliabilitySequence(n, _sort_reliability(ga_means(n, design_snr_db)))


def ga_bler_bound(n: int, info_set: Iterable[int], design_snr_db: float) -> float:
    """Union bound on block error probability from the GA channel means."""
    mu = ga_means(n, design_snr_db)[list(info_set)]
    # P(L < 0) for L ~ N(mu, 2 mu) is Q(sqrt(mu / 2))
    return float(np.exp(log_ndtr(-np.sqrt(mu / 2))).sum())


def design_ga_for_bler(n: int, K: int, target_bler: float = 1e-3,
                       snr_range: tuple[float, float] = (-10.0, 30.0), tol: float = 1e-3) -> PolarCode:
    """GA design at the SNR where the predicted BLER of the ``K``-code hits ``target_bler``."""
    lo, hi = snr_range
    for _ in range(200):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        mu = ga_means(n, mid)
        best = np.array(_sort_reliability(mu)[:K], dtype=int)
        if np.exp(log_ndtr(-np.sqrt(mu[best] / 2))).sum() > target_bler:
            lo = mid
        else:
            hi = mid
    return design_ga(n, hi).code(K)


# -- 5G sequence ---------------------------------------------------------------


def load_5g_sequence(n: int, path: Optional[Path] = None) -> ReliabilitySequence:
    """5G NR reliability sequence restricted to length ``2^n``.

    The data file lists indices from least to most reliable, one per line.
    """
    if not 0 <= n <= 10:
        raise ValueError("the 5G sequence covers n <= 10")
    if path is None:
        text = resources.files("polar_ae").joinpath("data/5g_sequence.txt").read_text()
    else:
        text = Path(path).read_text()
    try:
        q = [int(line) for line in text.split()]
    except ValueError as exc:
        raise ValueError(f"malformed 5G sequence file: {exc}") from None
    if sorted(q) != list(range(1024)):
        raise ValueError("malformed 5G sequence file: expected a permutation of 0..1023")
    N = 1 << n
    return ReliabilitySequence(n, tuple(i for i in reversed(q) if i < N))


def reed_muller(r: int, n: int) -> PolarCode:
    if not 0 <= r <= n:
        raise ValueError("need 0 <= r <= n")
    return PolarCode(n, tuple(i for i in range(1 << n) if bin(i).count("1") >= n - r))


# -- UTL design ----------------------------------------------------------------


class UtlDesignError(ValueError):
    """A target needs more monomials than the remaining budget allows."""

    def __init__(self, message: str, target=None, candidates: Sequence[Monomial] = ()):
        super().__init__(message)
        self.target = target
        self.candidates = list(candidates)


def substitution_candidates(indices: Iterable[int], n: int, i: int, j: int) -> list[int]:
    """Row indices missing from the set after substituting ``x̄_i -> x̄_j``.

    Works on binary expansions: members with bit ``i`` clear get bit ``i``
    set and bit ``j`` cleared.
    """
    s = set(indices)
    if i == j:
        return []
    out = set()
    for idx in s:
        if not idx >> i & 1:
            new = (idx | 1 << i) & ~(1 << j)
            if new not in s:
                out.add(new)
    return sorted(out)


@dataclass
class UtlDesignState:
    s: int
    monomials: MonomialSet

    @property
    def candidates(self) -> list[list[list[Monomial]]]:
        return candidate_matrix(self)


def candidate_matrix(state: UtlDesignState | MonomialSet) -> list[list[list[Monomial]]]:
    """``n x n`` matrix of monomials to add so that position ``(i, j)`` becomes admissible.

    Only the strictly upper-triangular part is filled; an empty list means the
    position is already admissible.
    """
    mset = state.monomials if isinstance(state, UtlDesignState) else state
    n = mset.n
    mat: list[list[list[Monomial]]] = [[[] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            mat[i][j] = [monomial_of_index(c, n) for c in substitution_candidates(mset.indices, n, i, j)]
    return mat


def _needed(current: set[int], n: int, targets: Sequence[tuple[int, int]]) -> list[int]:
    need: set[int] = set()
    for i, j in targets:
        need.update(substitution_candidates(current, n, i, j))
    return sorted(need)


def _close_targets(current: set[int], n: int, targets, budget: int) -> tuple[set[int], list[int]]:
    """Add monomials until every target is admissible; raise if the budget runs out."""
    cur = set(current)
    added: list[int] = []
    while True:
        need = _needed(cur, n, targets)
        if not need:
            return cur, added
        if len(added) + len(need) > budget:
            raise UtlDesignError(
                f"target {targets[-1]} needs {len(need)} more monomials "
                f"({', '.join(str(monomial_of_index(c, n)) for c in need)}) "
                f"but only {budget - len(added)} remain",
                target=targets[-1],
                candidates=[monomial_of_index(c, n) for c in need],
            )
        cur.update(need)
        added.extend(need)


def _greedy_pick(cur: set[int], n: int, processed, budget: int):
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in processed:
                continue
            try:
                _, added = _close_targets(cur, n, list(processed) + [(i, j)], budget)
            except UtlDesignError:
                continue
            if not added:
                continue
            key = (len(added), -i, -j)
            if best is None or key < best[0]:
                best = (key, (i, j))
    return None if best is None else best[1]


def utl_design(seq: ReliabilitySequence, K: int, s: int,
               targets: Optional[Sequence[tuple[int, int]]] = None, greedy: bool = False,
               crc=None) -> PolarCode:
    """Grow the top ``K - s`` set of ``seq`` back to dimension ``K`` along UTL targets.

    Targets are processed in order; each one adds the monomials its
    substitution produces (re-closing earlier targets as needed).  With
    ``greedy=True`` targets are chosen automatically, cheapest first and
    lower-right corner preferred.  If the targets run out before ``K`` is
    reached the partial code is returned with a warning.
    """
    n = seq.n
    if not 0 <= s < K <= seq.N:
        raise ValueError(f"need 0 <= s < K <= N, got s={s}, K={K}")
    targets = list(targets or [])
    for i, j in targets:
        if not 0 <= i < j < n:
            raise ValueError(f"target {(i, j)} is not strictly upper triangular for n={n}")
    cur = set(seq.order[: K - s])
    processed: list[tuple[int, int]] = []
    queue = list(targets)
    while len(cur) < K:
        budget = K - len(cur)
        if queue:
            t = queue.pop(0)
        elif greedy:
            t = _greedy_pick(cur, n, processed, budget)
            if t is None:
                break
        else:
            break
        cur, added = _close_targets(cur, n, processed + [t], budget)
        processed.append(t)
        log.debug("target %s added %s", t, added)
    for t in queue:
        # remaining targets must already hold without extra monomials
        cur, _ = _close_targets(cur, n, processed + [t], 0)
        processed.append(t)
    if len(cur) < K:
        warnings.warn(
            f"UTL design stopped at dimension {len(cur)} < {K}; processed targets {processed}",
            stacklevel=2,
        )
    return PolarCode(n, tuple(cur), crc)
