"""Affine and UTL automorphisms of polar (monomial) codes.

A transform ``x -> A x + b`` on the variables induces the coordinate
permutation ``map[p] = A bits(p) + b``; a word is permuted as
``x'[map[p]] = x[p]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .code import PolarCode, codebook, contains
from .construction import substitution_candidates


def gf2_rank(M: np.ndarray) -> int:
    rows = [int("".join(str(int(b)) for b in row[::-1]), 2) if len(row) else 0 for row in np.asarray(M)]
    rank = 0
    while rows:
        piv = max(rows)
        if not piv:
            break
        rows.remove(piv)
        top = piv.bit_length() - 1
        rows = [r ^ piv if r >> top & 1 else r for r in rows]
        rank += 1
    return rank


def _bits(n: int) -> np.ndarray:
    """``(2^n, n)`` matrix whose row ``p`` is the bit vector of ``p``."""
    p = np.arange(1 << n)
    return ((p[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)


@dataclass(frozen=True, eq=False)
class AffineTransform:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.uint8) & 1
        b = np.asarray(self.b, dtype=np.uint8) & 1
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if b.shape != (A.shape[0],):
            raise ValueError("b must have length n")
        if gf2_rank(A) != A.shape[0]:
            raise ValueError("A is not invertible over F2")
        A.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls, n: int) -> "AffineTransform":
        return cls(np.eye(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def linear(cls, A) -> "AffineTransform":
        A = np.asarray(A)
        return cls(A, np.zeros(A.shape[0], dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (self.A.astype(np.int64) @ np.asarray(x, dtype=np.int64) + self.b) % 2

    def compose(self, other: "AffineTransform") -> "AffineTransform":
        """``self ∘ other``: apply ``other`` first."""
        A = (self.A.astype(np.int64) @ other.A) % 2
        b = (self.A.astype(np.int64) @ other.b + self.b) % 2
        return AffineTransform(A, b)

    def inverse(self) -> "AffineTransform":
        Ainv = _gf2_inverse(self.A)
        return AffineTransform(Ainv, (Ainv.astype(np.int64) @ self.b) % 2)

    def is_lower_triangular(self) -> bool:
        return bool(np.all(np.triu(self.A, 1) == 0) and np.all(np.diag(self.A) == 1))

    def is_upper_triangular(self) -> bool:
        return bool(np.all(np.tril(self.A, -1) == 0) and np.all(np.diag(self.A) == 1))

    def __eq__(self, other) -> bool:
        return isinstance(other, AffineTransform) and np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b)

    def __hash__(self) -> int:
        return hash((self.A.tobytes(), self.b.tobytes(), self.n))

    def describe(self) -> str:
        rows = ["".join(str(v) for v in r) for r in self.A]
        return "A=" + "/".join(rows) + " b=" + "".join(str(v) for v in self.b)


def _gf2_inverse(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    M = np.concatenate([A.astype(np.uint8) & 1, np.eye(n, dtype=np.uint8)], axis=1)
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r, c])
        M[[c, piv]] = M[[piv, c]]
        for r in range(n):
            if r != c and M[r, c]:
                M[r] ^= M[c]
    return M[:, n:]


@dataclass(frozen=True, eq=False)
class CodewordPermutation:
    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        if m.ndim != 1 or not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError("map must be a bijection on [0, N)")
        m.flags.writeable = False
        object.__setattr__(self, "map", m)

    @classmethod
    def identity(cls, N: int) -> "CodewordPermutation":
        return cls(np.arange(N))

    @property
    def N(self) -> int:
        return self.map.size

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``out[..., map[p]] = x[..., p]``."""
        x = np.asarray(x)
        out = np.empty_like(x)
        out[..., self.map] = x
        return out

    def apply_inverse(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[..., self.map]

    def compose(self, other: "CodewordPermutation") -> "CodewordPermutation":
        """``self ∘ other`` as maps: ``p -> self.map[other.map[p]]``."""
        return CodewordPermutation(self.map[other.map])

    def inverse(self) -> "CodewordPermutation":
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(self.N)
        return CodewordPermutation(inv)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.map, np.arange(self.N)))

    def __eq__(self, other) -> bool:
        return isinstance(other, CodewordPermutation) and np.array_equal(self.map, other.map)

    def __hash__(self) -> int:
        return hash(self.map.tobytes())


def to_permutation(t: AffineTransform) -> CodewordPermutation:
    bits = _bits(t.n)
    img = (bits @ t.A.T.astype(np.int64) + t.b) % 2
    return CodewordPermutation(img @ (1 << np.arange(t.n)))


# -- admissibility -------------------------------------------------------------


@dataclass(frozen=True)
class UtlMask:
    """Strictly upper-triangular positions that may be set in a UTL automorphism."""

    n: int
    positions: frozenset

    def __post_init__(self):
        pos = frozenset((int(i), int(j)) for i, j in self.positions)
        for i, j in pos:
            if not 0 <= i < j < self.n:
                raise ValueError(f"{(i, j)} is not strictly upper triangular for n={self.n}")
        object.__setattr__(self, "positions", pos)

    @property
    def t(self) -> int:
        return len(self.positions)

    @property
    def group_size(self) -> int:
        return 1 << self.t

    def sorted_positions(self) -> list[tuple[int, int]]:
        return sorted(self.positions)

    def pattern(self) -> list[str]:
        """Star pattern rows, e.g. ``["1**0", "0100", ...]``."""
        rows = []
        for i in range(self.n):
            rows.append("".join("1" if i == j else "*" if (i, j) in self.positions else "0" for j in range(self.n)))
        return rows

    @classmethod
    def from_pattern(cls, rows: Sequence[str]) -> "UtlMask":
        n = len(rows)
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if rows[i][j] == "*"))


def is_admissible(code: PolarCode, i: int, j: int) -> bool:
    """Whether ``A[i, j] = 1`` keeps the generating monomial set closed."""
    if not (0 <= i < code.n and 0 <= j < code.n):
        raise ValueError(f"position {(i, j)} out of range for n={code.n}")
    if i == j:
        return True
    return not substitution_candidates(code.info_set, code.n, i, j)


def admissible_mask(code: PolarCode) -> UtlMask:
    n = code.n
    return UtlMask(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if is_admissible(code, i, j)))


def utl_transform(n: int, positions: Iterable[tuple[int, int]]) -> AffineTransform:
    A = np.eye(n, dtype=np.uint8)
    for i, j in positions:
        A[i, j] = 1
    return AffineTransform.linear(A)


def utl_group(mask: UtlMask) -> Iterator[AffineTransform]:
    """All ``2^t`` UTL transforms supported on the mask (identity first)."""
    pos = mask.sorted_positions()
    for bits in range(1 << len(pos)):
        yield utl_transform(mask.n, (p for k, p in enumerate(pos) if bits >> k & 1))


def utl_element(mask: UtlMask, subset: int) -> AffineTransform:
    pos = mask.sorted_positions()
    return utl_transform(mask.n, (p for k, p in enumerate(pos) if subset >> k & 1))


def lta_group_size(n: int) -> int:
    return 2 ** (n * (n - 1) // 2) * 2**n


def sample_lta(n: int, rng: np.random.Generator) -> AffineTransform:
    A = np.tril(rng.integers(0, 2, (n, n)), -1) + np.eye(n, dtype=np.int64)
    return AffineTransform(A, rng.integers(0, 2, n))


def lta_group(n: int) -> Iterator[AffineTransform]:
    low = [(i, j) for i in range(n) for j in range(i)]
    for a in range(1 << len(low)):
        A = np.eye(n, dtype=np.uint8)
        for k, (i, j) in enumerate(low):
            A[i, j] = a >> k & 1
        for b in range(1 << n):
            yield AffineTransform(A, (b >> np.arange(n)) & 1)


def general_linear(n: int) -> Iterator[np.ndarray]:
    """All invertible ``n x n`` binary matrices (brute force, small ``n``)."""
    if n > 4:
        raise ValueError("GL(n, 2) enumeration limited to n <= 4")
    for v in range(1 << (n * n)):
        A = ((v >> np.arange(n * n)) & 1).reshape(n, n).astype(np.uint8)
        if gf2_rank(A) == n:
            yield A


# -- automorphism oracle -------------------------------------------------------


def is_automorphism(code: PolarCode, perm: CodewordPermutation) -> bool:
    """Every permuted generator row must stay in the code."""
    if perm.N != code.N:
        raise ValueError("permutation length does not match the code")
    return all(contains(code, perm.apply(g)) for g in code.generator_matrix())


def count_automorphisms_bruteforce(code: PolarCode) -> tuple[int, int]:
    """``(|Aut|, |Aff ∩ Aut|)`` by scanning all of ``S_N`` and ``GA(n)``."""
    if code.N > 8:
        raise ValueError(f"brute force over S_N limited to N <= 8, got N={code.N}")
    N = code.N
    words = np.zeros(1 << N, dtype=bool)
    words[codebook(code) @ (1 << np.arange(N))] = True
    G = code.generator_matrix().astype(np.int64)
    aut = 0
    # stream S_N in chunks; permuted row value is sum_p g[p] 2^map[p]
    perms = itertools.permutations(range(N))
    while True:
        chunk = np.array(list(itertools.islice(perms, 5040)), dtype=np.int64)
        if chunk.size == 0:
            break
        vals = G @ (1 << chunk).T
        aut += int(np.all(words[vals], axis=0).sum())
    aff = 0
    for A in general_linear(code.n):
        for bv in range(N):
            t = AffineTransform(A, (bv >> np.arange(code.n)) & 1)
            aff += is_automorphism(code, to_permutation(t))
    return aut, aff


def parse_pattern(rows: Sequence[str]) -> np.ndarray:
    """Star pattern -> int array with -1 for free entries."""
    table = {"0": 0, "1": 1, "*": -1}
    try:
        return np.array([[table[c] for c in r.replace(" ", "")] for r in rows], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"bad pattern symbol {exc}") from None


def _pattern_fill(pat: np.ndarray) -> Iterator[np.ndarray]:
    free = list(zip(*np.nonzero(pat == -1)))
    base = np.where(pat == -1, 0, pat).astype(np.uint8)
    for v in range(1 << len(free)):
        M = base.copy()
        for k, idx in enumerate(free):
            M[idx] = v >> k & 1
        yield M


def affine_structure_count(code: PolarCode, a_pattern: Sequence[str],
                           b_pattern: Optional[str] = None) -> int:
    """Number of invertible ``(A, b)`` matching the templates that are automorphisms."""
    if code.N > 16:
        raise ValueError("structure counting limited to N <= 16")
    pa = parse_pattern(a_pattern)
    n = code.n
    if pa.shape != (n, n):
        raise ValueError(f"A pattern must be {n}x{n}, got {pa.shape}")
    pb = parse_pattern([b_pattern if b_pattern is not None else "*" * n])[0]
    if pb.shape != (n,):
        raise ValueError(f"b pattern must have length {n}")
    count = 0
    b_choices = list(_pattern_fill(pb[None, :]))
    for A in _pattern_fill(pa):
        if gf2_rank(A) != n:
            continue
        for b in b_choices:
            t = AffineTransform(A, b[0])
            count += is_automorphism(code, to_permutation(t))
    return count


def swap_permutation(N: int, p: int, q: int) -> CodewordPermutation:
    m = np.arange(N)
    m[p], m[q] = q, p
    return CodewordPermutation(m)


def is_affine_permutation(perm: CodewordPermutation) -> bool:
    """Whether the permutation is induced by some ``(A, b)`` (reads them off the map)."""
    N = perm.N
    n = N.bit_length() - 1
    if 1 << n != N:
        return False
    b_int = int(perm.map[0])
    cols = [int(perm.map[1 << k]) ^ b_int for k in range(n)]
    A = ((np.array(cols)[None, :] >> np.arange(n)[:, None]) & 1).astype(np.uint8)
    if gf2_rank(A) != n:
        return False
    t = AffineTransform(A, (b_int >> np.arange(n)) & 1)
    return to_permutation(t) == perm
