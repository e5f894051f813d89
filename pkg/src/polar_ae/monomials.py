"""Negative monomials and their link to rows of the polar transform.

Variable ``x_k`` corresponds to bit ``k`` (LSB = ``x_0``) both in row indices
and in evaluation points.  Row ``i`` of ``T_N`` is the evaluation of the
negative monomial whose factors are the ``x̄_k`` with bit ``k`` of ``i``
equal to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True, order=True)
class Monomial:
    """Product of negative variables, stored as a bitmask of factors."""

    vars: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.vars < 0 or self.vars >> self.n:
            raise ValueError(f"variable mask {self.vars:#b} does not fit in {self.n} variables")

    @classmethod
    def from_vars(cls, variables: Iterable[int], n: int) -> "Monomial":
        mask = 0
        for k in variables:
            if not 0 <= k < n:
                raise ValueError(f"variable x{k} out of range for n={n}")
            mask |= 1 << k
        return cls(mask, n)

    @property
    def degree(self) -> int:
        return bin(self.vars).count("1")

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n) if self.vars >> k & 1)

    def __contains__(self, k: int) -> bool:
        return bool(self.vars >> k & 1)

    def divides(self, other: "Monomial") -> bool:
        return self.vars & ~other.vars == 0

    def __str__(self) -> str:
        if not self.vars:
            return "1"
        return "".join(f"x{k}" for k in self.variables)


def monomial_of_index(i: int, n: int) -> Monomial:
    """Monomial generating row ``i`` of ``T_N``: factors are the zero bits of ``i``."""
    if not 0 <= i < 1 << n:
        raise ValueError(f"row index {i} out of range [0, {1 << n})")
    return Monomial(~i & ((1 << n) - 1), n)


def index_of_monomial(m: Monomial) -> int:
    return ~m.vars & ((1 << m.n) - 1)


def evaluate(m: Monomial) -> np.ndarray:
    """Evaluate ``m`` on all points of ``F_2^n`` (point ``p`` has ``x_k`` = bit ``k`` of ``p``)."""
    points = np.arange(1 << m.n)
    return ((points & m.vars) == 0).astype(np.uint8)


def parse_monomial(text: str, n: int) -> Monomial:
    """Inverse of ``str(Monomial)``: ``"1"``, ``"x0"``, ``"x1x3"``."""
    text = text.strip()
    if text == "1":
        return Monomial(0, n)
    parts = text.split("x")
    if parts[0] != "" or len(parts) < 2:
        raise ValueError(f"cannot parse monomial {text!r}")
    return Monomial.from_vars((int(p) for p in parts[1:]), n)


@dataclass(frozen=True)
class MonomialSet:
    """Generating set of a monomial code, kept as the sorted row-index set."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate monomials in set")
        if idx and (idx[0] < 0 or idx[-1] >= 1 << self.n):
            raise ValueError("row index out of range")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_monomials(cls, monomials: Iterable[Monomial], n: int) -> "MonomialSet":
        return cls(n, tuple(index_of_monomial(m) for m in monomials))

    @property
    def members(self) -> tuple[Monomial, ...]:
        return tuple(monomial_of_index(i, self.n) for i in self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.members)

    def __contains__(self, m: Monomial) -> bool:
        return index_of_monomial(m) in self.indices

    def index_of(self, m: Monomial) -> int:
        """Row index of a member (the bijection members <-> information set)."""
        i = index_of_monomial(m)
        if i not in self.indices:
            raise KeyError(str(m))
        return i

    def __str__(self) -> str:
        # degree first, then by variable mask, matching the usual table layout
        ms = sorted(self.members, key=lambda m: (m.degree, m.variables))
        return ",".join(str(m) for m in ms)


def upper_neighbours(i: int, n: int) -> Iterator[int]:
    """Indices one elementary step above ``i`` in the universal partial order.

    Steps: set a zero bit (drop a factor), or move a one from bit ``k`` to a
    zero at bit ``l > k`` (replace ``x̄_l`` by ``x̄_k``).
    """
    for k in range(n):
        if not i >> k & 1:
            yield i | 1 << k
        else:
            for l in range(k + 1, n):
                if not i >> l & 1:
                    yield (i & ~(1 << k)) | 1 << l


def is_decreasing(mset: MonomialSet) -> bool:
    s = set(mset.indices)
    return all(j in s for i in s for j in upper_neighbours(i, mset.n))


def all_decreasing_sets(n: int) -> list[MonomialSet]:
    """Every decreasing monomial set in ``n`` variables (upsets of the partial order).

    Only meant for small ``n``; the count grows very quickly.
    """
    N = 1 << n
    if n > 4:
        raise ValueError("enumeration of decreasing sets is limited to n <= 4")
    found: set[frozenset[int]] = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for s in frontier:
            for i in range(N):
                if i in s:
                    continue
                if all(j in s for j in upper_neighbours(i, n)):
                    t = s | {i}
                    if t not in found:
                        found.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted((MonomialSet(n, tuple(s)) for s in found), key=lambda m: (len(m), m.indices))
