"""Polar code objects, butterfly encoding and CRC attachment."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .monomials import MonomialSet, evaluate, monomial_of_index

MAX_CODEBOOK_DIM = 20


@dataclass(frozen=True)
class CRC:
    """Cyclic redundancy check with zero initial state.

    ``poly`` includes the leading term, e.g. ``0x1D5`` is
    ``x^8 + x^7 + x^6 + x^4 + x^2 + 1``.
    """

    poly: int = 0x1D5

    def __post_init__(self):
        if self.poly < 2 or not self.poly & 1:
            raise ValueError("CRC polynomial needs degree >= 1 and a constant term")

    @property
    def length(self) -> int:
        return self.poly.bit_length() - 1

    def _parity_matrix(self, k: int) -> np.ndarray:
        # remainder of each unit payload vector; CRC is linear with zero init
        r = self.length
        rows = np.zeros((k, r), dtype=np.uint8)
        for pos in range(k):
            reg = 1 << (k - 1 - pos + r)
            for shift in range(k - 1 - pos, -1, -1):
                if reg >> (shift + r) & 1:
                    reg ^= self.poly << shift
            rows[pos] = [(reg >> (r - 1 - b)) & 1 for b in range(r)]
        return rows

    def remainder(self, payload: np.ndarray) -> np.ndarray:
        payload = np.asarray(payload, dtype=np.uint8)
        P = _crc_parity(self.poly, payload.shape[-1])
        return (payload.astype(np.int64) @ P) % 2

    def attach(self, payload: np.ndarray) -> np.ndarray:
        payload = np.asarray(payload, dtype=np.uint8)
        return np.concatenate([payload, self.remainder(payload).astype(np.uint8)], axis=-1)

    def check(self, bits: np.ndarray) -> np.ndarray | bool:
        """True where the trailing ``length`` bits match the remainder of the rest."""
        bits = np.asarray(bits, dtype=np.uint8)
        r = self.length
        ok = np.all(self.remainder(bits[..., :-r]) == bits[..., -r:], axis=-1)
        return bool(ok) if ok.ndim == 0 else ok


_PARITY_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _crc_parity(poly: int, k: int) -> np.ndarray:
    key = (poly, k)
    if key not in _PARITY_CACHE:
        _PARITY_CACHE[key] = CRC(poly)._parity_matrix(k).astype(np.int64)
    return _PARITY_CACHE[key]


def attach_crc(crc: CRC, payload) -> np.ndarray:
    return crc.attach(payload)


def check_crc(crc: CRC, bits):
    return crc.check(bits)


@dataclass(frozen=True)
class PolarCode:
    """An ``(N, K)`` polar code given by its information set.

    With a CRC the last ``crc.length`` information positions carry the CRC
    and the payload is ``K - crc.length`` bits long.
    """

    n: int
    info_set: tuple[int, ...]
    crc: Optional[CRC] = field(default=None)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        info = tuple(sorted(int(i) for i in self.info_set))
        if len(set(info)) != len(info):
            raise ValueError("information set has duplicates")
        if info and (info[0] < 0 or info[-1] >= 1 << self.n):
            raise ValueError(f"information index out of range [0, {1 << self.n})")
        if self.crc is not None and self.crc.length > len(info):
            raise ValueError("CRC longer than the information set")
        object.__setattr__(self, "info_set", info)

    @classmethod
    def from_monomials(cls, mset: MonomialSet, crc: Optional[CRC] = None) -> "PolarCode":
        return cls(mset.n, mset.indices, crc)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def payload_length(self) -> int:
        return self.K - (self.crc.length if self.crc else 0)

    @property
    def frozen_set(self) -> tuple[int, ...]:
        s = set(self.info_set)
        return tuple(i for i in range(self.N) if i not in s)

    @cached_property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[list(self.info_set)] = True
        mask.flags.writeable = False
        return mask

    @property
    def monomials(self) -> MonomialSet:
        return MonomialSet(self.n, self.info_set)

    def with_crc(self, crc: Optional[CRC]) -> "PolarCode":
        return PolarCode(self.n, self.info_set, crc)

    def generator_matrix(self) -> np.ndarray:
        """Rows of ``T_N`` selected by the information set (oracle use only)."""
        if not self.info_set:
            return np.zeros((0, self.N), dtype=np.uint8)
        return np.stack([evaluate(monomial_of_index(i, self.n)) for i in self.info_set])

    @cached_property
    def _basis(self) -> dict[int, int]:
        # reduced row echelon basis as {pivot bit: row bitmask}
        basis: dict[int, int] = {}
        for row in self.generator_matrix():
            v = _pack(row)
            for piv in sorted(basis, reverse=True):
                if v >> piv & 1:
                    v ^= basis[piv]
            if v:
                piv = v.bit_length() - 1
                for q in basis:
                    if basis[q] >> piv & 1:
                        basis[q] ^= v
                basis[piv] = v
        return basis

    # -- serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "info_set": list(self.info_set),
            "crc": None if self.crc is None else {"poly": hex(self.crc.poly), "length": self.crc.length},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolarCode":
        crc = d.get("crc")
        if crc is not None:
            poly = crc["poly"] if isinstance(crc, dict) else crc
            crc = CRC(int(poly, 0) if isinstance(poly, str) else int(poly))
        code = cls(int(d["n"]), tuple(d["info_set"]), crc)
        if "K" in d and int(d["K"]) != code.K:
            raise ValueError(f"K={d['K']} does not match |info_set|={code.K}")
        return code

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def load(cls, path) -> "PolarCode":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def __str__(self) -> str:
        crc = f", crc={self.crc.length}" if self.crc else ""
        return f"PolarCode({self.N},{self.K}{crc})"


def _pack(bits: Iterable[int]) -> int:
    v = 0
    for p, b in enumerate(bits):
        if b:
            v |= 1 << p
    return v


def polar_transform(u: np.ndarray) -> np.ndarray:
    """``u · T_N`` over F2 along the last axis.  ``T_N`` is an involution."""
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    lead = x.shape[:-1]
    h = 1
    while h < N:
        v = x.reshape(*lead, N // (2 * h), 2, h)
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x


def encode(code: PolarCode, payload) -> np.ndarray:
    """Encode one payload (1-D) or a batch (2-D, one payload per row)."""
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape[-1] != code.payload_length:
        raise ValueError(f"payload has {payload.shape[-1]} bits, code expects {code.payload_length}")
    bits = code.crc.attach(payload) if code.crc else payload
    u = np.zeros(payload.shape[:-1] + (code.N,), dtype=np.uint8)
    u[..., code.info_mask] = bits
    return polar_transform(u)


def extract_payload(code: PolarCode, codeword) -> np.ndarray:
    """Recover the payload bits of a codeword (CRC bits stripped)."""
    u = polar_transform(codeword)
    bits = u[..., code.info_mask]
    return bits[..., : code.payload_length]


def codebook(code: PolarCode) -> np.ndarray:
    """All ``2^K`` codewords as rows, ordered by payload integer value."""
    if code.K > MAX_CODEBOOK_DIM:
        raise ValueError(f"codebook enumeration limited to K <= {MAX_CODEBOOK_DIM}, got {code.K}")
    K = code.K
    msgs = (np.arange(1 << K)[:, None] >> np.arange(K)[None, :]) & 1
    u = np.zeros((1 << K, code.N), dtype=np.uint8)
    u[:, code.info_mask] = msgs
    return polar_transform(u)


def contains(code: PolarCode, v) -> bool:
    """Membership by reduction against an echelon basis of the generator rows."""
    x = _pack(np.asarray(v).ravel())
    if x >> code.N:
        return False
    basis = code._basis
    for piv in sorted(basis, reverse=True):
        if x >> piv & 1:
            x ^= basis[piv]
    return x == 0
