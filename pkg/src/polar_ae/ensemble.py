"""Automorphism ensemble (AE) decoding.

Each branch permutes the channel LLRs by an automorphism, runs an inner
decoder, and maps its codeword back; the candidate with the largest
correlation to the channel LLRs wins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.utils.validation import check_is_fitted

from ._validation import check_llr
from .automorphism import (
    AffineTransform,
    CodewordPermutation,
    admissible_mask,
    is_automorphism,
    sample_lta,
    to_permutation,
    utl_element,
)
from .code import PolarCode, extract_payload
from .decoders import (
    BPDecoder,
    DecodeResult,
    PolarDecoder,
    SCDecoder,
    SCLDecoder,
    bp_decode,
    correlation,
    sc_decode,
    scl_decode,
)

log = logging.getLogger(__name__)

GROUPS = ("utl", "lta", "utlxlta")
VALIDATE_MAX_N = 4096


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True)
class InnerDecoder:
    kind: str = "sc"
    list_size: int = 8
    iters: int = 60
    exact: bool = False

    def __post_init__(self):
        if self.kind not in ("sc", "scl", "bp"):
            raise ValueError(f"unknown inner decoder {self.kind!r}")

    def __call__(self, code: PolarCode, llr) -> DecodeResult:
        if self.kind == "sc":
            return sc_decode(code, llr, exact=self.exact)
        if self.kind == "scl":
            return scl_decode(code, llr, L=self.list_size, exact=self.exact)
        return bp_decode(code, llr, iters=self.iters, exact=self.exact)

    @property
    def label(self) -> str:
        return {"sc": "SC", "scl": f"SCL-{self.list_size}", "bp": "BP"}[self.kind]


@dataclass
class Ensemble:
    perms: list[CodewordPermutation]
    inner: InnerDecoder = field(default_factory=InnerDecoder)
    transforms: list[AffineTransform] = field(default_factory=list)
    group: str = "utl"
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.perms:
            raise EnsembleError("ensemble needs at least one branch")
        if not self.perms[0].is_identity():
            raise EnsembleError("first branch must be the identity")
        if len({p.map.tobytes() for p in self.perms}) != len(self.perms):
            raise EnsembleError("ensemble permutations must be distinct")

    @property
    def M(self) -> int:
        return len(self.perms)

    def describe(self) -> dict:
        return {
            "branches": self.M,
            "group": self.group,
            "inner": self.inner.label,
            "seed": self.seed,
            "transforms": [t.describe() for t in self.transforms],
        }


def _draw(code: PolarCode, group: str, rng: np.random.Generator, mask) -> AffineTransform:
    n = code.n
    if group == "lta":
        return sample_lta(n, rng)
    u = utl_element(mask, int(rng.integers(0, 1 << mask.t))) if mask.t else AffineTransform.identity(n)
    if group == "utl":
        return u
    return u.compose(sample_lta(n, rng))


def build_ensemble(code: PolarCode, M: int, group: str = "utl", rng=None,
                   inner: Optional[InnerDecoder] = None, validate: bool = True,
                   max_tries: int = 100_000) -> Ensemble:
    """Identity plus ``M - 1`` distinct automorphisms from the chosen group."""
    if M < 1:
        raise EnsembleError("M must be >= 1")
    if group not in GROUPS:
        raise EnsembleError(f"unknown group {group!r}; choose from {GROUPS}")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    n, N = code.n, code.N
    mask = admissible_mask(code)
    ident = AffineTransform.identity(n)
    transforms = [ident]
    perms = [to_permutation(ident)]
    seen = {perms[0].map.tobytes()}
    if group == "utl":
        if mask.group_size < M:
            raise EnsembleError(
                f"({N},{code.K}) code {list(code.info_set)} has {mask.group_size - 1} non-trivial UTL automorphisms "
                f"(t={mask.t}); cannot build {M} branches"
            )
        if mask.t <= 20:
            subsets = rng.choice(np.arange(1, 1 << mask.t), size=M - 1, replace=False)
            cands = [utl_element(mask, int(s)) for s in subsets]
        else:
            cands = []
    tries = 0
    while len(perms) < M:
        if group == "utl" and cands:
            t = cands.pop(0)
        else:
            t = _draw(code, group, rng, mask)
        tries += 1
        if tries > max_tries:
            raise EnsembleError(f"could not draw {M} distinct {group} automorphisms")
        p = to_permutation(t)
        key = p.map.tobytes()
        if key in seen:
            continue
        if validate and N <= VALIDATE_MAX_N and not is_automorphism(code, p):
            raise EnsembleError(f"{group} transform {t.describe()} is not an automorphism of {code}")
        seen.add(key)
        transforms.append(t)
        perms.append(p)
    return Ensemble(perms, inner or InnerDecoder(), transforms, group, seed)


def select_best(candidates: Sequence[DecodeResult], llr) -> DecodeResult:
    """Candidate with maximal correlation; ties go to the earliest candidate."""
    if not candidates:
        raise ValueError("no candidates to select from")
    llr = np.asarray(llr, dtype=np.float64)
    scores = [correlation(c.codeword, llr) for c in candidates]
    return candidates[int(np.argmax(scores))]


def ae_decode(code: PolarCode, llr, ens: Ensemble) -> DecodeResult:
    llr, single = check_llr(llr, code.N)
    cands = []
    for perm in ens.perms:
        res = ens.inner(code, perm.apply(llr))
        cands.append(perm.apply_inverse(res.codeword))
    cands = np.stack(cands)  # (M, B, N)
    scores = correlation(cands, llr[None])
    best = np.argmax(scores, axis=0)
    x = cands[best, np.arange(llr.shape[0])]
    res = DecodeResult(x, extract_payload(code, x), scores[best, np.arange(llr.shape[0])])
    return res[0] if single else res


class AEDecoder(PolarDecoder):
    """AE decoder as an estimator; ``fit`` draws the ensemble."""

    def __init__(self, code: Optional[PolarCode] = None, inner: str = "sc", n_branches: int = 8,
                 group: str = "utl", list_size: int = 8, iters: int = 60, exact: bool = False,
                 random_state=None, validate: bool = True):
        self.code = code
        self.inner = inner
        self.n_branches = n_branches
        self.group = group
        self.list_size = list_size
        self.iters = iters
        self.exact = exact
        self.random_state = random_state
        self.validate = validate

    def fit(self, X=None, y=None):
        super().fit(X, y)
        inner = InnerDecoder(self.inner, self.list_size, self.iters, self.exact)
        self.ensemble_ = build_ensemble(self.code_, self.n_branches, self.group, self.random_state,
                                        inner=inner, validate=self.validate)
        return self

    def _decode(self, X):
        check_is_fitted(self, "ensemble_")
        return ae_decode(self.code_, X, self.ensemble_)


@dataclass(frozen=True)
class DecoderSpec:
    """Serializable description of a decoder (plain or AE)."""

    decoder: str = "sc"
    list_size: int = 8
    iters: int = 60
    ae_branches: int = 1
    ae_group: str = "utl"
    exact: bool = False

    def __post_init__(self):
        if self.decoder not in ("sc", "scl", "bp"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.ae_branches < 1:
            raise ValueError("ae_branches must be >= 1")
        if self.ae_group not in GROUPS:
            raise ValueError(f"unknown AE group {self.ae_group!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "DecoderSpec":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        extra = set(d) - set(known)
        if extra:
            raise ValueError(f"unknown decoder option(s): {sorted(extra)}")
        return cls(**known)

    @property
    def label(self) -> str:
        base = InnerDecoder(self.decoder, self.list_size, self.iters).label
        if self.ae_branches > 1:
            return f"AE{self.ae_branches}-{base}({self.ae_group.upper()})"
        return base

    def build(self, code: PolarCode, seed=None) -> PolarDecoder:
        if self.ae_branches > 1:
            return AEDecoder(code, self.decoder, self.ae_branches, self.ae_group, self.list_size,
                             self.iters, self.exact, random_state=seed).fit()
        if self.decoder == "sc":
            return SCDecoder(code, self.exact).fit()
        if self.decoder == "scl":
            return SCLDecoder(code, self.list_size, self.exact).fit()
        return BPDecoder(code, self.iters, exact=self.exact).fit()
