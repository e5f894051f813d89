"""Table and figure data behind the CLI subcommands."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from .automorphism import (
    admissible_mask,
    count_automorphisms_bruteforce,
    is_admissible,
    utl_group,
)
from .channel import SimConfig, run
from .code import CRC, PolarCode
from .construction import (
    candidate_matrix,
    design_ga,
    design_ga_for_bler,
    load_5g_sequence,
    reed_muller,
    utl_design,
)
from .ensemble import DecoderSpec
from .monomials import MonomialSet, all_decreasing_sets, monomial_of_index

HIGH_SNR_DB = 10.5
DESIGNS = ("5g", "ga-high", "ga-low")


def _rm_label(code: PolarCode) -> str:
    for r in range(code.n + 1):
        if reed_muller(r, code.n).info_set == code.info_set:
            return f"RM({r},{code.n})"
    return ""


def count_aut_table(n: int = 3) -> list[dict]:
    """|Aut| and |Aff| for every decreasing code of length ``2^n`` with ``0 < K < N``."""
    if n > 3:
        raise ValueError("brute-force automorphism counting needs n <= 3")
    rows = []
    for mset in all_decreasing_sets(n):
        if not 0 < len(mset) < 1 << n:
            continue
        code = PolarCode.from_monomials(mset)
        aut, aff = count_automorphisms_bruteforce(code)
        rows.append({"monomials": str(mset), "K": code.K, "aut": aut, "affine": aff, "note": _rm_label(code)})
    return rows


def design_code(n: int, K: int, design: str) -> PolarCode:
    if design == "5g":
        return load_5g_sequence(n).code(K)
    if design == "ga-high":
        return design_ga(n, HIGH_SNR_DB).code(K)
    if design == "ga-low":
        return design_ga_for_bler(n, K, 1e-3)
    raise ValueError(f"unknown design {design!r}; choose from {DESIGNS}")


def _t_series(n: int, design: str) -> list[int]:
    N = 1 << n
    if design == "ga-low":
        return [admissible_mask(design_ga_for_bler(n, K)).t for K in range(1, N + 1)]
    seq = load_5g_sequence(n) if design == "5g" else design_ga(n, HIGH_SNR_DB)
    return [admissible_mask(seq.code(K)).t for K in range(1, N + 1)]


def admissible_sweep(n: int, designs: Sequence[str] = DESIGNS) -> list[dict]:
    """Number ``t`` of UT admissible positions for every ``K`` in ``1..N``."""
    rows = []
    for d in designs:
        if d not in DESIGNS:
            raise ValueError(f"unknown design {d!r}")
        for K, t in enumerate(_t_series(n, d), start=1):
            rows.append({"N": 1 << n, "design": d, "K": K, "t": t})
    return rows


def suitability(n_list: Iterable[int], designs: Sequence[str] = ("ga-high", "5g")) -> list[dict]:
    """Fraction of dimensions ``K = 1..N`` with ``t = 0`` and with ``2^t >= 32``.

    The denominator is ``N``.
    """
    rows = []
    for d in designs:
        for n in n_list:
            N = 1 << n
            ts = _t_series(n, d)
            rows.append({
                "N": N,
                "design": d,
                "frac_zero": round(sum(t == 0 for t in ts) / N, 4),
                "frac_ge32": round(sum(t >= 5 for t in ts) / N, 4),
                "count_zero": sum(t == 0 for t in ts),
                "count_ge32": sum(t >= 5 for t in ts),
            })
    return rows


SUITABILITY_META = {
    "K_range": "1..N",
    "denominator": "N",
    "zero": "t = 0 (no non-trivial UTL automorphism)",
    "ge32": "2^t >= 32, i.e. t >= 5",
    "high_snr_design": f"GA at {HIGH_SNR_DB} dB Es/N0",
}


def _fmt_matrix(mat) -> list[list[list[str]]]:
    return [[[str(m) for m in cell] for cell in row] for row in mat]


def reproduce_16_7() -> dict:
    """The (16,7) worked example: admissibility, candidate matrix, UTL variants."""
    n = 4
    code = PolarCode(n, (7, 10, 11, 12, 13, 14, 15))
    ga = design_ga(n, HIGH_SNR_DB)
    adm = {f"{i},{j}": is_admissible(code, i, j) for i in range(n) for j in range(i + 1, n)}
    changes = {
        f"{idx}": (idx | 1 << 1) & ~(1 << 2)
        for idx in code.info_set if not idx >> 1 & 1
    }
    reduced = MonomialSet(n, (7, 11, 12, 13, 14, 15))
    variants = []
    for added, target in ((6, (1, 3)), (9, (0, 2)), (5, (0, 3)), (10, None)):
        if target is not None:
            v = utl_design(ga, 7, 1, [target])
        else:
            v = PolarCode(n, reduced.indices + (added,))
        mask = admissible_mask(v)
        variants.append({
            "added_index": added,
            "added_monomial": str(monomial_of_index(added, n)),
            "target": None if target is None else list(target),
            "info_set": list(v.info_set),
            "mask": [list(p) for p in mask.sorted_positions()],
            "pattern": mask.pattern(),
            "utl_automorphisms": sum(1 for _ in utl_group(mask)),
            "same_as_original": v.info_set == code.info_set,
        })
    return {
        "code": code.to_dict(),
        "monomials": str(code.monomials),
        "ga_top7": list(ga.info_set(7)),
        "admissible": adm,
        "mask": [list(p) for p in admissible_mask(code).sorted_positions()],
        "binary_index_change_1_2": changes,
        "reduced_info_set": list(reduced.indices),
        "candidate_matrix": _fmt_matrix(candidate_matrix(reduced)),
        "variants": variants,
    }


# -- simulation ----------------------------------------------------------------


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def code_from_config(cfg: dict, base: Path | None = None) -> PolarCode:
    if "code" in cfg:
        return PolarCode.from_dict(cfg["code"])
    if "code_file" in cfg:
        p = Path(cfg["code_file"])
        if base is not None and not p.is_absolute():
            p = base / p
        return PolarCode.load(p)
    if "design" in cfg:
        d = cfg["design"]
        return design_from_args(d.get("design", "ga"), int(d["n"]), int(d.get("K", 0)),
                                snr=float(d.get("snr", HIGH_SNR_DB)), r=d.get("r"),
                                s=int(d.get("s", 0)), targets=d.get("targets"),
                                base=d.get("base", "ga"), greedy=bool(d.get("greedy", False)))
    raise ConfigError("config needs one of 'code', 'code_file' or 'design'")


def parse_targets(text) -> list[tuple[int, int]]:
    if not text:
        return []
    if isinstance(text, list):
        return [tuple(int(v) for v in t) for t in text]
    out = []
    for part in str(text).split(","):
        i, j = part.split(":")
        out.append((int(i), int(j)))
    return out


def design_from_args(design: str, n: int, K: int, snr: float = HIGH_SNR_DB, r=None, s: int = 0,
                     targets=None, base: str = "ga", greedy: bool = False) -> PolarCode:
    if design == "rm":
        if r is None:
            raise ValueError("Reed-Muller design needs r")
        return reed_muller(int(r), n)
    if design == "ga":
        return design_ga(n, snr).code(K)
    if design == "ga-low":
        return design_ga_for_bler(n, K)
    if design == "5g":
        return load_5g_sequence(n).code(K)
    if design == "utl":
        seq = load_5g_sequence(n) if base == "5g" else design_ga(n, snr)
        return utl_design(seq, K, s, parse_targets(targets), greedy=greedy)
    raise ValueError(f"unknown design {design!r}")


def simulate_matrix(cfg: dict, base: Path | None = None, workers: int | None = None):
    """Run every decoder of the config on its code; returns (rows, metadata)."""
    code = code_from_config(cfg, base)
    snrs = cfg.get("snr_db")
    if not snrs:
        raise ConfigError("config needs a non-empty 'snr_db' list")
    decoders = cfg.get("decoders") or [{"decoder": "sc"}]
    seed = int(cfg.get("seed", 0))
    rows, meta = [], {"seed": seed, "code": code.to_dict(), "runs": []}
    for d in decoders:
        d = dict(d)
        crc = d.pop("crc", None)
        run_code = code.with_crc(CRC(int(crc, 0) if isinstance(crc, str) else int(crc))) if crc else code
        try:
            spec = DecoderSpec.from_dict(d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"decoder entry {d}: {exc}") from None
        label = spec.label + ("-CRC" if crc else "")
        conf = SimConfig(
            code=run_code,
            decoder=spec,
            snr_points=[float(s) for s in snrs],
            max_frames=int(cfg.get("max_frames", 1_000_000)),
            max_errors=int(cfg.get("max_errors", 100)),
            seed=seed,
            block_size=int(cfg.get("block_size", 1000)),
            workers=int(workers or cfg.get("workers", 1)),
            convention=cfg.get("convention", "ebn0"),
            code_id=cfg.get("code_id", ""),
        )
        res = run(conf)
        res.decoder = label
        rows.extend(res.rows())
        meta["runs"].append({"decoder": label, "convention": res.convention, "ensemble": res.ensemble})
    return rows, meta
