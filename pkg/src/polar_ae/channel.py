"""BPSK over AWGN and the Monte Carlo BLER/BER engine.

Frames are simulated in fixed-size blocks; block ``b`` at SNR point ``s``
draws from ``default_rng([seed, s, b])``, so results do not depend on how
many worker processes share the blocks.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .code import PolarCode, encode
from .ensemble import DecoderSpec

log = logging.getLogger(__name__)


def noise_variance(code: PolarCode, snr_db: float, convention: str = "ebn0") -> float:
    """``sigma^2`` for unit-energy BPSK; Eb/N0 uses the rate ``K / N``."""
    snr = 10 ** (snr_db / 10)
    if convention == "ebn0":
        return 1.0 / (2.0 * (code.K / code.N) * snr)
    if convention == "esn0":
        return 1.0 / (2.0 * snr)
    raise ValueError(f"unknown SNR convention {convention!r}")


def modulate(x) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(x, dtype=np.float64)


def transmit(code: PolarCode, payload, snr_db: float, rng=None, convention: str = "ebn0",
             noiseless: bool = False) -> np.ndarray:
    """Channel LLRs ``2 y / sigma^2`` for encoded ``payload`` (one row per frame)."""
    x = encode(code, payload)
    sigma2 = noise_variance(code, snr_db, convention)
    y = modulate(x)
    if not noiseless:
        y = y + math.sqrt(sigma2) * np.random.default_rng(rng).standard_normal(x.shape)
    return 2.0 * y / sigma2


@dataclass
class SimConfig:
    code: PolarCode
    decoder: DecoderSpec
    snr_points: Sequence[float]
    max_frames: int = 1_000_000
    max_errors: int = 100
    seed: int = 0
    block_size: int = 1000
    workers: int = 1
    convention: str = "ebn0"
    code_id: str = ""

    def __post_init__(self):
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if not len(self.snr_points):
            raise ValueError("need at least one SNR point")
        if self.block_size < 1 or self.workers < 1:
            raise ValueError("block_size and workers must be >= 1")
        if self.convention not in ("ebn0", "esn0"):
            raise ValueError(f"unknown SNR convention {self.convention!r}")


@dataclass
class SimPoint:
    snr_db: float
    frames: int = 0
    bit_errors: int = 0
    block_errors: int = 0
    bits: int = 0

    @property
    def bler(self) -> float:
        return self.block_errors / self.frames if self.frames else float("nan")

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.frames else float("nan")

    @property
    def ci95(self) -> float:
        """Normal-approximation half-width of the 95% BLER interval."""
        if not self.frames:
            return float("nan")
        p = self.bler
        return 1.959963984540054 * math.sqrt(p * (1 - p) / self.frames)

    def as_row(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "frames": self.frames,
            "block_errors": self.block_errors,
            "bler": self.bler,
            "ci95": self.ci95,
            "bit_errors": self.bit_errors,
            "ber": self.ber,
        }


@dataclass
class SimResult:
    code_id: str
    decoder: str
    convention: str
    seed: int
    points: list[SimPoint] = field(default_factory=list)
    ensemble: Optional[dict] = None

    def rows(self) -> list[dict]:
        return [{"code_id": self.code_id, "decoder": self.decoder, **p.as_row()} for p in self.points]


def _run_block(code: PolarCode, decoder, seed: int, snr_idx: int, block: int, frames: int,
               snr_db: float, convention: str) -> tuple[int, int]:
    rng = np.random.default_rng([seed, snr_idx, block])
    payload = rng.integers(0, 2, (frames, code.payload_length), dtype=np.uint8)
    llr = transmit(code, payload, snr_db, rng, convention)
    est = np.atleast_2d(decoder.predict_payload(llr))
    wrong = est != payload
    return int(wrong.sum()), int(np.any(wrong, axis=1).sum())


def _block_job(args):
    return _run_block(*args)


def run(config: SimConfig) -> SimResult:
    code = config.code
    decoder = config.decoder.build(code, seed=config.seed)
    ens = getattr(decoder, "ensemble_", None)
    result = SimResult(config.code_id or f"({code.N},{code.K})", config.decoder.label, config.convention,
                       config.seed, ensemble=ens.describe() if ens is not None else None)
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for s, snr in enumerate(config.snr_points):
            pt = SimPoint(float(snr))
            block = 0
            while pt.frames < config.max_frames and pt.block_errors < config.max_errors:
                jobs = []
                planned = pt.frames
                for _ in range(config.workers):
                    nf = min(config.block_size, config.max_frames - planned)
                    if nf <= 0:
                        break
                    jobs.append((code, decoder, config.seed, s, block, nf, float(snr), config.convention))
                    planned += nf
                    block += 1
                outs = pool.map(_block_job, jobs) if pool else map(_block_job, jobs)
                # consume in block order and stop at the same block for any worker count
                for job, (be, ble) in zip(jobs, outs):
                    if pt.frames >= config.max_frames or pt.block_errors >= config.max_errors:
                        break
                    pt.frames += job[5]
                    pt.bits += job[5] * code.payload_length
                    pt.bit_errors += be
                    pt.block_errors += ble
            log.info("%s %s %.2f dB: %d/%d", result.code_id, result.decoder, snr, pt.block_errors, pt.frames)
            result.points.append(pt)
    finally:
        if pool:
            pool.shutdown()
    return result
