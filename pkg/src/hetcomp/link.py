"""SNR to CQI mapping, CQI efficiencies, BLER waterfall and the fading process."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CQI_SLOPE = 0.522
CQI_OFFSET = 4.07
BLER_SLOPE_PER_DB = 2.0
BLER_MIDPOINT_BACKOFF_DB = 1.1
HARQ_TARGET = 0.1

# 4-bit CQI table (QPSK .. 64QAM), bits per symbol
EFFICIENCY = (
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770,
    1.1758, 1.4766, 1.9141, 2.4063, 2.7305,
    3.3223, 3.9023, 4.5234, 5.1152, 5.5547,
)


@dataclass(frozen=True)
class CqiTable:
    thresholds: tuple[float, ...]
    efficiencies: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "map": f"cqi = clamp(floor({CQI_SLOPE} * snr_db + {CQI_OFFSET}), 1, 15)",
            "thresholds_db": list(self.thresholds),
            "efficiencies": list(self.efficiencies),
        }


def cqi_threshold(cqi: int) -> float:
    """Lowest SNR (dB) that reports ``cqi``."""
    return (cqi - CQI_OFFSET) / CQI_SLOPE


CQI_TABLE = CqiTable(tuple(cqi_threshold(c) for c in range(1, 16)), EFFICIENCY)


def snr_to_cqi(snr):
    """Wideband CQI in [1, 15]; works elementwise on arrays."""
    cqi = np.clip(np.floor(CQI_SLOPE * np.asarray(snr, dtype=float) + CQI_OFFSET), 1, 15).astype(int)
    return int(cqi) if cqi.ndim == 0 else cqi


def _check_cqi(cqi):
    c = np.asarray(cqi)
    if np.any((c < 1) | (c > 15)):
        raise ValueError(f"CQI out of range [1, 15]: {cqi}")
    return c


def cqi_to_efficiency(cqi):
    c = _check_cqi(cqi)
    eff = np.asarray(EFFICIENCY)[c - 1]
    return float(eff) if eff.ndim == 0 else eff


def bler(snr_effective, cqi):
    """Logistic BLER; hits the 10% HARQ target at the CQI entry threshold."""
    c = _check_cqi(cqi)
    midpoint = (c - CQI_OFFSET) / CQI_SLOPE - BLER_MIDPOINT_BACKOFF_DB
    x = BLER_SLOPE_PER_DB * (np.asarray(snr_effective, dtype=float) - midpoint)
    # 1 / (1 + e^x) without overflow
    out = np.where(x >= 0, np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))), 1.0 / (1.0 + np.exp(-np.abs(x))))
    return float(out) if out.ndim == 0 else out


@dataclass
class FadingProcess:
    """AR(1) log-normal offsets, one column per (UE, stream)."""

    n: int
    rho: float = 0.9
    sigma: float = 3.0
    offset: np.ndarray = field(default=None)

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.offset is None:
            self.offset = np.zeros(self.n)

    def start(self, rng: np.random.Generator) -> np.ndarray:
        """Draw the initial state from the stationary distribution."""
        self.offset = rng.normal(0.0, self.sigma, self.n) if self.sigma > 0 else np.zeros(self.n)
        return self.offset

    def step(self, rng: np.random.Generator) -> np.ndarray:
        innovation = rng.normal(0.0, self.sigma, self.n) if self.sigma > 0 else np.zeros(self.n)
        self.offset = self.rho * self.offset + math.sqrt(1.0 - self.rho**2) * innovation
        return self.offset


def fade_step(process: FadingProcess, rng: np.random.Generator) -> np.ndarray:
    return process.step(rng)
