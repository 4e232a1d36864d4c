"""Proportional-fair PRB allocation and delivered-bit accounting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .link import cqi_to_efficiency
from .propagation import N_PRB

DATA_RE_PER_PRB = 120
PF_WINDOW_TTIS = 20


@dataclass
class Allocation:
    tti: int
    cell_id: int
    prbs: dict[int, int] = field(default_factory=dict)  # PRB index -> ue id

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for ue in self.prbs.values():
            out[ue] = out.get(ue, 0) + 1
        return out


class ThroughputLedger:
    """Per-UE cumulative bits and the PF moving-average rate."""

    def __init__(self, n_ues: int, window: int = PF_WINDOW_TTIS):
        self.window = window
        self.cumulative_bits = np.zeros(n_ues)
        self.r_avg = np.full(n_ues, np.nan)
        self.history: list[np.ndarray] = []

    def average(self, ue: int, r_inst: float) -> float:
        # r_avg starts at the UE's first instantaneous rate
        if np.isnan(self.r_avg[ue]):
            self.r_avg[ue] = r_inst
        return self.r_avg[ue]

    def update(self, delivered_bits: np.ndarray) -> None:
        delivered_bits = np.asarray(delivered_bits, dtype=float)
        self.cumulative_bits += delivered_bits
        seen = ~np.isnan(self.r_avg)
        b = 1.0 / self.window
        self.r_avg[seen] = (1.0 - b) * self.r_avg[seen] + b * delivered_bits[seen]
        self.history.append(delivered_bits.copy())


def pf_schedule(cell_id: int, candidates, instantaneous_rates, ledger: ThroughputLedger, tti: int = 0, n_prb: int = N_PRB) -> Allocation:
    """Give each PRB to the candidate with the largest r_inst / r_avg.

    With wideband CQI the metric is flat across PRBs, so every PRB of a TTI
    goes to the same UE; ``ledger.update`` is what rotates service between TTIs.
    Ties go to the lowest UE id.
    """
    alloc = Allocation(tti, cell_id)
    candidates = list(candidates)
    if not candidates:
        return alloc
    order = sorted(range(len(candidates)), key=lambda k: candidates[k])
    best, best_metric = None, -np.inf
    for k in order:
        ue = candidates[k]
        r = float(instantaneous_rates[k])
        if r <= 0:
            raise ValueError(f"UE {ue} has non-positive instantaneous rate")
        avg = ledger.average(ue, r)
        metric = r / avg if avg > 0 else np.inf
        if metric > best_metric:
            best, best_metric = ue, metric
    for prb in range(n_prb):
        alloc.prbs[prb] = best
    return alloc


def prb_rate(cqi) -> float:
    """Bits one PRB carries in one TTI at ``cqi`` with no errors."""
    return DATA_RE_PER_PRB * cqi_to_efficiency(cqi)


def deliver(n_prbs, cqi, bler) -> np.ndarray:
    """Goodput per (UE, stream) entry: PRBs x REs x efficiency x (1 - BLER).

    Arguments broadcast; sum over the stream axis to get per-UE bits.
    """
    n = np.asarray(n_prbs, dtype=float)
    c = np.where(n > 0, np.asarray(cqi), 1)
    return n * DATA_RE_PER_PRB * np.asarray(cqi_to_efficiency(c)) * (1.0 - np.asarray(bler, dtype=float))
