"""Path loss, antenna patterns, shadowing and the per-link budget.

All quantities are in dB/dBm. Interference is not modelled: the zero-forcing
receiver assumption makes the wideband SNR the SINR everywhere downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .geometry import Cell, UserEquipment

FREQ_MHZ = 2100.0
BANDWIDTH_HZ = 10e6
N_PRB = 50
SUBCARRIERS = 12 * N_PRB
NOISE_DENSITY_DBM_HZ = -174.0
SHADOW_STD_DB = 8.0
MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class AntennaSpec:
    kind: str  # "parametric_3sector" or "omni"
    max_gain: float
    h_beamwidth: float = 65.0
    v_beamwidth: float = 6.2
    front_back: float = 30.0
    sla: float = 30.0

    def __post_init__(self):
        if self.kind not in ("parametric_3sector", "omni"):
            raise ValueError(f"unknown antenna kind {self.kind!r}")


# Generic parametric panel; pass a different AntennaSpec to model another antenna.
MACRO_ANTENNA = AntennaSpec("parametric_3sector", max_gain=18.0)
PICO_ANTENNA = AntennaSpec("omni", max_gain=5.0)


@dataclass(frozen=True)
class LinkState:
    cell_id: int
    ue_id: int
    path_loss: float
    antenna_gain: float
    shadow: float
    rsrp: float
    wideband_snr: float


def _hata_mobile_correction(h_ue: float) -> float:
    # large-city correction, valid for f >= 400 MHz
    return 3.2 * math.log10(11.75 * h_ue) ** 2 - 4.97


def cost231_path_loss(distance: float, freq: float = FREQ_MHZ, h_base: float = 25.0, h_ue: float = 1.5) -> float:
    """COST 231-Hata path loss in dB (metropolitan, +3 dB).

    ``distance`` is horizontal separation in metres, clamped to 1 m. The model's
    nominal range stops at 2000 MHz; higher carriers are extrapolated.
    """
    if freq <= 0 or h_base <= 0 or h_ue <= 0:
        raise ValueError("frequency and antenna heights must be positive")
    d_km = max(distance, MIN_DISTANCE_M) / 1000.0
    return (
        46.3
        + 33.9 * math.log10(freq)
        - 13.82 * math.log10(h_base)
        - _hata_mobile_correction(h_ue)
        + (44.9 - 6.55 * math.log10(h_base)) * math.log10(d_km)
        + 3.0
    )


def wrap_degrees(angle: float) -> float:
    """Map an angle to (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def antenna_gain(spec: AntennaSpec, azimuth_offset: float, elevation_offset: float, tilt: float = 0.0) -> float:
    """Gain in dBi towards a direction relative to boresight.

    ``elevation_offset`` is the depression angle below the horizon; ``tilt`` is
    the electrical downtilt, so boresight is at ``(0, tilt)``.
    """
    if spec.kind == "omni":
        return spec.max_gain
    horiz = min(12.0 * (azimuth_offset / spec.h_beamwidth) ** 2, spec.front_back)
    vert = min(12.0 * ((elevation_offset - tilt) / spec.v_beamwidth) ** 2, spec.sla)
    return spec.max_gain - min(horiz + vert, spec.front_back)


def noise_floor_dbm(noise_figure: float, bandwidth_hz: float = BANDWIDTH_HZ) -> float:
    return NOISE_DENSITY_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure


def per_re_power(tx_power: float) -> float:
    return tx_power - 10.0 * math.log10(SUBCARRIERS)


def link_angles(cell: Cell, ue: UserEquipment) -> tuple[float, float, float]:
    """Horizontal distance, azimuth offset from boresight, depression angle."""
    dx = ue.position[0] - cell.site_position[0]
    dy = ue.position[1] - cell.site_position[1]
    d2d = math.hypot(dx, dy)
    bearing = math.degrees(math.atan2(dy, dx))
    az_off = wrap_degrees(bearing - (cell.azimuth or 0.0))
    el = math.degrees(math.atan2(cell.antenna_height - ue.height, d2d))
    return d2d, az_off, el


def budget(cell: Cell, ue: UserEquipment, shadow: float) -> LinkState:
    d2d, az_off, el = link_angles(cell, ue)
    pl = cost231_path_loss(d2d, FREQ_MHZ, cell.antenna_height, ue.height)
    gain = antenna_gain(cell.antenna, az_off, el, cell.electrical_tilt or 0.0)
    rsrp = per_re_power(cell.tx_power) + gain + ue.antenna_gain - pl - shadow
    snr = rsrp + 10.0 * math.log10(SUBCARRIERS) - noise_floor_dbm(ue.noise_figure)
    return LinkState(cell.id, ue.id, pl, gain, shadow, rsrp, snr)


def compute_link(cell: Cell, ue: UserEquipment, rng: np.random.Generator) -> LinkState:
    """Draw the static shadowing for one link and evaluate its budget."""
    return budget(cell, ue, float(rng.normal(0.0, SHADOW_STD_DB)))


INTERFERENCE_MODELS = ("none", "residual", "full")


def stream_sinr(rsrp, serving, cooperating, noise_figure: float = 7.0, model: str = "none") -> np.ndarray:
    """Per-UE SINR (dB) of the serving and cooperating streams, shape (ue, 2).

    ``rsrp`` is (ue, cell) in dBm per RE. ``"none"`` is the ideal zero-forcing
    case (SINR = SNR). ``"residual"`` lets the two-antenna receiver null only
    its cooperating cell while all others interfere at full load; ``"full"``
    nulls nothing. Neither depends on the CoMP state.
    """
    if model not in INTERFERENCE_MODELS:
        raise ValueError(f"interference model must be one of {INTERFERENCE_MODELS}")
    rsrp = np.asarray(rsrp, dtype=float)
    idx = np.arange(rsrp.shape[0])
    noise_mw = 10.0 ** ((noise_floor_dbm(noise_figure) - 10.0 * math.log10(SUBCARRIERS)) / 10.0)
    lin = 10.0 ** (rsrp / 10.0)
    mask = np.ones_like(lin, dtype=bool)
    mask[idx, serving] = False
    if model == "residual":
        mask[idx, cooperating] = False
    interference = (lin * mask).sum(axis=1) if model != "none" else np.zeros(len(idx))
    signal = np.stack([rsrp[idx, serving], rsrp[idx, cooperating]], axis=1)
    if model == "full":
        # the cooperating cell's own power is not interference to itself
        interference = np.stack([interference, interference - lin[idx, cooperating] + lin[idx, serving]], axis=1)
    else:
        interference = np.stack([interference, interference], axis=1)
    return signal - 10.0 * np.log10(noise_mw + interference)
