"""Hexagonal macro layout, pico densification and uniform UE drops."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely import prepared
from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

from . import propagation as prop
from .rng import substream

ISD_M = 100.0
N_UES = 60
SECTOR_AZIMUTHS = (0.0, 120.0, 240.0)
MACRO_POWER_DBM = 46.0
MACRO_HEIGHT_M = 25.0
MACRO_TILT_DEG = 4.0
PICO_POWER_DBM = 37.0
PICO_HEIGHT_M = 10.0
UE_HEIGHT_M = 1.5
UE_NOISE_FIGURE_DB = 7.0
UE_ANTENNA_GAIN_DBI = -1.0
SERVICE_MARGIN_M = 10.0
PICO_MIN_FROM_MACRO_M = 20.0
PICO_MIN_SPACING_M = 40.0

# label -> (macro sites, picos)
LAYOUTS = {"A": (1, 3), "B": (7, 11)}


@dataclass(frozen=True)
class Cell:
    id: int
    kind: str  # "macro_sector" or "pico"
    site_position: tuple[float, float]
    antenna_height: float
    tx_power: float
    antenna: prop.AntennaSpec
    azimuth: float | None = None
    electrical_tilt: float | None = None
    site_id: int | None = None

    @property
    def is_pico(self) -> bool:
        return self.kind == "pico"


@dataclass(frozen=True)
class UserEquipment:
    id: int
    position: tuple[float, float]
    serving_cell: int
    height: float = UE_HEIGHT_M
    noise_figure: float = UE_NOISE_FIGURE_DB
    antenna_gain: float = UE_ANTENNA_GAIN_DBI
    n_rx_antennas: int = 2


@dataclass(frozen=True)
class Scenario:
    label: str
    cells: tuple[Cell, ...]
    cooperating_set: tuple[int, ...]
    seed: int
    inter_site_distance: float = ISD_M
    n_ues: int = N_UES

    @property
    def macro_sites(self) -> list[tuple[float, float]]:
        seen = []
        for c in self.cells:
            if c.kind == "macro_sector" and c.site_position not in seen:
                seen.append(c.site_position)
        return seen

    def coverage(self, margin: float = 0.0):
        return coverage_area(self.macro_sites, self.inter_site_distance, margin)

    def cell(self, cell_id: int) -> Cell:
        return self.cells[cell_id]


def macro_site_positions(n_sites: int, isd: float = ISD_M) -> list[tuple[float, float]]:
    """Centre site plus the first ring (if requested) of a hexagonal grid."""
    if n_sites not in (1, 7):
        raise ValueError("only 1 or 7 macro sites are supported")
    sites = [(0.0, 0.0)]
    if n_sites == 7:
        for k in range(6):
            ang = math.radians(30.0 + 60.0 * k)
            sites.append((isd * math.cos(ang), isd * math.sin(ang)))
    return sites


def site_hexagon(center: tuple[float, float], isd: float = ISD_M) -> Polygon:
    # flat sides face the neighbouring sites (at 30 + 60k degrees)
    r = isd / math.sqrt(3.0)
    return Polygon(
        [(center[0] + r * math.cos(math.radians(60.0 * k)), center[1] + r * math.sin(math.radians(60.0 * k))) for k in range(6)]
    )


def coverage_area(sites, isd: float = ISD_M, margin: float = 0.0):
    area = unary_union([site_hexagon(s, isd) for s in sites])
    return area.buffer(margin) if margin > 0 else area


def _uniform_in(area, rng: np.random.Generator) -> tuple[float, float]:
    minx, miny, maxx, maxy = area.bounds
    inside = prepared.prep(area)
    while True:
        x, y = rng.uniform(minx, maxx), rng.uniform(miny, maxy)
        if inside.contains(Point(x, y)):
            return float(x), float(y)


def _place_picos(sites, n_picos: int, isd: float, rng: np.random.Generator, max_tries: int = 10_000):
    area = coverage_area(sites, isd)
    picos: list[tuple[float, float]] = []
    tries = 0
    while len(picos) < n_picos:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not place picos under the spacing rules")
        p = _uniform_in(area, rng)
        if any(math.dist(p, s) < PICO_MIN_FROM_MACRO_M for s in sites):
            continue
        if any(math.dist(p, q) < PICO_MIN_SPACING_M for q in picos):
            continue
        picos.append(p)
    return picos


def build_scenario(label: str, rng_seed: int) -> Scenario:
    """Scenario A: one 3-sector site and 3 picos. Scenario B: 7 sites and 11 picos."""
    if label not in LAYOUTS:
        raise ValueError(f"scenario must be one of {sorted(LAYOUTS)}, got {label!r}")
    n_sites, n_picos = LAYOUTS[label]
    sites = macro_site_positions(n_sites)
    cells: list[Cell] = []
    for site_id, pos in enumerate(sites):
        for az in SECTOR_AZIMUTHS:
            cells.append(
                Cell(
                    id=len(cells),
                    kind="macro_sector",
                    site_position=pos,
                    antenna_height=MACRO_HEIGHT_M,
                    tx_power=MACRO_POWER_DBM,
                    antenna=prop.MACRO_ANTENNA,
                    azimuth=az,
                    electrical_tilt=MACRO_TILT_DEG,
                    site_id=site_id,
                )
            )
    for pos in _place_picos(sites, n_picos, ISD_M, substream(rng_seed, "pico_drop")):
        cells.append(
            Cell(
                id=len(cells),
                kind="pico",
                site_position=pos,
                antenna_height=PICO_HEIGHT_M,
                tx_power=PICO_POWER_DBM,
                antenna=prop.PICO_ANTENNA,
            )
        )
    return Scenario(label, tuple(cells), tuple(c.id for c in cells), rng_seed)


def link_table(scenario: Scenario, ues, rng_seed: int) -> list[list[prop.LinkState]]:
    """``table[ue][cell]``; shadowing comes from a per-link substream."""
    return [
        [prop.compute_link(cell, ue, substream(rng_seed, "shadow", cell.id, ue.id)) for cell in scenario.cells]
        for ue in ues
    ]


def best_cell(rsrps) -> int:
    # np.argmax returns the first maximum: ties go to the lowest cell id
    return int(np.argmax(np.asarray(rsrps)))


def drop_ues(scenario: Scenario, q: int, rng_seed: int) -> list[UserEquipment]:
    """Drop ``q`` UEs uniformly over the service area and attach each to its best cell."""
    if q < 1:
        raise ValueError("at least one UE is required")
    area = scenario.coverage(SERVICE_MARGIN_M)
    rng = substream(rng_seed, "ue_drop")
    unattached = [UserEquipment(id=i, position=_uniform_in(area, rng), serving_cell=-1) for i in range(q)]
    table = link_table(scenario, unattached, rng_seed)
    return [
        UserEquipment(id=ue.id, position=ue.position, serving_cell=best_cell([l.rsrp for l in row]))
        for ue, row in zip(unattached, table)
    ]
