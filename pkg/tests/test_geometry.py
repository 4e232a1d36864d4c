import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from shapely.geometry import Point

from hetcomp import geometry, propagation
from hetcomp.geometry import UserEquipment


@pytest.mark.parametrize("label, n_cells, n_picos", [("A", 6, 3), ("B", 32, 11)])
def test_cell_counts(label, n_cells, n_picos):
    sc = geometry.build_scenario(label, 3)
    assert len(sc.cells) == n_cells
    assert sum(c.is_pico for c in sc.cells) == n_picos
    assert sum(c.kind == "macro_sector" for c in sc.cells) == n_cells - n_picos
    assert sc.cooperating_set == tuple(range(n_cells))
    assert [c.id for c in sc.cells] == list(range(n_cells))


def test_sector_triples_and_table_values():
    sc = geometry.build_scenario("B", 0)
    by_site = {}
    for c in sc.cells:
        if c.is_pico:
            assert (c.tx_power, c.antenna_height) == (37.0, 10.0)
        else:
            assert (c.tx_power, c.antenna_height, c.electrical_tilt) == (46.0, 25.0, 4.0)
            by_site.setdefault(c.site_id, []).append(c.azimuth)
    assert len(by_site) == 7
    assert all(sorted(az) == [0.0, 120.0, 240.0] for az in by_site.values())


def test_layout_is_deterministic():
    assert geometry.build_scenario("A", 11) == geometry.build_scenario("A", 11)
    assert geometry.build_scenario("A", 11) != geometry.build_scenario("A", 12)


def test_ring_sites_are_one_isd_from_centre():
    sites = geometry.macro_site_positions(7)
    for x, y in sites[1:]:
        assert math.hypot(x, y) == pytest.approx(geometry.ISD_M)


def test_pico_spacing_rules():
    for seed in range(20):
        sc = geometry.build_scenario("B", seed)
        picos = [c.site_position for c in sc.cells if c.is_pico]
        area = sc.coverage()
        for i, p in enumerate(picos):
            assert area.covers(Point(p))
            assert min(math.dist(p, s) for s in sc.macro_sites) >= 20.0
            for q in picos[i + 1:]:
                assert math.dist(p, q) >= 40.0


def test_drop_ues_count_and_area():
    sc = geometry.build_scenario("A", 5)
    ues = geometry.drop_ues(sc, 60, 5)
    assert len(ues) == 60
    area = sc.coverage(geometry.SERVICE_MARGIN_M)
    assert all(area.covers(Point(u.position)) for u in ues)
    assert all(0 <= u.serving_cell < len(sc.cells) for u in ues)


def test_drop_is_deterministic():
    sc = geometry.build_scenario("A", 9)
    a = geometry.drop_ues(sc, 60, 9)
    b = geometry.drop_ues(sc, 60, 9)
    assert [u.position for u in a] == [u.position for u in b]


def test_empty_network_rejected():
    with pytest.raises(ValueError):
        geometry.drop_ues(geometry.build_scenario("A", 0), 0, 0)


def test_unknown_scenario_rejected():
    with pytest.raises(ValueError):
        geometry.build_scenario("C", 0)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), label=st.sampled_from(["A", "B"]))
def test_serving_cell_attains_max_rsrp(seed, label):
    sc = geometry.build_scenario(label, seed)
    ues = geometry.drop_ues(sc, 60, seed)
    table = geometry.link_table(sc, ues, seed)
    for ue, row in zip(ues, table):
        rsrp = [l.rsrp for l in row]
        assert rsrp[ue.serving_cell] == max(rsrp)


def test_ties_go_to_lowest_cell():
    assert geometry.best_cell([-80.0, -70.0, -70.0]) == 1


def test_ue_at_pico_centre_is_served_by_that_pico():
    sc = geometry.build_scenario("A", 4)
    pico = next(c for c in sc.cells if c.is_pico)
    ue = UserEquipment(0, pico.site_position, -1)
    # without shadowing, the pico wins by a wide margin at zero distance
    rsrp = [propagation.budget(c, ue, 0.0).rsrp for c in sc.cells]
    assert geometry.best_cell(rsrp) == pico.id
    # hand evaluation: 37 - 10log10(600) + 5 - 1 - PL(1 m, 10 m mast)
    assert rsrp[pico.id] == pytest.approx(-19.8356656422708, abs=1e-9)
    others = np.delete(rsrp, pico.id)
    assert rsrp[pico.id] - others.max() > 20.0
