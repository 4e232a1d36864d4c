import numpy as np
import pytest

from hetcomp import link
from hetcomp.scheduler import ThroughputLedger, deliver, pf_schedule, prb_rate


def run_pf(rates_fn, n_ues, n_ttis):
    ledger = ThroughputLedger(n_ues)
    share = np.zeros(n_ues)
    for t in range(n_ttis):
        rates = rates_fn(t)
        alloc = pf_schedule(0, range(n_ues), rates, ledger, t)
        prbs = np.zeros(n_ues)
        for u, k in alloc.counts().items():
            prbs[u] = k
        share += prbs
        ledger.update(prbs * rates)
    return share / share.sum()


def test_single_ue_gets_everything():
    alloc = pf_schedule(3, [7], [100.0], ThroughputLedger(10))
    assert alloc.counts() == {7: 50}
    assert alloc.cell_id == 3


def test_no_candidates_empty_allocation():
    assert pf_schedule(0, [], [], ThroughputLedger(2)).prbs == {}


def test_tie_goes_to_lowest_id():
    alloc = pf_schedule(0, [5, 2, 9], [10.0, 10.0, 10.0], ThroughputLedger(10))
    assert alloc.counts() == {2: 50}


def test_two_symmetric_ues_share_evenly():
    share = run_pf(lambda t: np.array([prb_rate(9), prb_rate(9)]), 2, 100)
    assert np.all((share >= 0.4) & (share <= 0.6))


def test_symmetric_fading_channels_converge():
    rng = np.random.default_rng(0)
    cqi = rng.integers(5, 12, size=(200, 4))
    share = run_pf(lambda t: np.array([prb_rate(c) for c in cqi[t]]), 4, 200)
    assert np.all(np.abs(share - 0.25) <= 0.025)


def test_starved_ue_wins():
    ledger = ThroughputLedger(3)
    for u in range(3):
        ledger.average(u, 1000.0)
    ledger.r_avg[1] = 1e-9
    alloc = pf_schedule(0, [0, 1, 2], [1000.0, 1000.0, 1000.0], ledger)
    assert alloc.counts() == {1: 50}


def test_conservation():
    ledger = ThroughputLedger(6)
    rng = np.random.default_rng(3)
    for t in range(30):
        alloc = pf_schedule(0, [0, 2, 4], rng.uniform(1, 100, 3), ledger, t)
        assert sum(alloc.counts().values()) == 50
        assert set(alloc.counts()) <= {0, 2, 4}
        ledger.update(rng.uniform(0, 10, 6))


def test_non_positive_rate_rejected():
    with pytest.raises(ValueError):
        pf_schedule(0, [0, 1], [1.0, 0.0], ThroughputLedger(2))


def test_full_band_cqi15():
    assert deliver(50, 15, 0.0) == pytest.approx(33328.2, abs=1e-9)


def test_delivery_edge_cases():
    assert deliver(50, 7, 1.0) == 0.0
    assert deliver(0, 7, 0.2) == 0.0
    two = deliver(np.array([[50, 50]]), np.array([[9, 9]]), np.array([[0.1, 0.1]])).sum()
    assert two == pytest.approx(2 * deliver(50, 9, 0.1))


def test_ledger_cumulative_nondecreasing():
    ledger = ThroughputLedger(2)
    ledger.average(0, 5.0)
    prev = ledger.cumulative_bits.copy()
    for bits in ([1.0, 0.0], [0.0, 0.0], [3.0, 2.0]):
        ledger.update(bits)
        assert np.all(ledger.cumulative_bits >= prev)
        prev = ledger.cumulative_bits.copy()
    assert ledger.r_avg[0] > 0
    assert np.isnan(ledger.r_avg[1])


def test_prb_rate():
    assert prb_rate(1) == pytest.approx(120 * link.EFFICIENCY[0])
