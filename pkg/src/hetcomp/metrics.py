"""KPI aggregation (peak / average / edge throughput, link-level averages) and run comparison."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

GROUPS = ("macro", "pico", "overall")
EDGE_PERCENTILE = 5.0
PEAK_PERCENTILE = 95.0
TTI_SECONDS = 1e-3


@dataclass
class GroupKpi:
    n_ues: int
    peak: float | None
    average: float | None
    edge: float | None
    mean_cqi: float | None
    mean_rsrp: float | None

    @property
    def mean_cqi_rounded(self) -> int | None:
        return None if self.mean_cqi is None else int(round(self.mean_cqi))


@dataclass
class KpiSummary:
    scenario: str
    mode: str
    groups: dict[str, GroupKpi]
    bler: float  # fraction over transmitted blocks
    mean_cqi: float
    mean_rsrp: float
    n_blocks: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def bler_percent(self) -> str:
        return f"{100.0 * self.bler:.2f}%"

    @property
    def mean_cqi_rounded(self) -> int:
        return int(round(self.mean_cqi))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bler_percent"] = self.bler_percent
        d["mean_cqi_rounded"] = self.mean_cqi_rounded
        for name, g in self.groups.items():
            d["groups"][name]["mean_cqi_rounded"] = g.mean_cqi_rounded
        return d


def throughput_stats(values) -> tuple[float | None, float | None, float | None]:
    """(peak, average, edge); percentiles use linear interpolation between order statistics."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return None, None, None
    peak, edge = np.percentile(v, [PEAK_PERCENTILE, EDGE_PERCENTILE])
    return float(peak), float(v.mean()), float(edge)


@dataclass
class PerUe:
    ue_id: int
    group: str
    throughput_mbps: float
    mean_cqi: float
    mean_rsrp_dbm: float
    mean_bler: float


def per_ue_table(ue_groups, cumulative_bits, n_ttis, cqi_reports, rsrp_reports, bler_reports) -> list[PerUe]:
    """Per-UE long-run averages; report arrays are shaped (tti, ue)."""
    seconds = n_ttis * TTI_SECONDS
    rows = []
    for u, group in enumerate(ue_groups):
        rows.append(
            PerUe(
                ue_id=u,
                group=group,
                throughput_mbps=float(cumulative_bits[u]) / seconds / 1e6,
                mean_cqi=float(np.mean(cqi_reports[:, u])),
                mean_rsrp_dbm=float(np.mean(rsrp_reports[:, u])),
                mean_bler=float(np.mean(bler_reports[:, u])),
            )
        )
    return rows


def aggregate(per_ue: list[PerUe], block_blers, cqi_reports, rsrp_reports, scenario: str = "", mode: str = "") -> KpiSummary:
    groups = {}
    for name in GROUPS:
        members = [r for r in per_ue if name == "overall" or r.group == name]
        ids = [r.ue_id for r in members]
        peak, avg, edge = throughput_stats([r.throughput_mbps for r in members])
        groups[name] = GroupKpi(
            n_ues=len(members),
            peak=peak,
            average=avg,
            edge=edge,
            mean_cqi=float(np.mean(cqi_reports[:, ids])) if ids else None,
            mean_rsrp=float(np.mean(rsrp_reports[:, ids])) if ids else None,
        )
    blocks = np.asarray(block_blers, dtype=float)
    return KpiSummary(
        scenario=scenario,
        mode=mode,
        groups=groups,
        bler=float(blocks.mean()) if blocks.size else math.nan,
        mean_cqi=float(np.mean(cqi_reports)),
        mean_rsrp=float(np.mean(rsrp_reports)),
        n_blocks=int(blocks.size),
    )


# metric -> True when larger is better
COMPARED = {"peak": True, "average": True, "edge": True}


def compare_runs(baseline: KpiSummary, dynamic: KpiSummary) -> list[dict]:
    """Side-by-side rows with deltas (dynamic - baseline) and improvement flags."""
    if baseline.scenario != dynamic.scenario:
        raise ValueError(f"cannot compare scenario {baseline.scenario} with {dynamic.scenario}")
    rows = []
    for name in GROUPS:
        b, d = baseline.groups[name], dynamic.groups[name]
        for metric, higher_better in COMPARED.items():
            rows.append(_row(name, metric, getattr(b, metric), getattr(d, metric), higher_better))
    rows.append(_row("overall", "bler", baseline.bler, dynamic.bler, False))
    rows.append(_row("overall", "cqi", baseline.mean_cqi, dynamic.mean_cqi, True))
    rows.append(_row("overall", "rsrp_dbm", baseline.mean_rsrp, dynamic.mean_rsrp, True))
    return rows


def _row(group, metric, b, d, higher_better):
    if b is None or d is None:
        delta, improved = None, False
    else:
        delta = d - b
        improved = delta > 0 if higher_better else delta < 0
    return {"group": group, "metric": metric, "baseline": b, "dynamic": d, "delta": delta, "improved": improved}


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_per_ue(path, rows: list[PerUe]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ue_id", "group", "throughput_mbps", "mean_cqi", "mean_rsrp_dbm", "mean_bler"])
        for r in rows:
            w.writerow([r.ue_id, r.group, _fmt(r.throughput_mbps), _fmt(r.mean_cqi), _fmt(r.mean_rsrp_dbm), _fmt(r.mean_bler)])


def write_kpis_csv(path, summary: KpiSummary) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "n_ues", "peak_mbps", "average_mbps", "edge_mbps", "mean_cqi", "mean_rsrp_dbm"])
        for name, g in summary.groups.items():
            w.writerow([name, g.n_ues] + [_round(v, 2) for v in (g.peak, g.average, g.edge, g.mean_cqi, g.mean_rsrp)])
        w.writerow([])
        w.writerow(["dl_bler", "mean_cqi", "mean_cqi_rounded", "mean_rsrp_dbm"])
        w.writerow([summary.bler_percent, _round(summary.mean_cqi, 2), summary.mean_cqi_rounded, _round(summary.mean_rsrp, 2)])


def write_comparison_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "metric", "baseline", "dynamic", "delta", "improved"])
        for r in rows:
            w.writerow([r["group"], r["metric"], _fmt(r["baseline"]), _fmt(r["dynamic"]), _fmt(r["delta"]), int(r["improved"])])


def _round(v, nd):
    return "" if v is None else f"{v:.{nd}f}"
