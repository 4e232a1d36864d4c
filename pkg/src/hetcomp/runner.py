"""Run orchestration and artifact emission (CSV / JSON / figures)."""

from __future__ import annotations

import csv
import json
import logging
import os
import time

import numpy as np

from . import __version__, link, metrics
from .sim import Environment, ModeResult, RunConfig, modes_for, run_modes

log = logging.getLogger(__name__)


def _dump_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _num(v):
    return "" if v is None else repr(float(v))


def write_trace(path, result: ModeResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tti", "state", "source", "err"])
        for r in result.trace:
            w.writerow([r.tti, r.state, r.source, _num(r.err)])


def write_state_plotdata(path, results: dict[str, ModeResult]) -> None:
    modes = list(results)
    n = len(next(iter(results.values())).trace)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tti"] + [f"{m}_state" for m in modes])
        for t in range(n):
            w.writerow([t] + [results[m].trace[t].state for m in modes])


def write_snr_cqi_plotdata(path, lo: float = -10.0, hi: float = 30.0, step: float = 0.1) -> None:
    snr = np.round(np.arange(lo, hi + step / 2, step), 6)
    cqi = link.snr_to_cqi(snr)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["snr_db", "cqi", "efficiency"])
        for s, c in zip(snr, cqi):
            w.writerow([f"{s:.1f}", int(c), f"{link.cqi_to_efficiency(int(c)):.4f}"])


def manifest(cfg: RunConfig, results: dict[str, ModeResult]) -> dict:
    windows = {}
    for mode, res in results.items():
        windows[mode] = [
            {"window": d.window_index, "enabled": d.enabled, "source": d.source, "err": d.err, "selection": d.selection}
            for d in res.decisions
        ]
    return {
        "software": {"package": "hetcomp", "version": __version__, "numpy": np.__version__},
        # where the files landed does not affect the results; leaving it out keeps copies comparable
        "config": {k: v for k, v in cfg.to_dict().items() if k != "output_dir"},
        "cqi_table": link.CQI_TABLE.to_dict(),
        "grid": [p.to_dict() for p in cfg.grid()],
        "windows": windows,
    }


def write_mode(directory, res: ModeResult) -> None:
    os.makedirs(directory, exist_ok=True)
    metrics.write_per_ue(os.path.join(directory, "per_ue.csv"), res.per_ue)
    write_trace(os.path.join(directory, "comp_trace.csv"), res)
    _dump_json(os.path.join(directory, "kpis.json"), res.summary.to_dict())
    metrics.write_kpis_csv(os.path.join(directory, "kpis.csv"), res.summary)


def write_outputs(cfg: RunConfig, env: Environment, results: dict[str, ModeResult], out_dir: str, wall_clock: float | None = None) -> None:
    """Flat layout for a single mode; per-mode subdirectories plus a comparison for ``both``."""
    os.makedirs(out_dir, exist_ok=True)
    _dump_json(os.path.join(out_dir, "manifest.json"), manifest(cfg, results))
    write_snr_cqi_plotdata(os.path.join(out_dir, "plotdata_snr_cqi.csv"))
    write_state_plotdata(os.path.join(out_dir, "plotdata_comp_state.csv"), results)
    if len(results) == 1:
        write_mode(out_dir, next(iter(results.values())))
    else:
        for mode, res in results.items():
            write_mode(os.path.join(out_dir, mode), res)
        rows = metrics.compare_runs(results["baseline"].summary, results["dynamic"].summary)
        _dump_json(os.path.join(out_dir, "kpis.json"), {"modes": {m: r.summary.to_dict() for m, r in results.items()}, "comparison": rows})
        metrics.write_comparison_csv(os.path.join(out_dir, "kpis.csv"), rows)
    if wall_clock is not None:
        # kept out of the JSON outputs so reruns stay byte-identical
        with open(os.path.join(out_dir, "timing.txt"), "w") as fh:
            fh.write(f"wall_clock_s {wall_clock:.3f}\n")
    if cfg.figures:
        from . import plotting

        plotting.render_all(out_dir, env, results)


def run(cfg: RunConfig, on_model=None) -> dict[str, metrics.KpiSummary]:
    """Simulate every requested mode and, if ``cfg.output_dir`` is set, write artifacts."""
    started = time.perf_counter()
    env, results = run_modes(cfg, on_model)
    elapsed = time.perf_counter() - started
    for mode, res in results.items():
        s = res.summary
        log.info(
            "scenario %s %s: pico avg %.3f Mbps, edge %.3f Mbps, BLER %s, CoMP on %.0f%%",
            cfg.scenario, mode, s.groups["pico"].average or float("nan"), s.groups["pico"].edge or float("nan"),
            s.bler_percent, 100 * s.extra["comp_on_fraction"],
        )
    if cfg.output_dir:
        write_outputs(cfg, env, results, cfg.output_dir, elapsed)
    return {m: results[m].summary for m in modes_for(cfg)}
