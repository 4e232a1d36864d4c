"""The TTI loop: fading, CQI feedback, CoMP decisions, PF scheduling, delivery, reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import controller as ctl
from . import geometry, link, metrics, propagation, svm
from .rng import substream
from .scheduler import ThroughputLedger, deliver, pf_schedule, prb_rate

MODES = ("baseline", "dynamic", "both")
STREAM2_PRBS = ("cooperating", "shadow")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    scenario: str = "A"
    mode: str = "both"
    seed: int = 0
    n_ttis: int = 60
    t_comp: int = ctl.T_COMP
    epsilon: float = ctl.EPSILON
    sinr_min: float = ctl.SINR_MIN_DB
    r_train: float = ctl.R_TRAIN
    cv_k: int = ctl.CV_K
    n_ues: int = geometry.N_UES
    baseline_aggregate: str = "median"
    stream2_prbs: str = "cooperating"
    grid_c: tuple = svm.DEFAULT_C
    grid_scales: tuple = svm.DEFAULT_SCALES
    grid_kernels: tuple = ("linear", "gaussian", "polynomial")
    grid_degrees: tuple = (2, 3, 4)
    grid_normalize: tuple = (True, False)
    interference: str = "none"
    fading_rho: float = 0.9
    fading_sigma: float = 3.0
    output_dir: str | None = None
    figures: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            ("scenario", self.scenario in geometry.LAYOUTS, f"must be one of {sorted(geometry.LAYOUTS)}"),
            ("mode", self.mode in MODES, f"must be one of {MODES}"),
            ("seed", isinstance(self.seed, int) and self.seed >= 0, "must be a non-negative integer"),
            ("n_ttis", isinstance(self.n_ttis, int) and self.n_ttis >= 1, "must be a positive integer"),
            ("t_comp", isinstance(self.t_comp, int) and self.t_comp >= 1, "must be a positive integer"),
            ("epsilon", 0.0 < self.epsilon < 1.0, "must lie in (0, 1)"),
            ("sinr_min", math.isfinite(self.sinr_min), "must be finite"),
            ("r_train", 0.0 < self.r_train < 1.0, "must lie in (0, 1)"),
            ("cv_k", isinstance(self.cv_k, int) and self.cv_k >= 2, "must be an integer >= 2"),
            ("n_ues", isinstance(self.n_ues, int) and self.n_ues >= 1, "must be a positive integer"),
            ("baseline_aggregate", self.baseline_aggregate in ctl.AGGREGATES, f"must be one of {sorted(ctl.AGGREGATES)}"),
            ("stream2_prbs", self.stream2_prbs in STREAM2_PRBS, f"must be one of {STREAM2_PRBS}"),
            ("interference", self.interference in propagation.INTERFERENCE_MODELS, f"must be one of {propagation.INTERFERENCE_MODELS}"),
            ("fading_rho", 0.0 <= self.fading_rho < 1.0, "must lie in [0, 1)"),
            ("fading_sigma", self.fading_sigma >= 0.0, "must be non-negative"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ConfigError(name, msg)
        try:
            grid = self.grid()
        except (TypeError, ValueError) as exc:
            raise ConfigError("grid", str(exc)) from exc
        if not grid:
            raise ConfigError("grid", "hyperparameter grid is empty")

    def grid(self) -> list[svm.GridPoint]:
        return svm.make_grid(self.grid_c, self.grid_scales, self.grid_kernels, self.grid_degrees, self.grid_normalize)

    def to_dict(self) -> dict:
        return {f.name: list(v) if isinstance(v := getattr(self, f.name), tuple) else v for f in fields(self)}


@dataclass
class Environment:
    """Everything random outside the controller; shared by both modes."""

    scenario: geometry.Scenario
    ues: list[geometry.UserEquipment]
    rsrp: np.ndarray  # (ue, cell)
    snr: np.ndarray  # (ue, cell), static wideband SNR
    serving: np.ndarray
    cooperating: np.ndarray  # strongest non-serving cell per UE
    stream_snr: np.ndarray  # (ue, stream) before fading
    fading: np.ndarray  # (tti, ue, stream)

    @property
    def serving_rsrp(self) -> np.ndarray:
        return self.rsrp[np.arange(len(self.ues)), self.serving]

    @property
    def groups(self) -> list[str]:
        return ["pico" if self.scenario.cells[c].is_pico else "macro" for c in self.serving]


def build_environment(cfg: RunConfig) -> Environment:
    scenario = geometry.build_scenario(cfg.scenario, cfg.seed)
    ues = geometry.drop_ues(scenario, cfg.n_ues, cfg.seed)
    table = geometry.link_table(scenario, ues, cfg.seed)
    rsrp = np.array([[l.rsrp for l in row] for row in table])
    snr = np.array([[l.wideband_snr for l in row] for row in table])
    serving = np.array([ue.serving_cell for ue in ues])
    cooperating = np.array([ctl.comp_links(ue.serving_cell, rsrp[ue.id], True)[1] for ue in ues])
    stream_snr = propagation.stream_sinr(rsrp, serving, cooperating, geometry.UE_NOISE_FIGURE_DB, cfg.interference)
    fading = np.empty((cfg.n_ttis, len(ues), 2))
    for ue in ues:
        for stream in range(2):
            rng = substream(cfg.seed, "fading", ue.id, stream)
            proc = link.FadingProcess(1, cfg.fading_rho, cfg.fading_sigma)
            proc.start(rng)
            fading[0, ue.id, stream] = proc.offset[0]
            for t in range(1, cfg.n_ttis):
                fading[t, ue.id, stream] = link.fade_step(proc, rng)[0]
    return Environment(scenario, ues, rsrp, snr, serving, cooperating, stream_snr, fading)


@dataclass
class TraceRow:
    tti: int
    state: int
    source: str
    err: float | None


@dataclass
class ModeResult:
    mode: str
    summary: metrics.KpiSummary
    per_ue: list[metrics.PerUe]
    trace: list[TraceRow]
    decisions: list[ctl.CompDecision]
    reports: list[ctl.UeReport]
    ledger: ThroughputLedger
    allocations: list = field(default_factory=list)
    cqi_reports: np.ndarray | None = None
    snr_reports: np.ndarray | None = None


def simulate(env: Environment, cfg: RunConfig, mode: str, on_model=None) -> ModeResult:
    """Run one controller mode ("baseline" or "dynamic") over the shared environment."""
    if mode not in ("baseline", "dynamic"):
        raise ValueError(f"mode must be baseline or dynamic, got {mode!r}")
    n_ues = len(env.ues)
    n_cells = len(env.scenario.cells)
    T = cfg.n_ttis
    gate = ctl.SvmGate(cfg.epsilon, cfg.r_train, cfg.cv_k, cfg.grid(), cfg.seed, on_model)
    ledger = ThroughputLedger(n_ues)
    rsrp_serving = env.serving_rsrp
    link_snr = env.stream_snr
    attached = [np.flatnonzero(env.serving == c) for c in range(n_cells)]
    helped = [np.flatnonzero(env.cooperating == c) for c in range(n_cells)]

    cqi_rep = np.empty((T, n_ues, 2), dtype=int)
    snr_rep = np.empty((T, n_ues, 2))
    bler_obs = np.empty((T, n_ues))
    blocks: list[float] = []
    reports: list[ctl.UeReport] = []
    decisions: list[ctl.CompDecision] = []
    trace: list[TraceRow] = []
    allocations = []
    directive = None

    for t in range(T):
        snr = link_snr + env.fading[t]
        snr_rep[t] = snr
        cqi_rep[t] = link.snr_to_cqi(snr)
        # one TTI of CQI feedback delay
        cqi_used = cqi_rep[t - 1] if t > 0 else cqi_rep[0]
        bl = link.bler(snr, cqi_used)

        if t % cfg.t_comp == 0:
            w = t // cfg.t_comp
            base_on = ctl.baseline_rule(snr[:, 0], cfg.sinr_min, cfg.baseline_aggregate)
            if mode == "baseline" or w == 0:
                decision = ctl.CompDecision(w, base_on, "baseline_rule")
            else:
                data = ctl.collect_window(reports, cfg.t_comp)
                decision = gate.decide(data, w, base_on)
            decisions.append(decision)
            directive = ctl.apply_decision(decision, cfg.t_comp)
        enabled = directive.enabled
        decision = decisions[-1]
        trace.append(TraceRow(t, int(enabled), decision.source, decision.err))

        n_prb = np.zeros((n_ues, 2))
        rates = np.vectorize(prb_rate)(cqi_used)
        for c in range(n_cells):
            a = pf_schedule(c, attached[c], rates[attached[c], 0], ledger, t)
            allocations.append((1, a))
            for u, k in a.counts().items():
                n_prb[u, 0] += k
        if enabled:
            if cfg.stream2_prbs == "cooperating":
                for c in range(n_cells):
                    a = pf_schedule(c, helped[c], rates[helped[c], 1], ledger, t)
                    allocations.append((2, a))
                    for u, k in a.counts().items():
                        n_prb[u, 1] += k
            else:
                n_prb[:, 1] = n_prb[:, 0]
        bits = deliver(n_prb, cqi_used, bl).sum(axis=1)
        ledger.update(bits)

        sent = n_prb > 0
        blocks.extend(bl[sent].tolist())
        avail = np.zeros_like(sent)
        avail[:, 0] = True
        avail[:, 1] = enabled
        mask = np.where(sent.any(axis=1)[:, None], sent, avail)
        bler_obs[t] = (bl * mask).sum(axis=1) / mask.sum(axis=1)
        for u in range(n_ues):
            reports.append(ctl.UeReport(t, u, int(cqi_rep[t, u, 0]), float(rsrp_serving[u]), float(bler_obs[t, u])))

    rsrp_rep = np.broadcast_to(rsrp_serving, (T, n_ues))
    per_ue = metrics.per_ue_table(env.groups, ledger.cumulative_bits, T, cqi_rep[:, :, 0], rsrp_rep, bler_obs)
    summary = metrics.aggregate(per_ue, blocks, cqi_rep[:, :, 0], rsrp_rep, cfg.scenario, mode)
    summary.extra["comp_on_fraction"] = float(np.mean([r.state for r in trace]))
    summary.extra["sources"] = {s: sum(d.source == s for d in decisions) for s in ("baseline_rule", "ml_override", "degenerate_fallback")}
    return ModeResult(mode, summary, per_ue, trace, decisions, reports, ledger, allocations, cqi_rep, snr_rep)


def modes_for(cfg: RunConfig) -> tuple[str, ...]:
    return ("baseline", "dynamic") if cfg.mode == "both" else (cfg.mode,)


def run_modes(cfg: RunConfig, on_model=None) -> tuple[Environment, dict[str, ModeResult]]:
    env = build_environment(cfg)
    return env, {m: simulate(env, cfg, m, on_model) for m in modes_for(cfg)}
