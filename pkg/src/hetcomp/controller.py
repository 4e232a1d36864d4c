"""Windowed CoMP trigger: the SINR-threshold baseline and the SVM-gated override."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import svm
from .link import HARQ_TARGET
from .rng import substream

T_COMP = 3
EPSILON = 0.12
SINR_MIN_DB = 3.0
R_TRAIN = 0.7
CV_K = 5

AGGREGATES = {
    "median": lambda s, thr: float(np.median(s)) >= thr,
    "mean": lambda s, thr: float(np.mean(s)) >= thr,
    "fraction": lambda s, thr: float(np.mean(np.asarray(s) >= thr)) >= 0.5,
}


@dataclass(frozen=True)
class UeReport:
    tti: int
    ue_id: int
    cqi: int
    rsrp: float
    bler_observed: float

    @property
    def label(self) -> int:
        return int(self.bler_observed <= HARQ_TARGET)


@dataclass
class CompDecision:
    window_index: int
    enabled: bool
    source: str  # "ml_override", "baseline_rule" or "degenerate_fallback"
    err: float | None = None
    selection: dict | None = None

    def __post_init__(self):
        if self.source == "ml_override" and (self.err is None or not self.enabled):
            raise ValueError("an ML override must enable CoMP and carry its test error")


@dataclass(frozen=True)
class Directive:
    """CoMP state that holds for TTIs ``first .. last`` inclusive."""

    first: int
    last: int
    enabled: bool

    def ttis(self) -> range:
        return range(self.first, self.last + 1)


def gate(window_index: int, err: float, epsilon: float, baseline_enabled: bool, selection: dict | None = None) -> CompDecision:
    """Override to CoMP on when the test error is within ``epsilon``, else defer to the baseline."""
    if err > epsilon:
        return CompDecision(window_index, baseline_enabled, "baseline_rule", err, selection)
    return CompDecision(window_index, True, "ml_override", err, selection)


def collect_window(reports, t_comp: int = T_COMP) -> svm.Dataset:
    """Rows for the last ``t_comp`` TTIs present in ``reports``, ordered by (tti, ue)."""
    if t_comp < 1:
        raise ValueError("t_comp must be at least 1")
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to collect")
    last = max(r.tti for r in reports)
    rows = sorted((r for r in reports if r.tti > last - t_comp), key=lambda r: (r.tti, r.ue_id))
    X = np.array([[r.cqi, r.rsrp] for r in rows], dtype=float)
    y = np.array([r.label for r in rows], dtype=int)
    return svm.Dataset(X, y)


def baseline_rule(ue_snrs, sinr_min: float = SINR_MIN_DB, aggregate: str = "median") -> bool:
    """Cluster-wide trigger from reported wideband SNRs."""
    snrs = np.asarray(list(ue_snrs), dtype=float)
    if snrs.size == 0:
        raise ValueError("baseline rule needs at least one SNR report")
    return AGGREGATES[aggregate](snrs, sinr_min)


def apply_decision(decision: CompDecision, t_comp: int = T_COMP) -> Directive:
    first = decision.window_index * t_comp
    return Directive(first, first + t_comp - 1, decision.enabled)


def comp_links(serving: int, rsrp_row, enabled: bool) -> tuple[int, ...]:
    """Transmitting cells for one UE: serving only, or serving plus the strongest other cell."""
    if not enabled:
        return (serving,)
    rsrp = np.array(rsrp_row, dtype=float)
    rsrp[serving] = -np.inf
    return (serving, int(np.argmax(rsrp)))


@dataclass
class SvmGate:
    """Trains, validates and thresholds one classifier per window."""

    epsilon: float = EPSILON
    r_train: float = R_TRAIN
    cv_k: int = CV_K
    grid: list = field(default_factory=svm.make_grid)
    seed: int = 0
    on_model: object = None  # optional callback(model, train_set), for audits

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")

    def decide(self, data: svm.Dataset, window_index: int, baseline_enabled: bool) -> CompDecision:
        try:
            train_set, test_set = svm.split_train_test(data, self.r_train, substream(self.seed, "svm_split", window_index))
            search = svm.grid_search_cv(train_set, self.cv_k, self.grid, substream(self.seed, "svm_folds", window_index))
            best = search.best
            model = svm.train(train_set, best.kernel, best.C, best.normalize)
        except (svm.DegenerateWindow, svm.SolverError):
            return CompDecision(window_index, baseline_enabled, "degenerate_fallback")
        if self.on_model is not None:
            self.on_model(model, train_set)
        err = svm.misclassification_error(svm.predict(model, test_set.X), test_set.y)
        selection = {**best.to_dict(), "cv_hinge_loss": search.cv_loss, "folds": search.k, "n_train": len(train_set), "n_test": len(test_set), "err": err}
        return gate(window_index, err, self.epsilon, baseline_enabled, selection)


def decide(data: svm.Dataset, epsilon: float, baseline_enabled: bool, window_index: int = 0, **gate_kwargs) -> CompDecision:
    return SvmGate(epsilon=epsilon, **gate_kwargs).decide(data, window_index, baseline_enabled)
