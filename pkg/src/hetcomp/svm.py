"""Soft-margin SVM: kernels, SMO training, prediction, model selection.

Labels are {0, 1} at the interface and mapped to {-1, +1} internally.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _smo

KKT_TOL = 1e-3
EQUALITY_TOL = 1e-6
MAX_ITER = 10_000
KERNEL_ORDER = {"linear": 0, "gaussian": 1, "polynomial": 2}
EPS = np.finfo(float).eps


class DegenerateWindow(ValueError):
    """Data cannot support training (one class only, or too few rows)."""


class SolverError(RuntimeError):
    """SMO stopped without reaching the KKT tolerance."""


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    scale: float = 1.0
    degree: int | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_ORDER:
            raise ValueError(f"unknown kernel {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("kernel scale must be positive")
        if (self.kind == "polynomial") != (self.degree is not None):
            raise ValueError("degree is required for polynomial kernels and only for them")
        if self.degree is not None and self.degree not in (2, 3, 4):
            raise ValueError("polynomial degree must be 2, 3 or 4")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale, "degree": self.degree}


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(len(self.y), -1)
        self.y = np.asarray(self.y, dtype=int)

    def __len__(self):
        return len(self.y)

    def subset(self, idx) -> Dataset:
        return Dataset(self.X[idx], self.y[idx])


@dataclass
class SvmModel:
    support_vectors: np.ndarray
    coef: np.ndarray  # lambda_i * y_i (signed labels)
    alpha: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float
    mean: np.ndarray | None = None
    std: np.ndarray | None = None
    support_indices: np.ndarray | None = None
    n_iter: int = 0
    dual_objective: float = field(default=float("nan"))

    def transform(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.mean is None:
            return X
        return (X - self.mean) / self.std

    def decision_function(self, X) -> np.ndarray:
        Z = self.transform(X)
        return kernel_matrix(Z, self.support_vectors, self.kernel) @ self.coef + self.bias

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "C": self.C,
            "bias": self.bias,
            "normalize": self.mean is not None,
            "mean": None if self.mean is None else self.mean.tolist(),
            "std": None if self.std is None else self.std.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "coef": self.coef.tolist(),
        }


def kernel_matrix(A, B, spec: KernelSpec) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    s2 = spec.scale**2
    if spec.kind == "gaussian":
        sq = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-np.maximum(sq, 0.0) / (2.0 * s2))
    inner = A @ B.T / s2
    if spec.kind == "linear":
        return inner
    return (1.0 + inner) ** spec.degree


def kernel_eval(x, x2, spec: KernelSpec) -> float:
    return float(kernel_matrix(x, x2, spec)[0, 0])


def signed(y) -> np.ndarray:
    return 2.0 * np.asarray(y, dtype=float) - 1.0


def dual_objective(alpha, K, ys) -> float:
    v = alpha * ys
    return float(alpha.sum() - 0.5 * v @ K @ v)


def _standardize(X):
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # a constant column carries no information; leave it centred but unscaled
    std = np.where(std > 0, std, 1.0)
    return mean, std


def kkt_report(alpha, K, ys, bias, C, tol=KKT_TOL) -> dict:
    """Worst violation of each optimality condition for a trained dual."""
    margin = ys * (K @ (alpha * ys) + bias)
    at_zero = alpha <= 0.0
    at_c = alpha >= C
    free = ~at_zero & ~at_c
    worst = {
        "box": float(max(0.0, -alpha.min(), (alpha - C).max())),
        "equality": float(abs(alpha @ ys)),
        "zero": float(max(0.0, (1.0 - tol - margin[at_zero]).max(initial=-np.inf))),
        "free": float(max(0.0, (np.abs(margin[free] - 1.0) - tol).max(initial=-np.inf))),
        "bound": float(max(0.0, (margin[at_c] - 1.0 - tol).max(initial=-np.inf))),
    }
    worst["ok"] = worst["box"] == 0.0 and worst["equality"] <= EQUALITY_TOL and worst["zero"] == worst["free"] == worst["bound"] == 0.0
    return worst


def _bias(alpha, G, ys, C):
    free = (alpha > 0.0) & (alpha < C)
    if free.any():
        return float(np.mean(-ys[free] * G[free]))
    m, M = _smo.violation_bounds(ys, alpha, G, C)
    return float((m + M) / 2.0)


def fit_kernel(K, ys, C, tol=KKT_TOL, max_iter=MAX_ITER, alpha0=None):
    """Run SMO on a precomputed kernel; returns (alpha, bias, n_iter).

    ``alpha0`` warm-starts the solver and must be feasible for ``C``. Raises
    SolverError when the tolerance is not reached within ``max_iter`` working-set
    updates, or cannot be resolved in floating point at this kernel scale.
    """
    n = len(ys)
    if not np.all(np.isfinite(K)):
        raise SolverError("kernel matrix is not finite")
    # the gradient cannot be resolved below this level, so the tolerance is unattainable
    if np.abs(K).max() * C * n * EPS > tol:
        raise SolverError("kernel magnitude too large for the KKT tolerance")
    alpha0 = np.zeros(n) if alpha0 is None else np.asarray(alpha0, dtype=float)
    alpha, G, converged, n_iter = _smo.solve(
        np.ascontiguousarray(K), np.ascontiguousarray(ys), float(C), float(tol), int(max_iter), alpha0
    )
    if not converged:
        raise SolverError(f"SMO did not converge in {max_iter} iterations")
    return alpha, _bias(alpha, G, ys, C), n_iter


def train(data: Dataset, spec: KernelSpec, C: float, normalize: bool = False, tol: float = KKT_TOL) -> SvmModel:
    """Solve the box-constrained dual and return a verified model."""
    if not C > 0:
        raise ValueError("box constraint C must be positive")
    X = np.asarray(data.X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    if len(np.unique(data.y)) < 2:
        raise DegenerateWindow("degenerate window: training data has a single class")
    mean = std = None
    if normalize:
        mean, std = _standardize(X)
        X = (X - mean) / std
    ys = signed(data.y)
    K = kernel_matrix(X, X, spec)
    alpha, b, n_iter = fit_kernel(K, ys, C, tol)
    report = kkt_report(alpha, K, ys, b, C, tol)
    if not report["ok"]:
        raise SolverError(f"trained model violates KKT conditions: {report}")
    sv = alpha > 0.0
    return SvmModel(
        support_vectors=X[sv],
        coef=(alpha * ys)[sv],
        alpha=alpha[sv],
        bias=b,
        kernel=spec,
        C=float(C),
        mean=mean,
        std=std,
        support_indices=np.flatnonzero(sv),
        n_iter=n_iter,
        dual_objective=dual_objective(alpha, K, ys),
    )


def predict(model: SvmModel, X) -> np.ndarray:
    return (model.decision_function(X) >= 0.0).astype(int)


def hinge_loss(model: SvmModel, data: Dataset) -> float:
    f = model.decision_function(data.X)
    return float(np.mean(np.maximum(0.0, 1.0 - signed(data.y) * f)))


def misclassification_error(y_pred, y_test) -> float:
    y_pred = np.asarray(y_pred)
    y_test = np.asarray(y_test)
    if y_pred.shape != y_test.shape:
        raise ValueError("prediction and test labels differ in length")
    if y_test.size == 0:
        raise ValueError("need at least one test label")
    return float(np.count_nonzero(y_pred != y_test)) / y_test.size


def split_train_test(data: Dataset, r_train: float = 0.7, rng: np.random.Generator | None = None):
    """Stratified split with exactly ceil(r_train * N) training rows."""
    n = len(data)
    if n < 3:
        raise DegenerateWindow("degenerate window: fewer than 3 samples")
    rng = rng or np.random.default_rng(0)
    n_train = math.ceil(r_train * n - 1e-9)
    classes = np.unique(data.y)
    pools = {c: rng.permutation(np.flatnonzero(data.y == c)) for c in classes}
    # largest-remainder quota per class so the total is exact
    raw = {c: n_train * len(pools[c]) / n for c in classes}
    quota = {c: int(math.floor(raw[c])) for c in classes}
    for c in sorted(classes, key=lambda c: (-(raw[c] - quota[c]), c))[: n_train - sum(quota.values())]:
        quota[c] += 1
    train_idx = np.sort(np.concatenate([pools[c][: quota[c]] for c in classes]))
    test_idx = np.sort(np.concatenate([pools[c][quota[c]:] for c in classes]))
    return data.subset(train_idx), data.subset(test_idx)


def stratified_folds(y, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    folds = [[] for _ in range(k)]
    offset = 0
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        for r, i in enumerate(idx):
            folds[(r + offset) % k].append(i)
        offset += len(idx)
    return [np.sort(np.asarray(f, dtype=int)) for f in folds]


@dataclass(frozen=True)
class GridPoint:
    kernel: KernelSpec
    C: float
    normalize: bool

    def sort_key(self):
        return (KERNEL_ORDER[self.kernel.kind], self.C, self.kernel.scale, self.kernel.degree or 0, self.normalize)

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.to_dict(), "C": self.C, "normalize": self.normalize}


DEFAULT_C = (0.1, 1.0, 10.0, 100.0)
DEFAULT_SCALES = (0.25, 0.5, 1.0, 2.0, 4.0)


def make_grid(Cs=DEFAULT_C, scales=DEFAULT_SCALES, kernels=("linear", "gaussian", "polynomial"), degrees=(2, 3, 4), normalize=(True, False)) -> list[GridPoint]:
    specs = []
    for kind in kernels:
        for s in scales:
            if kind == "polynomial":
                specs.extend(KernelSpec(kind, s, d) for d in degrees)
            else:
                specs.append(KernelSpec(kind, s))
    return [GridPoint(k, float(c), bool(nz)) for k, c, nz in itertools.product(specs, Cs, normalize)]


def effective_folds(y, k: int) -> int:
    minority = int(min(np.count_nonzero(y == 0), np.count_nonzero(y == 1)))
    k = min(k, minority)
    if k < 2:
        raise DegenerateWindow("degenerate window: too few samples of the minority class for cross-validation")
    return k


@dataclass
class SearchResult:
    best: GridPoint
    cv_loss: float
    k: int
    losses: dict = field(default_factory=dict)
    failed: int = 0


def grid_search_cv(data: Dataset, k: int = 5, grid: list[GridPoint] | None = None, rng: np.random.Generator | None = None) -> SearchResult:
    """Exhaustive search minimising mean held-out hinge loss over stratified folds.

    Grid points whose solver cannot reach the KKT tolerance score +inf.
    """
    grid = grid if grid is not None else make_grid()
    if not grid:
        raise ValueError("empty hyperparameter grid")
    k = effective_folds(data.y, k)
    folds = stratified_folds(data.y, k, rng or np.random.default_rng(0))
    everything = np.arange(len(data))
    splits = [(np.setdiff1d(everything, f), f) for f in folds]
    ys_all = signed(data.y)

    # features per normalisation flag, per fold (stats from the fold's training part)
    prepared = {}
    for nz in {p.normalize for p in grid}:
        per_fold = []
        for tr, te in splits:
            Xtr, Xte = data.X[tr], data.X[te]
            if nz:
                mean, std = _standardize(Xtr)
                Xtr, Xte = (Xtr - mean) / std, (Xte - mean) / std
            per_fold.append((Xtr, Xte))
        prepared[nz] = per_fold

    # one kernel matrix per (kernel, normalisation, fold), shared by every C
    by_family: dict = {}
    for point in grid:
        by_family.setdefault((point.kernel, point.normalize), []).append(point)
    totals = {p: 0.0 for p in grid}
    failed = 0
    for (spec, nz), points in by_family.items():
        for (tr, te), (Xtr, Xte) in zip(splits, prepared[nz]):
            live = [p for p in points if math.isfinite(totals[p])]
            if not live:
                break
            ys = ys_all[tr]
            if len(np.unique(ys)) < 2:
                for p in live:
                    totals[p] = math.inf
                continue
            K = kernel_matrix(Xtr, Xtr, spec)
            Kte = kernel_matrix(Xte, Xtr, spec)
            for p in live:
                try:
                    alpha, b, _ = fit_kernel(K, ys, p.C)
                except SolverError:
                    totals[p] = math.inf
                    failed += 1
                    continue
                f = Kte @ (alpha * ys) + b
                totals[p] += float(np.mean(np.maximum(0.0, 1.0 - ys_all[te] * f)))
    losses = {p: totals[p] / k for p in grid}
    best = min(grid, key=lambda p: (losses[p], p.sort_key()))
    if not math.isfinite(losses[best]):
        raise SolverError("no grid point could be trained")
    return SearchResult(best, losses[best], k, losses, failed)
