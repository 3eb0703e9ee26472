"""Train/test splitting, k-fold assignment, and the forward-selection
overfitting demonstration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset
from ..errors import InsufficientDataError
from ..estimators import ols_fit
from ..rng import substream


@dataclass
class SplitPlan:
    """Row partition: either one train/test holdout or k folds.

    For a holdout plan ``folds`` is None; for a CV plan ``folds[i]`` is the
    fold id of row i and train/test default to fold 0's complement/fold 0.
    """

    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int
    folds: np.ndarray = None

    @property
    def k(self):
        return 0 if self.folds is None else int(self.folds.max()) + 1

    def fold_indices(self, i: int):
        """(train, test) row indices for fold i of a CV plan."""
        test = np.nonzero(self.folds == i)[0]
        train = np.nonzero(self.folds != i)[0]
        return train, test


def split(data: Dataset, test_fraction: float = None, k_folds: int = None,
          seed: int = 0) -> SplitPlan:
    """Seeded shuffle then partition into train/test or k balanced folds.

    Exactly one of ``test_fraction`` (0 < f < 1) and ``k_folds`` (k >= 2)
    must be given; fold sizes differ by at most one row.
    """
    n = data.n_rows
    if (test_fraction is None) == (k_folds is None):
        raise ValueError("give exactly one of test_fraction or k_folds")
    perm = substream(seed, 0x53504C).permutation(n)
    if test_fraction is not None:
        if not 0.0 < test_fraction < 1.0:
            raise ValueError("test_fraction must lie strictly between 0 and 1")
        n_test = int(round(n * test_fraction))
        if n_test < 1 or n_test >= n:
            raise InsufficientDataError(
                f"test fraction {test_fraction} leaves an empty side of a "
                f"{n}-row split")
        test = np.sort(perm[:n_test])
        train = np.sort(perm[n_test:])
        return SplitPlan(train, test, seed)
    if k_folds < 2:
        raise ValueError("k_folds must be at least 2")
    if n < k_folds:
        raise InsufficientDataError(f"cannot cut {n} rows into {k_folds} folds")
    folds = np.empty(n, dtype=np.int32)
    for i, chunk in enumerate(np.array_split(perm, k_folds)):
        folds[chunk] = i
    train, test = np.nonzero(folds != 0)[0], np.nonzero(folds == 0)[0]
    return SplitPlan(train, test, seed, folds)


@dataclass
class StepRecord:
    feature: str
    in_r2: float
    out_r2: float


def _r2(y, pred):
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot


def stepwise_forward(data: Dataset, target: str, candidates,
                     plan: SplitPlan, min_improvement: float = 0.0) -> list:
    """Greedy forward selection by in-sample R² on the training rows.

    At each step the candidate that most improves the training R² joins the
    model if the improvement exceeds ``min_improvement``; the trace records
    in-sample and held-out R² after every accepted step. Held-out R² uses
    the training-rows fit evaluated on the test rows and may be negative.
    """
    candidates = list(candidates)
    if len(candidates) < 2:
        raise ValueError("need at least 2 candidates")
    train = data.take(plan.train_idx)
    test = data.take(plan.test_idx)
    y_tr = train.column(target)
    y_te = test.column(target)
    selected = []
    trace = []
    current_r2 = 0.0
    remaining = list(candidates)
    while remaining:
        if train.n_rows <= len(selected) + 2:
            raise InsufficientDataError(
                "training rows exhausted by the growing design")
        best = None
        for cand in remaining:
            fit = ols_fit(train, target, selected + [cand])
            r2 = _r2(y_tr, _predict_linear(fit, train))
            if best is None or r2 > best[1]:
                best = (cand, r2, fit)
        cand, r2, fit = best
        if r2 - current_r2 <= min_improvement:
            break
        selected.append(cand)
        remaining.remove(cand)
        current_r2 = r2
        out_r2 = _r2(y_te, _predict_linear(fit, test))
        trace.append(StepRecord(cand, r2, out_r2))
    return trace


def _predict_linear(fit, data):
    pred = np.full(data.n_rows, fit.coefficients[0])
    for name, coef in zip(fit.terms[1:], fit.coefficients[1:]):
        pred += coef * data.column(name)
    return pred
