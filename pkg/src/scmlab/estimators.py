"""Classical estimators: least squares with inference, Pearson correlation,
logistic regression, and k-nearest-neighbour mutual information.

All fits are closed-form or Newton-type on small dense matrices; standard
errors use the classical homoskedastic formulas, which the synthetic
generators in this package satisfy by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree
from scipy.special import digamma, expit

from .dataset import Dataset
from .errors import (DegenerateColumnError, InsufficientDataError,
                     NonBinaryTargetError, RankDeficientError, SeparationError)
from .rng import substream

_RANK_TOL = 1e-10          # singular values below tol*s_max are rank loss
_GRAD_TOL = 1e-8           # logistic convergence: max |gradient|
_MI_JITTER = 1e-10         # relative tie-breaking jitter for the MI estimator


@dataclass
class FitResult:
    """Coefficients with classical inference.

    ``terms`` lists "intercept" followed by the regressor names;
    ``coefficients``, ``stderr`` and ``p_values`` are aligned with it.
    ``residual_variance`` is the unbiased residual variance for least
    squares and the mean deviance (−2·loglik/n) for logistic fits.
    """

    terms: list
    coefficients: np.ndarray
    stderr: np.ndarray
    p_values: np.ndarray
    residual_variance: float
    n_used: int

    def coef(self, term: str) -> float:
        return float(self.coefficients[self.terms.index(term)])

    def se(self, term: str) -> float:
        return float(self.stderr[self.terms.index(term)])

    def to_json_dict(self) -> dict:
        """JSON record with fixed field order."""
        return {
            "terms": list(self.terms),
            "coefficients": [float(c) for c in self.coefficients],
            "stderr": [float(s) for s in self.stderr],
            "p_values": [float(p) for p in self.p_values],
            "residual_variance": float(self.residual_variance),
            "n_used": int(self.n_used),
        }


@dataclass
class CorrResult:
    """Sample Pearson correlation with its two-sided t-test p-value."""

    r: float
    p: float
    n: int

    def to_json_dict(self) -> dict:
        return {"r": float(self.r), "p": float(self.p), "n": int(self.n)}


@dataclass
class MiResult:
    """Mutual-information estimate in nats.

    ``mi`` is clipped to be non-negative for reporting; ``raw`` keeps the
    uncorrected estimator output (slightly negative values are normal for
    near-independent data).
    """

    mi: float
    raw: float
    k_neighbors: int
    n: int

    def to_json_dict(self) -> dict:
        return {"mi": float(self.mi), "raw": float(self.raw),
                "k_neighbors": int(self.k_neighbors), "n": int(self.n)}


def _design(data: Dataset, regressors) -> np.ndarray:
    X = np.column_stack([np.ones(data.n_rows),
                         *(data.column(r) for r in regressors)])
    return X


def ols_fit(data: Dataset, target: str, regressors) -> FitResult:
    """Ordinary least squares of ``target`` on ``regressors`` plus an
    intercept; classical standard errors and t-test p-values.

    Raises InsufficientDataError unless n > #regressors + 1, and
    RankDeficientError when the design matrix loses rank (smallest singular
    value below 1e-10 times the largest).
    """
    regressors = list(regressors)
    n, p = data.n_rows, len(regressors) + 1
    if n <= p:
        raise InsufficientDataError(
            f"{n} rows cannot support {p} coefficients")
    X = _design(data, regressors)
    y = data.column(target)
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if s[0] == 0 or s[-1] < _RANK_TOL * s[0]:
        raise RankDeficientError(
            "design matrix is rank deficient "
            f"(singular value ratio {s[-1] / max(s[0], 1e-300):.2e})")
    beta = Vt.T @ ((U.T @ y) / s)
    resid = y - X @ beta
    dof = n - p
    sigma2 = float(resid @ resid) / dof
    # (X'X)^-1 = V diag(s^-2) V'
    xtx_inv_diag = np.einsum("ji,i,ji->j", Vt.T, 1.0 / s**2, Vt.T)
    se = np.sqrt(sigma2 * xtx_inv_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / np.where(se > 0, se, 1.0), np.inf * np.sign(beta))
    t = np.where((se == 0) & (beta == 0), 0.0, t)
    pvals = 2.0 * stats.t.sf(np.abs(t), dof)
    return FitResult(["intercept", *regressors], beta, se, pvals,
                     sigma2, n)


def pearson(data: Dataset, a: str, b: str) -> CorrResult:
    """Sample Pearson r between two columns with the t-distribution
    two-sided p-value; columns must vary."""
    if data.n_rows < 3:
        raise InsufficientDataError("pearson needs at least 3 rows")
    x, y = data.column(a), data.column(b)
    xc, yc = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt(xc @ xc), np.sqrt(yc @ yc)
    if sx == 0 or sy == 0:
        raise DegenerateColumnError(
            f"column {a if sx == 0 else b!r} has zero variance")
    r = float(np.clip((xc @ yc) / (sx * sy), -1.0, 1.0))
    # exactly collinear columns can round to 1 - O(eps); snap, since the
    # t statistic is infinite there either way
    if 1.0 - abs(r) < 4.0 * np.finfo(float).eps:
        r = 1.0 if r > 0 else -1.0
    n = data.n_rows
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * np.sqrt((n - 2) / (1.0 - r * r))
        p = float(2.0 * stats.t.sf(abs(t), n - 2))
    return CorrResult(r, p, n)


def logistic_fit(data: Dataset, target: str, regressors,
                 max_iter: int = 200) -> FitResult:
    """Logistic regression by damped Newton iterations.

    Converged when the score's max component drops below 1e-8. Degenerate
    targets and perfectly separated data never converge — they drive the
    coefficients off to infinity — and raise SeparationError via the
    divergence guard. Standard errors come from the observed information;
    p-values are two-sided Wald z-tests.
    """
    regressors = list(regressors)
    y = data.column(target)
    if not np.all((y == 0.0) | (y == 1.0)):
        raise NonBinaryTargetError("target must contain only 0 and 1")
    if y.min() == y.max():
        raise SeparationError(
            "target is all one class; intercept diverges")
    X = _design(data, regressors)
    n, p = X.shape
    if n <= p:
        raise InsufficientDataError(f"{n} rows cannot support {p} coefficients")
    beta = np.zeros(p)

    def nll(b):
        eta = X @ b
        # log(1 + e^eta) - y*eta, computed stably
        return float(np.sum(np.logaddexp(0.0, eta) - y * eta))

    loss = nll(beta)
    converged = False
    for _ in range(max_iter):
        prob = expit(X @ beta)
        grad = X.T @ (y - prob)
        if np.max(np.abs(grad)) < _GRAD_TOL:
            converged = True
            break
        w = prob * (1.0 - prob)
        H = X.T @ (X * w[:, None]) + 1e-10 * np.eye(p)
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            raise SeparationError("information matrix became singular") from None
        # damping: halve until the objective stops increasing
        improved = False
        scale = 1.0
        for _ in range(40):
            trial = beta + scale * step
            trial_loss = nll(trial)
            if trial_loss <= loss + 1e-12:
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
        beta, loss = trial, trial_loss
        if np.max(np.abs(beta)) > 1e3:
            raise SeparationError(
                "coefficients diverged; data are (quasi-)separated")
    if not converged:
        raise SeparationError("no convergence; data look separated")
    # a finite "optimum" that strictly separates the classes only appears
    # through probability saturation: the true MLE is at infinity
    if np.all((2.0 * y - 1.0) * (X @ beta) > 0.0):
        raise SeparationError(
            "fitted coefficients separate the classes perfectly; "
            "the maximum-likelihood estimate does not exist")
    prob = expit(X @ beta)
    w = prob * (1.0 - prob)
    H = X.T @ (X * w[:, None]) + 1e-10 * np.eye(p)
    cov = np.linalg.inv(H)
    se = np.sqrt(np.diag(cov))
    z = beta / se
    pvals = 2.0 * stats.norm.sf(np.abs(z))
    return FitResult(["intercept", *regressors], beta, se, pvals,
                     2.0 * loss / n, n)


def mutual_information(data: Dataset, a: str, b: str, k: int = 3) -> MiResult:
    """Mutual information I(a; b) in nats by the k-nearest-neighbour
    estimator (Kraskov, Stoegbauer & Grassberger 2004, first variant).

    For each point, eps is the Chebyshev distance to its k-th neighbour in
    the joint space; n_x, n_y count marginal neighbours strictly within
    eps. The estimate is psi(k) + psi(n) − mean(psi(n_x+1) + psi(n_y+1)).
    Both columns are standardized first — the joint Chebyshev metric mixes
    the two scales, so this makes the estimate invariant under affine
    rescaling of either column. Exact ties make neighbour counts ambiguous,
    so both columns also receive a deterministic jitter of 1e-10 scale.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = data.n_rows
    if n <= k:
        raise InsufficientDataError(f"need more than k={k} rows, got {n}")

    def standardized(col):
        col = col.astype(np.float64)
        sd = col.std()
        return (col - col.mean()) / sd if sd > 0 else col - col.mean()

    x = standardized(data.column(a))
    y = standardized(data.column(b))
    jit = substream(0, 0x4D49)  # fixed stream: jitter is not configurable
    x = x + _MI_JITTER * jit.standard_normal(n)
    y = y + _MI_JITTER * jit.standard_normal(n)
    joint = np.column_stack([x, y])
    dist, _ = cKDTree(joint).query(joint, k=k + 1, p=np.inf)
    eps = dist[:, -1]

    def strict_counts(col):
        order = np.argsort(col)
        s = col[order]
        hi = np.searchsorted(s, col + eps, side="left")
        lo = np.searchsorted(s, col - eps, side="right")
        return hi - lo - 1  # open interval, minus the point itself

    nx = strict_counts(x)
    ny = strict_counts(y)
    raw = float(digamma(k) + digamma(n)
                - np.mean(digamma(nx + 1) + digamma(ny + 1)))
    return MiResult(max(raw, 0.0), raw, k, n)
