"""Exact Shapley-value attribution by coalition enumeration.

The value of a coalition S at instance x is the mean model output over the
background rows with the S-features overwritten by x's values (the
interventional / marginal expectation). With d features all 2^d coalition
values are computed in one batched model call, and

    phi_j = sum over S not containing j of
            |S|! (d - |S| - 1)! / d! * (v(S + j) - v(S)).

Exact enumeration is refused beyond 12 features; every experiment here
uses at most 10.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .dataset import Dataset
from .errors import EmptyBackgroundError, TooManyFeaturesError
from .flexfit import predict_on_matrix

_MAX_FEATURES = 12
_CHUNK_ROWS = 4_000_000  # cap on coalition-expanded rows per model call


@dataclass
class Attribution:
    """Per-feature Shapley values for one instance.

    ``base`` is the mean model output over the background; efficiency
    guarantees base + sum(phi) equals the model output at the instance, and
    ``efficiency_residual`` records the numerical leftover.
    """

    features: list
    phi: np.ndarray
    base: float
    prediction: float
    efficiency_residual: float


@dataclass
class AttributionSummary:
    """Mean |phi| per feature over an evaluation set, split into a
    relevant/irrelevant partition with the aggregate masses."""

    features: list
    mean_abs_phi: np.ndarray
    relevant: list
    irrelevant: list
    relevant_mass: float
    irrelevant_mass: float

    def mean_abs(self, feature: str) -> float:
        return float(self.mean_abs_phi[self.features.index(feature)])


def _as_predictor(model, features):
    if callable(model):
        return model
    return lambda X: predict_on_matrix(model, X)


def _feature_list(model, features):
    if features is not None:
        return list(features)
    names = getattr(model, "feature_names", None)
    if names is None:
        raise ValueError("pass `features` explicitly for a bare callable")
    return list(names)


def _background_matrix(background, features):
    if isinstance(background, Dataset):
        B = background.matrix(features)
    else:
        B = np.asarray(background, dtype=np.float64)
    if B.ndim != 2 or B.shape[1] != len(features):
        raise ValueError("background must be rows over the feature columns")
    if B.shape[0] == 0:
        raise EmptyBackgroundError("background sample has no rows")
    return B


def _coalition_tables(d):
    """Boolean coalition masks (2^d, d), the with-j pairing index, and the
    Shapley weight of each coalition size."""
    codes = np.arange(2 ** d, dtype=np.uint32)
    masks = (codes[:, None] >> np.arange(d, dtype=np.uint32)) & 1
    masks = masks.astype(bool)
    sizes = masks.sum(axis=1)
    weights = np.array([factorial(s) * factorial(d - 1 - s) / factorial(d)
                        for s in range(d)])
    return masks, sizes, weights


def _phi_matrix(predict, E: np.ndarray, B: np.ndarray) -> tuple:
    """Shapley values for every evaluation row.

    Returns (phi matrix of shape (n_eval, d), base value, predictions at
    the evaluation rows). Evaluation rows are processed in chunks so the
    coalition-expanded matrix stays within a fixed row budget.
    """
    n_eval, d = E.shape
    n_bg = B.shape[0]
    masks, sizes, weights = _coalition_tables(d)
    n_coal = masks.shape[0]
    phi = np.empty((n_eval, d))
    chunk = max(1, _CHUNK_ROWS // (n_coal * n_bg))
    base = None
    for lo in range(0, n_eval, chunk):
        Ec = E[lo:lo + chunk]
        ec = Ec.shape[0]
        # grid[c, e, b, j] = Ec[e, j] if j in coalition c else B[b, j]
        grid = np.where(masks[:, None, None, :], Ec[None, :, None, :],
                        B[None, None, :, :])
        out = predict(grid.reshape(-1, d)).reshape(n_coal, ec, n_bg)
        v = out.mean(axis=2)                     # (n_coal, ec)
        if base is None:
            base = float(v[0, 0])                # empty coalition: same for all rows
        for j in range(d):
            without = np.nonzero(~masks[:, j])[0]
            with_j = without | (1 << j)
            w = weights[sizes[without]]
            phi[lo:lo + chunk, j] = (w[:, None] * (v[with_j] - v[without])).sum(axis=0)
    preds = predict(E)
    return phi, base, np.asarray(preds, dtype=np.float64)


def shapley_exact(model, instance, background, features=None) -> Attribution:
    """Exact Shapley attribution of one prediction.

    Parameters
    ----------
    model : trained MLP/GBT model, or callable mapping an (m, d) matrix to
        m outputs (columns in ``features`` order).
    instance : mapping name -> value, or sequence aligned with ``features``.
    background : Dataset (or (m, d) array) supplying the marginal
        expectation sample.
    features : explicit feature order; defaults to the model's stored names.
    """
    features = _feature_list(model, features)
    if len(features) > _MAX_FEATURES:
        raise TooManyFeaturesError(
            f"{len(features)} features exceed the exact-enumeration cap "
            f"of {_MAX_FEATURES}")
    if isinstance(instance, dict):
        x = np.array([float(instance[f]) for f in features])
    else:
        x = np.asarray(instance, dtype=np.float64).ravel()
        if x.size != len(features):
            raise ValueError("instance length does not match features")
    B = _background_matrix(background, features)
    predict = _as_predictor(model, features)
    phi, base, pred = _phi_matrix(predict, x[None, :], B)
    phi = phi[0]
    prediction = float(pred[0])
    residual = prediction - base - float(phi.sum())
    return Attribution(features, phi, base, prediction, residual)


def attribution_summary(model, eval_set, background, relevant,
                        features=None) -> AttributionSummary:
    """Mean |phi| per feature over an evaluation set, plus the aggregate
    attribution mass on the relevant / irrelevant feature partition."""
    features = _feature_list(model, features)
    if len(features) > _MAX_FEATURES:
        raise TooManyFeaturesError(
            f"{len(features)} features exceed the exact-enumeration cap "
            f"of {_MAX_FEATURES}")
    relevant = [f for f in features if f in set(relevant)]
    irrelevant = [f for f in features if f not in set(relevant)]
    if isinstance(eval_set, Dataset):
        E = eval_set.matrix(features)
    else:
        E = np.asarray(eval_set, dtype=np.float64)
    B = _background_matrix(background, features)
    predict = _as_predictor(model, features)
    phi, _, _ = _phi_matrix(predict, E, B)
    mean_abs = np.abs(phi).mean(axis=0)
    idx = {f: i for i, f in enumerate(features)}
    rel_mass = float(sum(mean_abs[idx[f]] for f in relevant))
    irr_mass = float(sum(mean_abs[idx[f]] for f in irrelevant))
    return AttributionSummary(features, mean_abs, relevant, irrelevant,
                              rel_mass, irr_mass)
