"""Structural causal models: representation, sampling, surgery, and
closed-form solutions for the linear-Gaussian family.

A model is a set of nodes, each carrying exactly one assignment that
computes the node from its parents plus independent noise. Assignments use
assignment semantics (the value is *set* from the right-hand side, never
solved for), so the induced parent graph must be acyclic.

Two assignment kinds exist:

* linear-additive: ``value = intercept + sum(w_k * parent_k) + noise`` —
  the analytically solvable core (population covariance, population
  regression, total effects);
* custom-deterministic: an opaque function of the parent columns plus
  additive noise — sampling only, the analytic routines refuse it.

>>> m = StructuralModel({
...     "a": Assignment.exogenous(NoiseSpec.gaussian()),
...     "b": Assignment.linear(["a"], [2.0], noise=NoiseSpec.gaussian(sd=0.5)),
... })
>>> sample(m, 4, seed=0).names
['a', 'b']
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import (CycleError, DuplicateAssignmentError, NonlinearModelError,
                     SingularCovarianceError, UnknownNodeError,
                     UnknownParentError)
from .rng import normal_column, uniform_column

_COND_LIMIT = 1e12  # condition-number guard for covariance solves


@dataclass(frozen=True)
class NoiseSpec:
    """Distribution of one node's exogenous noise term.

    ``kind`` is one of ``gaussian`` (params mean, sd), ``uniform`` (params
    lo, hi) or ``constant`` (single param); the draw is multiplied by
    ``scale``.
    """

    kind: str
    params: tuple
    scale: float = 1.0

    @staticmethod
    def gaussian(mean: float = 0.0, sd: float = 1.0, scale: float = 1.0) -> "NoiseSpec":
        if sd < 0:
            raise ValueError("sd must be non-negative")
        return NoiseSpec("gaussian", (float(mean), float(sd)), float(scale))

    @staticmethod
    def uniform(lo: float, hi: float, scale: float = 1.0) -> "NoiseSpec":
        if lo > hi:
            raise ValueError("uniform noise needs lo <= hi")
        return NoiseSpec("uniform", (float(lo), float(hi)), float(scale))

    @staticmethod
    def constant(c: float, scale: float = 1.0) -> "NoiseSpec":
        return NoiseSpec("constant", (float(c),), float(scale))

    def mean(self) -> float:
        if self.kind == "gaussian":
            return self.scale * self.params[0]
        if self.kind == "uniform":
            lo, hi = self.params
            return self.scale * 0.5 * (lo + hi)
        return self.scale * self.params[0]

    def variance(self) -> float:
        """Exact variance; any kind (sampling-side helper)."""
        if self.kind == "gaussian":
            return (self.scale * self.params[1]) ** 2
        if self.kind == "uniform":
            lo, hi = self.params
            return (self.scale * (hi - lo)) ** 2 / 12.0
        return 0.0

    def draw(self, seed: int, path: tuple, n: int) -> np.ndarray:
        if self.kind == "gaussian":
            mean, sd = self.params
            return self.scale * (mean + sd * normal_column(seed, path, n))
        if self.kind == "uniform":
            lo, hi = self.params
            return self.scale * (lo + (hi - lo) * uniform_column(seed, path, n))
        return np.full(n, self.scale * self.params[0])


@dataclass(frozen=True)
class Assignment:
    """One node's structural assignment.

    Fields
    ------
    parents : tuple of node names read by the assignment.
    kind : ``"linear"`` or ``"custom"``.
    weights : per-parent coefficients (linear kind only).
    intercept : additive constant (linear kind only).
    noise : NoiseSpec added to the deterministic part.
    func : callable(*parent_columns) -> column (custom kind only).
    """

    parents: tuple
    kind: str
    noise: NoiseSpec
    weights: tuple = ()
    intercept: float = 0.0
    func: object = None

    @staticmethod
    def linear(parents, weights, intercept: float = 0.0,
               noise: NoiseSpec = None) -> "Assignment":
        parents = tuple(parents)
        weights = tuple(float(w) for w in weights)
        if len(parents) != len(weights):
            raise ValueError("one weight per parent required")
        return Assignment(parents, "linear", noise or NoiseSpec.constant(0.0),
                          weights, float(intercept))

    @staticmethod
    def exogenous(noise: NoiseSpec) -> "Assignment":
        """A parentless node: pure noise (optionally constant)."""
        return Assignment.linear((), (), 0.0, noise)

    @staticmethod
    def custom(parents, func, noise: NoiseSpec = None) -> "Assignment":
        """Opaque deterministic function of the parents plus additive noise."""
        return Assignment(tuple(parents), "custom",
                          noise or NoiseSpec.constant(0.0), func=func)


class StructuralModel:
    """Nodes plus one assignment each; parent edges are implied.

    ``assignments`` may be a mapping or an iterable of (name, Assignment)
    pairs; a name repeated in the iterable raises DuplicateAssignmentError
    at validation. Node order is the assignment order and fixes column
    order of samples and of the analytic covariance matrix.
    """

    def __init__(self, assignments, nodes=None):
        if isinstance(assignments, dict):
            pairs = list(assignments.items())
        else:
            pairs = list(assignments)
        self._pairs = [(str(k), v) for k, v in pairs]
        self.nodes = list(nodes) if nodes is not None else [k for k, _ in self._pairs]
        self.assignments = {}
        for k, v in self._pairs:
            self.assignments.setdefault(k, v)
        self._order = None  # cached topological order, set by validate_model

    def parents(self, node: str) -> tuple:
        return self.assignments[node].parents

    def __repr__(self):
        return f"StructuralModel({len(self.nodes)} nodes)"


def validate_model(model: StructuralModel) -> StructuralModel:
    """Check well-formedness, cache the topological order, return the model.

    Raises
    ------
    DuplicateAssignmentError
        A node has more or fewer than exactly one assignment.
    UnknownParentError
        An assignment references an undeclared node.
    CycleError
        The parent graph has a directed cycle (the message names one).
    """
    seen = set()
    for name, _ in model._pairs:
        if name in seen:
            raise DuplicateAssignmentError(f"node {name!r} assigned more than once")
        seen.add(name)
    declared = set(model.nodes)
    missing = [n for n in model.nodes if n not in model.assignments]
    if missing or len(declared) != len(model.nodes):
        raise DuplicateAssignmentError(
            "every declared node needs exactly one assignment; offending: "
            f"{missing or 'duplicate node names'}")
    for name, a in model.assignments.items():
        if name not in declared:
            raise UnknownParentError(f"assignment for undeclared node {name!r}")
        for p in a.parents:
            if p not in declared:
                raise UnknownParentError(
                    f"node {name!r} references unknown parent {p!r}")

    # Kahn's algorithm; leftover nodes witness a cycle.
    indeg = {n: 0 for n in model.nodes}
    children = {n: [] for n in model.nodes}
    for name, a in model.assignments.items():
        indeg[name] = len(a.parents)
        for p in a.parents:
            children[p].append(name)
    ready = [n for n in model.nodes if indeg[n] == 0]
    order = []
    while ready:
        # stable: pick in declared-node order for reproducible output
        ready.sort(key=model.nodes.index)
        n = ready.pop(0)
        order.append(n)
        for c in children[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != len(model.nodes):
        cyclic = [n for n in model.nodes if n not in order]
        raise CycleError(f"cycle among nodes {cyclic}")
    model._order = order
    return model


def _ensure_validated(model: StructuralModel) -> list:
    if model._order is None:
        validate_model(model)
    return model._order


def sample(model: StructuralModel, n: int, seed: int) -> Dataset:
    """Draw ``n`` rows by evaluating assignments in topological order.

    Noise for each node comes from a substream keyed by the node's index in
    the declared order, so identical (model, n, seed) inputs give
    bit-identical datasets regardless of evaluation order or chunking.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    order = _ensure_validated(model)
    node_idx = {name: i for i, name in enumerate(model.nodes)}
    cols = {}
    for name in order:
        a = model.assignments[name]
        noise = a.noise.draw(seed, (node_idx[name],), n)
        if a.kind == "linear":
            value = np.full(n, a.intercept, dtype=np.float64)
            for p, w in zip(a.parents, a.weights):
                value += w * cols[p]
            value += noise
        else:
            value = np.asarray(a.func(*[cols[p] for p in a.parents]),
                               dtype=np.float64) + noise
        cols[name] = value
    return Dataset({name: cols[name] for name in model.nodes}, seed=seed)


def intervene(model: StructuralModel, node: str, value) -> StructuralModel:
    """Graph surgery: replace ``node``'s assignment, cutting its parents.

    ``value`` is a constant (the node becomes that constant) or a NoiseSpec
    (the node becomes exogenous with that distribution). Other assignments
    are untouched; a new model is returned.
    """
    if node not in model.assignments:
        raise UnknownNodeError(f"no node named {node!r}")
    if isinstance(value, NoiseSpec):
        new = Assignment.exogenous(value)
    else:
        new = Assignment.exogenous(NoiseSpec.constant(float(value)))
    pairs = [(k, new if k == node else a) for k, a in model._pairs]
    return StructuralModel(pairs, nodes=model.nodes)


def _require_linear_gaussian(model: StructuralModel) -> None:
    for name, a in model.assignments.items():
        if a.kind != "linear":
            raise NonlinearModelError(
                f"node {name!r} has a custom assignment; analytic solving "
                "covers only linear-additive models")
        if a.noise.kind == "uniform":
            raise NonlinearModelError(
                f"node {name!r} has uniform noise; analytic solving covers "
                "Gaussian or constant noise only")


def population_covariance(model: StructuralModel) -> np.ndarray:
    """Exact covariance matrix over ``model.nodes`` by forward propagation.

    Restricted to linear-additive assignments with Gaussian or constant
    noise. For node v with parents P and weights w:
    Cov(v, u) = sum_p w_p Cov(p, u) for previously solved u, and
    Var(v) = w' Sigma_PP w + Var(noise).
    """
    _require_linear_gaussian(model)
    order = _ensure_validated(model)
    idx = {name: i for i, name in enumerate(model.nodes)}
    k = len(model.nodes)
    cov = np.zeros((k, k))
    for name in order:
        a = model.assignments[name]
        i = idx[name]
        if a.parents:
            pidx = [idx[p] for p in a.parents]
            w = np.array(a.weights)
            cross = cov[pidx, :] .T @ w          # Cov(v, everything solved)
            cov[i, :] = cross
            cov[:, i] = cross
            cov[i, i] = w @ cov[np.ix_(pidx, pidx)] @ w + a.noise.variance()
        else:
            cov[i, i] = a.noise.variance()
    return cov


def population_mean(model: StructuralModel) -> np.ndarray:
    """Exact mean vector over ``model.nodes`` (linear-Gaussian models)."""
    _require_linear_gaussian(model)
    order = _ensure_validated(model)
    idx = {name: i for i, name in enumerate(model.nodes)}
    mu = np.zeros(len(model.nodes))
    for name in order:
        a = model.assignments[name]
        mu[idx[name]] = (a.intercept
                         + sum(w * mu[idx[p]] for p, w in zip(a.parents, a.weights))
                         + a.noise.mean())
    return mu


def population_regression(model: StructuralModel, target: str,
                          regressors) -> np.ndarray:
    """Population least-squares coefficients [intercept, b_1..b_k] of
    target on regressors — the limit of any consistent OLS fit.
    """
    regressors = list(regressors)
    for name in [target, *regressors]:
        if name not in model.assignments:
            raise UnknownNodeError(f"no node named {name!r}")
    cov = population_covariance(model)
    mu = population_mean(model)
    idx = {name: i for i, name in enumerate(model.nodes)}
    xi = [idx[r] for r in regressors]
    yi = idx[target]
    sxx = cov[np.ix_(xi, xi)]
    sxy = cov[xi, yi]
    if xi:
        svals = np.linalg.svd(sxx, compute_uv=False)
        if svals[0] == 0 or svals[0] / max(svals[-1], 1e-300) > _COND_LIMIT:
            raise SingularCovarianceError(
                f"regressor covariance condition number exceeds {_COND_LIMIT:g}")
        beta = np.linalg.solve(sxx, sxy)
    else:
        beta = np.zeros(0)
    intercept = mu[yi] - beta @ mu[xi]
    return np.concatenate([[intercept], beta])


def total_effect_linear(model: StructuralModel, cause: str, outcome: str) -> float:
    """Sum over all directed cause->outcome paths of the edge-weight product.

    Equals the derivative of E[outcome] with respect to t under the
    intervention cause := t, for linear models.
    """
    for name in (cause, outcome):
        if name not in model.assignments:
            raise UnknownNodeError(f"no node named {name!r}")
    if cause == outcome:
        raise ValueError("cause and outcome must differ")
    order = _ensure_validated(model)
    effect = {cause: 1.0}
    for name in order:
        if name == cause:
            continue
        a = model.assignments[name]
        contributions = [(p, w) for p, w in zip(a.parents, a.weights or ())
                         if p in effect]
        if a.kind == "custom" and any(p in effect for p in a.parents):
            raise NonlinearModelError(
                f"node {name!r} on a path from {cause!r} has a custom "
                "assignment; path-product effects need linear weights")
        if contributions:
            effect[name] = sum(w * effect[p] for p, w in contributions)
    return effect.get(outcome, 0.0)


# --- model definition files ---------------------------------------------
#
# Plain-text INI schema, linear-additive models only:
#
#   [model]
#   nodes = x0 x1 y          ; declared order
#
#   [node x1]
#   parents = x0             ; omitted for exogenous nodes
#   weights = -2.0
#   intercept = 0.0
#   noise = gaussian 0 1     ; or: uniform LO HI | constant C
#   scale = 0.5
#

def save_model(model: StructuralModel, path: str) -> None:
    """Write a linear-additive model to the INI schema above."""
    _ensure_validated(model)
    cp = configparser.ConfigParser()
    cp["model"] = {"nodes": " ".join(model.nodes)}
    for name in model.nodes:
        a = model.assignments[name]
        if a.kind != "linear":
            raise ValueError(
                f"node {name!r} has a custom assignment; model files hold "
                "linear-additive assignments only")
        sec = {}
        if a.parents:
            sec["parents"] = " ".join(a.parents)
            sec["weights"] = " ".join(repr(w) for w in a.weights)
        if a.intercept != 0.0:
            sec["intercept"] = repr(a.intercept)
        sec["noise"] = f"{a.noise.kind} " + " ".join(repr(p) for p in a.noise.params)
        if a.noise.scale != 1.0:
            sec["scale"] = repr(a.noise.scale)
        cp[f"node {name}"] = sec
    with open(path, "w", encoding="utf-8") as fh:
        cp.write(fh)


def load_model(path: str) -> StructuralModel:
    """Read a model written by :func:`save_model`; validates before return."""
    cp = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    nodes = cp["model"]["nodes"].split()
    pairs = []
    for name in nodes:
        sec = cp[f"node {name}"]
        parents = sec.get("parents", "").split()
        weights = [float(w) for w in sec.get("weights", "").split()]
        noise_parts = sec["noise"].split()
        kind, params = noise_parts[0], tuple(float(x) for x in noise_parts[1:])
        scale = float(sec.get("scale", "1.0"))
        if kind == "gaussian":
            noise = NoiseSpec.gaussian(*params, scale=scale)
        elif kind == "uniform":
            noise = NoiseSpec.uniform(*params, scale=scale)
        elif kind == "constant":
            noise = NoiseSpec.constant(*params, scale=scale)
        else:
            raise ValueError(f"unknown noise kind {kind!r} for node {name!r}")
        pairs.append((name, Assignment.linear(
            parents, weights, float(sec.get("intercept", "0.0")), noise)))
    return validate_model(StructuralModel(pairs, nodes=nodes))
