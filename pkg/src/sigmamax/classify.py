"""Recursive pattern classification by additive or maxitive evidence fusion.

A classifier ties together a finite pattern set, a finite feature set, a
pattern-given-feature table, and a measurement likelihood over features.
Each step folds one measurement into the running pattern belief:

* the sigma (additive) classifier propagates the pattern likelihood by
  summing over features, so every feature contributes to the evidence;
* the max (maxitive) classifier propagates it by maximizing over
  features, so only the single most discriminative feature route counts.

The per-step feature predictive (belief over which feature the next
measurement reflects) is problem-specific and therefore supplied by the
caller per step, defaulting to uniform for the additive classifier and
all-ones for the maxitive one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .discrete import (
    NORM_TOL,
    POSSIBILITY,
    PROBABILITY,
    ConditionalTable,
    DegenerateEvidenceError,
    DiscretePossibility,
    DiscreteProbability,
    OutcomeSet,
)

SIGMA = "sigma"
MAX = "max"


@dataclass(frozen=True)
class ClassifierModel:
    """Static problem description for a sequential classifier.

    pattern_given_feature maps each feature (row) to a distribution over
    patterns; its kind must match the classifier kind (probability for
    sigma, possibility for max).  measurement_given_feature(z, feature)
    returns the nonnegative likelihood of a measurement under a feature.
    """

    patterns: OutcomeSet
    features: OutcomeSet
    pattern_given_feature: ConditionalTable
    measurement_given_feature: Callable
    kind: str

    def __post_init__(self):
        if self.kind not in (SIGMA, MAX):
            raise ValueError(f"kind must be {SIGMA!r} or {MAX!r}")
        table = self.pattern_given_feature
        if table.given != self.features or table.result != self.patterns:
            raise ValueError("table must map features (rows) to patterns (columns)")
        expected = PROBABILITY if self.kind == SIGMA else POSSIBILITY
        if table.kind != expected:
            raise ValueError(f"{self.kind} classifier requires a {expected} table")


@dataclass(frozen=True)
class ClassifierState:
    """Running pattern belief plus the number of absorbed measurements."""

    belief: Union[DiscreteProbability, DiscretePossibility]
    step: int = 0


def initial_state(model: ClassifierModel, prior=None) -> ClassifierState:
    """Starting belief: uniform (sigma) or all-ones (max) unless given."""
    n = len(model.patterns)
    if model.kind == SIGMA:
        weights = np.full(n, 1.0 / n) if prior is None else prior
        return ClassifierState(DiscreteProbability(model.patterns, weights), 0)
    weights = np.ones(n) if prior is None else prior
    return ClassifierState(DiscretePossibility(model.patterns, weights), 0)


def _feature_predictive(model: ClassifierModel, feature_predictive) -> np.ndarray:
    m = len(model.features)
    if feature_predictive is None:
        return np.full(m, 1.0 / m) if model.kind == SIGMA else np.ones(m)
    q = np.asarray(feature_predictive, dtype=float)
    if q.shape != (m,):
        raise ValueError(f"feature predictive must have shape ({m},)")
    if np.any(q < 0.0) or not np.all(np.isfinite(q)):
        raise ValueError("feature predictive must be finite and nonnegative")
    if model.kind == SIGMA:
        if abs(q.sum() - 1.0) > NORM_TOL:
            raise ValueError("sigma feature predictive must sum to 1")
    elif abs(q.max() - 1.0) > NORM_TOL:
        raise ValueError("max feature predictive must have max 1")
    return q


def _measurement_row(model: ClassifierModel, z) -> np.ndarray:
    row = np.array([model.measurement_given_feature(z, f) for f in model.features.labels],
                   dtype=float)
    if np.any(row < 0.0) or not np.all(np.isfinite(row)):
        raise ValueError("measurement likelihood must be finite and nonnegative")
    return row


def sigma_classify_step(state: ClassifierState, z, model: ClassifierModel,
                        feature_predictive=None) -> ClassifierState:
    """Additive update: pattern likelihood is the feature-sum of evidence."""
    if model.kind != SIGMA:
        raise ValueError("model kind must be 'sigma'")
    q = _feature_predictive(model, feature_predictive)
    table = model.pattern_given_feature.rows          # (features, patterns)
    denom = q @ table                                 # per pattern
    lz = _measurement_row(model, z)
    lik = np.zeros(len(model.patterns))
    alive = denom > 0.0
    # feature posterior per pattern, then sum evidence over features
    weighted = q[:, None] * table
    lik[alive] = (lz @ weighted[:, alive]) / denom[alive]
    raw = state.belief.weights * lik
    total = raw.sum()
    if total == 0.0:
        raise DegenerateEvidenceError("degenerate evidence: posterior sums to zero")
    belief = DiscreteProbability(model.patterns, raw / total)
    return ClassifierState(belief, state.step + 1)


def max_classify_step(state: ClassifierState, z, model: ClassifierModel,
                      feature_predictive=None) -> ClassifierState:
    """Maxitive update: pattern likelihood follows the best feature route."""
    if model.kind != MAX:
        raise ValueError("model kind must be 'max'")
    q = _feature_predictive(model, feature_predictive)
    table = model.pattern_given_feature.rows
    denom = (q[:, None] * table).max(axis=0)
    lz = _measurement_row(model, z)
    lik = np.zeros(len(model.patterns))
    alive = denom > 0.0
    routes = lz[:, None] * q[:, None] * table
    lik[alive] = routes[:, alive].max(axis=0) / denom[alive]
    raw = state.belief.weights * lik
    top = raw.max()
    if top == 0.0:
        raise DegenerateEvidenceError("degenerate evidence: posterior peaks at zero")
    belief = DiscretePossibility(model.patterns, raw / top)
    return ClassifierState(belief, state.step + 1)


def classify_step(state: ClassifierState, z, model: ClassifierModel,
                  feature_predictive=None) -> ClassifierState:
    """Dispatch on the model kind."""
    step = sigma_classify_step if model.kind == SIGMA else max_classify_step
    return step(state, z, model, feature_predictive)


def map_decision(state: ClassifierState):
    """Label of the most believed pattern, lowest index on ties."""
    return state.belief.outcomes.labels[int(np.argmax(state.belief.weights))]
