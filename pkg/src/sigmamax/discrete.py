"""Finite discrete distributions under sum- and max-normalization.

Two kinds of weight vectors over a finite outcome set live here:

* probabilities, normalized so the weights sum to 1 (additive calculus,
  disjunction by summation), and
* possibilities, normalized so the largest weight is 1 (maxitive
  calculus, disjunction by maximization).

The module also provides the machinery that couples the two: hybrid
joints of a random and a fuzzy variable, the Klir ratio transforms
between the two normalizations, max-product and sum-product relation
composition, Bayes-style updates in both calculi, and the heterogeneous
compositions that fuse a probabilistic relation with a possibilistic
one through a shared intermediate variable.

All containers are immutable after construction and validate their
normalization on construction (absolute tolerance ``NORM_TOL``).
Operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

NORM_TOL = 1e-12

PROBABILITY = "probability"
POSSIBILITY = "possibility"


class DegenerateEvidenceError(ValueError):
    """Raised when an update meets evidence that zeroes out every outcome."""


def _freeze(values, shape_hint: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != (2 if shape_hint == "matrix" else 1):
        raise ValueError(f"expected a {shape_hint}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("weights must be finite")
    arr.setflags(write=False)
    return arr


def _check_unit_range(arr: np.ndarray) -> None:
    if np.any(arr < 0.0) or np.any(arr > 1.0 + NORM_TOL):
        raise ValueError("weights must lie in [0, 1]")


@dataclass(frozen=True)
class OutcomeSet:
    """Ordered set of distinct outcome labels; order fixes the indexing."""

    labels: tuple

    def __init__(self, labels: Sequence):
        labels = tuple(labels)
        if len(labels) == 0:
            raise ValueError("outcome set must be non-empty")
        if len(set(labels)) != len(labels):
            raise ValueError("outcome labels must be unique")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class DiscreteProbability:
    """Probability distribution: weights in [0, 1] summing to 1."""

    outcomes: OutcomeSet
    weights: np.ndarray

    def __init__(self, outcomes: OutcomeSet, weights: Sequence[float]):
        arr = _freeze(weights, "vector")
        if len(arr) != len(outcomes):
            raise ValueError("weight count does not match outcome count")
        _check_unit_range(arr)
        if abs(arr.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"probability weights must sum to 1, got {arr.sum()!r}")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True)
class DiscretePossibility:
    """Possibility distribution: weights in [0, 1] with maximum 1.

    At least one outcome is fully possible; there is no additivity
    requirement.
    """

    outcomes: OutcomeSet
    weights: np.ndarray

    def __init__(self, outcomes: OutcomeSet, weights: Sequence[float]):
        arr = _freeze(weights, "vector")
        if len(arr) != len(outcomes):
            raise ValueError("weight count does not match outcome count")
        _check_unit_range(arr)
        if abs(arr.max() - 1.0) > NORM_TOL:
            raise ValueError(f"possibility weights must have max 1, got {arr.max()!r}")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True)
class ConditionalTable:
    """Conditional distribution table, one row per conditioning outcome.

    ``rows[i, j]`` is the weight of ``result[j]`` given ``given[i]``.
    Probability tables have rows summing to 1; possibility tables have
    rows with maximum 1.
    """

    given: OutcomeSet
    result: OutcomeSet
    rows: np.ndarray
    kind: str

    def __init__(self, given: OutcomeSet, result: OutcomeSet,
                 rows: Sequence[Sequence[float]], kind: str):
        if kind not in (PROBABILITY, POSSIBILITY):
            raise ValueError(f"kind must be {PROBABILITY!r} or {POSSIBILITY!r}")
        arr = _freeze(rows, "matrix")
        if arr.shape != (len(given), len(result)):
            raise ValueError(
                f"table shape {arr.shape} does not match "
                f"({len(given)}, {len(result)})")
        _check_unit_range(arr)
        if kind == PROBABILITY:
            bad = np.nonzero(np.abs(arr.sum(axis=1) - 1.0) > NORM_TOL)[0]
            if bad.size:
                raise ValueError(f"probability table row {bad[0]} does not sum to 1")
        else:
            bad = np.nonzero(np.abs(arr.max(axis=1) - 1.0) > NORM_TOL)[0]
            if bad.size:
                raise ValueError(f"possibility table row {bad[0]} does not have max 1")
        object.__setattr__(self, "given", given)
        object.__setattr__(self, "result", result)
        object.__setattr__(self, "rows", arr)
        object.__setattr__(self, "kind", kind)

    def row(self, label) -> np.ndarray:
        return self.rows[self.given.index(label)]


@dataclass(frozen=True)
class HybridJoint:
    """Joint of a random variable (rows) and a fuzzy variable (columns).

    The normalization is order-dependent: a valid hybrid joint satisfies
    sum-of-column-maxima = 1 (random-major) or max-of-column-sums = 1
    (fuzzy-major), and in general only one of the two.  Construction
    from a marginal and a conditional guarantees one of them; externally
    supplied cells are accepted if at least one holds.
    """

    random_outcomes: OutcomeSet
    fuzzy_outcomes: OutcomeSet
    cells: np.ndarray

    def __init__(self, random_outcomes: OutcomeSet, fuzzy_outcomes: OutcomeSet,
                 cells: Sequence[Sequence[float]]):
        arr = _freeze(cells, "matrix")
        if arr.shape != (len(random_outcomes), len(fuzzy_outcomes)):
            raise ValueError("cell shape does not match outcome sets")
        _check_unit_range(arr)
        sum_of_max = arr.max(axis=1).sum()
        max_of_sum = arr.sum(axis=0).max()
        if abs(sum_of_max - 1.0) > NORM_TOL and abs(max_of_sum - 1.0) > NORM_TOL:
            raise ValueError(
                "hybrid joint satisfies neither normalization: "
                f"sum of per-row maxima = {sum_of_max!r}, "
                f"max of per-column sums = {max_of_sum!r}")
        object.__setattr__(self, "random_outcomes", random_outcomes)
        object.__setattr__(self, "fuzzy_outcomes", fuzzy_outcomes)
        object.__setattr__(self, "cells", arr)

    def satisfies_random_major(self) -> bool:
        """sum_x max_y cells = 1 (up to tolerance)."""
        return bool(abs(self.cells.max(axis=1).sum() - 1.0) <= NORM_TOL)

    def satisfies_fuzzy_major(self) -> bool:
        """max_y sum_x cells = 1 (up to tolerance)."""
        return bool(abs(self.cells.sum(axis=0).max() - 1.0) <= NORM_TOL)


# ---------------------------------------------------------------------------
# Klir ratio transforms


def prob_to_poss(p: DiscreteProbability) -> DiscretePossibility:
    """Ratio-to-max transform: divide every weight by the largest one."""
    w = p.weights / p.weights.max()
    return DiscretePossibility(p.outcomes, w)


def poss_to_prob(pi: DiscretePossibility) -> DiscreteProbability:
    """Ratio-to-sum transform: divide every weight by the total."""
    w = pi.weights / pi.weights.sum()
    return DiscreteProbability(pi.outcomes, w)


# ---------------------------------------------------------------------------
# Relation composition


def compose_fuzzy(rel_xy: ConditionalTable, rel_yz: ConditionalTable) -> ConditionalTable:
    """Max-product composition of two possibility tables (X->Y, Y->Z).

    out[i, k] = max_l rel_xy[i, l] * rel_yz[l, k].  Valid inputs make
    every output row max-1 on their own; this is asserted rather than
    renormalized.
    """
    if rel_xy.kind != POSSIBILITY or rel_yz.kind != POSSIBILITY:
        raise ValueError("compose_fuzzy requires possibility tables")
    if rel_xy.result != rel_yz.given:
        raise ValueError("intermediate outcome sets do not match")
    # (i, l, 1) * (1, l, k) -> max over l
    out = np.max(rel_xy.rows[:, :, None] * rel_yz.rows[None, :, :], axis=1)
    assert np.all(np.abs(out.max(axis=1) - 1.0) <= NORM_TOL)
    return ConditionalTable(rel_xy.given, rel_yz.result, out, POSSIBILITY)


def compose_stochastic(rel_xy: ConditionalTable, rel_yz: ConditionalTable) -> ConditionalTable:
    """Sum-product (chain rule) composition of two probability tables."""
    if rel_xy.kind != PROBABILITY or rel_yz.kind != PROBABILITY:
        raise ValueError("compose_stochastic requires probability tables")
    if rel_xy.result != rel_yz.given:
        raise ValueError("intermediate outcome sets do not match")
    out = rel_xy.rows @ rel_yz.rows
    return ConditionalTable(rel_xy.given, rel_yz.result, out, PROBABILITY)


# ---------------------------------------------------------------------------
# Updates


def _as_likelihood(likelihood, n: int, unit_range: bool) -> np.ndarray:
    arr = np.asarray(likelihood, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"likelihood must have shape ({n},)")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ValueError("likelihood entries must be finite and nonnegative")
    if unit_range and np.any(arr > 1.0 + NORM_TOL):
        raise ValueError("possibility likelihood entries must lie in [0, 1]")
    return arr


def possibility_update(prior: DiscretePossibility, likelihood) -> DiscretePossibility:
    """Possibilistic Bayes step: out_i = prior_i*lik_i / max_k prior_k*lik_k."""
    lik = _as_likelihood(likelihood, len(prior), unit_range=True)
    raw = prior.weights * lik
    top = raw.max()
    if top == 0.0:
        raise DegenerateEvidenceError("degenerate evidence: all products are zero")
    return DiscretePossibility(prior.outcomes, raw / top)


def poss_update_with_prob_likelihood(prior: DiscretePossibility, prob_lik) -> DiscretePossibility:
    """Update a possibility prior with a probability likelihood (max-renormalized).

    The likelihood entries are probabilities or densities, so they are
    only required to be nonnegative, not bounded by 1.
    """
    lik = _as_likelihood(prob_lik, len(prior), unit_range=False)
    raw = prior.weights * lik
    top = raw.max()
    if top == 0.0:
        raise DegenerateEvidenceError("degenerate evidence: all products are zero")
    return DiscretePossibility(prior.outcomes, raw / top)


def prob_update_with_poss_likelihood(prior: DiscreteProbability, poss_lik) -> DiscreteProbability:
    """Update a probability prior with a possibility likelihood (sum-renormalized)."""
    lik = _as_likelihood(poss_lik, len(prior), unit_range=True)
    raw = prior.weights * lik
    total = raw.sum()
    if total == 0.0:
        raise DegenerateEvidenceError("degenerate evidence: all products are zero")
    return DiscreteProbability(prior.outcomes, raw / total)


# ---------------------------------------------------------------------------
# Heterogeneous composition through a shared intermediate variable


def compose_hetero_to_prob(p_xz: ConditionalTable, pi_zy: ConditionalTable,
                           fixed_y) -> tuple[DiscreteProbability, np.ndarray]:
    """Fuse p(x|z) with pi(z|y) at a fixed y into a distribution over x.

    The induced raw vector is raw_i = max_z p(x_i|z) * pi(z|y); it is
    generally not sum-1, so the normalized distribution divides by the
    total.  Both are returned because the raw vector is the bias-free
    choice when used as a likelihood over y.

    Args:
        p_xz: probability table with given = intermediate z, result = x.
        pi_zy: possibility table with given = y, result = intermediate z.
        fixed_y: label in pi_zy.given to condition on.

    Returns:
        (normalized distribution over x, raw induced vector)
    """
    if p_xz.kind != PROBABILITY or pi_zy.kind != POSSIBILITY:
        raise ValueError("expected a probability table and a possibility table")
    if p_xz.given != pi_zy.result:
        raise ValueError("intermediate outcome sets do not match")
    pi_row = pi_zy.row(fixed_y)                      # over z
    raw = np.max(p_xz.rows * pi_row[:, None], axis=0)  # over x
    total = raw.sum()
    if total == 0.0:
        raise DegenerateEvidenceError("induced vector is identically zero")
    return DiscreteProbability(p_xz.result, raw / total), raw


def compose_hetero_to_poss(pi_yz: ConditionalTable, p_zx: ConditionalTable,
                           fixed_x) -> tuple[DiscretePossibility, np.ndarray]:
    """Fuse pi(y|z) with p(z|x) at a fixed x into a possibility over y.

    raw_j = sum_z pi(y_j|z) * p(z|x); max-normalized for the returned
    distribution, raw vector returned alongside.

    Args:
        pi_yz: possibility table with given = intermediate z, result = y.
        p_zx: probability table with given = x, result = intermediate z.
        fixed_x: label in p_zx.given to condition on.
    """
    if pi_yz.kind != POSSIBILITY or p_zx.kind != PROBABILITY:
        raise ValueError("expected a possibility table and a probability table")
    if pi_yz.given != p_zx.result:
        raise ValueError("intermediate outcome sets do not match")
    p_row = p_zx.row(fixed_x)                       # over z
    raw = (pi_yz.rows * p_row[:, None]).sum(axis=0)  # over y
    top = raw.max()
    if top == 0.0:
        raise DegenerateEvidenceError("induced vector is identically zero")
    return DiscretePossibility(pi_yz.result, raw / top), raw


# ---------------------------------------------------------------------------
# Hybrid joints


def hybrid_from_marginal_conditional(
        cond: ConditionalTable,
        marginal: Union[DiscreteProbability, DiscretePossibility]) -> HybridJoint:
    """Build a hybrid joint from complementary marginal/conditional pieces.

    Either a probability conditional p(x|y) with a possibility marginal
    pi(y) (cells = p(x|y) pi(y), fuzzy-major normalization holds) or a
    possibility conditional pi(y|x) with a probability marginal p(x)
    (cells = pi(y|x) p(x), random-major normalization holds).
    """
    if cond.given != marginal.outcomes:
        raise ValueError("conditional's given set must match the marginal's outcomes")
    if cond.kind == PROBABILITY:
        if not isinstance(marginal, DiscretePossibility):
            raise ValueError("probability conditional requires a possibility marginal")
        # rows of cond are indexed by the fuzzy variable y; cells are x-major
        cells = (cond.rows * marginal.weights[:, None]).T
        return HybridJoint(cond.result, cond.given, cells)
    else:
        if not isinstance(marginal, DiscreteProbability):
            raise ValueError("possibility conditional requires a probability marginal")
        cells = cond.rows * marginal.weights[:, None]
        return HybridJoint(cond.given, cond.result, cells)


def induced_marginal(h: HybridJoint, axis: str) -> np.ndarray:
    """Raw induced marginal of a hybrid joint.

    axis="random": max over the fuzzy axis, generally not sum-1.
    axis="fuzzy":  sum over the random axis, generally not max-1.
    Callers normalize explicitly when a proper distribution is needed.
    """
    if axis == "random":
        return h.cells.max(axis=1)
    if axis == "fuzzy":
        return h.cells.sum(axis=0)
    raise ValueError("axis must be 'random' or 'fuzzy'")
