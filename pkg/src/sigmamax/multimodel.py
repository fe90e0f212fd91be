"""Interacting multiple-model estimation, in additive and hybrid form.

Two one-cycle recursions over a bank of linear-Gaussian models:

* ``imm_cycle`` is the classic IMM: mode beliefs are probabilities, the
  per-model initial conditions are probability-weighted mixtures
  (including the spread-of-means covariance term), the mode belief is
  sum-renormalized against the model likelihoods, and the output is the
  probability-weighted fusion of the model-conditioned posteriors.

* ``himm_cycle`` is the hybrid IMM: the continuous state stays
  stochastic and is filtered by exactly the same Kalman bank, but the
  mode process is treated as fuzzy.  Mode beliefs are possibilities, the
  interaction step is max-product with a transition possibility matrix,
  each model restarts from the single most possible move-in mode's mean
  (a hard assignment instead of a mixture), the belief update is
  max-renormalized, and the output is the posterior of the single most
  possible mode.

Both cycles are pure functions (state, measurement) -> (state, output).
Mode-belief arithmetic runs in the log domain with max-subtraction, so
model likelihoods may underflow to zero density without breaking the
recursion; finite log-likelihoods are floored at ``LOG_LIK_FLOOR`` to
preserve ordering while preventing total underflow.

Banks may mix 6- and 9-state motion models; interaction then happens in
the 9-state common space (see ``motion.embed_state``) and each model is
filtered in its own space.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .discrete import DiscretePossibility, DiscreteProbability, OutcomeSet
from .gaussian import LinearGaussianModel, StateEstimate, kf_predict, kf_update
from .motion import ModelBank, TransitionPossibilityMatrix, TransitionProbabilityMatrix, embed_state

LOG_LIK_FLOOR = -700.0


class LikelihoodUnderflowWarning(RuntimeWarning):
    """All model likelihoods vanished; the predicted mode belief is kept."""


@dataclass(frozen=True)
class ImmState:
    """Recursive IMM state: per-model estimates plus a mode probability."""

    estimates: tuple
    mode_prob: DiscreteProbability

    def __init__(self, estimates: Sequence[StateEstimate], mode_prob: DiscreteProbability):
        estimates = tuple(estimates)
        if len(estimates) != len(mode_prob):
            raise ValueError("one estimate per mode required")
        object.__setattr__(self, "estimates", estimates)
        object.__setattr__(self, "mode_prob", mode_prob)


@dataclass(frozen=True)
class HimmState:
    """Recursive hybrid-IMM state: per-model estimates plus a mode possibility."""

    estimates: tuple
    mode_poss: DiscretePossibility

    def __init__(self, estimates: Sequence[StateEstimate], mode_poss: DiscretePossibility):
        estimates = tuple(estimates)
        if len(estimates) != len(mode_poss):
            raise ValueError("one estimate per mode required")
        object.__setattr__(self, "estimates", estimates)
        object.__setattr__(self, "mode_poss", mode_poss)


@dataclass(frozen=True)
class CycleOutput:
    """Fused estimate and diagnostics for one filter cycle.

    selected_mode is the argmax mode index for the hybrid filter (lowest
    index on ties) and None for the IMM, whose output is a mixture.
    """

    fused_mean: np.ndarray
    fused_cov: np.ndarray
    mode_belief: np.ndarray
    selected_mode: Optional[int]
    per_model_log_lik: Optional[np.ndarray]


def initial_imm_state(bank: ModelBank, estimates: Sequence[StateEstimate],
                      probabilities=None) -> ImmState:
    """Bank-shaped starting state; mode probabilities default to uniform."""
    if probabilities is None:
        probabilities = np.full(len(bank), 1.0 / len(bank))
    return ImmState(estimates, DiscreteProbability(OutcomeSet(bank.labels), probabilities))


def initial_himm_state(bank: ModelBank, estimates: Sequence[StateEstimate],
                       possibilities=None) -> HimmState:
    """Bank-shaped starting state; mode possibilities default to all-ones."""
    if possibilities is None:
        possibilities = np.ones(len(bank))
    return HimmState(estimates, DiscretePossibility(OutcomeSet(bank.labels), possibilities))


# ---------------------------------------------------------------------------
# Interaction


def imm_interact(state: ImmState, trans: TransitionProbabilityMatrix
                 ) -> tuple[list[StateEstimate], DiscreteProbability, np.ndarray]:
    """Probability-weighted mixing of the model bank.

    Returns the mixed per-model initial conditions, the predicted mode
    probability, and the mixing-weight matrix w[l, j] = p(prev=l |
    next=j, measurements).  All estimates must share one state space.

    Raises if some mode's predicted probability is zero: the move-in
    weights for that mode cannot be normalized.
    """
    P = trans.P
    estimates = state.estimates
    _require_common_dim(estimates)
    probs = state.mode_prob.weights
    if P.shape[0] != len(estimates):
        raise ValueError("transition matrix size does not match the bank")
    predicted = P.T @ probs
    if np.any(predicted <= 0.0):
        j = int(np.argmin(predicted))
        raise ValueError(f"predicted probability of mode {j} is zero; "
                         "cannot normalize its mixing weights")
    weights = P * probs[:, None] / predicted[None, :]
    means = np.stack([e.mean for e in estimates])
    mixed = []
    for j in range(len(estimates)):
        w = weights[:, j]
        mean_j = w @ means
        cov_j = np.zeros_like(estimates[0].cov)
        for l, est in enumerate(estimates):
            d = mean_j - est.mean
            cov_j += w[l] * (est.cov + np.outer(d, d))
        mixed.append(StateEstimate(mean_j, cov_j, validate=False))
    return mixed, DiscreteProbability(state.mode_prob.outcomes, predicted), weights


def himm_interact(state: HimmState, trans: TransitionPossibilityMatrix,
                  mixed_covariance: str = "own"
                  ) -> tuple[list[StateEstimate], DiscretePossibility, np.ndarray]:
    """Max-product interaction with hard mean reassignment.

    The predicted possibility of mode j is the best product of prior
    mode possibility and transition possibility over source modes; the
    move-in possibility renormalizes those products per destination.
    Each mode restarts from the mean of its most possible source mode
    (lowest index on ties).

    mixed_covariance selects the restart covariance: "own" keeps each
    mode's previous covariance (the spread term of the hard assignment
    vanishes identically), "selected" adopts the argmax source mode's
    covariance.

    A mode with zero predicted possibility gets no valid move-in
    distribution; its previous estimate is passed through unchanged and
    the cycle skips its filter.
    """
    if mixed_covariance not in ("own", "selected"):
        raise ValueError("mixed_covariance must be 'own' or 'selected'")
    Pi = trans.Pi
    estimates = state.estimates
    _require_common_dim(estimates)
    poss = state.mode_poss.weights
    if Pi.shape[0] != len(estimates):
        raise ValueError("transition matrix size does not match the bank")
    products = Pi * poss[:, None]            # [source l, destination j]
    predicted = products.max(axis=0)
    move_in = np.zeros_like(products)
    alive = predicted > 0.0
    move_in[:, alive] = products[:, alive] / predicted[alive]
    mixed = []
    for j in range(len(estimates)):
        if not alive[j]:
            mixed.append(estimates[j])
            continue
        l_star = int(np.argmax(move_in[:, j]))
        cov = estimates[j].cov if mixed_covariance == "own" else estimates[l_star].cov
        mixed.append(StateEstimate(estimates[l_star].mean, cov, validate=False))
    return mixed, DiscretePossibility(state.mode_poss.outcomes, predicted), move_in


def _require_common_dim(estimates):
    dims = {e.dim for e in estimates}
    if len(dims) != 1:
        raise ValueError("interaction requires estimates in a common state space; "
                         "embed them first")


# ---------------------------------------------------------------------------
# Mode-belief updates (log domain)


def _prepare_log_lik(log_lik, n: int) -> np.ndarray:
    ll = np.asarray(log_lik, dtype=float)
    if ll.shape != (n,):
        raise ValueError(f"log-likelihood must have shape ({n},)")
    if np.any(np.isnan(ll)) or np.any(ll == np.inf):
        raise ValueError("log-likelihoods must be finite or -inf")
    return np.where(np.isfinite(ll), np.maximum(ll, LOG_LIK_FLOOR), ll)


def imm_mode_update(predicted: DiscreteProbability, log_lik) -> DiscreteProbability:
    """Sum-renormalized mode probability update from log-likelihoods."""
    ll = _prepare_log_lik(log_lik, len(predicted))
    with np.errstate(divide="ignore"):
        t = ll + np.log(predicted.weights)
    top = t.max()
    if top == -np.inf:
        warnings.warn("likelihood underflow: keeping predicted mode probabilities",
                      LikelihoodUnderflowWarning)
        return predicted
    w = np.exp(t - top)
    return DiscreteProbability(predicted.outcomes, w / w.sum())


def himm_mode_update(predicted: DiscretePossibility, log_lik) -> DiscretePossibility:
    """Max-renormalized mode possibility update from log-likelihoods."""
    ll = _prepare_log_lik(log_lik, len(predicted))
    with np.errstate(divide="ignore"):
        t = ll + np.log(predicted.weights)
    top = t.max()
    if top == -np.inf:
        warnings.warn("likelihood underflow: keeping predicted mode possibilities",
                      LikelihoodUnderflowWarning)
        return predicted
    return DiscretePossibility(predicted.outcomes, np.exp(t - top))


# ---------------------------------------------------------------------------
# Output fusion


def imm_output(estimates: Sequence[StateEstimate], mode_prob: DiscreteProbability,
               per_model_log_lik=None) -> CycleOutput:
    """Probability-weighted fusion of the model-conditioned posteriors.

    The covariance is the weighted sum of per-model covariances (no
    spread-of-means term).
    """
    _require_common_dim(estimates)
    w = mode_prob.weights
    mean = w @ np.stack([e.mean for e in estimates])
    cov = np.zeros_like(estimates[0].cov)
    for wl, est in zip(w, estimates):
        cov = cov + wl * est.cov
    return CycleOutput(mean, cov, w.copy(), None, _as_loglik_array(per_model_log_lik))


def himm_output(estimates: Sequence[StateEstimate], mode_poss: DiscretePossibility,
                per_model_log_lik=None) -> CycleOutput:
    """Hard selection: the most possible mode's posterior, verbatim."""
    _require_common_dim(estimates)
    j = int(np.argmax(mode_poss.weights))
    return CycleOutput(estimates[j].mean.copy(), estimates[j].cov.copy(),
                       mode_poss.weights.copy(), j, _as_loglik_array(per_model_log_lik))


def _as_loglik_array(per_model_log_lik):
    if per_model_log_lik is None:
        return None
    return np.asarray(per_model_log_lik, dtype=float)


# ---------------------------------------------------------------------------
# Full cycles


def imm_cycle(state: ImmState, z, bank: ModelBank, trans: TransitionProbabilityMatrix,
              measurement_cov=None) -> tuple[ImmState, CycleOutput]:
    """One IMM recursion: interact, filter per model, update belief, fuse."""
    common = bank.common_state_dim
    interact_state = state
    if any(e.dim != common for e in state.estimates):
        interact_state = ImmState(
            [embed_state(e, common, bank.sigma_a_init) for e in state.estimates],
            state.mode_prob)
    mixed, predicted, _ = imm_interact(interact_state, trans)
    posts = []
    logliks = np.empty(len(bank))
    for j, model in enumerate(bank.models):
        model_j = _with_measurement_cov(model, measurement_cov)
        init = embed_state(mixed[j], model.state_dim, bank.sigma_a_init)
        post, record = kf_update(kf_predict(init, model_j), z, model_j)
        posts.append(post)
        logliks[j] = record.log_likelihood
    belief = imm_mode_update(predicted, logliks)
    fused = [embed_state(p, common, bank.sigma_a_init) for p in posts]
    return ImmState(posts, belief), imm_output(fused, belief, logliks)


def himm_cycle(state: HimmState, z, bank: ModelBank, trans: TransitionPossibilityMatrix,
               measurement_cov=None, mixed_covariance: str = "own"
               ) -> tuple[HimmState, CycleOutput]:
    """One hybrid-IMM recursion: max-product interact, filter, update, select.

    Modes whose predicted possibility is zero are not filtered this
    cycle; they keep their previous estimate and zero belief.
    """
    common = bank.common_state_dim
    interact_state = state
    if any(e.dim != common for e in state.estimates):
        interact_state = HimmState(
            [embed_state(e, common, bank.sigma_a_init) for e in state.estimates],
            state.mode_poss)
    mixed, predicted, _ = himm_interact(interact_state, trans, mixed_covariance)
    posts = []
    logliks = np.empty(len(bank))
    for j, model in enumerate(bank.models):
        if predicted.weights[j] == 0.0:
            posts.append(state.estimates[j])
            logliks[j] = -np.inf
            continue
        model_j = _with_measurement_cov(model, measurement_cov)
        init = embed_state(mixed[j], model.state_dim, bank.sigma_a_init)
        post, record = kf_update(kf_predict(init, model_j), z, model_j)
        posts.append(post)
        logliks[j] = record.log_likelihood
    belief = himm_mode_update(predicted, logliks)
    fused = [embed_state(p, common, bank.sigma_a_init) for p in posts]
    return HimmState(posts, belief), himm_output(fused, belief, logliks)


def _with_measurement_cov(model: LinearGaussianModel, measurement_cov):
    if measurement_cov is None:
        return model
    return dataclasses.replace(model, R=measurement_cov)
