"""Motion model bank and mode-transition priors for switching systems.

Two standard 3-axis target dynamics are provided: the discrete white
noise acceleration model (position-velocity, 6 states) and the discrete
Wiener process acceleration model (position-velocity-acceleration,
9 states).  State layout is per-axis blocks [pos, vel(, acc)] with axes
ordered x, y, z, matching the block-diagonal F = diag(F_s, F_s, F_s)
construction.  Process noise enters through G with per-axis intensity
Q = sigma_w^2 * I3.

Mode-switch priors come in two normalizations: a transition probability
matrix (rows sum to 1) for additive mixing, and a transition possibility
matrix (rows have max 1) for maxitive mixing.

Banks may mix 6- and 9-state models.  Interaction then happens in the
common 9-state space: embedding a 6-state estimate inserts zero
acceleration with a declared initial variance sigma_a_init^2 (default
(3 sigma_w)^2), and projection drops the acceleration rows/columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .gaussian import LinearGaussianModel, StateEstimate

TRANSITION_TOL = 1e-12

# per-axis index of the acceleration component in the 9-state layout
_ACCEL_IDX = np.array([2, 5, 8])
_POSVEL_IDX = np.array([0, 1, 3, 4, 6, 7])


def build_dwna(T: float, sigma_w: float, axes: int = 3,
               R: np.ndarray | None = None) -> LinearGaussianModel:
    """Discrete white noise acceleration model (position-velocity).

    Per axis: F_s = [[1, T], [0, 1]], G_s = [T^2/2, T]', H_s = [1, 0];
    noise intensity sigma_w^2 per axis.
    """
    if T <= 0:
        raise ValueError("sampling interval must be positive")
    if sigma_w < 0:
        raise ValueError("noise intensity must be nonnegative")
    Fs = np.array([[1.0, T], [0.0, 1.0]])
    Gs = np.array([[T * T / 2.0], [T]])
    Hs = np.array([[1.0, 0.0]])
    return _assemble(Fs, Gs, Hs, sigma_w, axes, R)


def build_dwpa(T: float, sigma_w: float, axes: int = 3,
               R: np.ndarray | None = None) -> LinearGaussianModel:
    """Discrete Wiener process acceleration model (position-velocity-acceleration).

    Per axis: F_s = [[1, T, T^2/2], [0, 1, T], [0, 0, 1]],
    G_s = [T^2/2, T, 1]', H_s = [1, 0, 0].
    """
    if T <= 0:
        raise ValueError("sampling interval must be positive")
    if sigma_w < 0:
        raise ValueError("noise intensity must be nonnegative")
    Fs = np.array([[1.0, T, T * T / 2.0], [0.0, 1.0, T], [0.0, 0.0, 1.0]])
    Gs = np.array([[T * T / 2.0], [T], [1.0]])
    Hs = np.array([[1.0, 0.0, 0.0]])
    return _assemble(Fs, Gs, Hs, sigma_w, axes, R)


def _assemble(Fs, Gs, Hs, sigma_w, axes, R):
    F = scipy.linalg.block_diag(*[Fs] * axes)
    G = scipy.linalg.block_diag(*[Gs] * axes)
    H = scipy.linalg.block_diag(*[Hs] * axes)
    Q = sigma_w**2 * np.eye(axes)
    if R is None:
        R = np.eye(axes)
    return LinearGaussianModel(F, G, H, Q, R)


def validate_transition(matrix, kind: str) -> np.ndarray:
    """Check a square mode-transition matrix against its normalization.

    kind="probability" requires each row to sum to 1; kind="possibility"
    requires each row to have max 1.  Violations report the row index.
    """
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(arr < 0.0) or np.any(arr > 1.0 + TRANSITION_TOL):
        raise ValueError("transition entries must lie in [0, 1]")
    if kind == "probability":
        bad = np.nonzero(np.abs(arr.sum(axis=1) - 1.0) > TRANSITION_TOL)[0]
        if bad.size:
            raise ValueError(f"row {bad[0]} of probability transition matrix "
                             f"does not sum to 1 (got {arr[bad[0]].sum()!r})")
    elif kind == "possibility":
        bad = np.nonzero(np.abs(arr.max(axis=1) - 1.0) > TRANSITION_TOL)[0]
        if bad.size:
            raise ValueError(f"row {bad[0]} of possibility transition matrix "
                             f"does not have max 1 (got {arr[bad[0]].max()!r})")
    else:
        raise ValueError("kind must be 'probability' or 'possibility'")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TransitionProbabilityMatrix:
    """Row-stochastic mode-switch prior: P[i, j] = p(next=j | prev=i)."""

    P: np.ndarray

    def __init__(self, P):
        object.__setattr__(self, "P", validate_transition(P, "probability"))

    def __len__(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class TransitionPossibilityMatrix:
    """Row-max-1 mode-switch prior: Pi[i, j] = poss(next=j | prev=i)."""

    Pi: np.ndarray

    def __init__(self, Pi):
        object.__setattr__(self, "Pi", validate_transition(Pi, "possibility"))

    def __len__(self) -> int:
        return self.Pi.shape[0]


@dataclass(frozen=True)
class ModelBank:
    """A set of candidate dynamics sharing one measurement space.

    state_dims lists each model's own dimension; common_state_dim is the
    space in which estimates are mixed (the largest model dimension).
    sigma_a_init sets the standard deviation assigned to acceleration
    components inserted when a 6-state estimate is embedded into the
    9-state space.
    """

    models: tuple
    labels: tuple
    sigma_a_init: float

    def __init__(self, models: Sequence[LinearGaussianModel],
                 labels: Sequence[str], sigma_a_init: float):
        models = tuple(models)
        labels = tuple(labels)
        if not models:
            raise ValueError("bank must contain at least one model")
        if len(labels) != len(models):
            raise ValueError("one label per model required")
        if len(set(labels)) != len(labels):
            raise ValueError("model labels must be unique")
        meas = {m.measurement_dim for m in models}
        if len(meas) != 1:
            raise ValueError("all models must share the measurement dimension")
        if any(m.state_dim not in (6, 9) for m in models) and len(
                {m.state_dim for m in models}) > 1:
            raise ValueError("mixed-dimension banks support only 6/9 state layouts")
        if sigma_a_init < 0:
            raise ValueError("sigma_a_init must be nonnegative")
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sigma_a_init", float(sigma_a_init))

    def __len__(self) -> int:
        return len(self.models)

    @property
    def state_dims(self) -> tuple:
        return tuple(m.state_dim for m in self.models)

    @property
    def common_state_dim(self) -> int:
        return max(self.state_dims)

    @property
    def measurement_dim(self) -> int:
        return self.models[0].measurement_dim


def build_bank(T: float, sigma_w: float, model_names: Sequence[str] = ("dwna", "dwpa"),
               R: np.ndarray | None = None) -> ModelBank:
    """Convenience constructor for a named DWNA/DWPA bank."""
    builders = {"dwna": build_dwna, "dwpa": build_dwpa}
    models = []
    for name in model_names:
        try:
            models.append(builders[name](T, sigma_w, R=R))
        except KeyError:
            raise ValueError(f"unknown model name {name!r}") from None
    return ModelBank(models, tuple(model_names), sigma_a_init=3.0 * sigma_w)


def embed_state(est: StateEstimate, to_dim: int, sigma_a_init: float) -> StateEstimate:
    """Move an estimate between the 6- and 9-state per-axis layouts.

    6 -> 9 inserts zero acceleration with variance sigma_a_init^2 on the
    new diagonal entries; 9 -> 6 drops the acceleration rows/columns.
    Equal dimensions pass through unchanged.
    """
    from_dim = est.dim
    if from_dim == to_dim:
        return est
    if from_dim == 6 and to_dim == 9:
        mean = np.zeros(9)
        mean[_POSVEL_IDX] = est.mean
        cov = np.zeros((9, 9))
        cov[np.ix_(_POSVEL_IDX, _POSVEL_IDX)] = est.cov
        cov[_ACCEL_IDX, _ACCEL_IDX] = sigma_a_init**2
        return StateEstimate(mean, cov, validate=False)
    if from_dim == 9 and to_dim == 6:
        mean = est.mean[_POSVEL_IDX]
        cov = est.cov[np.ix_(_POSVEL_IDX, _POSVEL_IDX)]
        return StateEstimate(mean, cov, validate=False)
    raise ValueError(f"unsupported embedding {from_dim} -> {to_dim}")
