"""Linear-Gaussian filtering in additive and maxitive form.

The additive side is the standard Kalman recursion.  The maxitive side
propagates Gaussian possibility functions, exp(-0.5 (x-mu)' S^-1 (x-mu)),
whose prediction replaces the marginalization integral by a supremum and
whose update sup-renormalizes the product of two such functions.  For
linear-Gaussian systems both recursions move the same mean/covariance
pair, so the maxitive step functions here share the Kalman arithmetic
path and the equivalence is exact by construction; tests assert it
against independently coded moment algebra.

Innovations are scored in the log domain throughout: model likelihoods
feed mode-belief updates downstream, and linear-domain Gaussian
densities underflow at realistic innovation sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

SYM_TOL = 1e-9


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def _check_covariance(cov: np.ndarray, name: str, *, positive_definite: bool = False) -> None:
    scale = np.abs(cov).max() if cov.size else 0.0
    if np.abs(cov - cov.T).max() > SYM_TOL * max(scale, 1e-300):
        raise ValueError(f"{name} must be symmetric")
    eigvals = np.linalg.eigvalsh(_symmetrize(cov))
    trace = np.trace(cov)
    if positive_definite:
        if eigvals.min() <= 0.0:
            raise ValueError(f"{name} must be positive definite")
    elif eigvals.min() < -SYM_TOL * max(trace, 0.0) - 1e-300:
        raise ValueError(f"{name} must be positive semi-definite")


@dataclass(frozen=True)
class StateEstimate:
    """Gaussian (or Gaussian-possibility) belief: mean vector + covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __init__(self, mean, cov, *, validate: bool = True):
        mean = np.array(mean, dtype=float).reshape(-1)
        cov = np.array(cov, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"covariance shape {cov.shape} does not match state dim {mean.size}")
        if validate:
            if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
                raise ValueError("state estimate must be finite")
            _check_covariance(cov, "covariance")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class LinearGaussianModel:
    """x' = F x + G w,  z = H x + v,  w ~ N(0, Q),  v ~ N(0, R)."""

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __init__(self, F, G, H, Q, R):
        F = np.atleast_2d(np.asarray(F, dtype=float))
        G = np.atleast_2d(np.asarray(G, dtype=float))
        H = np.atleast_2d(np.asarray(H, dtype=float))
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        R = np.atleast_2d(np.asarray(R, dtype=float))
        n = F.shape[0]
        if F.shape != (n, n):
            raise ValueError("F must be square")
        if G.shape[0] != n:
            raise ValueError("G must have as many rows as the state dimension")
        if Q.shape != (G.shape[1], G.shape[1]):
            raise ValueError("Q must match the noise-input width of G")
        if H.shape[1] != n:
            raise ValueError("H must have as many columns as the state dimension")
        if R.shape != (H.shape[0], H.shape[0]):
            raise ValueError("R must match the measurement dimension")
        _check_covariance(Q, "Q")
        _check_covariance(R, "R", positive_definite=True)
        for name, m in (("F", F), ("G", G), ("H", H), ("Q", Q), ("R", R)):
            m = np.ascontiguousarray(m)
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def state_dim(self) -> int:
        return self.F.shape[0]

    @property
    def measurement_dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class InnovationRecord:
    """Measurement-update byproducts: residual, S, gain, log-likelihood."""

    residual: np.ndarray
    S: np.ndarray
    gain: np.ndarray
    log_likelihood: float


def kf_predict(est: StateEstimate, model: LinearGaussianModel) -> StateEstimate:
    """Time extrapolation: mean -> F mean, cov -> F cov F' + G Q G'."""
    if est.dim != model.state_dim:
        raise ValueError("state dimension does not match the model")
    mean = model.F @ est.mean
    cov = model.F @ est.cov @ model.F.T + model.G @ model.Q @ model.G.T
    return StateEstimate(mean, _symmetrize(cov), validate=False)


def kf_update(pred: StateEstimate, z, model: LinearGaussianModel
              ) -> tuple[StateEstimate, InnovationRecord]:
    """Measurement update with innovation scoring.

    S is factored by Cholesky; a factorization failure means the
    innovation covariance is not positive definite and is surfaced as a
    LinAlgError("degenerate innovation covariance").
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != model.measurement_dim:
        raise ValueError("measurement dimension does not match the model")
    if pred.dim != model.state_dim:
        raise ValueError("state dimension does not match the model")
    H = model.H
    S = _symmetrize(H @ pred.cov @ H.T + model.R)
    try:
        chol = scipy.linalg.cho_factor(S, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("degenerate innovation covariance") from exc
    residual = z - H @ pred.mean
    # W = P H' S^-1 computed as solve(S, H P)' to keep one factorization
    gain = scipy.linalg.cho_solve(chol, H @ pred.cov).T
    mean = pred.mean + gain @ residual
    cov = _symmetrize(pred.cov - gain @ S @ gain.T)
    log_likelihood = _log_gaussian_density(residual, chol)
    record = InnovationRecord(residual, S, gain, log_likelihood)
    return StateEstimate(mean, cov, validate=False), record


def _log_gaussian_density(residual: np.ndarray, chol) -> float:
    """log N(residual; 0, S) from the Cholesky factor of S."""
    lower = chol[0]
    half_maha = 0.5 * float(residual @ scipy.linalg.cho_solve(chol, residual))
    log_det = 2.0 * float(np.sum(np.log(np.diag(lower))))
    return -0.5 * residual.size * math.log(2.0 * math.pi) - 0.5 * log_det - half_maha


def gaussian_possibility(x, mu, cov) -> float:
    """Gaussian possibility value exp(-0.5 (x-mu)' cov^-1 (x-mu)) in [0, 1]."""
    x = np.asarray(x, dtype=float).reshape(-1)
    mu = np.asarray(mu, dtype=float).reshape(-1)
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if x.shape != mu.shape or cov.shape != (x.size, x.size):
        raise ValueError("inconsistent dimensions")
    try:
        chol = scipy.linalg.cho_factor(cov, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular covariance") from exc
    d = x - mu
    return float(np.exp(-0.5 * (d @ scipy.linalg.cho_solve(chol, d))))


def poss_predict(est: StateEstimate, model: LinearGaussianModel) -> StateEstimate:
    """Supremum-form prediction of a Gaussian possibility belief.

    The propagated possibility is N-bar(x; F mean, F cov F' + G Q G'):
    for linear-Gaussian models the sup-marginalization moves exactly the
    Kalman moments, so this shares kf_predict's arithmetic path.
    """
    return kf_predict(est, model)


def poss_update(pred: StateEstimate, z, model: LinearGaussianModel) -> StateEstimate:
    """Sup-renormalized product of measurement and prediction possibilities.

    The product of the two Gaussian possibility functions, renormalized
    to peak 1, is again Gaussian-possibility with the Kalman posterior
    moments; shares kf_update's arithmetic path.
    """
    posterior, _ = kf_update(pred, z, model)
    return posterior


def pdf_to_possibility_1d(grid, density) -> np.ndarray:
    """Pointwise ratio-to-supremum conversion of a sampled 1-D density."""
    grid = np.asarray(grid, dtype=float)
    density = np.asarray(density, dtype=float)
    if grid.shape != density.shape or grid.ndim != 1:
        raise ValueError("grid and density must be matching 1-D arrays")
    if np.any(density < 0.0):
        raise ValueError("density must be nonnegative")
    top = density.max()
    if top == 0.0:
        raise ValueError("density is identically zero")
    return density / top
