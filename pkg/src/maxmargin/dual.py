"""Entropy mirror descent and its accelerated variant on the simplex.

The dual objective is phi(q) = ||Z^T q||^2 / 2; its minimum over the simplex
equals (max margin)^2 / 2, and zero exactly when the data is nonseparable.
The accelerated engine keeps three simplex sequences (q, mu, nu) and a
dual-averaged potential in log space, so weights of examples whose scores
diverge to -inf stay representable.
"""

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .data import Dataset
from .losses import softmax


@dataclass(frozen=True)
class Schedule:
    """Step sequences theta_t, lambda_t in (0, 1], plus the smoothness rho.

    The default lambda_t = 2 / (t + 2) satisfies lambda_0 = 1 and
    1/lambda_t^2 - 1/lambda_t <= 1/lambda_{t-1}^2, which is what the
    accelerated rate requires.  The derived primal momentum factor is
    beta_t = lambda_{t-1} (1 - lambda_t) / lambda_t, which is t / (t + 1)
    under the default rule.
    """

    theta: Callable[[int], float] = field(default=lambda t: 1.0)
    lam: Callable[[int], float] = field(default=lambda t: 2.0 / (t + 2))
    rho: float = 1.0

    def __post_init__(self):
        if abs(self.lam(0) - 1.0) > 1e-12:
            raise ValueError("schedule requires lambda_0 = 1")
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    def beta(self, t: int) -> float:
        if t == 0:
            return 0.0
        lam_t = self.lam(t)
        return self.lam(t - 1) * (1.0 - lam_t) / lam_t


def default_schedule(rho: float = 1.0, theta: float = 1.0) -> Schedule:
    return Schedule(theta=lambda t: theta, lam=lambda t: 2.0 / (t + 2), rho=rho)


@dataclass
class DualState:
    """Three simplex points plus the log-space representation of q."""

    log_q: np.ndarray
    q: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    t: int = 0


def uniform_dual_state(n: int) -> DualState:
    log_q = np.zeros(n)
    q = np.full(n, 1.0 / n)
    return DualState(log_q=log_q, q=q.copy(), mu=q.copy(), nu=q.copy())


def dual_state_from_q(q0: np.ndarray) -> DualState:
    q0 = np.asarray(q0, dtype=float)
    if np.any(q0 <= 0) or abs(q0.sum() - 1.0) > 1e-9:
        raise ValueError("q0 must be a strictly positive simplex point")
    q = q0 / q0.sum()
    return DualState(log_q=np.log(q), q=q, mu=q.copy(), nu=q.copy())


def phi(q: np.ndarray, ds: Dataset) -> float:
    """||Z^T q||^2 / 2."""
    v = ds.z.T @ np.asarray(q, dtype=float)
    return 0.5 * float(v @ v)


def md_step(state: DualState, ds: Dataset, theta: float = 1.0) -> DualState:
    """Multiplicative-weights step on phi; the lambda_t = 1 specialization."""
    grad = ds.z @ (ds.z.T @ state.q)  # ZZ^T q, never materializing the n x n matrix
    log_q = state.log_q - theta * grad
    q = softmax(log_q)
    return DualState(log_q=log_q, q=q, mu=q.copy(), nu=q.copy(), t=state.t + 1)


def amd_step(state: DualState, ds: Dataset, sched: Schedule) -> DualState:
    """One accelerated step: nu from (mu, q), dual-averaged q, then mu."""
    t = state.t
    lam = sched.lam(t)
    step = sched.theta(t) / (sched.rho * lam)
    nu = (1.0 - lam) * state.mu + lam * state.q
    log_q = state.log_q - step * (ds.z @ (ds.z.T @ nu))
    q = softmax(log_q)
    mu = (1.0 - lam) * state.mu + lam * q
    return DualState(log_q=log_q, q=q, mu=mu, nu=nu, t=t + 1)


def bregman_amd_step(state: DualState, ds: Dataset, sched: Schedule) -> DualState:
    """Proximal form of the accelerated step; with the entropy regularizer it
    coincides with amd_step and exists only as an equivalence check."""
    t = state.t
    lam = sched.lam(t)
    step = sched.theta(t) / (sched.rho * lam)
    nu = (1.0 - lam) * state.mu + lam * state.q
    # argmin_q <grad, q> + D(q, q_t) / step  ==  q_t * exp(-step * grad), renormalized;
    # a weight that underflowed to zero stays zero through log 0 = -inf
    with np.errstate(divide="ignore"):
        log_q = np.log(state.q) - step * (ds.z @ (ds.z.T @ nu))
    q = softmax(log_q)
    mu = (1.0 - lam) * state.mu + lam * q
    return DualState(log_q=log_q, q=q, mu=mu, nu=nu, t=t + 1)


def check_simplex(v: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.all(v >= 0) and abs(float(v.sum()) - 1.0) <= tol)
