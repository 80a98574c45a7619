"""Exponentially-tailed losses and the smoothed-max potential.

The potential psi(xi) = ell_inv(sum_i ell(xi_i)) is a smooth surrogate for
max_i xi_i.  Its gradient is a positive weighting of the examples: the softmax
map for the exponential loss (a point on the simplex), and a vector with
l1 norm >= 1 for the logistic loss.  Everything here is evaluated in log
space so that the weights survive scores drifting to -inf as ||w|| grows.
"""

from dataclasses import dataclass

import numpy as np

from .data import Dataset

EXPONENTIAL = "exp"
LOGISTIC = "logistic"


@dataclass(frozen=True)
class Loss:
    """Loss kind plus the l-infinity smoothness constant of its potential."""

    kind: str
    rho: float

    def __post_init__(self):
        if self.kind not in (EXPONENTIAL, LOGISTIC):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if not self.rho > 0:
            raise ValueError("rho must be positive")


def exponential_loss() -> Loss:
    return Loss(kind=EXPONENTIAL, rho=1.0)


def logistic_loss(n: int, rho: float | None = None) -> Loss:
    """Logistic loss bound to a dataset of n examples (rho defaults to n)."""
    return Loss(kind=LOGISTIC, rho=float(n) if rho is None else float(rho))


def bind_loss(kind: str, n: int, rho: float | None = None) -> Loss:
    if kind == EXPONENTIAL:
        return exponential_loss() if rho is None else Loss(EXPONENTIAL, rho)
    if kind == LOGISTIC:
        return logistic_loss(n, rho)
    raise ValueError(f"unknown loss kind {kind!r}")


def log_softmax(v: np.ndarray) -> np.ndarray:
    m = np.max(v)
    shifted = v - m
    return shifted - np.log(np.sum(np.exp(shifted)))


def softmax(v: np.ndarray) -> np.ndarray:
    e = np.exp(v - np.max(v))
    return e / e.sum()


def log_sum_exp(v: np.ndarray) -> float:
    m = float(np.max(v))
    return m + float(np.log(np.sum(np.exp(v - m))))


def _softplus(v: np.ndarray) -> np.ndarray:
    # ln(1 + e^v), stable on both tails
    return np.logaddexp(0.0, v)


def _log_sigmoid(v: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -v)


def _log_softplus(v: np.ndarray) -> np.ndarray:
    """ln(ln(1 + e^v)); below -30 the inner softplus is e^v to 5e-14 relative."""
    v = np.atleast_1d(v)
    out = np.where(v < -30.0, v, np.log(_softplus(np.maximum(v, -30.0))))
    return out


def _logistic_psi(xi: np.ndarray) -> float:
    """ln(e^S - 1) for S = sum_i ln(1 + e^{xi_i}), computed through ln S.

    Working with ln S keeps the value finite when every score is far below
    zero (there S underflows but psi ~ ln S, the log-sum-exp asymptote).
    """
    log_s = log_sum_exp(_log_softplus(xi))
    if log_s < -33.0:
        return log_s  # expm1(S)/S - 1 < 1e-14; ln S is exact at this scale
    s = float(np.exp(log_s))
    if s > 30.0:
        return s + float(np.log1p(-np.exp(-s)))
    return float(np.log(np.expm1(s)))


def psi(xi: np.ndarray, loss: Loss) -> float:
    """ell_inv(sum_i ell(xi_i)): log-sum-exp for the exponential loss."""
    xi = np.asarray(xi, dtype=float)
    if loss.kind == EXPONENTIAL:
        return log_sum_exp(xi)
    return _logistic_psi(xi)


def grad_psi(xi: np.ndarray, loss: Loss) -> np.ndarray:
    """Gradient of psi; strictly positive for finite input."""
    xi = np.asarray(xi, dtype=float)
    if loss.kind == EXPONENTIAL:
        return softmax(xi)
    # ell'(xi_i) / ell'(psi) with ell' the sigmoid, as a ratio in log space
    return np.exp(_log_sigmoid(xi) - _log_sigmoid(psi(xi, loss)))


def ell(v: np.ndarray, loss: Loss) -> np.ndarray:
    if loss.kind == EXPONENTIAL:
        return np.exp(v)
    return _softplus(v)


def ell_prime(v: np.ndarray, loss: Loss) -> np.ndarray:
    if loss.kind == EXPONENTIAL:
        return np.exp(v)
    return np.exp(_log_sigmoid(v))


def risk(w: np.ndarray, ds: Dataset, loss: Loss) -> float:
    """(1/n) sum_i ell(<w, z_i>), evaluated directly."""
    w = np.asarray(w, dtype=float)
    if w.shape != (ds.d,):
        raise ValueError(f"w has shape {w.shape}, expected ({ds.d},)")
    return float(np.mean(ell(ds.z @ w, loss)))


def grad_risk(w: np.ndarray, ds: Dataset, loss: Loss) -> np.ndarray:
    """(1/n) Z^T ell'(Z w)."""
    return ds.z.T @ ell_prime(ds.z @ w, loss) / ds.n
