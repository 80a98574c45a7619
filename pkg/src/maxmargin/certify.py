"""Margin certificates and an independent maximum-margin oracle.

The momentum method's accumulator g_t yields a computable bracket around the
squared maximum margin.  The oracle solves the dual min-norm problem
min_{q in simplex} ||Z^T q|| with away-step Frank-Wolfe, a method independent
of everything under test, whose duality gap certifies its own accuracy.
"""

from dataclasses import dataclass

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class CertificateInterval:
    """Bracket [lower, upper] around the squared maximum margin at step t."""

    lower: float
    upper: float
    t: int

    @property
    def separable(self) -> bool:
        return self.lower > 0.0

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class OracleResult:
    gamma: float
    u_bar: np.ndarray | None
    q_bar: np.ndarray
    gap: float
    iterations: int


class OracleError(RuntimeError):
    def __init__(self, message: str, gap: float):
        super().__init__(f"{message} (achieved gap {gap:.3e})")
        self.gap = gap


def margin_certificate(g: np.ndarray, t: int, n: int) -> CertificateInterval:
    """Interval containing gamma_bar^2, valid for the momentum run's g_t.

    upper = 4 ||g_t||^2 / t^2 and lower = upper - 8 ln(n) / (t+1)^2, clamped
    at zero since the squared margin cannot be negative.
    """
    return certificate_from_sq_norm(float(g @ g), t, n)


def certificate_from_sq_norm(g_sq_norm: float, t: int, n: int) -> CertificateInterval:
    """Same bracket from ||g_t||^2 directly; kernel runs supply a Gram quadratic form."""
    if t < 1:
        raise ValueError("certificate requires t >= 1")
    upper = 4.0 * float(g_sq_norm) / t**2
    lower = max(0.0, upper - 8.0 * float(np.log(n)) / (t + 1) ** 2)
    return CertificateInterval(lower=lower, upper=upper, t=t)


def max_margin_oracle(
    ds: Dataset,
    tol: float = 1e-6,
    max_iter: int = 200_000,
) -> OracleResult:
    """Minimize ||Z^T q||^2 / 2 over the simplex by away-step Frank-Wolfe.

    Stops once the Frank-Wolfe duality gap drops below tol^2.  Exact line
    search on the quadratic keeps the method parameter-free; away steps give
    the linear tail convergence needed to reach tight gaps.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    Z = ds.z
    n = ds.n
    q = np.full(n, 1.0 / n)
    v = Z.T @ q  # Z^T q, maintained incrementally
    gap = np.inf
    for it in range(max_iter):
        if it % 512 == 0:
            v = Z.T @ q  # shed incremental drift
        grad = Z @ v
        s = int(np.argmin(grad))
        gap = float(q @ grad - grad[s])
        if gap <= tol * tol:
            return _finish(Z, q, tol, gap, it)
        support = np.flatnonzero(q > 0)
        a = int(support[np.argmax(grad[support])])
        away_gap = float(grad[a] - q @ grad)
        if gap >= away_gap or q[a] >= 1.0:
            # toward vertex s
            direction_v = Z[s] - v
            step_max = 1.0
            denom = float(direction_v @ direction_v)
            numer = -(float(grad[s]) - float(q @ grad))  # -<grad, e_s - q>
            if denom <= 0:
                return _finish(Z, q, tol, gap, it)
            step = min(step_max, numer / denom)
            q *= 1.0 - step
            q[s] += step
            v += step * direction_v
        else:
            # away from vertex a
            direction_v = v - Z[a]
            denom = float(direction_v @ direction_v)
            numer = float(grad[a]) - float(q @ grad)
            step_max = q[a] / (1.0 - q[a])
            if denom <= 0:
                return _finish(Z, q, tol, gap, it)
            step = min(step_max, numer / denom)
            q *= 1.0 + step
            q[a] -= step
            if step == step_max:
                q[a] = 0.0
            v += step * direction_v
        np.maximum(q, 0.0, out=q)
        q /= q.sum()
    raise OracleError(f"no convergence within {max_iter} iterations", gap)


def _finish(Z, q, tol, gap, iterations) -> OracleResult:
    v = Z.T @ q
    gamma = float(np.linalg.norm(v))
    u_bar = -v / gamma if gamma > tol else None
    return OracleResult(gamma=gamma, u_bar=u_bar, q_bar=q, gap=gap, iterations=iterations)
