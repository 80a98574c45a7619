"""Dual-only solver execution through a Gram matrix.

Weights are never materialized: w and g live as coefficient vectors over the
signed rows, the score vector s = Z w is advanced with Gram products, and
norms come from quadratic forms.  The batch momentum path needs one
matrix-vector product with the full Gram matrix per step (n^2 kernel entries,
or a single cached build); the adaptive-sampling path touches exactly one
Gram row per step, i.e. n kernel evaluations.
"""

import time
from dataclasses import dataclass

import numpy as np

from .certify import certificate_from_sq_norm
from .data import Dataset, margin_from_scores
from .dual import Schedule
from .losses import exponential_loss, psi, softmax
from .solvers import ConfigError, SolverConfig, categorical_sample, default_stride
from .trace import TraceRow

LINEAR = "linear"
RBF = "rbf"


@dataclass(frozen=True)
class Kernel:
    kind: str
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind not in (LINEAR, RBF):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == RBF and not self.bandwidth > 0:
            raise ValueError("rbf bandwidth must be positive")

    def __call__(self, a: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """k(a, r) against every row r; one call = rows.shape[0] evaluations."""
        if self.kind == LINEAR:
            return rows @ a
        sq = np.sum((rows - a) ** 2, axis=1)
        return np.exp(-sq / (2.0 * self.bandwidth**2))


def linear_kernel() -> Kernel:
    return Kernel(kind=LINEAR)


def rbf_kernel(bandwidth: float) -> Kernel:
    return Kernel(kind=RBF, bandwidth=bandwidth)


def gram(ds: Dataset, kernel: Kernel) -> np.ndarray:
    """Full n x n Gram matrix G[i, j] = k(z_i, z_j)."""
    return GramOracle(ds, kernel).full()


class GramOracle:
    """Kernel access with an evaluation counter; rows can be fetched uncached."""

    def __init__(self, ds: Dataset, kernel: Kernel):
        self.rows = ds.z
        self.kernel = kernel
        self.calls = 0
        self._gram = None

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def full(self) -> np.ndarray:
        if self._gram is None:
            self.calls += self.n * self.n
            if self.kernel.kind == LINEAR:
                self._gram = self.rows @ self.rows.T
            else:
                self._gram = np.vstack(
                    [self.kernel(r, self.rows) for r in self.rows]
                )
        return self._gram

    def row(self, i: int) -> np.ndarray:
        self.calls += self.n
        return self.kernel(self.rows[i], self.rows)


@dataclass
class DualRunState:
    """Scores s = Z w plus representer coefficients for w and g.

    The cached vector v = G alpha_g lets every step get by with a single
    fresh Gram product, and supplies ||g||^2 = alpha_g . v for certificates;
    ||w||^2 = alpha_w . s the same way.
    """

    s: np.ndarray
    alpha_w: np.ndarray
    alpha_g: np.ndarray
    v: np.ndarray
    q: np.ndarray
    t: int = 0


def init_dual_run_state(n: int) -> DualRunState:
    return DualRunState(
        s=np.zeros(n),
        alpha_w=np.zeros(n),
        alpha_g=np.zeros(n),
        v=np.zeros(n),
        q=np.full(n, 1.0 / n),
    )


def kernel_momentum_step(
    state: DualRunState, G: np.ndarray, sched: Schedule
) -> DualRunState:
    """Batch momentum step entirely in the dual: one product with G."""
    t = state.t
    beta, theta = sched.beta(t), sched.theta(t)
    gq = G @ state.q
    alpha_g = beta * (state.alpha_g + state.q)
    v = beta * (state.v + gq)
    alpha_w = state.alpha_w - theta * (alpha_g + state.q)
    s = state.s - theta * (v + gq)
    return DualRunState(
        s=s, alpha_w=alpha_w, alpha_g=alpha_g, v=v, q=softmax(s), t=t + 1
    )


def kernel_sampling_step(
    state: DualRunState,
    oracle: GramOracle,
    sched: Schedule,
    rng: np.random.Generator,
    momentum_enabled: bool = True,
) -> DualRunState:
    """Adaptive-sampling step touching exactly one Gram row."""
    t = state.t
    beta = sched.beta(t) if momentum_enabled else 0.0
    theta = sched.theta(t)
    i = categorical_sample(state.q, rng)
    gi = oracle.row(i)
    alpha_g = beta * (state.alpha_g + _unit(state.alpha_g.shape[0], i))
    v = beta * (state.v + gi)
    alpha_w = state.alpha_w - theta * alpha_g
    alpha_w[i] -= theta
    s = state.s - theta * (v + gi)
    return DualRunState(
        s=s, alpha_w=alpha_w, alpha_g=alpha_g, v=v, q=softmax(s), t=t + 1
    )


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _record_kernel(state: DualRunState, config: SolverConfig, n: int,
                   calls: int, started_ns: int, G: np.ndarray | None = None) -> TraceRow:
    w_sq = max(float(state.alpha_w @ state.s), 0.0)
    w_norm = float(np.sqrt(w_sq))
    cert_lower = cert_upper = None
    if config.method == "alg1" and state.t >= 1 and G is not None:
        # ||g_t||^2 with g_t = beta_t (g_{t-1} + Z^T q_t), via Gram quadratic forms
        beta = config.schedule.beta(state.t)
        gq = G @ state.q
        g_sq = beta * beta * float(
            state.alpha_g @ state.v + 2.0 * (state.q @ state.v) + state.q @ gq
        )
        cert = certificate_from_sq_norm(max(g_sq, 0.0), state.t, n)
        cert_lower, cert_upper = cert.lower, cert.upper
    return TraceRow(
        t=state.t,
        margin=margin_from_scores(state.s, w_norm),
        neg_psi=-psi(state.s, exponential_loss()),
        w_norm=w_norm,
        cert_lower=cert_lower,
        cert_upper=cert_upper,
        kernel_calls=calls,
        wall_ns=time.perf_counter_ns() - started_ns,
    )


def run_kernel(
    config: SolverConfig,
    ds: Dataset,
    kernel: Kernel,
    stride: int | None = None,
) -> list[TraceRow]:
    """Dual-only run; supports the alg1 (cached Gram) and alg2 (row oracle) paths."""
    if config.method not in ("alg1", "alg2"):
        raise ConfigError(f"kernel execution supports alg1/alg2, not {config.method!r}")
    if config.loss.kind != "exp":
        raise ConfigError("kernel execution requires the exponential loss")
    if stride is None:
        stride = default_stride(config.steps)
    oracle = GramOracle(ds, kernel)
    sched = config.schedule
    state = init_dual_run_state(ds.n)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    G = oracle.full() if config.method == "alg1" else None
    started = time.perf_counter_ns()
    rows = [_record_kernel(state, config, ds.n, oracle.calls, started, G)]
    for t in range(config.steps):
        if config.method == "alg1":
            state = kernel_momentum_step(state, G, sched)
        else:
            state = kernel_sampling_step(
                state, oracle, sched, rng, config.momentum_enabled
            )
        if (t + 1) % stride == 0 or t + 1 == config.steps:
            rows.append(_record_kernel(state, config, ds.n, oracle.calls, started, G))
    return rows
