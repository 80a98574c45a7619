"""Primal iterations for margin maximization.

Five methods share one state record and trace format:

* ``alg1`` -- the batch momentum method.  With beta_t = t/(t+1) and
  theta_t = 1 its iterates coincide with Nesterov acceleration applied to the
  entropy-geometry dual, which is what buys the ~1/t^2 margin rate and the
  squared-margin certificate.
* ``alg2`` -- the adaptive-sampling variant: one example per step, drawn from
  the dual weights q_t, with optional momentum (heuristic) or the theory
  schedule (momentum off, constant small step).
* ``gd`` / ``ngd`` -- plain and normalized gradient descent baselines.
* ``batch_perceptron`` -- supergradient ascent on the hard-margin objective,
  step 1/sqrt(t+1), lowest-index tie-breaking.

``dual_nesterov_primal`` reconstructs the primal from an explicit run of the
accelerated dual engine and exists to cross-validate ``alg1``.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .certify import margin_certificate
from .data import Dataset, margin_from_scores
from .dual import DualState, Schedule, default_schedule, uniform_dual_state
from .losses import EXPONENTIAL, LOGISTIC, Loss, ell_prime, grad_psi, psi, softmax
from .trace import TraceRow

METHODS = (
    "alg1",
    "alg2",
    "gd",
    "ngd",
    "batch_perceptron",
    "dual_nesterov_primal",
)


class ConfigError(ValueError):
    """Raised for invalid solver configurations."""


@dataclass
class PrimalState:
    w: np.ndarray
    g: np.ndarray
    t: int
    scores: np.ndarray  # Z w_t, the log-space representation of the dual weights
    q: np.ndarray       # grad_psi(Z w_t)
    dual: DualState | None = None


@dataclass(frozen=True)
class SolverConfig:
    method: str
    loss: Loss
    schedule: Schedule
    steps: int
    seed: int = 0
    momentum_enabled: bool = True  # alg2 only; theory mode disables it
    gd_eta: float = 1.0            # gd only

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.method == "alg2" and self.loss.kind != EXPONENTIAL:
            raise ConfigError(
                f"unsupported combination: method=alg2 with loss={self.loss.kind}"
            )


def make_config(
    method: str,
    loss: Loss,
    steps: int,
    seed: int = 0,
    theta: float = 1.0,
    momentum_enabled: bool = True,
    gd_eta: float = 1.0,
) -> SolverConfig:
    """Config with the default lambda_t = 2/(t+2) schedule and constant theta."""
    sched = default_schedule(rho=loss.rho, theta=theta)
    return SolverConfig(
        method=method,
        loss=loss,
        schedule=sched,
        steps=steps,
        seed=seed,
        momentum_enabled=momentum_enabled,
        gd_eta=gd_eta,
    )


def init_primal_state(ds: Dataset, loss: Loss, with_dual: bool = False) -> PrimalState:
    scores = np.zeros(ds.n)
    return PrimalState(
        w=np.zeros(ds.d),
        g=np.zeros(ds.d),
        t=0,
        scores=scores,
        q=grad_psi(scores, loss),
        dual=uniform_dual_state(ds.n) if with_dual else None,
    )


def _refresh(state: PrimalState, w: np.ndarray, g: np.ndarray, ds: Dataset, loss: Loss,
             dual: DualState | None = None) -> PrimalState:
    scores = ds.z @ w
    return PrimalState(
        w=w, g=g, t=state.t + 1, scores=scores, q=grad_psi(scores, loss), dual=dual
    )


def momentum_step(state: PrimalState, ds: Dataset, sched: Schedule, loss: Loss) -> PrimalState:
    """g_t = beta_t (g_{t-1} + Z^T q_t);  w_{t+1} = w_t - (theta_t/rho)(g_t + Z^T q_t)."""
    t = state.t
    ztq = ds.z.T @ state.q
    g = sched.beta(t) * (state.g + ztq)
    w = state.w - (sched.theta(t) / sched.rho) * (g + ztq)
    return _refresh(state, w, g, ds, loss)


def dual_nesterov_primal_step(
    state: PrimalState, ds: Dataset, sched: Schedule, loss: Loss
) -> PrimalState:
    """Advance the accelerated dual and set w_{t+1} = w_t - (theta/(rho lambda)) Z^T nu_t.

    The dual potential is accumulated independently of w, so comparing its
    weights against grad_psi(Z w_t) is a real consistency check, not a
    tautology.
    """
    dual = state.dual
    if dual is None:
        raise ConfigError("dual_nesterov_primal requires a state carrying a dual")
    t = state.t
    lam = sched.lam(t)
    step = sched.theta(t) / (sched.rho * lam)
    nu = (1.0 - lam) * dual.mu + lam * dual.q
    ztnu = ds.z.T @ nu
    w = state.w - step * ztnu
    log_q = dual.log_q - step * (ds.z @ ztnu)
    q = grad_psi(log_q, loss)
    mu = (1.0 - lam) * dual.mu + lam * q
    new_dual = DualState(log_q=log_q, q=q, mu=mu, nu=nu, t=t + 1)
    return _refresh(state, w, state.g, ds, loss, dual=new_dual)


def categorical_sample(q: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw over the exact renormalized weights."""
    p = q / q.sum()
    cdf = np.cumsum(p)
    i = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(i, q.shape[0] - 1)


def adaptive_sampling_step(
    state: PrimalState,
    ds: Dataset,
    sched: Schedule,
    loss: Loss,
    rng: np.random.Generator,
    momentum_enabled: bool = True,
) -> PrimalState:
    """Replace the batch pull Z^T q_t by a single row drawn from q_t."""
    t = state.t
    i = categorical_sample(state.q, rng)
    zi = ds.z[i]
    beta = sched.beta(t) if momentum_enabled else 0.0
    g = beta * (state.g + zi)
    w = state.w - sched.theta(t) * (g + zi)
    return _refresh(state, w, g, ds, loss)


def gd_step(state: PrimalState, ds: Dataset, loss: Loss, eta: float) -> PrimalState:
    """w_{t+1} = w_t - eta * grad R(w_t)."""
    grad = ds.z.T @ ell_prime(state.scores, loss) / ds.n
    w = state.w - eta * grad
    return _refresh(state, w, state.g, ds, loss)


def ngd_step(state: PrimalState, ds: Dataset, loss: Loss, theta: float = 1.0) -> PrimalState:
    """w_{t+1} = w_t - theta * Z^T grad_psi(Z w_t); the risk-normalized step."""
    w = state.w - theta * (ds.z.T @ state.q)
    return _refresh(state, w, state.g, ds, loss)


def batch_perceptron_step(state: PrimalState, ds: Dataset, loss: Loss) -> PrimalState:
    """Supergradient ascent on the hard-margin objective, step 1/sqrt(t+1).

    The worst example is argmin_i <w, -z_i>, i.e. the largest score; ties go
    to the lowest index.  The iterate is left unnormalized since margin reads
    are scale-invariant.
    """
    i = int(np.argmax(state.scores))
    w = state.w - ds.z[i] / np.sqrt(state.t + 1)
    return _refresh(state, w, state.g, ds, loss)


def momentum_g(state: PrimalState, ds: Dataset, sched: Schedule) -> np.ndarray:
    """g_t for the state holding (w_t, q_t, g_{t-1}): beta_t (g_{t-1} + Z^T q_t).

    The stepping loop stores the accumulator it used to reach w_t, which is
    g_{t-1}; the certificate and the mu-identity are stated in terms of g_t.
    """
    return sched.beta(state.t) * (state.g + ds.z.T @ state.q)


def _phi_mu(state: PrimalState, ds: Dataset, sched: Schedule, method: str) -> float | None:
    """phi(mu_t) for accelerated runs; recovered from the momentum form via
    Z^T mu_t = lambda_{t-1} (g_{t-1} + Z^T q_t)."""
    if method == "dual_nesterov_primal":
        v = ds.z.T @ state.dual.mu
        return 0.5 * float(v @ v)
    if method != "alg1":
        return None
    t = state.t
    if t == 0:
        v = ds.z.T @ state.q
        return 0.5 * float(v @ v)
    v = sched.lam(t - 1) * (state.g + ds.z.T @ state.q)
    return 0.5 * float(v @ v)


def _record(
    state: PrimalState,
    ds: Dataset,
    config: SolverConfig,
    started_ns: int,
) -> TraceRow:
    w_norm = float(np.linalg.norm(state.w))
    cert_lower = cert_upper = None
    if config.method == "alg1" and config.loss.kind == EXPONENTIAL and state.t >= 1:
        cert = margin_certificate(momentum_g(state, ds, config.schedule), state.t, ds.n)
        cert_lower, cert_upper = cert.lower, cert.upper
    return TraceRow(
        t=state.t,
        margin=margin_from_scores(state.scores, w_norm),
        neg_psi=-psi(state.scores, config.loss),
        w_norm=w_norm,
        phi_mu=_phi_mu(state, ds, config.schedule, config.method),
        cert_lower=cert_lower,
        cert_upper=cert_upper,
        wall_ns=time.perf_counter_ns() - started_ns,
    )


def default_stride(steps: int) -> int:
    return 1 if steps < 10_000 else 10


def run(config: SolverConfig, ds: Dataset, stride: int | None = None) -> list[TraceRow]:
    """Execute the configured method, recording diagnostics every ``stride`` steps.

    The trace always contains the initial state (t = 0) and the final iterate;
    given the same config (seed included) the output is deterministic.
    """
    if stride is None:
        stride = default_stride(config.steps)
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    method, loss, sched = config.method, config.loss, config.schedule
    state = init_primal_state(ds, loss, with_dual=method == "dual_nesterov_primal")
    rng = None
    if method == "alg2":
        rng = np.random.Generator(np.random.PCG64(config.seed))
    started = time.perf_counter_ns()
    rows = [_record(state, ds, config, started)]
    for t in range(config.steps):
        if method == "alg1":
            state = momentum_step(state, ds, sched, loss)
        elif method == "alg2":
            state = adaptive_sampling_step(
                state, ds, sched, loss, rng, config.momentum_enabled
            )
        elif method == "gd":
            state = gd_step(state, ds, loss, config.gd_eta)
        elif method == "ngd":
            state = ngd_step(state, ds, loss, sched.theta(t))
        elif method == "batch_perceptron":
            state = batch_perceptron_step(state, ds, loss)
        else:
            state = dual_nesterov_primal_step(state, ds, sched, loss)
        if (t + 1) % stride == 0 or t + 1 == config.steps:
            rows.append(_record(state, ds, config, started))
    return rows
