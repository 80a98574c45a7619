"""Service logic, shared between the FastAPI routes and the in-process CLI."""

import time

import numpy as np

from ..data import DataError, Dataset, LabeledExample, build_dataset
from ..losses import bind_loss
from ..multiclass import SQRT2, MulticlassProblem, reduce_to_binary
from ..solvers import ConfigError, SolverConfig, run
from ..dual import default_schedule
from ..trace import TraceRow
from .schemas import (
    CertificateOut,
    CertifyRequest,
    CertifyResponse,
    CompareRequest,
    CompareResponse,
    DatasetIn,
    RunRequest,
    RunResponse,
    TraceRowOut,
)


def dataset_from_request(spec: DatasetIn) -> tuple[Dataset, bool]:
    """Materialize the signed matrix; multiclass inputs go through the reduction."""
    if spec.multiclass:
        xs = np.array([ex.x for ex in spec.examples], dtype=float)
        labels = np.array([ex.y for ex in spec.examples], dtype=int)
        if labels.min() < 1:
            raise DataError("multiclass labels must be >= 1")
        k = int(labels.max())
        if k < 2:
            raise DataError("multiclass data must contain at least 2 classes")
        if spec.normalize:
            scale = max(1.0, float(np.linalg.norm(xs, axis=1).max()))
            xs = xs / scale
        problem = MulticlassProblem(xs=xs, labels=labels, k=k)
        return reduce_to_binary(problem).dataset, True
    examples = [
        LabeledExample(x=np.asarray(ex.x, dtype=float), y=ex.y)
        for ex in spec.examples
    ]
    return build_dataset(examples, normalize=spec.normalize), False


def _config_from_request(req: RunRequest, ds: Dataset) -> SolverConfig:
    loss = bind_loss(req.loss, ds.n, req.rho)
    return SolverConfig(
        method=req.method,
        loss=loss,
        schedule=default_schedule(rho=loss.rho, theta=req.theta),
        steps=req.steps,
        seed=req.seed,
        momentum_enabled=req.momentum,
        gd_eta=req.gd_eta,
    )


def _row_out(row: TraceRow) -> TraceRowOut:
    return TraceRowOut(
        t=row.t,
        margin=row.margin,
        neg_psi=row.neg_psi,
        w_norm=row.w_norm,
        phi_mu=row.phi_mu,
        cert_lower=row.cert_lower,
        cert_upper=row.cert_upper,
        kernel_calls=row.kernel_calls,
    )


def handle_run(req: RunRequest) -> RunResponse:
    started = time.perf_counter()
    ds, is_multiclass = dataset_from_request(req.dataset)
    config = _config_from_request(req, ds)
    rows = run(config, ds, stride=req.stride)
    final = rows[-1]
    certificate = None
    if final.cert_lower is not None:
        certificate = CertificateOut(
            lower=final.cert_lower,
            upper=final.cert_upper,
            t=final.t,
            separable=final.cert_lower > 0.0,
        )
    return RunResponse(
        n=ds.n,
        d=ds.d,
        scale_factor=ds.scale_factor,
        method=req.method,
        rows=[_row_out(r) for r in rows],
        final_margin=final.margin,
        final_multiclass_margin=SQRT2 * final.margin if is_multiclass else None,
        certificate=certificate,
        elapsed_ms=(time.perf_counter() - started) * 1e3,
    )


def handle_certify(req: CertifyRequest) -> CertifyResponse:
    run_req = RunRequest(dataset=req.dataset, method="alg1", loss="exp", steps=req.steps)
    resp = handle_run(run_req)
    cert = resp.certificate
    message = (
        "separable" if cert.separable else "not provably separable at this horizon"
    )
    return CertifyResponse(
        lower=cert.lower,
        upper=cert.upper,
        t=cert.t,
        separable=cert.separable,
        message=message,
    )


def handle_compare(req: CompareRequest) -> CompareResponse:
    ds, _ = dataset_from_request(req.dataset)
    loss = bind_loss(req.loss, ds.n)
    margins: dict[str, list[float]] = {}
    ts: list[int] | None = None
    for method in req.methods:
        config = SolverConfig(
            method=method,
            loss=loss,
            schedule=default_schedule(rho=loss.rho, theta=req.theta),
            steps=req.steps,
            seed=req.seed,
            gd_eta=req.gd_eta,
        )
        rows = run(config, ds, stride=req.stride)
        margins[method] = [r.margin for r in rows]
        ts = [r.t for r in rows]
    warnings = []
    if all(column[-1] <= 0.0 for column in margins.values()):
        warnings.append(
            "all final margins are non-positive; the dataset may be nonseparable"
        )
    return CompareResponse(t=ts, margins=margins, warnings=warnings)


__all__ = [
    "ConfigError",
    "DataError",
    "dataset_from_request",
    "handle_certify",
    "handle_compare",
    "handle_run",
]
