"""Request/response models for the solver service.

The CLI builds these same models and either executes them in process or posts
them to a running server, so the wire format is the single source of truth
for what a run looks like.
"""

from typing import Literal

from pydantic import BaseModel, Field

Method = Literal["alg1", "alg2", "gd", "ngd", "batch_perceptron", "dual_nesterov_primal"]
LossName = Literal["exp", "logistic"]


class ExampleIn(BaseModel):
    x: list[float]
    y: int


class DatasetIn(BaseModel):
    examples: list[ExampleIn] = Field(min_length=1)
    normalize: bool = True
    multiclass: bool = False


class RunRequest(BaseModel):
    dataset: DatasetIn
    method: Method = "alg1"
    loss: LossName = "exp"
    steps: int = Field(default=100, ge=1)
    seed: int = 0
    stride: int | None = Field(default=None, ge=1)
    theta: float = Field(default=1.0, gt=0.0, le=1.0)
    momentum: bool = True
    gd_eta: float = Field(default=1.0, gt=0.0)
    rho: float | None = Field(default=None, gt=0.0)


class TraceRowOut(BaseModel):
    t: int
    margin: float
    neg_psi: float
    w_norm: float
    phi_mu: float | None = None
    cert_lower: float | None = None
    cert_upper: float | None = None
    kernel_calls: int | None = None


class CertificateOut(BaseModel):
    lower: float
    upper: float
    t: int
    separable: bool


class RunResponse(BaseModel):
    n: int
    d: int
    scale_factor: float
    method: Method
    rows: list[TraceRowOut]
    final_margin: float
    final_multiclass_margin: float | None = None
    certificate: CertificateOut | None = None
    elapsed_ms: float


class CertifyRequest(BaseModel):
    dataset: DatasetIn
    steps: int = Field(default=200, ge=1)


class CertifyResponse(BaseModel):
    lower: float
    upper: float
    t: int
    separable: bool
    message: str


class CompareRequest(BaseModel):
    dataset: DatasetIn
    methods: list[Method] = Field(min_length=1)
    loss: LossName = "exp"
    steps: int = Field(default=100, ge=1)
    seed: int = 0
    stride: int | None = Field(default=None, ge=1)
    theta: float = Field(default=1.0, gt=0.0, le=1.0)
    gd_eta: float = Field(default=1.0, gt=0.0)


class CompareResponse(BaseModel):
    t: list[int]
    margins: dict[str, list[float]]
    warnings: list[str] = []


class HealthResponse(BaseModel):
    status: str
    version: str
