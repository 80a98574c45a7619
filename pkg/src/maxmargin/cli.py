"""Command-line client for the solver service.

Every subcommand builds the same request models the HTTP API accepts and, by
default, executes them in process; pass --server to send them to a running
instance instead.  Exit codes: 0 success, 2 configuration error, 3 data error.
"""

import argparse
import sys

import pydantic

from .data import DataError, load_dense_csv, load_sparse_text
from .idx import convert_idx_to_sparse
from .service import handlers
from .service.schemas import (
    CertifyRequest,
    CertifyResponse,
    CompareRequest,
    CompareResponse,
    DatasetIn,
    ExampleIn,
    RunRequest,
    RunResponse,
)
from .solvers import ConfigError
from .trace import TraceRow, write_margin_table, write_trace_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxmargin",
        description="Margin maximization for linear classifiers: momentum, "
        "adaptive sampling, baselines, and separability certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one method and write a trace CSV")
    _add_data_args(run_p)
    _add_server_arg(run_p)
    run_p.add_argument("--method", default="alg1")
    run_p.add_argument("--loss", default="exp")
    run_p.add_argument("--steps", type=int, default=100)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--stride", type=int, default=None)
    run_p.add_argument("--theta", type=float, default=1.0)
    run_p.add_argument("--gd-eta", type=float, default=1.0)
    run_p.add_argument("--rho", type=float, default=None)
    run_p.add_argument("--no-momentum", action="store_true",
                       help="disable momentum (alg2 theory mode)")
    run_p.add_argument("--out", required=True, help="trace CSV path")
    run_p.set_defaults(handler=cmd_run)

    cmp_p = sub.add_parser("compare", help="run several methods on one dataset")
    _add_data_args(cmp_p)
    _add_server_arg(cmp_p)
    cmp_p.add_argument("--methods", required=True,
                       help="comma-separated, e.g. gd,ngd,alg1,batch_perceptron")
    cmp_p.add_argument("--loss", default="exp")
    cmp_p.add_argument("--steps", type=int, default=100)
    cmp_p.add_argument("--seed", type=int, default=0)
    cmp_p.add_argument("--stride", type=int, default=None)
    cmp_p.add_argument("--theta", type=float, default=1.0)
    cmp_p.add_argument("--gd-eta", type=float, default=1.0)
    cmp_p.add_argument("--out", required=True, help="wide CSV path")
    cmp_p.set_defaults(handler=cmd_compare)

    cert_p = sub.add_parser("certify", help="bracket the squared maximum margin")
    _add_data_args(cert_p)
    _add_server_arg(cert_p)
    cert_p.add_argument("--steps", type=int, default=200)
    cert_p.set_defaults(handler=cmd_certify)

    idx_p = sub.add_parser("convert-idx", help="convert IDX image/label files "
                            "to the sparse text format")
    idx_p.add_argument("--images", required=True)
    idx_p.add_argument("--labels", required=True)
    idx_p.add_argument("--out", required=True)
    idx_p.add_argument("--digits", default=None,
                       help="two comma-separated digits mapped to +1/-1; "
                       "omit for multiclass labels")
    idx_p.set_defaults(handler=cmd_convert_idx)

    serve_p = sub.add_parser("serve", help="launch the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(handler=cmd_serve)

    return parser


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset path")
    p.add_argument("--format", choices=("sparse", "csv"), default="sparse")
    p.add_argument("--multiclass", action="store_true",
                   help="labels are 1..k; the problem is reduced to binary")
    p.add_argument("--no-normalize", action="store_true",
                   help="reject inputs with norm above 1 instead of rescaling")


def _add_server_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", default=None,
                   help="base URL of a running service; default runs in process")


def _load_dataset(args) -> DatasetIn:
    loader = load_sparse_text if args.format == "sparse" else load_dense_csv
    examples = loader(args.data, multiclass=args.multiclass)
    return DatasetIn(
        examples=[ExampleIn(x=ex.x.tolist(), y=int(ex.y)) for ex in examples],
        normalize=not args.no_normalize,
        multiclass=args.multiclass,
    )


def _dispatch(server: str | None, route: str, request, local_handler, response_model):
    if server is None:
        return local_handler(request)
    import httpx

    resp = httpx.post(
        server.rstrip("/") + route, json=request.model_dump(), timeout=600.0
    )
    if resp.status_code == 422:
        raise ConfigError(_detail(resp))
    if resp.status_code == 400:
        raise DataError(_detail(resp))
    resp.raise_for_status()
    return response_model.model_validate(resp.json())


def _detail(resp) -> str:
    try:
        return str(resp.json().get("detail"))
    except Exception:
        return resp.text


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def cmd_run(args) -> int:
    request = RunRequest(
        dataset=_load_dataset(args),
        method=args.method,
        loss=args.loss,
        steps=args.steps,
        seed=args.seed,
        stride=args.stride,
        theta=args.theta,
        momentum=not args.no_momentum,
        gd_eta=args.gd_eta,
        rho=args.rho,
    )
    resp: RunResponse = _dispatch(
        args.server, "/run", request, handlers.handle_run, RunResponse
    )
    rows = [TraceRow(**r.model_dump()) for r in resp.rows]
    write_trace_csv(rows, args.out)
    print(f"method={resp.method} n={resp.n} d={resp.d} steps={args.steps}")
    print(f"final margin: {_fmt(resp.final_margin)}")
    if resp.final_multiclass_margin is not None:
        print(f"final multiclass margin: {_fmt(resp.final_multiclass_margin)}")
    if resp.certificate is not None:
        cert = resp.certificate
        print(f"gamma^2 in [{_fmt(cert.lower)}, {_fmt(cert.upper)}]")
    return 0


def cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    request = CompareRequest(
        dataset=_load_dataset(args),
        methods=methods,
        loss=args.loss,
        steps=args.steps,
        seed=args.seed,
        stride=args.stride,
        theta=args.theta,
        gd_eta=args.gd_eta,
    )
    resp: CompareResponse = _dispatch(
        args.server, "/compare", request, handlers.handle_compare, CompareResponse
    )
    write_margin_table(resp.t, resp.margins, args.out)
    for warning in resp.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for method in methods:
        print(f"final margin {method}: {_fmt(resp.margins[method][-1])}")
    return 0


def cmd_certify(args) -> int:
    request = CertifyRequest(dataset=_load_dataset(args), steps=args.steps)
    resp: CertifyResponse = _dispatch(
        args.server, "/certify", request, handlers.handle_certify, CertifyResponse
    )
    print(f"gamma^2 in [{_fmt(resp.lower)}, {_fmt(resp.upper)}] after t={resp.t}")
    print(resp.message)
    return 0


def cmd_convert_idx(args) -> int:
    digits = None
    if args.digits is not None:
        parts = args.digits.split(",")
        if len(parts) != 2:
            raise ConfigError("--digits needs exactly two comma-separated digits")
        digits = (int(parts[0]), int(parts[1]))
    written = convert_idx_to_sparse(args.images, args.labels, args.out, digits=digits)
    print(f"wrote {written} examples to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except pydantic.ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        print(f"error: invalid {loc}: {first['msg']}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
