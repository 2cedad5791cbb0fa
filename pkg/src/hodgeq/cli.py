"""Thin command-line client for the hodgeq service.

Each subcommand builds one JSON request and sends it to the FastAPI app,
in-process by default or to a remote --server URL; the response table is
rendered as markdown, CSV, or JSON.  Exit codes: 0 success, 2 validation
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .goettsche import SURFACE_ALIASES
from .render import TableOutput


def parse_n_list(text: str) -> list[int]:
    """Accept "1..5" ranges and "10,20,40" lists."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def parse_surface(text: str) -> dict:
    key = text.strip()
    if key.lower() in SURFACE_ALIASES:
        return {"alias": key.lower()}
    if os.path.exists(key):
        with open(key) as fh:
            data = json.load(fh)
        out = {"h10": data["h10"], "h20": data["h20"], "h11": data["h11"]}
        if "name" in data:
            out["name"] = data["name"]
        return out
    raise argparse.ArgumentTypeError(
        f"unknown surface {text!r}: use one of {sorted(SURFACE_ALIASES)} or a JSON path")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=None,
                        help="working precision (defaults: 192; 256 for maass-trace)")
    common.add_argument("--format", choices=("md", "csv", "json"), default="md")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--surface", type=parse_surface, default={"alias": "cp2"},
                        help="surface alias (cp2, k3, abelian, enriques) or JSON path")
    common.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")

    parser = argparse.ArgumentParser(prog="hodgeq",
                                     description="partition numbers and Hilbert-scheme "
                                                 "Hodge numbers, exact and analytic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", parents=[common], help="p(n) table by two exact routes")
    p.add_argument("--table", required=True, help="n values, e.g. 10,20,40,80")
    p.add_argument("--method", choices=("recurrence", "euler", "both"), default="both")

    p = sub.add_parser("rademacher", parents=[common],
                       help="circle-method partial sum for p(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-max", type=int, default=None)

    sub.add_parser("p-near-roots", parents=[common],
                   help="|P(q)| near roots of unity")

    p = sub.add_parser("goettsche", parents=[common],
                       help="Hodge numbers of Hilbert schemes")
    p.add_argument("--n", type=int, required=True, help="largest order")

    p = sub.add_parser("xi-exact", parents=[common],
                       help="truncated exact formula for specialized coefficients")
    p.add_argument("--r1", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--r2", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--n", required=True, help="orders, e.g. 1..5")
    p.add_argument("--trace", action="store_true", help="emit per-(class,j,k) terms")

    p = sub.add_parser("gamma", parents=[common],
                       help="exact residue-restricted signed Hodge sums")
    p.add_argument("--r1", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--r2", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--n", required=True)

    p = sub.add_parser("theta", parents=[common], help="residue-class proportions")
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--n", required=True)

    p = sub.add_parser("classify", parents=[common], help="equidistribution verdict")
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)

    p = sub.add_parser("maass-trace", parents=[common],
                       help="p(n) from singular moduli of the weak Maass form")
    p.add_argument("--n", type=int, required=True)

    return parser


def _request_body(args) -> tuple[str, dict]:
    cmd = args.command
    if cmd == "partition":
        return "/v1/partition", {"n_values": parse_n_list(args.table),
                                 "method": args.method}
    if cmd == "rademacher":
        body = {"n": args.n}
        if args.k_max is not None:
            body["k_max"] = args.k_max
        if args.precision_bits is not None:
            body["precision_bits"] = args.precision_bits
        return "/v1/rademacher", body
    if cmd == "p-near-roots":
        return "/v1/p-near-roots", {"precision_bits": args.precision_bits or 192}
    if cmd == "goettsche":
        return "/v1/goettsche", {"surface": args.surface, "n_max": args.n}
    if cmd == "xi-exact":
        body = {"surface": args.surface, "r1": args.r1, "l1": args.l1,
                "r2": args.r2, "l2": args.l2, "cutoff": args.cutoff,
                "n_values": parse_n_list(args.n), "threads": args.threads,
                "trace": args.trace}
        if args.precision_bits is not None:
            body["precision_bits"] = args.precision_bits
        return "/v1/xi-exact", body
    if cmd == "gamma":
        return "/v1/gamma", {"surface": args.surface, "r1": args.r1, "l1": args.l1,
                             "r2": args.r2, "l2": args.l2,
                             "n_values": parse_n_list(args.n)}
    if cmd == "theta":
        return "/v1/theta", {"surface": args.surface, "l1": args.l1, "l2": args.l2,
                             "n_values": parse_n_list(args.n)}
    if cmd == "classify":
        return "/v1/classify", {"surface": args.surface, "l1": args.l1, "l2": args.l2}
    if cmd == "maass-trace":
        body = {"n": args.n}
        if args.precision_bits is not None:
            body["precision_bits"] = args.precision_bits
        return "/v1/maass-trace", body
    raise AssertionError(cmd)


def _open_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=3600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        path, body = _request_body(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    with _open_client(args.server) as client:
        resp = client.post(path, json=body)
    if resp.status_code == 200:
        table = TableOutput.from_payload(resp.json())
        print(table.render(args.format, command=args.command))
        return 0
    try:
        doc = resp.json()
    except json.JSONDecodeError:
        doc = {}
    err = doc.get("error")
    if err is None:
        # pydantic request validation produces a structured 'detail' list
        message = json.dumps(doc.get("detail", doc))
        kind = "validation" if resp.status_code in (400, 422) else "numeric"
    else:
        message, kind = err.get("message", ""), err.get("type", "numeric")
    print(f"error ({kind}): {message}", file=sys.stderr)
    return 2 if kind == "validation" else 3


if __name__ == "__main__":
    sys.exit(main())
