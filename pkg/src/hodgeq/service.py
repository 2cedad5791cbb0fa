"""FastAPI service exposing the library over JSON endpoints.

Every endpoint accepts a POST body and returns a table-shaped payload
(caption/columns/rows/meta) that the CLI renders client-side.  Validation
problems map to HTTP 422, numeric failures (precision, convergence,
admissibility) to HTTP 409.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from mpmath import mp
from pydantic import BaseModel, Field, model_validator

from . import equidist, exact_formula, goettsche, maass, partitions
from .errors import (ConvergenceFailure, HodgeqError, InsufficientPrecision,
                     NonpositiveCuspWeight, TruncationExceeded, ZeroDenominator)
from .render import TableOutput, sci_str, truncate_decimal

NUMERIC_ERRORS = (InsufficientPrecision, ConvergenceFailure, NonpositiveCuspWeight,
                  ZeroDenominator, TruncationExceeded)

app = FastAPI(title="hodgeq", version="0.1.0",
              description="Partition numbers and Hilbert-scheme Hodge numbers "
                          "by exact series and circle-method formulas")


class SurfaceDescriptor(BaseModel):
    """A surface: either a built-in alias or the defining Hodge triple."""

    alias: Optional[str] = None
    h10: Optional[int] = Field(None, ge=0)
    h20: Optional[int] = Field(None, ge=0)
    h11: Optional[int] = Field(None, ge=0)
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check(self):
        if self.alias is None and None in (self.h10, self.h20, self.h11):
            raise ValueError("provide either alias or all of h10, h20, h11")
        return self

    def resolve(self) -> goettsche.HodgeDiamond:
        if self.alias is not None:
            return goettsche.surface(self.alias)
        return goettsche.HodgeDiamond(self.h10, self.h20, self.h11, name=self.name)


def surface_meta(S: goettsche.HodgeDiamond) -> dict:
    return {"surface": S.name or f"({S.h10},{S.h20},{S.h11})",
            "h10": S.h10, "h20": S.h20, "h11": S.h11,
            "chi": S.chi, "sigma": S.sigma}


class PartitionRequest(BaseModel):
    n_values: list[int] = Field(..., min_length=1)
    method: Literal["recurrence", "euler", "both"] = "both"


class RademacherRequest(BaseModel):
    n: int = Field(..., ge=1)
    k_max: Optional[int] = Field(None, ge=1)
    precision_bits: Optional[int] = None


class NearRootsRequest(BaseModel):
    precision_bits: int = Field(192, ge=53)


class GoettscheRequest(BaseModel):
    surface: SurfaceDescriptor
    n_max: int = Field(..., ge=0, le=60)


class XiExactRequest(BaseModel):
    surface: SurfaceDescriptor
    r1: int
    l1: int = Field(..., ge=1)
    r2: int
    l2: int = Field(..., ge=1)
    cutoff: int = Field(..., ge=1, le=2000)
    n_values: list[int] = Field(..., min_length=1)
    precision_bits: int = Field(192, ge=53)
    threads: int = Field(1, ge=1, le=64)
    trace: bool = False
    compare_exact: bool = True


class GammaRequest(BaseModel):
    surface: SurfaceDescriptor
    r1: int
    l1: int = Field(..., ge=1)
    r2: int
    l2: int = Field(..., ge=1)
    n_values: list[int] = Field(..., min_length=1)


class ThetaRequest(BaseModel):
    surface: SurfaceDescriptor
    l1: int = Field(..., ge=1)
    l2: int = Field(..., ge=1)
    n_values: list[int] = Field(..., min_length=1)


class ClassifyRequest(BaseModel):
    surface: SurfaceDescriptor
    l1: int = Field(..., ge=1)
    l2: int = Field(..., ge=1)


class MaassTraceRequest(BaseModel):
    n: int = Field(..., ge=1)
    precision_bits: int = Field(256, ge=64)


@app.exception_handler(HodgeqError)
async def _hodgeq_error(request, exc: HodgeqError):
    if isinstance(exc, NUMERIC_ERRORS):
        return JSONResponse(status_code=409,
                            content={"error": {"type": "numeric", "message": str(exc)}})
    return JSONResponse(status_code=422,
                        content={"error": {"type": "validation", "message": str(exc)}})


@app.exception_handler(ValueError)
async def _value_error(request, exc: ValueError):
    return JSONResponse(status_code=422,
                        content={"error": {"type": "validation", "message": str(exc)}})


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": app.version}


@app.post("/v1/partition")
def partition_endpoint(req: PartitionRequest) -> dict:
    n_max = max(req.n_values)
    if n_max > 2_000_000:
        raise ValueError("n too large for the table route")
    rows = []
    rec = partitions.partition_table_recurrence(n_max) if req.method != "euler" else None
    eul = partitions.partition_table_euler(n_max) if req.method != "recurrence" else None
    agree = True
    for n in req.n_values:
        vals = []
        if rec is not None:
            vals.append(rec[n])
        if eul is not None:
            vals.append(eul[n])
        agree = agree and len(set(vals)) == 1
        rows.append([n, vals[0]])
    return TableOutput("Values of p(n)", ["n", "p(n)"], rows,
                       {"method": req.method, "routes_agree": agree}).to_payload()


@app.post("/v1/rademacher")
def rademacher_endpoint(req: RademacherRequest) -> dict:
    value, rounded = partitions.rademacher_partition(req.n, req.k_max, req.precision_bits)
    exact = partitions.partition_table_recurrence(req.n)[req.n]
    k_used = req.k_max or int(mp.ceil(2 * mp.sqrt(req.n)))
    rows = [[req.n, k_used, mp.nstr(value, 20), rounded, exact, rounded == exact]]
    return TableOutput("Circle-method partial sum for p(n)",
                       ["n", "k_max", "partial_sum", "rounded", "p(n)", "match"],
                       rows).to_payload()


@app.post("/v1/p-near-roots")
def p_near_roots_endpoint(req: NearRootsRequest) -> dict:
    rows = []
    for rec in partitions.p_near_root_table(req.precision_bits):
        rows.append([mp.nstr(rec["t"], 3)] +
                    [sci_str(rec[key]) for key in ("1", "-1", "zeta3", "i")])
    return TableOutput("|P(zeta e^-t)| near roots of unity",
                       ["t", "zeta=1", "zeta=-1", "zeta=zeta3", "zeta=i"],
                       rows, {"precision_bits": req.precision_bits}).to_payload()


@app.post("/v1/goettsche")
def goettsche_endpoint(req: GoettscheRequest) -> dict:
    S = req.surface.resolve()
    rows = []
    for n in range(req.n_max + 1):
        numbers = goettsche.hilbert_hodge_numbers(S, n, req.n_max)
        for (s, t) in sorted(numbers):
            rows.append([n, s, t, numbers[(s, t)]])
    return TableOutput(f"Hodge numbers of Hilb^n of {surface_meta(S)['surface']}",
                       ["n", "s", "t", "h"], rows, surface_meta(S)).to_payload()


@app.post("/v1/xi-exact")
def xi_exact_endpoint(req: XiExactRequest) -> dict:
    S = req.surface.resolve()
    ctx = exact_formula.ExactFormulaContext(S, req.r1, req.l1, req.r2, req.l2,
                                            precision_bits=req.precision_bits)
    trace: list | None = [] if req.trace else None
    values = exact_formula.xi_table(ctx, req.n_values, req.cutoff,
                                    threads=req.threads, trace=trace)
    exact = ctx.exact_coefficients(max(req.n_values)) if req.compare_exact else None
    rows = []
    for n, val in zip(req.n_values, values):
        row = [n, truncate_decimal(val.real, 4), mp.nstr(abs(val.imag), 3)]
        if exact is not None:
            ex = exact[n]
            row += [truncate_decimal(ex.real, 4), mp.nstr(abs(val - ex), 3)]
        rows.append(row)
    columns = ["n", "xi_truncated", "imag"]
    if exact is not None:
        columns += ["exact", "abs_error"]
    meta = {**surface_meta(S), "r1": req.r1, "l1": req.l1, "r2": req.r2, "l2": req.l2,
            "cutoff": req.cutoff, "precision_bits": req.precision_bits,
            "weight": str(ctx.weight)}
    if trace is not None:
        meta["trace"] = [
            {"iota1": rec["iota1"], "iota2": rec["iota2"], "j": rec["j"], "k": rec["k"],
             "terms": [mp.nstr(t.real, 10) for t in rec["terms"]]}
            for rec in trace]
    return TableOutput(f"Exact-formula truncation at cutoff {req.cutoff}",
                       columns, rows, meta).to_payload()


@app.post("/v1/gamma")
def gamma_endpoint(req: GammaRequest) -> dict:
    S = req.surface.resolve()
    n_max = max(req.n_values)
    rows = [[n, goettsche.restricted_hodge_sum(S, req.r1, req.l1, req.r2, req.l2, n, n_max)]
            for n in req.n_values]
    meta = {**surface_meta(S), "r1": req.r1, "l1": req.l1, "r2": req.r2, "l2": req.l2}
    return TableOutput("Signed Hodge sums on one residue class",
                       ["n", "gamma"], rows, meta).to_payload()


@app.post("/v1/theta")
def theta_endpoint(req: ThetaRequest) -> dict:
    S = req.surface.resolve()
    report = equidist.convergence_report(S, req.l1, req.l2, req.n_values)
    columns = ["r1", "r2"] + [f"n={n}" for n in req.n_values]
    rows = []
    for (r1, r2) in sorted(report["pairs"]):
        vals = report["pairs"][(r1, r2)]
        rows.append([r1, r2] + [truncate_decimal(v, 4) for v in vals])
    verdict = report["verdict"]
    meta = {**surface_meta(S), "l1": req.l1, "l2": req.l2,
            "equidistributed": verdict.equidistributed,
            "cases": verdict.cases,
            "R": sorted(map(list, verdict.R)),
            "max_deviation": {str(n): (str(d) if d is not None else None)
                              for n, d in report["max_deviation"].items()}}
    return TableOutput(f"Residue-class proportions mod ({req.l1},{req.l2})",
                       columns, rows, meta).to_payload()


@app.post("/v1/classify")
def classify_endpoint(req: ClassifyRequest) -> dict:
    S = req.surface.resolve()
    verdict = equidist.classify(S, req.l1, req.l2)
    rows = [[req.l1, req.l2, verdict.equidistributed,
             verdict.case_label if verdict.case_label is not None else "none",
             " ".join(map(str, verdict.cases)) or "-",
             " ".join(f"({r1},{r2})" for (r1, r2) in sorted(verdict.R)) or "-"]]
    meta = {**surface_meta(S),
            "lambda_min_witness": list(verdict.lambda_min_witness)
            if verdict.lambda_min_witness else None}
    return TableOutput("Equidistribution verdict",
                       ["l1", "l2", "equidistributed", "case", "all_cases", "R"],
                       rows, meta).to_payload()


@app.post("/v1/maass-trace")
def maass_trace_endpoint(req: MaassTraceRequest) -> dict:
    classes = maass.quadratic_form_classes(req.n)
    with mp.workprec(req.precision_bits + 32):
        rows = []
        total = 0
        for Q in sorted(classes, key=lambda f: (f.a, f.b, f.c)):
            val = maass.maass_form_value(maass.reduce_level6(Q).cm_point(req.precision_bits + 32),
                                         precision_bits=req.precision_bits)
            total += val
            rows.append([Q.a, Q.b, Q.c, mp.nstr(val.real, 15), mp.nstr(val.imag, 3)])
        disc = 1 - 24 * req.n
        p_val = total.real / (24 * req.n - 1)
        p_exact = partitions.partition_table_recurrence(req.n)[req.n]
        meta = {"n": req.n, "discriminant": disc, "class_count": len(classes),
                "trace": mp.nstr(total.real, 20), "trace_imag": mp.nstr(abs(total.imag), 3),
                "p_from_trace": mp.nstr(p_val, 20), "p_exact": p_exact,
                "abs_error": mp.nstr(abs(p_val - p_exact), 3)}
    return TableOutput(f"Singular moduli for discriminant {disc}",
                       ["a", "b", "c", "value_re", "value_im"], rows, meta).to_payload()
