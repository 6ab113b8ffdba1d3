"""HTTP service exposing the checker, normalizer and model-checking bridge.

Run with:  uvicorn nmdekl.service:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import reduce
from .check import check_theory
from .mulogic import (
    FormulaError, KripkeStructure, TotalityError, UntranslatableError,
    ctl_eval, dec, enc, mc_mu, mu_pretty, parse_ctl_formula,
    parse_mu_formula, separation_demo,
)
from .surface import ParseError, parse_term, parse_theory, pretty_print

app = FastAPI(title="nmdekl", version="0.1.0")


class CheckRequest(BaseModel):
    source: str
    fuel: int = Field(default=10_000, gt=0)


class DeclarationResult(BaseModel):
    label: str
    ok: bool
    kind: str
    message: str = ""


class CheckResponse(BaseModel):
    ok: bool
    results: list[DeclarationResult]


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest) -> CheckResponse:
    try:
        theory = parse_theory(req.source)
    except ParseError as e:
        raise HTTPException(status_code=422, detail=str(e))
    report = check_theory(theory, fuel=req.fuel)
    return CheckResponse(
        ok=report.ok,
        results=[DeclarationResult(
            label=r.label, ok=r.ok, kind=r.kind,
            message="" if r.ok else r.error.message)
            for r in report.results])


class NormalizeRequest(BaseModel):
    term: str
    fuel: int = Field(default=10_000, gt=0)


class NormalizeResponse(BaseModel):
    normal: bool
    term: str
    steps_used: int | None = None


@app.post("/normalize", response_model=NormalizeResponse)
def normalize_endpoint(req: NormalizeRequest) -> NormalizeResponse:
    try:
        t = parse_term(req.term)
    except ParseError as e:
        raise HTTPException(status_code=422, detail=str(e))
    out = reduce.normalize(t, req.fuel)
    if isinstance(out, reduce.FuelExhausted):
        return NormalizeResponse(normal=False,
                                 term=pretty_print(out.partial),
                                 steps_used=out.steps_used)
    return NormalizeResponse(normal=True, term=pretty_print(out.term))


class KripkeModel(BaseModel):
    states: list[str]
    transitions: list[tuple[str, str]]
    valuation: dict[str, list[str]] = Field(default_factory=dict)

    def build(self) -> KripkeStructure:
        try:
            return KripkeStructure(
                tuple(self.states),
                frozenset(tuple(t) for t in self.transitions),
                {p: frozenset(v) for p, v in self.valuation.items()})
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))


class McRequest(BaseModel):
    structure: KripkeModel
    formula: str
    logic: str = Field(default="mu", pattern="^(mu|ctl)$")
    state: str | None = None


class McResponse(BaseModel):
    satisfying: list[str]
    holds: bool | None = None


@app.post("/mc", response_model=McResponse)
def mc_endpoint(req: McRequest) -> McResponse:
    M = req.structure.build()
    try:
        if req.logic == "ctl":
            sat = ctl_eval(M, parse_ctl_formula(req.formula))
        else:
            sat = mc_mu(M, parse_mu_formula(req.formula))
    except FormulaError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except TotalityError as e:
        raise HTTPException(status_code=409, detail=str(e))
    holds = req.state in sat if req.state is not None else None
    return McResponse(satisfying=sorted(sat), holds=holds)


class TranslateRequest(BaseModel):
    direction: str = Field(pattern="^(enc|dec)$")
    formula: str


class TranslateResponse(BaseModel):
    formula: str


@app.post("/translate", response_model=TranslateResponse)
def translate_endpoint(req: TranslateRequest) -> TranslateResponse:
    try:
        if req.direction == "enc":
            return TranslateResponse(
                formula=pretty_print(enc(parse_mu_formula(req.formula))))
        return TranslateResponse(
            formula=mu_pretty(dec(parse_term(req.formula))))
    except (FormulaError, ParseError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except UntranslatableError as e:
        raise HTTPException(status_code=409, detail=str(e))


class SeparationResponse(BaseModel):
    ok: bool
    underlying_equal: bool
    phi_m1: bool
    phi_m2: bool
    tau0: str
    samples_total: int
    samples_agreeing: int


@app.get("/sep-demo", response_model=SeparationResponse)
def sep_demo_endpoint() -> SeparationResponse:
    _, _, _, r = separation_demo()
    return SeparationResponse(ok=r.ok, underlying_equal=r.underlying_equal,
                              phi_m1=r.phi_m1, phi_m2=r.phi_m2, tau0=r.tau0,
                              samples_total=r.samples_total,
                              samples_agreeing=r.samples_agreeing)
