"""HTTP API wrapping the core package.

The service loads a classification report and a phrase corpus once at
startup and answers conversion requests against them.  /ingest validates
a response and returns the resulting template without touching any corpus
file; corpus versioning is the CLI's file workflow.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__, classify, cnl, defaults, edtl, ltl, promptgen, sup
from .. import semantics as sem
from ..errors import (
    AmbiguousPhraseError,
    EdtlcError,
    NoTemplateError,
    OracleLimitError,
)
from . import schemas


def _requirement(model: schemas.RequirementModel) -> edtl.Requirement:
    return edtl.Requirement.from_json_dict(model.model_dump())


def _requirement_model(req: edtl.Requirement) -> schemas.RequirementModel:
    return schemas.RequirementModel(**req.to_json_dict())


def create_app(corpus_path: str | Path | None = None,
               report_path: str | Path | None = None) -> FastAPI:
    if report_path is None:
        report = defaults.default_report()
    else:
        report = classify.ClassificationReport.from_json(
            Path(report_path).read_text())
    if corpus_path is None:
        corpus = defaults.seed_corpus()
    else:
        corpus = cnl.CnlCorpus.load(corpus_path)
    # the service never writes corpus versions
    corpus = cnl.CnlCorpus(version=corpus.version, templates=corpus.templates)

    app = FastAPI(title="edtlc", version=__version__,
                  description="event-driven temporal requirement conversions")

    @app.exception_handler(NoTemplateError)
    @app.exception_handler(AmbiguousPhraseError)
    async def _unprocessable(request: Request, exc: EdtlcError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(OracleLimitError)
    async def _too_large(request: Request, exc: OracleLimitError):
        return JSONResponse(status_code=413, content={"error": str(exc)})

    @app.exception_handler(EdtlcError)
    async def _bad_request(request: Request, exc: EdtlcError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(
            status="ok", version=__version__, classes=len(report.classes),
            corpus_version=corpus.version,
            corpus_templates=len(corpus.templates))

    @app.post("/semantics", response_model=schemas.SemanticsResponse)
    def semantics(body: schemas.SemanticsRequest):
        formula = edtl.instantiate(_requirement(body.requirement), body.simplify)
        return schemas.SemanticsResponse(formula=ltl.render_ltl(formula))

    @app.post("/classify")
    def classify_endpoint(body: schemas.ClassifyRequest) -> dict:
        bounds = sem.EquivBounds(prefix_max=body.prefix_max,
                                 loop_max=body.loop_max,
                                 random_samples=body.random_samples,
                                 seed=body.seed)
        return classify.classify_all(bounds).to_json_dict()

    @app.post("/render", response_model=schemas.RenderResponse)
    def render(body: schemas.RenderRequest):
        req = _requirement(body.requirement)
        phrase = cnl.render_requirement(req, corpus, report)
        cls = classify.canonical_class(edtl.combination_of(req), report)
        return schemas.RenderResponse(phrase=phrase, class_id=cls.class_id)

    @app.post("/parse", response_model=schemas.ParseResponse)
    def parse(body: schemas.ParseRequest):
        result = cnl.parse_requirement(body.phrase, corpus, report)
        return schemas.ParseResponse(
            requirement=_requirement_model(result.requirement),
            class_id=result.class_id,
            warnings=result.warnings)

    @app.post("/prompts", response_model=schemas.PromptsResponse,
              response_model_exclude_none=True)
    def prompts(body: schemas.PromptsRequest):
        comb = edtl.AttributeCombination.from_key(body.combination)
        bundle = promptgen.build_bundle(
            comb, report, with_semantics=body.with_semantics,
            hints=body.hints, include_explain=body.explain)
        return schemas.PromptsResponse(
            combination=comb.key, basic=bundle.basic,
            with_semantics=bundle.with_semantics, hints=bundle.hints)

    @app.post("/ingest", response_model=schemas.IngestResponse)
    def ingest(body: schemas.IngestRequest):
        comb = edtl.AttributeCombination.from_key(body.combination)
        result = promptgen.ingest_response(comb, body.text, corpus, report)
        if not result.ok:
            return JSONResponse(status_code=422,
                                content={"diagnostics": result.diagnostics})
        return schemas.IngestResponse(
            template=schemas.TemplateModel(**result.template.to_json_dict()),
            persisted=False)

    @app.post("/equiv", response_model=schemas.EquivResponse,
              response_model_exclude_none=True)
    def equiv(body: schemas.EquivRequest):
        bounds = sem.EquivBounds(prefix_max=body.prefix_max,
                                 loop_max=body.loop_max,
                                 random_samples=body.random_samples,
                                 seed=body.seed)
        verdict = sem.check_equiv(ltl.parse_ltl(body.left),
                                  ltl.parse_ltl(body.right), bounds)
        if isinstance(verdict, sem.EquivalentUpToBound):
            return schemas.EquivResponse(
                equivalent=True, prefix_bound=verdict.prefix_bound,
                loop_bound=verdict.loop_bound,
                sampled_count=verdict.sampled_count)
        return schemas.EquivResponse(
            equivalent=False,
            counterexample=schemas.LassoModel(
                prefix=[dict(v) for v in verdict.trace.prefix],
                loop=[dict(v) for v in verdict.trace.loop]))

    @app.post("/sup/run", response_model=schemas.SupRunResponse,
              response_model_exclude_none=True)
    def sup_run(body: schemas.SupRunRequest):
        params = sup.SupParameters.from_json_dict(body.params)
        if (body.trace_csv is None) == (body.trace_rows is None):
            raise EdtlcError("provide exactly one of trace_csv or trace_rows")
        if body.trace_csv is not None:
            trace = sup.load_trace_csv(body.trace_csv)
        else:
            trace = body.trace_rows
        verdict = sup.run_monitor(params, trace)
        return schemas.SupRunResponse(
            passed=verdict.passed,
            cycles=[schemas.CycleModel(**c.to_json_dict())
                    for c in verdict.cycles])

    @app.get("/grammar", response_class=PlainTextResponse)
    def grammar():
        return cnl.grammar_export()

    return app
