"""Request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class RequirementModel(BaseModel):
    """Six attributes; true/false or an expression string."""

    trigger: bool | str
    invariant: bool | str
    final: bool | str
    delay: bool | str
    reaction: bool | str
    release: bool | str


class SemanticsRequest(BaseModel):
    requirement: RequirementModel
    simplify: bool = True


class SemanticsResponse(BaseModel):
    formula: str


class BoundsModel(BaseModel):
    prefix_max: int = 2
    loop_max: int = 2
    random_samples: int = 10000
    seed: int = 0


class ClassifyRequest(BoundsModel):
    pass


class RenderRequest(BaseModel):
    requirement: RequirementModel


class RenderResponse(BaseModel):
    phrase: str
    class_id: int


class ParseRequest(BaseModel):
    phrase: str


class ParseResponse(BaseModel):
    requirement: RequirementModel
    class_id: int
    warnings: list[str] = Field(default_factory=list)


class PromptsRequest(BaseModel):
    combination: str = Field(description="six letters from {v,t,f}")
    with_semantics: bool = False
    hints: bool = False
    explain: bool = True


class PromptsResponse(BaseModel):
    combination: str
    basic: str
    with_semantics: str | None = None
    hints: str | None = None


class IngestRequest(BaseModel):
    combination: str
    text: str


class TemplateModel(BaseModel):
    class_id: int
    text: str
    provenance: str
    renderable: bool
    combination: str | None = None
    note: str | None = None


class IngestResponse(BaseModel):
    template: TemplateModel
    persisted: bool = False


class EquivRequest(BoundsModel):
    left: str
    right: str


class LassoModel(BaseModel):
    prefix: list[dict[str, bool | int]]
    loop: list[dict[str, bool | int]]


class EquivResponse(BaseModel):
    equivalent: bool
    prefix_bound: int | None = None
    loop_bound: int | None = None
    sampled_count: int | None = None
    counterexample: LassoModel | None = None


class SupRunRequest(BaseModel):
    params: dict = Field(default_factory=dict)
    trace_csv: str | None = None
    trace_rows: list[dict[str, int]] | None = None


class CycleModel(BaseModel):
    outcome: str
    start: int
    tick: int
    reason: str | None = None
    trigger_end: int | None = None
    action_start: int | None = None
    action_end: int | None = None


class SupRunResponse(BaseModel):
    passed: bool
    cycles: list[CycleModel]


class HealthResponse(BaseModel):
    status: str
    version: str
    classes: int
    corpus_version: int
    corpus_templates: int
