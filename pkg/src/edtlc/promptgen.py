"""Assistant prompt assembly and response ingestion.

Three prompt pieces: the basic reformulation request with the constant
attribute assignments spelled out, an optional sentence pinning the
combination's reduced formula, and a fixed hints text explaining what the
constant values mean.  No assistant is ever called: prompts go to files,
responses come back from files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import classify, cnl, edtl, ltl
from .errors import AllVariableError

BASE_SENTENCE = ("After 'trigger', 'invariant' is valid until either "
                 "'release' or 'reaction', and 'reaction' must occur within "
                 "'delay' from 'final'.")

EXPLAIN_SENTENCE = "Explain why the resulting sentence is correct."

HINTS_TEXT = ("Remember that if invariant is true, then the statement does "
              "not depend on the invariant, final = true means that final is "
              "now, final = false means that final never happens, delay = "
              "false means that the delay is infinite, delay = true means "
              "that there is no delay, reaction = false means that we do not "
              "wait for the reaction, reaction = true means that the "
              "statement does not depend on the reaction.")

# assignment listing order in the basic prompt
_ASSIGN_ORDER = (
    edtl.Attribute.TRIGGER,
    edtl.Attribute.RELEASE,
    edtl.Attribute.DELAY,
    edtl.Attribute.FINAL,
    edtl.Attribute.REACTION,
    edtl.Attribute.INVARIANT,
)


@dataclass(frozen=True)
class PromptBundle:
    combination: edtl.AttributeCombination
    basic: str
    with_semantics: str | None = None
    hints: str | None = None

    def render(self) -> str:
        """The text written to the prompt file."""
        body = self.with_semantics if self.with_semantics is not None else self.basic
        if self.hints is not None:
            body = f"{body}\n\n{self.hints}"
        return body + "\n"


def prompt_basic(comb: edtl.AttributeCombination, include_explain: bool = True) -> str:
    constants = comb.constant_attributes()
    if not constants:
        raise AllVariableError(
            "combination has no constant attributes; the base pattern "
            "already covers the all-variable class")
    assignments = ", ".join(
        f"{a.full_name} = {comb.value_of(a).value}"
        for a in _ASSIGN_ORDER if a in constants)
    text = (f'Reformulate in English the following sentence "{BASE_SENTENCE}" '
            f"if always {assignments}.")
    if include_explain:
        text += f" {EXPLAIN_SENTENCE}"
    return text


def prompt_with_semantics(comb: edtl.AttributeCombination,
                          report: classify.ClassificationReport,
                          include_explain: bool = True) -> str:
    classify.canonical_class(comb, report)  # must be covered by the report
    formula = edtl.instantiate(edtl.requirement_for_combination(comb))
    return (prompt_basic(comb, include_explain)
            + " The resulting sentence must correspond to the following "
            + f'LTL formula "{ltl.render_ltl(formula)}".')


def prompt_hints() -> str:
    return HINTS_TEXT


def build_bundle(comb: edtl.AttributeCombination,
                 report: classify.ClassificationReport | None = None,
                 with_semantics: bool = False,
                 hints: bool = False,
                 include_explain: bool = True) -> PromptBundle:
    basic = prompt_basic(comb, include_explain)
    semantics = None
    if with_semantics:
        if report is None:
            raise ValueError("a classification report is required for the "
                             "formal-semantics prompt")
        semantics = prompt_with_semantics(comb, report, include_explain)
    return PromptBundle(
        combination=comb,
        basic=basic,
        with_semantics=semantics,
        hints=prompt_hints() if hints else None,
    )


# ---------------------------------------------------------------------------
# Response ingestion


_QUOTE_NORMALIZATION = str.maketrans({
    "‘": "'", "’": "'", "“": '"', "”": '"',
})


@dataclass
class IngestResult:
    template: cnl.CnlTemplate | None
    diagnostics: list[str] = field(default_factory=list)
    corpus: cnl.CnlCorpus | None = None

    @property
    def ok(self) -> bool:
        return self.template is not None


def extract_sentence(text: str) -> str | None:
    """First '.'-terminated sentence, typographic quotes normalized.

    Slot contents cannot contain periods, so the first '.' ends the
    sentence.
    """
    text = text.translate(_QUOTE_NORMALIZATION).strip()
    idx = text.find(".")
    if idx < 0:
        return None
    return text[:idx + 1].strip()


def ingest_response(comb: edtl.AttributeCombination, text: str,
                    corpus: cnl.CnlCorpus,
                    report: classify.ClassificationReport) -> IngestResult:
    """Validate an assistant response and append it to a new corpus version.

    Quoted attribute names become slot markers; the candidate template must
    pass corpus hygiene (slot set, grammar).  On success and when the corpus
    has a backing file, version+1 is written; the input corpus is never
    mutated.
    """
    sentence = extract_sentence(text)
    if sentence is None:
        return IngestResult(None, ["response contains no '.'-terminated sentence"])
    for a in edtl.ATTRIBUTES:
        sentence = sentence.replace(f"'{a.full_name}'", f"<{a.full_name}>")

    cls = classify.canonical_class(comb, report)
    renderable = True
    note = None
    if corpus.renderable_for(cls.class_id) is not None:
        renderable = False
        note = (f"class {cls.class_id} already has a renderable template; "
                f"stored for reference")
    template = cnl.CnlTemplate(
        class_id=cls.class_id,
        text=sentence,
        provenance="assistant",
        renderable=renderable,
        combination=comb,
        note=note,
    )
    diagnostics = cnl.validate_template(template, report)
    if diagnostics:
        return IngestResult(None, diagnostics)

    new_corpus = None
    if corpus.path is not None:
        new_corpus = corpus.write_next_version([template])
    return IngestResult(template, [], new_corpus)
