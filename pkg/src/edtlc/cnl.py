"""Controlled natural language for the requirement pattern.

A corpus of phrase templates, one renderable template per semantic class,
plus a small grammar that every template must be derivable from.  Slot
contents are single-quoted propositional expressions, so the quote
characters are the tokenization boundary and English ambiguity stays out
of the slots.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import classify, edtl
from . import propexpr as pe
from .errors import (
    AmbiguousPhraseError,
    CorpusVersionError,
    EdtlcError,
    NoTemplateError,
    PhraseSyntaxError,
)

GRAMMAR_TEXT = """\
Req := After <trigger>, <body_trig> | <invariant> is valid <body_inv>
<body_trig> := <reaction> occurs <cond_rea> | <invariant> is valid <until_part> | <invariant> is valid <until_part>, and <rea_part>
<cond_rea> := now | from <fin_ref> | within <delay> from <fin_ref>
<fin_ref> := now | <final>
<until_part> := until <until_evt> | forever
<until_evt> := either <release> or <reaction> | <final> occurs | <final> | <reaction> | <release>
<rea_part> := <reaction> must occur <cond_rea> | <reaction> occurs <cond_rea>
<body_inv> := <until_part> | forever

-- a requirement sentence ends with '.'
-- attribute slots <trigger> <invariant> <final> <delay> <reaction> <release>
-- hold single-quoted propositional expressions, e.g. 'H and D'
"""

_SLOT_NAMES = {a.full_name for a in edtl.Attribute}


def grammar_export() -> str:
    return GRAMMAR_TEXT


# ---------------------------------------------------------------------------
# Templates and corpus files


@dataclass(frozen=True)
class CnlTemplate:
    class_id: int
    text: str
    provenance: str  # paper | assistant | manual
    renderable: bool
    combination: edtl.AttributeCombination | None = None
    note: str | None = None

    def slots(self) -> list[str]:
        return re.findall(r"<([a-z]+)>", self.text)

    def to_json_dict(self) -> dict:
        out = {
            "class_id": self.class_id,
            "text": self.text,
            "provenance": self.provenance,
            "renderable": self.renderable,
        }
        if self.combination is not None:
            out["combination"] = self.combination.key
        if self.note is not None:
            out["note"] = self.note
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "CnlTemplate":
        comb = data.get("combination")
        return CnlTemplate(
            class_id=int(data["class_id"]),
            text=data["text"],
            provenance=data["provenance"],
            renderable=bool(data["renderable"]),
            combination=edtl.AttributeCombination.from_key(comb) if comb else None,
            note=data.get("note"),
        )


_VERSION_RE = re.compile(r"^(?P<stem>.*)\.v(?P<num>\d+)\.jsonl$")


@dataclass
class CnlCorpus:
    version: int
    templates: list[CnlTemplate]
    path: Path | None = None

    @staticmethod
    def load(path: str | Path) -> "CnlCorpus":
        path = Path(path)
        m = _VERSION_RE.match(path.name)
        version = int(m.group("num")) if m else 1
        templates = []
        for line in path.read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            templates.append(CnlTemplate.from_json_dict(json.loads(line)))
        return CnlCorpus(version=version, templates=templates, path=path)

    def dump(self) -> str:
        return "".join(json.dumps(t.to_json_dict()) + "\n" for t in self.templates)

    def renderable_for(self, class_id: int) -> CnlTemplate | None:
        for t in self.templates:
            if t.class_id == class_id and t.renderable:
                return t
        return None

    def templates_for(self, class_id: int) -> list[CnlTemplate]:
        return [t for t in self.templates if t.class_id == class_id]

    def next_version_path(self) -> Path:
        if self.path is None:
            raise CorpusVersionError("corpus has no backing file")
        m = _VERSION_RE.match(self.path.name)
        stem = m.group("stem") if m else self.path.name.removesuffix(".jsonl")
        return self.path.with_name(f"{stem}.v{self.version + 1}.jsonl")

    def write_next_version(self, extra: list[CnlTemplate]) -> "CnlCorpus":
        """Write version+1 with the extra templates appended.

        Never touches the current file; collides loudly if the next version
        already exists (concurrent ingest).
        """
        target = self.next_version_path()
        new = CnlCorpus(version=self.version + 1,
                        templates=self.templates + list(extra), path=target)
        try:
            with open(target, "x") as fh:
                fh.write(new.dump())
        except FileExistsError:
            raise CorpusVersionError(
                f"corpus version {new.version} already exists at {target}")
        return new


# ---------------------------------------------------------------------------
# Tokenization (shared by phrases and template texts)


def _tokenize(text: str, allow_slots: bool) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "'":
            end = text.find("'", i + 1)
            if end < 0:
                raise PhraseSyntaxError("unterminated quote", i)
            tokens.append(("quoted", text[i + 1:end], i))
            i = end + 1
        elif ch == "<" and allow_slots:
            end = text.find(">", i + 1)
            name = text[i + 1:end] if end > 0 else ""
            if end < 0 or name not in _SLOT_NAMES:
                raise PhraseSyntaxError("bad slot marker", i)
            tokens.append(("slot", name, i))
            i = end + 1
        elif ch == ",":
            tokens.append(("comma", ",", i))
            i += 1
        elif ch == ".":
            tokens.append(("period", ".", i))
            i += 1
        elif ch.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            tokens.append(("word", text[i:j], i))
            i = j
        else:
            raise PhraseSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


# ---------------------------------------------------------------------------
# Grammar parser
#
# A tiny backtracking recursive-descent parser producing every derivation.
# In phrase mode a Slot(a) matches any quoted token and records (a, text);
# in template mode it matches only the slot marker <a>.  The furthest
# failure position feeds syntax errors.


class _Parser:
    def __init__(self, tokens, template_mode: bool, text_len: int):
        self.tokens = tokens
        self.template_mode = template_mode
        self.text_len = text_len
        self.failure_at = 0
        self.failure_expected: set[str] = set()

    def _fail(self, pos: int, expected: str):
        at = self.tokens[pos][2] if pos < len(self.tokens) else self.text_len
        if at > self.failure_at:
            self.failure_at = at
            self.failure_expected = {expected}
        elif at == self.failure_at:
            self.failure_expected.add(expected)
        return []

    def word(self, pos, *words):
        for w in words:
            if pos < len(self.tokens) and self.tokens[pos][:2] == ("word", w):
                pos += 1
            else:
                return self._fail(pos, f"'{w}'")
        return [(pos, ())]

    def punct(self, pos, kind):
        if pos < len(self.tokens) and self.tokens[pos][0] == kind:
            return [(pos + 1, ())]
        return self._fail(pos, kind)

    def slot(self, pos, attr):
        if pos >= len(self.tokens):
            return self._fail(pos, f"<{attr}>")
        kind, value, _ = self.tokens[pos]
        if self.template_mode:
            if kind == "slot" and value == attr:
                return [(pos + 1, ((attr, attr),))]
            return self._fail(pos, f"<{attr}>")
        if kind == "quoted":
            return [(pos + 1, ((attr, value),))]
        return self._fail(pos, f"<{attr}>")

    def seq(self, pos, *steps):
        results = [(pos, ())]
        for step in steps:
            nxt = []
            for p, binds in results:
                for p2, b2 in step(p):
                    nxt.append((p2, binds + b2))
            results = nxt
            if not results:
                break
        return results

    # grammar productions ---------------------------------------------------

    def req(self, pos):
        out = self.seq(pos,
                       lambda p: self.word(p, "After"),
                       lambda p: self.slot(p, "trigger"),
                       lambda p: self.punct(p, "comma"),
                       self.body_trig,
                       lambda p: self.punct(p, "period"))
        out += self.seq(pos,
                        lambda p: self.slot(p, "invariant"),
                        lambda p: self.word(p, "is", "valid"),
                        self.body_inv,
                        lambda p: self.punct(p, "period"))
        return out

    def body_trig(self, pos):
        out = self.seq(pos,
                       lambda p: self.slot(p, "reaction"),
                       lambda p: self.word(p, "occurs"),
                       self.cond_rea)
        tail = self.seq(pos,
                        lambda p: self.slot(p, "invariant"),
                        lambda p: self.word(p, "is", "valid"),
                        self.until_part)
        for p, binds in tail:
            out.append((p, binds))
            for p2, b2 in self.seq(p,
                                   lambda q: self.punct(q, "comma"),
                                   lambda q: self.word(q, "and"),
                                   self.rea_part):
                out.append((p2, binds + b2))
        return out

    def cond_rea(self, pos):
        out = self.word(pos, "now")
        out += self.seq(pos, lambda p: self.word(p, "from"), self.fin_ref)
        out += self.seq(pos,
                        lambda p: self.word(p, "within"),
                        lambda p: self.slot(p, "delay"),
                        lambda p: self.word(p, "from"),
                        self.fin_ref)
        return out

    def fin_ref(self, pos):
        return self.word(pos, "now") + self.slot(pos, "final")

    def until_part(self, pos):
        return (self.seq(pos, lambda p: self.word(p, "until"), self.until_evt)
                + self.word(pos, "forever"))

    def until_evt(self, pos):
        out = self.seq(pos,
                       lambda p: self.word(p, "either"),
                       lambda p: self.slot(p, "release"),
                       lambda p: self.word(p, "or"),
                       lambda p: self.slot(p, "reaction"))
        for p, binds in self.slot(pos, "final"):
            for p2, _ in self.word(p, "occurs"):
                out.append((p2, binds))
            out.append((p, binds))
        out += self.slot(pos, "reaction")
        out += self.slot(pos, "release")
        return out

    def rea_part(self, pos):
        head = self.slot(pos, "reaction")
        out = []
        for p, binds in head:
            for p2, _ in self.word(p, "must", "occur"):
                for p3, b3 in self.cond_rea(p2):
                    out.append((p3, binds + b3))
            for p2, _ in self.word(p, "occurs"):
                for p3, b3 in self.cond_rea(p2):
                    out.append((p3, binds + b3))
        return out

    def body_inv(self, pos):
        return self.until_part(pos) + self.word(pos, "forever")


def _parse_grammar(text: str, template_mode: bool) -> list[tuple]:
    """Complete derivations of ``text``; raises with the furthest failure
    position when there are none."""
    tokens = _tokenize(text, allow_slots=template_mode)
    parser = _Parser(tokens, template_mode, len(text))
    complete = [(p, binds) for p, binds in parser.req(0) if p == len(tokens)]
    if not complete:
        expected = ", ".join(sorted(parser.failure_expected)) or "end of input"
        raise PhraseSyntaxError(f"expected {expected}", parser.failure_at)
    return complete


# ---------------------------------------------------------------------------
# Template validation


def template_combination(template: CnlTemplate,
                         report: classify.ClassificationReport
                         ) -> edtl.AttributeCombination:
    """The combination a template phrases: its own pinned one, or the
    class representative when none is pinned."""
    if template.combination is not None:
        return template.combination
    return report.class_by_id(template.class_id).representative


def validate_template(template: CnlTemplate,
                      report: classify.ClassificationReport) -> list[str]:
    """Corpus hygiene checks; diagnostics are returned, never raised."""
    diagnostics: list[str] = []
    try:
        cls = report.class_by_id(template.class_id)
    except EdtlcError:
        return [f"unknown class id {template.class_id}"]
    comb = template.combination
    if comb is not None and comb not in cls.members:
        diagnostics.append(
            f"combination {comb.key} is not a member of class {cls.class_id}")
        comb = None
    if comb is None:
        comb = cls.representative

    slots = template.slots()
    var_names = {a.full_name for a in comb.var_attributes()}
    for name in sorted(set(slots) - var_names):
        diagnostics.append(f"slot for constant attribute <{name}>")
    for name in sorted(var_names - set(slots)):
        diagnostics.append(f"missing slot <{name}>")

    try:
        _parse_grammar(template.text, template_mode=True)
    except PhraseSyntaxError as exc:
        diagnostics.append(f"not derivable from the grammar: {exc}")
    return diagnostics


# ---------------------------------------------------------------------------
# Rendering


def instantiate_template(template: CnlTemplate,
                         slot_exprs: dict[str, pe.PropExpr]) -> str:
    """Fill the template's slot markers with quoted expression text."""
    def fill(m: re.Match) -> str:
        name = m.group(1)
        if name not in slot_exprs:
            raise NoTemplateError(f"no expression for slot <{name}>",
                                  template.class_id)
        return f"'{pe.render_prop(slot_exprs[name])}'"

    return re.sub(r"<([a-z]+)>", fill, template.text)


def render_requirement(req: edtl.Requirement, corpus: CnlCorpus,
                       report: classify.ClassificationReport) -> str:
    comb = edtl.combination_of(req)
    cls = classify.canonical_class(comb, report)
    template = corpus.renderable_for(cls.class_id)
    if template is None:
        notes = [t.note for t in corpus.templates_for(cls.class_id) if t.note]
        detail = f" ({notes[0]})" if notes else ""
        raise NoTemplateError(
            f"class {cls.class_id} has no renderable template{detail}",
            cls.class_id)
    expected = template_combination(template, report)
    if comb != expected:
        raise NoTemplateError(
            f"the class {cls.class_id} template phrases the canonical "
            f"combination {expected.key}; got the equivalent but "
            f"differently-shaped {comb.key}", cls.class_id)
    slot_exprs = {a.full_name: req.value_of(a) for a in comb.var_attributes()}
    return instantiate_template(template, slot_exprs)


# ---------------------------------------------------------------------------
# Parsing


@dataclass
class ParseResult:
    requirement: edtl.Requirement
    class_id: int
    template: CnlTemplate
    warnings: list[str] = field(default_factory=list)


def _match_template(template: CnlTemplate, phrase_tokens) -> dict[str, list[str]] | None:
    """Token-by-token match of a phrase against a template; slot markers
    match quoted tokens.  Returns slot-name -> list of quoted texts."""
    try:
        t_tokens = _tokenize(template.text, allow_slots=True)
    except PhraseSyntaxError:
        return None
    if len(t_tokens) != len(phrase_tokens):
        return None
    bound: dict[str, list[str]] = {}
    for (tk, tv, _), (pk, pv, _) in zip(t_tokens, phrase_tokens):
        if tk == "slot":
            if pk != "quoted":
                return None
            bound.setdefault(tv, []).append(pv)
        elif (tk, tv) != (pk, pv):
            return None
    return bound


def parse_requirement(text: str, corpus: CnlCorpus,
                      report: classify.ClassificationReport) -> ParseResult:
    if not text or not text.strip():
        raise PhraseSyntaxError("empty phrase", 0)
    phrase_tokens = _tokenize(text, allow_slots=False)

    matches: list[tuple[CnlTemplate, dict[str, list[str]]]] = []
    for template in corpus.templates:
        bound = _match_template(template, phrase_tokens)
        if bound is not None:
            matches.append((template, bound))

    if not matches:
        # distinguish ungrammatical text from a grammatical phrase that no
        # corpus template covers; both raise, with different types
        _parse_grammar(text, template_mode=False)
        raise NoTemplateError("phrase is grammatical but matches no corpus template")
    if len(matches) > 1:
        ids = sorted(t.class_id for t, _ in matches)
        raise AmbiguousPhraseError(
            f"phrase matches templates of classes {ids}", ids)

    template, bound = matches[0]
    warnings: list[str] = []
    if not template.renderable:
        warnings.append(template.note or
                        f"template for class {template.class_id} is not renderable")

    comb = template_combination(template, report)
    values: dict[str, pe.PropExpr | bool] = {}
    for a in edtl.ATTRIBUTES:
        tv = comb.value_of(a)
        if tv is not edtl.Tristate.VAR:
            values[a.full_name] = tv is edtl.Tristate.TRUE
    for name, texts in bound.items():
        exprs = []
        for t in texts:
            try:
                exprs.append(pe.parse_prop(t))
            except EdtlcError as exc:
                raise PhraseSyntaxError(
                    f"slot <{name}> expression {t!r} does not parse: {exc}", 0)
        if any(e != exprs[0] for e in exprs[1:]):
            raise PhraseSyntaxError(
                f"slot <{name}> occurs twice with different expressions", 0)
        values[name] = exprs[0]
    for a in comb.var_attributes():
        if a.full_name not in values:
            values[a.full_name] = pe.Var(a.abbreviation)
            warnings.append(
                f"template has no slot for variable attribute <{a.full_name}>; "
                f"defaulted to its abbreviation atom")

    return ParseResult(
        requirement=edtl.Requirement.of(**values),
        class_id=template.class_id,
        template=template,
        warnings=warnings,
    )
