import random

import pytest

from edtlc import classify, cnl, defaults, edtl
from edtlc import propexpr as pe
from edtlc.errors import (
    AmbiguousPhraseError,
    CorpusVersionError,
    NoTemplateError,
    PhraseSyntaxError,
)

TABLE1 = edtl.Requirement.of(
    trigger="H and D", release=False, final=True, delay=True,
    invariant=True, reaction="D",
)


@pytest.fixture(scope="module")
def report():
    return defaults.default_report()


@pytest.fixture(scope="module")
def corpus():
    return defaults.seed_corpus()


def test_seed_corpus_loads(corpus):
    assert corpus.version == 1
    assert len(corpus.templates) == 7
    assert sum(1 for t in corpus.templates if t.renderable) == 3


def test_seed_templates_match_generated(report, corpus):
    assert [t.to_json_dict() for t in corpus.templates] == \
        [t.to_json_dict() for t in defaults.seed_templates(report)]


def test_at_most_one_renderable_per_class(corpus):
    seen = set()
    for t in corpus.templates:
        if t.renderable:
            assert t.class_id not in seen
            seen.add(t.class_id)


def test_render_base_pattern(report, corpus):
    req = edtl.Requirement.of(trigger="T", invariant="I", release="Rl",
                              reaction="Rc", delay="D", final="F")
    got = cnl.render_requirement(req, corpus, report)
    assert got == ("After 'T', 'I' is valid until either 'Rl' or 'Rc', "
                   "and 'Rc' must occur within 'D' from 'F'.")


def test_render_table1(report, corpus):
    got = cnl.render_requirement(TABLE1, corpus, report)
    assert got == "After 'H and D', 'D' occurs now."


def test_render_final_true_class(report, corpus):
    req = edtl.Requirement.of(trigger="T", invariant="I", release="Rl",
                              reaction="Rc", delay="D", final=True)
    got = cnl.render_requirement(req, corpus, report)
    assert got == ("After 'T', 'I' is valid until either 'Rl' or 'Rc', "
                   "and 'Rc' occurs within 'D' from now.")


def test_render_paper_phrases_byte_exact(report, corpus):
    # the shipped templates instantiated with the attribute names themselves
    # reproduce the published phrases
    want = {
        "vtttvf": "After 'trigger', 'reaction' occurs now.",
        "vvtvvv": ("After 'trigger', 'invariant' is valid until either "
                   "'release' or 'reaction', and 'reaction' occurs within "
                   "'delay' from now."),
        "vvvttf": "After 'trigger', 'invariant' is valid forever.",
    }
    for key, phrase in want.items():
        comb = edtl.AttributeCombination.from_key(key)
        template = next(t for t in corpus.templates
                        if t.combination == comb and "must" not in t.text)
        slot_exprs = {a.full_name: pe.Var(a.full_name)
                      for a in comb.var_attributes()}
        assert cnl.instantiate_template(template, slot_exprs) == phrase


def test_render_nonrenderable_class_is_error(report, corpus):
    req = edtl.requirement_for_combination(
        edtl.AttributeCombination.from_key("vvvttf"))
    with pytest.raises(NoTemplateError) as exc:
        cnl.render_requirement(req, corpus, report)
    assert "broader semantics" in str(exc.value)


def test_render_class_without_template_is_error(report, corpus):
    req = edtl.requirement_for_combination(
        edtl.AttributeCombination.from_key("vvfvvv"))
    with pytest.raises(NoTemplateError) as exc:
        cnl.render_requirement(req, corpus, report)
    assert exc.value.class_id is not None


def test_render_noncanonical_member_is_error(report, corpus):
    # same class as vtttvf but differently shaped: the paper's non-canonical twin
    req = edtl.requirement_for_combination(
        edtl.AttributeCombination.from_key("vvtttf"))
    with pytest.raises(NoTemplateError) as exc:
        cnl.render_requirement(req, corpus, report)
    assert "vtttvf" in str(exc.value)


def test_parse_table1_phrase(report, corpus):
    got = cnl.parse_requirement("After 'H and D', 'D' occurs now.", corpus, report)
    assert got.requirement == TABLE1
    assert got.warnings == []
    assert edtl.combination_of(got.requirement).key == "vtttvf"


def test_parse_is_whitespace_tolerant(report, corpus):
    got = cnl.parse_requirement("After  'H and D' ,  'D'   occurs   now .",
                                corpus, report)
    assert got.requirement == TABLE1


def test_parse_forever_phrase_attaches_warning(report, corpus):
    got = cnl.parse_requirement("After 'T', 'I' is valid forever.", corpus, report)
    comb = edtl.combination_of(got.requirement)
    assert comb.value_of(edtl.Attribute.RELEASE) is edtl.Tristate.FALSE
    assert comb.value_of(edtl.Attribute.DELAY) is edtl.Tristate.TRUE
    assert comb.value_of(edtl.Attribute.REACTION) is edtl.Tristate.TRUE
    assert comb.value_of(edtl.Attribute.TRIGGER) is edtl.Tristate.VAR
    assert comb.value_of(edtl.Attribute.INVARIANT) is edtl.Tristate.VAR
    assert comb.value_of(edtl.Attribute.FINAL) is edtl.Tristate.VAR
    assert got.requirement.trigger == pe.Var("T")
    assert got.requirement.invariant == pe.Var("I")
    assert any("broader semantics" in w for w in got.warnings)
    assert any("final" in w for w in got.warnings)


def test_parse_syntax_error_has_position(report, corpus):
    with pytest.raises(PhraseSyntaxError):
        cnl.parse_requirement("After 'T', banana occurs now.", corpus, report)


def test_parse_grammatical_but_uncovered_phrase(report, corpus):
    with pytest.raises(NoTemplateError):
        cnl.parse_requirement("After 'T', 'R' occurs from now.", corpus, report)


def test_parse_ambiguous_phrase(report, corpus):
    extra = cnl.CnlTemplate(class_id=19, text="After <trigger>, <reaction> occurs now.",
                            provenance="manual", renderable=False)
    fat = cnl.CnlCorpus(version=1, templates=corpus.templates + [extra])
    with pytest.raises(AmbiguousPhraseError):
        cnl.parse_requirement("After 'a', 'b' occurs now.", fat, report)


def test_parse_slot_expression_failure(report, corpus):
    with pytest.raises(PhraseSyntaxError) as exc:
        cnl.parse_requirement("After 'H and', 'D' occurs now.", corpus, report)
    assert "trigger" in str(exc.value)


def test_grammar_export_contains_published_fragment():
    text = cnl.grammar_export()
    assert "Req := After <trigger>, <body_trig>" in text
    assert "<invariant> is valid <body_inv>" in text


def test_grammar_accepts_all_seed_phrases(report, corpus):
    # meta-test: every phrase the corpus can produce parses back
    phrases = [
        "After 'trigger', 'reaction' occurs now.",
        ("After 'trigger', 'invariant' is valid until either 'release' or "
         "'reaction', and 'reaction' occurs within 'delay' from now."),
        "After 'trigger', 'invariant' is valid forever.",
    ]
    for phrase in phrases:
        got = cnl.parse_requirement(phrase, corpus, report)
        assert got.class_id in {19, 16, 5}


def test_validate_template_clean(report, corpus):
    row1 = next(t for t in corpus.templates
                if t.renderable and t.combination.key == "vtttvf")
    assert cnl.validate_template(row1, report) == []


def test_validate_template_constant_slot(report):
    bad = cnl.CnlTemplate(
        class_id=19, text="After <trigger>, <reaction> occurs now or <release>.",
        provenance="manual", renderable=True,
        combination=edtl.AttributeCombination.from_key("vtttvf"))
    diags = cnl.validate_template(bad, report)
    assert any("constant attribute <release>" in d for d in diags)


def test_validate_template_missing_slot(report):
    bad = cnl.CnlTemplate(
        class_id=19, text="After <trigger>, something occurs now.",
        provenance="manual", renderable=True,
        combination=edtl.AttributeCombination.from_key("vtttvf"))
    diags = cnl.validate_template(bad, report)
    assert any("missing slot <reaction>" in d for d in diags)


def test_validate_template_ungrammatical(report):
    bad = cnl.CnlTemplate(
        class_id=19, text="After <trigger>, <reaction> must occur.",
        provenance="manual", renderable=True,
        combination=edtl.AttributeCombination.from_key("vtttvf"))
    diags = cnl.validate_template(bad, report)
    assert any("not derivable" in d and "position" in d for d in diags)


def test_validate_seed_nonrenderable_templates_have_diagnoses_or_notes(report, corpus):
    for t in corpus.templates:
        if t.renderable:
            assert cnl.validate_template(t, report) == []
        else:
            assert t.note


def random_expr(rng):
    names = ["p", "q", "r", "sensor_a", "valve"]
    choice = rng.random()
    if choice < 0.4:
        return pe.Var(rng.choice(names))
    if choice < 0.6:
        return pe.Not(pe.Var(rng.choice(names)))
    if choice < 0.8:
        return pe.And(pe.Var(rng.choice(names)), pe.Var(rng.choice(names)))
    return pe.Or(pe.Var(rng.choice(names)),
                 pe.And(pe.Var(rng.choice(names)), pe.Var(rng.choice(names))))


def test_round_trip_every_renderable_class(report, corpus):
    rng = random.Random(5)
    for template in corpus.templates:
        if not template.renderable:
            continue
        comb = template.combination
        for _ in range(50):
            values = {}
            for a in edtl.ATTRIBUTES:
                tv = comb.value_of(a)
                if tv is edtl.Tristate.VAR:
                    values[a.full_name] = random_expr(rng)
                else:
                    values[a.full_name] = tv is edtl.Tristate.TRUE
            req = edtl.Requirement.of(**values)
            phrase = cnl.render_requirement(req, corpus, report)
            back = cnl.parse_requirement(phrase, corpus, report)
            assert edtl.combination_of(back.requirement) == comb
            for a in comb.var_attributes():
                assert back.requirement.value_of(a) == req.value_of(a)


def test_corpus_versioning(tmp_path, corpus):
    path = tmp_path / "corpus.v1.jsonl"
    path.write_text(corpus.dump())
    loaded = cnl.CnlCorpus.load(path)
    assert loaded.version == 1
    new = loaded.write_next_version([cnl.CnlTemplate(
        class_id=23, text="After <trigger>, <invariant> is valid until <reaction>.",
        provenance="manual", renderable=True)])
    assert new.version == 2
    assert new.path.name == "corpus.v2.jsonl"
    assert new.path.exists()
    assert len(cnl.CnlCorpus.load(new.path).templates) == len(corpus.templates) + 1
    with pytest.raises(CorpusVersionError):
        loaded.write_next_version([])


def test_corpus_version_from_unsuffixed_name(tmp_path, corpus):
    path = tmp_path / "corpus.jsonl"
    path.write_text(corpus.dump())
    loaded = cnl.CnlCorpus.load(path)
    assert loaded.version == 1
    assert loaded.next_version_path().name == "corpus.v2.jsonl"


def test_rendered_phrases_never_name_constant_attributes(report, corpus):
    # constant attributes are folded into the phrasing, never named
    phrase = cnl.render_requirement(TABLE1, corpus, report)
    for word in ["release", "final", "delay", "invariant"]:
        assert word not in phrase
    req = edtl.Requirement.of(trigger="T", invariant="I", release="Rl",
                              reaction="Rc", delay="D", final=True)
    phrase = cnl.render_requirement(req, corpus, report)
    assert "final" not in phrase
