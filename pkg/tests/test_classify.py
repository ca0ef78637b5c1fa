import json

import pytest

from edtlc import classify, edtl, ltl, semantics as sem
from edtlc.errors import CorruptReportError

# a lighter random phase keeps the unit suite quick; the acceptance suite
# runs the default bounds
FAST_BOUNDS = sem.EquivBounds(random_samples=500, seed=0)


@pytest.fixture(scope="module")
def report():
    return classify.classify_all(FAST_BOUNDS)


def comb(key):
    return edtl.AttributeCombination.from_key(key)


def test_partition_covers_all_729(report):
    total = sum(len(c.members) for c in report.classes)
    assert total == 729
    seen = set()
    for c in report.classes:
        for m in c.members:
            assert m not in seen
            seen.add(m)
    assert len(seen) == 729


def test_class_ids_dense_from_1(report):
    assert [c.class_id for c in report.classes] == list(range(1, len(report.classes) + 1))


def test_representative_is_member(report):
    for c in report.classes:
        assert c.representative in c.members


def test_paper_equivalence_pair_same_class(report):
    c1 = classify.canonical_class(comb("vtttvf"), report)
    c2 = classify.canonical_class(comb("vvtttf"), report)
    assert c1.class_id == c2.class_id
    renamed, _ = ltl.canonical_rename(ltl.parse_ltl("G (trig -> rea)"))
    assert c1.canonical_formula == renamed


def test_representative_of_prefers_paper_canonical():
    pair = [comb("vtttvf"), comb("vvtttf")]
    assert classify.representative_of(pair) == comb("vtttvf")
    assert classify.representative_of(reversed(pair)) == comb("vtttvf")


def test_representative_of_singleton():
    assert classify.representative_of([comb("vvtvvv")]) == comb("vvtvvv")


def test_representative_of_all_var_is_minimal(report):
    all_var = comb("vvvvvv")
    for other in [comb("vtttvf"), comb("tttttt"), comb("ffffff")]:
        assert classify.representative_of([all_var, other]) == all_var


def test_representative_of_empty_is_error():
    with pytest.raises(ValueError):
        classify.representative_of([])


def test_all_var_class_has_base_formula(report):
    cls = classify.canonical_class(comb("vvvvvv"), report)
    renamed, _ = ltl.canonical_rename(edtl.base_semantics())
    assert cls.canonical_formula == renamed
    assert cls.class_id == 1


def test_expected_count_or_evidence(report):
    n = len(report.classes)
    if n == classify.EXPECTED_CLASS_COUNT:
        return
    kinds = {d["kind"] for d in report.discrepancies}
    assert "count-mismatch" in kinds
    # every pair of distinct classes with equal atom counts carries evidence
    by_count = {}
    for c in report.classes:
        by_count.setdefault(c.atom_count, []).append(c.class_id)
    want_pairs = set()
    for count, ids in by_count.items():
        if count == 0:
            continue
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                want_pairs.add(frozenset((a, b)))
    have_pairs = {frozenset(d["class_ids"]) for d in report.discrepancies
                  if d["kind"] == "unmerged-pair"}
    assert want_pairs <= have_pairs
    for d in report.discrepancies:
        if d["kind"] == "unmerged-pair":
            assert "witness" in d or "note" in d


def test_unmerged_witnesses_distinguish(report):
    checked = 0
    for d in report.discrepancies:
        if d["kind"] != "unmerged-pair" or "witness" not in d:
            continue
        a = report.class_by_id(d["class_ids"][0]).canonical_formula
        b = report.class_by_id(d["class_ids"][1]).canonical_formula
        trace = sem.LassoTrace.of(d["witness"]["prefix"], d["witness"]["loop"])
        assert sem.eval_lasso(a, trace) != sem.eval_lasso(b, trace)
        checked += 1
        if checked >= 25:
            break
    assert checked > 0 or len(report.classes) == classify.EXPECTED_CLASS_COUNT


def test_merge_notes_record_verified_bijections(report):
    merges = [d for d in report.discrepancies if d["kind"] == "merge"]
    assert merges, "oracle merges are expected for this pattern"
    for d in merges[:10]:
        assert set(d) >= {"groups", "bijection", "bounds"}
        g1 = comb(d["groups"][0])
        g2 = comb(d["groups"][1])
        assert classify.canonical_class(g1, report).class_id == \
            classify.canonical_class(g2, report).class_id


def test_member_formula_equivalent_to_canonical(report):
    # spot-check: re-run the oracle on a few members against their class
    import random
    rng = random.Random(11)
    spot = rng.sample([(c, m) for c in report.classes for m in c.members], 12)
    for cls, member in spot:
        formula = edtl.instantiate(edtl.requirement_for_combination(member))
        renamed, _ = ltl.canonical_rename(formula)
        n1 = len(ltl.atoms_of(renamed))
        n2 = cls.atom_count
        if n1 != n2:
            continue  # merged across structurally different forms is covered above
        if renamed == cls.canonical_formula:
            continue
        import itertools
        atoms = [f"a{i+1}" for i in range(n1)]
        ok = False
        for perm in itertools.permutations(range(n1)):
            mapping = {atoms[i]: atoms[perm[i]] for i in range(n1)}
            verdict = sem.check_equiv(
                cls.canonical_formula, ltl.rename_atoms(renamed, mapping),
                sem.EquivBounds(random_samples=100))
            if isinstance(verdict, sem.EquivalentUpToBound):
                ok = True
                break
        assert ok


def test_canonical_class_unknown_report():
    report = classify.ClassificationReport(classes=[], oracle_bounds=FAST_BOUNDS)
    with pytest.raises(CorruptReportError):
        classify.canonical_class(comb("vvvvvv"), report)


def test_report_json_round_trip(report):
    text = report.to_json()
    loaded = classify.ClassificationReport.from_json(text)
    assert len(loaded.classes) == len(report.classes)
    for a, b in zip(loaded.classes, report.classes):
        assert a.class_id == b.class_id
        assert a.representative == b.representative
        assert a.canonical_formula == b.canonical_formula
        assert a.members == b.members
    assert loaded.to_json() == text


def test_report_json_rejects_partial_cover():
    data = {
        "oracle_bounds": FAST_BOUNDS.as_dict(),
        "class_count": 1,
        "classes": [{
            "id": 1,
            "representative": comb("vvvvvv").to_json_dict(),
            "canonical_formula": "true",
            "members": ["vvvvvv"],
        }],
        "discrepancies": [],
    }
    with pytest.raises(CorruptReportError):
        classify.ClassificationReport.from_json_dict(data)


def test_determinism_across_runs(report):
    again = classify.classify_all(FAST_BOUNDS)
    assert again.to_json() == report.to_json()
