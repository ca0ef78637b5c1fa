import pytest
from hypothesis import given, settings, strategies as st

from edtlc import ltl
from edtlc import semantics as sem
from edtlc.errors import OracleLimitError, UnboundIdentifierError


def f(text):
    return ltl.parse_ltl(text)


def lasso(prefix, loop):
    return sem.LassoTrace.of(prefix, loop)


def test_globally_on_constant_loop():
    assert sem.eval_lasso(f("G a"), lasso([], [{"a": True}])) is True
    assert sem.eval_lasso(f("G a"), lasso([], [{"a": False}])) is False


def test_propositional_tautology_under_globally():
    t1 = lasso([{"H": True, "D": False}], [{"H": False, "D": True}, {"H": True, "D": True}])
    assert sem.eval_lasso(f("G ((H & D) -> D)"), t1) is True


def test_weak_until_hand_evaluated():
    # b holds at position 1, a holds until then: a U b holds, so a W b holds.
    t = lasso([{"a": True, "b": False}], [{"a": False, "b": True}])
    assert sem.eval_lasso(f("a W b"), t) is True


def test_weak_until_via_globally_branch():
    t = lasso([], [{"a": True, "b": False}])
    assert sem.eval_lasso(f("a W b"), t) is True
    assert sem.eval_lasso(f("a U b"), t) is False


def test_until_needs_witness_on_loop():
    t = lasso([{"a": True, "b": False}], [{"a": True, "b": False}, {"a": False, "b": True}])
    assert sem.eval_lasso(f("a U b"), t) is True
    t2 = lasso([], [{"a": True, "b": False}])
    assert sem.eval_lasso(f("F b"), t2) is False
    assert sem.eval_lasso(f("G a"), t2) is True


def test_next_wraps_around_loop():
    t = lasso([], [{"a": False}, {"a": True}])
    assert sem.eval_lasso(f("X a"), t) is True
    assert sem.eval_lasso(f("X X a"), t) is False


def test_unbound_identifier_is_error():
    with pytest.raises(UnboundIdentifierError):
        sem.eval_lasso(f("G a"), lasso([], [{"b": True}]))


def test_check_equiv_identical_formulas():
    verdict = sem.check_equiv(f("G (trig -> rea)"), f("G (trig -> rea)"))
    assert isinstance(verdict, sem.EquivalentUpToBound)
    assert verdict.sampled_count == 10000


def test_check_equiv_finds_counterexample():
    verdict = sem.check_equiv(f("G a"), f("a"))
    assert isinstance(verdict, sem.Counterexample)
    assert sem.eval_lasso(f("G a"), verdict.trace) != sem.eval_lasso(f("a"), verdict.trace)


def test_check_equiv_renamed_formulas_are_equivalent():
    f1, _ = ltl.canonical_rename(f("G (trig -> rea)"))
    f2, _ = ltl.canonical_rename(f("G (trig -> inv)"))
    verdict = sem.check_equiv(f1, f2)
    assert isinstance(verdict, sem.EquivalentUpToBound)


def test_check_equiv_symmetry():
    bounds = sem.EquivBounds(random_samples=500, seed=7)
    pairs = [
        (f("G a"), f("a")),
        (f("a W b"), f("G a | (a U b)")),
        (f("F a"), f("true U a")),
        (f("a -> b"), f("!a | b")),
    ]
    for left, right in pairs:
        v1 = sem.check_equiv(left, right, bounds)
        v2 = sem.check_equiv(right, left, bounds)
        assert type(v1) is type(v2)


def test_check_equiv_trace_cap():
    bounds = sem.EquivBounds(max_traces=100)
    with pytest.raises(OracleLimitError):
        sem.check_equiv(f("a & b & c"), f("c & b & a"), bounds)


def test_check_equiv_compare_atoms_are_opaque():
    # t >= 30 and t >= 20 are treated as independent bits, but counterexample
    # construction only yields arithmetically realizable traces.
    verdict = sem.check_equiv(f("G (t >= 30)"), f("G (t >= 20)"))
    assert isinstance(verdict, sem.Counterexample)
    tr = verdict.trace
    assert sem.eval_lasso(f("G (t >= 30)"), tr) != sem.eval_lasso(f("G (t >= 20)"), tr)


def test_check_equiv_rejects_mixed_use_identifier():
    with pytest.raises(UnboundIdentifierError):
        sem.check_equiv(f("t & (t >= 30)"), f("t"))


# --- properties -----------------------------------------------------------

atom_names = st.sampled_from(["a", "b", "c", "d"])


def formulas(max_leaves=8):
    leaf = st.one_of(st.booleans().map(ltl.Bool), atom_names.map(ltl.atom))
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            inner.map(ltl.Not),
            inner.map(ltl.Always),
            inner.map(ltl.Eventually),
            inner.map(ltl.Next),
            st.tuples(inner, inner).map(lambda t: ltl.And(*t)),
            st.tuples(inner, inner).map(lambda t: ltl.Or(*t)),
            st.tuples(inner, inner).map(lambda t: ltl.Implies(*t)),
            st.tuples(inner, inner).map(lambda t: ltl.Until(*t)),
            st.tuples(inner, inner).map(lambda t: ltl.WeakUntil(*t)),
        ),
        max_leaves=max_leaves,
    )


def valuations():
    return st.fixed_dictionaries({n: st.booleans() for n in ["a", "b", "c", "d"]})


def lassos(max_len=4):
    return st.tuples(
        st.lists(valuations(), min_size=0, max_size=max_len),
        st.lists(valuations(), min_size=1, max_size=max_len),
    ).map(lambda t: sem.LassoTrace.of(*t))


@given(formulas(), lassos())
@settings(max_examples=300, deadline=None)
def test_simplify_preserves_lasso_semantics(g, t):
    assert sem.eval_lasso(ltl.simplify(g), t) == sem.eval_lasso(g, t)


@given(formulas(), formulas(), lassos())
@settings(max_examples=200, deadline=None)
def test_weak_until_definition(left, right, t):
    w = sem.eval_lasso(ltl.WeakUntil(left, right), t)
    g = sem.eval_lasso(ltl.Always(left), t)
    u = sem.eval_lasso(ltl.Until(left, right), t)
    assert w == (g or u)


@given(formulas(), lassos())
@settings(max_examples=200, deadline=None)
def test_loop_unrolling_invariance(g, t):
    assert sem.eval_lasso(g, t) == sem.eval_lasso(g, t.unroll_once())


@given(formulas(), lassos(max_len=3))
@settings(max_examples=150, deadline=None)
def test_family_evaluator_matches_scalar(g, t):
    # encode the concrete trace as an index in its (p, l) family and make
    # sure the vectorized path agrees with the scalar evaluator
    atoms = ["a", "b", "c", "d"]
    p, l = len(t.prefix), len(t.loop)
    index = 0
    for state in t.states():
        word = sum(1 << i for i, n in enumerate(atoms) if state[n])
        index = (index << len(atoms)) | word
    got = sem.eval_family(g, atoms, p, l, index, index + 1)
    assert bool(got[0]) == sem.eval_lasso(g, t)


@given(formulas(max_leaves=5), st.permutations([0, 1, 2, 3]))
@settings(max_examples=60, deadline=None)
def test_signature_permutation_matches_renaming(g, perm):
    atoms = ["a", "b", "c", "d"]
    bounds = sem.EquivBounds(prefix_max=1, loop_max=2, random_samples=0)
    renamed = ltl.rename_atoms(g, {atoms[i]: atoms[perm[i]] for i in range(4)})
    sig = sem.signature(g, atoms, bounds)
    sig_renamed = sem.signature(renamed, atoms, bounds)
    idx = sem.permutation_index(4, list(perm), bounds)
    assert (sig_renamed == sig[idx]).all()
