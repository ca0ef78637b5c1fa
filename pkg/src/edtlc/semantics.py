"""Exact LTL evaluation over lasso traces and the bounded equivalence oracle.

A lasso trace is a finite prefix followed by a loop repeated forever; it
finitely represents an ultimately periodic infinite word.  Evaluation is
exact on the loop: greatest fixpoints for G and W, least fixpoints for
U and F, never a truncation.

The oracle enumerates every lasso up to the configured prefix/loop bounds
over all Boolean valuations of the formulas' atom set (vectorized with
numpy), then samples additional random lassos through the scalar
evaluator, so the two evaluation paths cross-check each other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import ltl
from . import propexpr as pe
from .errors import OracleLimitError, UnboundIdentifierError


@dataclass(frozen=True)
class LassoTrace:
    """prefix . loop^omega; the loop must be nonempty and every valuation
    must bind the same identifiers."""

    prefix: tuple[Mapping[str, pe.Value], ...]
    loop: tuple[Mapping[str, pe.Value], ...]

    def __post_init__(self):
        if len(self.loop) < 1:
            raise ValueError("lasso loop must be nonempty")
        keys = set(self.loop[0])
        if any(set(v) != keys for v in self.prefix + self.loop):
            raise ValueError("lasso valuations must bind one identifier set")

    @staticmethod
    def of(prefix, loop) -> "LassoTrace":
        return LassoTrace(tuple(dict(v) for v in prefix), tuple(dict(v) for v in loop))

    def states(self) -> tuple[Mapping[str, pe.Value], ...]:
        return self.prefix + self.loop

    def unroll_once(self) -> "LassoTrace":
        """Move one copy of the loop into the prefix (same infinite word)."""
        return LassoTrace(self.prefix + self.loop, self.loop)


def eval_lasso(f: ltl.Formula, trace: LassoTrace) -> bool:
    """Truth of ``f`` at position 0 of the infinite word prefix.loop^omega."""
    states = trace.states()
    n = len(states)
    loop_start = len(trace.prefix)

    def succ(i: int) -> int:
        return i + 1 if i < n - 1 else loop_start

    memo: dict[ltl.Formula, list[bool]] = {}

    def vec(g: ltl.Formula) -> list[bool]:
        cached = memo.get(g)
        if cached is not None:
            return cached
        if isinstance(g, ltl.Bool):
            out = [g.value] * n
        elif isinstance(g, ltl.Atom):
            out = [pe.eval_prop(g.expr, states[i]) for i in range(n)]
        elif isinstance(g, ltl.Not):
            inner = vec(g.operand)
            out = [not v for v in inner]
        elif isinstance(g, ltl.And):
            a, b = vec(g.left), vec(g.right)
            out = [a[i] and b[i] for i in range(n)]
        elif isinstance(g, ltl.Or):
            a, b = vec(g.left), vec(g.right)
            out = [a[i] or b[i] for i in range(n)]
        elif isinstance(g, ltl.Implies):
            a, b = vec(g.left), vec(g.right)
            out = [(not a[i]) or b[i] for i in range(n)]
        elif isinstance(g, ltl.Next):
            inner = vec(g.operand)
            out = [inner[succ(i)] for i in range(n)]
        elif isinstance(g, ltl.Always):
            out = _gfp(vec(g.operand), None, succ, n, conj=True)
        elif isinstance(g, ltl.Eventually):
            out = _lfp(vec(g.operand), None, succ, n)
        elif isinstance(g, ltl.Until):
            out = _lfp(vec(g.right), vec(g.left), succ, n)
        elif isinstance(g, ltl.WeakUntil):
            out = _gfp(vec(g.left), vec(g.right), succ, n, conj=False)
        else:
            raise TypeError(f"not a Formula: {g!r}")
        memo[g] = out
        return out

    return vec(f)[0]


def _lfp(target, hold, succ, n):
    """Least fixpoint of x_i = target_i or (hold_i and x_succ(i)).

    With ``hold=None`` the hold condition is constantly true (F).
    """
    x = [False] * n
    for _ in range(n + 1):
        changed = False
        for i in range(n - 1, -1, -1):
            v = target[i] or ((hold is None or hold[i]) and x[succ(i)])
            if v != x[i]:
                x[i] = v
                changed = True
        if not changed:
            break
    return x


def _gfp(hold, escape, succ, n, conj):
    """Greatest fixpoint.

    conj=True:  x_i = hold_i and x_succ(i)                  (G)
    conj=False: x_i = escape_i or (hold_i and x_succ(i))    (W)
    """
    x = [True] * n
    for _ in range(n + 1):
        changed = False
        for i in range(n - 1, -1, -1):
            if conj:
                v = hold[i] and x[succ(i)]
            else:
                v = escape[i] or (hold[i] and x[succ(i)])
            if v != x[i]:
                x[i] = v
                changed = True
        if not changed:
            break
    return x


# ---------------------------------------------------------------------------
# Vectorized evaluation over an enumerated trace family


def eval_family(f: ltl.Formula, atoms: list[str], prefix_len: int, loop_len: int,
                start: int, stop: int) -> np.ndarray:
    """Evaluate ``f`` at position 0 for a slice of the (p, l) trace family.

    Atom ``atoms[i]`` is bit i of each state word; a trace is the base-2^k
    number of its state words, most significant state first.  Returns a
    bool array for trace indices [start, stop).
    """
    k = len(atoms)
    n_pos = prefix_len + loop_len
    idx = np.arange(start, stop, dtype=np.int64)
    digits = []
    for j in range(n_pos):
        shift = k * (n_pos - 1 - j)
        digits.append((idx >> shift) & ((1 << k) - 1))

    def succ(j: int) -> int:
        return j + 1 if j < n_pos - 1 else prefix_len

    bit_of = {name: i for i, name in enumerate(atoms)}
    memo: dict[ltl.Formula, list[np.ndarray]] = {}

    def vec(g: ltl.Formula) -> list[np.ndarray]:
        cached = memo.get(g)
        if cached is not None:
            return cached
        if isinstance(g, ltl.Bool):
            out = [np.full(idx.shape, g.value)] * n_pos
        elif isinstance(g, ltl.Atom):
            bit = bit_of[g.key]
            out = [((digits[j] >> bit) & 1).astype(bool) for j in range(n_pos)]
        elif isinstance(g, ltl.Not):
            out = [~v for v in vec(g.operand)]
        elif isinstance(g, ltl.And):
            a, b = vec(g.left), vec(g.right)
            out = [a[j] & b[j] for j in range(n_pos)]
        elif isinstance(g, ltl.Or):
            a, b = vec(g.left), vec(g.right)
            out = [a[j] | b[j] for j in range(n_pos)]
        elif isinstance(g, ltl.Implies):
            a, b = vec(g.left), vec(g.right)
            out = [~a[j] | b[j] for j in range(n_pos)]
        elif isinstance(g, ltl.Next):
            inner = vec(g.operand)
            out = [inner[succ(j)] for j in range(n_pos)]
        elif isinstance(g, ltl.Always):
            out = _family_fix(vec(g.operand), None, succ, n_pos, least=False)
        elif isinstance(g, ltl.Eventually):
            out = _family_fix(vec(g.operand), None, succ, n_pos, least=True)
        elif isinstance(g, ltl.Until):
            out = _family_fix(vec(g.left), vec(g.right), succ, n_pos, least=True)
        elif isinstance(g, ltl.WeakUntil):
            out = _family_fix(vec(g.left), vec(g.right), succ, n_pos, least=False)
        else:
            raise TypeError(f"not a Formula: {g!r}")
        memo[g] = out
        return out

    return vec(f)[0]


def _family_fix(hold, target, succ, n_pos, least):
    """Positionwise fixpoint over the whole family at once.

    least=True:  x_j = target_j | (hold_j & x_succ(j))   (U; F when target None)
    least=False: x_j = target_j | (hold_j & x_succ(j))   greatest (W; G when
                 target None, degenerating to x_j = hold_j & x_succ(j))
    """
    if target is None and least:
        target, hold = hold, None  # F f: target is the operand, hold is true
    init = False if least else True
    x = [np.full(hold[0].shape if hold else target[0].shape, init) for _ in range(n_pos)]
    for _ in range(n_pos + 1):
        changed = False
        for j in range(n_pos - 1, -1, -1):
            nxt = x[succ(j)]
            if hold is None:
                step = nxt
            else:
                step = hold[j] & nxt
            if target is not None:
                v = target[j] | step
            else:
                v = step
            if not np.array_equal(v, x[j]):
                x[j] = v
                changed = True
        if not changed:
            break
    return x


# ---------------------------------------------------------------------------
# Bounded equivalence


@dataclass(frozen=True)
class EquivBounds:
    prefix_max: int = 2
    loop_max: int = 2
    random_samples: int = 10000
    seed: int = 0
    max_traces: int = 10**8
    random_size_max: int = 6

    def __post_init__(self):
        if self.prefix_max < 0 or self.loop_max < 1 or self.random_samples < 0:
            raise ValueError("oracle bounds must be positive")

    def as_dict(self) -> dict:
        return {
            "prefix_max": self.prefix_max,
            "loop_max": self.loop_max,
            "random_samples": self.random_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EquivalentUpToBound:
    prefix_bound: int
    loop_bound: int
    sampled_count: int


@dataclass(frozen=True)
class Counterexample:
    trace: LassoTrace


EquivVerdict = EquivalentUpToBound | Counterexample

_CHUNK = 1 << 20


def shape_sizes(num_atoms: int, bounds: EquivBounds) -> list[tuple[int, int, int]]:
    """(prefix_len, loop_len, trace_count) for every enumerated shape."""
    v = 1 << num_atoms
    out = []
    for p in range(bounds.prefix_max + 1):
        for l in range(1, bounds.loop_max + 1):
            out.append((p, l, v ** (p + l)))
    return out


def enumerated_trace_count(num_atoms: int, bounds: EquivBounds) -> int:
    return sum(c for _, _, c in shape_sizes(num_atoms, bounds))


def _split_compares(atoms: list[str]) -> dict[str, pe.PropExpr]:
    """Map each atom key back to its leaf expression."""
    out = {}
    for key in atoms:
        out[key] = pe.parse_prop(key)
    return out


def decode_valuations(atoms: list[str], words: list[int]) -> list[dict[str, pe.Value]] | None:
    """Turn abstract state words into concrete valuations.

    Variable atoms become Booleans.  Comparison atoms are realized by
    choosing an integer for their variable that matches the requested
    truth values; if the bit pattern is arithmetically unrealizable at
    some position, returns None.
    """
    leaves = _split_compares(atoms)
    plain = [k for k in atoms if isinstance(leaves[k], pe.Var)]
    compares = [k for k in atoms if isinstance(leaves[k], pe.Compare)]
    compare_vars: dict[str, list[str]] = {}
    for k in compares:
        compare_vars.setdefault(leaves[k].name, []).append(k)
    for name in compare_vars:
        if name in plain:
            raise UnboundIdentifierError(
                f"identifier {name!r} used both as Boolean atom and comparison variable"
            )

    out = []
    for word in words:
        val: dict[str, pe.Value] = {}
        for k in plain:
            val[leaves[k].name] = bool((word >> atoms.index(k)) & 1)
        ok = True
        for name, keys in compare_vars.items():
            wanted = [(leaves[k], bool((word >> atoms.index(k)) & 1)) for k in keys]
            chosen = _realize_int(wanted)
            if chosen is None:
                ok = False
                break
            val[name] = chosen
        if not ok:
            return None
        out.append(val)
    return out


def _realize_int(wanted: list[tuple[pe.Compare, bool]]) -> int | None:
    """Find an integer satisfying each (comparison, desired truth) pair."""
    candidates = {0}
    for cmp_, _ in wanted:
        candidates.update({cmp_.literal - 1, cmp_.literal, cmp_.literal + 1})
    for c in sorted(candidates):
        if all(pe.eval_prop(cmp_, {cmp_.name: c}) == want for cmp_, want in wanted):
            return c
    return None


def _trace_from_index(atoms, p, l, index) -> LassoTrace | None:
    k = len(atoms)
    n_pos = p + l
    words = []
    for j in range(n_pos):
        shift = k * (n_pos - 1 - j)
        words.append((index >> shift) & ((1 << k) - 1))
    vals = decode_valuations(atoms, words)
    if vals is None:
        return None
    return LassoTrace(tuple(vals[:p]), tuple(vals[p:]))


def check_equiv(f: ltl.Formula, g: ltl.Formula,
                bounds: EquivBounds = EquivBounds()) -> EquivVerdict:
    """Bounded equivalence of two formulas over their combined atom set.

    Exhaustively enumerates every lasso with |prefix| <= prefix_max and
    |loop| <= loop_max over all Boolean valuations of the atoms, then
    evaluates ``random_samples`` extra random lassos.  Returns the first
    distinguishing trace found, in a fixed deterministic order.
    """
    atoms = sorted(set(ltl.atoms_of(f)) | set(ltl.atoms_of(g)))
    total = enumerated_trace_count(len(atoms), bounds)
    if total > bounds.max_traces:
        raise OracleLimitError(
            f"enumeration of {total} traces exceeds cap {bounds.max_traces}"
        )

    for p, l, count in shape_sizes(len(atoms), bounds):
        for start in range(0, count, _CHUNK):
            stop = min(start + _CHUNK, count)
            vf = eval_family(f, atoms, p, l, start, stop)
            vg = eval_family(g, atoms, p, l, start, stop)
            diff = vf != vg
            if diff.any():
                for offset in np.flatnonzero(diff):
                    trace = _trace_from_index(atoms, p, l, start + int(offset))
                    if trace is not None:
                        return Counterexample(trace)

    rng = random.Random(bounds.seed)
    k = len(atoms)
    for _ in range(bounds.random_samples):
        p = rng.randint(0, bounds.random_size_max)
        l = rng.randint(1, bounds.random_size_max)
        words = [rng.getrandbits(k) if k else 0 for _ in range(p + l)]
        vals = decode_valuations(atoms, words)
        if vals is None:
            continue
        trace = LassoTrace(tuple(vals[:p]), tuple(vals[p:]))
        if eval_lasso(f, trace) != eval_lasso(g, trace):
            return Counterexample(trace)

    return EquivalentUpToBound(bounds.prefix_max, bounds.loop_max, bounds.random_samples)


# ---------------------------------------------------------------------------
# Signatures: the exhaustive phase of check_equiv as a reusable bit vector


def signature(f: ltl.Formula, atoms: list[str], bounds: EquivBounds) -> np.ndarray:
    """Truth of ``f`` over the full enumerated trace family, concatenated
    shape by shape in enumeration order."""
    parts = []
    for p, l, count in shape_sizes(len(atoms), bounds):
        for start in range(0, count, _CHUNK):
            stop = min(start + _CHUNK, count)
            parts.append(eval_family(f, atoms, p, l, start, stop))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


def permutation_index(num_atoms: int, perm: list[int], bounds: EquivBounds) -> np.ndarray:
    """Trace-index permutation matching an atom renaming.

    ``perm[i] = j`` renames atom i to atom j.  Indexing a formula's
    signature with the returned array yields the signature of the renamed
    formula over the same enumeration: the renamed formula reads bit
    ``perm[i]`` of each state wherever the original read bit i.
    """
    k = num_atoms
    v = 1 << k
    state_map = np.zeros(v, dtype=np.int64)
    for s in range(v):
        t = 0
        for i in range(k):
            if (s >> perm[i]) & 1:
                t |= 1 << i
        state_map[s] = t
    out = []
    base = 0
    for p, l, count in shape_sizes(k, bounds):
        n_pos = p + l
        idx = np.arange(count, dtype=np.int64)
        mapped = np.zeros(count, dtype=np.int64)
        for j in range(n_pos):
            shift = k * (n_pos - 1 - j)
            digit = (idx >> shift) & (v - 1)
            mapped |= state_map[digit] << shift
        out.append(base + mapped)
        base += count
    return np.concatenate(out)
