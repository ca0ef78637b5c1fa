"""edtlc: a compiler toolkit for event-driven temporal requirements.

Converts between attribute tables, LTL formulas, and controlled-natural-
language phrases; classifies attribute combinations into canonical
equivalence classes; generates assistant prompts and manages the phrase
corpus; and simulates the SUP observer pattern.
"""

__version__ = "0.1.0"

from .edtl import (  # noqa: F401
    Attribute,
    AttributeCombination,
    Requirement,
    Tristate,
    base_semantics,
    combination_of,
    enumerate_combinations,
    instantiate,
)
from .ltl import parse_ltl, render_ltl, simplify, substitute  # noqa: F401
from .propexpr import eval_prop, parse_prop, render_prop  # noqa: F401
from .semantics import EquivBounds, LassoTrace, check_equiv, eval_lasso  # noqa: F401
