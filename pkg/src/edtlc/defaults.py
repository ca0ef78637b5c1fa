"""Packaged default artifacts: the shipped classification report and the
seed phrase corpus, plus the code that builds the seed templates."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import classify, cnl, edtl

_BASE_TEXT = ("After <trigger>, <invariant> is valid until either <release> "
              "or <reaction>, and <reaction> must occur within <delay> from "
              "<final>.")

# (combination key, text, renderable, note)
_SEED_ROWS = [
    ("vvvvvv", _BASE_TEXT, True, None),
    ("vtttvf", "After <trigger>, <reaction> occurs now.", True, None),
    ("vvtvvv",
     "After <trigger>, <invariant> is valid until either <release> or "
     "<reaction>, and <reaction> occurs within <delay> from now.", True, None),
    ("vvvttf", "After <trigger>, <invariant> is valid forever.", False,
     "broader semantics: reaction is constant in this combination, so the "
     "short phrase over-approximates the class formula; kept for parsing only"),
    ("vtttvf", "After <trigger>, <reaction> must occur.", False,
     "assistant phrasing kept for reference; not derivable from the grammar "
     "and its class already has a renderable template"),
    ("vvtvvv",
     "After <trigger>, <invariant> must hold and <delay> must not occur "
     "until either <release> or <reaction> occurs.", False,
     "assistant phrasing kept for reference; not derivable from the grammar"),
    ("vvvttf", "After <trigger>, <invariant> must hold until <final> occurs.",
     False,
     "assistant phrasing kept for reference; not derivable from the grammar"),
]


def seed_templates(report: classify.ClassificationReport) -> list[cnl.CnlTemplate]:
    """The shipped templates with class ids resolved against ``report``."""
    out = []
    for key, text, renderable, note in _SEED_ROWS:
        comb = edtl.AttributeCombination.from_key(key)
        cls = classify.canonical_class(comb, report)
        out.append(cnl.CnlTemplate(
            class_id=cls.class_id,
            text=text,
            provenance="paper",
            renderable=renderable,
            combination=comb,
            note=note,
        ))
    return out


def _data_path(name: str) -> Path:
    return Path(resources.files("edtlc").joinpath("data", name))


@lru_cache(maxsize=1)
def default_report() -> classify.ClassificationReport:
    """The classification report shipped with the package (default oracle
    bounds; regenerate with ``edtlc classify``)."""
    return classify.ClassificationReport.from_json(
        _data_path("default_report.json").read_text())


def seed_corpus_path() -> Path:
    return _data_path("seed_corpus.v1.jsonl")


def seed_corpus() -> cnl.CnlCorpus:
    return cnl.CnlCorpus.load(seed_corpus_path())
