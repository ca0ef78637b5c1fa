"""Command-line surface.

Thin argument handling over the library; stdout carries only artifact
payloads, diagnostics go to stderr.  Exit codes: 0 success, 1 usage or
parse error, 2 validation diagnostics, 3 classification discrepancy,
4 monitor failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__, classify, cnl, defaults, edtl, ltl, promptgen, sup
from . import semantics as sem
from .errors import (
    AllVariableError,
    AmbiguousPhraseError,
    EdtlcError,
    ExprSyntaxError,
    NoTemplateError,
    PhraseSyntaxError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIAGNOSTICS = 2
EXIT_DISCREPANCY = 3
EXIT_MONITOR_FAIL = 4


def _err(message: str) -> None:
    click.echo(f"error: {message}", err=True)


def _bounds_options(fn):
    fn = click.option("--prefix", "prefix_max", default=2, show_default=True,
                      help="max lasso prefix length for the oracle")(fn)
    fn = click.option("--loop", "loop_max", default=2, show_default=True,
                      help="max lasso loop length for the oracle")(fn)
    fn = click.option("--samples", "random_samples", default=10000,
                      show_default=True, help="random lassos after enumeration")(fn)
    fn = click.option("--seed", default=0, show_default=True,
                      help="seed for the random-lasso sampler")(fn)
    return fn


def _make_bounds(prefix_max, loop_max, random_samples, seed) -> sem.EquivBounds:
    return sem.EquivBounds(prefix_max=prefix_max, loop_max=loop_max,
                           random_samples=random_samples, seed=seed)


def _load_corpus(path: str | None) -> cnl.CnlCorpus:
    if path is None:
        return defaults.seed_corpus()
    return cnl.CnlCorpus.load(path)


def _load_report(path: str | None) -> classify.ClassificationReport:
    if path is None:
        return defaults.default_report()
    return classify.ClassificationReport.from_json(Path(path).read_text())


@click.group()
@click.version_option(__version__)
def cli():
    """Convert event-driven temporal requirements between attribute
    tables, LTL formulas, and controlled-natural-language phrases."""


@cli.command("semantics")
@click.argument("req_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--simplify", "do_simplify", is_flag=True,
              help="apply the rewriting simplifier")
def cmd_semantics(req_file, do_simplify):
    """Print the LTL semantics of a requirement JSON file."""
    req = edtl.Requirement.from_json(Path(req_file).read_text())
    click.echo(ltl.render_ltl(edtl.instantiate(req, do_simplify)))
    return EXIT_OK


@cli.command("classify")
@_bounds_options
@click.option("--out", "out_file", type=click.Path(dir_okay=False),
              help="write the report here instead of stdout")
def cmd_classify(prefix_max, loop_max, random_samples, seed, out_file):
    """Partition all 729 attribute combinations into semantic classes."""
    report = classify.classify_all(
        _make_bounds(prefix_max, loop_max, random_samples, seed))
    text = report.to_json()
    if out_file:
        Path(out_file).write_text(text)
    else:
        click.echo(text, nl=False)
    n = len(report.classes)
    if n != classify.EXPECTED_CLASS_COUNT:
        click.echo(
            f"discrepancy: {n} classes (expected "
            f"{classify.EXPECTED_CLASS_COUNT}); the report carries a witness "
            f"or exhausted-bijection note for every unmerged pair",
            err=True)
        return EXIT_DISCREPANCY
    return EXIT_OK


@cli.command("render")
@click.argument("req_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", "corpus_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False))
def cmd_render(req_file, corpus_file, report_file):
    """Render a requirement JSON file as a CNL phrase."""
    req = edtl.Requirement.from_json(Path(req_file).read_text())
    phrase = cnl.render_requirement(req, _load_corpus(corpus_file),
                                    _load_report(report_file))
    click.echo(phrase)
    return EXIT_OK


@cli.command("parse")
@click.argument("phrase")
@click.option("--corpus", "corpus_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False))
def cmd_parse(phrase, corpus_file, report_file):
    """Parse a CNL phrase back into requirement JSON."""
    result = cnl.parse_requirement(phrase, _load_corpus(corpus_file),
                                   _load_report(report_file))
    click.echo(json.dumps(result.requirement.to_json_dict()))
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    return EXIT_DIAGNOSTICS if result.warnings else EXIT_OK


@cli.command("prompts")
@click.option("--comb", "comb_key", required=True,
              help="combination key, six letters from {v,t,f}")
@click.option("--with-semantics", is_flag=True,
              help="append the reduced-formula sentence")
@click.option("--hints", is_flag=True,
              help="append the constant-attribute hints text")
@click.option("--explain/--no-explain", default=True, show_default=True,
              help="request an explanation in the basic prompt")
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default="prompts", show_default=True)
def cmd_prompts(comb_key, with_semantics, hints, explain, report_file, out_dir):
    """Write the assistant prompt for one attribute combination."""
    comb = edtl.AttributeCombination.from_key(comb_key)
    report = _load_report(report_file) if (with_semantics or report_file) else None
    bundle = promptgen.build_bundle(comb, report, with_semantics=with_semantics,
                                    hints=hints, include_explain=explain)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / f"{comb.key}.txt"
    target.write_text(bundle.render())
    click.echo(str(target))
    return EXIT_OK


@cli.command("ingest")
@click.argument("response_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--comb", "comb_key", required=True)
@click.option("--corpus", "corpus_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="corpus file; version+1 is written next to it")
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False))
def cmd_ingest(response_file, comb_key, corpus_file, report_file):
    """Validate an assistant response and append it to a new corpus version."""
    comb = edtl.AttributeCombination.from_key(comb_key)
    corpus = _load_corpus(corpus_file)
    result = promptgen.ingest_response(comb, Path(response_file).read_text(),
                                       corpus, _load_report(report_file))
    if not result.ok:
        for d in result.diagnostics:
            click.echo(f"diagnostic: {d}", err=True)
        return EXIT_DIAGNOSTICS
    click.echo(json.dumps(result.template.to_json_dict()))
    if result.corpus is not None:
        click.echo(f"wrote corpus version {result.corpus.version}: "
                   f"{result.corpus.path}", err=True)
    return EXIT_OK


@cli.command("equiv")
@click.argument("formula1")
@click.argument("formula2")
@_bounds_options
def cmd_equiv(formula1, formula2, prefix_max, loop_max, random_samples, seed):
    """Check bounded equivalence of two formulas."""
    f = ltl.parse_ltl(formula1)
    g = ltl.parse_ltl(formula2)
    verdict = sem.check_equiv(f, g, _make_bounds(prefix_max, loop_max,
                                                 random_samples, seed))
    if isinstance(verdict, sem.EquivalentUpToBound):
        click.echo(json.dumps({
            "equivalent": True,
            "prefix_bound": verdict.prefix_bound,
            "loop_bound": verdict.loop_bound,
            "sampled_count": verdict.sampled_count,
        }))
        return EXIT_OK
    click.echo(json.dumps({
        "equivalent": False,
        "counterexample": {
            "prefix": [dict(v) for v in verdict.trace.prefix],
            "loop": [dict(v) for v in verdict.trace.loop],
        },
    }))
    return EXIT_DIAGNOSTICS


@cli.group("sup")
def cmd_sup():
    """Observer for the trigger/action timing pattern."""


@cmd_sup.command("run")
@click.argument("params_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("trace_file", type=click.Path(exists=True, dir_okay=False))
def cmd_sup_run(params_file, trace_file):
    """Run the observer over a trace CSV with the given parameter JSON."""
    params = sup.SupParameters.from_json(Path(params_file).read_text())
    trace = sup.load_trace_csv(Path(trace_file).read_text())
    verdict = sup.run_monitor(params, trace)
    click.echo(verdict.to_json(), nl=False)
    return EXIT_OK if verdict.passed else EXIT_MONITOR_FAIL


@cli.command("grammar")
def cmd_grammar():
    """Print the controlled-natural-language grammar."""
    click.echo(cnl.grammar_export(), nl=False)
    return EXIT_OK


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--corpus", "corpus_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_file", type=click.Path(exists=True, dir_okay=False))
def cmd_serve(host, port, corpus_file, report_file):
    """Serve the toolkit as an HTTP API."""
    import uvicorn

    from .service.app import create_app

    app = create_app(corpus_path=corpus_file, report_path=report_file)
    uvicorn.run(app, host=host, port=port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and map errors onto the stable exit codes."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
        return rv if isinstance(rv, int) else EXIT_OK
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        _err(exc.format_message())
        return EXIT_USAGE
    except click.ClickException as exc:
        _err(exc.format_message())
        return EXIT_USAGE
    except (NoTemplateError, AmbiguousPhraseError) as exc:
        _err(str(exc))
        return EXIT_DIAGNOSTICS
    except (ExprSyntaxError, PhraseSyntaxError, AllVariableError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except EdtlcError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(str(exc))
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
