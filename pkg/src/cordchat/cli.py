"""Command-line entry points: serve, ingest, ask, batch, report."""

import logging
import sys

import click

from .corpus import Corpus, build_corpus
from .embed import Approach, ApproachName
from .errors import ChatbotError
from .evaluation import (
    RUBRIC_NOTE,
    aggregate_by_approach,
    aggregate_by_question,
    check_reference_question_table,
    format_approach_table,
    format_question_table,
    iaa_report,
    load_questions,
    load_ratings,
    t_tests_by_question,
)
from .pipeline import GeneratorMode, PipelineConfig, answer_question, batch_generate
from .rank import Metric
from .service import ServiceConfig, create_app


def _pipeline_options(fn):
    fn = click.option("--approach", default=None, help="tfidf, bert, biobert or use.")(fn)
    fn = click.option("--metric", default=None,
                      type=click.Choice([m.value for m in Metric]))(fn)
    fn = click.option("--top-k", default=None, type=int)(fn)
    fn = click.option("--dedup/--no-dedup", default=None)(fn)
    fn = click.option("--generator", default=None,
                      type=click.Choice([g.value for g in GeneratorMode]))(fn)
    fn = click.option("--config", "config_path", default=None, type=click.Path(exists=True),
                      help="JSON config file; env vars still take precedence.")(fn)
    return fn


def _effective_config(config_path, approach, metric, top_k, dedup, generator) -> ServiceConfig:
    config = ServiceConfig.load(config_file=config_path)
    if approach:
        config.approach = approach.lower()
    if metric:
        config.metric = metric
    if top_k is not None:
        config.top_k = top_k
    if dedup is not None:
        config.dedup = dedup
    if generator:
        config.generator = generator
    return config


def _resolve_approach(config: ServiceConfig) -> Approach:
    name = ApproachName(config.approach)
    if name is ApproachName.TFIDF:
        return Approach(name)
    return Approach(name, endpoint=config.provider_endpoints.get(name.value))


def _load_corpus_or_fail(config: ServiceConfig) -> Corpus | None:
    if not config.corpus_path:
        return None
    from .service import _load_corpus

    corpus = _load_corpus(config)
    if corpus is None:
        raise click.ClickException(f"could not load corpus from {config.corpus_path}")
    return corpus


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose):
    """Question answering over a scientific-article corpus."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


@main.command()
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@_pipeline_options
def serve(host, port, approach, metric, top_k, dedup, generator, config_path):
    """Start the HTTP service."""
    import uvicorn

    config = _effective_config(config_path, approach, metric, top_k, dedup, generator)
    if host:
        config.host = host
    if port:
        config.port = port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


@main.command()
@click.argument("source_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", default="corpus.jsonl", show_default=True,
              help="Cache file to write (one JSON record per document).")
def ingest(source_dir, out):
    """Build a corpus cache from a directory of article files."""
    corpus = build_corpus(source_dir)
    corpus.save(out)
    click.echo(f"ingested {len(corpus)} documents ({corpus.rejected} rejected) -> {out}")


@main.command()
@click.argument("question")
@_pipeline_options
def ask(question, approach, metric, top_k, dedup, generator, config_path):
    """Run the pipeline once and print the answer with its scores."""
    config = _effective_config(config_path, approach, metric, top_k, dedup, generator)
    corpus = _load_corpus_or_fail(config)
    pipeline_config = PipelineConfig(
        approach=_resolve_approach(config),
        metric=Metric(config.metric),
        top_k=config.top_k,
        dedup=config.dedup,
        generator=GeneratorMode(config.generator),
        generator_endpoint=config.generator_endpoint,
        request_timeout=config.request_timeout,
    )
    try:
        response = answer_question(question, pipeline_config, corpus=corpus)
    except ChatbotError as exc:
        raise click.ClickException(f"[stage {exc.stage}] {exc}")
    click.echo(response.answer.text)
    click.echo("")
    for sentence, score, index in response.answer.selected:
        click.echo(f"  {score:+.4f}  [{index}] {sentence}")


@main.command()
@click.option("--samples", default=5, show_default=True, type=int)
@click.option("--approaches", "approach_names", default="tfidf,bert,biobert,use",
              show_default=True, help="Comma-separated approach list.")
@click.option("--out", default="answers.jsonl", show_default=True)
@click.option("--concurrency", default=4, show_default=True, type=int)
@_pipeline_options
def batch(samples, approach_names, out, concurrency,
          approach, metric, top_k, dedup, generator, config_path):
    """Generate the full question x approach x sample answer grid."""
    config = _effective_config(config_path, approach, metric, top_k, dedup, generator)
    corpus = _load_corpus_or_fail(config)
    approaches = []
    for name in approach_names.split(","):
        scoped = ServiceConfig(**{**vars(config), "approach": name.strip().lower()})
        approaches.append(_resolve_approach(scoped))
    pipeline_config = PipelineConfig(
        approach=approaches[0],
        metric=Metric(config.metric),
        top_k=config.top_k,
        dedup=config.dedup,
        generator=GeneratorMode(config.generator),
        generator_endpoint=config.generator_endpoint,
        request_timeout=config.request_timeout,
    )
    questions = load_questions()
    result = batch_generate(questions, approaches, samples, pipeline_config,
                            corpus=corpus, concurrency=concurrency)
    result.write_jsonl(out)
    click.echo(f"{len(result.records)} answers, {len(result.errors)} errors -> {out}")


@main.command()
@click.argument("scorefile", type=click.Path(exists=True, dir_okay=False))
def report(scorefile):
    """Aggregate a rating score file: per-approach and per-question tables,
    inter-annotator agreement and per-question t-tests."""
    records = load_ratings(scorefile)
    annotators = sorted({r.annotator for r in records})

    click.echo("== Average scores by approach ==")
    click.echo(format_approach_table(aggregate_by_approach(records)))
    click.echo("")
    click.echo("== Average scores by question ==")
    click.echo(format_question_table(aggregate_by_question(records)))
    click.echo("")

    if len(annotators) == 2:
        agreement = iaa_report(records, (annotators[0], annotators[1]))
        click.echo(f"Inter-annotator agreement (Pearson): {agreement:.3f}")
        click.echo("")
        click.echo("== One-tailed one-sample t-tests over per-question rating differences ==")
        for qid, result in t_tests_by_question(records).items():
            if result is None:
                click.echo(f"  #{qid}: degenerate sample (zero-variance differences)")
            else:
                click.echo(f"  #{qid}: t={result.t:.3f} df={result.df} p={result.p:.3f}")
        click.echo("")

    click.echo(RUBRIC_NOTE)
    flagged = check_reference_question_table()
    if flagged:
        click.echo("Published-table inconsistencies detected:")
        for flag in flagged:
            click.echo(f"  - {flag}")


if __name__ == "__main__":
    sys.exit(main())
