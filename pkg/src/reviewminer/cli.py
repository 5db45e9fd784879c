"""`miner` command-line driver for the opinion-mining pipeline."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .corpus import TOKENIZER_MODES, TokenizerConfig, load_reviews
from .pipeline import (
    EXIT_CONFIG,
    STAGE_ASPECTS,
    STAGE_EXIT_CODES,
    STAGE_INGEST,
    STAGE_SURVEY,
    STAGE_TOPICS,
    STAGE_TRAIN,
    ConfigError,
    StageError,
    eval_polarity,
    load_config,
    run_pipeline,
    run_stage,
)


def _load(config_path: str, seed: int | None, out_dir: str | None, overrides=None):
    try:
        return load_config(config_path, seed=seed, out_dir=out_dir, overrides=overrides)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _run(cfg, stage: str, force: bool) -> None:
    try:
        artifacts = run_stage(cfg, stage, force=force)
    except StageError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(STAGE_EXIT_CODES[exc.stage])
    for name in artifacts:
        click.echo(f"wrote {cfg.out_dir / name}")


def _abs(path: str | None) -> str | None:
    return None if path is None else str(Path(path).resolve())


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(), help="pipeline config JSON"
)
seed_option = click.option("--seed", type=int, default=None, help="override the config seed")
out_dir_option = click.option(
    "--out-dir", type=click.Path(), default=None, help="override the output directory"
)
force_option = click.option(
    "--force", is_flag=True, help="accept artifacts with a mismatched config hash"
)


@click.group()
def main():
    """Opinion-mining survey pipeline over review corpora."""


@main.command()
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="ingest one review file ad hoc instead of the configured corpora")
@click.option("--tokenizer", "tokenizer_mode", type=click.Choice(TOKENIZER_MODES),
              default=None, help="tokenizer mode for --input")
@click.option("--lexicon", type=click.Path(), default=None,
              help="segmentation lexicon for --input with lexicon_max_match")
@config_option
@seed_option
@out_dir_option
@force_option
def ingest(input_path, tokenizer_mode, lexicon, config_path, seed, out_dir, force):
    """Load, tokenize, and persist the review corpora."""
    cfg = _load(config_path, seed, out_dir)
    if input_path is not None:
        tok = TokenizerConfig(
            mode=tokenizer_mode or "unicode_word", lexicon_path=lexicon
        )
        result = load_reviews(input_path, tokenizer=tok)
        click.echo(f"{input_path}: {len(result.documents)} documents, {result.dropped} dropped")
        return
    _run(cfg, STAGE_INGEST, force)


@main.command("train-polarity")
@config_option
@seed_option
@out_dir_option
@force_option
def train_polarity(config_path, seed, out_dir, force):
    """Train the polarity classifier and classify the review corpora."""
    cfg = _load(config_path, seed, out_dir)
    _run(cfg, STAGE_TRAIN, force)


@main.command("eval-polarity")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--corpus", "tag", default=None, help="corpus tag (default: all)")
@config_option
@seed_option
@out_dir_option
def eval_polarity_cmd(folds, tag, config_path, seed, out_dir):
    """Cross-validate the polarity classifier on the labeled corpora."""
    cfg = _load(config_path, seed, out_dir)
    tags = [tag] if tag else sorted(cfg.corpora)
    try:
        for t in tags:
            summary = eval_polarity(cfg, t, folds)
            click.echo(
                f"{t}: mean accuracy {summary['mean_accuracy']:.4f} "
                f"mean F1 {summary['mean_f1']:.4f} over {folds} folds"
            )
            for row in summary["per_fold"]:
                click.echo(
                    f"  fold {row['fold']}: acc {row['accuracy']:.4f} "
                    f"p {row['precision']:.4f} r {row['recall']:.4f} f1 {row['f1']:.4f}"
                )
    except (ConfigError, ValueError) as exc:
        click.echo(f"error: [eval-polarity] {exc}", err=True)
        sys.exit(STAGE_EXIT_CODES["eval-polarity"])


@main.command("fit-topics")
@click.option("--k", type=int, default=None, help="override lda.k")
@click.option("--alpha", type=float, default=None, help="override lda.alpha")
@click.option("--beta", type=float, default=None, help="override lda.beta")
@click.option("--iters", type=int, default=None, help="override lda.iterations")
@config_option
@seed_option
@out_dir_option
@force_option
def fit_topics(k, alpha, beta, iters, config_path, seed, out_dir, force):
    """Fit per-category topic models and extract candidate aspects."""
    lda = {"k": k, "alpha": alpha, "beta": beta, "iterations": iters}
    lda = {key: value for key, value in lda.items() if value is not None}
    cfg = _load(config_path, seed, out_dir, overrides={"lda": lda} if lda else None)
    _run(cfg, STAGE_TOPICS, force)


@main.command("aspects")
@click.option("--candidates", type=int, default=None, help="override aspects.candidates")
@click.option("--top", type=int, default=None, help="override aspects.top")
@click.option("--sentiment-lexicon", type=click.Path(), default=None,
              help="override every corpus sentiment lexicon path")
@config_option
@seed_option
@out_dir_option
@force_option
def aspects_cmd(candidates, top, sentiment_lexicon, config_path, seed, out_dir, force):
    """Score aspect sentiment and rank frequent/popular aspects."""
    overrides: dict = {}
    asp = {"candidates": candidates, "top": top}
    asp = {key: value for key, value in asp.items() if value is not None}
    if asp:
        overrides["aspects"] = asp
    if sentiment_lexicon is not None:
        peek = _load(config_path, seed, out_dir)
        overrides["corpora"] = {
            tag: {"sentiment_lexicon": _abs(sentiment_lexicon)} for tag in peek.corpora
        }
    cfg = _load(config_path, seed, out_dir, overrides=overrides or None)
    _run(cfg, STAGE_ASPECTS, force)


@main.command()
@click.option("--taxonomy", type=click.Path(), default=None, help="override the taxonomy path")
@click.option("--templates", type=click.Path(), default=None, help="override the template path")
@config_option
@seed_option
@out_dir_option
@force_option
def survey(taxonomy, templates, config_path, seed, out_dir, force):
    """Answer the questionnaire and render the report."""
    overrides = {}
    if taxonomy is not None:
        overrides["taxonomy"] = _abs(taxonomy)
    if templates is not None:
        overrides["templates"] = _abs(templates)
    cfg = _load(config_path, seed, out_dir, overrides=overrides or None)
    _run(cfg, STAGE_SURVEY, force)


@main.command()
@config_option
@seed_option
@out_dir_option
@force_option
def run(config_path, seed, out_dir, force):
    """Run the full pipeline: ingest through report."""
    cfg = _load(config_path, seed, out_dir)
    try:
        report = run_pipeline(cfg, force=force)
    except StageError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(STAGE_EXIT_CODES[exc.stage])
    click.echo(f"report written to {report}")


if __name__ == "__main__":
    main()
