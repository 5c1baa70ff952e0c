"""Operator command line.

Exit codes: 0 success, 1 usage error, 2 data error (bad input files or
values), 3 external-service error (LLM/HTTP backends).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .actions import KeywordClassifier
from .config import AppConfig, ConfigError, load_config
from .corpus import (
    CorpusFormatError,
    clean,
    extract_pairs,
    read_records,
    stats as corpus_stats,
    write_pairs,
)
from .engine import SessionConfig, write_transcript
from .llm import LlmError
from .lsde import ScoringError
from .policy import TableFormatError, compute_priors, write_table
from .sim import default_conditions, profile_user, run_experiment, DEFAULT_PROFILES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EXTERNAL = 3


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Config file (key = value lines).")
@click.option("--seed", type=int, default=None, help="Seed for stochastic subcommands.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable JSON output.")
@click.option("--verbose", is_flag=True, help="Chattier progress output on stderr.")
@click.pass_context
def cli(ctx: click.Context, config_path: str | None, seed: int | None, as_json: bool, verbose: bool) -> None:
    """Adaptive conversational survey engine."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["seed"] = seed
    ctx.obj["json"] = as_json
    ctx.obj["verbose"] = verbose


def _config(ctx: click.Context, **overrides) -> AppConfig:
    return load_config(ctx.obj.get("config_path"), overrides)


def _note(ctx: click.Context, message: str) -> None:
    if ctx.obj.get("verbose"):
        click.echo(message, err=True)


@cli.command()
@click.argument("input_log", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_table", type=click.Path(dir_okay=False))
@click.option("--pairs-out", type=click.Path(dir_okay=False), default=None, help="Also write the extracted pairs file.")
@click.pass_context
def priors(ctx: click.Context, input_log: str, output_table: str, pairs_out: str | None) -> None:
    """Compute the prior EV table from a historical conversation log."""
    config = _config(ctx)
    records = clean(read_records(input_log))
    pairs = extract_pairs(records, config.build_scorer(), KeywordClassifier())
    if not pairs:
        click.echo("warning: no exchange pairs found; writing an all-zero table", err=True)
    table = compute_priors(pairs)
    write_table(table, output_table)
    if pairs_out:
        write_pairs(pairs, pairs_out)
    summary = {
        "records": len(records),
        "pairs": len(pairs),
        "output": output_table,
    }
    if ctx.obj["json"]:
        click.echo(json.dumps(summary))
    else:
        click.echo(f"wrote {output_table}: {len(pairs)} pairs from {len(records)} cleaned records")


@cli.command()
@click.argument("text")
@click.pass_context
def score(ctx: click.Context, text: str) -> None:
    """Print the quality breakdown for one response text."""
    config = _config(ctx)
    scored = config.build_scorer().score(text)
    payload = {
        "length": scored.score.length,
        "disclosure": scored.score.disclosure,
        "emotion": scored.score.emotion,
        "specificity": scored.score.specificity,
        "composite": scored.score.composite,
        "word_count": scored.text.word_count,
        "flags": {
            "entities": scored.flags.entities,
            "temporal": scored.flags.temporal,
            "spatial": scored.flags.spatial,
        },
    }
    if ctx.obj["json"]:
        click.echo(json.dumps(payload))
    else:
        for key in ("length", "disclosure", "emotion", "specificity", "composite"):
            click.echo(f"{key} = {payload[key]:.4f}")
        flags = payload["flags"]
        click.echo(
            f"words = {payload['word_count']}, entities = {flags['entities']}, "
            f"temporal = {flags['temporal']}, spatial = {flags['spatial']}"
        )


@cli.command(name="stats")
@click.argument("input_log", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def stats_command(ctx: click.Context, input_log: str) -> None:
    """Descriptive statistics for a cleaned conversation log."""
    result = corpus_stats(clean(read_records(input_log)))
    if ctx.obj["json"]:
        click.echo(json.dumps(result.to_dict()))
        return
    click.echo(f"conversations        = {result.n_conversations}")
    click.echo(f"valid responses      = {result.n_valid_responses}")
    click.echo(f"exchange pairs       = {result.n_pairs}")
    click.echo(
        "exchanges/conversation = "
        f"{result.mean_exchanges:.1f}±{result.sd_exchanges:.1f} "
        f"(median {result.median_exchanges:.1f}, range {result.min_exchanges}-{result.max_exchanges})"
    )
    click.echo(
        "response words       = "
        f"{result.mean_response_words:.1f}±{result.sd_response_words:.1f} "
        f"(median {result.median_response_words:.1f})"
    )
    click.echo(f"single-exchange frac = {result.single_exchange_fraction:.3f}")


@cli.command()
@click.option("--design", type=click.Choice(["full", "quick"]), default="full", show_default=True,
              help="full: 4 conditions x 4 profiles x 5 reps; quick: 2 reps.")
@click.option("--users", type=click.Choice(["scripted"]), default="scripted", show_default=True)
@click.option("--reps", type=int, default=None, help="Override repetitions per cell.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for report.json, report.txt, and transcripts.")
@click.pass_context
def simulate(ctx: click.Context, design: str, users: str, reps: int | None, out_dir: str | None) -> None:
    """Run the controlled comparison experiment with simulated users."""
    config = _config(ctx)
    seed = ctx.obj.get("seed") or 0
    if reps is None:
        reps = 5 if design == "full" else 2
    _note(ctx, f"running {design} design with seed {seed}, {reps} reps")
    result = run_experiment(
        priors=config.load_priors(),
        conditions=default_conditions(),
        users=[profile_user(p) for p in DEFAULT_PROFILES],
        reps=reps,
        seed=seed,
        horizon=config.horizon,
        alpha=config.alpha,
        scorer=config.build_scorer(),
    )
    if out_dir:
        out = Path(out_dir)
        (out / "transcripts").mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps(result.report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        (out / "report.txt").write_text(result.report.render_text(), encoding="utf-8")
        for run in result.runs:
            name = f"{run.condition}__{run.profile}__rep{run.rep}.jsonl"
            write_transcript(run.transcript, out / "transcripts" / name)
        _note(ctx, f"artifacts written to {out}")
    if ctx.obj["json"]:
        click.echo(json.dumps(result.report.to_dict()))
    else:
        click.echo(result.report.render_text(), nl=False)


@cli.command()
@click.option("--topic", default="campus life", show_default=True)
@click.option("--role", default="student", show_default=True)
@click.option("--transcript", "transcript_path", type=click.Path(dir_okay=False), default=None,
              help="Write the session transcript here on exit.")
@click.pass_context
def chat(ctx: click.Context, topic: str, role: str, transcript_path: str | None) -> None:
    """Interactive terminal session; type /quit to stop early."""
    config = _config(ctx)
    engine = config.build_engine()
    session = engine.start_session(
        SessionConfig(
            role=role,
            topic=topic,
            horizon=config.horizon,
            alpha=config.alpha,
            schedule=config.schedule(),
            seed=ctx.obj.get("seed"),
        )
    )
    click.echo(f"bot> {session.opening_question}")
    while session.status == "active":
        try:
            text = click.prompt("you", prompt_suffix="> ")
        except (EOFError, click.Abort):
            break
        if text.strip() == "/quit":
            break
        if not text.strip():
            continue
        result = engine.step(session, text)
        if result.completed:
            click.echo("bot> That completes the survey. Thank you for your time!")
        else:
            click.echo(f"bot> {result.next_question}")
    transcript = engine.end_session(session)
    click.echo(f"session {transcript.status} after {len(transcript.exchanges)} exchanges", err=True)
    if transcript_path:
        write_transcript(transcript, transcript_path)
        _note(ctx, f"transcript written to {transcript_path}")


@cli.command()
@click.option("--host", default=None, help="Override bind host.")
@click.option("--port", type=int, default=None, help="Override bind port.")
@click.pass_context
def serve(ctx: click.Context, host: str | None, port: int | None) -> None:
    """Serve the HTTP session API."""
    import uvicorn

    from .service import create_app

    config = _config(ctx, bind_host=host, bind_port=port)
    app = create_app(config)
    uvicorn.run(app, host=config.bind_host, port=config.bind_port, log_level="warning")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except (ConfigError, CorpusFormatError, TableFormatError, ScoringError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATA
    except (LlmError, httpx.HTTPError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_EXTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
