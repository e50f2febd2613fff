"""Single command-line entry point for every workflow.

Subcommands: generate | answer | reward score | reward serve | eval |
adversarial | judge | transfer | audit.  A JSON config file can provide
per-section defaults; explicit flags win.  Outputs are written atomically
(temp file + rename).  Exit codes: 0 success, 1 runtime failure, 2
usage/config error.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
import tempfile
from functools import wraps

import click

from . import adversarial, generator, harness, judging, plots
from .client import EndpointConfig, HttpChatClient
from .errors import ConfigError, SchemaError, TomforgeError
from .oracle import answer_query
from .rewards import RewardConfig, score_to_wire, wire_json
from .story import parse_question, parse_story, surface_answer

log = logging.getLogger("tomforge")

CONFIG_SECTIONS = ("generate", "reward", "eval", "adversarial", "judge", "transfer", "client")


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    for key in cfg:
        if key not in CONFIG_SECTIONS:
            raise ConfigError(f"unknown config section {key!r}")
    return cfg


def section(ctx: click.Context, name: str) -> dict:
    cfg = ctx.obj.get("config", {})
    sec = cfg.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    return sec


def pick(ctx: click.Context, sec: dict, key: str, flag_value, default):
    """Flag if given, else config-file value, else default."""
    source = ctx.get_parameter_source(key.replace("-", "_"))
    if flag_value is not None and source is not None and source.name == "COMMANDLINE":
        return flag_value
    if key in sec:
        return sec[key]
    if flag_value is not None:
        return flag_value
    return default


def handle_errors(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return fn(*args, **kwargs)
        except (ConfigError, SchemaError, FileNotFoundError) as e:
            _report_error(ctx, e)
            sys.exit(2)
        except TomforgeError as e:
            _report_error(ctx, e)
            sys.exit(1)

    return wrapper


def _report_error(ctx: click.Context, exc: Exception) -> None:
    if ctx.obj.get("json_errors"):
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        click.echo(json.dumps(payload), err=True)
    else:
        click.echo(f"error: {exc}", err=True)


def _log_run(name: str, resolved: dict) -> None:
    log.info("%s config: %s", name, json.dumps(resolved, sort_keys=True, default=str))


def _endpoint_client(ctx: click.Context, endpoint: str | None, model: str | None) -> HttpChatClient:
    sec = section(ctx, "client")
    cfg = EndpointConfig.from_env()
    if sec.get("base_url"):
        cfg.base_url = sec["base_url"]
    if endpoint:
        cfg.base_url = endpoint
    if sec.get("api_key"):
        cfg.api_key = sec["api_key"]
    if model or sec.get("model_name"):
        cfg.model_name = model or sec["model_name"]
    for key in ("timeout_s", "max_retries", "backoff_s", "requests_per_sec"):
        if key in sec:
            setattr(cfg, key, sec[key])
    return HttpChatClient(cfg)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--seed", type=int, default=None, help="Default seed for subcommands.")
@click.option("--json-errors", is_flag=True, default=False, help="Machine-readable errors on stderr.")
@click.option("--log-level", default="INFO", show_default=True)
@click.pass_context
def main(ctx: click.Context, config_path: str | None, seed: int | None,
         json_errors: bool, log_level: str) -> None:
    """Story benchmark toolchain: generate, answer, score, evaluate."""
    logging.basicConfig(level=getattr(logging, log_level.upper(), logging.INFO),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    ctx.ensure_object(dict)
    ctx.obj["json_errors"] = json_errors
    ctx.obj["seed"] = seed
    try:
        ctx.obj["config"] = load_config_file(config_path)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


def resolve_seed(ctx: click.Context, sec: dict, flag_value: int | None) -> int:
    """Subcommand flag, else config section, else global --seed, else 0."""
    if flag_value is not None:
        return int(flag_value)
    if "seed" in sec:
        return int(sec["seed"])
    if ctx.obj.get("seed") is not None:
        return int(ctx.obj["seed"])
    return 0


@main.command("generate")
@click.option("--profile", type=click.Choice(["paper", "custom"]), default="custom", show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--samples-per-order", type=int, default=None)
@click.option("--orders", default=None, help="Comma-separated belief orders, e.g. 0,1,2.")
@click.option("--n-agents", type=int, default=None)
@click.option("--n-chapters", type=int, default=None)
@click.option("--distractor-rate", type=float, default=None)
@click.option("--claim-rate", type=float, default=None)
@click.pass_context
@handle_errors
def generate_cmd(ctx, profile, seed, out_dir, samples_per_order, orders,
                 n_agents, n_chapters, distractor_rate, claim_rate):
    """Generate order-stratified dataset splits as JSONL files."""
    sec = section(ctx, "generate")
    seed = resolve_seed(ctx, sec, seed)
    cfg = generator.paper_profile(seed=seed)
    if profile == "custom":
        overrides = {}
        if (v := pick(ctx, sec, "samples-per-order", samples_per_order, None)) is not None:
            overrides["samples_per_order"] = int(v)
        if (v := pick(ctx, sec, "orders", orders, None)) is not None:
            parsed = v if isinstance(v, (list, tuple)) else [int(x) for x in str(v).split(",") if x != ""]
            overrides["orders"] = tuple(int(x) for x in parsed)
        if (v := pick(ctx, sec, "n-agents", n_agents, None)) is not None:
            overrides["n_agents"] = int(v)
        if (v := pick(ctx, sec, "n-chapters", n_chapters, None)) is not None:
            overrides["n_chapters"] = int(v)
        if (v := pick(ctx, sec, "distractor-rate", distractor_rate, None)) is not None:
            overrides["distractor_rate"] = float(v)
        if (v := pick(ctx, sec, "claim-rate", claim_rate, None)) is not None:
            overrides["claim_rate"] = float(v)
        cfg = dataclasses.replace(cfg, **overrides)
    _log_run("generate", {"profile": profile, "seed": seed, **dataclasses.asdict(cfg)})

    splits = generator.build_dataset(cfg)
    os.makedirs(out_dir, exist_ok=True)
    for name, rows in (("train", splits.train), ("val", splits.val), ("test_ood", splits.test_ood)):
        write_atomic(os.path.join(out_dir, f"{name}.jsonl"), "".join(r.to_json() + "\n" for r in rows))
    click.echo(f"wrote {len(splits.train)}/{len(splits.val)}/{len(splits.test_ood)} "
               f"train/val/test_ood samples to {out_dir}")


@main.command("answer")
@click.option("--story", "story_path", required=True, type=click.Path(exists=True))
@click.option("--question", required=True)
@handle_errors
def answer_cmd(story_path, question):
    """Answer one question against a templated story file."""
    with open(story_path, encoding="utf-8") as f:
        story = parse_story(f.read().strip())
    query = parse_question(question.strip())
    click.echo(surface_answer(story, answer_query(story, query)))


@main.group("reward")
def reward_group():
    """Score responses from files or over HTTP."""


@reward_group.command("score")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--implicit-think", is_flag=True, default=None)
@click.pass_context
@handle_errors
def reward_score_cmd(ctx, in_path, out_path, implicit_think):
    """responses.jsonl ({response, ground_truth} rows) -> rewards.jsonl."""
    sec = section(ctx, "reward")
    implicit = bool(pick(ctx, sec, "implicit-think", implicit_think, False))
    _log_run("reward-score", {"in": in_path, "out": out_path, "implicit_think": implicit})
    cfg = RewardConfig(implicit_think=implicit)
    lines = []
    with open(in_path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                row = json.loads(raw)
                response, truth = row["response"], row["ground_truth"]
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise SchemaError(lineno, "response/ground_truth", str(e)) from e
            item_cfg = cfg
            if "implicit_think" in row:
                item_cfg = RewardConfig(implicit_think=bool(row["implicit_think"]))
            lines.append(wire_json(score_to_wire(response, truth, item_cfg)))
    write_atomic(out_path, "".join(line + "\n" for line in lines))
    click.echo(f"scored {len(lines)} responses -> {out_path}")


@reward_group.command("serve")
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--implicit-think", is_flag=True, default=None)
@click.pass_context
@handle_errors
def reward_serve_cmd(ctx, port, host, implicit_think):
    """Run the stateless scoring service."""
    from .reward_service import serve

    sec = section(ctx, "reward")
    port = int(pick(ctx, sec, "port", port, 8731))
    implicit = bool(pick(ctx, sec, "implicit-think", implicit_think, False))
    _log_run("reward-serve", {"port": port, "host": host, "implicit_think": implicit})
    serve(port=port, host=host, implicit_think=implicit)


@main.command("eval")
@click.option("--dataset", "dataset_path", required=True, type=click.Path())
@click.option("--style", type=click.Choice(list(harness.STYLES)), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--concurrency", type=int, default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--max-tokens", type=int, default=None)
@click.option("--out", "report_path", required=True, type=click.Path())
@click.option("--records", "records_path", type=click.Path(), default=None)
@click.option("--figures", "figures_dir", type=click.Path(), default=None)
@click.option("--fail-fast", is_flag=True, default=False)
@click.option("--seed", type=int, default=None, help="Bootstrap seed (default 0).")
@click.pass_context
@handle_errors
def eval_cmd(ctx, dataset_path, style, endpoint, model, concurrency, temperature,
             max_tokens, report_path, records_path, figures_dir, fail_fast, seed):
    """Evaluate a chat endpoint on a dataset and write a JSON report."""
    if not os.path.exists(dataset_path):
        raise ConfigError(f"dataset not found: {dataset_path}")
    sec = section(ctx, "eval")
    seed = resolve_seed(ctx, sec, seed)
    style = pick(ctx, sec, "style", style, "rl")
    concurrency = int(pick(ctx, sec, "concurrency", concurrency, 4))
    temperature = float(pick(ctx, sec, "temperature", temperature, 0.0))
    max_tokens = int(pick(ctx, sec, "max-tokens", max_tokens, 1024))
    _log_run("eval", {"dataset": dataset_path, "style": style, "concurrency": concurrency,
                      "endpoint": endpoint or "<env>", "seed": seed})

    samples = harness.load_dataset(dataset_path)
    client = _endpoint_client(ctx, endpoint, model)
    records, report = harness.evaluate(
        client, samples, style=style, concurrency=concurrency,
        temperature=temperature, max_tokens=max_tokens, fail_fast=fail_fast,
        bootstrap_seed=seed,
    )
    write_atomic(report_path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    if records_path:
        write_atomic(records_path, "".join(
            json.dumps(dataclasses.asdict(r), ensure_ascii=False) + "\n" for r in records
        ))
    if figures_dir:
        plots.figure_dir(figures_dir)
        if report.per_order:
            plots.save_accuracy_by_order(report, os.path.join(figures_dir, "accuracy_by_order.png"))
        plots.save_response_lengths(records, os.path.join(figures_dir, "response_length.png"))
    click.echo(f"accuracy {report.accuracy:.4f} over {report.n} samples -> {report_path}")


@main.command("adversarial")
@click.option("--agents", default="olivia,chloe,oliver", show_default=True)
@click.option("--room", default="playroom", show_default=True)
@click.option("--object", "obj", default="tangerine", show_default=True)
@click.option("--containers", default="blue_pantry,red_bottle,green_suitcase", show_default=True)
@click.option("--max-expansions", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--min-depth", type=int, default=None)
@click.option("--beam", type=int, default=None)
@click.option("--scorer", type=click.Choice(["synthetic", "endpoint"]), default="synthetic", show_default=True)
@click.option("--endpoint", default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
@handle_errors
def adversarial_cmd(ctx, agents, room, obj, containers, max_expansions, max_depth,
                    min_depth, beam, scorer, endpoint, out_path):
    """Search for a story the scorer rates hardest; write story + questions."""
    sec = section(ctx, "adversarial")
    budget = adversarial.SearchBudget(
        max_expansions=int(pick(ctx, sec, "max-expansions", max_expansions, 5000)),
        max_depth=int(pick(ctx, sec, "max-depth", max_depth, 8)),
        min_depth=int(pick(ctx, sec, "min-depth", min_depth, 4)),
        beam=int(pick(ctx, sec, "beam", beam, 64)),
    )
    context = adversarial.SearchContext(
        agents=tuple(a.strip() for a in agents.split(",") if a.strip()),
        room=room,
        object=obj,
        containers=tuple(c.strip() for c in containers.split(",") if c.strip()),
    )
    _log_run("adversarial", {"agents": context.agents, "budget": dataclasses.asdict(budget),
                             "scorer": scorer})
    if scorer == "synthetic":
        difficulty = adversarial.SyntheticDifficultyScorer(context)
    else:
        difficulty = adversarial.ModelDifficultyScorer(_endpoint_client(ctx, endpoint, None))
    result = adversarial.astar_search(context, difficulty, budget)
    from .story import render_question, render_story

    payload = {
        "story": render_story(result.story),
        "questions": [
            {"question": render_question(q), "answer": answer_query(result.story, q)}
            for q in context.questions(result.story)
        ],
        "score": result.score,
        "divergence_points": result.divergence,
        "expansions": result.expansions,
        "exhausted": result.exhausted,
    }
    write_atomic(out_path, json.dumps(payload, indent=2) + "\n")
    click.echo(f"score {result.score:.3f}, divergence {result.divergence}, "
               f"{result.expansions} expansions -> {out_path}")


def _load_thinking_samples(records_path: str, dataset_path: str | None) -> list:
    """Samples with thinking traces, either inline or joined via --dataset."""
    rows = harness.load_dataset(records_path) if _looks_like_samples(records_path) else None
    if rows is not None and all(r.thinking is not None for r in rows):
        return rows
    if not dataset_path:
        raise ConfigError("records lack story text; pass --dataset to join on sample_id")
    by_id = {s.id: s for s in harness.load_dataset(dataset_path)}
    joined = []
    with open(records_path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                row = json.loads(raw)
            except json.JSONDecodeError as e:
                raise SchemaError(lineno, "<json>", str(e)) from e
            sid = row.get("sample_id") or row.get("id")
            if sid not in by_id:
                raise SchemaError(lineno, "sample_id", f"unknown sample {sid!r}")
            thinking = row.get("thinking")
            if thinking is None and "raw_response" in row:
                from .rewards import parse_tags

                parse = parse_tags(row["raw_response"], implicit_think=True)
                thinking = parse.think_span or ""
            if thinking is None:
                raise SchemaError(lineno, "thinking", "row has neither thinking nor raw_response")
            joined.append(dataclasses.replace(by_id[sid], thinking=thinking))
    return joined


def _looks_like_samples(path: str) -> bool:
    try:
        harness.load_dataset(path)
        return True
    except (SchemaError, TomforgeError):
        return False


@main.command("judge")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), default=None)
@click.option("--judge-endpoint", default=None)
@click.option("--model", default=None)
@click.option("--retries", type=int, default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
@handle_errors
def judge_cmd(ctx, records_path, dataset_path, judge_endpoint, model, retries, out_path):
    """Rate thinking traces for coherence and factuality with a judge model."""
    sec = section(ctx, "judge")
    cfg = judging.JudgeConfig(retries=int(pick(ctx, sec, "retries", retries, 2)))
    samples = _load_thinking_samples(records_path, dataset_path)
    client = _endpoint_client(ctx, judge_endpoint, model)
    _log_run("judge", {"records": records_path, "n": len(samples)})
    lines = []
    for s in samples:
        result = judging.judge_thinking(s, s.thinking, client, cfg)
        lines.append(json.dumps({"sample_id": s.id, **dataclasses.asdict(result)}, ensure_ascii=False))
    write_atomic(out_path, "".join(line + "\n" for line in lines))
    click.echo(f"judged {len(lines)} traces -> {out_path}")


@main.command("transfer")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), default=None)
@click.option("--target-endpoint", default=None)
@click.option("--model", default=None)
@click.option("--strip-conclusion", "strip", is_flag=True, default=False)
@click.option("--concurrency", type=int, default=4, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
@handle_errors
def transfer_cmd(ctx, records_path, dataset_path, target_endpoint, model, strip, concurrency, out_path):
    """Measure a target model's accuracy when primed with thinking traces."""
    samples = _load_thinking_samples(records_path, dataset_path)
    client = _endpoint_client(ctx, target_endpoint, model)
    _log_run("transfer", {"records": records_path, "n": len(samples), "strip": strip})
    accuracy, records = judging.transfer_eval(
        samples, client, with_conclusion=not strip, concurrency=concurrency
    )
    payload = {
        "accuracy": accuracy,
        "with_conclusion": not strip,
        "n": len(records),
        "records": [dataclasses.asdict(r) for r in records],
    }
    write_atomic(out_path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    click.echo(f"transfer accuracy {accuracy:.4f} over {len(records)} samples -> {out_path}")


@main.command("audit")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--figures", "figures_dir", type=click.Path(), default=None)
@handle_errors
def audit_cmd(dataset_path, out_path, figures_dir):
    """Audit the answer distribution of a dataset for binary bias."""
    samples = harness.load_dataset(dataset_path)
    report = adversarial.audit_answer_bias(samples)
    write_atomic(out_path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    if figures_dir:
        plots.figure_dir(figures_dir)
        plots.save_answer_distribution(report, os.path.join(figures_dir, "answer_distribution.png"))
    click.echo(f"audited {report.n} answers (binary={report.flag_binary}) -> {out_path}")


if __name__ == "__main__":
    main()
