"""Dataset I/O, prompt construction, model evaluation and length statistics.

JSONL sample schema (one object per line):

    id        str, non-empty
    dataset   hitom | tom4_ood | tomi | exploretom_struct | exploretom_infilled | custom
    story     str
    question  str
    answer    str, non-empty
    order     int 0..4; required for hitom/tom4_ood, may be null otherwise
    split     train | val | test
    thinking  optional str (used by judging / transfer)

Evaluation issues one chat call per sample with bounded concurrency and
assembles records in sample order.  Response length is measured in
whitespace-delimited tokens and characters; confidence intervals come
from a seeded percentile bootstrap.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .client import ChatClient, ChatRequest
from .errors import EmptyInput, SchemaError, TomforgeError
from .prompts import COT_SYSTEM_PROMPT, RL_SYSTEM_PROMPT, user_message
from .rewards import match_answer, parse_tags

DATASETS = ("hitom", "tom4_ood", "tomi", "exploretom_struct", "exploretom_infilled", "custom")
SPLITS = ("train", "val", "test")
STYLES = ("rl", "cot", "plain")

_REQUIRED_FIELDS = {"id": str, "dataset": str, "story": str, "question": str, "answer": str, "split": str}
_OPTIONAL_FIELDS = {"order", "thinking"}


@dataclass(frozen=True)
class SampleRecord:
    id: str
    dataset: str
    story: str
    question: str
    answer: str
    order: int | None
    split: str
    thinking: str | None = None

    def to_json(self) -> str:
        row = {
            "id": self.id,
            "dataset": self.dataset,
            "story": self.story,
            "question": self.question,
            "answer": self.answer,
            "order": self.order,
            "split": self.split,
        }
        if self.thinking is not None:
            row["thinking"] = self.thinking
        return json.dumps(row, ensure_ascii=False)


@dataclass
class EvalRecord:
    sample_id: str
    prompt_style: str
    raw_response: str
    extracted_answer: str
    correct: bool
    response_tokens: int
    response_chars: int
    latency_ms: float
    extraction_fallback: bool = False
    error: str | None = None


@dataclass
class LengthStats:
    mean_tokens: float
    mean_chars: float | None
    ci90_low: float
    ci90_high: float


@dataclass
class EvalReport:
    accuracy: float
    per_dataset: dict[str, float]
    per_order: dict[int, float]
    length: LengthStats
    n: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_order"] = {str(k): v for k, v in sorted(self.per_order.items())}
        d["per_dataset"] = dict(sorted(self.per_dataset.items()))
        return d


def validate_sample_row(row: dict, line: int) -> SampleRecord:
    if not isinstance(row, dict):
        raise SchemaError(line, "<row>", "not a JSON object")
    for key in row:
        if key not in _REQUIRED_FIELDS and key not in _OPTIONAL_FIELDS:
            raise SchemaError(line, key, "unknown field")
    for key, typ in _REQUIRED_FIELDS.items():
        if key not in row:
            raise SchemaError(line, key, "missing")
        if not isinstance(row[key], typ):
            raise SchemaError(line, key, f"expected {typ.__name__}")
    if not row["id"]:
        raise SchemaError(line, "id", "empty")
    if not row["answer"]:
        raise SchemaError(line, "answer", "empty")
    if row["dataset"] not in DATASETS:
        raise SchemaError(line, "dataset", f"not one of {DATASETS}")
    if row["split"] not in SPLITS:
        raise SchemaError(line, "split", f"not one of {SPLITS}")
    order = row.get("order")
    if order is not None and (not isinstance(order, int) or isinstance(order, bool) or not 0 <= order <= 4):
        raise SchemaError(line, "order", "must be an int in 0..4 or null")
    if row["dataset"] in ("hitom", "tom4_ood") and order is None:
        raise SchemaError(line, "order", f"required for dataset {row['dataset']}")
    thinking = row.get("thinking")
    if thinking is not None and not isinstance(thinking, str):
        raise SchemaError(line, "thinking", "expected str")
    return SampleRecord(
        id=row["id"],
        dataset=row["dataset"],
        story=row["story"],
        question=row["question"],
        answer=row["answer"],
        order=order,
        split=row["split"],
        thinking=thinking,
    )


def load_dataset(path: str) -> list[SampleRecord]:
    """Strictly validated JSONL in stable file order."""
    records: list[SampleRecord] = []
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                row = json.loads(raw)
            except json.JSONDecodeError as e:
                raise SchemaError(lineno, "<json>", str(e)) from e
            records.append(validate_sample_row(row, lineno))
    return records


def save_dataset(path: str, records: list[SampleRecord]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(r.to_json() + "\n")


def format_prompt(sample: SampleRecord, style: str) -> list[dict[str, str]]:
    """Chat messages for one sample in the requested prompting style."""
    if style not in STYLES:
        raise ValueError(f"style must be one of {STYLES}, got {style!r}")
    user = {"role": "user", "content": user_message(sample.story, sample.question)}
    if style == "rl":
        return [{"role": "system", "content": RL_SYSTEM_PROMPT}, user]
    if style == "cot":
        return [{"role": "system", "content": COT_SYSTEM_PROMPT}, user]
    return [user]


def first_json_object(text: str) -> dict | None:
    """First balanced {...} span that parses as a JSON object."""
    depth = 0
    start = None
    in_string = False
    escape = False
    for i, ch in enumerate(text):
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0 and start is not None:
                    try:
                        obj = json.loads(text[start : i + 1])
                    except json.JSONDecodeError:
                        start = None
                        continue
                    if isinstance(obj, dict):
                        return obj
                    start = None
    return None


def extract_answer(raw_response: str, style: str) -> tuple[str, bool]:
    """Answer text for matching, plus a fallback flag when extraction failed."""
    if style == "rl":
        parse = parse_tags(raw_response, implicit_think=True)
        if parse.answer_span:
            return parse.answer_span, False
        return raw_response, True
    if style == "cot":
        obj = first_json_object(raw_response)
        if obj is not None and "answer" in obj:
            return str(obj["answer"]), False
        return raw_response, True
    return raw_response, False


def _evaluate_one(client: ChatClient, sample: SampleRecord, style: str,
                  temperature: float, max_tokens: int, fail_fast: bool) -> EvalRecord:
    messages = tuple(format_prompt(sample, style))
    started = time.monotonic()
    try:
        response = client.chat(ChatRequest(messages=messages, temperature=temperature, max_tokens=max_tokens))
        raw = response.content
        error = None
    except TomforgeError as e:
        if fail_fast:
            raise
        raw, error = "", f"{type(e).__name__}: {e}"
    latency_ms = (time.monotonic() - started) * 1000.0
    extracted, fallback = extract_answer(raw, style)
    correct = bool(raw) and error is None and match_answer(extracted, sample.answer)
    return EvalRecord(
        sample_id=sample.id,
        prompt_style=style,
        raw_response=raw,
        extracted_answer=extracted,
        correct=correct,
        response_tokens=len(raw.split()),
        response_chars=len(raw),
        latency_ms=latency_ms,
        extraction_fallback=fallback,
        error=error,
    )


def evaluate(client: ChatClient, samples: list[SampleRecord], style: str = "rl",
             concurrency: int = 4, temperature: float = 0.0, max_tokens: int = 1024,
             fail_fast: bool = False, bootstrap_seed: int = 0) -> tuple[list[EvalRecord], EvalReport]:
    """Query the model once per sample; records come back in sample order."""
    if style not in STYLES:
        raise ValueError(f"style must be one of {STYLES}")
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        records = list(
            pool.map(
                lambda s: _evaluate_one(client, s, style, temperature, max_tokens, fail_fast),
                samples,
            )
        )
    report = build_report(samples, records, bootstrap_seed=bootstrap_seed)
    return records, report


def build_report(samples: list[SampleRecord], records: list[EvalRecord], bootstrap_seed: int = 0) -> EvalReport:
    if len(samples) != len(records):
        raise ValueError("samples and records must align")
    if not records:
        raise EmptyInput("no records to report on")
    correct = [r.correct for r in records]
    accuracy = sum(correct) / len(correct)

    per_dataset: dict[str, list[bool]] = {}
    per_order: dict[int, list[bool]] = {}
    for s, r in zip(samples, records):
        per_dataset.setdefault(s.dataset, []).append(r.correct)
        if s.order is not None:
            per_order.setdefault(s.order, []).append(r.correct)
    return EvalReport(
        accuracy=accuracy,
        per_dataset={k: sum(v) / len(v) for k, v in per_dataset.items()},
        per_order={k: sum(v) / len(v) for k, v in per_order.items()},
        length=length_stats(records, seed=bootstrap_seed),
        n=len(records),
    )


BOOTSTRAP_RESAMPLES = 1000


def length_stats(records: list, seed: int = 0) -> LengthStats:
    """Mean token/char counts with a seeded 90% percentile-bootstrap CI.

    Accepts EvalRecords or raw token counts.
    """
    if not records:
        raise EmptyInput("length_stats needs at least one record")
    if isinstance(records[0], (int, float)):
        tokens = np.asarray(records, dtype=float)
        chars = None
    else:
        tokens = np.asarray([r.response_tokens for r in records], dtype=float)
        chars = float(np.mean([r.response_chars for r in records]))
    rng = np.random.default_rng(seed)
    n = len(tokens)
    idx = rng.integers(0, n, size=(BOOTSTRAP_RESAMPLES, n))
    means = tokens[idx].mean(axis=1)
    low, high = np.percentile(means, [5.0, 95.0])
    return LengthStats(
        mean_tokens=float(tokens.mean()),
        mean_chars=chars,
        ci90_low=float(low),
        ci90_high=float(high),
    )


def collapse_ratio(before: list, after: list) -> float:
    """Fractional shrinkage of mean response length between two corpora."""
    b = length_stats(before).mean_tokens
    a = length_stats(after).mean_tokens
    if b == 0:
        raise EmptyInput("before corpus has zero mean length")
    return 1.0 - a / b
