"""LLM-judged thinking quality and the knowledge-transfer experiment.

A judge model rates a reasoning trace twice (logical coherence and factual
alignment, integers 0-10 each); quality is their mean normalized to [0,1].
Transfer feeds one model's trace to a target model under the step-by-step
prompt and measures induced answer accuracy, optionally stripping the final
sentence first so the target cannot just read off the stated conclusion.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .client import ChatClient, ChatRequest
from .errors import JudgeParseError, TomforgeError
from .harness import SampleRecord, extract_answer, first_json_object
from .prompts import (
    COT_SYSTEM_PROMPT,
    coherence_judge_message,
    factual_judge_message,
    transfer_user_message,
)
from .rewards import match_answer


@dataclass
class JudgeResult:
    logical_coherence: int
    factual_score: int
    quality: float
    coherence_evaluation: str
    factual_evaluation: str
    clamped: bool = False


@dataclass(frozen=True)
class JudgeConfig:
    retries: int = 2
    temperature: float = 0.0
    max_tokens: int = 512


def _ask_judge(client: ChatClient, prompt: str, score_key: str, cfg: JudgeConfig) -> tuple[int, str, bool]:
    last = ""
    for _ in range(cfg.retries + 1):
        response = client.chat(
            ChatRequest(
                messages=({"role": "user", "content": prompt},),
                temperature=cfg.temperature,
                max_tokens=cfg.max_tokens,
            )
        )
        last = response.content
        obj = first_json_object(last)
        if obj is None or score_key not in obj:
            continue
        try:
            value = int(obj[score_key])
        except (TypeError, ValueError):
            continue
        clamped = not 0 <= value <= 10
        return min(10, max(0, value)), str(obj.get("Evaluation", "")), clamped
    raise JudgeParseError(f"no parseable {score_key} JSON after {cfg.retries} retries: {last[:200]!r}")


def judge_thinking(sample: SampleRecord, thinking: str, judge_client: ChatClient,
                   cfg: JudgeConfig = JudgeConfig()) -> JudgeResult:
    """Two-rubric judgment of one reasoning trace."""
    if not thinking.strip():
        raise ValueError("thinking must be non-empty")
    lc, lc_eval, lc_clamped = _ask_judge(
        judge_client,
        coherence_judge_message(sample.question, sample.answer, thinking),
        "LogicalCoherence",
        cfg,
    )
    fs, fs_eval, fs_clamped = _ask_judge(
        judge_client,
        factual_judge_message(sample.story, sample.question, sample.answer, thinking),
        "FactualScore",
        cfg,
    )
    return JudgeResult(
        logical_coherence=lc,
        factual_score=fs,
        quality=(lc + fs) / 2 / 10,
        coherence_evaluation=lc_eval,
        factual_evaluation=fs_eval,
        clamped=lc_clamped or fs_clamped,
    )


_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")


def strip_conclusion(thinking: str) -> tuple[str, bool]:
    """Drop the final sentence; returns (text, single_sentence_flag).

    Sentences end at '.', '!' or '?' followed by whitespace or the end of
    the text; a trailing fragment without a terminator counts as a sentence.
    """
    text = thinking.rstrip()
    ends = [m.end() for m in _SENTENCE_END.finditer(text)]
    if ends and ends[-1] == len(text):
        ends.pop()  # terminator of the final sentence
    if not ends:
        return "", True
    return text[: ends[-1]].rstrip(), False


@dataclass
class TransferRecord:
    sample_id: str
    thinking_used: str
    raw_response: str
    extracted_answer: str
    correct: bool
    empty_thinking: bool


def transfer_eval(samples_with_thinking: list[SampleRecord], target_client: ChatClient,
                  with_conclusion: bool = True, concurrency: int = 4,
                  temperature: float = 0.0, max_tokens: int = 1024) -> tuple[float, list[TransferRecord]]:
    """Accuracy of a target model primed with another model's traces."""
    for s in samples_with_thinking:
        if s.thinking is None:
            raise ValueError(f"sample {s.id} carries no thinking trace")

    def run(sample: SampleRecord) -> TransferRecord:
        thinking = sample.thinking
        if not with_conclusion:
            thinking, _ = strip_conclusion(thinking)
        empty = not thinking.strip()
        messages = (
            {"role": "system", "content": COT_SYSTEM_PROMPT},
            {"role": "user", "content": transfer_user_message(sample.story, sample.question, thinking)},
        )
        try:
            response = target_client.chat(
                ChatRequest(messages=messages, temperature=temperature, max_tokens=max_tokens)
            )
            raw = response.content
        except TomforgeError as e:
            raw = ""
            return TransferRecord(sample.id, thinking, raw, f"{type(e).__name__}: {e}", False, empty)
        extracted, _ = extract_answer(raw, "cot")
        return TransferRecord(
            sample_id=sample.id,
            thinking_used=thinking,
            raw_response=raw,
            extracted_answer=extracted,
            correct=match_answer(extracted, sample.answer),
            empty_thinking=empty,
        )

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        records = list(pool.map(run, samples_with_thinking))
    accuracy = sum(r.correct for r in records) / len(records) if records else 0.0
    return accuracy, records
