"""Rule-based scoring of model responses: tag structure and answer match.

The format reward is +1 when the response is exactly one
`<think>...</think>` block followed by one `<answer>...</answer>` block
(nothing but whitespace after it, non-empty answer), else -1.  The answer
reward is +2 only when the format holds AND the normalized ground truth
occurs in the normalized answer span at word boundaries, else -2.  Totals
are therefore always one of {3, -1, -3}, as integers.

Chat templates that pre-seed an opening `<think>` are supported via
`implicit_think`: a response that starts mid-reasoning and closes the
think tag before `<answer>` is treated as having the opening tag at
position 0.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import EmptyGroundTruth

THINK_OPEN, THINK_CLOSE = "<think>", "</think>"
ANSWER_OPEN, ANSWER_CLOSE = "<answer>", "</answer>"

_STRICT_SHAPE = re.compile(
    r"^\s*<think>(?P<think>.*?)</think>\s*<answer>(?P<answer>.*?)</answer>\s*$",
    re.DOTALL,
)


@dataclass(frozen=True)
class TagParse:
    well_formed: bool
    think_span: str | None = None
    answer_span: str | None = None
    implicit_think_used: bool = False


@dataclass(frozen=True)
class RewardBreakdown:
    format: int  # +1 / -1
    answer: int  # +2 / -2
    total: int

    def to_wire(self, parse: TagParse | None = None) -> dict:
        return {
            "format_reward": self.format,
            "answer_reward": self.answer,
            "total": self.total,
            "well_formed": bool(parse.well_formed) if parse else self.format == 1,
            "extracted_answer": parse.answer_span if parse else None,
        }


@dataclass(frozen=True)
class RewardConfig:
    implicit_think: bool = False
    strict: bool = True


def parse_tags(response: str, implicit_think: bool = False) -> TagParse:
    """Extract think/answer spans; well_formed only for the exact shape."""
    text = response
    implicit_used = False
    if implicit_think and not text.lstrip().startswith(THINK_OPEN):
        close = text.find(THINK_CLOSE)
        answer_at = text.find(ANSWER_OPEN)
        if close != -1 and (answer_at == -1 or close < answer_at):
            text = THINK_OPEN + text
            implicit_used = True

    counts = [text.count(t) for t in (THINK_OPEN, THINK_CLOSE, ANSWER_OPEN, ANSWER_CLOSE)]
    if counts != [1, 1, 1, 1]:
        return TagParse(False, implicit_think_used=implicit_used)
    m = _STRICT_SHAPE.match(text)
    if not m:
        return TagParse(False, implicit_think_used=implicit_used)
    answer = m["answer"].strip()
    if not answer:
        return TagParse(False, implicit_think_used=implicit_used)
    return TagParse(True, m["think"].strip(), answer, implicit_used)


def normalize_answer_text(text: str) -> str:
    """Lowercase, underscores to spaces, collapsed whitespace, no trailing punctuation."""
    text = text.lower().replace("_", " ")
    text = re.sub(r"\s+", " ", text).strip()
    return text.rstrip(".!?,;:").rstrip()


def match_answer(answer_text: str, ground_truth: str) -> bool:
    """Word-boundary containment of the normalized truth in the answer text.

    Truths are single words or short phrases while model answers are often
    full sentences, so containment rather than equality; boundaries stop
    "red envelope" from matching inside "bored envelopes".
    """
    if not ground_truth or not ground_truth.strip():
        raise EmptyGroundTruth("ground truth must be non-empty")
    truth = normalize_answer_text(ground_truth)
    hay = normalize_answer_text(answer_text)
    if not truth:
        raise EmptyGroundTruth(f"ground truth {ground_truth!r} is only punctuation")
    return re.search(rf"(?<![a-z0-9]){re.escape(truth)}(?![a-z0-9])", hay) is not None


def score(response: str, ground_truth: str, cfg: RewardConfig = RewardConfig()) -> RewardBreakdown:
    """Summed format and answer rewards for one response."""
    parse = parse_tags(response, implicit_think=cfg.implicit_think)
    fmt = 1 if parse.well_formed else -1
    ans = (
        2
        if parse.well_formed and match_answer(parse.answer_span, ground_truth)
        else -2
    )
    return RewardBreakdown(format=fmt, answer=ans, total=fmt + ans)


def score_to_wire(response: str, ground_truth: str, cfg: RewardConfig = RewardConfig()) -> dict:
    parse = parse_tags(response, implicit_think=cfg.implicit_think)
    return score(response, ground_truth, cfg).to_wire(parse)


def wire_json(item: dict) -> str:
    """Canonical one-line JSON used by both the CLI and the service."""
    return json.dumps(item, ensure_ascii=False, separators=(", ", ": "))
