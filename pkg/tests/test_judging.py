import json

import pytest

from tomforge.client import MockChatClient
from tomforge.errors import JudgeParseError
from tomforge.harness import SampleRecord
from tomforge.judging import (
    JudgeConfig,
    judge_thinking,
    strip_conclusion,
    transfer_eval,
)
from tomforge.prompts import (
    COT_SYSTEM_PROMPT,
    coherence_judge_message,
    factual_judge_message,
    transfer_user_message,
)

SAMPLE = SampleRecord(
    id="s0", dataset="tom4_ood", story="Olivia entered the hall. The tangerine is in the blue_crate.",
    question="Where is the tangerine really?", answer="blue_crate", order=0, split="test",
    thinking="Olivia enters. The tangerine starts in the blue_crate. So it is in the blue_crate.",
)

CONTAINERS = ("blue_crate", "red_bottle", "green_suitcase")


def judge_with(scores):
    """Mock judge returning LogicalCoherence then FactualScore."""
    state = {"i": 0}

    def handler(request):
        prompt = request.messages[-1]["content"]
        key = "LogicalCoherence" if "Logical Coherence" in prompt else "FactualScore"
        value = scores[state["i"] % len(scores)]
        state["i"] += 1
        return json.dumps({key: value, "Evaluation": "fine"})

    return MockChatClient(handler)


def test_judge_quality_normalization():
    result = judge_thinking(SAMPLE, SAMPLE.thinking, judge_with([8, 6]))
    assert result.logical_coherence == 8
    assert result.factual_score == 6
    assert result.quality == pytest.approx(0.70)


def test_judge_perfect_scores():
    result = judge_thinking(SAMPLE, SAMPLE.thinking, judge_with([10, 10]))
    assert result.quality == 1.0


def test_judge_prose_reply_fails_after_retries():
    client = MockChatClient(lambda req: "I refuse to answer in JSON, ever.")
    with pytest.raises(JudgeParseError):
        judge_thinking(SAMPLE, SAMPLE.thinking, client, JudgeConfig(retries=2))
    # 1 + 2 retries for the first rubric before giving up
    assert len(client.calls) == 3


def test_judge_retries_then_succeeds():
    replies = [
        "not json",
        json.dumps({"LogicalCoherence": 7, "Evaluation": "ok"}),
        json.dumps({"FactualScore": 9, "Evaluation": "ok"}),
    ]
    client = MockChatClient(lambda req: replies[len(client.calls) - 1])
    result = judge_thinking(SAMPLE, SAMPLE.thinking, client, JudgeConfig(retries=1))
    assert (result.logical_coherence, result.factual_score) == (7, 9)


def test_judge_out_of_range_scores_clamped_and_flagged():
    result = judge_thinking(SAMPLE, SAMPLE.thinking, judge_with([15, -2]))
    assert (result.logical_coherence, result.factual_score) == (10, 0)
    assert result.clamped


def test_judge_prompts_carry_context():
    client = judge_with([5, 5])
    judge_thinking(SAMPLE, SAMPLE.thinking, client)
    coherence_prompt = client.calls[0].messages[-1]["content"]
    factual_prompt = client.calls[1].messages[-1]["content"]
    assert coherence_prompt == coherence_judge_message(SAMPLE.question, SAMPLE.answer, SAMPLE.thinking)
    assert SAMPLE.story not in coherence_prompt
    assert factual_prompt == factual_judge_message(SAMPLE.story, SAMPLE.question, SAMPLE.answer, SAMPLE.thinking)
    assert SAMPLE.story in factual_prompt


def test_quality_formula_all_integer_scores():
    for lc in range(11):
        for fs in range(11):
            result = judge_thinking(SAMPLE, SAMPLE.thinking, judge_with([lc, fs]))
            assert result.quality == (lc + fs) / 20


@pytest.mark.parametrize(
    "text,expected,flagged",
    [
        ("A tracks O. B exits. So the answer is c1.", "A tracks O. B exits.", False),
        ("Only one sentence.", "", True),
        ("Maybe. Is it c1? Yes, c1.", "Maybe. Is it c1?", False),
        ("No terminator at all", "", True),
        ("First! Second part", "First!", False),
    ],
)
def test_strip_conclusion(text, expected, flagged):
    stripped, flag = strip_conclusion(text)
    assert stripped == expected
    assert flag is flagged


def test_strip_twice_removes_exactly_two():
    text = "One. Two. Three. Four."
    once, _ = strip_conclusion(text)
    twice, _ = strip_conclusion(once)
    assert once == "One. Two. Three."
    assert twice == "One. Two."


def container_scanner(request):
    """Target mock: answers with any known container found in the user turn's think block."""
    content = request.messages[-1]["content"]
    think = content.split("<think>", 1)[-1].rsplit("</think>", 1)[0]
    found = next((c for c in CONTAINERS if c in think), "nowhere")
    return json.dumps({"thinking": "scanned", "answer": found})


def with_thinking(thinking):
    return SampleRecord(
        id="t0", dataset="tom4_ood", story="story text", question="q?",
        answer="blue_crate", order=4, split="test", thinking=thinking,
    )


def test_transfer_with_conclusion_succeeds():
    samples = [with_thinking("I think hard. The answer is blue_crate.")] * 3
    accuracy, records = transfer_eval(samples, MockChatClient(container_scanner), with_conclusion=True)
    assert accuracy == 1.0
    assert all(not r.empty_thinking for r in records)


def test_transfer_without_conclusion_loses_answer_only_traces():
    # the only mention of the answer is in the final sentence
    samples = [with_thinking("Agents move things around. It must be blue_crate.")] * 4
    accuracy, _ = transfer_eval(samples, MockChatClient(container_scanner), with_conclusion=False)
    assert accuracy == 0.0


def test_transfer_keeps_answer_when_reasoning_mentions_it_early():
    samples = [with_thinking("The blue_crate got the object first. Nothing changed it. So blue_crate.")] * 2
    accuracy, _ = transfer_eval(samples, MockChatClient(container_scanner), with_conclusion=False)
    assert accuracy == 1.0


def test_transfer_empty_thinking_still_evaluated_and_flagged():
    samples = [with_thinking("Single sentence only.")]
    accuracy, records = transfer_eval(samples, MockChatClient(container_scanner), with_conclusion=False)
    assert records[0].empty_thinking
    assert records[0].raw_response  # the call still happened
    assert accuracy == 0.0


def test_transfer_prompt_layout():
    client = MockChatClient(container_scanner)
    samples = [with_thinking("Alpha. Beta.")]
    transfer_eval(samples, client, with_conclusion=True)
    messages = client.calls[0].messages
    assert messages[0] == {"role": "system", "content": COT_SYSTEM_PROMPT}
    assert messages[1]["content"] == transfer_user_message("story text", "q?", "Alpha. Beta.")
    assert messages[1]["content"] == "Story: story text \n Question: q? \n <think>Alpha. Beta.</think>"


def test_transfer_requires_thinking():
    bare = SampleRecord(
        id="x", dataset="tomi", story="s", question="q", answer="a", order=None, split="test"
    )
    with pytest.raises(ValueError):
        transfer_eval([bare], MockChatClient(container_scanner))


def test_transfer_reproducible():
    samples = [with_thinking("The blue_crate wins. Done.")] * 5
    first = transfer_eval(samples, MockChatClient(container_scanner), with_conclusion=False)
    second = transfer_eval(samples, MockChatClient(container_scanner), with_conclusion=False)
    assert first[0] == second[0]
    assert [r.extracted_answer for r in first[1]] == [r.extracted_answer for r in second[1]]
