import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomforge.errors import EmptyGroundTruth
from tomforge.rewards import (
    RewardConfig,
    match_answer,
    normalize_answer_text,
    parse_tags,
    score,
    score_to_wire,
)

WELL_FORMED = "<think>x</think><answer>blue_pantry</answer>"


def test_parse_well_formed():
    p = parse_tags(WELL_FORMED)
    assert p.well_formed
    assert p.think_span == "x"
    assert p.answer_span == "blue_pantry"
    assert not p.implicit_think_used


def test_parse_implicit_think():
    p = parse_tags("reasoning</think><answer>y</answer>", implicit_think=True)
    assert p.well_formed
    assert p.implicit_think_used
    assert p.think_span == "reasoning"
    # without the flag the same response is malformed
    assert not parse_tags("reasoning</think><answer>y</answer>").well_formed


@pytest.mark.parametrize(
    "response",
    [
        "<answer>y</answer><think>x</think>",  # order violated
        "<think>x</think>",  # no answer
        "<answer>y</answer>",  # no think
        "<think>x</think><answer>y</answer> trailing words",
        "<think>x</think><answer> </answer>",  # empty answer
        "<think>a</think><think>b</think><answer>y</answer>",  # duplicate block
        "<think>x</think><answer>y</answer><answer>z</answer>",
        "prefix junk <think>x</think><answer>y</answer>",
    ],
)
def test_parse_malformed_variants(response):
    assert not parse_tags(response).well_formed


def test_parse_allows_whitespace_padding():
    assert parse_tags("  <think> x </think>\n<answer> y </answer>\n").well_formed


def test_normalize():
    assert normalize_answer_text("Red_Envelope.") == "red envelope"
    assert normalize_answer_text("  A   B ") == "a b"


def test_match_full_sentence_response():
    sentence = (
        "Gracie thinks William thinks Benjamin thinks Ella thinks the tomato "
        "is in the red_envelope"
    )
    assert match_answer(sentence, "red_envelope")


def test_match_underscore_space_equivalence():
    assert match_answer("the blue bathtub", "blue_bathtub")
    assert match_answer("the blue_bathtub", "blue bathtub")


def test_match_requires_word_boundaries():
    assert not match_answer("red_bucket", "red_envelope")
    assert not match_answer("bored_envelopes", "red_envelope")
    assert not match_answer("the redder envelope", "red envelope")


def test_match_multiword_phrase():
    assert match_answer("I would look in the plastic storage bin!", "plastic storage bin")
    assert not match_answer("a plastic bin for storage", "plastic storage bin")


def test_match_empty_ground_truth_raises():
    with pytest.raises(EmptyGroundTruth):
        match_answer("anything", "")
    with pytest.raises(EmptyGroundTruth):
        match_answer("anything", "   ")


@pytest.mark.parametrize(
    "response,truth,expected",
    [
        (WELL_FORMED, "blue_pantry", (1, 2, 3)),
        ("<think>x</think><answer>red_bottle</answer>", "blue_pantry", (1, -2, -1)),
        ("no tags at all", "blue_pantry", (-1, -2, -3)),
    ],
)
def test_score_truth_table(response, truth, expected):
    b = score(response, truth)
    assert (b.format, b.answer, b.total) == expected


def test_score_wire_fields():
    wire = score_to_wire(WELL_FORMED, "blue_pantry")
    assert wire == {
        "format_reward": 1,
        "answer_reward": 2,
        "total": 3,
        "well_formed": True,
        "extracted_answer": "blue_pantry",
    }
    wire = score_to_wire("junk", "blue_pantry")
    assert wire["well_formed"] is False
    assert wire["extracted_answer"] is None


# ids always carry at least one alphanumeric; a bare "_" normalizes to
# nothing and is rejected as an ill-defined ground truth
token = st.from_regex(r"[a-z0-9_]{0,8}[a-z0-9][a-z0-9_]{0,8}", fullmatch=True)


@given(token)
def test_match_is_reflexive(tok):
    assert match_answer(tok, tok)


@given(token)
def test_match_invariant_under_separator_swap(tok):
    assert match_answer(tok.replace("_", " "), tok)
    assert match_answer(tok, tok.replace("_", " "))


@settings(max_examples=300)
@given(st.text(max_size=200), token)
def test_total_always_in_range(response, truth):
    b = score(response, truth)
    assert b.total in (3, -1, -3)
    assert b.total == b.format + b.answer
    if b.format == -1:
        assert b.answer == -2


def test_scoring_is_pure():
    corpus = [
        (WELL_FORMED, "blue_pantry"),
        ("<think>a</think><answer>wrong</answer>", "right"),
        ("garbage", "x"),
        ("pre</think><answer>deep thought</answer>", "deep_thought"),
    ]
    cfg = RewardConfig(implicit_think=True)
    first = [score(r, t, cfg) for r, t in corpus]
    for _ in range(1000):
        assert [score(r, t, cfg) for r, t in corpus] == first
