"""Prompt constants and builders for evaluation, judging and transfer.

These strings are external interface contracts (they must match what the
trained/judged models saw), so they are substituted with plain string
replacement and never reflowed.  Note the deliberate spacing differences
between USER_TEMPLATE and TRANSFER_USER_TEMPLATE.
"""

from __future__ import annotations

RL_SYSTEM_PROMPT = (
    "You are a helpful assistant. The assistant first thinks about the reasoning process "
    "in the mind and then provides the user with the answer. The reasoning process and "
    "answer are enclosed within <think> </think> and <answer> </answer> tags, respectively, "
    "i.e., <think> reasoning process here </think><answer> answer here </answer>. "
    "Now the user asks you to solve a ToM reasoning problem. After thinking, when you "
    "finally reach a conclusion, clearly state your answer within <answer> </answer> tags.\n"
    "Note: You should assume the following.\n"
    "(1) An agent witnesses everything and every movement before exiting a room.\n"
    "(2) An agent A can infer another agent B's mental state only if A and B have been "
    "in the same room, or have private or public interactions."
)

COT_SYSTEM_PROMPT = (
    "Read the following story and answer the question. Think step-by-step. "
    "Provide the thinking first, and then the answer. Answer in the following JSON format:\n"
    "{\n"
    '"thinking": "step by step thinking",\n'
    '"answer": "answer text"\n'
    "}"
)

USER_TEMPLATE = "Story: {story}\n Question: {question}"

TRANSFER_USER_TEMPLATE = "Story: {story} \n Question: {question} \n <think>{thinking}</think>"

COHERENCE_JUDGE_PROMPT = """You are an expert in evaluating Theory of Mind reasoning. Your task is to assess a student's explanation for a complex Theory of Mind question.

The evaluation will proceed as follows:
1. You will first read a Theory of Mind question and the correct answer.
2. Then, you will be shown a student's thinking process in response to the question.
3. Please evaluate the student's thinking process based on the following criteria:

- **Logical Coherence (0–10 points)**: Does the reasoning make sense as a whole? Evaluate whether the thinking is internally consistent, logically structured, and meaningfully sequenced.
  - 0 – Completely incoherent: ideas are contradictory, disorganized, or temporally scrambled.
  - 5 – Partially coherent: some valid reasoning exists, but the steps are confusing, redundant, or lack a clear flow.
  - 10 – Fully coherent: reasoning is orderly, step-by-step, and clearly follows the timeline and causal structure of the events and beliefs.
- **Evaluation**: Write a short explanation (1–2 sentences) justifying your judgment, pointing out any key strengths or flaws.

Return your evaluation in the following JSON format:
{"LogicalCoherence": 0–10, "Evaluation": "A short explanation"}

Here is the question and the correct answer:
Question: {question}
Answer: {answer}

Here is the student's thinking process:
{thinking}"""

FACTUAL_JUDGE_PROMPT = """You are an expert in evaluating Theory of Mind reasoning. Your task is to assess a student's explanation for a complex Theory of Mind question based on a given story.

The evaluation will proceed as follows:
1. You will first read a story, a Theory of Mind question based on that story, and the correct answer.
2. Then, you will be shown a student's thinking process in response to the question.
3. Please evaluate the student's explanation based on the following criteria:

- **Factual Alignment (0–10 points)**: Does the reasoning accurately reflect the facts in the story? Evaluate whether the steps in the student’s thinking are grounded in the actual events, character actions, and timelines described.
  - 0 – Major factual errors or hallucinations; reasoning contradicts the story.
  - 5 – Some facts are correct, but key details are omitted, misremembered, or inaccurately applied.
  - 10 – All relevant details are accurate and clearly support the reasoning.
- **Evaluation**: Write a short explanation (1–2 sentences) justifying your judgment, pointing out any key strengths or flaws.

Return your evaluation in the following JSON format:
{"FactualScore": 0–10, "Evaluation": "A short explanation"}

Here is the story and the correct answer:
{story}
Question: {question}
Answer: {answer}

Here is the student's thinking process:
{thinking}"""


def _fill(template: str, **slots: str) -> str:
    out = template
    for key, value in slots.items():
        out = out.replace("{" + key + "}", value)
    return out


def user_message(story: str, question: str) -> str:
    return _fill(USER_TEMPLATE, story=story, question=question)


def transfer_user_message(story: str, question: str, thinking: str) -> str:
    return _fill(TRANSFER_USER_TEMPLATE, story=story, question=question, thinking=thinking)


def coherence_judge_message(question: str, answer: str, thinking: str) -> str:
    return _fill(COHERENCE_JUDGE_PROMPT, question=question, answer=answer, thinking=thinking)


def factual_judge_message(story: str, question: str, answer: str, thinking: str) -> str:
    return _fill(FACTUAL_JUDGE_PROMPT, story=story, question=question, answer=answer, thinking=thinking)
