"""Best-first search for stories that a target scorer finds hard.

States are partial event lists.  Expansion is ordered by f = g + h where
g counts belief-divergence points (events after which some agent's
first-order belief differs from the object's true location) and h is the
optimistic remainder (remaining depth, one point per event).  Terminal
states (depth >= min_depth) are scored by a pluggable difficulty scorer
estimating the probability the target model answers the story's questions
correctly; the search keeps the terminal with the lowest score, breaking
ties by higher g and then lexicographic event order.  With a fixed budget
and a deterministic scorer the result is fully reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Protocol

from .errors import ConfigError, InfillRejected
from .oracle import answer_query
from .story import (
    BeliefQuery,
    Declare,
    Enter,
    Event,
    Exit,
    Move,
    Story,
    StoryMeta,
    render_event,
    render_story,
    surface,
    validate_story,
)


@dataclass(frozen=True)
class SearchContext:
    agents: tuple[str, ...]
    room: str
    object: str
    containers: tuple[str, ...]
    dataset_tag: str = "exploretom_struct"

    def story(self, events: tuple[Event, ...]) -> Story:
        return Story(
            id="astar",
            events=events,
            agents=self.agents,
            rooms=(self.room,),
            objects=(self.object,),
            containers=self.containers,
            meta=StoryMeta(dataset_tag=self.dataset_tag, chapter_boundaries=(0,)),
        )

    def questions(self, story: Story) -> list[BeliefQuery]:
        if not any(isinstance(ev, (Declare, Move)) and ev.object == self.object for ev in story.events):
            return []
        qs = [BeliefQuery((), self.object)]
        qs.extend(BeliefQuery((a,), self.object) for a in self.agents)
        return qs


class DifficultyScorer(Protocol):
    def score(self, story: Story, questions: list[BeliefQuery]) -> float: ...


def divergence_points(context: SearchContext, events: tuple[Event, ...]) -> int:
    """Events after which some agent holds a false first-order belief."""
    return sum(
        1
        for i in range(len(events))
        if _diverges_after(context, events[: i + 1])
    )


def _diverges_after(context: SearchContext, prefix: tuple[Event, ...]) -> bool:
    story = context.story(prefix)
    if not any(isinstance(ev, (Declare, Move)) and ev.object == context.object for ev in prefix):
        return False
    truth = answer_query(story, BeliefQuery((), context.object))
    return any(
        answer_query(story, BeliefQuery((a,), context.object)) != truth
        for a in context.agents
    )


class SyntheticDifficultyScorer:
    """Deterministic stand-in: stories get easier to defeat as divergence grows."""

    def __init__(self, context: SearchContext, saturation: int = 3):
        self.context = context
        self.saturation = saturation

    def score(self, story: Story, questions: list[BeliefQuery]) -> float:
        div = divergence_points(self.context, story.events)
        return 1.0 - min(1.0, div / self.saturation)


class ModelDifficultyScorer:
    """Fraction of the story's questions a chat model answers correctly."""

    def __init__(self, client, style: str = "rl"):
        self.client = client
        self.style = style

    def score(self, story: Story, questions: list[BeliefQuery]) -> float:
        from .harness import SampleRecord, evaluate
        from .story import render_question

        if not questions:
            return 1.0
        samples = [
            SampleRecord(
                id=f"probe-{i}",
                dataset="custom",
                story=render_story(story),
                question=render_question(q),
                answer=answer_query(story, q),
                order=len(q.chain),
                split="test",
            )
            for i, q in enumerate(questions)
        ]
        _, report = evaluate(self.client, samples, style=self.style, concurrency=2)
        return report.accuracy


@dataclass(frozen=True)
class SearchBudget:
    max_expansions: int = 5000
    max_depth: int = 8
    min_depth: int = 4
    beam: int = 64


@dataclass
class SearchResult:
    story: Story
    score: float
    divergence: int
    expansions: int
    exhausted: bool


@dataclass(frozen=True, order=True)
class _Node:
    neg_f: float
    neg_g: int
    key: tuple[str, ...]  # rendered events; lexicographic tie-break
    events: tuple[Event, ...] = field(compare=False)
    g: int = field(compare=False, default=0)
    present: frozenset[str] = field(compare=False, default=frozenset())


def _legal_actions(context: SearchContext, events: tuple[Event, ...],
                   present: frozenset[str], location: str | None) -> list[Event]:
    actions: list[Event] = []
    if not events:
        # A story opens with an arrival; offer the whole group and singles.
        actions.append(Enter(tuple(context.agents), context.room))
        actions.extend(Enter((a,), context.room) for a in context.agents)
        return actions
    absent = [a for a in context.agents if a not in present]
    for a in sorted(present):
        actions.append(Exit(a, context.room))
        for c in context.containers:
            if c == location:
                continue
            actions.append(Move(a, context.object, c, context.room))
            # Same movement, secretly observed by one absent agent.
            actions.extend(
                Move(a, context.object, c, context.room, witness_override=(w,))
                for w in absent
            )
    actions.extend(Enter((a,), context.room) for a in absent)
    return actions


def _apply(present: frozenset[str], ev: Event) -> frozenset[str]:
    if isinstance(ev, Enter):
        return present | set(ev.agents)
    if isinstance(ev, Exit):
        return present - {ev.agent}
    return present


def astar_search(context: SearchContext, scorer: DifficultyScorer,
                 budget: SearchBudget = SearchBudget()) -> SearchResult:
    """Search for the story the scorer rates hardest within the budget."""
    if not context.agents or not context.containers:
        raise ConfigError("search context needs agents and containers")
    if budget.min_depth > budget.max_depth:
        raise ConfigError("min_depth cannot exceed max_depth")

    def make_node(events: tuple[Event, ...], g: int, present: frozenset[str]) -> _Node:
        depth = len(events)
        h = budget.max_depth - depth
        return _Node(
            neg_f=-(g + h),
            neg_g=-g,
            key=tuple(render_event(e) for e in events),
            events=events,
            g=g,
            present=present,
        )

    frontier: list[_Node] = [make_node((), 0, frozenset())]
    best: tuple[float, int, tuple[str, ...]] | None = None  # (score, -g, key)
    best_node: _Node | None = None
    expansions = 0
    perfect = False

    while frontier and expansions < budget.max_expansions:
        node = heapq.heappop(frontier)
        expansions += 1
        if len(node.events) >= budget.min_depth:
            story = context.story(node.events)
            value = scorer.score(story, context.questions(story))
            rank = (value, -node.g, node.key)
            if best is None or rank < best:
                best, best_node = rank, node
            if value <= 0.0:
                perfect = True
                break
        if len(node.events) >= budget.max_depth:
            continue
        location = None
        for ev in node.events:
            if isinstance(ev, (Declare, Move)) and ev.object == context.object:
                location = ev.container if isinstance(ev, Declare) else ev.to
        children = []
        for action in _legal_actions(context, node.events, node.present, location):
            events = node.events + (action,)
            gain = 1 if _diverges_after(context, events) else 0
            children.append(make_node(events, node.g + gain, _apply(node.present, action)))
        for child in children:
            heapq.heappush(frontier, child)
        if len(frontier) > budget.beam:
            frontier = heapq.nsmallest(budget.beam, frontier)
            heapq.heapify(frontier)

    if best_node is None:
        raise ConfigError("search budget too small to reach any terminal story")
    story = context.story(best_node.events)
    validate_story(story)
    return SearchResult(
        story=story,
        score=best[0],
        divergence=best_node.g,
        expansions=expansions,
        # Budget ran out with candidates left; a perfect find or a fully
        # drained frontier means the search actually finished.
        exhausted=not perfect and bool(frontier),
    )


def infill_tokens(story: Story) -> list[str]:
    """Surface tokens a rewrite must preserve: agents, objects, containers."""
    return [surface(t) for t in (*story.agents, *story.objects, *story.containers)]


INFILL_INSTRUCTION = (
    "Rewrite the following structured story as a flowing natural narrative. "
    "Keep every person, object and container mentioned, and do not change "
    "what happens or who sees it.\n\n"
)


def infill_story(story: Story, rewrite_client) -> tuple[str, Story]:
    """Rewrite a structured story into prose, verifying token coverage."""
    from .client import ChatRequest

    text = render_story(story)
    response = rewrite_client.chat(
        ChatRequest(messages=({"role": "user", "content": INFILL_INSTRUCTION + text},))
    )
    rewritten = response.content
    # containment is judged in surface space on both sides, so underscore and
    # spaced spellings of the same token are interchangeable
    lowered = rewritten.lower().replace("_", " ")
    missing = [tok for tok in infill_tokens(story) if tok.lower() not in lowered]
    if missing:
        raise InfillRejected(missing)
    return rewritten, story


@dataclass
class BiasReport:
    counts: dict[str, int]
    fractions: dict[str, float]
    flag_binary: bool
    n: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "flag_binary": self.flag_binary,
            "answers": {
                k: {"count": self.counts[k], "fraction": self.fractions[k]}
                for k in sorted(self.counts)
            },
        }


def audit_answer_bias(samples) -> BiasReport:
    """Empirical answer distribution; flags the presence of yes/no answers."""
    counts: dict[str, int] = {}
    for s in samples:
        answer = s.answer if hasattr(s, "answer") else str(s)
        counts[answer] = counts.get(answer, 0) + 1
    n = sum(counts.values())
    fractions = {k: v / n for k, v in counts.items()} if n else {}
    flag = any(k.strip().lower() in ("yes", "no") for k in counts)
    return BiasReport(counts=counts, fractions=fractions, flag_binary=flag, n=n)
