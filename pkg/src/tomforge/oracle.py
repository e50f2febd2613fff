"""Ground-truth answers for nested belief queries.

World rules (fixed for every story in this toolchain):

1. An agent witnesses every event in their room until they exit it.
2. Nesting is grounded in co-presence: agent chains can only reason about
   events all chain members witnessed, because co-presence is mutually
   observable.
3. Agents tend to lie.  A claim never changes the speaker's own belief;
   a hearer accepts a claim only from a speaker who exited the current
   chapter's room later than they did (exit order is common knowledge;
   a speaker who has not exited counts as latest).
4. Private claims are heard by exactly speaker and listener; public
   claims are heard by every declared agent regardless of room.

Two independent implementations answer every query: `answer_query`
(witness-set filtering) and `brute_force_answer` (per-level sub-story
materialization driven by a position timeline).  They share only the
event types and must agree on every generated story; that equivalence is
enforced by the test suite.
"""

from __future__ import annotations

from bisect import bisect_right
from functools import lru_cache

from .errors import NoLocationEvidence, UnknownAgent, UnknownObject
from .story import (
    AgentId,
    BeliefQuery,
    ContainerId,
    Declare,
    Distractor,
    Enter,
    Event,
    Exit,
    Move,
    NoOp,
    PrivateClaim,
    PublicClaim,
    Story,
)


@lru_cache(maxsize=512)
def witness_table(story: Story) -> tuple[frozenset[AgentId], ...]:
    """Per event, the set of agents that witness it."""
    where: dict[AgentId, str | None] = {a: None for a in story.agents}

    def occupants(room: str) -> set[AgentId]:
        return {a for a, r in where.items() if r == room}

    table: list[frozenset[AgentId]] = []
    for ev in story.events:
        if isinstance(ev, Enter):
            for a in ev.agents:
                where[a] = ev.room
            witnesses = occupants(ev.room)
        elif isinstance(ev, Exit):
            witnesses = occupants(ev.room)
            where[ev.agent] = None
        elif isinstance(ev, (Declare, Move, NoOp)):
            witnesses = occupants(ev.room)
        elif isinstance(ev, PrivateClaim):
            witnesses = {ev.speaker, ev.listener}
        elif isinstance(ev, PublicClaim):
            witnesses = set(story.agents)
        elif isinstance(ev, Distractor):
            room = where.get(ev.agent)
            witnesses = occupants(room) if room is not None else {ev.agent}
        else:
            raise TypeError(f"not an event: {ev!r}")
        table.append(frozenset(witnesses | set(ev.witness_override)))
    return tuple(table)


def _check_agents(story: Story, agents: tuple[AgentId, ...]) -> None:
    declared = set(story.agents)
    for a in agents:
        if a not in declared:
            raise UnknownAgent(a)


def witnessed_events(story: Story, agent: AgentId) -> list[int]:
    """Indices of the events `agent` witnesses, in story order."""
    _check_agents(story, (agent,))
    table = witness_table(story)
    return [i for i in range(len(story.events)) if agent in table[i]]


def nested_view(story: Story, chain: tuple[AgentId, ...]) -> list[int]:
    """Event indices the whole chain can reason about.

    V1 is what chain[0] witnessed; each deeper agent filters the previous
    view down to the events they also witnessed.
    """
    if not chain:
        raise ValueError("nested_view needs a non-empty chain")
    _check_agents(story, chain)
    table = witness_table(story)
    view = witnessed_events(story, chain[0])
    for agent in chain[1:]:
        view = [i for i in view if agent in table[i]]
    return view


def _chapter_span(story: Story, at: int) -> tuple[int, int]:
    bounds = story.meta.chapter_boundaries or (0,)
    pos = bisect_right(bounds, at) - 1
    start = bounds[max(pos, 0)]
    end = bounds[pos + 1] if pos + 1 < len(bounds) else len(story.events)
    return start, end


def trusts(story: Story, a: AgentId, s: AgentId, at: int) -> bool:
    """Does `a` accept testimony from `s` at event index `at`?

    True iff s's most recent exit from the current chapter's room (before
    `at`) is later than a's, or s has not exited it yet.
    """
    start, _ = _chapter_span(story, at)
    room = story.events[start].room if isinstance(story.events[start], Enter) else None
    a_exit = s_exit = None
    for i in range(start, at):
        ev = story.events[i]
        if isinstance(ev, Exit) and (room is None or ev.room == room):
            if ev.agent == a:
                a_exit = i
            elif ev.agent == s:
                s_exit = i
    if s_exit is None:
        return True
    if a_exit is None:
        return False
    return s_exit > a_exit


def _location_events(story: Story, obj: str) -> list[int]:
    return [
        i
        for i, ev in enumerate(story.events)
        if (isinstance(ev, Declare) and ev.object == obj)
        or (isinstance(ev, Move) and ev.object == obj)
    ]


def _fallback_location(story: Story, obj: str) -> ContainerId:
    # An agent with no location evidence defaults to the story's opening
    # declaration (made while everyone was present); stories without a
    # declaration fall back to the object's first placement.
    for ev in story.events:
        if isinstance(ev, Declare) and ev.object == obj:
            return ev.container
    for ev in story.events:
        if isinstance(ev, Move) and ev.object == obj:
            return ev.to
    raise NoLocationEvidence(obj)


def answer_query(story: Story, q: BeliefQuery) -> ContainerId:
    """Ground-truth answer computed by witness-set filtering."""
    if q.object not in story.objects:
        raise UnknownObject(q.object)
    _check_agents(story, q.chain)
    locations = _location_events(story, q.object)
    if not locations:
        raise NoLocationEvidence(q.object)

    if not q.chain:
        last = story.events[locations[-1]]
        return last.container if isinstance(last, Declare) else last.to

    final = q.chain[-1]
    belief: ContainerId | None = None
    for i in nested_view(story, q.chain):
        ev = story.events[i]
        if isinstance(ev, Declare) and ev.object == q.object:
            belief = ev.container
        elif isinstance(ev, Move) and ev.object == q.object:
            belief = ev.to
        elif isinstance(ev, PrivateClaim) and ev.object == q.object:
            if ev.listener == final and ev.speaker != final and trusts(story, final, ev.speaker, i):
                belief = ev.container
        elif isinstance(ev, PublicClaim) and ev.object == q.object:
            if ev.speaker != final and trusts(story, final, ev.speaker, i):
                belief = ev.container
    if belief is None:
        belief = _fallback_location(story, q.object)
    return belief


# ---------------------------------------------------------------------------
# Independent cross-validation path.  Everything below deliberately avoids
# witness_table / nested_view / trusts and rebuilds the semantics from a
# per-agent position timeline plus materialized per-level sub-stories.

@lru_cache(maxsize=512)
def _position_timeline(story: Story) -> tuple[dict[AgentId, str | None], ...]:
    """Room of every agent immediately BEFORE each event (index i)."""
    current: dict[AgentId, str | None] = {a: None for a in story.agents}
    timeline: list[dict[AgentId, str | None]] = []
    for ev in story.events:
        timeline.append(dict(current))
        if isinstance(ev, Enter):
            for a in ev.agents:
                current[a] = ev.room
        elif isinstance(ev, Exit):
            current[ev.agent] = None
    timeline.append(dict(current))
    return tuple(timeline)


def _observes(story: Story, agent: AgentId, idx: int) -> bool:
    ev = story.events[idx]
    if agent in ev.witness_override:
        return True
    before = _position_timeline(story)[idx]
    if isinstance(ev, Enter):
        return agent in ev.agents or before.get(agent) == ev.room
    if isinstance(ev, Exit):
        return before.get(agent) == ev.room
    if isinstance(ev, (Declare, Move, NoOp)):
        return before.get(agent) == ev.room
    if isinstance(ev, PrivateClaim):
        return agent in (ev.speaker, ev.listener)
    if isinstance(ev, PublicClaim):
        return True
    if isinstance(ev, Distractor):
        room = before.get(ev.agent)
        if room is None:
            return agent == ev.agent
        return before.get(agent) == room
    raise TypeError(f"not an event: {ev!r}")


def _accepts_testimony(story: Story, hearer: AgentId, speaker: AgentId, at: int) -> bool:
    # Backward scan for the most recent exit of each party within the
    # chapter containing `at`.
    bounds = story.meta.chapter_boundaries or (0,)
    start = 0
    for b in bounds:
        if b <= at:
            start = b
    room = story.events[start].room if isinstance(story.events[start], Enter) else None
    hearer_exit = speaker_exit = None
    for i in range(at - 1, start - 1, -1):
        ev = story.events[i]
        if not isinstance(ev, Exit) or (room is not None and ev.room != room):
            continue
        if ev.agent == hearer and hearer_exit is None:
            hearer_exit = i
        if ev.agent == speaker and speaker_exit is None:
            speaker_exit = i
        if hearer_exit is not None and speaker_exit is not None:
            break
    if speaker_exit is None:
        return True
    if hearer_exit is None:
        return False
    return speaker_exit > hearer_exit


class _BeliefMachine:
    """Single-agent belief state over a stream of (index, event) pairs."""

    def __init__(self, story: Story, obj: str, observer: AgentId | None):
        self.story = story
        self.obj = obj
        self.observer = observer  # None tracks the physical world
        self.container: ContainerId | None = None

    def feed(self, idx: int, ev: Event) -> None:
        if isinstance(ev, Declare) and ev.object == self.obj:
            self.container = ev.container
        elif isinstance(ev, Move) and ev.object == self.obj:
            self.container = ev.to
        elif self.observer is not None and isinstance(ev, (PrivateClaim, PublicClaim)):
            if ev.object != self.obj or ev.speaker == self.observer:
                return
            if isinstance(ev, PrivateClaim) and ev.listener != self.observer:
                return
            if _accepts_testimony(self.story, self.observer, ev.speaker, idx):
                self.container = ev.container


def brute_force_answer(story: Story, q: BeliefQuery) -> ContainerId:
    """Same contract as `answer_query`, via materialized sub-stories.

    Each nesting level copies out the events the next agent observes
    (observation judged against the full story's position timeline, since
    co-presence is a fact of the original world, not of the excerpt) and
    the final level runs a single-agent belief machine over the excerpt.
    """
    if q.object not in story.objects:
        raise UnknownObject(q.object)
    declared = set(story.agents)
    for a in q.chain:
        if a not in declared:
            raise UnknownAgent(a)
    if not any(
        isinstance(ev, (Declare, Move)) and ev.object == q.object for ev in story.events
    ):
        raise NoLocationEvidence(q.object)

    sub: list[tuple[int, Event]] = list(enumerate(story.events))
    for agent in q.chain:
        sub = [(i, ev) for i, ev in sub if _observes(story, agent, i)]

    machine = _BeliefMachine(story, q.object, q.chain[-1] if q.chain else None)
    for i, ev in sub:
        machine.feed(i, ev)
    if machine.container is not None:
        return machine.container

    # No evidence reached this chain: default to the opening declaration,
    # else the first placement.
    for ev in story.events:
        if isinstance(ev, Declare) and ev.object == q.object:
            return ev.container
    for ev in story.events:
        if isinstance(ev, Move) and ev.object == q.object:
            return ev.to
    raise NoLocationEvidence(q.object)
