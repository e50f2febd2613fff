"""Typed story DSL for multi-agent object-location narratives.

Stories are ordered event lists over four vocabularies (agents, rooms,
objects, containers).  Ids are lowercase underscore tokens ("blue_pantry",
"back_room_of_the_thrift_store"); agent ids are capitalized on render and
lowercased on parse.  `render_story`/`parse_story` and
`render_question`/`parse_question` are exact inverses on stories and
queries produced by this package.

Template grammar (one sentence per event, all period-terminated):

    Enter        "{A} entered the {R}."            multi-agent: "A, B and C entered the {R}."
    Exit         "{A} exited the {R}."
    Declare      "The {O} is in the {C}."
    Move         "{A} moved the {O} to the {C}."
                 parse also accepts the long form
                 "{A} moved the {O} to the {C}, which is also located in the {R}."
    NoOp         "{A} made no movements and stayed in the {R} for 1 minute."
    PrivateClaim "{S} privately told {L} that the {O} is in the {C} now."
    PublicClaim  "{S} publicly claimed that the {O} is in the {C} now."
    Distractor   "{A} likes the {X}." / "{A} loves the {X}." / "{A} dislikes the {X}."
                 "{A} lost his {X}."  (pronoun per PRONOUNS, parse accepts his/her/their)
                 "{A} saw a {X}."

An event with secret extra witnesses renders one trailing sentence per
witness: "While this action was happening, {A} witnessed this action in
secret (and only this action)." — on parse such a sentence attaches the
witness to the immediately preceding event.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import InconsistentPresence, UnknownQuestionForm, UnknownSentence

AgentId = str
RoomId = str
ObjectId = str
ContainerId = str

TOKEN_RE = re.compile(r"^[a-z0-9_]+$")

# Distractor surface verbs.  Generated stories use likes/lost/saw; the
# parser additionally accepts loves/dislikes which appear in upstream
# benchmark files.
DISTRACTOR_KINDS = ("likes", "loves", "dislikes", "lost", "saw")

# Possessive pronoun for "lost" distractors.  Fixed per-name table keeps
# rendering deterministic; parsing accepts any of his/her/their.
PRONOUNS: dict[str, str] = {}
DEFAULT_PRONOUN = "his"


@dataclass(frozen=True)
class Enter:
    agents: tuple[AgentId, ...]
    room: RoomId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class Exit:
    agent: AgentId
    room: RoomId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class Declare:
    object: ObjectId
    container: ContainerId
    room: RoomId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class Move:
    agent: AgentId
    object: ObjectId
    to: ContainerId
    room: RoomId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class NoOp:
    agent: AgentId
    room: RoomId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class PrivateClaim:
    speaker: AgentId
    listener: AgentId
    object: ObjectId
    container: ContainerId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class PublicClaim:
    speaker: AgentId
    object: ObjectId
    container: ContainerId
    witness_override: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class Distractor:
    agent: AgentId
    kind: str  # one of DISTRACTOR_KINDS
    subject: str
    witness_override: tuple[AgentId, ...] = ()


Event = Enter | Exit | Declare | Move | NoOp | PrivateClaim | PublicClaim | Distractor

LOCATION_EVENTS = (Declare, Move)


@dataclass(frozen=True)
class StoryMeta:
    dataset_tag: str = "custom"
    seed: int | None = None
    chapter_boundaries: tuple[int, ...] = (0,)


@dataclass(frozen=True)
class Story:
    id: str
    events: tuple[Event, ...]
    agents: tuple[AgentId, ...]
    rooms: tuple[RoomId, ...]
    objects: tuple[ObjectId, ...]
    containers: tuple[ContainerId, ...]
    meta: StoryMeta = field(default_factory=StoryMeta)


@dataclass(frozen=True)
class BeliefQuery:
    """An agent chain (possibly empty) asking where it believes `object` is.

    `len(chain)` is the nesting order; 0 asks for the object's real place.
    """

    chain: tuple[AgentId, ...]
    object: ObjectId
    phrasing: str = "think_chain"  # or "search"

    @property
    def order(self) -> int:
        return len(self.chain)


def surface(token: str) -> str:
    """Underscore id -> spaced surface form ("plastic_storage_bin" -> "plastic storage bin")."""
    return token.replace("_", " ")


def agent_surface(agent: AgentId) -> str:
    return agent[:1].upper() + agent[1:]


def _agent_id(name: str) -> AgentId:
    return name[:1].lower() + name[1:]


def _token_id(words: str) -> str:
    return words.strip().replace(" ", "_")


def surface_answer(story: Story, container: ContainerId) -> str:
    """Container id in the story's native answer convention.

    Benchmark families that phrase stories in free prose ("plastic storage
    bin") publish spaced answers; the templated families keep underscores.
    """
    if story.meta.dataset_tag.startswith("exploretom"):
        return surface(container)
    return container


# ---------------------------------------------------------------------------
# validation

def validate_story(story: Story) -> None:
    """Raise if the story breaks vocabulary or presence invariants."""
    declared_agents = set(story.agents)
    declared_rooms = set(story.rooms)
    declared_objects = set(story.objects)
    declared_containers = set(story.containers)

    for tokens, label in (
        (story.agents, "agent"),
        (story.rooms, "room"),
        (story.objects, "object"),
        (story.containers, "container"),
    ):
        for tok in tokens:
            if not TOKEN_RE.match(tok):
                raise InconsistentPresence(f"bad {label} id {tok!r}")

    where: dict[AgentId, RoomId | None] = {a: None for a in story.agents}

    def check_agent(a: AgentId) -> None:
        if a not in declared_agents:
            raise InconsistentPresence(f"undeclared agent {a!r}")

    for boundary in story.meta.chapter_boundaries:
        if not (0 <= boundary < len(story.events)) or not isinstance(story.events[boundary], Enter):
            raise InconsistentPresence(f"chapter boundary {boundary} is not an Enter event")

    for i, ev in enumerate(story.events):
        for w in ev.witness_override:
            check_agent(w)
        if isinstance(ev, Enter):
            if not ev.agents:
                raise InconsistentPresence(f"event {i}: nobody enters")
            if ev.room not in declared_rooms:
                raise InconsistentPresence(f"undeclared room {ev.room!r}")
            for a in ev.agents:
                check_agent(a)
                if where[a] == ev.room:
                    raise InconsistentPresence(f"event {i}: {a} re-enters {ev.room}")
                where[a] = ev.room
        elif isinstance(ev, Exit):
            check_agent(ev.agent)
            if where.get(ev.agent) != ev.room:
                raise InconsistentPresence(f"event {i}: {ev.agent} exits {ev.room} while not inside")
            where[ev.agent] = None
        elif isinstance(ev, (Move, NoOp)):
            check_agent(ev.agent)
            if where.get(ev.agent) != ev.room:
                raise InconsistentPresence(f"event {i}: {ev.agent} acts in {ev.room} while not inside")
            if isinstance(ev, Move):
                if ev.object not in declared_objects:
                    raise InconsistentPresence(f"undeclared object {ev.object!r}")
                if ev.to not in declared_containers:
                    raise InconsistentPresence(f"undeclared container {ev.to!r}")
        elif isinstance(ev, Declare):
            if ev.object not in declared_objects or ev.container not in declared_containers:
                raise InconsistentPresence(f"event {i}: undeclared object/container in declaration")
        elif isinstance(ev, PrivateClaim):
            check_agent(ev.speaker)
            check_agent(ev.listener)
            if ev.speaker == ev.listener:
                raise InconsistentPresence(f"event {i}: speaker talks to themselves")
        elif isinstance(ev, PublicClaim):
            check_agent(ev.speaker)
        elif isinstance(ev, Distractor):
            check_agent(ev.agent)
            if ev.kind not in DISTRACTOR_KINDS:
                raise InconsistentPresence(f"event {i}: unknown distractor kind {ev.kind!r}")


# ---------------------------------------------------------------------------
# rendering

def _join_names(agents: tuple[AgentId, ...]) -> str:
    names = [agent_surface(a) for a in agents]
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def render_event(ev: Event) -> str:
    if isinstance(ev, Enter):
        return f"{_join_names(ev.agents)} entered the {ev.room}."
    if isinstance(ev, Exit):
        return f"{agent_surface(ev.agent)} exited the {ev.room}."
    if isinstance(ev, Declare):
        return f"The {ev.object} is in the {ev.container}."
    if isinstance(ev, Move):
        return f"{agent_surface(ev.agent)} moved the {ev.object} to the {ev.to}."
    if isinstance(ev, NoOp):
        return f"{agent_surface(ev.agent)} made no movements and stayed in the {ev.room} for 1 minute."
    if isinstance(ev, PrivateClaim):
        return (
            f"{agent_surface(ev.speaker)} privately told {agent_surface(ev.listener)} "
            f"that the {ev.object} is in the {ev.container} now."
        )
    if isinstance(ev, PublicClaim):
        return f"{agent_surface(ev.speaker)} publicly claimed that the {ev.object} is in the {ev.container} now."
    if isinstance(ev, Distractor):
        name = agent_surface(ev.agent)
        if ev.kind in ("likes", "loves", "dislikes"):
            return f"{name} {ev.kind} the {ev.subject}."
        if ev.kind == "lost":
            pron = PRONOUNS.get(ev.agent, DEFAULT_PRONOUN)
            return f"{name} lost {pron} {ev.subject}."
        return f"{name} saw a {ev.subject}."
    raise TypeError(f"not an event: {ev!r}")


def _witness_sentence(agent: AgentId) -> str:
    return (
        f"While this action was happening, {agent_surface(agent)} witnessed "
        "this action in secret (and only this action)."
    )


def render_story(story: Story) -> str:
    """One sentence per event (plus witness sentences), space-joined."""
    parts: list[str] = []
    for ev in story.events:
        parts.append(render_event(ev))
        for w in ev.witness_override:
            parts.append(_witness_sentence(w))
    return " ".join(parts)


def render_question(q: BeliefQuery) -> str:
    if not q.chain:
        return f"Where is the {q.object} really?"
    names = [agent_surface(a) for a in q.chain]
    if q.phrasing == "search":
        if len(names) == 1:
            return f"Where does {names[0]} search for the {q.object}?"
        links = [f"{names[0]} think that"] + [f"{n} thinks that" for n in names[1:-1]]
        return f"Where does {' '.join(links)} {names[-1]} searches for the {q.object}?"
    links = [f"{names[0]} think"] + [f"{n} thinks" for n in names[1:]]
    return f"Where does {' '.join(links)} the {q.object} is?"


# ---------------------------------------------------------------------------
# parsing

_NAME = r"[A-Z][A-Za-z_']*"
_TOK = r"[a-z0-9_ ]+?"

_SENTENCE_PATTERNS: list[tuple[re.Pattern[str], str]] = [
    (re.compile(rf"^While this action was happening, (?P<a>{_NAME}) witnessed this action in secret \(and only this action\)$"), "witness"),
    (re.compile(rf"^(?P<names>{_NAME}(?:, {_NAME})*(?: and {_NAME})?) entered the (?P<room>{_TOK})$"), "enter"),
    (re.compile(rf"^(?P<a>{_NAME}) exited the (?P<room>{_TOK})$"), "exit"),
    (re.compile(rf"^The (?P<obj>{_TOK}) is in the (?P<cont>{_TOK})$"), "declare"),
    (re.compile(rf"^(?P<a>{_NAME}) moved the (?P<obj>{_TOK}) to the (?P<cont>{_TOK}), which is also located in the (?P<room>{_TOK})$"), "move_long"),
    (re.compile(rf"^(?P<a>{_NAME}) moved the (?P<obj>{_TOK}) to the (?P<cont>{_TOK})$"), "move"),
    (re.compile(rf"^(?P<a>{_NAME}) made no movements and stayed in the (?P<room>{_TOK}) for 1 minute$"), "noop"),
    (re.compile(rf"^(?P<s>{_NAME}) privately told (?P<l>{_NAME}) that the (?P<obj>{_TOK}) is in the (?P<cont>{_TOK}) now$"), "private"),
    (re.compile(rf"^(?P<s>{_NAME}) publicly claimed that the (?P<obj>{_TOK}) is in the (?P<cont>{_TOK}) now$"), "public"),
    (re.compile(rf"^(?P<a>{_NAME}) (?P<kind>likes|loves|dislikes) the (?P<subj>{_TOK})$"), "liking"),
    (re.compile(rf"^(?P<a>{_NAME}) lost (?:his|her|their) (?P<subj>{_TOK})$"), "lost"),
    (re.compile(rf"^(?P<a>{_NAME}) saw a (?P<subj>{_TOK})$"), "saw"),
]


def _split_sentences(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(".")]
    if parts and parts[-1] == "":
        parts.pop()
    return parts


def _split_names(names: str) -> tuple[AgentId, ...]:
    head, sep, last = names.rpartition(" and ")
    pieces = ([n.strip() for n in head.split(",")] if sep else []) + [last.strip()]
    return tuple(_agent_id(n) for n in pieces if n)


def parse_story(text: str, story_id: str = "parsed", dataset_tag: str = "custom") -> Story:
    """Parse templated story text back into a `Story`.

    Raises UnknownSentence for sentences outside the grammar and
    InconsistentPresence when the event sequence is impossible.  Chapter
    boundaries are inferred as Enter events immediately followed by a
    declaration sentence (plus the story start).
    """
    events: list[Event] = []
    agents: set[AgentId] = set()
    rooms: set[RoomId] = set()
    objects: set[ObjectId] = set()
    containers: set[ContainerId] = set()
    where: dict[AgentId, RoomId | None] = {}

    def room_of(agent: AgentId, index: int) -> RoomId:
        room = where.get(agent)
        if room is None:
            raise InconsistentPresence(f"sentence {index}: {agent} acts while in no room")
        return room

    for idx, sentence in enumerate(_split_sentences(text)):
        matched = None
        for pattern, tag in _SENTENCE_PATTERNS:
            m = pattern.match(sentence)
            if m:
                matched = (m, tag)
                break
        if matched is None:
            raise UnknownSentence(idx, sentence + ".")
        m, tag = matched

        if tag == "witness":
            if not events:
                raise UnknownSentence(idx, sentence + ".")
            w = _agent_id(m["a"])
            agents.add(w)
            prev = events[-1]
            events[-1] = replace(prev, witness_override=prev.witness_override + (w,))
            continue
        if tag == "enter":
            names = _split_names(m["names"])
            room = _token_id(m["room"])
            for a in names:
                if where.get(a) == room:
                    raise InconsistentPresence(f"sentence {idx}: {a} re-enters {room}")
                where[a] = room
            agents.update(names)
            rooms.add(room)
            events.append(Enter(names, room))
            continue
        if tag == "exit":
            a, room = _agent_id(m["a"]), _token_id(m["room"])
            if where.get(a) != room:
                raise InconsistentPresence(f"sentence {idx}: {a} exits {room} while not inside")
            where[a] = None
            agents.add(a)
            rooms.add(room)
            events.append(Exit(a, room))
            continue
        if tag == "declare":
            obj, cont = _token_id(m["obj"]), _token_id(m["cont"])
            objects.add(obj)
            containers.add(cont)
            # Anchor sentence has no explicit room: it describes the room
            # of the most recent Enter.
            room = next((e.room for e in reversed(events) if isinstance(e, Enter)), None)
            if room is None:
                raise InconsistentPresence(f"sentence {idx}: declaration before any room is entered")
            events.append(Declare(obj, cont, room))
            continue
        if tag in ("move", "move_long"):
            a = _agent_id(m["a"])
            obj, cont = _token_id(m["obj"]), _token_id(m["cont"])
            room = _token_id(m["room"]) if tag == "move_long" else room_of(a, idx)
            if where.get(a) != room:
                raise InconsistentPresence(f"sentence {idx}: {a} moves things in {room} while not inside")
            agents.add(a)
            rooms.add(room)
            objects.add(obj)
            containers.add(cont)
            events.append(Move(a, obj, cont, room))
            continue
        if tag == "noop":
            a, room = _agent_id(m["a"]), _token_id(m["room"])
            if where.get(a) != room:
                raise InconsistentPresence(f"sentence {idx}: {a} stays in {room} while not inside")
            agents.add(a)
            rooms.add(room)
            events.append(NoOp(a, room))
            continue
        if tag == "private":
            s, l = _agent_id(m["s"]), _agent_id(m["l"])
            obj, cont = _token_id(m["obj"]), _token_id(m["cont"])
            agents.update((s, l))
            objects.add(obj)
            containers.add(cont)
            events.append(PrivateClaim(s, l, obj, cont))
            continue
        if tag == "public":
            s = _agent_id(m["s"])
            obj, cont = _token_id(m["obj"]), _token_id(m["cont"])
            agents.add(s)
            objects.add(obj)
            containers.add(cont)
            events.append(PublicClaim(s, obj, cont))
            continue
        # distractors
        a = _agent_id(m["a"])
        agents.add(a)
        kind = m["kind"] if tag == "liking" else tag
        events.append(Distractor(a, kind, _token_id(m["subj"])))

    boundaries = [0] + [
        i
        for i in range(1, len(events) - 1)
        if isinstance(events[i], Enter) and isinstance(events[i + 1], Declare)
    ]
    story = Story(
        id=story_id,
        events=tuple(events),
        agents=tuple(sorted(agents)),
        rooms=tuple(sorted(rooms)),
        objects=tuple(sorted(objects)),
        containers=tuple(sorted(containers)),
        meta=StoryMeta(dataset_tag=dataset_tag, seed=None, chapter_boundaries=tuple(boundaries)),
    )
    validate_story(story)
    return story


_Q_REALLY = re.compile(rf"^Where is the (?P<obj>{_TOK}) really\?$")
_Q_LINK = re.compile(rf"^(?P<a>{_NAME}) thinks? (?:that )?")
_Q_THINK_TAIL = re.compile(rf"^the (?P<obj>{_TOK}) is$")
_Q_SEARCH_TAIL = re.compile(rf"^(?P<a>{_NAME}) search(?:es)? for the (?P<obj>{_TOK})$")


def parse_question(text: str) -> BeliefQuery:
    """Inverse of `render_question`; tolerant of an optional "that"."""
    text = text.strip()
    m = _Q_REALLY.match(text)
    if m:
        return BeliefQuery((), _token_id(m["obj"]), "think_chain")
    if not text.startswith("Where does ") or not text.endswith("?"):
        raise UnknownQuestionForm(text)
    rest = text[len("Where does "):-1]
    chain: list[AgentId] = []
    while True:
        m = _Q_LINK.match(rest)
        if not m:
            break
        chain.append(_agent_id(m["a"]))
        rest = rest[m.end():]
    m = _Q_SEARCH_TAIL.match(rest)
    if m:
        chain.append(_agent_id(m["a"]))
        return BeliefQuery(tuple(chain), _token_id(m["obj"]), "search")
    m = _Q_THINK_TAIL.match(rest)
    if m and chain:
        return BeliefQuery(tuple(chain), _token_id(m["obj"]), "think_chain")
    raise UnknownQuestionForm(text)
