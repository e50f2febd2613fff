"""Seeded generation of multi-chapter object-finding stories and datasets.

Each chapter follows the fixed skeleton: everyone enters the chapter room,
the object's current location is declared, each participant takes one turn
(move the object or stay put, with optional side-chatter), exits in the
turn order, and the group retires to the waiting room where an optional
claim is made.  Questions pair a story with an agent chain of the requested
nesting order; answers come from the oracle.

The flagship profile generates one story per question-set: N stories x one
question per order, then reserves every top-order sample for the held-out
test split and shuffles the remainder into train/val.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .harness import SampleRecord
from .oracle import answer_query
from .seeds import derive_seed, rng_for
from .story import (
    BeliefQuery,
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
    StoryMeta,
    render_question,
    render_story,
    surface_answer,
    validate_story,
)

AGENT_POOL = (
    "olivia", "chloe", "oliver", "lily", "avery",
    "amelia", "hunter", "ella", "mila", "benjamin",
    "gracie", "william", "emily", "ava", "logan",
    "isabella", "jacob", "mason", "sophia", "jackson",
)

ROOM_POOL = (
    "playroom", "tv_room", "hall", "lounge", "dining_room",
    "study", "kitchen", "basement", "patio", "den",
)

OBJECT_POOL = (
    "tangerine", "tomato", "pumpkin", "jeans", "apple",
    "banana", "plum", "melon", "carrot", "onion",
    "potato", "cabbage", "turnip", "radish", "celery",
)

CONTAINER_POOL = (
    "blue_pantry", "blue_crate", "red_bottle", "red_drawer", "green_suitcase",
    "blue_bathtub", "red_bucket", "red_envelope", "green_basket", "blue_box",
    "red_pantry", "green_bottle", "blue_suitcase", "green_drawer", "red_crate",
    "green_envelope", "blue_bucket", "red_box", "green_crate", "blue_envelope",
)

LOST_SUBJECTS = ("watch", "phone", "gloves", "keys", "wallet", "scarf")
SEEN_SUBJECTS = ("monkey", "cat", "dog", "bird", "squirrel", "rabbit")

WAITING_ROOM = "waiting_room"


@dataclass(frozen=True)
class GenConfig:
    n_agents: int = 5
    n_chapters: int = 3
    agents: tuple[str, ...] = AGENT_POOL
    rooms: tuple[str, ...] = ROOM_POOL
    objects: tuple[str, ...] = OBJECT_POOL
    containers: tuple[str, ...] = CONTAINER_POOL
    n_containers: int = 6
    distractor_rate: float = 0.3
    claim_rate: float = 0.2
    move_rate: float = 0.6
    orders: tuple[int, ...] = (0, 1, 2, 3, 4)
    samples_per_order: int = 600
    seed: int = 0


def paper_profile(seed: int = 0) -> GenConfig:
    """The flagship replica profile: 600 stories x orders 0..4."""
    return GenConfig(seed=seed)


@dataclass
class DatasetSplits:
    train: list[SampleRecord] = field(default_factory=list)
    val: list[SampleRecord] = field(default_factory=list)
    test_ood: list[SampleRecord] = field(default_factory=list)


def _validate_config(cfg: GenConfig) -> None:
    if cfg.n_agents < 2 or cfg.n_agents > len(cfg.agents):
        raise ConfigError(f"need 2..{len(cfg.agents)} agents, got {cfg.n_agents}")
    if not 1 <= cfg.n_chapters <= 3:
        raise ConfigError("n_chapters must be in 1..3")
    if cfg.n_containers < 3 or cfg.n_containers > len(cfg.containers):
        raise ConfigError("need at least 3 distinct containers")
    if not cfg.rooms or not cfg.objects:
        raise ConfigError("room and object vocabularies must be non-empty")
    if WAITING_ROOM in cfg.rooms:
        raise ConfigError(f"{WAITING_ROOM!r} is reserved")
    for rate in (cfg.distractor_rate, cfg.claim_rate, cfg.move_rate):
        if not 0.0 <= rate <= 1.0:
            raise ConfigError("rates must lie in [0, 1]")
    for k in cfg.orders:
        if not 0 <= k <= 4:
            raise ConfigError("orders must lie in 0..4")


def sample_story(cfg: GenConfig, seed: int) -> Story:
    """Deterministic story for (cfg, seed)."""
    _validate_config(cfg)
    rng = rng_for(seed, "story")

    agents = tuple(rng.sample(cfg.agents, cfg.n_agents))
    obj = rng.choice(cfg.objects)
    containers = tuple(rng.sample(cfg.containers, cfg.n_containers))
    current = rng.choice(containers)

    events: list[Event] = []
    boundaries: list[int] = []
    used_rooms: set[str] = set()
    used_containers: set[str] = {current}

    def maybe_distractor(pool: tuple[str, ...]) -> None:
        if rng.random() >= cfg.distractor_rate:
            return
        agent = rng.choice(pool)
        kind = rng.choice(("likes", "lost", "saw"))
        if kind == "likes":
            subject = rng.choice(cfg.containers)
        elif kind == "lost":
            subject = rng.choice(LOST_SUBJECTS)
        else:
            subject = rng.choice(SEEN_SUBJECTS)
        events.append(Distractor(agent, kind, subject))

    for chapter in range(cfg.n_chapters):
        if chapter == 0:
            participants = list(agents)
        else:
            chosen = set(rng.sample(agents, rng.randint(2, cfg.n_agents)))
            participants = [a for a in agents if a in chosen]
        room = rng.choice(cfg.rooms)
        used_rooms.add(room)

        boundaries.append(len(events))
        events.append(Enter(tuple(participants), room))
        events.append(Declare(obj, current, room))

        turn_order = participants[:]
        rng.shuffle(turn_order)
        for agent in turn_order:
            maybe_distractor(tuple(participants))
            if rng.random() < cfg.move_rate:
                target = rng.choice([c for c in containers if c != current])
                events.append(Move(agent, obj, target, room))
                current = target
                used_containers.add(target)
            else:
                events.append(NoOp(agent, room))
            events.append(Exit(agent, room))
        events.append(Enter(tuple(participants), WAITING_ROOM))

        if rng.random() < cfg.claim_rate and len(participants) >= 2:
            speaker = rng.choice(participants)
            claimed = rng.choice(containers)
            used_containers.add(claimed)
            if rng.random() < 0.5:
                listener = rng.choice([a for a in participants if a != speaker])
                events.append(PrivateClaim(speaker, listener, obj, claimed))
            else:
                events.append(PublicClaim(speaker, obj, claimed))

    story = Story(
        id=f"s{seed:016x}",
        events=tuple(events),
        agents=tuple(sorted(agents)),
        rooms=tuple(sorted(used_rooms | {WAITING_ROOM})),
        objects=(obj,),
        containers=tuple(sorted(used_containers)),
        meta=StoryMeta(dataset_tag="hitom", seed=seed, chapter_boundaries=tuple(boundaries)),
    )
    validate_story(story)
    return story


def sample_chain(story: Story, order: int, rng) -> tuple[str, ...]:
    """Agent chain of the given length with no immediate repetition.

    Chains draw from the first chapter's participants so every chain agent
    is reasoning-eligible for the whole story.
    """
    first_enter = story.events[story.meta.chapter_boundaries[0]]
    pool = list(first_enter.agents)
    chain: list[str] = []
    for _ in range(order):
        options = [a for a in pool if not chain or a != chain[-1]]
        chain.append(rng.choice(options))
    return tuple(chain)


def make_sample(story: Story, order: int, seed: int, split: str = "train") -> SampleRecord:
    """One question of the requested order against `story`."""
    if not 0 <= order <= 4:
        raise ConfigError("order must lie in 0..4")
    rng = rng_for(seed, "chain", order)
    obj = story.objects[0]
    chain = sample_chain(story, order, rng)
    query = BeliefQuery(chain, obj, "think_chain")
    answer = answer_query(story, query)
    dataset = "tom4_ood" if order == 4 else story.meta.dataset_tag
    return SampleRecord(
        id=f"{story.id}-q{order}",
        dataset=dataset,
        story=render_story(story),
        question=render_question(query),
        answer=surface_answer(story, answer),
        order=order,
        split=split,
    )


def build_dataset(cfg: GenConfig) -> DatasetSplits:
    """Generate, stratify by order, and split deterministically.

    Every top-order (4) sample goes to the held-out test split; the rest
    are shuffled once with a seeded RNG and divided 5:1 into train/val.
    """
    _validate_config(cfg)
    samples: list[SampleRecord] = []
    for i in range(cfg.samples_per_order):
        story_seed = derive_seed(cfg.seed, "story", i)
        story = sample_story(cfg, story_seed)
        for order in cfg.orders:
            samples.append(make_sample(story, order, derive_seed(cfg.seed, "sample", i, order)))

    ood = [s for s in samples if s.order == 4]
    rest = [s for s in samples if s.order != 4]

    shuffle_rng = rng_for(cfg.seed, "split")
    shuffle_rng.shuffle(rest)
    n_val = round(len(rest) / 6)
    train, val = rest[: len(rest) - n_val], rest[len(rest) - n_val:]

    return DatasetSplits(
        train=[replace(s, split="train") for s in train],
        val=[replace(s, split="val") for s in val],
        test_ood=[replace(s, split="test") for s in ood],
    )


def filter_binary_answers(samples: list[SampleRecord]) -> list[SampleRecord]:
    """Drop rows whose answer is a bare yes/no."""
    return [s for s in samples if s.answer.strip().lower() not in ("yes", "no")]
