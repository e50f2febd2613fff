from dataclasses import replace

import pytest
from fixtures import (
    EXPLORE_ANSWER,
    EXPLORE_QUESTION,
    TANGERINE_ANSWER,
    TANGERINE_QUESTION,
    TOMATO_ANSWER,
    TOMATO_QUESTION,
    TOMI_ANSWER,
    TOMI_QUESTION,
)

from tomforge.errors import NoLocationEvidence, UnknownAgent, UnknownObject
from tomforge.generator import GenConfig, sample_chain, sample_story
from tomforge.oracle import (
    answer_query,
    brute_force_answer,
    nested_view,
    trusts,
    witness_table,
    witnessed_events,
)
from tomforge.seeds import derive_seed, rng_for
from tomforge.story import (
    BeliefQuery,
    Declare,
    Distractor,
    Enter,
    Exit,
    Move,
    NoOp,
    PrivateClaim,
    PublicClaim,
    Story,
    StoryMeta,
    parse_question,
    validate_story,
)


def mini_story(events, agents=("a", "b", "c"), containers=("c1", "c2", "c3"), boundaries=(0,)):
    story = Story(
        id="mini",
        events=tuple(events),
        agents=tuple(agents),
        rooms=("room", "waiting_room"),
        objects=("obj",),
        containers=tuple(containers),
        meta=StoryMeta(dataset_tag="hitom", chapter_boundaries=tuple(boundaries)),
    )
    validate_story(story)
    return story


# Four-event scenario with one early leaver; answers worked out by hand.
FOUR = mini_story(
    [
        Enter(("a", "b"), "room"),
        Declare("obj", "c1", "room"),
        Exit("a", "room"),
        Move("b", "obj", "c2", "room"),
    ],
    agents=("a", "b"),
)


@pytest.mark.parametrize(
    "chain,expected",
    [((), "c2"), (("a",), "c1"), (("b",), "c2"), (("b", "a"), "c1")],
)
def test_four_event_story_all_orders(chain, expected):
    q = BeliefQuery(chain, "obj")
    assert answer_query(FOUR, q) == expected
    assert brute_force_answer(FOUR, q) == expected


def test_witnessed_events_excludes_after_exit():
    assert witnessed_events(FOUR, "a") == [0, 1, 2]
    assert witnessed_events(FOUR, "b") == [0, 1, 2, 3]


def test_private_claim_witnessed_only_by_participants():
    story = mini_story(
        [
            Enter(("a", "b", "c"), "room"),
            Declare("obj", "c1", "room"),
            PrivateClaim("a", "b", "obj", "c2"),
        ]
    )
    table = witness_table(story)
    assert table[2] == frozenset({"a", "b"})


def test_public_claim_heard_by_everyone_everywhere():
    story = mini_story(
        [
            Enter(("a", "b", "c"), "room"),
            Declare("obj", "c1", "room"),
            Exit("c", "room"),
            PublicClaim("a", "obj", "c2"),
        ]
    )
    assert witness_table(story)[3] == frozenset({"a", "b", "c"})


def test_witness_override_adds_secret_observer():
    story = mini_story(
        [
            Enter(("a", "b"), "room"),
            Declare("obj", "c1", "room"),
            Exit("b", "room"),
            Move("a", "obj", "c2", "room", witness_override=("b",)),
        ],
        agents=("a", "b"),
    )
    assert "b" in witness_table(story)[3]
    assert answer_query(story, BeliefQuery(("b",), "obj")) == "c2"


# Six-event scenario: b exits before c's move, so the (a, b) view drops it
# even though a saw it.  Hand-simulated.
SIX = mini_story(
    [
        Enter(("a", "b", "c"), "room"),
        Declare("obj", "c1", "room"),
        Exit("b", "room"),
        Move("c", "obj", "c2", "room"),
        Exit("a", "room"),
        Exit("c", "room"),
    ]
)


def test_nested_view_filters_by_each_link():
    assert nested_view(SIX, ("a",)) == [0, 1, 2, 3, 4]
    assert nested_view(SIX, ("a", "b")) == [0, 1, 2]
    assert answer_query(SIX, BeliefQuery(("a", "b"), "obj")) == "c1"
    assert answer_query(SIX, BeliefQuery(("a",), "obj")) == "c2"


def test_nested_view_base_and_idempotence():
    assert nested_view(SIX, ("a",)) == witnessed_events(SIX, "a")
    assert nested_view(SIX, ("a", "a")) == nested_view(SIX, ("a",))


def test_unknown_agent_and_object_errors():
    with pytest.raises(UnknownAgent):
        witnessed_events(FOUR, "zed")
    with pytest.raises(UnknownAgent):
        answer_query(FOUR, BeliefQuery(("zed",), "obj"))
    with pytest.raises(UnknownObject):
        answer_query(FOUR, BeliefQuery((), "ghost"))


def test_no_location_evidence():
    story = mini_story([Enter(("a", "b"), "room"), NoOp("a", "room")], agents=("a", "b"))
    with pytest.raises(NoLocationEvidence):
        answer_query(story, BeliefQuery((), "obj"))
    with pytest.raises(NoLocationEvidence):
        brute_force_answer(story, BeliefQuery((), "obj"))


def test_fallback_to_opening_declaration():
    # c misses every location event but was present for nothing at all;
    # the opening declaration is common knowledge.
    story = mini_story(
        [
            Enter(("a", "b"), "room"),
            Declare("obj", "c1", "room"),
            Move("a", "obj", "c2", "room"),
            Exit("a", "room"),
            Exit("b", "room"),
            Enter(("c",), "room"),
        ]
    )
    q = BeliefQuery(("c",), "obj")
    assert answer_query(story, q) == "c1"
    assert brute_force_answer(story, q) == "c1"


# --- trust / testimony -----------------------------------------------------

def claim_story(listener_exits_first: bool):
    order = [("l", "s")] if listener_exits_first else [("s", "l")]
    exits = [Exit(a, "room") for pair in order for a in pair]
    events = [
        Enter(("s", "l"), "room"),
        Declare("obj", "c1", "room"),
        Move("s", "obj", "c2", "room"),
        *exits,
        Enter(("s", "l"), "waiting_room"),
        PrivateClaim("s", "l", "obj", "c3"),
    ]
    return mini_story(events, agents=("l", "s"))


def test_claim_accepted_when_speaker_exited_later():
    story = claim_story(listener_exits_first=True)
    q = BeliefQuery(("l",), "obj")
    assert answer_query(story, q) == "c3"
    assert brute_force_answer(story, q) == "c3"


def test_claim_rejected_when_speaker_exited_earlier():
    story = claim_story(listener_exits_first=False)
    q = BeliefQuery(("l",), "obj")
    # l watched the move and does not trust the earlier-exiting speaker.
    assert answer_query(story, q) == "c2"
    assert brute_force_answer(story, q) == "c2"


def test_claim_never_changes_speaker_belief():
    story = claim_story(listener_exits_first=True)
    q = BeliefQuery(("s",), "obj")
    assert answer_query(story, q) == "c2"


def test_trust_rule_details():
    story = claim_story(listener_exits_first=True)
    at = len(story.events) - 1
    assert trusts(story, "l", "s", at)  # s exited later
    assert not trusts(story, "s", "l", at)  # l exited earlier
    # nobody exited yet at the move
    assert trusts(story, "l", "s", 2) and trusts(story, "s", "l", 2)


def test_tomato_deception_scenario(tomato_story):
    q = parse_question(TOMATO_QUESTION)
    assert answer_query(tomato_story, q) == TOMATO_ANSWER
    assert brute_force_answer(tomato_story, q) == TOMATO_ANSWER
    # the privately deceived listener, though, ends up believing the lie
    q2 = BeliefQuery(("benjamin", "ella"), "tomato")
    assert answer_query(tomato_story, q2) == "blue_bathtub"
    assert brute_force_answer(tomato_story, q2) == "blue_bathtub"


# --- reference stories -----------------------------------------------------

def test_tangerine_fourth_order(tangerine_story):
    q = parse_question(TANGERINE_QUESTION)
    assert answer_query(tangerine_story, q) == TANGERINE_ANSWER
    assert brute_force_answer(tangerine_story, q) == TANGERINE_ANSWER


def test_tomi_search_question(tomi_story):
    q = parse_question(TOMI_QUESTION)
    assert answer_query(tomi_story, q) == TOMI_ANSWER
    assert brute_force_answer(tomi_story, q) == TOMI_ANSWER


def test_explore_self_search(explore_story):
    from tomforge.story import surface_answer

    q = parse_question(EXPLORE_QUESTION)
    assert surface_answer(explore_story, answer_query(explore_story, q)) == EXPLORE_ANSWER
    assert surface_answer(explore_story, brute_force_answer(explore_story, q)) == EXPLORE_ANSWER


def test_search_equals_think_chain(tomi_story):
    think = BeliefQuery(("amelia", "hunter"), "jeans", "think_chain")
    search = BeliefQuery(("amelia", "hunter"), "jeans", "search")
    assert answer_query(tomi_story, think) == answer_query(tomi_story, search)


# --- metamorphic properties over generated stories --------------------------

CFG = GenConfig()


def generated(seed_label, n):
    for i in range(n):
        yield sample_story(CFG, derive_seed(99, seed_label, i))


def test_order0_equals_last_move_or_declare():
    for story in generated("order0", 200):
        q = BeliefQuery((), story.objects[0])
        expected = None
        for ev in story.events:
            if isinstance(ev, Declare) and ev.object == q.object:
                expected = ev.container
            elif isinstance(ev, Move) and ev.object == q.object:
                expected = ev.to
        assert answer_query(story, q) == expected


def test_self_idempotence():
    for story in generated("selfidem", 120):
        rng = rng_for(1, story.id)
        agent = rng.choice(story.agents)
        single = answer_query(story, BeliefQuery((agent,), story.objects[0]))
        doubled = answer_query(story, BeliefQuery((agent, agent), story.objects[0]))
        tripled = answer_query(story, BeliefQuery((agent, agent, agent), story.objects[0]))
        assert single == doubled == tripled


def strip_inert(story):
    """Remove Distractor/NoOp events, remapping chapter boundaries."""
    keep = [i for i, ev in enumerate(story.events) if not isinstance(ev, (Distractor, NoOp))]
    index_map = {old: new for new, old in enumerate(keep)}
    boundaries = tuple(
        index_map[min(i for i in keep if i >= b)] for b in story.meta.chapter_boundaries
    )
    return replace(
        story,
        events=tuple(story.events[i] for i in keep),
        meta=replace(story.meta, chapter_boundaries=boundaries),
    )


def test_distractor_and_noop_deletion_invariance():
    checked = 0
    for story in generated("inert", 150):
        slim = strip_inert(story)
        for order in range(5):
            rng = rng_for(2, story.id, order)
            chain = sample_chain(story, order, rng)
            q = BeliefQuery(chain, story.objects[0])
            assert answer_query(story, q) == answer_query(slim, q)
            checked += 1
    assert checked >= 750


def test_deleting_private_claim_never_moves_speaker_belief():
    checked = 0
    for story in generated("speaker", 400):
        claim_indices = [
            i for i, ev in enumerate(story.events) if isinstance(ev, PrivateClaim)
        ]
        for i in claim_indices:
            speaker = story.events[i].speaker
            slim_events = story.events[:i] + story.events[i + 1:]
            boundaries = tuple(b if b < i else b - 1 for b in story.meta.chapter_boundaries)
            slim = replace(
                story,
                events=slim_events,
                meta=replace(story.meta, chapter_boundaries=boundaries),
            )
            for prefix_len in range(3):
                rng = rng_for(3, story.id, i, prefix_len)
                prefix = tuple(
                    rng.choice(story.agents) for _ in range(prefix_len)
                )
                chain = prefix + (speaker,)
                q = BeliefQuery(chain, story.objects[0])
                assert answer_query(story, q) == answer_query(slim, q)
                checked += 1
    assert checked >= 100


def test_omniscient_prefix_drops_out():
    """A chain headed by an agent who saw everything answers like the tail chain."""
    checked = 0
    cfg = GenConfig(n_chapters=1, distractor_rate=0.0, claim_rate=0.0)
    for i in range(400):
        story = sample_story(cfg, derive_seed(99, "omni", i))
        table = witness_table(story)
        everyone = [a for a in story.agents if all(a in w for w in table)]
        if not everyone:
            continue
        omni = everyone[0]
        for order in range(1, 4):
            rng = rng_for(4, story.id, order)
            tail = sample_chain(story, order, rng)
            if tail[0] == omni:
                continue
            with_prefix = answer_query(story, BeliefQuery((omni,) + tail, story.objects[0]))
            without = answer_query(story, BeliefQuery(tail, story.objects[0]))
            assert with_prefix == without
            checked += 1
        # claim-free story: an omniscient agent's own belief is reality
        assert answer_query(story, BeliefQuery((omni,), story.objects[0])) == answer_query(
            story, BeliefQuery((), story.objects[0])
        )
    assert checked >= 200


def test_cross_oracle_equivalence_sample():
    for story in generated("xoracle", 150):
        for order in range(5):
            rng = rng_for(5, story.id, order)
            chain = sample_chain(story, order, rng)
            q = BeliefQuery(chain, story.objects[0])
            assert answer_query(story, q) == brute_force_answer(story, q)
