"""Suspect flagging, the repair ladder, repair application, estimator."""

from __future__ import annotations

import pytest

from orcidrec.linkage import link_crossref_authors
from orcidrec.quality import (
    MULTI_ORCID_PER_RESEARCHER,
    NO_RESEARCHER_FOR_ORCID,
    REASON_MULTI_PUBLISHER_RESCUE,
    REASON_SCORE_KEEP,
    REASON_SCORE_REASSIGN,
    REASON_UNRECOVERABLE,
    REGISTRY_DISAGREES,
    SELF_COLLAB,
    VERDICT_DROP,
    VERDICT_KEEP,
    VERDICT_REASSIGN,
    RepairConfig,
    RepairOutcome,
    SuspectFlag,
    apply_repairs,
    build_publisher_history,
    detect_self_collaboration,
    estimate_shuffle_rate,
    flag_suspects,
    repair_report_rows,
    resolve_suspect,
    run_repair,
    shuffle_rate_rows,
)

from .conftest import (
    assertion,
    assertion_table,
    oid,
    profile,
    profile_table,
    pub,
    pub_table,
    researcher,
    researcher_table,
)


def _criteria(flags, doi, position):
    for f in flags:
        if (f.doi, f.position) == (doi, position):
            return set(f.criteria)
    return set()


# --- flagging criteria --------------------------------------------------

def test_self_collaboration_on_shuffled_pair():
    # A and B co-author two papers; A's ORCID lands on B's position on
    # the second one.  The ORCID then links to both researchers, who
    # co-occur on both papers: every assertion of that ORCID flags.
    X = oid(1)
    pubs = pub_table(
        pub("10.1/p1", authors=[("Ada", "Byron"), ("Grace", "Hopper")]),
        pub("10.1/p2", authors=[("Ada", "Byron"), ("Grace", "Hopper")]),
    )
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", dois=("10.1/p1", "10.1/p2")),
        researcher("r2", "Grace", "Hopper", dois=("10.1/p1", "10.1/p2")),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(
        assertion("10.1/p1", 0, X),  # correct placement
        assertion("10.1/p2", 1, X),  # shuffled onto Grace
    )
    flags = detect_self_collaboration(table, linked)
    keys = {(f.doi, f.position) for f in flags}
    assert keys == {("10.1/p1", 0), ("10.1/p2", 1)}
    for f in flags:
        assert f.criteria == frozenset({SELF_COLLAB})


def test_no_self_collab_when_researchers_never_coincide():
    # same ORCID on two papers linked to two people who never share a
    # paper: multi-owner, but no self-collaboration signal
    X = oid(1)
    pubs = pub_table(
        pub("10.1/p1", authors=[("Ada", "Byron")]),
        pub("10.1/p2", authors=[("Grace", "Hopper")]),
    )
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", dois=("10.1/p1",)),
        researcher("r2", "Grace", "Hopper", dois=("10.1/p2",)),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(
        assertion("10.1/p1", 0, X),
        assertion("10.1/p2", 0, X),
    )
    assert detect_self_collaboration(table, linked) == set()


def test_multi_orcid_per_researcher():
    pubs = pub_table(
        pub("10.1/p1", authors=[("Ada", "Byron")]),
        pub("10.1/p2", authors=[("Ada", "Byron")]),
    )
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", orcid=oid(1), dois=("10.1/p1", "10.1/p2")),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(
        assertion("10.1/p1", 0, oid(1)),
        assertion("10.1/p2", 0, oid(2)),  # second identity for the same person
    )
    flags = flag_suspects(table, linked, researchers)
    assert MULTI_ORCID_PER_RESEARCHER in _criteria(flags, "10.1/p1", 0)
    assert MULTI_ORCID_PER_RESEARCHER in _criteria(flags, "10.1/p2", 0)


def test_registry_disagrees_own_orcid_differs():
    pubs = pub_table(pub("10.1/p1", authors=[("Ada", "Byron")]))
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", orcid=oid(7), dois=("10.1/p1",)),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(assertion("10.1/p1", 0, oid(8)))
    flags = flag_suspects(table, linked, researchers)
    criteria = _criteria(flags, "10.1/p1", 0)
    assert REGISTRY_DISAGREES in criteria
    # nobody in the registry owns oid(8) either
    assert NO_RESEARCHER_FOR_ORCID in criteria


def test_registry_disagrees_orcid_owned_by_someone_else():
    pubs = pub_table(pub("10.1/p1", authors=[("Ada", "Byron")]))
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", orcid=None, dois=("10.1/p1",)),
        researcher("r2", "Grace", "Hopper", orcid=oid(8)),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(assertion("10.1/p1", 0, oid(8)))
    flags = flag_suspects(table, linked, researchers)
    criteria = _criteria(flags, "10.1/p1", 0)
    assert REGISTRY_DISAGREES in criteria
    # oid(8) does have a registry owner, so criterion 4 stays silent
    assert NO_RESEARCHER_FOR_ORCID not in criteria


def test_consistent_assertion_raises_no_flags():
    pubs = pub_table(pub("10.1/p1", authors=[("Ada", "Byron")]))
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", orcid=oid(1), dois=("10.1/p1",)),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(assertion("10.1/p1", 0, oid(1)))
    assert flag_suspects(table, linked, researchers) == set()


def test_no_researcher_for_orcid_fires_without_linkage():
    # an unlinked position with an ORCID nobody in the registry owns
    pubs = pub_table(pub("10.1/p1", authors=[("Un", "Known")]))
    researchers = researcher_table(
        researcher("r1", "Somebody", "Else", orcid=oid(1)),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(assertion("10.1/p1", 0, oid(9)))
    flags = flag_suspects(table, linked, researchers)
    assert _criteria(flags, "10.1/p1", 0) == {NO_RESEARCHER_FOR_ORCID}


# --- the resolve ladder -------------------------------------------------

FLAG = SuspectFlag("10.1/p1", 0, oid(1), frozenset({SELF_COLLAB}))
CONFIG = RepairConfig()


def test_resolve_missing_profile_drops():
    publication = pub("10.1/p1", authors=[("Maria", "Garcia"), ("Wei", "Zhang")])
    out = resolve_suspect(FLAG, publication, None, {}, CONFIG)
    assert out.verdict == VERDICT_DROP
    assert out.reason == REASON_UNRECOVERABLE
    assert out.best_score is None


def test_resolve_keep_on_close_name():
    publication = pub("10.1/p1", authors=[("Maria", "Garcia"), ("Wei", "Zhang")])
    prof = profile(oid(1), "Maria", "Garcia")
    out = resolve_suspect(FLAG, publication, prof, {}, CONFIG)
    assert out.verdict == VERDICT_KEEP
    assert out.reason == REASON_SCORE_KEEP
    assert out.best_score == 1.0


def test_resolve_reassign_to_unique_match():
    # profile says Wei Zhang, asserted under Maria Garcia: exact match
    # at the other position wins a reassignment
    publication = pub("10.1/p1", authors=[("Maria", "Garcia"), ("Wei", "Zhang")])
    prof = profile(oid(1), "Wei", "Zhang")
    out = resolve_suspect(FLAG, publication, prof, {}, CONFIG)
    assert out.verdict == VERDICT_REASSIGN
    assert out.new_position == 1
    assert out.best_score == 1.0
    assert out.reason == REASON_SCORE_REASSIGN
    assert out.verdict_label() == "REASSIGN(1)"


def test_resolve_tied_match_drops_without_rescue():
    # two identically-named other authors tie at 1.0: ambiguous, and the
    # tie precludes the rescue rung even with a deep publisher history
    publication = pub(
        "10.1/p1",
        authors=[("Maria", "Garcia"), ("Wei", "Zhang"), ("Wei", "Zhang")],
    )
    prof = profile(oid(1), "Wei", "Zhang")
    history = {(oid(1), "maria garcia"): {"p1", "p2", "p3"}}
    out = resolve_suspect(FLAG, publication, prof, history, CONFIG)
    assert out.verdict == VERDICT_DROP
    assert out.reason == REASON_UNRECOVERABLE
    assert out.best_score == 1.0


def test_resolve_multi_publisher_rescue():
    # profile name far from everyone, but the (orcid, printed name) pair
    # recurs across two publishers: trusted and kept
    publication = pub("10.1/p1", authors=[("Maria", "Garcia"), ("Wei", "Zhang")])
    prof = profile(oid(1), "Znxxqj", "Vvkpmw")
    history = {(oid(1), "maria garcia"): {"pubA", "pubB"}}
    out = resolve_suspect(FLAG, publication, prof, history, CONFIG)
    assert out.verdict == VERDICT_KEEP
    assert out.reason == REASON_MULTI_PUBLISHER_RESCUE


def test_resolve_single_publisher_history_does_not_rescue():
    publication = pub("10.1/p1", authors=[("Maria", "Garcia"), ("Wei", "Zhang")])
    prof = profile(oid(1), "Znxxqj", "Vvkpmw")
    history = {(oid(1), "maria garcia"): {"pubA"}}
    out = resolve_suspect(FLAG, publication, prof, history, CONFIG)
    assert out.verdict == VERDICT_DROP
    assert out.reason == REASON_UNRECOVERABLE


def test_resolve_rescue_disabled():
    publication = pub("10.1/p1", authors=[("Maria", "Garcia"), ("Wei", "Zhang")])
    prof = profile(oid(1), "Znxxqj", "Vvkpmw")
    history = {(oid(1), "maria garcia"): {"pubA", "pubB"}}
    config = RepairConfig(rescue_enabled=False)
    out = resolve_suspect(FLAG, publication, prof, history, config)
    assert out.verdict == VERDICT_DROP


def test_short_name_guard_blocks_spurious_keep():
    # "l i" vs "l liu": high ratio purely from near-empty parts; the
    # minimum-part-length guard refuses to let it clear
    publication = pub("10.1/p1", authors=[("L", "Liu"), ("Wei", "Zhang")])
    prof = profile(oid(1), "L", "I")
    out = resolve_suspect(FLAG, publication, prof, {}, CONFIG)
    assert out.verdict == VERDICT_DROP


def test_short_name_guard_allows_exact_match():
    # identical strings always clear, however short
    publication = pub("10.1/p1", authors=[("L", "I"), ("Wei", "Zhang")])
    prof = profile(oid(1), "L", "I")
    out = resolve_suspect(FLAG, publication, prof, {}, CONFIG)
    assert out.verdict == VERDICT_KEEP
    assert out.best_score == 1.0


def test_short_name_guard_does_not_block_rescue():
    publication = pub("10.1/p1", authors=[("L", "Liu"), ("Wei", "Zhang")])
    prof = profile(oid(1), "Someone", "Different")
    history = {(oid(1), "l liu"): {"pubA", "pubB"}}
    out = resolve_suspect(FLAG, publication, prof, history, CONFIG)
    assert out.verdict == VERDICT_KEEP
    assert out.reason == REASON_MULTI_PUBLISHER_RESCUE


def test_build_publisher_history():
    pubs = pub_table(
        pub("10.1/p1", authors=[("Maria", "Garcia")], publisher="A"),
        pub("10.1/p2", authors=[("Maria", "Garcia")], publisher="B"),
        pub("10.1/p3", authors=[("Maria", "Garcia")], publisher="B"),
    )
    table = assertion_table(
        assertion("10.1/p1", 0, oid(1)),
        assertion("10.1/p2", 0, oid(1)),
        assertion("10.1/p3", 0, oid(1)),
    )
    history = build_publisher_history(table, pubs)
    assert history[(oid(1), "maria garcia")] == {"A", "B"}


# --- applying repairs ---------------------------------------------------

def _outcome(doi, position, orcid, verdict, new_position=None):
    return RepairOutcome(
        doi, position, orcid, frozenset({SELF_COLLAB}), verdict,
        new_position, 1.0,
        REASON_SCORE_REASSIGN if verdict == VERDICT_REASSIGN else REASON_SCORE_KEEP,
    )


def test_apply_repairs_moves_row():
    table = assertion_table(assertion("10.1/p1", 0, oid(1), authenticated=False))
    outcomes = {("10.1/p1", 0): _outcome("10.1/p1", 0, oid(1), VERDICT_REASSIGN, 2)}
    repaired, stats, applied = apply_repairs(table, outcomes)
    assert [(a.doi, a.position, a.orcid, a.authenticated) for a in repaired] == [
        ("10.1/p1", 2, oid(1), False)
    ]
    assert (stats.kept, stats.reassigned, stats.dropped) == (0, 1, 0)


def test_apply_repairs_demotes_into_occupied_position():
    # the reassign target already holds an assertion in the input table
    table = assertion_table(
        assertion("10.1/p1", 0, oid(1)),
        assertion("10.1/p1", 1, oid(2)),
    )
    outcomes = {("10.1/p1", 0): _outcome("10.1/p1", 0, oid(1), VERDICT_REASSIGN, 1)}
    repaired, stats, applied = apply_repairs(table, outcomes)
    assert applied[("10.1/p1", 0)].verdict == VERDICT_DROP
    assert applied[("10.1/p1", 0)].reason == REASON_UNRECOVERABLE
    assert stats.dropped == 1
    assert {(a.doi, a.position) for a in repaired} == {("10.1/p1", 1)}


def test_apply_repairs_first_claim_wins():
    # two reassignments race for position 2; the earlier (doi, position)
    # key claims it, the later demotes to a drop
    table = assertion_table(
        assertion("10.1/p1", 0, oid(1)),
        assertion("10.1/p1", 1, oid(2)),
    )
    outcomes = {
        ("10.1/p1", 0): _outcome("10.1/p1", 0, oid(1), VERDICT_REASSIGN, 2),
        ("10.1/p1", 1): _outcome("10.1/p1", 1, oid(2), VERDICT_REASSIGN, 2),
    }
    repaired, stats, applied = apply_repairs(table, outcomes)
    assert applied[("10.1/p1", 0)].verdict == VERDICT_REASSIGN
    assert applied[("10.1/p1", 1)].verdict == VERDICT_DROP
    assert stats.reassigned == 1 and stats.dropped == 1


def test_apply_repairs_stats_arithmetic():
    table = assertion_table(
        assertion("10.1/p1", 0, oid(1)),
        assertion("10.1/p1", 1, oid(2)),
        assertion("10.1/p2", 0, oid(3)),
        assertion("10.1/p3", 0, oid(4)),
    )
    outcomes = {
        ("10.1/p1", 0): _outcome("10.1/p1", 0, oid(1), VERDICT_KEEP),
        ("10.1/p2", 0): _outcome("10.1/p2", 0, oid(3), VERDICT_DROP),
    }
    repaired, stats, applied = apply_repairs(table, outcomes)
    assert stats.total_assertions == 4
    assert stats.flagged == 2
    assert stats.flagged == stats.kept + stats.reassigned + stats.dropped
    assert stats.pct_removed == pytest.approx(25.0)
    assert stats.pct_reassigned == 0.0
    assert len(repaired) == 3


# --- report formatting --------------------------------------------------

def test_repair_report_rows_format():
    outcomes = {
        ("10.1/p1", 0): RepairOutcome(
            "10.1/p1", 0, oid(1),
            frozenset({SELF_COLLAB, REGISTRY_DISAGREES}),
            VERDICT_REASSIGN, 3, 0.9375, REASON_SCORE_REASSIGN,
        ),
        ("10.1/p0", 5): RepairOutcome(
            "10.1/p0", 5, oid(2), frozenset({NO_RESEARCHER_FOR_ORCID}),
            VERDICT_DROP, None, None, REASON_UNRECOVERABLE,
        ),
    }
    rows = repair_report_rows(outcomes)
    assert rows[0][0] == "10.1/p0"  # sorted by key
    assert rows[0][4] == "DROP"
    assert rows[0][5] == ""  # no score
    assert rows[1][3] == "REGISTRY_DISAGREES|SELF_COLLAB"
    assert rows[1][4] == "REASSIGN(3)"
    assert rows[1][5] == "0.937500"


# --- estimator ----------------------------------------------------------

def test_estimate_shuffle_rate_by_hand():
    X = oid(1)
    pubs = pub_table(
        pub("10.1/p1", year=2015, authors=[("Ada", "Byron"), ("Grace", "Hopper")]),
        pub("10.1/p2", year=2016, authors=[("Ada", "Byron"), ("Grace", "Hopper")]),
        pub("10.1/p3", year=2016, authors=[("Alan", "Turing")]),
    )
    researchers = researcher_table(
        researcher("r1", "Ada", "Byron", dois=("10.1/p1", "10.1/p2")),
        researcher("r2", "Grace", "Hopper", dois=("10.1/p1", "10.1/p2")),
        researcher("r3", "Alan", "Turing", dois=("10.1/p3",)),
    )
    linked = link_crossref_authors(pubs, researchers)
    table = assertion_table(
        assertion("10.1/p1", 0, X),
        assertion("10.1/p2", 1, X),  # the shuffle: X linked to r1 and r2
        assertion("10.1/p3", 0, oid(3)),
    )
    series = estimate_shuffle_rate(table, linked, pubs)
    assert [(p.year, p.flagged, p.total) for p in series] == [
        (2015, 1, 1),
        (2016, 1, 2),
    ]
    assert series[0].rate == 1.0
    assert series[1].rate == 0.5
    formatted = shuffle_rate_rows(series)
    assert formatted == [
        ["2015", "1", "1", "1.000000"],
        ["2016", "1", "2", "0.500000"],
    ]


def test_estimator_zero_on_clean_world(small_world):
    from orcidrec.synthworld import SynthConfig, build_world

    config = SynthConfig(seed=5, n_researchers=150, n_papers=500, shuffle_rate=0.0)
    world = build_world(config)
    linked = link_crossref_authors(world.publications, world.researchers)
    series = estimate_shuffle_rate(world.assertions, linked, world.publications)
    assert series  # every assertion year appears
    assert all(p.flagged == 0 and p.rate == 0.0 for p in series)
    assert sum(p.total for p in series) == len(world.assertions)


def test_estimator_positive_on_shuffled_world(small_world):
    world, _ = small_world
    linked = link_crossref_authors(world.publications, world.researchers)
    series = estimate_shuffle_rate(world.assertions, linked, world.publications)
    assert sum(p.flagged for p in series) > 0


# --- whole-stage properties --------------------------------------------

def test_run_repair_idempotent_on_world(small_world):
    world, _ = small_world
    linked = link_crossref_authors(world.publications, world.researchers)
    repaired, stats, _ = run_repair(
        world.assertions, world.publications, world.profiles, linked,
        world.researchers,
    )
    again, stats2, _ = run_repair(
        repaired, world.publications, world.profiles, linked, world.researchers
    )
    assert [(a.doi, a.position, a.orcid) for a in again] == [
        (a.doi, a.position, a.orcid) for a in repaired
    ]
    assert stats2.reassigned == 0
    assert stats2.dropped == 0


def test_keep_count_monotone_in_keep_threshold(small_world):
    world, _ = small_world
    linked = link_crossref_authors(world.publications, world.researchers)

    def score_keeps(threshold):
        _, _, applied = run_repair(
            world.assertions, world.publications, world.profiles, linked,
            world.researchers, RepairConfig(keep_threshold=threshold),
        )
        return sum(
            1 for out in applied.values() if out.reason == REASON_SCORE_KEEP
        )

    counts = [score_keeps(t) for t in (0.5, 0.7, 0.9, 0.99)]
    assert counts == sorted(counts, reverse=True)


def test_repair_keeps_table_positions_unique(small_world):
    world, _ = small_world
    linked = link_crossref_authors(world.publications, world.researchers)
    repaired, _, _ = run_repair(
        world.assertions, world.publications, world.profiles, linked,
        world.researchers,
    )
    keys = [(a.doi, a.position) for a in repaired]
    assert len(keys) == len(set(keys))
