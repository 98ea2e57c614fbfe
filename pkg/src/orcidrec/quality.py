"""Detect and repair shuffled ORCID-to-author assertions.

Detection flags an assertion when any of four independent signals says
the claimed identity does not belong at that byline position:

* SELF_COLLAB — the ORCID is linked, corpus-wide, to two or more
  researchers who co-occur as authors of this very paper;
* MULTI_ORCID_PER_RESEARCHER — the linked researcher carries two or
  more distinct asserted ORCIDs across the corpus;
* REGISTRY_DISAGREES — the background registry matches this researcher
  to a different ORCID, or matches this ORCID to a different researcher;
* NO_RESEARCHER_FOR_ORCID — no registry record carries the ORCID at all.

Resolution compares the identity's registry profile name against the
printed author names with a Levenshtein ratio: keep at >= 0.70 against
the asserted author, reassign at >= 0.90 to a unique best other author,
then a multi-publisher rescue for identities that repeatedly publish
under the same (differing) printed name, and otherwise drop.  Very
short name parts never clear a threshold on score alone (exact matches
always pass): one-letter names make almost everything look similar.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .linkage import LinkedAuthorTable, full_name
from .records import (
    AssertionTable,
    OrcidProfile,
    ProfileTable,
    PublicationRecord,
    PublicationTable,
    ResearcherTable,
    registry_orcid_index,
)

SELF_COLLAB = "SELF_COLLAB"
MULTI_ORCID_PER_RESEARCHER = "MULTI_ORCID_PER_RESEARCHER"
REGISTRY_DISAGREES = "REGISTRY_DISAGREES"
NO_RESEARCHER_FOR_ORCID = "NO_RESEARCHER_FOR_ORCID"

VERDICT_KEEP = "KEEP"
VERDICT_REASSIGN = "REASSIGN"
VERDICT_DROP = "DROP"

REASON_SCORE_KEEP = "SCORE_KEEP"
REASON_SCORE_REASSIGN = "SCORE_REASSIGN"
REASON_MULTI_PUBLISHER_RESCUE = "MULTI_PUBLISHER_RESCUE"
REASON_UNRECOVERABLE = "UNRECOVERABLE"


@lru_cache(maxsize=1 << 17)
def _ratio_ordered(a: str, b: str) -> float:
    la, lb = len(a), len(b)
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        ca = a[i - 1]
        cur = [i]
        append = cur.append
        for j in range(1, lb + 1):
            best = prev[j - 1] if ca == b[j - 1] else prev[j - 1] + 2
            up = prev[j] + 1
            if up < best:
                best = up
            left = cur[j - 1] + 1
            if left < best:
                best = left
            append(best)
        prev = cur
    return (la + lb - prev[lb]) / (la + lb)


def levenshtein_ratio(a: str, b: str) -> float:
    """Normalized similarity (|a|+|b| - d2) / (|a|+|b|) where d2 is the
    edit distance with insert=1, delete=1, substitute=2.  Symmetric,
    1.0 for equal strings (including both empty), 0.0 for disjoint."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    if a > b:
        a, b = b, a
    return _ratio_ordered(a, b)


@dataclass(frozen=True)
class SuspectFlag:
    doi: str
    position: int
    orcid: str
    criteria: frozenset[str]


@dataclass
class RepairOutcome:
    doi: str
    position: int
    orcid: str
    criteria: frozenset[str]
    verdict: str  # VERDICT_KEEP | VERDICT_REASSIGN | VERDICT_DROP
    new_position: int | None
    best_score: float | None
    reason: str

    def verdict_label(self) -> str:
        if self.verdict == VERDICT_REASSIGN:
            return f"REASSIGN({self.new_position})"
        return self.verdict


@dataclass
class RepairStats:
    total_assertions: int
    flagged: int
    kept: int
    reassigned: int
    dropped: int
    pct_removed: float
    pct_reassigned: float


@dataclass(frozen=True)
class ShuffleRatePoint:
    year: int
    flagged: int
    total: int
    rate: float


@dataclass
class RepairConfig:
    keep_threshold: float = 0.70
    reassign_threshold: float = 0.90
    min_name_length: int = 2
    rescue_enabled: bool = True


def _orcid_researcher_maps(
    assertions: AssertionTable, linked: LinkedAuthorTable
) -> tuple[dict[str, set[str]], dict[str, set[str]]]:
    """Corpus-wide ORCID -> linked researchers and researcher -> asserted
    ORCIDs maps, restricted to assertions whose position is linked."""
    orcid_rids: dict[str, set[str]] = {}
    rid_orcids: dict[str, set[str]] = {}
    get = linked.by_key.get
    for a in assertions:
        rid = get((a.doi, a.position))
        if rid is None:
            continue
        orcid_rids.setdefault(a.orcid, set()).add(rid)
        rid_orcids.setdefault(rid, set()).add(a.orcid)
    return orcid_rids, rid_orcids


def _self_collab_keys(
    assertions: AssertionTable,
    linked: LinkedAuthorTable,
    orcid_rids: dict[str, set[str]] | None = None,
) -> set[tuple[str, int]]:
    if orcid_rids is None:
        orcid_rids, _ = _orcid_researcher_maps(assertions, linked)
    suspect_dois = {
        a.doi for a in assertions if len(orcid_rids.get(a.orcid, ())) >= 2
    }
    if not suspect_dois:
        return set()
    doi_rids: dict[str, set[str]] = {}
    for (doi, _pos), rid in linked.by_key.items():
        if doi in suspect_dois:
            doi_rids.setdefault(doi, set()).add(rid)
    flagged: set[tuple[str, int]] = set()
    for a in assertions:
        linked_ids = orcid_rids.get(a.orcid)
        if linked_ids is None or len(linked_ids) < 2:
            continue
        on_paper = doi_rids.get(a.doi)
        if on_paper is not None and len(linked_ids & on_paper) >= 2:
            flagged.add((a.doi, a.position))
    return flagged


def detect_self_collaboration(
    assertions: AssertionTable, linked_authors: LinkedAuthorTable
) -> set[SuspectFlag]:
    """Assertions whose ORCID maps to >=2 researchers co-occurring on the
    assertion's own paper — the strongest single shuffle signal."""
    keys = _self_collab_keys(assertions, linked_authors)
    criteria = frozenset({SELF_COLLAB})
    return {
        SuspectFlag(a.doi, a.position, a.orcid, criteria)
        for a in assertions
        if (a.doi, a.position) in keys
    }


def flag_suspects(
    assertions: AssertionTable,
    linked_authors: LinkedAuthorTable,
    researchers: ResearcherTable,
) -> set[SuspectFlag]:
    """Union of all four detection criteria; each flag records which fired."""
    orcid_rids, rid_orcids = _orcid_researcher_maps(assertions, linked_authors)
    self_collab = _self_collab_keys(assertions, linked_authors, orcid_rids)
    registry = registry_orcid_index(researchers)
    by_id = researchers.by_id
    linked_get = linked_authors.by_key.get

    flags: set[SuspectFlag] = set()
    for a in assertions:
        criteria: set[str] = set()
        key = (a.doi, a.position)
        if key in self_collab:
            criteria.add(SELF_COLLAB)
        rid = linked_get(key)
        if rid is not None:
            if len(rid_orcids.get(rid, ())) >= 2:
                criteria.add(MULTI_ORCID_PER_RESEARCHER)
            own = by_id[rid].orcid
            owners = registry.get(a.orcid)
            if (own is not None and own != a.orcid) or (
                owners is not None and rid not in owners
            ):
                criteria.add(REGISTRY_DISAGREES)
        if a.orcid not in registry:
            criteria.add(NO_RESEARCHER_FOR_ORCID)
        if criteria:
            flags.add(SuspectFlag(a.doi, a.position, a.orcid, frozenset(criteria)))
    return flags


def build_publisher_history(
    assertions: AssertionTable, publications: PublicationTable
) -> dict[tuple[str, str], set[str]]:
    """(orcid, normalized printed author name) -> publisher_ids where the
    pair occurs.  Recurrence across publishers is treated as evidence
    that the pairing is real even when the profile name disagrees."""
    history: dict[tuple[str, str], set[str]] = {}
    by_doi = publications.by_doi
    for a in assertions:
        pub = by_doi.get(a.doi)
        if pub is None or a.position >= len(pub.authors):
            continue
        mention = pub.authors[a.position]
        pair = (a.orcid, full_name(mention.given, mention.family))
        history.setdefault(pair, set()).add(pub.publisher_id)
    return history


def _too_short(name: str, min_len: int) -> bool:
    return any(len(part) < min_len for part in name.split())


def _clears(score: float, threshold: float, a: str, b: str, min_len: int) -> bool:
    """A sub-1.0 score only clears a threshold when neither name has a
    part below the minimum length; near-empty names score spuriously
    high.  Exact matches always clear."""
    if score < threshold:
        return False
    if score == 1.0:
        return True
    return not (_too_short(a, min_len) or _too_short(b, min_len))


def resolve_suspect(
    flag: SuspectFlag,
    publication: PublicationRecord,
    orcid_profile: OrcidProfile | None,
    publisher_history: dict[tuple[str, str], set[str]],
    config: RepairConfig,
) -> RepairOutcome:
    """Apply the keep / reassign / rescue / drop ladder to one flag."""
    if orcid_profile is None:
        return RepairOutcome(
            flag.doi, flag.position, flag.orcid, flag.criteria,
            VERDICT_DROP, None, None, REASON_UNRECOVERABLE,
        )
    profile_name = full_name(orcid_profile.given, orcid_profile.family)
    asserted = publication.authors[flag.position]
    asserted_name = full_name(asserted.given, asserted.family)
    min_len = config.min_name_length

    keep_score = levenshtein_ratio(profile_name, asserted_name)
    if _clears(keep_score, config.keep_threshold, profile_name, asserted_name, min_len):
        return RepairOutcome(
            flag.doi, flag.position, flag.orcid, flag.criteria,
            VERDICT_KEEP, None, keep_score, REASON_SCORE_KEEP,
        )

    best_score = -1.0
    best_position: int | None = None
    tied = False
    for other in publication.authors:
        if other.position == flag.position:
            continue
        other_name = full_name(other.given, other.family)
        score = levenshtein_ratio(profile_name, other_name)
        if not _clears(score, config.reassign_threshold, profile_name, other_name, min_len):
            continue
        if score > best_score:
            best_score, best_position, tied = score, other.position, False
        elif score == best_score:
            tied = True
    if best_position is not None and not tied:
        return RepairOutcome(
            flag.doi, flag.position, flag.orcid, flag.criteria,
            VERDICT_REASSIGN, best_position, best_score, REASON_SCORE_REASSIGN,
        )
    if best_position is not None and tied:
        return RepairOutcome(
            flag.doi, flag.position, flag.orcid, flag.criteria,
            VERDICT_DROP, None, best_score, REASON_UNRECOVERABLE,
        )

    if config.rescue_enabled:
        publishers = publisher_history.get((flag.orcid, asserted_name))
        if publishers is not None and len(publishers) >= 2:
            return RepairOutcome(
                flag.doi, flag.position, flag.orcid, flag.criteria,
                VERDICT_KEEP, None, keep_score, REASON_MULTI_PUBLISHER_RESCUE,
            )

    return RepairOutcome(
        flag.doi, flag.position, flag.orcid, flag.criteria,
        VERDICT_DROP, None, keep_score, REASON_UNRECOVERABLE,
    )


def resolve_all(
    flags: set[SuspectFlag],
    publications: PublicationTable,
    profiles: ProfileTable,
    publisher_history: dict[tuple[str, str], set[str]],
    config: RepairConfig,
) -> dict[tuple[str, int], RepairOutcome]:
    """Resolve every flag, in deterministic (doi, position) order."""
    outcomes: dict[tuple[str, int], RepairOutcome] = {}
    for flag in sorted(flags, key=lambda f: (f.doi, f.position)):
        pub = publications.get(flag.doi)
        if pub is None:
            continue
        outcomes[(flag.doi, flag.position)] = resolve_suspect(
            flag, pub, profiles.get(flag.orcid), publisher_history, config
        )
    return outcomes


def apply_repairs(
    assertions: AssertionTable,
    outcomes: dict[tuple[str, int], RepairOutcome],
) -> tuple[AssertionTable, RepairStats, dict[tuple[str, int], RepairOutcome]]:
    """Carry out the verdicts and return the final table, stats, and the
    outcomes as actually applied.

    A reassignment is demoted to a drop when its target position already
    held an assertion in the input table, or when an earlier-ordered
    reassignment claimed it first — repairs never displace or collide.
    The returned outcome map reflects any demotions, so reports and
    scoring describe what really happened.
    """
    occupied = {(a.doi, a.position) for a in assertions}
    claimed: set[tuple[str, int]] = set()
    applied: dict[tuple[str, int], RepairOutcome] = {}

    for key in sorted(outcomes):
        out = outcomes[key]
        if out.verdict != VERDICT_REASSIGN:
            applied[key] = out
            continue
        target = (out.doi, out.new_position)
        if target in occupied or target in claimed:
            applied[key] = RepairOutcome(
                out.doi, out.position, out.orcid, out.criteria,
                VERDICT_DROP, None, out.best_score, REASON_UNRECOVERABLE,
            )
        else:
            claimed.add(target)
            applied[key] = out

    repaired = AssertionTable()
    kept = reassigned = dropped = 0
    for a in assertions:
        out = applied.get((a.doi, a.position))
        if out is None:
            repaired.rows.append(a)
            continue
        if out.verdict == VERDICT_KEEP:
            kept += 1
            repaired.rows.append(a)
        elif out.verdict == VERDICT_REASSIGN:
            reassigned += 1
            moved = type(a)(a.doi, out.new_position, a.orcid, a.authenticated)
            repaired.rows.append(moved)
        else:
            dropped += 1

    total = len(assertions)
    stats = RepairStats(
        total_assertions=total,
        flagged=len(applied),
        kept=kept,
        reassigned=reassigned,
        dropped=dropped,
        pct_removed=100.0 * dropped / total if total else 0.0,
        pct_reassigned=100.0 * reassigned / total if total else 0.0,
    )
    return repaired, stats, applied


def run_repair(
    assertions: AssertionTable,
    publications: PublicationTable,
    profiles: ProfileTable,
    linked_authors: LinkedAuthorTable,
    researchers: ResearcherTable,
    config: RepairConfig | None = None,
) -> tuple[AssertionTable, RepairStats, dict[tuple[str, int], RepairOutcome]]:
    """Flag, resolve, and apply in one pass: the whole repair stage."""
    if config is None:
        config = RepairConfig()
    flags = flag_suspects(assertions, linked_authors, researchers)
    history = build_publisher_history(assertions, publications)
    outcomes = resolve_all(flags, publications, profiles, history, config)
    return apply_repairs(assertions, outcomes)


REPAIR_REPORT_HEADER = ["doi", "position", "orcid", "criteria", "verdict", "score", "reason"]
SHUFFLE_RATE_HEADER = ["year", "flagged", "total", "rate"]


def repair_report_rows(
    outcomes: dict[tuple[str, int], RepairOutcome],
) -> list[list[str]]:
    rows = []
    for key in sorted(outcomes):
        out = outcomes[key]
        rows.append(
            [
                out.doi,
                str(out.position),
                out.orcid,
                "|".join(sorted(out.criteria)),
                out.verdict_label(),
                "" if out.best_score is None else f"{out.best_score:.6f}",
                out.reason,
            ]
        )
    return rows


def shuffle_rate_rows(series: list[ShuffleRatePoint]) -> list[list[str]]:
    return [
        [str(p.year), str(p.flagged), str(p.total), f"{p.rate:.6f}"]
        for p in series
    ]


def estimate_shuffle_rate(
    assertions: AssertionTable,
    linked_authors: LinkedAuthorTable,
    publications: PublicationTable,
) -> list[ShuffleRatePoint]:
    """Yearly share of assertions showing the self-collaboration signal.

    Diagnostic, computed before any repair.  An underestimate by
    construction: shuffles invisible to the registry leave no
    self-collaboration trace.
    """
    collab = _self_collab_keys(assertions, linked_authors)
    flagged: dict[int, int] = {}
    total: dict[int, int] = {}
    by_doi = publications.by_doi
    for a in assertions:
        pub = by_doi.get(a.doi)
        if pub is None:
            continue
        total[pub.year] = total.get(pub.year, 0) + 1
        if (a.doi, a.position) in collab:
            flagged[pub.year] = flagged.get(pub.year, 0) + 1
    return [
        ShuffleRatePoint(year, flagged.get(year, 0), n, flagged.get(year, 0) / n)
        for year, n in sorted(total.items())
    ]
