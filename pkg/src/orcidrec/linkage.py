"""Join the three sources at the author level.

Two joins happen here.  The background registry is joined to publication
author mentions by (DOI, normalized name) — a mention links to a
researcher only when exactly one registry researcher lists that DOI and
matches the printed name after normalization; ties are counted, not
guessed, because a wrong link would poison the shuffle detector.  The
ORCID registry is joined at the paper level only, by (ORCID, DOI),
without a byline position.

The union of repaired publication-side claims and registry-side claims
is the unified assertion table every metric consumes.
"""

from __future__ import annotations

import csv
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

from .records import (
    AssertionTable,
    ProfileTable,
    PublicationTable,
    ResearcherRecord,
    ResearcherTable,
    registry_orcid_index,
)

SOURCE_CROSSREF = "crossref"
SOURCE_REGISTRY = "orcid-registry"


@lru_cache(maxsize=1 << 18)
def normalize_name(raw: str) -> str:
    """Case-fold, strip diacritics, collapse whitespace.

    The minimal robust normalization for name equality: it merges case
    and accent variants but never merges genuinely different spellings.
    """
    folded = raw.casefold()
    decomposed = unicodedata.normalize("NFKD", folded)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return " ".join(stripped.split())


def full_name(given: str, family: str) -> str:
    """Normalized "given family" string; the comparison key everywhere."""
    if given:
        return normalize_name(given + " " + family)
    return normalize_name(family)


class UnifiedAssertion(NamedTuple):
    """One ORCID-to-publication claim from either source.

    Registry-sourced rows carry no byline position (the registry links
    works, not author slots) and are always authenticated: they come
    from the identity owner's own record.
    """

    doi: str
    position: int | None
    orcid: str
    source: str  # SOURCE_CROSSREF | SOURCE_REGISTRY
    authenticated: bool
    researcher_id: str | None


@dataclass
class LinkedAuthorTable:
    """Author-level linkage result.

    `by_key` holds only resolved links; a mention absent from it is
    either unmatched or ambiguous.  The counters preserve the full
    accounting: n_mentions = n_linked + n_ambiguous + unmatched.
    """

    by_key: dict[tuple[str, int], str] = field(default_factory=dict)
    n_mentions: int = 0
    n_linked: int = 0
    n_ambiguous: int = 0

    def get(self, key: tuple[str, int]) -> str | None:
        return self.by_key.get(key)

    def researchers_on(self, doi: str, n_authors: int) -> set[str]:
        by_key = self.by_key
        found = set()
        for pos in range(n_authors):
            rid = by_key.get((doi, pos))
            if rid is not None:
                found.add(rid)
        return found


def link_crossref_authors(
    publications: PublicationTable, researchers: ResearcherTable
) -> LinkedAuthorTable:
    """Attach a researcher_id to every unambiguously matched author mention."""
    candidates: dict[str, list[tuple[str, str]]] = {}
    for rec in researchers:
        name = full_name(rec.given, rec.family)
        for doi in rec.publication_dois:
            candidates.setdefault(doi, []).append((name, rec.researcher_id))

    table = LinkedAuthorTable()
    by_key = table.by_key
    for pub in publications:
        pool = candidates.get(pub.doi)
        table.n_mentions += len(pub.authors)
        if not pool:
            continue
        for mention in pub.authors:
            name = full_name(mention.given, mention.family)
            matched: str | None = None
            ambiguous = False
            for cand_name, cand_id in pool:
                if cand_name == name:
                    if matched is None:
                        matched = cand_id
                    elif cand_id != matched:
                        ambiguous = True
                        break
            if ambiguous:
                table.n_ambiguous += 1
            elif matched is not None:
                by_key[(pub.doi, mention.position)] = matched
                table.n_linked += 1
    return table


def link_orcid_works(
    profiles: ProfileTable, publications: PublicationTable
) -> list[UnifiedAssertion]:
    """Registry-side claims: one row per (orcid, doi) resolvable in the
    publication table.  researcher_id is attached later by
    build_assertion_table, where the background registry is in scope."""
    rows: list[UnifiedAssertion] = []
    by_doi = publications.by_doi
    for profile in profiles:
        for doi in sorted(profile.work_dois):
            if doi in by_doi:
                rows.append(
                    UnifiedAssertion(
                        doi=doi,
                        position=None,
                        orcid=profile.orcid,
                        source=SOURCE_REGISTRY,
                        authenticated=True,
                        researcher_id=None,
                    )
                )
    rows.sort(key=lambda r: (r.orcid, r.doi))
    return rows


def build_assertion_table(
    linked_authors: LinkedAuthorTable,
    registry_assertions: Iterable[UnifiedAssertion],
    repaired_crossref: AssertionTable,
    researchers: ResearcherTable,
) -> list[UnifiedAssertion]:
    """Union of both sources, deduplicated on (doi, orcid, source).

    The two sources are deliberately kept as distinct rows even for the
    same (doi, orcid): the Crossref-only metric needs to see which
    claims never made it back to the identity owner's record.
    researcher_id comes from author linkage for publication-side rows
    and from the registry's own ORCID match (when unique) for
    registry-side rows.
    """
    owner_of: dict[str, str] = {}
    for orcid, ids in registry_orcid_index(researchers).items():
        if len(ids) == 1:
            owner_of[orcid] = ids[0]

    rows: list[UnifiedAssertion] = []
    seen: set[tuple[str, str, str]] = set()
    for a in sorted(repaired_crossref, key=lambda a: (a.doi, a.position)):
        dedup_key = (a.doi, a.orcid, SOURCE_CROSSREF)
        if dedup_key in seen:
            continue
        seen.add(dedup_key)
        rows.append(
            UnifiedAssertion(
                doi=a.doi,
                position=a.position,
                orcid=a.orcid,
                source=SOURCE_CROSSREF,
                authenticated=a.authenticated,
                researcher_id=linked_authors.get((a.doi, a.position)),
            )
        )
    for r in registry_assertions:
        dedup_key = (r.doi, r.orcid, SOURCE_REGISTRY)
        if dedup_key in seen:
            continue
        seen.add(dedup_key)
        rows.append(r._replace(researcher_id=owner_of.get(r.orcid)))
    return rows


def write_linked_authors_csv(
    path: str,
    publications: PublicationTable,
    linked: LinkedAuthorTable,
    assertions: AssertionTable,
) -> None:
    """Debug dump: one row per author mention with whatever was linked."""
    asserted: dict[tuple[str, int], tuple[str, bool]] = {
        (a.doi, a.position): (a.orcid, a.authenticated) for a in assertions
    }
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doi", "position", "researcher_id", "orcid_crossref", "authenticated"])
        for doi in sorted(publications.by_doi):
            pub = publications.by_doi[doi]
            for mention in pub.authors:
                key = (doi, mention.position)
                orcid, auth = asserted.get(key, ("", None))
                writer.writerow(
                    [
                        doi,
                        mention.position,
                        linked.get(key) or "",
                        orcid,
                        "" if auth is None else str(auth).lower(),
                    ]
                )


def linkage_for_researcher(rec: ResearcherRecord) -> str:
    """Normalized comparison name for a registry researcher."""
    return full_name(rec.given, rec.family)
