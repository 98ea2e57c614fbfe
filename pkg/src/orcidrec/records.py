"""Core record types shared by every pipeline stage.

Identifiers are plain strings that have already been normalized and
validated at ingest: DOIs are lowercase with no surrounding whitespace,
ORCID iDs are in canonical XXXX-XXXX-XXXX-XXXC form with an uppercase
check character.  Tables are thin wrappers around insertion-ordered dicts
and are treated as frozen once a parse or generation step returns them.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from typing import NamedTuple


class AuthorMention(NamedTuple):
    """One name as printed on a paper, at a 0-based byline position.

    A tuple rather than a dataclass: corpora run to millions of mentions
    and tuple construction is measurably cheaper.
    """

    position: int
    given: str
    family: str


@dataclass(slots=True)
class PublicationRecord:
    doi: str
    year: int
    journal_id: str
    publisher_id: str
    for_codes: frozenset[str]
    authors: list[AuthorMention]  # ordered, positions 0..n-1


@dataclass(slots=True)
class CrossrefAssertion:
    """A claim from the publication-side dump: this ORCID belongs to the
    author at this byline position."""

    doi: str
    position: int
    orcid: str
    authenticated: bool


@dataclass(slots=True)
class OrcidProfile:
    orcid: str
    given: str
    family: str
    created: datetime.date
    work_dois: frozenset[str]


@dataclass(slots=True)
class ResearcherRecord:
    researcher_id: str
    given: str
    family: str
    country: str
    orcid: str | None
    publication_dois: frozenset[str]
    funder_ids: frozenset[str]


@dataclass
class PublicationTable:
    by_doi: dict[str, PublicationRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.by_doi)

    def __iter__(self):
        return iter(self.by_doi.values())

    def get(self, doi: str) -> PublicationRecord | None:
        return self.by_doi.get(doi)


@dataclass
class AssertionTable:
    rows: list[CrossrefAssertion] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def keys(self) -> set[tuple[str, int]]:
        return {(a.doi, a.position) for a in self.rows}


@dataclass
class ProfileTable:
    by_orcid: dict[str, OrcidProfile] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.by_orcid)

    def __iter__(self):
        return iter(self.by_orcid.values())

    def get(self, orcid: str) -> OrcidProfile | None:
        return self.by_orcid.get(orcid)


@dataclass
class ResearcherTable:
    by_id: dict[str, ResearcherRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.by_id)

    def __iter__(self):
        return iter(self.by_id.values())

    def get(self, researcher_id: str) -> ResearcherRecord | None:
        return self.by_id.get(researcher_id)


def registry_orcid_index(researchers: ResearcherTable) -> dict[str, list[str]]:
    """Map each ORCID the registry claims to the researcher_ids claiming it.

    Normally one id per ORCID; dirty data can produce several, which the
    quality stage treats as a conflict rather than resolving here.
    """
    index: dict[str, list[str]] = {}
    for rec in researchers:
        if rec.orcid is not None:
            index.setdefault(rec.orcid, []).append(rec.researcher_id)
    for ids in index.values():
        ids.sort()
    return index
