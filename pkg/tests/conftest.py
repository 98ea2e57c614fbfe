"""Shared builders for hand-rolled fixture tables.

Unit tests assemble tiny corpora inline; integration and acceptance
tests generate whole worlds through synthworld.  The builders here keep
the inline corpora terse without hiding anything important.
"""

from __future__ import annotations

import datetime

import pytest

from orcidrec.ingest import orcid_check_char
from orcidrec.records import (
    AssertionTable,
    AuthorMention,
    CrossrefAssertion,
    OrcidProfile,
    ProfileTable,
    PublicationRecord,
    PublicationTable,
    ResearcherRecord,
    ResearcherTable,
)


def oid(n: int) -> str:
    """A real, checksum-valid ORCID for small integer n."""
    body = f"{n:015d}"
    full = body + orcid_check_char(body)
    return "-".join(full[i : i + 4] for i in range(0, 16, 4))


def pub(
    doi: str,
    year: int = 2016,
    authors: list[tuple[str, str]] | None = None,
    journal: str = "j1",
    publisher: str = "p1",
    for_codes: tuple[str, ...] = ("11",),
) -> PublicationRecord:
    mentions = [
        AuthorMention(i, g, f) for i, (g, f) in enumerate(authors or [("Ada", "Byron")])
    ]
    return PublicationRecord(
        doi=doi,
        year=year,
        journal_id=journal,
        publisher_id=publisher,
        for_codes=frozenset(for_codes),
        authors=mentions,
    )


def pub_table(*records: PublicationRecord) -> PublicationTable:
    return PublicationTable(by_doi={p.doi: p for p in records})


def assertion(doi: str, position: int, orcid: str, authenticated: bool = True):
    return CrossrefAssertion(doi, position, orcid, authenticated)


def assertion_table(*rows: CrossrefAssertion) -> AssertionTable:
    return AssertionTable(rows=list(rows))


def profile(
    orcid: str,
    given: str,
    family: str,
    created: str = "2014-06-01",
    work_dois: tuple[str, ...] = (),
) -> OrcidProfile:
    return OrcidProfile(
        orcid=orcid,
        given=given,
        family=family,
        created=datetime.date.fromisoformat(created),
        work_dois=frozenset(work_dois),
    )


def profile_table(*profiles: OrcidProfile) -> ProfileTable:
    return ProfileTable(by_orcid={p.orcid: p for p in profiles})


def researcher(
    rid: str,
    given: str,
    family: str,
    country: str = "GB",
    orcid: str | None = None,
    dois: tuple[str, ...] = (),
    funders: tuple[str, ...] = (),
) -> ResearcherRecord:
    return ResearcherRecord(
        researcher_id=rid,
        given=given,
        family=family,
        country=country,
        orcid=orcid,
        publication_dois=frozenset(dois),
        funder_ids=frozenset(funders),
    )


def researcher_table(*records: ResearcherRecord) -> ResearcherTable:
    return ResearcherTable(by_id={r.researcher_id: r for r in records})


@pytest.fixture
def small_world(tmp_path):
    """A modest generated world on disk plus its in-memory twin."""
    from orcidrec.synthworld import SynthConfig, build_world, write_world

    config = SynthConfig(
        seed=20260823,
        n_researchers=120,
        n_papers=400,
        shuffle_rate=0.03,
        registry_coverage=0.9,
    )
    world = build_world(config)
    out = tmp_path / "world"
    write_world(world, str(out))
    return world, out
