"""Stream-parse the normalized NDJSON dumps into frozen in-memory tables.

Each source has a fixed line schema (see README).  Malformed lines are
never fatal: they are skipped and recorded, with their 1-based line
number and a short reason, in a shared :class:`RejectLog`.  The
accounting invariant ``accepted + rejected == physical lines`` holds per
file.

Identifier rules enforced here:

* DOIs are lowercased, must start with ``10.`` and carry a nonempty
  suffix after the first ``/``.
* ORCID iDs must be in XXXX-XXXX-XXXX-XXXC form and pass the ISO 7064
  MOD 11-2 check character.
* Country codes are checked at the format level (two ASCII capitals);
  no assignment list is consulted.
"""

from __future__ import annotations

import csv
import datetime
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .records import (
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

_ORCID_DIGITS = frozenset("0123456789")


def normalize_doi(raw: str) -> str | None:
    """Lowercase and strip a DOI; return None if it is not plausibly one."""
    if not isinstance(raw, str):
        return None
    doi = raw.strip().lower()
    if not doi.startswith("10."):
        return None
    slash = doi.find("/")
    if slash < 0 or slash == len(doi) - 1:
        return None
    if len(doi) < 5 or any(ch.isspace() for ch in doi):
        return None
    # Interned: the same DOI recurs across all four dumps, so sharing one
    # string object keeps large corpora compact and makes == a pointer test.
    return sys.intern(doi)


def orcid_check_char(base_digits: str) -> str:
    """ISO 7064 MOD 11-2 check character for a 15-digit ORCID base."""
    total = 0
    for ch in base_digits:
        total = (total + int(ch)) * 2
    result = (12 - total % 11) % 11
    return "X" if result == 10 else str(result)


def validate_orcid_checksum(candidate: str) -> bool:
    """True iff `candidate` is a structurally canonical ORCID iD whose
    check character satisfies ISO 7064 MOD 11-2.  Total function."""
    if not isinstance(candidate, str) or len(candidate) != 19:
        return False
    if candidate[4] != "-" or candidate[9] != "-" or candidate[14] != "-":
        return False
    body = candidate[0:4] + candidate[5:9] + candidate[10:14] + candidate[15:19]
    base, check = body[:15], body[15]
    if any(ch not in _ORCID_DIGITS for ch in base):
        return False
    if check not in _ORCID_DIGITS and check not in ("X", "x"):
        return False
    return orcid_check_char(base) == check.upper()


def normalize_orcid(raw: str) -> str | None:
    """Canonical form (uppercase check char) or None if invalid."""
    if not isinstance(raw, str):
        return None
    candidate = raw.strip()
    if not validate_orcid_checksum(candidate):
        return None
    return sys.intern(candidate.upper())


def _valid_country(code) -> bool:
    return (
        isinstance(code, str)
        and len(code) == 2
        and code.isascii()
        and code.isalpha()
        and code.isupper()
    )


def _valid_for_code(code) -> bool:
    return isinstance(code, str) and len(code) == 2 and code.isdigit()


@dataclass
class RejectLog:
    """Accumulates (file, line, reason) rows across all parsed files."""

    rows: list[tuple[str, int, str]] = field(default_factory=list)

    def add(self, file: str, line: int, reason: str) -> None:
        self.rows.append((file, line, reason))

    def count_for(self, file: str) -> int:
        return sum(1 for r in self.rows if r[0] == file)

    def __len__(self) -> int:
        return len(self.rows)

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["file", "line", "reason"])
            writer.writerows(self.rows)


def _iter_json_lines(
    lines: Iterable[str], source: str, rejects: RejectLog
) -> Iterator[tuple[int, dict]]:
    """Yield (line_no, parsed object) for lines that are JSON objects."""
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            rejects.add(source, line_no, "empty line")
            continue
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError:
            rejects.add(source, line_no, "invalid json")
            continue
        if not isinstance(obj, dict):
            rejects.add(source, line_no, "not a json object")
            continue
        yield line_no, obj


def parse_publications(
    lines: Iterable[str],
    rejects: RejectLog,
    source: str = "publications.ndjson",
) -> PublicationTable:
    table = PublicationTable()
    by_doi = table.by_doi
    for line_no, obj in _iter_json_lines(lines, source, rejects):
        doi = normalize_doi(obj.get("doi", ""))
        if doi is None:
            rejects.add(source, line_no, "invalid doi")
            continue
        if doi in by_doi:
            rejects.add(source, line_no, "duplicate doi")
            continue
        year = obj.get("year")
        if not isinstance(year, int) or not 1900 <= year <= 2100:
            rejects.add(source, line_no, "invalid year")
            continue
        journal_id = obj.get("journal_id")
        publisher_id = obj.get("publisher_id")
        if not isinstance(journal_id, str) or not journal_id:
            rejects.add(source, line_no, "missing journal_id")
            continue
        if not isinstance(publisher_id, str) or not publisher_id:
            rejects.add(source, line_no, "missing publisher_id")
            continue
        raw_codes = obj.get("for_codes", [])
        if not isinstance(raw_codes, list) or not all(
            _valid_for_code(c) for c in raw_codes
        ):
            rejects.add(source, line_no, "invalid for_codes")
            continue
        raw_authors = obj.get("authors")
        if not isinstance(raw_authors, list) or not raw_authors:
            rejects.add(source, line_no, "authors missing or empty")
            continue
        authors = []
        ok = True
        for a in raw_authors:
            if not isinstance(a, dict):
                ok = False
                break
            pos = a.get("position")
            given = a.get("given", "")
            family = a.get("family")
            if not isinstance(pos, int) or pos < 0:
                ok = False
                break
            if not isinstance(given, str) or not isinstance(family, str) or not family:
                ok = False
                break
            authors.append(AuthorMention(pos, sys.intern(given), sys.intern(family)))
        if not ok:
            rejects.add(source, line_no, "malformed author entry")
            continue
        authors.sort(key=lambda m: m.position)
        if [m.position for m in authors] != list(range(len(authors))):
            rejects.add(source, line_no, "author positions not 0..n-1")
            continue
        by_doi[doi] = PublicationRecord(
            doi=doi,
            year=year,
            journal_id=journal_id,
            publisher_id=publisher_id,
            for_codes=frozenset(raw_codes),
            authors=authors,
        )
    return table


def parse_crossref_assertions(
    lines: Iterable[str],
    rejects: RejectLog,
    source: str = "crossref_assertions.ndjson",
) -> AssertionTable:
    table = AssertionTable()
    seen: set[tuple[str, int]] = set()
    for line_no, obj in _iter_json_lines(lines, source, rejects):
        doi = normalize_doi(obj.get("doi", ""))
        if doi is None:
            rejects.add(source, line_no, "invalid doi")
            continue
        position = obj.get("position")
        if not isinstance(position, int) or position < 0:
            rejects.add(source, line_no, "invalid position")
            continue
        orcid = normalize_orcid(obj.get("orcid", ""))
        if orcid is None:
            rejects.add(source, line_no, "invalid orcid")
            continue
        authenticated = obj.get("authenticated")
        if not isinstance(authenticated, bool):
            rejects.add(source, line_no, "invalid authenticated flag")
            continue
        key = (doi, position)
        if key in seen:
            rejects.add(source, line_no, "duplicate (doi, position)")
            continue
        seen.add(key)
        table.rows.append(CrossrefAssertion(doi, position, orcid, authenticated))
    return table


def parse_orcid_profiles(
    lines: Iterable[str],
    rejects: RejectLog,
    source: str = "orcid_profiles.ndjson",
) -> ProfileTable:
    table = ProfileTable()
    today = datetime.date.today()
    for line_no, obj in _iter_json_lines(lines, source, rejects):
        orcid = normalize_orcid(obj.get("orcid", ""))
        if orcid is None:
            rejects.add(source, line_no, "invalid orcid")
            continue
        if orcid in table.by_orcid:
            rejects.add(source, line_no, "duplicate orcid")
            continue
        given = obj.get("given", "")
        family = obj.get("family")
        if not isinstance(given, str) or not isinstance(family, str) or not family:
            rejects.add(source, line_no, "invalid name")
            continue
        raw_created = obj.get("created")
        try:
            created = datetime.date.fromisoformat(raw_created)
        except (TypeError, ValueError):
            rejects.add(source, line_no, "invalid created date")
            continue
        if created > today:
            rejects.add(source, line_no, "created date in the future")
            continue
        raw_dois = obj.get("work_dois", [])
        if not isinstance(raw_dois, list):
            rejects.add(source, line_no, "invalid work_dois")
            continue
        work_dois = set()
        ok = True
        for d in raw_dois:
            nd = normalize_doi(d) if isinstance(d, str) else None
            if nd is None:
                ok = False
                break
            work_dois.add(nd)
        if not ok:
            rejects.add(source, line_no, "invalid work doi")
            continue
        table.by_orcid[orcid] = OrcidProfile(
            orcid=orcid,
            given=given,
            family=family,
            created=created,
            work_dois=frozenset(work_dois),
        )
    return table


def parse_researchers(
    lines: Iterable[str],
    rejects: RejectLog,
    source: str = "researchers.ndjson",
) -> ResearcherTable:
    table = ResearcherTable()
    for line_no, obj in _iter_json_lines(lines, source, rejects):
        researcher_id = obj.get("researcher_id")
        if not isinstance(researcher_id, str) or not researcher_id:
            rejects.add(source, line_no, "invalid researcher_id")
            continue
        if researcher_id in table.by_id:
            rejects.add(source, line_no, "duplicate researcher_id")
            continue
        given = obj.get("given", "")
        family = obj.get("family")
        if not isinstance(given, str) or not isinstance(family, str) or not family:
            rejects.add(source, line_no, "invalid name")
            continue
        country = obj.get("country")
        if not _valid_country(country):
            rejects.add(source, line_no, "invalid country")
            continue
        orcid: str | None = None
        if "orcid" in obj and obj["orcid"] is not None:
            orcid = normalize_orcid(obj["orcid"])
            if orcid is None:
                rejects.add(source, line_no, "invalid orcid")
                continue
        raw_dois = obj.get("publication_dois", [])
        raw_funders = obj.get("funder_ids", [])
        if not isinstance(raw_dois, list) or not isinstance(raw_funders, list):
            rejects.add(source, line_no, "invalid list field")
            continue
        dois = set()
        ok = True
        for d in raw_dois:
            nd = normalize_doi(d) if isinstance(d, str) else None
            if nd is None:
                ok = False
                break
            dois.add(nd)
        if not ok:
            rejects.add(source, line_no, "invalid publication doi")
            continue
        if not all(isinstance(f, str) and f for f in raw_funders):
            rejects.add(source, line_no, "invalid funder id")
            continue
        table.by_id[researcher_id] = ResearcherRecord(
            researcher_id=researcher_id,
            given=given,
            family=family,
            country=country,
            orcid=orcid,
            publication_dois=frozenset(dois),
            funder_ids=frozenset(raw_funders),
        )
    return table


@dataclass
class SourceTables:
    publications: PublicationTable
    assertions: AssertionTable
    profiles: ProfileTable
    researchers: ResearcherTable
    rejects: RejectLog


def load_tables(
    publications_path: str,
    assertions_path: str,
    profiles_path: str,
    researchers_path: str,
) -> SourceTables:
    """Parse all four dumps from disk.  Unreadable files raise OSError
    (fatal by contract); dirty lines only feed the reject log."""
    rejects = RejectLog()

    def _open(path: str):
        return open(path, "r", encoding="utf-8")

    with _open(publications_path) as fh:
        publications = parse_publications(fh, rejects, os.path.basename(publications_path))
    with _open(assertions_path) as fh:
        assertions = parse_crossref_assertions(fh, rejects, os.path.basename(assertions_path))
    with _open(profiles_path) as fh:
        profiles = parse_orcid_profiles(fh, rejects, os.path.basename(profiles_path))
    with _open(researchers_path) as fh:
        researchers = parse_researchers(fh, rejects, os.path.basename(researchers_path))
    return SourceTables(publications, assertions, profiles, researchers, rejects)


def filter_resolvable_assertions(
    assertions: AssertionTable, publications: PublicationTable
) -> tuple[AssertionTable, int]:
    """Keep assertions whose (doi, position) refers to a real author
    mention; DOIs absent from the publication table fall outside the
    analysis by definition.  Returns (kept, dropped_count)."""
    kept = AssertionTable()
    dropped = 0
    by_doi = publications.by_doi
    for a in assertions:
        pub = by_doi.get(a.doi)
        if pub is not None and a.position < len(pub.authors):
            kept.rows.append(a)
        else:
            dropped += 1
    return kept, dropped
