"""Scientometric indicators over the repaired, unified assertion table.

Everything here is a pure aggregation over frozen tables.  The cohort
is the population under study: researchers with at least one paper in
the analysis window, a publication history longer than the minimum, and
more than the minimum paper count.  Per-researcher indicators are
computed once and every group-by (country, discipline, funder, income
band) is a fold over them.

Vocabulary: "adoption" is having at least one DOI-linked assertion on a
window-year paper; "completeness" (the engagement proxy) is the share
of a researcher's registry-known papers that carry their ORCID.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from datetime import date

from .linkage import SOURCE_CROSSREF, SOURCE_REGISTRY, UnifiedAssertion
from .records import (
    AssertionTable,
    ProfileTable,
    PublicationTable,
    ResearcherRecord,
    ResearcherTable,
)

DISCIPLINE_NA = "NA"

# Canonical income-band display order; unknown labels sort after these.
BAND_ORDER = ["High", "Upper middle", "Lower middle", "Low"]


@dataclass(frozen=True)
class CohortSpec:
    window_start: int = 2015
    window_end: int = 2019
    min_history_years: int = 5
    min_papers: int = 5


@dataclass
class ResearcherIndicators:
    researcher_id: str
    country: str
    funder_ids: frozenset[str]
    adopted: bool
    orcid: str | None
    orcid_created: date | None
    completeness_num: int
    completeness_den: int
    crossref_years: frozenset[int]
    crossref_only_years: frozenset[int]
    discipline: str

    @property
    def completeness(self) -> float | None:
        if self.completeness_den == 0:
            return None
        return self.completeness_num / self.completeness_den


@dataclass
class MetricsRow:
    kind: str  # country | discipline | funder
    key: str
    cohort_size: int
    adopted: int
    adoption_pct: float
    completeness_num: int
    completeness_den: int
    engagement_pct: float


@dataclass
class IncomeBandRow:
    band: str
    cohort_size: int
    adoption_pct: float
    median_country_adoption_pct: float
    completeness_pct: float


def _researcher_years(rec: ResearcherRecord, publications: PublicationTable) -> list[int]:
    by_doi = publications.by_doi
    return [by_doi[d].year for d in rec.publication_dois if d in by_doi]


def build_cohort(
    researchers: ResearcherTable,
    publications: PublicationTable,
    spec: CohortSpec,
) -> set[str]:
    """The Fig-2 population filter: active in window, long history, prolific."""
    cohort: set[str] = set()
    for rec in researchers:
        years = _researcher_years(rec, publications)
        if not years:
            continue
        if not any(spec.window_start <= y <= spec.window_end for y in years):
            continue
        if spec.window_end - min(years) <= spec.min_history_years:
            continue
        if len(years) <= spec.min_papers:
            continue
        cohort.add(rec.researcher_id)
    return cohort


def _rows_by_researcher(
    unified: list[UnifiedAssertion],
) -> dict[str, list[UnifiedAssertion]]:
    grouped: dict[str, list[UnifiedAssertion]] = {}
    for row in unified:
        if row.researcher_id is not None:
            grouped.setdefault(row.researcher_id, []).append(row)
    return grouped


def _choose_orcid(rec: ResearcherRecord, rows: list[UnifiedAssertion]) -> str | None:
    """The researcher's ORCID: the registry's own match when present,
    otherwise the most frequently asserted one (ties to the smallest)."""
    if rec.orcid is not None:
        return rec.orcid
    counts: dict[str, int] = {}
    for row in rows:
        counts[row.orcid] = counts.get(row.orcid, 0) + 1
    if not counts:
        return None
    return min(counts, key=lambda o: (-counts[o], o))


def assign_discipline(
    researcher: ResearcherRecord, publications: PublicationTable
) -> str:
    """Modal 2-digit field code over the researcher's papers; each paper
    contributes each of its codes once.  Ties break by count over the
    researcher's most recent five publication years, then lowest code."""
    by_doi = publications.by_doi
    counts: dict[str, int] = {}
    dated: list[tuple[int, frozenset[str]]] = []
    for doi in researcher.publication_dois:
        pub = by_doi.get(doi)
        if pub is None:
            continue
        dated.append((pub.year, pub.for_codes))
        for code in pub.for_codes:
            counts[code] = counts.get(code, 0) + 1
    if not counts:
        return DISCIPLINE_NA
    recent_floor = max(y for y, _ in dated) - 4
    recent: dict[str, int] = {}
    for year, codes in dated:
        if year >= recent_floor:
            for code in codes:
                recent[code] = recent.get(code, 0) + 1
    return min(counts, key=lambda c: (-counts[c], -recent.get(c, 0), c))


def adoption(
    cohort: set[str],
    unified: list[UnifiedAssertion],
    publications: PublicationTable,
    spec: CohortSpec,
) -> float:
    """Share of the cohort with >=1 assertion on a window-year paper."""
    if not cohort:
        return 0.0
    by_doi = publications.by_doi
    adopted: set[str] = set()
    for row in unified:
        rid = row.researcher_id
        if rid is None or rid not in cohort or rid in adopted:
            continue
        pub = by_doi.get(row.doi)
        if pub is not None and spec.window_start <= pub.year <= spec.window_end:
            adopted.add(rid)
    return len(adopted) / len(cohort)


def completeness(
    researcher: ResearcherRecord,
    unified: list[UnifiedAssertion],
    orcid: str | None = None,
) -> float | None:
    """Share of the researcher's registry papers carrying their ORCID.
    Undefined (None) when the registry lists no papers or no ORCID is
    known for the researcher."""
    chosen = orcid if orcid is not None else researcher.orcid
    if chosen is None or not researcher.publication_dois:
        return None
    linked_dois = {row.doi for row in unified if row.orcid == chosen}
    hits = len(researcher.publication_dois & linked_dois)
    return hits / len(researcher.publication_dois)


def build_indicators(
    cohort: set[str],
    researchers: ResearcherTable,
    publications: PublicationTable,
    unified: list[UnifiedAssertion],
    profiles: ProfileTable,
    spec: CohortSpec,
) -> dict[str, ResearcherIndicators]:
    """One indicator bundle per cohort member, computed in a single pass
    over the unified table plus per-member lookups."""
    by_doi = publications.by_doi
    grouped = _rows_by_researcher(unified)
    orcid_dois: dict[str, set[str]] = {}
    registry_pairs: set[tuple[str, str]] = set()
    for row in unified:
        orcid_dois.setdefault(row.orcid, set()).add(row.doi)
        if row.source == SOURCE_REGISTRY:
            registry_pairs.add((row.doi, row.orcid))

    out: dict[str, ResearcherIndicators] = {}
    for rid in sorted(cohort):
        rec = researchers.by_id[rid]
        rows = grouped.get(rid, [])
        chosen = _choose_orcid(rec, rows)

        adopted = False
        year_synced: dict[int, bool] = {}
        for row in rows:
            pub = by_doi.get(row.doi)
            if pub is None:
                continue
            if spec.window_start <= pub.year <= spec.window_end:
                adopted = True
            if row.source == SOURCE_CROSSREF:
                synced = (row.doi, row.orcid) in registry_pairs
                year_synced[pub.year] = year_synced.get(pub.year, False) or synced

        if chosen is not None:
            num = len(rec.publication_dois & orcid_dois.get(chosen, set()))
        else:
            num = 0
        profile = profiles.get(chosen) if chosen is not None else None

        out[rid] = ResearcherIndicators(
            researcher_id=rid,
            country=rec.country,
            funder_ids=rec.funder_ids,
            adopted=adopted,
            orcid=chosen,
            orcid_created=profile.created if profile is not None else None,
            completeness_num=num,
            completeness_den=len(rec.publication_dois),
            crossref_years=frozenset(year_synced),
            crossref_only_years=frozenset(
                y for y, synced in year_synced.items() if not synced
            ),
            discipline=assign_discipline(rec, publications),
        )
    return out


def breakdown(
    indicators: dict[str, ResearcherIndicators], dimension: str
) -> list[MetricsRow]:
    """Group-by with pooled percentages.  country and discipline
    partition the cohort; funder multi-counts (one row membership per
    funder), which is the documented reading of funder-level reporting."""
    if dimension not in ("country", "discipline", "funder"):
        raise ValueError(f"unknown dimension: {dimension}")
    groups: dict[str, list[ResearcherIndicators]] = {}
    for ind in indicators.values():
        if dimension == "country":
            groups.setdefault(ind.country, []).append(ind)
        elif dimension == "discipline":
            groups.setdefault(ind.discipline, []).append(ind)
        else:
            for funder in sorted(ind.funder_ids):
                groups.setdefault(funder, []).append(ind)

    rows: list[MetricsRow] = []
    for key in sorted(groups):
        members = groups[key]
        size = len(members)
        adopted = sum(1 for m in members if m.adopted)
        num = sum(m.completeness_num for m in members if m.completeness_den > 0)
        den = sum(m.completeness_den for m in members)
        rows.append(
            MetricsRow(
                kind=dimension,
                key=key,
                cohort_size=size,
                adopted=adopted,
                adoption_pct=100.0 * adopted / size,
                completeness_num=num,
                completeness_den=den,
                engagement_pct=100.0 * num / den if den else 0.0,
            )
        )
    return rows


def income_band_rollup(
    country_rows: list[MetricsRow], band_map: dict[str, str]
) -> list[IncomeBandRow]:
    """Collapse country rows into World Bank income bands: pooled
    adoption, per-country median adoption, pooled completeness.
    Countries absent from the map fall into an "Unclassified" band so
    totals stay accountable."""
    groups: dict[str, list[MetricsRow]] = {}
    for row in country_rows:
        band = band_map.get(row.key, "Unclassified")
        groups.setdefault(band, []).append(row)

    def band_sort_key(band: str) -> tuple[int, str]:
        try:
            return (BAND_ORDER.index(band), band)
        except ValueError:
            return (len(BAND_ORDER), band)

    out: list[IncomeBandRow] = []
    for band in sorted(groups, key=band_sort_key):
        rows = groups[band]
        size = sum(r.cohort_size for r in rows)
        adopted = sum(r.adopted for r in rows)
        num = sum(r.completeness_num for r in rows)
        den = sum(r.completeness_den for r in rows)
        out.append(
            IncomeBandRow(
                band=band,
                cohort_size=size,
                adoption_pct=100.0 * adopted / size if size else 0.0,
                median_country_adoption_pct=statistics.median(
                    r.adoption_pct for r in rows
                ),
                completeness_pct=100.0 * num / den if den else 0.0,
            )
        )
    return out


def early_usage_by_creation_year(
    indicators: dict[str, ResearcherIndicators],
    unified: list[UnifiedAssertion],
    publications: PublicationTable,
) -> list[tuple[str, int, int, int, float]]:
    """(country, creation_year, used, cohort_size, pct) rows.

    A member counts as an early user for creation year Y when some
    assertion of their ORCID sits on a paper dated Y or Y+1 — used
    between registration and the end of the next full publication year.
    The denominator is the country's whole cohort (not cumulative).
    """
    by_doi = publications.by_doi
    country_size: dict[str, int] = {}
    for ind in indicators.values():
        country_size[ind.country] = country_size.get(ind.country, 0) + 1

    usage_years: dict[tuple[str, str], set[int]] = {}
    for row in unified:
        rid = row.researcher_id
        if rid is None:
            continue
        pub = by_doi.get(row.doi)
        if pub is not None:
            usage_years.setdefault((rid, row.orcid), set()).add(pub.year)

    counts: dict[tuple[str, int], int] = {}
    present: set[tuple[str, int]] = set()
    for ind in indicators.values():
        if ind.orcid is None or ind.orcid_created is None:
            continue
        year = ind.orcid_created.year
        cell = (ind.country, year)
        present.add(cell)
        used = usage_years.get((ind.researcher_id, ind.orcid), set())
        if any(y in (year, year + 1) for y in used):
            counts[cell] = counts.get(cell, 0) + 1

    rows = []
    for country, year in sorted(present):
        used = counts.get((country, year), 0)
        size = country_size[country]
        rows.append((country, year, used, size, 100.0 * used / size))
    return rows


def crossref_only_share(
    indicators: dict[str, ResearcherIndicators], year: int
) -> list[tuple[str, int, int, int, float]]:
    """(country, year, crossref_only, with_crossref, pct) rows: of the
    members with publication-side assertions that year, how many saw
    none of those claims reach their public record."""
    only: dict[str, int] = {}
    base: dict[str, int] = {}
    for ind in indicators.values():
        if year not in ind.crossref_years:
            continue
        base[ind.country] = base.get(ind.country, 0) + 1
        if year in ind.crossref_only_years:
            only[ind.country] = only.get(ind.country, 0) + 1
    rows = []
    for country in sorted(base):
        n_only, n_base = only.get(country, 0), base[country]
        rows.append((country, year, n_only, n_base, 100.0 * n_only / n_base))
    return rows


def avg_authors_per_paper(
    publications: PublicationTable,
) -> list[tuple[str, int, float]]:
    """(for_code, papers, mean_authors); a paper with several codes
    counts once under each."""
    totals: dict[str, tuple[int, int]] = {}
    for pub in publications:
        n = len(pub.authors)
        for code in pub.for_codes:
            papers, authors = totals.get(code, (0, 0))
            totals[code] = (papers + 1, authors + n)
    return [
        (code, papers, authors / papers)
        for code, (papers, authors) in sorted(totals.items())
    ]


def journal_orcid_support(
    publications: PublicationTable, assertions: AssertionTable
) -> list[tuple[str, int, int, int]]:
    """(publisher_id, year, journals_supporting, journals_total): how many
    of a publisher's journals carried at least one ORCID assertion that
    year."""
    asserted_dois = {a.doi for a in assertions}
    total: dict[tuple[str, int], set[str]] = {}
    supporting: dict[tuple[str, int], set[str]] = {}
    for pub in publications:
        cell = (pub.publisher_id, pub.year)
        total.setdefault(cell, set()).add(pub.journal_id)
        if pub.doi in asserted_dois:
            supporting.setdefault(cell, set()).add(pub.journal_id)
    return [
        (publisher, year, len(supporting.get((publisher, year), ())), len(journals))
        for (publisher, year), journals in sorted(total.items())
    ]


def orcid_count_distribution(
    publications: PublicationTable,
    assertions: AssertionTable,
    year: int,
    min_authors: int = 4,
) -> list[tuple[str, int, int, int, float, float, float]]:
    """Per publisher, among year-Y papers with >= min_authors authors:
    the share carrying 0, exactly 1, and 2+ ORCID assertions.

    Returns (publisher_id, rank, assertion_volume, papers, share_0,
    share_1, share_2plus) ranked by the publisher's total assertion
    volume that year (all papers, not just the >= min_authors subset).
    Publishers with no qualifying papers have no shares and are omitted.
    """
    per_doi: dict[str, int] = {}
    for a in assertions:
        per_doi[a.doi] = per_doi.get(a.doi, 0) + 1

    volume: dict[str, int] = {}
    buckets: dict[str, list[int]] = {}
    for pub in publications:
        if pub.year != year:
            continue
        n_asserted = per_doi.get(pub.doi, 0)
        volume[pub.publisher_id] = volume.get(pub.publisher_id, 0) + n_asserted
        if len(pub.authors) >= min_authors:
            buckets.setdefault(pub.publisher_id, []).append(n_asserted)

    ranked = sorted(buckets, key=lambda p: (-volume.get(p, 0), p))
    rows = []
    for rank, publisher in enumerate(ranked, start=1):
        counts = buckets[publisher]
        papers = len(counts)
        zero = sum(1 for c in counts if c == 0)
        one = sum(1 for c in counts if c == 1)
        more = papers - zero - one
        rows.append(
            (
                publisher,
                rank,
                volume.get(publisher, 0),
                papers,
                zero / papers,
                one / papers,
                more / papers,
            )
        )
    return rows
