"""Seeded synthetic corpora with ground truth, for evaluating the repair.

A world is built researcher-first: identities get names, countries and
funders; a subset own ORCID iDs; papers sample author sets from the
identity pool and print each author's true name.  Publication-side
assertions are then emitted for every owning author, a configurable
fraction are shuffled to a wrong byline position, and the registry /
profile dumps are derived with configurable coverage, name
perturbation, and record-sync behaviour.

Determinism contract: every entity class draws from its own stream,
seeded by hashing (seed, label), so e.g. adding papers never changes
researcher names.  Identical config => byte-identical files.

Two name styles exist.  "distinct" gives researcher i the names
l1*5 / l2*5 for a unique letter pair (l1, l2) — any two distinct names
then share at most one run letter, bounding their Levenshtein ratio by
12/22 < 0.6, which is what the clean-repair guarantees need.
"realistic" draws from small pools that include confusable spellings
and transliteration-table members.

Perturbations model why profile names diverge from printed names:
married_name swaps the profile family name, short_name truncates the
profile given name, transliteration renders the profile name in a
non-Latin script.  A perturbed owner is also the owner whose registry
record lost its ORCID match (the registry matched on names and failed),
which is what makes their assertions detectable-but-hard.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import os
import random
import string
from dataclasses import dataclass, field

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
from .ingest import orcid_check_char
from .quality import (
    RepairOutcome,
    VERDICT_KEEP,
    VERDICT_REASSIGN,
)

import datetime

CLASS_NONE = "none"
CLASS_MARRIED = "married_name"
CLASS_SHORT = "short_name"
CLASS_TRANSLIT = "transliteration"
PERTURBATION_CLASSES = (CLASS_NONE, CLASS_MARRIED, CLASS_SHORT, CLASS_TRANSLIT)

DISTINCT_CAPACITY = 26 * 25

# Explicit native/anglicised pairs; names outside the table fall back to
# a letter-by-letter Cyrillic rendering (injective, so distinct names
# stay distinct after normalization).
TRANSLIT_TABLE = {
    "maria": "мария",
    "anna": "анна",
    "sergei": "сергей",
    "olga": "ольга",
    "ivanov": "иванов",
    "petrov": "петров",
    "zhang": "张",
    "wang": "王",
    "chen": "陈",
    "nakamura": "中村",
}
_TRANSLIT_FALLBACK = str.maketrans(
    "abcdefghijklmnopqrstuvwxyz", "абвгдежзиюклмнопрстуфхцчшщ"
)

GIVEN_POOL = (
    "maria", "anna", "sergei", "olga", "wei", "li", "james", "jamie",
    "carla", "karla", "joao", "pedro", "aisha", "fatima", "yuki",
    "keiko", "lars", "sven", "priya", "arun", "nneka", "tunde",
    "helena", "helene", "marco", "marko", "sofia", "sophia",
)
FAMILY_POOL = (
    "ivanov", "petrov", "zhang", "wang", "chen", "nakamura", "silva",
    "santos", "mueller", "muller", "johnson", "jonson", "okafor",
    "adeyemi", "rahman", "begum", "larsen", "larssen", "patel",
    "sharma", "rossi", "rosso", "kowalski", "kowalsky",
)

BUILTIN_BANDS = {
    "US": "High", "GB": "High", "DE": "High", "JP": "High", "AU": "High",
    "CN": "Upper middle", "BR": "Upper middle", "ZA": "Upper middle",
    "RU": "Upper middle", "IN": "Lower middle", "NG": "Lower middle",
    "BD": "Lower middle", "KE": "Lower middle",
    "ET": "Low", "MW": "Low", "AF": "Low",
}

DEFAULT_COUNTRIES = (
    ("US", 5.0), ("GB", 3.0), ("DE", 3.0), ("JP", 2.0), ("CN", 4.0),
    ("BR", 2.0), ("ZA", 1.0), ("IN", 2.0), ("NG", 1.0), ("BD", 0.5),
    ("ET", 0.5), ("MW", 0.3),
)

DEFAULT_FOR_CODES = (
    ("01", 1.0), ("03", 2.0), ("06", 3.0), ("09", 2.5), ("11", 3.5),
    ("13", 1.0), ("17", 1.5), ("20", 0.5),
)


class SynthConfigError(ValueError):
    """Raised for configurations that cannot produce a valid world."""


@dataclass
class SynthConfig:
    seed: int = 42
    n_researchers: int = 600
    n_papers: int = 5000
    authors_min: int = 2
    authors_max: int = 8
    authors_mean: float = 4.5
    year_start: int = 2008
    year_end: int = 2020
    countries: tuple[tuple[str, float], ...] = DEFAULT_COUNTRIES
    n_publishers: int = 20
    n_journals: int = 100
    n_funders: int = 12
    funders_max: int = 3
    for_code_weights: tuple[tuple[str, float], ...] = DEFAULT_FOR_CODES
    orcid_ownership_rate: float = 0.55
    shuffle_rate: float = 0.0
    sync_probability: float = 0.8
    married_name_rate: float = 0.0
    short_name_rate: float = 0.0
    transliteration_rate: float = 0.0
    registry_coverage: float = 1.0
    authenticated_rate: float = 0.8
    name_style: str = "distinct"  # "distinct" | "realistic"

    def validate(self) -> None:
        if self.n_researchers <= 0 or self.n_papers <= 0:
            raise SynthConfigError("n_researchers and n_papers must be positive")
        if not 1 <= self.authors_min <= self.authors_max:
            raise SynthConfigError("need 1 <= authors_min <= authors_max")
        if self.authors_max > self.n_researchers:
            raise SynthConfigError(
                f"authors_max={self.authors_max} exceeds "
                f"n_researchers={self.n_researchers}"
            )
        if not self.authors_min <= self.authors_mean <= self.authors_max:
            raise SynthConfigError("authors_mean must lie within [min, max]")
        if self.year_start > self.year_end:
            raise SynthConfigError("year_start must not exceed year_end")
        if self.name_style not in ("distinct", "realistic"):
            raise SynthConfigError(f"unknown name_style: {self.name_style}")
        if self.name_style == "distinct" and self.n_researchers > DISTINCT_CAPACITY:
            raise SynthConfigError(
                f"distinct name style supports at most {DISTINCT_CAPACITY} "
                f"researchers, got {self.n_researchers}"
            )
        rates = {
            "orcid_ownership_rate": self.orcid_ownership_rate,
            "shuffle_rate": self.shuffle_rate,
            "sync_probability": self.sync_probability,
            "married_name_rate": self.married_name_rate,
            "short_name_rate": self.short_name_rate,
            "transliteration_rate": self.transliteration_rate,
            "registry_coverage": self.registry_coverage,
            "authenticated_rate": self.authenticated_rate,
        }
        for name, value in rates.items():
            if not 0.0 <= value <= 1.0:
                raise SynthConfigError(f"{name} must be in [0, 1], got {value}")
        total_perturb = (
            self.married_name_rate + self.short_name_rate + self.transliteration_rate
        )
        if total_perturb > 1.0:
            raise SynthConfigError("perturbation rates must sum to at most 1")
        if not self.countries or not self.for_code_weights:
            raise SynthConfigError("countries and for_code_weights must be nonempty")
        if self.n_publishers <= 0 or self.n_journals < self.n_publishers:
            raise SynthConfigError("need n_journals >= n_publishers >= 1")


@dataclass(frozen=True)
class ShuffleEvent:
    doi: str
    from_position: int
    to_position: int
    orcid: str


@dataclass
class GroundTruth:
    authorship: dict[tuple[str, int], str] = field(default_factory=dict)
    ownership: dict[str, str] = field(default_factory=dict)  # rid -> orcid
    owner_class: dict[str, str] = field(default_factory=dict)
    covered: set[str] = field(default_factory=set)
    synced: set[str] = field(default_factory=set)
    shuffles: list[ShuffleEvent] = field(default_factory=list)


@dataclass
class World:
    config: SynthConfig
    publications: PublicationTable
    assertions: AssertionTable
    profiles: ProfileTable
    researchers: ResearcherTable
    truth: GroundTruth
    bands: dict[str, str]


def _stream(seed: int, label: str) -> random.Random:
    """An independent deterministic RNG per entity class.  Seeds derive
    from a cryptographic hash, not the builtin hash(), which is
    randomized per process."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def orcid_for_index(index: int) -> str:
    base = f"{index:015d}"
    body = base + orcid_check_char(base)
    return "-".join(body[i : i + 4] for i in range(0, 16, 4))


def _distinct_names(n: int) -> list[tuple[str, str]]:
    pairs = []
    for l1, l2 in itertools.product(string.ascii_lowercase, repeat=2):
        if l1 != l2:
            pairs.append((l1 * 5, l2 * 5))
        if len(pairs) == n:
            break
    return pairs


def _letters(k: int) -> str:
    """1 -> "a", 26 -> "z", 27 -> "aa", ... (spreadsheet-column style)."""
    out = []
    while k:
        k, r = divmod(k - 1, 26)
        out.append(string.ascii_lowercase[r])
    return "".join(reversed(out))


REALISTIC_CAPACITY = len(GIVEN_POOL) * len(FAMILY_POOL) * (1 + 26 * 26)


def _realistic_names(n: int, rng: random.Random) -> list[tuple[str, str]]:
    """Unique pool-drawn names; past the raw pool product, a middle token
    disambiguates.  Index-based so generation is O(n), then shuffled so
    name assignment does not correlate with researcher order."""
    if n > REALISTIC_CAPACITY:
        raise SynthConfigError(
            f"realistic name style supports at most {REALISTIC_CAPACITY} "
            f"researchers, got {n}"
        )
    ng, nf = len(GIVEN_POOL), len(FAMILY_POOL)
    names: list[tuple[str, str]] = []
    for i in range(n):
        given = GIVEN_POOL[i % ng]
        family = FAMILY_POOL[(i // ng) % nf]
        block = i // (ng * nf)
        if block:
            given = f"{given} {_letters(block)}"
        names.append((given, family))
    rng.shuffle(names)
    return names


def perturb_name(
    given: str,
    family: str,
    kind: str,
    rng: random.Random,
    family_pool: tuple[str, ...] = (),
) -> tuple[str, str]:
    """The profile-side name variant for one perturbation class."""
    if kind == CLASS_NONE:
        return given, family
    if kind == CLASS_MARRIED:
        others = [f for f in family_pool if f != family]
        if not others:
            return given, family
        return given, rng.choice(others)
    if kind == CLASS_SHORT:
        return given[: rng.randint(1, 2)] or given, family
    if kind == CLASS_TRANSLIT:
        new_given = TRANSLIT_TABLE.get(given, given.translate(_TRANSLIT_FALLBACK))
        new_family = TRANSLIT_TABLE.get(family, family.translate(_TRANSLIT_FALLBACK))
        return new_given, new_family
    raise SynthConfigError(f"unknown perturbation kind: {kind}")


def _draw_author_count(rng: random.Random, config: SynthConfig) -> int:
    span = config.authors_max - config.authors_min
    if span == 0:
        return config.authors_min
    p = (config.authors_mean - config.authors_min) / span
    return config.authors_min + sum(rng.random() < p for _ in range(span))


def inject_shuffles(
    assertions: AssertionTable,
    truth: GroundTruth,
    rate: float,
    rng: random.Random,
) -> list[ShuffleEvent]:
    """Move a random subset of assertions to a wrong byline position.

    Targets are drawn only from positions that carry no assertion and
    were not already used as a target, so the mutated table still has at
    most one assertion per (doi, position) and a later repair can move
    the claim home without displacing anything.
    """
    positions_by_doi: dict[str, list[int]] = {}
    for (doi, pos), _rid in truth.authorship.items():
        positions_by_doi.setdefault(doi, []).append(pos)
    occupied: dict[str, set[int]] = {}
    for a in assertions:
        occupied.setdefault(a.doi, set()).add(a.position)

    events: list[ShuffleEvent] = []
    for a in assertions.rows:
        if rng.random() >= rate:
            continue
        taken = occupied[a.doi]
        candidates = [
            p for p in sorted(positions_by_doi[a.doi])
            if p != a.position and p not in taken
        ]
        if not candidates:
            continue
        target = rng.choice(candidates)
        # The vacated origin stays in `taken`: were a later shuffle to land
        # there, repairing the first one home would collide with it.
        taken.add(target)
        events.append(ShuffleEvent(a.doi, a.position, target, a.orcid))
        a.position = target
    truth.shuffles.extend(events)
    return events


def build_world(config: SynthConfig) -> World:
    """Construct every table in memory, deterministically from the seed."""
    config.validate()
    truth = GroundTruth()

    # Researchers: names, countries, funders.
    if config.name_style == "distinct":
        names = _distinct_names(config.n_researchers)
    else:
        names = _realistic_names(config.n_researchers, _stream(config.seed, "names"))
    family_pool = tuple(sorted({family for _g, family in names}))

    country_rng = _stream(config.seed, "countries")
    country_codes = [c for c, _w in config.countries]
    country_weights = [w for _c, w in config.countries]
    funder_rng = _stream(config.seed, "funders")
    funder_ids = [f"f{i:03d}" for i in range(config.n_funders)]

    researcher_ids = [f"r{i:06d}" for i in range(config.n_researchers)]
    countries = {}
    funders = {}
    for rid in researcher_ids:
        countries[rid] = country_rng.choices(country_codes, country_weights)[0]
        k = funder_rng.randint(0, config.funders_max)
        funders[rid] = frozenset(funder_rng.sample(funder_ids, min(k, len(funder_ids))))

    # ORCID ownership and perturbation classes.
    own_rng = _stream(config.seed, "ownership")
    next_orcid = 1
    for rid in researcher_ids:
        if own_rng.random() < config.orcid_ownership_rate:
            truth.ownership[rid] = orcid_for_index(next_orcid)
            next_orcid += 1
    perturb_rng = _stream(config.seed, "perturbation")
    for rid in researcher_ids:
        if rid not in truth.ownership:
            continue
        u = perturb_rng.random()
        if u < config.married_name_rate:
            truth.owner_class[rid] = CLASS_MARRIED
        elif u < config.married_name_rate + config.short_name_rate:
            truth.owner_class[rid] = CLASS_SHORT
        elif u < (
            config.married_name_rate
            + config.short_name_rate
            + config.transliteration_rate
        ):
            truth.owner_class[rid] = CLASS_TRANSLIT
        else:
            truth.owner_class[rid] = CLASS_NONE

    # Papers: venue, year, codes, author sets printing true names.
    paper_rng = _stream(config.seed, "papers")
    code_pop = [c for c, _w in config.for_code_weights]
    code_weights = [w for _c, w in config.for_code_weights]
    publications = PublicationTable()
    authored: dict[str, list[str]] = {rid: [] for rid in researcher_ids}
    name_of = dict(zip(researcher_ids, names))
    for j in range(config.n_papers):
        doi = f"10.5555/synth.{j:07d}"
        year = paper_rng.randint(config.year_start, config.year_end)
        journal_idx = paper_rng.randrange(config.n_journals)
        journal_id = f"j{journal_idx:04d}"
        publisher_id = f"p{journal_idx * config.n_publishers // config.n_journals:03d}"
        n_codes = 2 if paper_rng.random() < 0.3 else 1
        codes = set()
        while len(codes) < n_codes:
            codes.add(paper_rng.choices(code_pop, code_weights)[0])
        k = _draw_author_count(paper_rng, config)
        team = paper_rng.sample(researcher_ids, k)
        authors = []
        for position, rid in enumerate(team):
            given, family = name_of[rid]
            authors.append(AuthorMention(position, given, family))
            truth.authorship[(doi, position)] = rid
            authored[rid].append(doi)
        publications.by_doi[doi] = PublicationRecord(
            doi=doi,
            year=year,
            journal_id=journal_id,
            publisher_id=publisher_id,
            for_codes=frozenset(codes),
            authors=authors,
        )

    # Publication-side assertions: every owning author claims their slot.
    auth_rng = _stream(config.seed, "authenticated")
    assertions = AssertionTable()
    for (doi, position), rid in sorted(truth.authorship.items()):
        orcid = truth.ownership.get(rid)
        if orcid is None:
            continue
        assertions.rows.append(
            CrossrefAssertion(
                doi, position, orcid, auth_rng.random() < config.authenticated_rate
            )
        )

    inject_shuffles(
        assertions, truth, config.shuffle_rate, _stream(config.seed, "shuffles")
    )
    assertions.rows.sort(key=lambda a: (a.doi, a.position))

    # Registry (background) records: coverage, ORCID match for clean owners.
    cover_rng = _stream(config.seed, "coverage")
    researchers = ResearcherTable()
    for rid in researcher_ids:
        if cover_rng.random() >= config.registry_coverage:
            continue
        truth.covered.add(rid)
        given, family = name_of[rid]
        orcid = truth.ownership.get(rid)
        if orcid is not None and truth.owner_class.get(rid) != CLASS_NONE:
            orcid = None  # the registry's name-based ORCID match failed
        researchers.by_id[rid] = ResearcherRecord(
            researcher_id=rid,
            given=given,
            family=family,
            country=countries[rid],
            orcid=orcid,
            publication_dois=frozenset(authored[rid]),
            funder_ids=funders[rid],
        )

    # Profiles: perturbed names, creation dates, synced work lists.
    sync_rng = _stream(config.seed, "sync")
    created_rng = _stream(config.seed, "created")
    pname_rng = _stream(config.seed, "profile-names")
    asserted_dois: dict[str, set[str]] = {}
    for a in assertions:
        asserted_dois.setdefault(a.orcid, set()).add(a.doi)
    profiles = ProfileTable()
    for rid in researcher_ids:
        orcid = truth.ownership.get(rid)
        if orcid is None:
            continue
        synced = sync_rng.random() < config.sync_probability
        if synced:
            truth.synced.add(rid)
        given, family = name_of[rid]
        p_given, p_family = perturb_name(
            given, family, truth.owner_class[rid], pname_rng, family_pool
        )
        created = datetime.date(
            created_rng.randint(config.year_start, max(config.year_start, config.year_end - 1)),
            created_rng.randint(1, 12),
            created_rng.randint(1, 28),
        )
        profiles.by_orcid[orcid] = OrcidProfile(
            orcid=orcid,
            given=p_given,
            family=p_family,
            created=created,
            work_dois=frozenset(asserted_dois.get(orcid, set()) if synced else set()),
        )

    bands = {
        code: BUILTIN_BANDS.get(code, "Unclassified") for code, _w in config.countries
    }
    return World(config, publications, assertions, profiles, researchers, truth, bands)


PUBLICATIONS_FILE = "publications.ndjson"
ASSERTIONS_FILE = "crossref_assertions.ndjson"
PROFILES_FILE = "orcid_profiles.ndjson"
RESEARCHERS_FILE = "researchers.ndjson"
TRUTH_FILE = "truth.ndjson"
BANDS_FILE = "bands.csv"


def _dump_line(fh, obj: dict) -> None:
    fh.write(json.dumps(obj, separators=(",", ":")))
    fh.write("\n")


def write_world(world: World, out_dir: str, emit_truth: bool = True) -> dict[str, str]:
    """Emit the four ingest dumps, the band map, and (optionally) the
    ground truth.  Output is deterministic line by line."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "publications": os.path.join(out_dir, PUBLICATIONS_FILE),
        "assertions": os.path.join(out_dir, ASSERTIONS_FILE),
        "profiles": os.path.join(out_dir, PROFILES_FILE),
        "researchers": os.path.join(out_dir, RESEARCHERS_FILE),
        "bands": os.path.join(out_dir, BANDS_FILE),
    }

    with open(paths["publications"], "w", encoding="utf-8") as fh:
        for doi in sorted(world.publications.by_doi):
            pub = world.publications.by_doi[doi]
            _dump_line(
                fh,
                {
                    "doi": pub.doi,
                    "year": pub.year,
                    "journal_id": pub.journal_id,
                    "publisher_id": pub.publisher_id,
                    "for_codes": sorted(pub.for_codes),
                    "authors": [
                        {"position": m.position, "given": m.given, "family": m.family}
                        for m in pub.authors
                    ],
                },
            )

    with open(paths["assertions"], "w", encoding="utf-8") as fh:
        for a in sorted(world.assertions, key=lambda a: (a.doi, a.position)):
            _dump_line(
                fh,
                {
                    "doi": a.doi,
                    "position": a.position,
                    "orcid": a.orcid,
                    "authenticated": a.authenticated,
                },
            )

    with open(paths["profiles"], "w", encoding="utf-8") as fh:
        for orcid in sorted(world.profiles.by_orcid):
            p = world.profiles.by_orcid[orcid]
            _dump_line(
                fh,
                {
                    "orcid": p.orcid,
                    "given": p.given,
                    "family": p.family,
                    "created": p.created.isoformat(),
                    "work_dois": sorted(p.work_dois),
                },
            )

    with open(paths["researchers"], "w", encoding="utf-8") as fh:
        for rid in sorted(world.researchers.by_id):
            r = world.researchers.by_id[rid]
            record = {
                "researcher_id": r.researcher_id,
                "given": r.given,
                "family": r.family,
                "country": r.country,
                "publication_dois": sorted(r.publication_dois),
                "funder_ids": sorted(r.funder_ids),
            }
            if r.orcid is not None:
                record["orcid"] = r.orcid
            _dump_line(fh, record)

    with open(paths["bands"], "w", encoding="utf-8", newline="") as fh:
        fh.write("country,band\n")
        for country in sorted(world.bands):
            fh.write(f"{country},{world.bands[country]}\n")

    if emit_truth:
        paths["truth"] = os.path.join(out_dir, TRUTH_FILE)
        write_truth(paths["truth"], world.truth, world.config)
    return paths


def generate_world(
    config: SynthConfig, out_dir: str, emit_truth: bool = True
) -> tuple[World, dict[str, str]]:
    world = build_world(config)
    return world, write_world(world, out_dir, emit_truth=emit_truth)


def write_truth(path: str, truth: GroundTruth, config: SynthConfig | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if config is not None:
            _dump_line(fh, {"kind": "config", "config": dataclasses.asdict(config)})
        for rid in sorted(truth.ownership):
            _dump_line(
                fh,
                {
                    "kind": "ownership",
                    "researcher_id": rid,
                    "orcid": truth.ownership[rid],
                    "class": truth.owner_class.get(rid, CLASS_NONE),
                    "covered": rid in truth.covered,
                    "synced": rid in truth.synced,
                },
            )
        for rid in sorted(truth.covered - set(truth.ownership)):
            _dump_line(
                fh,
                {"kind": "coverage", "researcher_id": rid},
            )
        for (doi, position), rid in sorted(truth.authorship.items()):
            _dump_line(
                fh,
                {
                    "kind": "authorship",
                    "doi": doi,
                    "position": position,
                    "researcher_id": rid,
                },
            )
        for ev in sorted(truth.shuffles, key=lambda e: (e.doi, e.from_position)):
            _dump_line(
                fh,
                {
                    "kind": "shuffle",
                    "doi": ev.doi,
                    "from_position": ev.from_position,
                    "to_position": ev.to_position,
                    "orcid": ev.orcid,
                },
            )


def read_truth(path: str) -> GroundTruth:
    truth = GroundTruth()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            kind = obj.get("kind")
            if kind == "ownership":
                rid = obj["researcher_id"]
                truth.ownership[rid] = obj["orcid"]
                truth.owner_class[rid] = obj["class"]
                if obj["covered"]:
                    truth.covered.add(rid)
                if obj["synced"]:
                    truth.synced.add(rid)
            elif kind == "coverage":
                truth.covered.add(obj["researcher_id"])
            elif kind == "authorship":
                truth.authorship[(obj["doi"], obj["position"])] = obj["researcher_id"]
            elif kind == "shuffle":
                truth.shuffles.append(
                    ShuffleEvent(
                        obj["doi"],
                        obj["from_position"],
                        obj["to_position"],
                        obj["orcid"],
                    )
                )
    return truth


@dataclass
class ClassScore:
    n_scored: int
    repaired_or_dropped: int
    reassigned_home: int

    @property
    def recall(self) -> float:
        return self.repaired_or_dropped / self.n_scored if self.n_scored else 1.0

    @property
    def reassign_recall(self) -> float:
        return self.reassigned_home / self.n_scored if self.n_scored else 1.0


@dataclass
class ScoreReport:
    precision: float
    recall: float
    n_injected: int
    n_scored: int
    n_non_keep: int
    by_class: dict[str, ClassScore]

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "n_injected": self.n_injected,
            "n_scored": self.n_scored,
            "n_non_keep": self.n_non_keep,
            "by_class": {
                name: {
                    "n_scored": c.n_scored,
                    "repaired_or_dropped": c.repaired_or_dropped,
                    "reassigned_home": c.reassigned_home,
                    "recall": c.recall,
                    "reassign_recall": c.reassign_recall,
                }
                for name, c in sorted(self.by_class.items())
            },
        }


def score_repair(
    truth: GroundTruth,
    outcomes: dict[tuple[str, int], RepairOutcome],
) -> ScoreReport:
    """Grade the repair against ground truth.

    Recall: of the injected shuffles whose two parties — the identity's
    true owner and the researcher printed at the wrong position — are
    both registry-covered, how many drew a non-KEEP verdict.  The
    restriction mirrors what any registry-driven detector can see.

    Precision: of all non-KEEP verdicts, how many were right — a drop
    of an injected shuffle, or a reassignment that sent one back to its
    true position.  Any verdict that alters a correct assertion, or
    moves a shuffled one to yet another wrong position, counts against.

    The per-class breakdown groups scored shuffles by the owner's name
    perturbation class; reassign_recall is the share sent exactly home,
    the sharper signal of how perturbations degrade the repair.
    """
    owner_of_orcid = {orcid: rid for rid, orcid in truth.ownership.items()}
    injected: dict[tuple[str, int], ShuffleEvent] = {
        (ev.doi, ev.to_position): ev for ev in truth.shuffles
    }

    by_class = {name: ClassScore(0, 0, 0) for name in PERTURBATION_CLASSES}
    scored_keys: set[tuple[str, int]] = set()
    for key, ev in injected.items():
        owner = owner_of_orcid.get(ev.orcid)
        wrong_author = truth.authorship.get((ev.doi, ev.to_position))
        if owner is None or owner not in truth.covered:
            continue
        if wrong_author is None or wrong_author not in truth.covered:
            continue
        scored_keys.add(key)
        cls = by_class[truth.owner_class.get(owner, CLASS_NONE)]
        cls.n_scored += 1
        out = outcomes.get(key)
        if out is not None and out.verdict != VERDICT_KEEP:
            cls.repaired_or_dropped += 1
            if (
                out.verdict == VERDICT_REASSIGN
                and out.new_position == ev.from_position
            ):
                cls.reassigned_home += 1

    n_scored = sum(c.n_scored for c in by_class.values())
    n_recalled = sum(c.repaired_or_dropped for c in by_class.values())

    n_non_keep = 0
    n_correct = 0
    for key, out in outcomes.items():
        if out.verdict == VERDICT_KEEP:
            continue
        n_non_keep += 1
        ev = injected.get(key)
        if ev is None:
            continue
        if out.verdict == VERDICT_REASSIGN:
            if out.new_position == ev.from_position:
                n_correct += 1
        else:
            n_correct += 1

    return ScoreReport(
        precision=n_correct / n_non_keep if n_non_keep else 1.0,
        recall=n_recalled / n_scored if n_scored else 1.0,
        n_injected=len(truth.shuffles),
        n_scored=n_scored,
        n_non_keep=n_non_keep,
        by_class=by_class,
    )
