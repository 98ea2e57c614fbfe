"""Command-line entry point.

Subcommands mirror the pipeline stages so each is independently
runnable: ingest-check (parse + accounting only), diagnose (flags and
the shuffle-rate series, pre-repair), repair (verdicts applied, report
written), metrics (full chain, indicator CSVs), synth (world
generation), score (repair report vs ground truth), and run (the whole
pipeline into one output directory with a manifest).

Configuration is TOML; command-line flags override file values.  Exit
codes: 0 success, 1 fatal input error (unreadable/missing files),
2 invalid configuration or usage.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import json
import os
import re
import sys
from dataclasses import dataclass, field

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import ingest, linkage, metrics, quality, synthworld
from .metrics import CohortSpec
from .quality import RepairConfig
from .records import AssertionTable

METRIC_FILES = [
    "adoption_by_country.csv",
    "early_usage.csv",
    "crossref_only.csv",
    "income_bands.csv",
    "discipline.csv",
    "authors_per_paper.csv",
    "journal_support.csv",
    "orcid_distribution.csv",
    "funder.csv",
]


class PipelineConfigError(ValueError):
    """Invalid or incomplete pipeline configuration."""


@dataclass
class PipelineConfig:
    publications: str = ""
    crossref_assertions: str = ""
    orcid_profiles: str = ""
    researchers: str = ""
    band_map: str | None = None
    out_dir: str = "out"
    cohort: CohortSpec = field(default_factory=CohortSpec)
    repair: RepairConfig = field(default_factory=RepairConfig)
    top_n: int = 20
    seed: int | None = None
    workers: int = 0  # 0 = one per processor; stages currently run inline
    debug_linkage: bool = False

    def validate(self) -> None:
        for label, path in (
            ("publications", self.publications),
            ("crossref_assertions", self.crossref_assertions),
            ("orcid_profiles", self.orcid_profiles),
            ("researchers", self.researchers),
        ):
            if not path:
                raise PipelineConfigError(f"missing input path: {label}")
        if not 0.0 <= self.repair.keep_threshold <= 1.0:
            raise PipelineConfigError("keep_threshold must be in [0, 1]")
        if not 0.0 <= self.repair.reassign_threshold <= 1.0:
            raise PipelineConfigError("reassign_threshold must be in [0, 1]")
        if self.cohort.window_start > self.cohort.window_end:
            raise PipelineConfigError("cohort window start exceeds end")
        if self.top_n <= 0:
            raise PipelineConfigError("top_n must be positive")

    def echo(self) -> dict:
        return {
            "inputs": {
                "publications": self.publications,
                "crossref_assertions": self.crossref_assertions,
                "orcid_profiles": self.orcid_profiles,
                "researchers": self.researchers,
                "band_map": self.band_map,
            },
            "cohort": dataclasses.asdict(self.cohort),
            "quality": dataclasses.asdict(self.repair),
            "top_n": self.top_n,
            "seed": self.seed,
            "workers": self.workers,
        }


def load_config(path: str) -> PipelineConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise PipelineConfigError(f"unparseable config {path}: {exc}") from exc

    config = PipelineConfig()
    inputs = raw.get("inputs", {})
    base = os.path.dirname(os.path.abspath(path))

    def _resolve(p: str | None) -> str | None:
        if not p:
            return None
        return p if os.path.isabs(p) else os.path.join(base, p)

    config.publications = _resolve(inputs.get("publications", "")) or ""
    config.crossref_assertions = _resolve(inputs.get("crossref_assertions", "")) or ""
    config.orcid_profiles = _resolve(inputs.get("orcid_profiles", "")) or ""
    config.researchers = _resolve(inputs.get("researchers", "")) or ""
    config.band_map = _resolve(inputs.get("band_map"))

    cohort = raw.get("cohort", {})
    config.cohort = CohortSpec(
        window_start=int(cohort.get("window_start", 2015)),
        window_end=int(cohort.get("window_end", 2019)),
        min_history_years=int(cohort.get("min_history_years", 5)),
        min_papers=int(cohort.get("min_papers", 5)),
    )
    quality_cfg = raw.get("quality", {})
    config.repair = RepairConfig(
        keep_threshold=float(quality_cfg.get("keep_threshold", 0.70)),
        reassign_threshold=float(quality_cfg.get("reassign_threshold", 0.90)),
        min_name_length=int(quality_cfg.get("min_name_length", 2)),
        rescue_enabled=bool(quality_cfg.get("rescue_enabled", True)),
    )
    output = raw.get("output", {})
    config.top_n = int(output.get("top_n", 20))
    config.debug_linkage = bool(output.get("debug_linkage", False))
    run_cfg = raw.get("run", {})
    if "seed" in run_cfg:
        config.seed = int(run_cfg["seed"])
    config.workers = int(run_cfg.get("workers", 0))
    return config


def emit_csv(path: str, header: list[str], rows: list[list]) -> int:
    """Atomic CSV write: temp file in the same directory, then rename.
    Returns the data row count for the manifest."""
    tmp = path + ".tmp"
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)
    return len(rows)


def read_band_map(path: str) -> dict[str, str]:
    bands: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"country", "band"} <= set(reader.fieldnames):
            raise PipelineConfigError(
                f"band map {path} must have 'country' and 'band' columns"
            )
        for row in reader:
            bands[row["country"]] = row["band"]
    return bands


def _pct(x: float) -> str:
    return f"{x:.4f}"


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute ingest -> linkage -> quality -> union -> metrics, writing
    every artifact into config.out_dir.  Returns the manifest dict."""
    config.validate()
    out_dir = config.out_dir
    os.makedirs(out_dir, exist_ok=True)
    outputs: dict[str, int] = {}

    tables = ingest.load_tables(
        config.publications,
        config.crossref_assertions,
        config.orcid_profiles,
        config.researchers,
    )
    rejects_path = os.path.join(out_dir, "rejects.csv")
    outputs["rejects.csv"] = emit_csv(
        rejects_path,
        ["file", "line", "reason"],
        [[f, str(n), r] for f, n, r in tables.rejects.rows],
    )

    assertions, n_unresolvable = ingest.filter_resolvable_assertions(
        tables.assertions, tables.publications
    )
    linked = linkage.link_crossref_authors(tables.publications, tables.researchers)
    if config.debug_linkage:
        linkage.write_linked_authors_csv(
            os.path.join(out_dir, "linked_authors.csv"),
            tables.publications,
            linked,
            assertions,
        )

    series = quality.estimate_shuffle_rate(assertions, linked, tables.publications)
    outputs["shuffle_rate.csv"] = emit_csv(
        os.path.join(out_dir, "shuffle_rate.csv"),
        quality.SHUFFLE_RATE_HEADER,
        quality.shuffle_rate_rows(series),
    )

    repaired, stats, applied = quality.run_repair(
        assertions,
        tables.publications,
        tables.profiles,
        linked,
        tables.researchers,
        config.repair,
    )
    outputs["repair_report.csv"] = emit_csv(
        os.path.join(out_dir, "repair_report.csv"),
        quality.REPAIR_REPORT_HEADER,
        quality.repair_report_rows(applied),
    )

    registry_rows = linkage.link_orcid_works(tables.profiles, tables.publications)
    unified = linkage.build_assertion_table(
        linked, registry_rows, repaired, tables.researchers
    )

    cohort = metrics.build_cohort(tables.researchers, tables.publications, config.cohort)
    indicators = metrics.build_indicators(
        cohort,
        tables.researchers,
        tables.publications,
        unified,
        tables.profiles,
        config.cohort,
    )

    header = [
        "cohort_size", "adopted", "adoption_pct",
        "completeness_num", "completeness_den", "engagement_pct",
    ]

    country_rows = metrics.breakdown(indicators, "country")
    outputs["adoption_by_country.csv"] = emit_csv(
        os.path.join(out_dir, "adoption_by_country.csv"),
        ["country"] + header,
        [
            [r.key, str(r.cohort_size), str(r.adopted), _pct(r.adoption_pct),
             str(r.completeness_num), str(r.completeness_den), _pct(r.engagement_pct)]
            for r in country_rows
        ],
    )
    discipline_rows = metrics.breakdown(indicators, "discipline")
    outputs["discipline.csv"] = emit_csv(
        os.path.join(out_dir, "discipline.csv"),
        ["discipline"] + header,
        [
            [r.key, str(r.cohort_size), str(r.adopted), _pct(r.adoption_pct),
             str(r.completeness_num), str(r.completeness_den), _pct(r.engagement_pct)]
            for r in discipline_rows
        ],
    )
    funder_rows = metrics.breakdown(indicators, "funder")
    outputs["funder.csv"] = emit_csv(
        os.path.join(out_dir, "funder.csv"),
        ["funder_id"] + header,
        [
            [r.key, str(r.cohort_size), str(r.adopted), _pct(r.adoption_pct),
             str(r.completeness_num), str(r.completeness_den), _pct(r.engagement_pct)]
            for r in funder_rows
        ],
    )

    band_map = read_band_map(config.band_map) if config.band_map else {}
    band_rows = metrics.income_band_rollup(country_rows, band_map)
    outputs["income_bands.csv"] = emit_csv(
        os.path.join(out_dir, "income_bands.csv"),
        ["band", "cohort_size", "adoption_pct",
         "median_country_adoption_pct", "completeness_pct"],
        [
            [r.band, str(r.cohort_size), f"{r.adoption_pct:.2f}",
             f"{r.median_country_adoption_pct:.2f}", f"{r.completeness_pct:.2f}"]
            for r in band_rows
        ],
    )

    early_rows = metrics.early_usage_by_creation_year(
        indicators, unified, tables.publications
    )
    outputs["early_usage.csv"] = emit_csv(
        os.path.join(out_dir, "early_usage.csv"),
        ["country", "creation_year", "used", "cohort_size", "pct"],
        [
            [country, str(year), str(used), str(size), _pct(pct)]
            for country, year, used, size, pct in early_rows
        ],
    )

    crossref_only_rows: list[list[str]] = []
    for year in range(config.cohort.window_start, config.cohort.window_end + 1):
        for country, yr, n_only, n_base, pct in metrics.crossref_only_share(
            indicators, year
        ):
            crossref_only_rows.append(
                [country, str(yr), str(n_only), str(n_base), _pct(pct)]
            )
    outputs["crossref_only.csv"] = emit_csv(
        os.path.join(out_dir, "crossref_only.csv"),
        ["country", "year", "crossref_only", "with_crossref", "pct"],
        crossref_only_rows,
    )

    outputs["authors_per_paper.csv"] = emit_csv(
        os.path.join(out_dir, "authors_per_paper.csv"),
        ["for_code", "papers", "mean_authors"],
        [
            [code, str(papers), f"{mean:.4f}"]
            for code, papers, mean in metrics.avg_authors_per_paper(tables.publications)
        ],
    )

    outputs["journal_support.csv"] = emit_csv(
        os.path.join(out_dir, "journal_support.csv"),
        ["publisher_id", "year", "journals_supporting", "journals_total"],
        [
            [publisher, str(year), str(supporting), str(total)]
            for publisher, year, supporting, total in metrics.journal_orcid_support(
                tables.publications, repaired
            )
        ],
    )

    dist_year = config.cohort.window_end
    dist_rows = metrics.orcid_count_distribution(
        tables.publications, repaired, dist_year
    )
    outputs["orcid_distribution.csv"] = emit_csv(
        os.path.join(out_dir, "orcid_distribution.csv"),
        ["publisher_id", "year", "rank", "assertion_volume", "papers",
         "share_0", "share_1", "share_2plus"],
        [
            [publisher, str(dist_year), str(rank), str(volume), str(papers),
             f"{s0:.6f}", f"{s1:.6f}", f"{s2:.6f}"]
            for publisher, rank, volume, papers, s0, s1, s2 in dist_rows
            if rank <= config.top_n
        ],
    )

    manifest = {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config.echo(),
        "ingest": {
            "publications": len(tables.publications),
            "crossref_assertions": len(tables.assertions),
            "orcid_profiles": len(tables.profiles),
            "researchers": len(tables.researchers),
            "rejected_lines": len(tables.rejects),
            "unresolvable_assertions": n_unresolvable,
        },
        "linkage": {
            "mentions": linked.n_mentions,
            "linked": linked.n_linked,
            "ambiguous": linked.n_ambiguous,
            "unified_rows": len(unified),
        },
        "repair": dataclasses.asdict(stats),
        "cohort_size": len(cohort),
        "outputs": dict(sorted(outputs.items())),
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    tmp = manifest_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, manifest_path)
    return manifest


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """Build the effective config: file first, then flag overrides."""
    if getattr(args, "config", None):
        config = load_config(args.config)
    else:
        config = PipelineConfig()
    for attr, key in (
        ("publications", "publications"),
        ("assertions", "crossref_assertions"),
        ("profiles", "orcid_profiles"),
        ("researchers", "researchers"),
        ("band_map", "band_map"),
    ):
        value = getattr(args, attr, None)
        if value:
            setattr(config, key, value)
    if getattr(args, "out", None):
        config.out_dir = args.out
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "keep_threshold", None) is not None:
        config.repair.keep_threshold = args.keep_threshold
    if getattr(args, "reassign_threshold", None) is not None:
        config.repair.reassign_threshold = args.reassign_threshold
    if getattr(args, "min_name_length", None) is not None:
        config.repair.min_name_length = args.min_name_length
    if getattr(args, "no_rescue", False):
        config.repair.rescue_enabled = False
    if getattr(args, "window", None):
        match = re.fullmatch(r"(\d{4}):(\d{4})", args.window)
        if not match:
            raise PipelineConfigError(
                f"--window must look like 2015:2019, got {args.window!r}"
            )
        config.cohort = dataclasses.replace(
            config.cohort,
            window_start=int(match.group(1)),
            window_end=int(match.group(2)),
        )
    if getattr(args, "min_history", None) is not None:
        config.cohort = dataclasses.replace(
            config.cohort, min_history_years=args.min_history
        )
    if getattr(args, "min_papers", None) is not None:
        config.cohort = dataclasses.replace(config.cohort, min_papers=args.min_papers)
    if getattr(args, "top_n", None) is not None:
        config.top_n = args.top_n
    if getattr(args, "workers", None) is not None:
        config.workers = args.workers
    if getattr(args, "debug_linkage", False):
        config.debug_linkage = True
    return config


def _load_sources(config: PipelineConfig) -> ingest.SourceTables:
    config.validate()
    return ingest.load_tables(
        config.publications,
        config.crossref_assertions,
        config.orcid_profiles,
        config.researchers,
    )


def cmd_ingest_check(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    tables = _load_sources(config)
    per_file: dict[str, int] = {}
    for file, _line, _reason in tables.rejects.rows:
        per_file[file] = per_file.get(file, 0) + 1
    for label, count in (
        ("publications", len(tables.publications)),
        ("crossref_assertions", len(tables.assertions)),
        ("orcid_profiles", len(tables.profiles)),
        ("researchers", len(tables.researchers)),
    ):
        print(f"{label}: {count} accepted")
    for file in sorted(per_file):
        print(f"{file}: {per_file[file]} rejected")
    if args.rejects:
        tables.rejects.write_csv(args.rejects)
        print(f"reject log written to {args.rejects}")
    return 0


def cmd_diagnose(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    tables = _load_sources(config)
    assertions, _dropped = ingest.filter_resolvable_assertions(
        tables.assertions, tables.publications
    )
    linked = linkage.link_crossref_authors(tables.publications, tables.researchers)
    flags = quality.flag_suspects(assertions, linked, tables.researchers)
    by_criterion: dict[str, int] = {}
    for flag in flags:
        for criterion in flag.criteria:
            by_criterion[criterion] = by_criterion.get(criterion, 0) + 1
    print(f"assertions: {len(assertions)}")
    print(f"flagged: {len(flags)}")
    for criterion in sorted(by_criterion):
        print(f"  {criterion}: {by_criterion[criterion]}")
    series = quality.estimate_shuffle_rate(assertions, linked, tables.publications)
    os.makedirs(config.out_dir, exist_ok=True)
    emit_csv(
        os.path.join(config.out_dir, "shuffle_rate.csv"),
        quality.SHUFFLE_RATE_HEADER,
        quality.shuffle_rate_rows(series),
    )
    print(f"shuffle_rate.csv written to {config.out_dir}")
    return 0


def cmd_repair(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    tables = _load_sources(config)
    assertions, _dropped = ingest.filter_resolvable_assertions(
        tables.assertions, tables.publications
    )
    linked = linkage.link_crossref_authors(tables.publications, tables.researchers)
    repaired, stats, applied = quality.run_repair(
        assertions,
        tables.publications,
        tables.profiles,
        linked,
        tables.researchers,
        config.repair,
    )
    os.makedirs(config.out_dir, exist_ok=True)
    emit_csv(
        os.path.join(config.out_dir, "repair_report.csv"),
        quality.REPAIR_REPORT_HEADER,
        quality.repair_report_rows(applied),
    )
    repaired_path = os.path.join(config.out_dir, "repaired_assertions.ndjson")
    with open(repaired_path, "w", encoding="utf-8") as fh:
        for a in sorted(repaired, key=lambda a: (a.doi, a.position)):
            fh.write(
                json.dumps(
                    {
                        "doi": a.doi,
                        "position": a.position,
                        "orcid": a.orcid,
                        "authenticated": a.authenticated,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )
    print(
        f"flagged={stats.flagged} kept={stats.kept} "
        f"reassigned={stats.reassigned} dropped={stats.dropped} "
        f"pct_removed={stats.pct_removed:.4f} pct_reassigned={stats.pct_reassigned:.4f}"
    )
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    run_pipeline(config)
    print(f"metrics written to {config.out_dir}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    manifest = run_pipeline(config)
    print(f"pipeline complete: {len(manifest['outputs'])} artifacts in {config.out_dir}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    config = synthworld.SynthConfig(
        seed=args.seed,
        n_researchers=args.n_researchers,
        n_papers=args.n_papers,
        authors_min=args.authors_min,
        authors_max=args.authors_max,
        authors_mean=args.authors_mean,
        year_start=args.year_start,
        year_end=args.year_end,
        orcid_ownership_rate=args.ownership_rate,
        shuffle_rate=args.shuffle_rate,
        sync_probability=args.sync_probability,
        married_name_rate=args.married_rate,
        short_name_rate=args.short_rate,
        transliteration_rate=args.translit_rate,
        registry_coverage=args.coverage,
        name_style=args.name_style,
    )
    world, _paths = synthworld.generate_world(
        config, args.out, emit_truth=not args.no_truth
    )
    print(
        f"world written to {args.out}: "
        f"{len(world.publications)} publications, "
        f"{len(world.assertions)} assertions, "
        f"{len(world.profiles)} profiles, "
        f"{len(world.researchers)} researchers, "
        f"{len(world.truth.shuffles)} injected shuffles"
    )
    return 0


_VERDICT_RE = re.compile(r"REASSIGN\((\d+)\)")


def read_repair_report(path: str) -> dict[tuple[str, int], quality.RepairOutcome]:
    """Parse repair_report.csv back into outcome objects (for scoring)."""
    outcomes: dict[tuple[str, int], quality.RepairOutcome] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = set(quality.REPAIR_REPORT_HEADER)
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise PipelineConfigError(
                f"{path} does not look like a repair report "
                f"(columns {reader.fieldnames})"
            )
        for row in reader:
            verdict = row["verdict"]
            new_position: int | None = None
            match = _VERDICT_RE.fullmatch(verdict)
            if match:
                verdict = quality.VERDICT_REASSIGN
                new_position = int(match.group(1))
            key = (row["doi"], int(row["position"]))
            outcomes[key] = quality.RepairOutcome(
                doi=row["doi"],
                position=int(row["position"]),
                orcid=row["orcid"],
                criteria=frozenset(c for c in row["criteria"].split("|") if c),
                verdict=verdict,
                new_position=new_position,
                best_score=float(row["score"]) if row["score"] else None,
                reason=row["reason"],
            )
    return outcomes


def cmd_score(args: argparse.Namespace) -> int:
    truth = synthworld.read_truth(args.truth)
    outcomes = read_repair_report(args.report)
    report = synthworld.score_repair(truth, outcomes)
    payload = json.dumps(report.to_json(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def _add_input_flags(parser: argparse.ArgumentParser, band_map: bool = False) -> None:
    parser.add_argument("--config", help="TOML pipeline configuration")
    parser.add_argument("--publications", help="publications.ndjson path")
    parser.add_argument("--assertions", help="crossref_assertions.ndjson path")
    parser.add_argument("--profiles", help="orcid_profiles.ndjson path")
    parser.add_argument("--researchers", help="researchers.ndjson path")
    if band_map:
        parser.add_argument("--band-map", dest="band_map", help="country,band CSV")


def _add_quality_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--keep-threshold", type=float, dest="keep_threshold")
    parser.add_argument("--reassign-threshold", type=float, dest="reassign_threshold")
    parser.add_argument("--min-name-length", type=int, dest="min_name_length")
    parser.add_argument("--no-rescue", action="store_true", dest="no_rescue")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orcidrec",
        description="Reconcile, repair, and measure ORCID-to-author assertions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="parse inputs and report accounting")
    _add_input_flags(p)
    p.add_argument("--rejects", help="write the reject log CSV here")
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("diagnose", help="flag suspects and estimate shuffle rate")
    _add_input_flags(p)
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("repair", help="apply the repair and write the report")
    _add_input_flags(p)
    _add_quality_flags(p)
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("metrics", help="run the chain and write indicator CSVs")
    _add_input_flags(p, band_map=True)
    _add_quality_flags(p)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--window", help="cohort window, e.g. 2015:2019")
    p.add_argument("--min-history", type=int, dest="min_history")
    p.add_argument("--min-papers", type=int, dest="min_papers")
    p.add_argument("--top-n", type=int, dest="top_n")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="generate a synthetic world")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n-researchers", type=int, default=600)
    p.add_argument("--n-papers", type=int, default=5000)
    p.add_argument("--authors-min", type=int, default=2)
    p.add_argument("--authors-max", type=int, default=8)
    p.add_argument("--authors-mean", type=float, default=4.5)
    p.add_argument("--year-start", type=int, default=2008)
    p.add_argument("--year-end", type=int, default=2020)
    p.add_argument("--ownership-rate", type=float, default=0.55)
    p.add_argument("--shuffle-rate", type=float, default=0.0)
    p.add_argument("--sync-probability", type=float, default=0.8)
    p.add_argument("--married-rate", type=float, default=0.0)
    p.add_argument("--short-rate", type=float, default=0.0)
    p.add_argument("--translit-rate", type=float, default=0.0)
    p.add_argument("--coverage", type=float, default=1.0)
    p.add_argument("--name-style", choices=["distinct", "realistic"], default="distinct")
    p.add_argument("--no-truth", action="store_true", help="skip truth.ndjson")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("score", help="score a repair report against ground truth")
    p.add_argument("--truth", required=True, help="truth.ndjson from synth")
    p.add_argument("--report", required=True, help="repair_report.csv")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run", help="full pipeline")
    p.add_argument("--config", required=True, help="TOML pipeline configuration")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="recorded in the manifest config echo")
    _add_quality_flags(p)
    p.add_argument("--window", help="cohort window, e.g. 2015:2019")
    p.add_argument("--min-history", type=int, dest="min_history")
    p.add_argument("--min-papers", type=int, dest="min_papers")
    p.add_argument("--top-n", type=int, dest="top_n")
    p.add_argument("--workers", type=int, help="worker count (advisory)")
    p.add_argument("--debug-linkage", action="store_true", dest="debug_linkage")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PipelineConfigError, synthworld.SynthConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
