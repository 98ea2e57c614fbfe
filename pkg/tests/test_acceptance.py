"""Acceptance gate: one test per headline criterion.

Each test prints a single [PASS]/[FAIL] line (outside pytest's capture,
so it lands in the live log) and then asserts; on failure the same text
repeats in the assertion message.
"""

from __future__ import annotations

import json
import random
import shutil
import subprocess
import sys
import textwrap
import time
from fractions import Fraction

import pytest

from orcidrec.cli import main, read_repair_report
from orcidrec.ingest import validate_orcid_checksum
from orcidrec.linkage import link_crossref_authors
from orcidrec.quality import (
    RepairConfig,
    estimate_shuffle_rate,
    levenshtein_ratio,
    run_repair,
)
from orcidrec.synthworld import (
    CLASS_NONE,
    PERTURBATION_CLASSES,
    SynthConfig,
    build_world,
    score_repair,
)

from . import oracles
from .metrics_equivalence import check_seed


_CAPSYS: pytest.CaptureFixture | None = None


@pytest.fixture(autouse=True)
def _verdict_stream(capsys):
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


def _report(name: str, ok: bool, detail: str) -> None:
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] {name}: {detail}"
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print(line, file=sys.stderr, flush=True)
    else:
        print(line, file=sys.stderr, flush=True)
    assert ok, f"{name}: {detail}"


def _repair_world(config: SynthConfig, repair_config: RepairConfig | None = None):
    world = build_world(config)
    linked = link_crossref_authors(world.publications, world.researchers)
    repaired, stats, applied = run_repair(
        world.assertions, world.publications, world.profiles, linked,
        world.researchers, repair_config,
    )
    return world, linked, repaired, stats, applied


EASY = SynthConfig(
    seed=42, n_researchers=600, n_papers=5000,
    shuffle_rate=0.02, registry_coverage=1.0, name_style="distinct",
)


def test_easy_regime_exact_repair():
    started = time.perf_counter()
    world, _, _, stats, applied = _repair_world(EASY)
    report = score_repair(world.truth, applied)
    elapsed = time.perf_counter() - started
    ok = (
        report.precision == 1.0
        and report.recall == 1.0
        and report.n_injected > 0
        and elapsed < 30.0
    )
    _report(
        "shuffle repair, easy regime",
        ok,
        f"precision={report.precision:.4f} recall={report.recall:.4f} "
        f"injected={report.n_injected} reassigned={stats.reassigned} "
        f"runtime={elapsed:.1f}s (< 30 s)",
    )


def test_hard_regime_recall_and_rescue():
    hard = SynthConfig(
        seed=42, n_researchers=600, n_papers=5000,
        shuffle_rate=0.02, registry_coverage=1.0, name_style="distinct",
        married_name_rate=0.05, short_name_rate=0.05, transliteration_rate=0.05,
    )
    world, _, _, stats, applied = _repair_world(hard)
    report = score_repair(world.truth, applied)

    clean = report.by_class[CLASS_NONE]
    perturbed = [
        report.by_class[name]
        for name in PERTURBATION_CLASSES
        if name != CLASS_NONE and report.by_class[name].n_scored > 0
    ]
    degraded = all(c.reassign_recall < clean.reassign_recall for c in perturbed)

    _, _, _, stats_no_rescue, _ = _repair_world(
        hard, RepairConfig(rescue_enabled=False)
    )
    rescue_helps = stats.dropped < stats_no_rescue.dropped

    ok = (
        clean.n_scored > 0
        and clean.recall >= 0.90
        and len(perturbed) == 3
        and degraded
        and rescue_helps
    )
    per_class = " ".join(
        f"{name}={report.by_class[name].reassign_recall:.2f}"
        for name in PERTURBATION_CLASSES
    )
    _report(
        "shuffle repair, hard regime",
        ok,
        f"clean-class recall={clean.recall:.4f} (>= 0.90), reassign-recall "
        f"by class [{per_class}], drops {stats.dropped} with rescue vs "
        f"{stats_no_rescue.dropped} without",
    )


def _estimator_figures(coverage: float):
    config = SynthConfig(
        seed=1234, n_researchers=2000, n_papers=5000,
        shuffle_rate=0.02, registry_coverage=coverage, name_style="realistic",
    )
    world = build_world(config)
    linked = link_crossref_authors(world.publications, world.researchers)
    series = estimate_shuffle_rate(world.assertions, linked, world.publications)
    estimate = sum(p.flagged for p in series) / sum(p.total for p in series)
    realized = len(world.truth.shuffles) / len(world.assertions)
    owner_of = {orcid: rid for rid, orcid in world.truth.ownership.items()}
    detectable = 0
    for ev in world.truth.shuffles:
        owner = owner_of[ev.orcid]
        wrong = world.truth.authorship[(ev.doi, ev.to_position)]
        if owner in world.truth.covered and wrong in world.truth.covered:
            detectable += 1
    detectable_rate = detectable / len(world.assertions)
    return estimate, realized, detectable_rate


def test_shuffle_rate_estimator():
    est_partial, _, detectable = _estimator_figures(coverage=0.7)
    est_full, realized, _ = _estimator_figures(coverage=1.0)
    relative_error = abs(est_full - realized) / realized
    ok = (
        est_partial <= 0.02
        and est_partial >= 0.6 * detectable
        and relative_error <= 0.10
    )
    _report(
        "shuffle-rate estimator",
        ok,
        f"coverage 0.7: estimate={est_partial:.5f} (<= 0.02, "
        f">= 0.6 x detectable {detectable:.5f}); coverage 1.0: "
        f"estimate={est_full:.5f} vs injected {realized:.5f} "
        f"({100 * relative_error:.1f}% off, within 10%)",
    )


def test_metric_oracle_equivalence():
    comparisons = 0
    for seed in range(20):
        comparisons += check_seed(seed)
    _report(
        "metric oracle equivalence",
        comparisons > 10_000,
        f"20 seeds, {comparisons} count/ratio comparisons, all equal "
        f"(counts exact, ratios to 1e-12)",
    )


def test_levenshtein_matches_dp_oracle():
    rng = random.Random(987654321)
    alphabet = "abcdefghijklmnopqrstuvwxyz -.'"
    mismatches = 0
    for _ in range(10_000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        if levenshtein_ratio(a, b) != oracles.ratio_oracle(a, b):
            mismatches += 1
    kitten = levenshtein_ratio("kitten", "sitting")
    ok = mismatches == 0 and kitten == float(Fraction(8, 13))
    _report(
        "levenshtein ratio vs quadratic DP oracle",
        ok,
        f"10000 random pairs (lengths 0-30), {mismatches} mismatches; "
        f"ratio('kitten','sitting')={kitten:.6f} == 8/13",
    )


def test_full_run_deterministic(tmp_path):
    world_dir = tmp_path / "world"
    code = main([
        "synth", "--out", str(world_dir), "--seed", "202",
        "--n-researchers", "300", "--n-papers", "1500",
        "--shuffle-rate", "0.02", "--coverage", "0.9", "--no-truth",
    ])
    assert code == 0
    config_path = tmp_path / "pipeline.toml"
    config_path.write_text(
        f"""
[inputs]
publications = "{world_dir}/publications.ndjson"
crossref_assertions = "{world_dir}/crossref_assertions.ndjson"
orcid_profiles = "{world_dir}/orcid_profiles.ndjson"
researchers = "{world_dir}/researchers.ndjson"
band_map = "{world_dir}/bands.csv"
"""
    )
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(config_path), "--out", str(out_a)]) == 0
    assert main(["run", "--config", str(config_path), "--out", str(out_b)]) == 0

    names_a = sorted(p.name for p in out_a.iterdir())
    names_b = sorted(p.name for p in out_b.iterdir())
    identical = names_a == names_b
    compared = 0
    for name in names_a:
        if not identical:
            break
        if name == "manifest.json":
            ma = json.loads((out_a / name).read_text())
            mb = json.loads((out_b / name).read_text())
            ma.pop("generated_at"), mb.pop("generated_at")
            identical = ma == mb
        else:
            identical = (out_a / name).read_bytes() == (out_b / name).read_bytes()
        compared += 1
    _report(
        "determinism of full run",
        identical and compared >= 13,
        f"{compared} artifacts byte-identical across two runs "
        f"(manifest timestamp excluded)",
    )


_MEASURE_SCRIPT = textwrap.dedent(
    """
    import json, resource, sys, time
    from orcidrec.ingest import load_tables, filter_resolvable_assertions
    from orcidrec.linkage import link_crossref_authors
    from orcidrec.quality import run_repair

    world = sys.argv[1]
    t0 = time.perf_counter()
    tables = load_tables(
        f"{world}/publications.ndjson",
        f"{world}/crossref_assertions.ndjson",
        f"{world}/orcid_profiles.ndjson",
        f"{world}/researchers.ndjson",
    )
    kept, _ = filter_resolvable_assertions(tables.assertions, tables.publications)
    linked = link_crossref_authors(tables.publications, tables.researchers)
    repaired, stats, _ = run_repair(
        kept, tables.publications, tables.profiles, linked, tables.researchers
    )
    elapsed = time.perf_counter() - t0
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    print(json.dumps({
        "assertions": len(kept),
        "repaired": len(repaired),
        "flagged": stats.flagged,
        "seconds": elapsed,
        "peak_mb": peak_mb,
    }))
    """
)


def test_throughput_million_assertions(tmp_path_factory):
    world_dir = tmp_path_factory.mktemp("big") / "world"
    generate = subprocess.run(
        [
            sys.executable, "-m", "orcidrec", "synth",
            "--out", str(world_dir), "--seed", "99",
            "--n-researchers", "120000", "--n-papers", "450000",
            "--authors-mean", "4.5", "--ownership-rate", "0.55",
            "--shuffle-rate", "0.02", "--coverage", "1.0",
            "--name-style", "realistic", "--no-truth",
        ],
        capture_output=True, text=True, timeout=300,
    )
    assert generate.returncode == 0, generate.stderr

    measure = subprocess.run(
        [sys.executable, "-c", _MEASURE_SCRIPT, str(world_dir)],
        capture_output=True, text=True, timeout=590,
    )
    shutil.rmtree(world_dir, ignore_errors=True)
    assert measure.returncode == 0, measure.stderr
    figures = json.loads(measure.stdout)

    ok = (
        figures["assertions"] >= 1_000_000
        and figures["seconds"] < 120.0
        and figures["peak_mb"] < 4096.0
    )
    _report(
        "throughput, 1M-assertion corpus",
        ok,
        f"{figures['assertions']} assertions: ingest+link+repair in "
        f"{figures['seconds']:.1f}s (< 120 s), peak RSS "
        f"{figures['peak_mb']:.0f} MB (< 4096 MB)",
    )


def test_orcid_checksum_acceptance():
    canonical = "0000-0002-6151-8423"
    accepted = validate_orcid_checksum(canonical)
    digits_only = canonical.replace("-", "")
    rejected = 0
    candidates = 0
    for i in range(15):  # every base-digit position; check char stays put
        for replacement in "0123456789":
            if replacement == digits_only[i]:
                continue
            mutated_digits = digits_only[:i] + replacement + digits_only[i + 1 :]
            mutated = "-".join(
                mutated_digits[j : j + 4] for j in range(0, 16, 4)
            )
            candidates += 1
            if not validate_orcid_checksum(mutated):
                rejected += 1
    ok = accepted and rejected == candidates == 135
    _report(
        "ORCID checksum validator",
        ok,
        f"accepts {canonical}; rejects {rejected}/{candidates} "
        f"single-digit mutations (15 positions x 9 substitutions)",
    )
