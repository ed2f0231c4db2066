import json

from gwtrees.suites import (
    SUITES,
    run_checkmap,
    run_follower,
    run_otter_dwass,
    run_universality,
    snap_admissible,
)
from gwtrees.degree_sets import DegreeSet
from gwtrees.offspring import binary_dist, geometric_dist


def test_suite_registry_names():
    assert set(SUITES) == {
        "otter-dwass",
        "checkmap",
        "hat-law",
        "mb-equivalence",
        "follower",
        "root-limit",
        "universality",
    }


def test_otter_dwass_small():
    result = run_otter_dwass(max_n=12, enum_n=4)
    assert result.ok(), [c.name for c in result.checks if not c.passed]


def test_checkmap_small():
    result = run_checkmap(max_vertices=7)
    assert result.ok()


def test_follower_small():
    result = run_follower(max_n=8)
    assert result.ok()


def test_snap_admissible_parity():
    assert snap_admissible(binary_dist(), DegreeSet.all_degrees(), 2000) == 2001
    assert snap_admissible(binary_dist(), DegreeSet.all_degrees(), 51) == 51
    assert snap_admissible(binary_dist(), DegreeSet.of(0), 50) == 50
    assert snap_admissible(geometric_dist(), DegreeSet.all_degrees(), 50) == 50


def test_suite_result_serialises():
    result = run_checkmap(max_vertices=5)
    blob = result.to_json()
    parsed = json.loads(blob)
    assert parsed["suite"] == "checkmap"
    assert parsed["ok"] is True
    assert all("name" in c and "pass" in c for c in parsed["checks"])


def test_universality_thread_counts_agree():
    # per-arm streams make the outcome independent of the thread count
    a = run_universality(seed=3, n=30, samples=80, threads=1)
    b = run_universality(seed=3, n=30, samples=80, threads=3)
    assert a.report.to_json() == b.report.to_json()
