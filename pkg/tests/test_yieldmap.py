"""Wafer layout, Poisson defect analytics, spatial statistics, rendering."""

import numpy as np
import pytest

from trapqa.yieldmap import (
    DEFAULT_LAYOUT,
    WaferLayout,
    edge_concentration,
    infer_defects,
    layout_wafer,
    render_csv,
    render_svg,
    reticle_periodicity,
    synthesize_outcomes,
    yield_from_defects,
    yield_stats,
)


@pytest.fixture(scope="module")
def sites():
    return layout_wafer()


def test_layout_chip_count(sites):
    assert len(sites) == 477


def test_layout_excludes_test_cells(sites):
    cells = {s.cell for s in sites}
    for tc in DEFAULT_LAYOUT.test_cells:
        assert tc not in cells
    assert len(cells) == 7


def test_layout_sites_inside_usable_radius(sites):
    r = DEFAULT_LAYOUT.usable_radius
    for s in sites:
        assert np.hypot(s.x, s.y) <= r + 1e-12


def test_layout_ids_unique_and_ordered(sites):
    ids = [s.chip_id for s in sites]
    assert len(set(ids)) == len(ids)
    assert ids == sorted(ids)
    assert ids[0] == "C001"


def test_poisson_defect_numbers():
    est = infer_defects(258 / 477, 477)
    assert est.total_defects == pytest.approx(293.15, abs=0.1)
    assert est.per_step == pytest.approx(2.82, abs=0.01)


def test_defect_yield_roundtrip():
    y = 258 / 477
    est = infer_defects(y, 477)
    assert yield_from_defects(est.total_defects, 477) == pytest.approx(y, rel=1e-12)


def test_yield_stats_counts(sites):
    outcomes = {s.chip_id: "PASS" for s in sites}
    outcomes[sites[0].chip_id] = "LEAK_DC_DC"
    outcomes[sites[1].chip_id] = "LEAK_DC_DC"
    outcomes[sites[2].chip_id] = "CONTINUITY_FAIL"
    stats = yield_stats(outcomes)
    assert stats.total == 477
    assert stats.passed == 474
    assert stats.yield_fraction == pytest.approx(474 / 477)
    counts = dict(stats.code_counts)
    assert counts["LEAK_DC_DC"] == 2
    assert counts["CONTINUITY_FAIL"] == 1


def test_planted_cell_is_flagged(sites, rng):
    outcomes = synthesize_outcomes(
        sites,
        rng,
        base_rates={"LEAK_DC_DC": 0.05},
        cell_boost=((1, 1), "LEAK_DC_DC", 0.9),
    )
    cells = reticle_periodicity(sites, outcomes)
    flagged = [c.cell for c in cells if c.flagged]
    assert flagged == [(1, 1)]


def test_uniform_null_not_flagged(sites, rng):
    outcomes = synthesize_outcomes(sites, rng, base_rates={"LEAK_DC_DC": 0.2})
    cells = reticle_periodicity(sites, outcomes)
    assert not any(c.flagged for c in cells)


def test_cell_stats_pool_correctly(sites):
    # all failures in one cell, every other cell clean
    target = (0, 1)
    outcomes = {
        s.chip_id: ("CONTINUITY_FAIL" if s.cell == target else "PASS") for s in sites
    }
    cells = reticle_periodicity(sites, outcomes)
    by_cell = {c.cell: c for c in cells}
    assert by_cell[target].flagged
    assert by_cell[target].p_value < 1e-20
    for cell, c in by_cell.items():
        if cell != target:
            assert not c.flagged


def test_planted_edge_is_flagged(sites, rng):
    outcomes = synthesize_outcomes(
        sites,
        rng,
        base_rates={"LEAK_DC_GND": 0.05},
        edge_boost=("LEAK_DC_GND", 0.6, 0.2),
    )
    edge = edge_concentration(sites, outcomes)
    assert edge.flagged
    assert edge.z > 2.33


def test_edge_null_not_flagged(sites, rng):
    outcomes = synthesize_outcomes(sites, rng, base_rates={"LEAK_DC_GND": 0.2})
    edge = edge_concentration(sites, outcomes)
    assert not edge.flagged


def test_synthesize_is_deterministic(sites):
    a = synthesize_outcomes(
        sites, np.random.Generator(np.random.Philox(key=5)), base_rates={"LEAK_DC_DC": 0.3}
    )
    b = synthesize_outcomes(
        sites, np.random.Generator(np.random.Philox(key=5)), base_rates={"LEAK_DC_DC": 0.3}
    )
    assert a == b


def test_render_csv_shape(sites):
    outcomes = {s.chip_id: "PASS" for s in sites}
    text = render_csv(sites, outcomes)
    lines = text.strip().split("\n")
    assert len(lines) == 478  # header + sites
    assert lines[0].startswith("chip_id,")
    assert lines[1].startswith("C001,")


def test_render_svg_is_deterministic(sites, rng):
    outcomes = synthesize_outcomes(sites, rng, base_rates={"LEAK_DC_DC": 0.3})
    a = render_svg(sites, outcomes)
    b = render_svg(sites, outcomes)
    assert a == b
    assert a.startswith("<svg")
    # every chip appears, and outcomes are machine-readable
    assert a.count("data-chip=") == 477
    assert 'data-outcome="LEAK_DC_DC"' in a


def test_render_svg_marks_flagged_cells(sites):
    outcomes = {
        s.chip_id: ("CONTINUITY_FAIL" if s.cell == (1, 1) else "PASS") for s in sites
    }
    svg = render_svg(sites, outcomes, flagged_cells=[(1, 1)])
    assert "flagged" in svg


def test_custom_layout_chip_count_scales():
    # a coarser pitch on the same wafer fits fewer chips
    coarse = WaferLayout(
        wafer_diameter=0.2,
        chip_pitch=9e-3,
        edge_exclusion=3.25e-3,
        test_cells=((0, 0), (2, 2)),
    )
    assert 0 < len(layout_wafer(coarse)) < 477
