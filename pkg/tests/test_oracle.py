import csv
import math
from pathlib import Path

import numpy as np
import pytest

from _stats import within
from rumour.analytics import exact_reach_prob
from rumour.distributions import FiniteTable, Geometric, PowerLaw, TableSchedule
from rumour.oracle import (
    GOLDEN_COLUMNS,
    TruncatedSchedule,
    brute_force_firework_reach,
    brute_force_reverse_reach,
    firework_activated,
    golden_rows,
    reverse_activated,
    truncate_schedule,
)
from rumour.processes import VertexLayout, firework_batch, reverse_batch

GOLDEN = Path(__file__).parent / "golden" / "oracle_golden.csv"
IDENTITY = VertexLayout.identity()


def _uniform(table, n=13):
    return TruncatedSchedule.from_tables([table] * n)


def test_firework_examples():
    assert brute_force_firework_reach(_uniform({0: 0.5, 1: 0.5}), IDENTITY, 3) == (0.125, 0.125)
    for n in (1, 5, 12):
        assert brute_force_firework_reach(_uniform({1: 1.0}), IDENTITY, n) == (1.0, 1.0)


def test_firework_half_two_example_recomputed():
    # four outcomes of (R_0, R_1): only R_0 = 2 reaches vertex 2
    lo, hi = brute_force_firework_reach(_uniform({0: 0.5, 2: 0.5}), IDENTITY, 2)
    assert lo == hi == 0.5


def test_reverse_examples():
    half = _uniform({0: 0.5, 1: 0.5})
    assert brute_force_reverse_reach(half, 1) == (0.5, 0.5)
    assert brute_force_reverse_reach(half, 2) == (0.25, 0.25)
    assert brute_force_reverse_reach(_uniform({0: 1.0}), 1) == (0.0, 0.0)


def test_reach_index_zero_is_certain():
    assert brute_force_firework_reach(_uniform({0: 1.0}), IDENTITY, 0) == (1.0, 1.0)
    assert brute_force_reverse_reach(_uniform({0: 1.0}), 0) == (1.0, 1.0)


def test_budget_rejected_with_requirement():
    ts = truncate_schedule(PowerLaw(2.0), 8, tol=1e-3)
    with pytest.raises(ValueError, match="assignments"):
        brute_force_firework_reach(ts, IDENTITY, 7)
    with pytest.raises(ValueError, match="assignments"):
        brute_force_reverse_reach(ts, 7)
    with pytest.raises(ValueError):
        brute_force_firework_reach(ts, IDENTITY, 13)


def test_truncation_reports_mass():
    ts = truncate_schedule(Geometric(0.5), 4)
    for supp, probs, t in zip(ts.supports, ts.probs, ts.truncated):
        assert 0 < t < 1e-6
        assert math.fsum(probs) + t == pytest.approx(1.0, abs=1e-15)
    lo, hi = brute_force_firework_reach(ts, IDENTITY, 3)
    assert hi - lo == pytest.approx(1 - math.prod(1 - t for t in ts.truncated[:3]))


def test_truncation_brackets_true_value():
    # with radii capped at n the lumped instance is exact; tolerance truncation must bracket it
    for law in (Geometric(0.5), PowerLaw(2.0)):
        exact, _ = brute_force_firework_reach(truncate_schedule(law, 4, cap=4), IDENTITY, 3)
        lo, hi = brute_force_firework_reach(truncate_schedule(law, 4, tol=1e-2), IDENTITY, 3)
        assert lo <= exact <= hi
        exact_r, _ = brute_force_reverse_reach(truncate_schedule(law, 4, cap=4), 3)
        lo, hi = brute_force_reverse_reach(truncate_schedule(law, 4, tol=1e-2), 3)
        assert lo <= exact_r <= hi


def test_truncated_schedule_invariant():
    with pytest.raises(ValueError):
        TruncatedSchedule(((0, 1),), ((0.5, 0.4),), (0.0,))
    with pytest.raises(ValueError):
        TruncatedSchedule(((0, 1),), ((0.5,),), (0.5,))
    TruncatedSchedule(((0, 1),), ((0.5, 0.4),), (0.1,))


def test_oracle_equals_exact_product_for_unit_radii():
    for p in (0.1, 0.5, 0.77):
        ts = _uniform({0: 1 - p, 1: p})
        for n in range(1, 11):
            lo, hi = brute_force_firework_reach(ts, IDENTITY, n)
            assert lo == hi
            assert lo == pytest.approx(exact_reach_prob(FiniteTable({0: 1 - p, 1: p}), 1, n), abs=1e-10)


def test_arithmetic_layout_oracle():
    table = {0: 0.3, 1: 0.3, 3: 0.4}
    ts = _uniform(table, 8)
    law = FiniteTable(table)
    for n in range(1, 6):
        lo, _ = brute_force_firework_reach(ts, VertexLayout.arithmetic(2), n)
        assert lo == pytest.approx(exact_reach_prob(law, 2, n), abs=1e-10)


def test_enumeration_order_invariance():
    rng = np.random.default_rng(5)
    for _ in range(5):
        tables = []
        for _ in range(7):
            w = rng.random(4) + 0.1
            tables.append({k: float(x) for k, x in enumerate(w / w.sum())})
        ts = TruncatedSchedule.from_tables(tables)
        # reversed support order walks the odometer backwards
        rev = TruncatedSchedule(tuple(s[::-1] for s in ts.supports), tuple(p[::-1] for p in ts.probs),
                                ts.truncated)
        for n in range(1, 7):
            a = brute_force_firework_reach(ts, IDENTITY, n)
            b = brute_force_firework_reach(rev, IDENTITY, n)
            assert abs(a[0] - b[0]) <= 1e-12
            a = brute_force_reverse_reach(ts, n)
            b = brute_force_reverse_reach(rev, n)
            assert abs(a[0] - b[0]) <= 1e-12


def test_set_dynamics_helpers():
    assert firework_activated([0, 1, 2, 3], [2, 0, 1]) == {0, 1, 2, 3}
    assert firework_activated([0, 1, 2, 3], [1, 0, 1]) == {0, 1}
    assert firework_activated([0, 2, 3], [1, 5]) == {0}
    assert reverse_activated([0, 0, 2, 1, 0]) == {0, 2, 3}


def test_golden_file_matches_enumeration():
    with GOLDEN.open() as fh:
        reader = csv.DictReader(fh)
        assert tuple(reader.fieldnames) == GOLDEN_COLUMNS
        stored = list(reader)
    fresh = golden_rows()
    assert [{k: str(v) for k, v in r.items()} for r in fresh] == stored


def test_golden_half_rows_are_powers_of_two():
    with GOLDEN.open() as fh:
        rows = [r for r in csv.DictReader(fh) if r["instance_id"] == "half01"]
    for r in rows:
        assert float(r["lo"]) == float(r["hi"]) == 2.0 ** -int(r["n"])


def test_monte_carlo_inside_golden_intervals():
    with GOLDEN.open() as fh:
        rows = list(csv.DictReader(fh))
    laws = {"half01": FiniteTable({0: 0.5, 1: 0.5}), "half02": FiniteTable({0: 0.5, 2: 0.5}),
            "third012": FiniteTable({0: 1 / 3, 1: 1 / 3, 2: 1 / 3}), "geom05_trunc": Geometric(0.5),
            "pow2_lumped": PowerLaw(2.0), "pow2_trunc": PowerLaw(2.0)}
    trials = 20_000
    for i, r in enumerate(rows):
        law, n = laws[r["instance_id"]], int(r["n"])
        if r["process"] == "firework":
            p_hat = firework_batch(IDENTITY, law, n, 100 + i, 0, trials).survived.mean()
        else:
            p_hat = reverse_batch(law, n, None, 100 + i, 0, trials).survived.mean()
        assert within(p_hat, float(r["lo"]), float(r["hi"]), trials), r


def test_heterogeneous_table_schedule_matches_simulator():
    tables = [{0: 0.2, 1: 0.3, 3: 0.5}, {0: 0.6, 2: 0.4}, {1: 0.5, 0: 0.5}, {0: 0.1, 3: 0.9},
              {0: 0.5, 1: 0.5}]
    ts = TruncatedSchedule.from_tables(tables)
    sched = TableSchedule([FiniteTable(t) for t in tables])
    for n in range(1, 5):
        lo, _ = brute_force_firework_reach(ts, IDENTITY, n)
        p_hat = firework_batch(IDENTITY, sched, n, 3, 0, 50_000).survived.mean()
        assert within(p_hat, lo, lo, 50_000)
        lo, _ = brute_force_reverse_reach(ts, n)
        p_hat = reverse_batch(sched, n, None, 3, 0, 50_000).survived.mean()
        assert within(p_hat, lo, lo, 50_000)
