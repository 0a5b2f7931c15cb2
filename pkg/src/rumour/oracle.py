"""Exact enumeration of small instances.

Radius assignments are enumerated with a mixed-radix odometer and the
processes are evaluated straight from their set-based definitions, with no
code shared with the simulators. Infinite supports are truncated and the
discarded probability is returned as the width of an interval ``[lo, hi]``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import DistributionSchedule, FiniteTable, as_schedule
from .processes import VertexLayout

BUDGET = 10**7
TRUNCATION_TOL = 1e-6


@dataclass(frozen=True)
class TruncatedSchedule:
    """Per-index finite supports; ``truncated[i]`` is the mass dropped at index i."""

    supports: tuple[tuple[int, ...], ...]
    probs: tuple[tuple[float, ...], ...]
    truncated: tuple[float, ...]

    def __post_init__(self):
        for i, (s, p, t) in enumerate(zip(self.supports, self.probs, self.truncated)):
            if len(s) != len(p) or not s:
                raise ValueError(f"index {i}: support and probabilities must be nonempty and aligned")
            if abs(math.fsum(p) - (1.0 - t)) > 1e-9:
                raise ValueError(f"index {i}: probabilities sum to {math.fsum(p)}, expected {1 - t}")

    def __len__(self) -> int:
        return len(self.supports)

    @classmethod
    def from_tables(cls, tables: Sequence[dict]) -> "TruncatedSchedule":
        supports, probs = [], []
        for tab in tables:
            items = sorted((int(k), float(v)) for k, v in tab.items() if float(v) > 0)
            supports.append(tuple(k for k, _ in items))
            probs.append(tuple(v for _, v in items))
        return cls(tuple(supports), tuple(probs), tuple(0.0 for _ in tables))

    def to_schedule(self) -> DistributionSchedule:
        """Finite-support schedule with the same laws (requires zero truncated mass)."""
        from .distributions import TableSchedule

        if any(t > 0 for t in self.truncated):
            raise ValueError("only untruncated instances convert to a schedule")
        laws = [FiniteTable(dict(zip(s, p))) for s, p in zip(self.supports, self.probs)]
        return TableSchedule(laws, label="oracle-table")

    @property
    def total_truncated(self) -> float:
        """Probability that some index falls in its truncated tail."""
        return 1.0 - math.prod(1.0 - t for t in self.truncated)


def truncate_schedule(schedule, n_indices: int, tol: float = TRUNCATION_TOL,
                      cap: int | None = None, max_support: int = 10**6) -> TruncatedSchedule:
    """Cut the laws of indices ``0..n_indices-1`` to finite supports.

    With ``cap`` the mass of ``R >= cap`` is lumped onto ``cap`` (exact for
    observables that cannot tell radii past ``cap`` apart); otherwise each
    support keeps values until the remaining tail drops below ``tol``.
    """
    schedule = as_schedule(schedule)
    supports, probs, truncated = [], [], []
    for i in range(n_indices):
        law = schedule.law(i)
        if cap is not None:
            ks = np.arange(cap)
            p = np.asarray(law.pmf(ks), dtype=np.float64)
            vals = list(ks[p > 0]) + [cap]
            ps = list(p[p > 0]) + [float(law.tail(cap))]
            keep = [(int(k), float(q)) for k, q in zip(vals, ps) if q > 0]
            t = 0.0
        else:
            kmax = 0
            while float(law.tail(kmax + 1)) >= tol:
                kmax += 1
                if kmax > max_support:
                    raise ValueError(f"index {i}: tail above {tol} beyond {max_support}")
            ks = np.arange(kmax + 1)
            p = np.asarray(law.pmf(ks), dtype=np.float64)
            keep = [(int(k), float(q)) for k, q in zip(ks, p) if q > 0]
            t = float(law.tail(kmax + 1))
        supports.append(tuple(k for k, _ in keep))
        probs.append(tuple(q for _, q in keep))
        truncated.append(t)
    # recompute the dropped mass from the kept probabilities so the invariant is exact
    truncated = [max(0.0, 1.0 - math.fsum(p)) if cap is None else 0.0 for p in probs]
    return TruncatedSchedule(tuple(supports), tuple(probs), tuple(truncated))


def _check_budget(sizes: Sequence[int], budget: int) -> None:
    total = math.prod(sizes)
    if total > budget:
        raise ValueError(f"enumeration needs {total} assignments, budget is {budget}")


def _odometer(sizes: Sequence[int]):
    digits = [0] * len(sizes)
    while True:
        yield digits
        pos = len(sizes) - 1
        while pos >= 0:
            digits[pos] += 1
            if digits[pos] < sizes[pos]:
                break
            digits[pos] = 0
            pos -= 1
        if pos < 0:
            return


def firework_activated(positions: Sequence[float], radii: Sequence[float]) -> set[int]:
    """Activated vertex indices, by generations, straight from the definition.

    ``radii`` covers the vertices that may explode; vertices without a radius
    (beyond the enumerated range) are activated but never explode.
    """
    n = len(positions)
    active = {0}
    generation = [0]
    while generation:
        nxt = []
        for j in generation:
            if j >= len(radii):
                continue
            for i in range(n):
                if i not in active and positions[j] < positions[i] <= positions[j] + radii[j]:
                    active.add(i)
                    nxt.append(i)
        generation = nxt
    return active


def reverse_activated(radii: Sequence[int]) -> set[int]:
    """Reverse closure on vertices ``0..len(radii)-1`` by synchronous generations."""
    n = len(radii)
    active = {0}
    while True:
        new = {k for k in range(1, n) if k not in active
               and any(v in active for v in range(k - radii[k], k) if v >= 0)}
        if not new:
            return active
        active |= new


def _interval(hits: list[float], ts: TruncatedSchedule, used: int) -> tuple[float, float]:
    lo = math.fsum(hits)
    dropped = 1.0 - math.prod(1.0 - t for t in ts.truncated[:used])
    return lo, min(1.0, lo + dropped)


def brute_force_firework_reach(ts: TruncatedSchedule, layout: VertexLayout, n: int,
                               budget: int = BUDGET) -> tuple[float, float]:
    """Bracket ``P(u_n is activated)`` by enumerating radii of vertices ``0..n-1``."""
    if not 0 <= n <= 12:
        raise ValueError("n must lie in 0..12")
    if n == 0:
        return 1.0, 1.0
    if len(ts) < n:
        raise ValueError(f"truncated schedule covers {len(ts)} indices, need {n}")
    positions = [float(x) for x in layout.positions(n)]
    sizes = [len(ts.supports[i]) for i in range(n)]
    _check_budget(sizes, budget)
    hits = []
    for digits in _odometer(sizes):
        radii = [ts.supports[i][d] for i, d in enumerate(digits)]
        if n in firework_activated(positions, radii):
            hits.append(math.prod(ts.probs[i][d] for i, d in enumerate(digits)))
    return _interval(hits, ts, n)


def brute_force_reverse_reach(ts: TruncatedSchedule, n: int,
                              budget: int = BUDGET) -> tuple[float, float]:
    """Bracket ``P(vertex n is active)`` by enumerating radii of vertices ``1..n``.

    ``ts`` is indexed by vertex; index 0 is ignored.
    """
    if not 0 <= n <= 12:
        raise ValueError("n must lie in 0..12")
    if n == 0:
        return 1.0, 1.0
    if len(ts) < n + 1:
        raise ValueError(f"truncated schedule covers {len(ts)} indices, need {n + 1}")
    sizes = [len(ts.supports[i]) for i in range(1, n + 1)]
    _check_budget(sizes, budget)
    sub = TruncatedSchedule(ts.supports[1:n + 1], ts.probs[1:n + 1], ts.truncated[1:n + 1])
    hits = []
    for digits in _odometer(sizes):
        radii = [0] + [sub.supports[i][d] for i, d in enumerate(digits)]
        if n in reverse_activated(radii):
            hits.append(math.prod(sub.probs[i][d] for i, d in enumerate(digits)))
    return _interval(hits, sub, n)


# ---------------------------------------------------------------------------
# golden file

GOLDEN_COLUMNS = ("instance_id", "process", "n", "lo", "hi", "truncated_mass")


def golden_instances():
    """Small named instances ``(id, law, tol, cap, n_max)``.

    ``cap`` lumps the tail onto one atom (exact for reach of vertices up to
    ``cap``); ``tol`` truncation leaves a nonzero bracket.
    """
    from .distributions import Geometric, PowerLaw

    return [
        ("half01", FiniteTable({0: 0.5, 1: 0.5}), TRUNCATION_TOL, None, 8),
        ("half02", FiniteTable({0: 0.5, 2: 0.5}), TRUNCATION_TOL, None, 8),
        ("third012", FiniteTable({0: 1 / 3, 1: 1 / 3, 2: 1 / 3}), TRUNCATION_TOL, None, 6),
        ("geom05_trunc", Geometric(0.5), TRUNCATION_TOL, None, 4),
        ("pow2_lumped", PowerLaw(2.0), TRUNCATION_TOL, 6, 5),
        ("pow2_trunc", PowerLaw(2.0), 1e-2, None, 3),
    ]


def golden_rows() -> list[dict]:
    rows = []
    layout = VertexLayout.identity()
    for inst_id, law, tol, cap, n_max in golden_instances():
        ts = truncate_schedule(law, n_max + 1, tol=tol, cap=cap)
        for n in range(1, n_max + 1):
            for process in ("firework", "reverse"):
                if process == "firework":
                    lo, hi = brute_force_firework_reach(ts, layout, n)
                    mass = ts.truncated[:n]
                else:
                    lo, hi = brute_force_reverse_reach(ts, n)
                    mass = ts.truncated[1:n + 1]
                rows.append({
                    "instance_id": inst_id, "process": process, "n": n,
                    "lo": repr(lo), "hi": repr(hi),
                    "truncated_mass": repr(1.0 - math.prod(1.0 - t for t in mass)),
                })
    return rows


def write_golden(path) -> list[dict]:
    rows = golden_rows()
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=GOLDEN_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return rows
