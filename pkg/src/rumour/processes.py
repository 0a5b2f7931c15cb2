"""Firework and reverse firework simulators.

Conventions shared by every entry point:

* vertex ``i`` draws its radius from slot ``i`` of the trial's uniform stream,
  by capped inverse-CDF sampling (radii past the horizon distance are clipped,
  which cannot change any observable up to the horizon);
* a firework trial survives to horizon ``H`` when vertex ``u_H`` is activated;
  a reverse trial survives when vertex ``H`` is activated, with vertices beyond
  ``H`` excluded from the window.

The single-trial functions take any indexable stream (``TrialStream`` or a
plain sequence of uniforms) and are reference implementations; the ``*_batch``
functions run the numba kernels over trial ranges of a seeded stream family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .distributions import as_schedule


@dataclass(frozen=True)
class VertexLayout:
    """Actionable positions ``0 = u_0 < u_1 < ...``.

    ``kind`` is ``identity`` (``u_n = n``), ``arithmetic`` (``u_n = m n``) or
    ``table`` (explicit positions, optional gap bound ``m``).
    """

    kind: str = "identity"
    m: int | None = None
    table: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("identity", "arithmetic", "table"):
            raise ValueError(f"unknown layout kind {self.kind!r}")
        if self.m is not None and (int(self.m) != self.m or self.m < 1):
            raise ValueError(f"gap bound m must be a positive integer, got {self.m}")
        if self.kind == "arithmetic" and self.m is None:
            raise ValueError("arithmetic layout needs m")
        if self.kind == "table":
            tab = tuple(int(x) for x in self.table)
            object.__setattr__(self, "table", tab)
            if not tab or tab[0] != 0:
                raise ValueError("layout table must start at u_0 = 0")
            if any(b <= a for a, b in zip(tab, tab[1:])):
                raise ValueError("layout positions must be strictly increasing")

    @classmethod
    def identity(cls) -> "VertexLayout":
        return cls("identity", 1)

    @classmethod
    def arithmetic(cls, m: int) -> "VertexLayout":
        return cls("arithmetic", m)

    @property
    def gap_bound(self) -> int | None:
        if self.kind == "identity":
            return 1
        return self.m

    def arithmetic_step(self) -> int | None:
        """``m`` if ``u_i = m i`` for all i, else None."""
        if self.kind == "identity":
            return 1
        if self.kind == "arithmetic":
            return self.m
        return None

    def positions(self, n_max: int) -> np.ndarray:
        """``u_0 .. u_{n_max}`` as float64; validates the gap bound on that range."""
        idx = np.arange(n_max + 1, dtype=np.int64)
        if self.kind == "identity":
            pos = idx
        elif self.kind == "arithmetic":
            pos = idx * self.m
        else:
            if len(self.table) <= n_max:
                raise ValueError(
                    f"layout table has {len(self.table)} positions, horizon needs {n_max + 1}"
                )
            pos = np.asarray(self.table[: n_max + 1], dtype=np.int64)
            if self.m is not None and n_max >= 1:
                gaps = np.diff(pos)
                bad = np.flatnonzero(gaps > self.m)
                if bad.size:
                    i = int(bad[0])
                    raise ValueError(
                        f"layout gap u_{i + 1} - u_{i} = {gaps[i]} exceeds declared bound m = {self.m}"
                    )
        return pos.astype(np.float64)

    def to_spec(self) -> dict:
        spec: dict = {"kind": self.kind}
        if self.kind == "arithmetic" or (self.kind == "table" and self.m is not None):
            spec["m"] = self.m
        if self.kind == "table":
            spec["positions"] = list(self.table)
        return spec

    @classmethod
    def from_spec(cls, spec) -> "VertexLayout":
        if not isinstance(spec, dict):
            raise ValueError("layout: expected an object")
        kind = spec.get("kind", "identity")
        if kind == "identity":
            return cls.identity()
        if kind == "arithmetic":
            return cls.arithmetic(int(spec["m"]))
        if kind == "table":
            return cls("table", spec.get("m"), tuple(spec["positions"]))
        raise ValueError(f"unknown layout kind {kind!r}")


@dataclass
class TrialTrace:
    generations: list[list[int]] = field(default_factory=list)
    radii: dict[int, float] = field(default_factory=dict)
    full_radii_upto: int = 0
    positions: np.ndarray | None = None
    capped: bool = False

    def records(self, trial: int = 0) -> Iterable[dict]:
        for g, members in enumerate(self.generations):
            yield {"trial": trial, "generation": g, "activated": members}


@dataclass
class TrialOutcome:
    survived_to_horizon: bool
    rightmost_activated_index: int
    extinction_generation: int | None
    activated_count: int
    capped: bool = False
    trace: TrialTrace | None = None


def write_trace(fh, trace: TrialTrace, trial: int = 0) -> None:
    """Append a trace as line-delimited JSON records."""
    for rec in trace.records(trial):
        fh.write(json.dumps(rec) + "\n")


# ---------------------------------------------------------------------------
# sampling tables


def firework_setup(schedule, layout: VertexLayout, horizon: int):
    """Positions, CDF table and row map for a firework run up to ``horizon``."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    schedule = as_schedule(schedule)
    pos = layout.positions(horizon)
    cap = int(pos[horizon] - pos[0])
    cdf, row_of = schedule.sampling_table(horizon + 1, cap)
    return pos, cdf, row_of


def reverse_setup(schedule, horizon: int):
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    schedule = as_schedule(schedule)
    return schedule.sampling_table(horizon + 1, horizon)


def _draw(cdf: np.ndarray, row_of: np.ndarray, vertex: int, u: float) -> int:
    return int(np.searchsorted(cdf[row_of[vertex]], u, side="left"))


# ---------------------------------------------------------------------------
# single trials


def simulate_firework(
    layout: VertexLayout,
    schedule,
    horizon: int,
    stream,
    *,
    trace: bool = False,
    full_radii: bool = False,
) -> TrialOutcome:
    """One firework trial, generation by generation.

    Generation 0 is the origin; generation ``g+1`` holds the not-yet-active
    vertices ``u_i`` with ``u_j < u_i <= u_j + R_j`` for some ``j`` in
    generation ``g``. ``extinction_generation`` is the last generation whose
    explosions activated nothing. With ``full_radii`` the radii of all vertices
    below the horizon are drawn (same slots), as needed by
    :func:`renewal_event_indicator`.
    """
    pos, cdf, row_of = firework_setup(schedule, layout, horizon)
    tr = TrialTrace(positions=pos) if (trace or full_radii) else None
    active = np.zeros(horizon + 1, dtype=bool)
    active[0] = True
    current = [0]
    radii: dict[int, float] = {}
    if tr is not None:
        tr.generations.append([0])
    gen = 0
    survived = False
    while True:
        new: list[int] = []
        for j in current:
            r = _draw(cdf, row_of, j, stream[j])
            radii[j] = r
            reach = pos[j] + r
            for i in range(j + 1, horizon + 1):
                if pos[i] > reach:
                    break
                if not active[i]:
                    active[i] = True
                    new.append(i)
        if not new:
            break
        new.sort()
        gen += 1
        if tr is not None:
            tr.generations.append(new)
        if active[horizon]:
            survived = True
            break
        current = new
    if tr is not None:
        if full_radii:
            for i in range(horizon):
                if i not in radii:
                    radii[i] = _draw(cdf, row_of, i, stream[i])
            tr.full_radii_upto = horizon
        tr.radii = radii
    idx = np.flatnonzero(active)
    return TrialOutcome(
        survived_to_horizon=survived,
        rightmost_activated_index=int(idx[-1]),
        extinction_generation=None if survived else gen,
        activated_count=int(idx.size),
        trace=tr,
    )


def firework_frontier(layout: VertexLayout, schedule, horizon: int, stream) -> int:
    """Rightmost activated index via ``M <- max(M, u_i + R_i)`` (capped at horizon)."""
    pos, cdf, row_of = firework_setup(schedule, layout, horizon)
    reach = pos[0] + _draw(cdf, row_of, 0, stream[0])
    i = 1
    while i <= horizon and pos[i] <= reach:
        if i == horizon:
            return horizon
        reach = max(reach, pos[i] + _draw(cdf, row_of, i, stream[i]))
        i += 1
    return i - 1


def simulate_reverse(
    schedule,
    horizon: int,
    generation_cap: int | None = None,
    stream=None,
    *,
    trace: bool = False,
) -> TrialOutcome:
    """One reverse firework trial on vertices ``0..horizon``.

    Radii ``R_1..R_horizon`` are drawn up front from slots ``1..horizon``.
    At generation ``t`` every inactive ``k`` whose window ``[k - R_k, k)``
    holds a vertex active after generation ``t-1`` becomes active.
    ``extinction_generation`` is the first generation adding nothing.
    """
    if generation_cap is None:
        generation_cap = horizon
    if generation_cap < 1:
        raise ValueError("generation_cap must be >= 1")
    if stream is None:
        raise ValueError("a uniform stream is required")
    cdf, row_of = reverse_setup(schedule, horizon)
    radii = np.zeros(horizon + 1, dtype=np.int64)
    for k in range(1, horizon + 1):
        radii[k] = min(_draw(cdf, row_of, k, stream[k]), k)
    active = np.zeros(horizon + 1, dtype=bool)
    active[0] = True
    tr = TrialTrace(generations=[[0]], radii={k: int(radii[k]) for k in range(1, horizon + 1)},
                    full_radii_upto=horizon + 1) if trace else None
    survived = capped = False
    ext = None
    gen = 0
    while True:
        if gen >= generation_cap:
            capped = True
            break
        gen += 1
        prefix = np.concatenate(([0], np.cumsum(active)))
        lo = np.arange(horizon + 1) - radii
        # active count in [k - R_k, k)
        hits = prefix[np.arange(horizon + 1)] - prefix[lo]
        new = np.flatnonzero(~active & (radii >= 1) & (hits > 0))
        if new.size == 0:
            ext = gen
            break
        active[new] = True
        if tr is not None:
            tr.generations.append([int(k) for k in new])
        if active[horizon]:
            survived = True
            break
    if tr is not None:
        tr.capped = capped
    idx = np.flatnonzero(active)
    return TrialOutcome(
        survived_to_horizon=survived,
        rightmost_activated_index=int(idx[-1]),
        extinction_generation=ext,
        activated_count=int(idx.size),
        capped=capped,
        trace=tr,
    )


def reverse_closure(radii: Sequence[int], order: Iterable[int] | None = None) -> set[int]:
    """Fixpoint of the reverse activation rule, sweeping vertices in ``order``.

    ``radii[k]`` is the reach-back of vertex ``k`` (``radii[0]`` ignored).
    """
    n = len(radii) - 1
    order = list(range(1, n + 1)) if order is None else list(order)
    active = {0}
    changed = True
    while changed:
        changed = False
        for k in order:
            if k in active:
                continue
            if any(v in active for v in range(max(0, k - radii[k]), k)):
                active.add(k)
                changed = True
    return active


def renewal_event_indicator(trace: TrialTrace, n: int) -> bool:
    """``B_n``: no vertex left of ``u_n`` reaches it (``u_n > u_x + R_x`` for all ``x < n``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if trace.full_radii_upto < n or trace.positions is None:
        raise ValueError(
            f"trace has radii only below vertex {trace.full_radii_upto}; "
            f"rerun with full_radii=True and horizon >= {n}"
        )
    pos = trace.positions
    return all(pos[n] > pos[x] + trace.radii[x] for x in range(n))


# ---------------------------------------------------------------------------
# batches


@dataclass
class BatchResult:
    survived: np.ndarray
    rightmost: np.ndarray
    extinction_generation: np.ndarray
    activated: np.ndarray
    capped: np.ndarray | None = None

    def outcome(self, i: int) -> TrialOutcome:
        ext = int(self.extinction_generation[i])
        return TrialOutcome(
            survived_to_horizon=bool(self.survived[i]),
            rightmost_activated_index=int(self.rightmost[i]),
            extinction_generation=None if ext < 0 else ext,
            activated_count=int(self.activated[i]),
            capped=bool(self.capped[i]) if self.capped is not None else False,
        )


def firework_batch(layout, schedule, horizon, seed, start, count, setup=None) -> BatchResult:
    pos, cdf, row_of = setup or firework_setup(schedule, layout, horizon)
    out = _kernels.firework_batch(cdf, row_of, pos, horizon, np.uint64(seed), start, count)
    return BatchResult(*out)


def firework_frontier_batch(layout, schedule, horizon, seed, start, count, setup=None) -> np.ndarray:
    pos, cdf, row_of = setup or firework_setup(schedule, layout, horizon)
    return _kernels.firework_frontier_batch(cdf, row_of, pos, horizon, np.uint64(seed), start, count)


def reverse_batch(schedule, horizon, generation_cap, seed, start, count, setup=None) -> BatchResult:
    if generation_cap is None:
        generation_cap = horizon
    if generation_cap < 1:
        raise ValueError("generation_cap must be >= 1")
    cdf, row_of = setup or reverse_setup(schedule, horizon)
    out = _kernels.reverse_batch(cdf, row_of, horizon, generation_cap, np.uint64(seed), start, count)
    return BatchResult(*out)


def renewal_batch(layout, schedule, n_max, seed, start, count) -> np.ndarray:
    """Boolean matrix ``[trial, n-1]`` of renewal events ``B_1..B_{n_max}``."""
    pos, cdf, row_of = firework_setup(schedule, layout, n_max)
    return _kernels.renewal_batch(cdf, row_of, pos, n_max, np.uint64(seed), start, count)
