"""Radius-of-influence laws, b-sequences and index-dependent schedules.

All built-in laws live on the nonnegative integers. Each law answers exact
tail queries ``P(R >= k)``, from which ``pmf``, ``cdf`` and ``strict_cdf`` are
derived, so that ``strict_cdf(k) + tail(k) == 1`` holds exactly in floating
point.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import special

MAX_RADIUS = 2**62
_CACHE_LIMIT = 1 << 20
_TABLE_LIMIT = 50_000_000


def _as_int_array(k) -> np.ndarray:
    arr = np.asarray(k)
    if arr.dtype.kind == "f":
        arr = arr.astype(np.float64)
    return arr


class RadiusDistribution:
    """Base class: subclasses implement :meth:`_tail` on integer arrays."""

    kind: str = "abstract"

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._cdf_cache = np.empty(0)

    # -- exact queries -----------------------------------------------------
    def _tail(self, k: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tail(self, k):
        """``P(R >= k)`` for integer ``k >= 0`` (scalar or array)."""
        arr = _as_int_array(k)
        out = np.asarray(self._tail(np.maximum(arr, 0)), dtype=np.float64)
        out = np.where(arr <= 0, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def pmf(self, k):
        arr = _as_int_array(k)
        out = np.asarray(self.tail(arr), dtype=np.float64) - np.asarray(self.tail(arr + 1))
        out = np.where(arr < 0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def cdf(self, k):
        """``P(R <= k)``."""
        arr = _as_int_array(k)
        out = 1.0 - np.asarray(self.tail(arr + 1), dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def strict_cdf(self, x):
        """``P(R < x)`` for real ``x >= 0``."""
        arr = np.asarray(x, dtype=np.float64)
        if np.any(arr < 0):
            raise ValueError("strict_cdf threshold must be nonnegative")
        out = 1.0 - np.asarray(self.tail(np.ceil(arr).astype(np.int64)), dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        """Expected radius; ``math.inf`` when the mean diverges."""
        raise NotImplementedError

    def raabe_limit(self) -> float | None:
        """Closed-form ``lim n P(R >= n)`` if known, else None."""
        return None

    def critical_tail_bound_holds(self) -> bool | None:
        """Whether ``P(R >= n) <= 1/(n-1)`` eventually, when known analytically."""
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError

    @property
    def label(self) -> str:
        params = {k: v for k, v in self.to_spec().items() if k != "kind"}
        inner = ",".join(f"{k}={v}" for k, v in params.items())
        return f"{self.kind}({inner})"

    def __repr__(self) -> str:
        return f"<{self.label}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, RadiusDistribution) and self.to_spec() == other.to_spec()

    def __hash__(self) -> int:
        return hash(repr(sorted(self.to_spec().items(), key=str)))

    # -- sampling ------------------------------------------------------------
    def _cdf_prefix(self, size: int) -> np.ndarray:
        """Cached ``P(R <= k)`` for ``k < size``, grown under a lock."""
        cache = self._cdf_cache
        if cache.size >= size:
            return cache
        with self._lock:
            cache = self._cdf_cache
            if cache.size < size:
                new_size = max(size, 2 * cache.size, 64)
                ks = np.arange(new_size, dtype=np.int64)
                cache = np.asarray(self.cdf(ks), dtype=np.float64)
                self._cdf_cache = cache
        return cache

    def cdf_table(self, cap: int) -> np.ndarray:
        """``P(R <= k)`` for ``k = 0 .. cap-1``; used by capped samplers."""
        return self._cdf_prefix(cap)[:cap].copy()

    def _bracket_hint(self, u: float) -> int | None:
        return None

    def sample(self, u: float) -> int:
        """Inverse-CDF draw: the smallest ``k`` with ``P(R <= k) >= u``.

        Radii beyond ``MAX_RADIUS`` are reported as ``MAX_RADIUS``.
        """
        if not 0.0 < u < 1.0:
            raise ValueError(f"uniform variate must lie in (0, 1), got {u}")
        size = 64
        cache = self._cdf_prefix(size)
        while cache[-1] < u and cache.size < _CACHE_LIMIT:
            cache = self._cdf_prefix(2 * cache.size)
        if cache[-1] >= u:
            return int(np.searchsorted(cache, u, side="left"))
        # galloping search past the cache
        lo = cache.size - 1  # cdf(lo) < u
        hint = self._bracket_hint(u)
        hi = max(2 * lo, hint if hint is not None and hint > lo else 0)
        while self.cdf(hi) < u:
            lo = hi
            hi *= 2
            if hi >= MAX_RADIUS:
                if self.cdf(MAX_RADIUS) < u:
                    return MAX_RADIUS
                hi = MAX_RADIUS
                break
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.cdf(mid) >= u:
                hi = mid
            else:
                lo = mid
        return int(hi)

    def sample_capped(self, u: float, cap: int) -> int:
        """``min(sample(u), cap)`` without searching past ``cap``."""
        table = self._cdf_prefix(cap)[:cap]
        return int(np.searchsorted(table, u, side="left"))


class PowerLaw(RadiusDistribution):
    """``P(R = k) = Z / (k+1)**alpha`` with ``Z = 1/zeta(alpha)``."""

    kind = "power_law"

    def __init__(self, alpha: float):
        super().__init__()
        alpha = float(alpha)
        if not alpha > 1.0 or not math.isfinite(alpha):
            raise ValueError(f"power law needs alpha > 1 (not normalizable otherwise), got {alpha}")
        self.alpha = alpha
        self.Z = 1.0 / float(special.zeta(alpha, 1.0))

    def _tail(self, k):
        # Hurwitz zeta: sum_{j >= k+1} j**-alpha
        return self.Z * special.zeta(self.alpha, np.asarray(k, dtype=np.float64) + 1.0)

    def pmf(self, k):
        arr = _as_int_array(k)
        out = np.where(arr < 0, 0.0, self.Z / (np.maximum(arr, 0) + 1.0) ** self.alpha)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        if self.alpha <= 2.0:
            return math.inf
        # E[R] = sum_{k>=1} P(R >= k) = Z (zeta(alpha-1) - zeta(alpha))
        return self.Z * float(special.zeta(self.alpha - 1.0, 1.0)) - 1.0

    def raabe_limit(self) -> float:
        if self.alpha < 2.0:
            return math.inf
        if self.alpha == 2.0:
            return self.Z
        return 0.0

    def tail_bracket(self, n):
        """Integral bracket ``(lo, hi)`` around ``P(R >= n)`` for ``n >= 1``."""
        n = np.asarray(n, dtype=np.float64)
        c = self.Z / (self.alpha - 1.0)
        return c / (n + 1.0) ** (self.alpha - 1.0), c / n ** (self.alpha - 1.0)

    def _bracket_hint(self, u: float) -> int | None:
        # tail(n) <= Z/((alpha-1) n^(alpha-1)) <= 1-u  =>  cdf(n-1) >= u
        c = self.Z / (self.alpha - 1.0)
        try:
            n = (c / (1.0 - u)) ** (1.0 / (self.alpha - 1.0))
        except OverflowError:
            return MAX_RADIUS
        if not math.isfinite(n) or n >= MAX_RADIUS:
            return MAX_RADIUS
        return int(math.ceil(n))

    def to_spec(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha}


class Geometric(RadiusDistribution):
    """``P(R >= k) = q**k``."""

    kind = "geometric"

    def __init__(self, q: float):
        super().__init__()
        q = float(q)
        if not 0.0 <= q < 1.0:
            raise ValueError(f"geometric law needs 0 <= q < 1, got {q}")
        self.q = q

    def _tail(self, k):
        return np.power(self.q, np.asarray(k, dtype=np.float64))

    def mean(self) -> float:
        return self.q / (1.0 - self.q)

    def raabe_limit(self) -> float:
        return 0.0

    def _bracket_hint(self, u: float) -> int | None:
        if self.q == 0.0:
            return 1
        return int(math.ceil(math.log1p(-u) / math.log(self.q))) + 1

    def to_spec(self) -> dict:
        return {"kind": self.kind, "q": self.q}


class FiniteTable(RadiusDistribution):
    """Law with finite integer support given by a ``{value: probability}`` table."""

    kind = "finite"

    def __init__(self, pmf: Mapping):
        super().__init__()
        table: dict[int, float] = {}
        for key, p in pmf.items():
            try:
                value = int(key)
            except (TypeError, ValueError):
                raise ValueError(f"finite table keys must be integers, got {key!r}") from None
            if value < 0 or str(value) != str(key).strip():
                raise ValueError(f"finite table keys must be nonnegative integers, got {key!r}")
            p = float(p)
            if not (p >= 0.0 and math.isfinite(p)):
                raise ValueError(f"probability for {value} must be >= 0, got {p}")
            table[value] = table.get(value, 0.0) + p
        total = math.fsum(table.values())
        if not table or abs(total - 1.0) > 1e-9:
            raise ValueError(f"finite table probabilities must sum to 1, got {total}")
        self.table = {k: table[k] / total for k in sorted(table) if table[k] > 0.0}
        self.kmax = max(self.table)
        probs = np.zeros(self.kmax + 1)
        for k, p in self.table.items():
            probs[k] = p
        tails = np.array([math.fsum(probs[k:]) for k in range(self.kmax + 2)])
        tails[0] = 1.0
        self._tails = tails

    def _tail(self, k):
        k = np.asarray(k)
        return self._tails[np.minimum(k, self.kmax + 1).astype(np.int64)]

    def mean(self) -> float:
        return math.fsum(k * p for k, p in self.table.items())

    def raabe_limit(self) -> float:
        return 0.0

    def to_spec(self) -> dict:
        return {"kind": self.kind, "pmf": {str(k): p for k, p in self.table.items()}}

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}:{p:g}" for k, p in self.table.items())
        return f"finite({inner})"


def point_mass(value: int) -> FiniteTable:
    return FiniteTable({value: 1.0})


class CriticalTail(RadiusDistribution):
    """``P(R >= n) = 1/(n+1)``: the boundary case where ``n P(R >= n) -> 1``."""

    kind = "critical_tail"

    def _tail(self, k):
        return 1.0 / (np.asarray(k, dtype=np.float64) + 1.0)

    def mean(self) -> float:
        return math.inf

    def raabe_limit(self) -> float:
        return 1.0

    def critical_tail_bound_holds(self) -> bool:
        # 1/(n+1) <= 1/(n-1) for every n >= 2
        return True

    def _bracket_hint(self, u: float) -> int | None:
        return int(math.ceil(1.0 / (1.0 - u))) + 1

    def to_spec(self) -> dict:
        return {"kind": self.kind}


# ---------------------------------------------------------------------------
# b-sequences


@dataclass(frozen=True)
class BSequence:
    """Nonincreasing sequence ``b_n -> 0`` with ``b_0 < 1``.

    Families: ``log_harmonic`` ``c/((n+2) ln(n+2))`` (not summable),
    ``inverse_square`` ``c/(n+2)**2`` (summable), ``user_table`` (finite list,
    zero beyond its end).
    """

    family: str
    c: float = 1.0
    table: tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in ("log_harmonic", "inverse_square", "user_table"):
            raise ValueError(f"unknown b-sequence family {self.family!r}")
        if self.family == "user_table":
            vals = [float(v) for v in self.table]
            object.__setattr__(self, "table", tuple(vals))
            if not vals:
                raise ValueError("user_table b-sequence needs at least one value")
            probe = vals[:100_000]
            if any(v < 0 for v in probe):
                raise ValueError("b-sequence values must be nonnegative")
            if any(b > a for a, b in zip(probe, probe[1:])):
                raise ValueError("b-sequence must be nonincreasing")
        else:
            if not (self.c > 0 and math.isfinite(self.c)):
                raise ValueError(f"b-sequence scale c must be positive, got {self.c}")
        if not self(0) < 1.0:
            raise ValueError(f"b-sequence needs b_0 < 1, got b_0 = {self(0)}")

    def __call__(self, n):
        arr = np.asarray(n, dtype=np.float64)
        if self.family == "log_harmonic":
            x = arr + 2.0
            out = self.c / (x * np.log(x))
        elif self.family == "inverse_square":
            out = self.c / (arr + 2.0) ** 2
        else:
            tab = np.asarray(self.table)
            idx = arr.astype(np.int64)
            out = np.where(idx < tab.size, tab[np.minimum(idx, tab.size - 1)], 0.0)
        out = np.where(arr < 0, np.nan, out)
        return float(out) if out.ndim == 0 else out

    @property
    def summable(self) -> bool:
        return self.family != "log_harmonic"

    def power_summable(self, t: int) -> bool:
        """Whether ``sum_n b_n**t`` converges."""
        return self.summable or t >= 2

    @property
    def n_times_b_vanishes(self) -> bool:
        # every built-in family has n b_n -> 0
        return True

    def tail_sum(self, n: int) -> float:
        """``sum_{i >= n} b_i`` (``inf`` for non-summable families)."""
        if self.family == "log_harmonic":
            return math.inf
        if self.family == "inverse_square":
            return self.c * float(special.polygamma(1, n + 2.0))
        return math.fsum(self.table[n:])

    def to_spec(self) -> dict:
        if self.family == "user_table":
            return {"family": self.family, "values": list(self.table)}
        return {"family": self.family, "c": self.c}


# ---------------------------------------------------------------------------
# schedules


class DistributionSchedule:
    """Index-to-law map ``n -> law of R_n``."""

    mode = "heterogeneous"

    def __init__(self, generator: Callable[[int], RadiusDistribution], label: str = "custom"):
        self._generator = generator
        self.label = label
        self._laws: dict[int, RadiusDistribution] = {}
        self._lock = threading.Lock()

    def law(self, n: int) -> RadiusDistribution:
        n = int(n)
        if n < 0:
            raise ValueError("schedule index must be nonnegative")
        law = self._laws.get(n)
        if law is None:
            with self._lock:
                law = self._laws.setdefault(n, self._generator(n))
        return law

    @property
    def homogeneous_law(self) -> RadiusDistribution | None:
        return None

    def tail(self, n, k):
        """Vectorized ``P(R_n >= k)`` with numpy broadcasting of ``n`` and ``k``."""
        n_arr, k_arr = np.broadcast_arrays(np.asarray(n), np.asarray(k))
        out = np.empty(n_arr.shape, dtype=np.float64)
        for idx in np.unique(n_arr):
            sel = n_arr == idx
            out[sel] = self.law(int(idx)).tail(k_arr[sel])
        return float(out) if out.ndim == 0 else out

    def cdf_row(self, n: int, cap: int) -> np.ndarray:
        return self.law(n).cdf_table(cap)

    def sampling_table(self, n_vertices: int, cap: int) -> tuple[np.ndarray, np.ndarray]:
        """CDF rows and a vertex -> row map for capped inverse-CDF sampling."""
        cap = max(int(cap), 1)
        law = self.homogeneous_law
        if law is not None:
            return law.cdf_table(cap)[None, :], np.zeros(n_vertices, dtype=np.int64)
        if n_vertices * cap > _TABLE_LIMIT:
            raise ValueError(
                f"heterogeneous sampling table of {n_vertices} x {cap} entries exceeds "
                f"{_TABLE_LIMIT}; reduce the horizon"
            )
        table = np.empty((n_vertices, cap))
        for n in range(n_vertices):
            table[n] = self.cdf_row(n, cap)
        return table, np.arange(n_vertices, dtype=np.int64)

    # analytic certificates; None means "unknown"
    def power_sum_summable(self, m: int, t: int) -> bool | None:
        return None

    def reach_upper_bound_vanishes(self) -> bool | None:
        return None

    def reach_back_sum_diverges(self) -> bool | None:
        return None

    def rho_finite(self) -> bool | None:
        return None

    def rho_tail_bound(self, n: int) -> float | None:
        """Bound on ``sum_{i > n} prod_k P(R_{i+k} < k)`` when certified."""
        return None

    def a_tail_bound(self, m: int, J: int, a_J: float) -> float | None:
        """Bound on ``sum_{j > J} a_j`` when certified."""
        return None

    def to_spec(self) -> dict:
        raise ValueError(f"schedule {self.label!r} has no serializable spec")


class HomogeneousSchedule(DistributionSchedule):
    mode = "homogeneous"

    def __init__(self, dist: RadiusDistribution):
        super().__init__(lambda n: dist, label=dist.label)
        self.dist = dist

    @property
    def homogeneous_law(self) -> RadiusDistribution:
        return self.dist

    def law(self, n: int) -> RadiusDistribution:
        if int(n) < 0:
            raise ValueError("schedule index must be nonnegative")
        return self.dist

    def tail(self, n, k):
        n_arr, k_arr = np.broadcast_arrays(np.asarray(n), np.asarray(k))
        out = np.asarray(self.dist.tail(k_arr), dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def power_sum_summable(self, m, t):
        return self.dist.strict_cdf(t * m) == 0.0

    def reach_back_sum_diverges(self):
        return math.isinf(self.dist.mean())

    def rho_finite(self):
        # every term equals prod_k P(R < k): zero iff the mean diverges
        return math.isinf(self.dist.mean()) or self.dist.strict_cdf(1) == 0.0

    def rho_tail_bound(self, n):
        return 0.0 if self.rho_finite() else None

    def to_spec(self) -> dict:
        return self.dist.to_spec()


class ExampleSchedule(DistributionSchedule):
    """The three b-sequence constructions.

    ``ex41``: ``P(R_n = 0) = 1 - b_n``, ``P(R_n = k) = b_{n+k-1} - b_{n+k}``.
    ``ex42``: ``P(R_n = 0) = b_n``, ``P(R_n = 1) = 1 - b_n``.
    ``ex43``: ``P(R_n = 0) = 1 - b_n``, ``P(R_n = n) = b_n``; ``R_0 = 0``.
    """

    def __init__(self, which: str, b: BSequence):
        if which not in ("ex41", "ex42", "ex43"):
            raise ValueError(f"unknown example schedule {which!r}")
        if not isinstance(b, BSequence):
            raise TypeError("example schedules need a BSequence")
        self.which = which
        self.b = b
        family = b.family if b.family == "user_table" else f"{b.family}(c={b.c})"
        super().__init__(lambda n: BFamilyMember(self, n), label=f"{which}[{family}]")

    def tail(self, n, k):
        n_arr, k_arr = np.broadcast_arrays(np.asarray(n, dtype=np.int64), np.asarray(k, dtype=np.int64))
        b = self.b
        if self.which == "ex41":
            out = np.where(k_arr <= 0, 1.0, b(np.maximum(n_arr + k_arr - 1, 0)))
        elif self.which == "ex42":
            out = np.where(k_arr <= 0, 1.0, np.where(k_arr == 1, 1.0 - b(n_arr), 0.0))
        else:
            out = np.where(
                k_arr <= 0, 1.0, np.where((k_arr <= n_arr) & (n_arr >= 1), b(n_arr), 0.0)
            )
        out = np.asarray(out, dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def cdf_row(self, n, cap):
        return 1.0 - np.asarray(self.tail(n, np.arange(1, cap + 1)), dtype=np.float64)

    def power_sum_summable(self, m, t):
        if self.which == "ex42":
            # P(R_n < tm) is b_n when tm == 1, else 1
            return t * m == 1 and self.b.power_summable(t)
        # ex41/ex43: P(R_n < tm) -> 1
        return False

    def reach_upper_bound_vanishes(self):
        if self.which == "ex41":
            # bound equals n b_{n-1}
            return self.b.n_times_b_vanishes
        if self.which == "ex43":
            # bound = sum_{ceil(n/2) <= k < n} b_k <= (n/2) b_{ceil(n/2)}
            return self.b.n_times_b_vanishes
        return False

    def reach_back_sum_diverges(self):
        if self.which == "ex42":
            return False
        # ex41: sum_k b_{n+2k-1}; ex43: sum_k b_{n+k}; both diverge iff sum b does
        return not self.b.summable

    def rho_finite(self):
        if self.which == "ex42":
            # prod_k P(R_{n+k} < k) = b_{n+1}
            return self.b.summable
        if not self.b.summable:
            return True  # every inner product is zero
        return False  # inner products tend to 1

    def rho_tail_bound(self, n):
        if self.which == "ex42" and self.b.summable:
            return self.b.tail_sum(n + 2)
        if self.which != "ex42" and not self.b.summable:
            return 0.0
        return None

    def a_tail_bound(self, m, J, a_J):
        if self.which == "ex42" and m == 1 and self.b.summable:
            # a_n = b_n for m = 1
            return self.b.tail_sum(J + 1)
        return None

    def to_spec(self) -> dict:
        return {"kind": "schedule", "example": self.which, "b": self.b.to_spec()}


class BFamilyMember(RadiusDistribution):
    """Law of ``R_n`` inside an :class:`ExampleSchedule`."""

    kind = "b_family_member"

    def __init__(self, schedule: ExampleSchedule, n: int):
        super().__init__()
        self.schedule = schedule
        self.n = int(n)

    def _tail(self, k):
        return self.schedule.tail(self.n, k)

    def cdf_table(self, cap):
        return self.schedule.cdf_row(self.n, cap)

    def mean(self) -> float:
        b, n = self.schedule.b, self.n
        which = self.schedule.which
        if which == "ex41":
            return b.tail_sum(n)
        if which == "ex42":
            return 1.0 - b(n)
        return n * b(n) if n >= 1 else 0.0

    def to_spec(self) -> dict:
        return {"kind": self.kind, "example": self.schedule.which, "n": self.n, "b": self.schedule.b.to_spec()}


class TableSchedule(DistributionSchedule):
    """Explicit per-index laws; indices past the end reuse the last law."""

    def __init__(self, laws: Sequence[RadiusDistribution], label: str = "table"):
        if not laws:
            raise ValueError("table schedule needs at least one law")
        self.laws = list(laws)
        super().__init__(lambda n: self.laws[min(n, len(self.laws) - 1)], label=label)

    def to_spec(self) -> dict:
        return {"kind": "table", "laws": [law.to_spec() for law in self.laws]}


# ---------------------------------------------------------------------------
# constructors and module-level queries


def make_power_law(alpha: float) -> PowerLaw:
    return PowerLaw(alpha)


def make_example_schedule(which: str, b: BSequence) -> ExampleSchedule:
    return ExampleSchedule(which, b)


def tail(dist: RadiusDistribution, k):
    return dist.tail(k)


def strict_cdf(dist: RadiusDistribution, x):
    return dist.strict_cdf(x)


def mean(dist: RadiusDistribution) -> float:
    return dist.mean()


def sample(dist: RadiusDistribution, u: float) -> int:
    return dist.sample(u)


def catalog() -> list[RadiusDistribution]:
    """Homogeneous laws exercised by the acceptance and self tests."""
    return [
        PowerLaw(1.5),
        PowerLaw(2.0),
        PowerLaw(2.5),
        Geometric(0.5),
        FiniteTable({0: 0.5, 1: 0.5}),
        CriticalTail(),
    ]


def b_sequence_from_spec(spec: Mapping) -> BSequence:
    if not isinstance(spec, Mapping):
        raise ValueError("b: expected an object")
    family = spec.get("family")
    if family == "user_table":
        return BSequence("user_table", table=tuple(spec.get("values", ())))
    return BSequence(str(family), c=float(spec.get("c", 1.0)))


def distribution_from_spec(spec: Mapping) -> RadiusDistribution | DistributionSchedule:
    """Build a law (or a schedule for ``kind == "schedule"``) from its config document."""
    if not isinstance(spec, Mapping):
        raise ValueError("distribution: expected an object")
    kind = spec.get("kind")
    if kind == "power_law":
        return PowerLaw(spec["alpha"])
    if kind == "geometric":
        return Geometric(spec["q"])
    if kind == "finite":
        return FiniteTable(spec["pmf"])
    if kind == "critical_tail":
        return CriticalTail()
    if kind == "schedule":
        return ExampleSchedule(spec["example"], b_sequence_from_spec(spec["b"]))
    if kind == "table":
        return TableSchedule([distribution_from_spec(s) for s in spec["laws"]])
    raise ValueError(f"unknown distribution kind {kind!r}")


def as_schedule(obj: RadiusDistribution | DistributionSchedule) -> DistributionSchedule:
    if isinstance(obj, DistributionSchedule):
        return obj
    if isinstance(obj, RadiusDistribution):
        return HomogeneousSchedule(obj)
    raise TypeError(f"expected a law or a schedule, got {type(obj).__name__}")
