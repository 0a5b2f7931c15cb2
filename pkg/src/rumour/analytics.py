"""Survival criteria, a-sequences and bounds for both processes.

Classifiers return a :class:`Verdict`. The ``tier`` field separates
``analytic`` verdicts (closed forms or family certificates) from
``heuristic`` ones (numerical probes); a near-threshold numeric reading is
reported as Inconclusive rather than rounded to a definite answer.

Bounds come as :class:`BoundEntry` values carrying a rigor flag: infinite
products and sums are truncated, and a lower bound is only flagged
``rigorous`` when the discarded tail is controlled by a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np

from .distributions import (
    DistributionSchedule,
    HomogeneousSchedule,
    PowerLaw,
    RadiusDistribution,
    as_schedule,
)
from .processes import VertexLayout

SURVIVES = "Survives"
DIES = "Dies"
SURVIVES_AS = "SurvivesAlmostSurely"
INCONCLUSIVE = "Inconclusive"

RULE_DEGENERATE_SURE = "degenerate: P(R<1)=0"
RULE_DEGENERATE_DEAD = "degenerate: P(R<1)=1"
RULE_FINITE_MEAN = "finite mean"
RULE_INFINITE_MEAN = "infinite mean"
RULE_L_ABOVE = "tail limit L>1"
RULE_L_BELOW = "tail limit L<1"
RULE_L_CRITICAL = "tail limit L=1 with P(R>=n)<=1/(n-1)"
RULE_POWER_SUM = "summable sum_n P(R_n<tm)^t"
RULE_GAP_DOMINATION = "gap-dominated limit n[P(R>=n)-b_n]>m"
RULE_COUPLED_BELOW = "coupling: tails dominated by a dying law"
RULE_COUPLED_ABOVE = "coupling: tails dominate a surviving law"
RULE_REACH_BOUND = "reach bound sum_k P(R_k>=n-k) -> 0"
RULE_ORIGIN_SILENT = "origin never reaches u_1"
RULE_REACH_BACK_DIVERGES = "reach-back sums diverge for all n"
RULE_RHO_FINITE = "rho finite"

PROBE_EXPONENTS = range(1, 25)
STABILITY_TOL = 1e-4
MARGIN = 1e-3


@dataclass
class Verdict:
    classification: str
    rule: str | None = None
    tier: str | None = None
    evidence: dict = field(default_factory=dict)
    truncation: int | None = None

    def __post_init__(self):
        if self.classification != INCONCLUSIVE and not self.rule:
            raise ValueError("a definite verdict needs the rule that produced it")

    def to_dict(self) -> dict:
        return {
            "verdict": self.classification,
            "rule": self.rule,
            "tier": self.tier,
            "evidence": _jsonable(self.evidence),
            "truncation": self.truncation,
        }


@dataclass
class BoundEntry:
    value: float
    rigorous: bool
    depth: dict
    certificate: dict = field(default_factory=dict)

    @property
    def rigor(self) -> str:
        return "rigorous" if self.rigorous else "truncated-estimate"

    def to_dict(self) -> dict:
        return {"value": self.value, "rigor": self.rigor, "depth": self.depth,
                "certificate": _jsonable(self.certificate)}


@dataclass
class BoundsReport:
    lower: BoundEntry | None = None
    upper: BoundEntry | None = None

    def __post_init__(self):
        if (self.lower and self.upper and self.lower.rigorous and self.upper.rigorous
                and self.lower.value > self.upper.value + 1e-12):
            raise ValueError(f"rigorous lower {self.lower.value} exceeds upper {self.upper.value}")

    def to_dict(self) -> dict:
        return {
            "lower": self.lower.to_dict() if self.lower else None,
            "upper": self.upper.to_dict() if self.upper else None,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_document(verdict: Verdict | None, bounds: BoundsReport | None = None) -> dict:
    """The serialized form ``{verdict, rule, evidence, bounds, truncation}``."""
    doc = verdict.to_dict() if verdict else {"verdict": None, "rule": None, "evidence": {}, "truncation": None}
    doc["bounds"] = bounds.to_dict() if bounds else {}
    return doc


# ---------------------------------------------------------------------------
# a-sequences


def _log_strict(schedule: DistributionSchedule, n, k) -> np.ndarray:
    """``log P(R_n < k)`` via log1p of the tail."""
    with np.errstate(divide="ignore"):
        return np.log1p(-np.asarray(schedule.tail(n, k), dtype=np.float64))


def log_a_sequence(schedule, m: int, n_max: int) -> np.ndarray:
    """``log a_n`` for ``n = 0..n_max``, ``a_n = prod_{i=0}^{n} P(R_{n-i} < (i+1) m)``."""
    schedule = as_schedule(schedule)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if m < 1:
        raise ValueError("m must be >= 1")
    i = np.arange(n_max + 1)
    if isinstance(schedule, HomogeneousSchedule):
        # a_n = a_{n-1} P(R < (n+1) m)
        return np.cumsum(_log_strict(schedule, 0, (i + 1) * m))
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        ii = i[: n + 1]
        out[n] = _log_strict(schedule, n - ii, (ii + 1) * m).sum()
    return out


def a_sequence(schedule, m: int, n_max: int) -> np.ndarray:
    return np.exp(log_a_sequence(schedule, m, n_max))


# ---------------------------------------------------------------------------
# tail-limit classification


def _tail_fn(tail_at) -> Callable[[int], float]:
    if isinstance(tail_at, RadiusDistribution):
        return lambda n: float(tail_at.tail(n))
    return tail_at


def raabe_classify(
    tail_at,
    probe_exponents=PROBE_EXPONENTS,
    *,
    tol: float = STABILITY_TOL,
    margin: float = MARGIN,
) -> Verdict:
    """Classify the homogeneous firework from ``L = lim n P(R >= n)``.

    ``tail_at`` is either a law (its closed-form limit is used when known) or
    a function ``n -> P(R >= n)``, probed at ``n = 2**i``.
    """
    if isinstance(tail_at, RadiusDistribution) and tail_at.raabe_limit() is not None:
        L = tail_at.raabe_limit()
        ev = {"L": L}
        if L > 1:
            return Verdict(SURVIVES, RULE_L_ABOVE, "analytic", ev)
        if L < 1:
            return Verdict(DIES, RULE_L_BELOW, "analytic", ev)
        if tail_at.critical_tail_bound_holds():
            return Verdict(DIES, RULE_L_CRITICAL, "analytic", ev)
        return Verdict(INCONCLUSIVE, None, "analytic", ev)

    f = _tail_fn(tail_at)
    ns = [2**e for e in probe_exponents]
    vals = [n * f(n) for n in ns]
    ev = {"probes": ns, "n_tail": vals}
    depth = ns[-1]
    last, prev = vals[-1], vals[-2]
    diffs = np.diff(vals[-4:])
    if abs(last - prev) <= tol:
        ev["L"] = last
        if last > 1 + margin:
            return Verdict(SURVIVES, RULE_L_ABOVE, "heuristic", ev, depth)
        if last < 1 - margin:
            return Verdict(DIES, RULE_L_BELOW, "heuristic", ev, depth)
        half = [n for n in ns if n >= ns[len(ns) // 2]]
        if all(f(n) <= 1.0 / (n - 1) for n in half):
            ev["critical_bound_from"] = half[0]
            return Verdict(DIES, RULE_L_CRITICAL, "heuristic", ev, depth)
        return Verdict(INCONCLUSIVE, None, "heuristic", ev, depth)
    if np.all(diffs > 0) and last > 1 + margin:
        ev["L"] = math.inf
        return Verdict(SURVIVES, RULE_L_ABOVE, "heuristic", ev, depth)
    if np.all(diffs < 0) and last < 1 - margin:
        ev["L_upper"] = last
        return Verdict(DIES, RULE_L_BELOW, "heuristic", ev, depth)
    return Verdict(INCONCLUSIVE, None, "heuristic", ev, depth)


def _partial_sums(log_a: np.ndarray) -> dict:
    a = np.exp(log_a)
    cs = np.cumsum(a)
    return {f"sum_a_to_{n}": float(cs[n]) for n in (10, 100, 1000) if n < cs.size}


# ---------------------------------------------------------------------------
# firework classifiers


def classify_firework_homogeneous(dist: RadiusDistribution) -> Verdict:
    p_silent = dist.strict_cdf(1)
    if p_silent == 0.0:
        return Verdict(SURVIVES, RULE_DEGENERATE_SURE, "analytic", {"P(R<1)": 0.0})
    if p_silent == 1.0:
        return Verdict(DIES, RULE_DEGENERATE_DEAD, "analytic", {"P(R<1)": 1.0})
    evidence = {"P(R<1)": p_silent}
    evidence.update(_partial_sums(log_a_sequence(dist, 1, 1000)))
    mu = dist.mean()
    evidence["mean"] = mu
    if math.isfinite(mu):
        return Verdict(DIES, RULE_FINITE_MEAN, "analytic", evidence)
    v = raabe_classify(dist)
    v.evidence = {**evidence, **v.evidence}
    return v


@dataclass
class Domination:
    """Comparison law for coupling routes.

    ``relation``: ``"above"`` means ``P(R_n >= k) <= P(R >= k)`` for all n, k;
    ``"below"`` means ``P(R_n >= k) >= P(R >= k)``; ``"gap"`` means
    ``P(R >= k) - P(R_n >= k) <= b_k`` with ``gap`` giving ``b``.
    """

    law: RadiusDistribution
    relation: str = "above"
    gap: Callable | None = None

    def __post_init__(self):
        if self.relation not in ("above", "below", "gap"):
            raise ValueError(f"unknown domination relation {self.relation!r}")
        if self.relation == "gap" and self.gap is None:
            raise ValueError("gap domination needs a gap sequence")


def _probe_domination(schedule, dom: Domination, n_probe=200, k_probe=200) -> bool:
    n = np.arange(n_probe)[:, None]
    k = np.arange(k_probe)[None, :]
    sched = np.asarray(schedule.tail(n, k))
    ref = np.asarray(dom.law.tail(k))
    if dom.relation == "above":
        return bool(np.all(sched <= ref + 1e-15))
    if dom.relation == "below":
        return bool(np.all(sched >= ref - 1e-15))
    return bool(np.all(ref - sched <= np.asarray(dom.gap(k)) + 1e-15))


def classify_firework_heterogeneous(
    schedule,
    m: int = 1,
    t: int = 1,
    domination: Domination | None = None,
) -> Verdict:
    """Routes tried in order: coupling, gap domination, power-sum summability,
    vanishing reach bound, silent origin."""
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if int(t) != t or t < 1:
        raise ValueError(f"t must be a positive integer, got {t}")
    schedule = as_schedule(schedule)
    if isinstance(schedule, HomogeneousSchedule) and m == 1 and domination is None:
        return classify_firework_homogeneous(schedule.dist)

    evidence: dict = {}
    if domination is not None:
        holds = _probe_domination(schedule, domination)
        evidence["domination_probe_holds"] = holds
        if holds and domination.relation in ("above", "below"):
            if m != 1:
                raise ValueError("coupling against a homogeneous law needs the identity layout (m = 1)")
            ref = raabe_classify(domination.law)
            evidence["reference"] = ref.to_dict()
            if domination.relation == "above" and ref.classification == DIES:
                return Verdict(DIES, RULE_COUPLED_BELOW, "heuristic", evidence)
            if domination.relation == "below" and ref.classification == SURVIVES:
                return Verdict(SURVIVES, RULE_COUPLED_ABOVE, "heuristic", evidence)
        if holds and domination.relation == "gap":
            law, b = domination.law, domination.gap
            ns = np.array([2**e for e in range(4, 25)], dtype=np.float64)
            vals = ns * (np.asarray(law.tail(ns.astype(np.int64))) - np.asarray(b(ns)))
            evidence["n_gap_limit"] = vals.tolist()
            stable = abs(vals[-1] - vals[-2]) <= STABILITY_TOL or np.all(np.diff(vals[-4:]) > 0)
            if stable and vals[-1] > m + MARGIN and abs(float(b(ns[-1]))) < 1e-3:
                return Verdict(SURVIVES, RULE_GAP_DOMINATION, "heuristic", evidence)

    for n in range(0, 50):
        p = float(schedule.tail(n, m))
        if not 0.0 < p < 1.0:
            evidence["standing_assumption_violated_at"] = n
            break
    summable = schedule.power_sum_summable(m, t)
    evidence["power_sum_summable"] = summable
    if summable:
        return Verdict(SURVIVES, RULE_POWER_SUM, "analytic", evidence)
    if summable is None:
        terms = np.exp(t * _log_strict(schedule, np.arange(10_000), t * m))
        evidence["power_sum_partial"] = float(terms.sum())

    vanishes = schedule.reach_upper_bound_vanishes()
    evidence["reach_bound_vanishes"] = vanishes
    if m == 1:
        evidence["reach_bound"] = {n: upper_bound_reach_heterogeneous(schedule, n) for n in (10, 100, 1000)}
        if vanishes:
            return Verdict(DIES, RULE_REACH_BOUND, "analytic", evidence)
    if float(schedule.tail(0, 1)) == 0.0:
        # R_0 = 0 surely and u_1 >= 1
        return Verdict(DIES, RULE_ORIGIN_SILENT, "analytic", evidence)
    return Verdict(INCONCLUSIVE, None, None, evidence)


# ---------------------------------------------------------------------------
# reverse classifiers


def classify_reverse_homogeneous(dist: RadiusDistribution) -> Verdict:
    p_silent = dist.strict_cdf(1)
    if p_silent == 0.0:
        return Verdict(SURVIVES_AS, RULE_DEGENERATE_SURE, "analytic", {"P(R<1)": 0.0})
    if p_silent == 1.0:
        return Verdict(DIES, RULE_DEGENERATE_DEAD, "analytic", {"P(R<1)": 1.0})
    mu = dist.mean()
    if math.isinf(mu):
        return Verdict(SURVIVES_AS, RULE_INFINITE_MEAN, "analytic", {"mean": mu})
    return Verdict(DIES, RULE_FINITE_MEAN, "analytic", {"mean": mu})


def classify_reverse_heterogeneous(
    schedule,
    probe_depths=(0, 1, 10, 100),
    *,
    domination: Domination | None = None,
    sum_depth: int = 10_000,
) -> Verdict:
    """Reach-back divergence, then rho finiteness, then coupling."""
    schedule = as_schedule(schedule)
    evidence: dict = {}
    k = np.arange(1, sum_depth + 1)
    evidence["reach_back_partial_sums"] = {
        n: float(np.sum(schedule.tail(n + k, k))) for n in probe_depths
    }
    homogeneous = isinstance(schedule, HomogeneousSchedule)
    if homogeneous:
        p_silent = schedule.dist.strict_cdf(1)
        if p_silent in (0.0, 1.0):
            return classify_reverse_homogeneous(schedule.dist)

    diverges = schedule.reach_back_sum_diverges()
    evidence["reach_back_diverges"] = diverges
    if diverges:
        return Verdict(SURVIVES_AS, RULE_REACH_BACK_DIVERGES, "analytic", evidence, sum_depth)

    rho = schedule.rho_finite()
    evidence["rho_finite"] = rho
    kk = np.arange(1, 1001)
    inner = [float(np.exp(_log_strict(schedule, n + kk, kk).sum())) for n in range(1, 201)]
    evidence["rho_partial_200"] = math.fsum(inner)
    if rho:
        return Verdict(SURVIVES, RULE_RHO_FINITE, "analytic", evidence, sum_depth)

    if homogeneous and domination is None:
        domination = Domination(schedule.dist, "above")
        tier = "analytic"
    else:
        tier = "heuristic"
    if domination is not None and domination.relation in ("above", "below"):
        holds = homogeneous and domination.law == schedule.dist or _probe_domination(schedule, domination)
        evidence["domination_probe_holds"] = holds
        ref = classify_reverse_homogeneous(domination.law)
        evidence["reference"] = ref.to_dict()
        if holds and domination.relation == "above" and ref.classification == DIES:
            return Verdict(DIES, RULE_COUPLED_BELOW, tier, evidence)
        if holds and domination.relation == "below" and ref.classification == SURVIVES_AS:
            return Verdict(SURVIVES_AS, RULE_COUPLED_ABOVE, tier, evidence)
    return Verdict(INCONCLUSIVE, None, None, evidence)


# ---------------------------------------------------------------------------
# products and bounds


def exact_reach_prob(schedule, m: int, n: int, layout: VertexLayout | None = None) -> float:
    """``prod_{j<n} (1 - a_j)`` for the arithmetic layout ``u_i = m i``.

    This is the FKG lower bound on ``P(V_n)``. It equals ``P(V_n)`` when every
    radius is below ``2m`` (each explosion can reach at most the next vertex);
    larger radii make the events positively correlated and the product strict.
    """
    if layout is not None and layout.arithmetic_step() != m:
        raise ValueError("exact reach product needs the arithmetic layout u_i = m i")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1.0
    log_a = log_a_sequence(schedule, m, n - 1)
    with np.errstate(divide="ignore"):
        return float(np.exp(np.sum(np.log1p(-np.exp(log_a)))))


def _power_law_a_tail(dist: PowerLaw, m: int, J: int, a_J: float) -> float | None:
    """Certified bound on ``sum_{n>J} a_n`` for a homogeneous power law, alpha < 2.

    Uses ``P(R >= k) >= c (k+1)**-beta`` (``c = Z/(alpha-1)``, ``beta = alpha-1``),
    so ``a_n <= a_J exp(-K((n+3)**g - (J+3)**g))`` with ``g = 1 - beta`` and
    ``K = c m**-beta / g``; the sum is bounded by the integral of that envelope,
    an upper incomplete gamma function.
    """
    if dist.alpha >= 2.0:
        return None
    beta = dist.alpha - 1.0
    g = 1.0 - beta
    K = dist.Z / beta * m ** (-beta) / g
    y0 = mpmath.mpf(J + 3) ** g
    # int_{J+3}^inf exp(-K (s**g - y0)) ds
    integral = mpmath.exp(K * y0) * mpmath.gammainc(1 / g, K * y0) / (g * mpmath.mpf(K) ** (1 / g))
    return float(a_J * integral * (1 + 1e-12))


def lower_bound_firework(schedule, m: int = 1, J: int = 1000) -> BoundEntry:
    """``prod_{j=0}^{J} (1 - a_j)`` plus, when certified, the tail factor
    ``exp(-eps / (1 - max_{j>J} a_j))`` for ``eps >= sum_{j>J} a_j``."""
    if J < 0:
        raise ValueError("J must be >= 0")
    schedule = as_schedule(schedule)
    log_a = log_a_sequence(schedule, m, J)
    a = np.exp(log_a)
    with np.errstate(divide="ignore"):
        log_prod = float(np.sum(np.log1p(-a)))
    cert: dict = {}
    a_J = float(a[-1])
    eps = None
    homogeneous = isinstance(schedule, HomogeneousSchedule)
    if homogeneous and a_J == 0.0:
        eps = 0.0  # a_n = a_{n-1} P(R < (n+1) m): zero stays zero
    elif homogeneous and isinstance(schedule.dist, PowerLaw):
        eps = _power_law_a_tail(schedule.dist, m, J, a_J)
    else:
        eps = schedule.a_tail_bound(m, J, a_J)
    cert["truncated_product"] = math.exp(log_prod) if log_prod > -745 else 0.0
    rigorous = False
    if eps is not None and a_J < 1.0:
        # tails are nonincreasing in n for every certified family, so max_{j>J} a_j <= a_J
        factor_log = -eps / (1.0 - a_J) if eps > 0 else 0.0
        log_prod += factor_log
        cert.update(tail_sum_bound=eps, tail_factor=math.exp(factor_log))
        rigorous = True
    value = math.exp(log_prod) if log_prod > -745 else 0.0
    return BoundEntry(value, rigorous, {"J": J, "m": m}, cert)


def upper_bound_firework_homogeneous(dist: RadiusDistribution, n: int) -> BoundEntry:
    """``1 - P(R=0) - sum_{k=1}^{n} P(R=k) prod_{j<k} P(R <= j)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(1, n + 1)
    with np.errstate(divide="ignore"):
        log_cdf = np.log(np.asarray(dist.cdf(np.arange(n)), dtype=np.float64))
    log_prod = np.cumsum(log_cdf)  # log prod_{j=0}^{k-1} P(R <= j)
    terms = np.asarray(dist.pmf(k)) * np.exp(log_prod)
    value = 1.0 - float(dist.pmf(0)) - math.fsum(terms)
    return BoundEntry(max(value, 0.0), True, {"n": n})


def upper_bound_reach_heterogeneous(schedule, n: int) -> float:
    """``min(1, sum_{k<n} P(R_k >= n - k))`` bounding ``P(V_n)`` for ``u_i = i``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    schedule = as_schedule(schedule)
    k = np.arange(n)
    return min(1.0, math.fsum(np.asarray(schedule.tail(k, n - k), dtype=np.float64).tolist()))


def lower_bound_reverse(schedule, N: int = 1000, K: int = 1000) -> BoundEntry:
    """``prod_{n=0}^{N} [1 - prod_{j=1}^{K} (1 - P(R_{n+j} >= j))]`` in log space.

    Truncating the inner product at K can only shrink each factor, so the
    value is a rigorous lower bound whenever the outer tail is certified.
    """
    if N < 1 or K < 1:
        raise ValueError("N and K must be >= 1")
    schedule = as_schedule(schedule)
    j = np.arange(1, K + 1)
    if isinstance(schedule, HomogeneousSchedule):
        inner = float(np.exp(_log_strict(schedule, 0, j).sum()))
        with np.errstate(divide="ignore"):
            log_value = (N + 1) * math.log1p(-inner) if inner < 1 else -math.inf
    else:
        n = np.arange(N + 1)[:, None]
        inner_log = _log_strict(schedule, n + j[None, :], j[None, :]).sum(axis=1)
        with np.errstate(divide="ignore"):
            log_value = float(np.sum(np.log1p(-np.exp(inner_log))))
    eps = schedule.rho_tail_bound(N)
    cert: dict = {"truncated_product": math.exp(log_value) if log_value > -745 else 0.0}
    rigorous = False
    if eps is not None:
        if eps == 0.0:
            rigorous = True
            cert["outer_tail_sum_bound"] = 0.0
        else:
            # outer factors beyond N are 1 - inner_n with inner_n <= eps < 1
            if eps < 1.0:
                factor_log = -eps / (1.0 - eps)
                log_value += factor_log
                rigorous = True
                cert.update(outer_tail_sum_bound=eps, tail_factor=math.exp(factor_log))
    value = math.exp(log_value) if log_value > -745 else 0.0
    return BoundEntry(value, rigorous, {"N": N, "K": K}, cert)


def firework_bounds(schedule, m: int = 1, depth: int = 1000) -> BoundsReport:
    schedule = as_schedule(schedule)
    lower = lower_bound_firework(schedule, m, depth)
    if isinstance(schedule, HomogeneousSchedule) and m == 1:
        upper = upper_bound_firework_homogeneous(schedule.dist, depth)
    elif m == 1:
        upper = BoundEntry(upper_bound_reach_heterogeneous(schedule, depth), False,
                           {"n": depth}, {"bounds": f"P(V_{depth})"})
    else:
        upper = None
    return BoundsReport(lower, upper)


def reverse_bounds(schedule, depth: int = 1000) -> BoundsReport:
    return BoundsReport(lower_bound_reverse(schedule, depth, depth), None)
