"""
Boundary machinery for xi: the admissible p-interval, the three linear
dependence substitutions with their factored forms, and the equality-case
classifier for the strong inequality.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .exceptions import FreeBlockError, NotPsdError, PreconditionError
from .gram import (
    DEFAULT_TOL,
    GramParams,
    VectorTriple,
    gram_from_vectors,
    relative_residual,
)
from .inequalities import strong_hlawka_slack, xi_polynomial, xi_quartic

logger = logging.getLogger(__name__)


class CaseTag(str, Enum):
    CASE_I = "case_i"  # z = lam x + mu y
    CASE_II = "case_ii"  # x = lam y + mu z
    CASE_III = "case_iii"  # y = lam x + mu z

    def __str__(self):
        return self.value


# Free Gram parameters of each case, ordered (first, second, cross).
FREE_KEYS = {
    CaseTag.CASE_I: ("nsq_x", "nsq_y", "p"),
    CaseTag.CASE_II: ("nsq_y", "nsq_z", "r"),
    CaseTag.CASE_III: ("nsq_x", "nsq_z", "q"),
}

# Row indices (dependent, first spanning, second spanning) into (x, y, z).
CASE_ROLES = {
    CaseTag.CASE_I: (2, 0, 1),
    CaseTag.CASE_II: (0, 1, 2),
    CaseTag.CASE_III: (1, 0, 2),
}


@dataclass(frozen=True)
class DependenceCase:
    tag: CaseTag
    lam: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tag", CaseTag(self.tag))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))


@dataclass(frozen=True)
class DependenceWitness:
    case: DependenceCase
    dependence_residual: float
    condition_residual: float

    @property
    def worst_residual(self) -> float:
        return max(self.dependence_residual, self.condition_residual)

    def accepted(self, tol: float = DEFAULT_TOL) -> bool:
        # residuals are first order in the distance to the equality set, the slack is second order
        return self.worst_residual <= math.sqrt(tol)


class PIntervalKind(str, Enum):
    INTERVAL = "interval"
    FULL_SEGMENT = "full_segment"
    EMPTY = "empty"
    POINT = "point"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PInterval:
    kind: PIntervalKind
    lo: float | None = None
    hi: float | None = None


def free_block(tag: CaseTag, g: GramParams) -> dict[str, float]:
    """The free parameters of a case read off a full Gram point."""
    return {key: getattr(g, key) for key in FREE_KEYS[CaseTag(tag)]}


def _free_values(case: DependenceCase, free: Mapping[str, float], tol: float) -> tuple[float, float, float]:
    keys = FREE_KEYS[case.tag]
    if set(free) != set(keys):
        raise FreeBlockError(
            f"{case.tag} takes free parameters {', '.join(keys)}; got {', '.join(sorted(free)) or 'none'}"
        )
    first, second, cross = (float(free[key]) for key in keys)
    scale = max(1.0, first, second)
    if min(first, second) < -tol * scale or first * second - cross * cross < -tol * scale ** 2:
        raise NotPsdError(f"free block {dict(free)} of {case.tag} is not positive semidefinite")
    return max(first, 0.0), max(second, 0.0), cross


def condition_value(case: DependenceCase, first: float, second: float, cross: float) -> float:
    """The second factor of the factored xi, before squaring."""
    lam, mu = case.lam, case.mu
    if case.tag is CaseTag.CASE_I:
        return first * lam * (lam + 1.0) - second * mu * (mu + 1.0)
    return first * lam * (lam + 1.0) + second * mu * (mu + 1.0) + 2.0 * lam * (mu + 1.0) * cross


def substitute_dependence(
    case: DependenceCase, free: Mapping[str, float], tol: float = DEFAULT_TOL
) -> GramParams:
    first, second, cross = _free_values(case, free, tol)
    lam, mu = case.lam, case.mu
    dependent = max(lam * lam * first + mu * mu * second + 2.0 * lam * mu * cross, 0.0)
    with_first = lam * first + mu * cross
    with_second = lam * cross + mu * second

    if case.tag is CaseTag.CASE_I:
        return GramParams(first, second, dependent, p=cross, q=with_first, r=with_second)
    if case.tag is CaseTag.CASE_II:
        return GramParams(dependent, first, second, p=with_first, q=with_second, r=cross)
    return GramParams(first, dependent, second, p=with_first, q=cross, r=with_second)


def factored_xi(case: DependenceCase, free: Mapping[str, float], tol: float = DEFAULT_TOL) -> float:
    first, second, cross = _free_values(case, free, tol)
    return (first * second - cross * cross) * condition_value(case, first, second, cross) ** 2


def identity_residual(case: DependenceCase, free: Mapping[str, float], tol: float = DEFAULT_TOL) -> float:
    g = substitute_dependence(case, free, tol)
    return relative_residual(xi_quartic(g), factored_xi(case, free, tol), g.scale, 4)


def solve_condition_mu(case: DependenceCase, lam: float, free: Mapping[str, float], tol: float = DEFAULT_TOL) -> list[float]:
    """Real mu making the case condition vanish for a fixed lam."""
    first, second, cross = _free_values(case, free, tol)
    if case.tag is CaseTag.CASE_I:
        coefficients = [-second, -second, first * lam * (lam + 1.0)]
    else:
        coefficients = [second, second + 2.0 * lam * cross, first * lam * (lam + 1.0) + 2.0 * lam * cross]
    if not any(coefficients):
        return [0.0]
    roots = np.roots(coefficients)
    real = [float(root.real) for root in roots if abs(root.imag) <= 1e-12 * max(1.0, abs(root.real))]
    return sorted(real)


def p_interval(a2: float, b2: float, c2: float, q: float, r: float, tol: float = DEFAULT_TOL) -> PInterval:
    """{p : det G >= 0} within the Cauchy-Schwarz segment [-ab, ab]."""
    scale = max(1.0, a2, b2, c2)
    if min(a2, b2, c2) < -tol * scale:
        raise PreconditionError("squared norms must be nonnegative")
    a2, b2, c2 = max(a2, 0.0), max(b2, 0.0), max(c2, 0.0)
    if abs(q) > math.sqrt(a2 * c2) + tol * scale or abs(r) > math.sqrt(b2 * c2) + tol * scale:
        raise PreconditionError(f"q={q!r} or r={r!r} exceeds its Cauchy-Schwarz bound")

    bound = math.sqrt(a2 * b2)
    if c2 <= tol * scale:
        return PInterval(PIntervalKind.FULL_SEGMENT, -bound, bound)

    # det G(p) = -c2 p² + 2qr p + (a2 b2 c2 - a2 r² - b2 q²)
    quarter_disc = (q * r) ** 2 + c2 * (a2 * b2 * c2 - a2 * r * r - b2 * q * q)
    if quarter_disc < -tol * scale ** 4:
        return PInterval(PIntervalKind.EMPTY)
    center = q * r / c2
    half_width = math.sqrt(max(quarter_disc, 0.0)) / c2
    if half_width <= tol * scale:
        point = min(max(center, -bound), bound)
        return PInterval(PIntervalKind.POINT, point, point)
    lo, hi = max(center - half_width, -bound), min(center + half_width, bound)
    if lo > hi:
        return PInterval(PIntervalKind.EMPTY)
    return PInterval(PIntervalKind.INTERVAL, lo, hi)


def endpoint_dominance_check(
    a2: float, b2: float, c2: float, q: float, r: float, samples: int = 101, tol: float = DEFAULT_TOL
) -> bool:
    interval = p_interval(a2, b2, c2, q, r, tol)
    if interval.kind is PIntervalKind.EMPTY:
        raise PreconditionError("no admissible p for these parameters")
    if interval.kind is PIntervalKind.POINT:
        return True
    scale = max(1.0, a2, b2, c2)
    interior = np.linspace(interval.lo, interval.hi, samples + 2)[1:-1]
    values = xi_polynomial(a2, b2, c2, interior, q, r)
    floor = min(
        xi_polynomial(a2, b2, c2, interval.lo, q, r),
        xi_polynomial(a2, b2, c2, interval.hi, q, r),
    )
    return bool(np.all(values >= floor - tol * scale ** 4))


def _quadratic_roots(f_minus: float, f_zero: float, f_plus: float, tol: float) -> list[float]:
    """Real roots of the quadratic through (-1, f_minus), (0, f_zero), (1, f_plus)."""
    a = (f_plus + f_minus) / 2.0 - f_zero
    b = (f_plus - f_minus) / 2.0
    c = f_zero
    size = max(abs(a), abs(b), abs(c))
    if size == 0.0:
        return [0.0]
    coefficients = [a, b, c]
    if abs(a) <= tol * size:
        coefficients = [b, c]
        if abs(b) <= tol * size:
            return []
    roots = np.roots(coefficients)
    return [float(root.real) for root in roots if abs(root.imag) <= 1e-9 * max(1.0, abs(root.real))]


def _dependence_coefficients(
    tag: CaseTag, vectors: np.ndarray, g: GramParams, tol: float
) -> tuple[float, float]:
    dependent, i, j = CASE_ROLES[tag]
    target = vectors[dependent]
    span = np.column_stack([vectors[i], vectors[j]])
    u, singular, vt = np.linalg.svd(span, full_matrices=False)
    cutoff = math.sqrt(tol * g.scale)

    if singular[0] <= cutoff:
        return 0.0, 0.0
    if singular[1] > cutoff:
        lam, mu = vt.T @ ((u.T @ target) / singular)
        return float(lam), float(mu)

    # collinear spanning pair: coefficients form a line, pick the point meeting the condition
    particular = vt[0] * (u[:, 0] @ target) / singular[0]
    direction = vt[1]
    first, second, cross = free_block(tag, g).values()

    def condition_along(step: float) -> float:
        lam, mu = particular + step * direction
        return condition_value(DependenceCase(tag, lam, mu), first, second, cross)

    steps = _quadratic_roots(condition_along(-1.0), condition_along(0.0), condition_along(1.0), tol)
    step = min(steps, key=abs) if steps else 0.0
    lam, mu = particular + step * direction
    return float(lam), float(mu)


def classify_equality(t: VectorTriple, tol: float = DEFAULT_TOL) -> list[DependenceWitness]:
    """
    Every dependence case whose coefficients reproduce the triple and satisfy
    the case condition. Cases are not exclusive; all matches are returned.

    The list is nonempty exactly when the strong slack is an equality at tol.
    Squaring loses the sign of R_bold, so the conditions also hold at some
    strict points with R_bold < 0; the slack gate rules those out. Near the
    equality set no case may pass its residual check; the closest case is
    then returned alone.
    """
    strong = strong_hlawka_slack(t, tol)
    if not strong.is_equality:
        logger.debug("strong slack %.3e is not an equality", strong.slack)
        return []

    g = gram_from_vectors(t)
    scale = g.scale

    vectors = t.as_array()
    if vectors.shape[1] < 2:
        vectors = np.pad(vectors, ((0, 0), (0, 2 - vectors.shape[1])))
    witnesses: list[DependenceWitness] = []
    candidates: list[DependenceWitness] = []
    for tag in CaseTag:
        lam, mu = _dependence_coefficients(tag, vectors, g, tol)
        case = DependenceCase(tag, lam, mu)
        dependent, i, j = CASE_ROLES[tag]
        dependence_residual = float(
            np.linalg.norm(lam * vectors[i] + mu * vectors[j] - vectors[dependent]) / math.sqrt(scale)
        )
        first, second, cross = free_block(tag, g).values()
        condition_residual = abs(condition_value(case, first, second, cross)) / (
            scale * (1.0 + lam * lam + mu * mu)
        )
        witness = DependenceWitness(case, dependence_residual, condition_residual)
        candidates.append(witness)
        if witness.accepted(tol):
            witnesses.append(witness)
        else:
            logger.debug("rejected %s: %s", tag, witness)
    if not witnesses:
        best = min(candidates, key=lambda w: w.worst_residual)
        logger.debug("equality with no accepted case, keeping closest %s", best)
        witnesses.append(best)
    return witnesses
