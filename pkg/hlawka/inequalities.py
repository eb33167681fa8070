"""
Slack evaluators for the Hornich-Hlawka family of inequalities.

Every evaluator reports lhs, rhs and slack = lhs - rhs. Vector-side
evaluators work on concrete coordinates; Gram-side evaluators consume the six
Gram parameters. ``evaluate_batch`` computes all of them from an (n, 6) Gram
array, since every norm appearing in the family is a function of the Gram
matrix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .exceptions import NonFiniteError, PreconditionError
from .gram import (
    DEFAULT_TOL,
    GramParams,
    VectorTriple,
    gram_from_vectors,
    realize_vectors,
    require_psd,
)

logger = logging.getLogger(__name__)


class InequalityId(str, Enum):
    CLASSICAL_HLAWKA = "classical_hlawka"
    STRONG_HLAWKA = "strong_hlawka"
    REDUCED_SCALAR = "reduced_scalar"
    XI_QUARTIC = "xi_quartic"
    GRAM_QUADRATIC_Q = "gram_quadratic_Q"
    SUBSTITUTED_R = "substituted_R"
    COROLLARY_POS = "corollary_pos"
    COROLLARY_NEG = "corollary_neg"
    GRAM_DET_IDENTITY = "gram_det_identity"
    CAUCHY_SCHWARZ = "cauchy_schwarz"

    def __str__(self):
        return self.value


# homogeneity degree in the Gram parameters
DEGREE = {
    InequalityId.CLASSICAL_HLAWKA: 1,
    InequalityId.STRONG_HLAWKA: 2,
    InequalityId.REDUCED_SCALAR: 2,
    InequalityId.XI_QUARTIC: 4,
    InequalityId.GRAM_QUADRATIC_Q: 1,
    InequalityId.SUBSTITUTED_R: 3,
    InequalityId.COROLLARY_POS: 3,
    InequalityId.COROLLARY_NEG: 3,
    InequalityId.GRAM_DET_IDENTITY: 3,
    InequalityId.CAUCHY_SCHWARZ: 3,
}

ALL_INEQUALITIES = tuple(InequalityId)
VECTOR_SIDE = frozenset({InequalityId.CLASSICAL_HLAWKA, InequalityId.STRONG_HLAWKA})
COROLLARY_IDS = frozenset({InequalityId.COROLLARY_POS, InequalityId.COROLLARY_NEG})


@dataclass(frozen=True)
class SlackReport:
    inequality_id: InequalityId
    lhs: float
    rhs: float
    slack: float
    is_equality: bool
    scale: float = 1.0

    @property
    def degree(self) -> int:
        return DEGREE[self.inequality_id]

    @property
    def scaled_slack(self) -> float:
        return self.slack / self.scale ** self.degree


def make_report(inequality_id: InequalityId, lhs: float, rhs: float, scale: float, tol: float) -> SlackReport:
    inequality_id = InequalityId(inequality_id)
    lhs, rhs = float(lhs), float(rhs)
    slack = lhs - rhs
    return SlackReport(
        inequality_id=inequality_id,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        is_equality=abs(slack) <= tol * scale ** DEGREE[inequality_id],
        scale=scale,
    )


@dataclass(frozen=True)
class ReducedForms:
    L_bold: float
    R_bold: float
    xi: float


@dataclass(frozen=True)
class WeightTriple:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise NonFiniteError(f"weight {name} must be finite")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    @property
    def norm_sq(self) -> float:
        return self.alpha ** 2 + self.beta ** 2 + self.gamma ** 2


UNIT_WEIGHTS = WeightTriple(1.0, 1.0, 1.0)


# Polynomial kernels. Arguments may be floats or equally shaped arrays.

def _root(value):
    return np.sqrt(np.maximum(value, 0.0))


def xi_terms(a2, b2, c2, p, q, r):
    """The two products whose difference is xi: (L_bold², R_bold²) expanded."""
    first = a2 * b2 * c2 * (a2 + b2 + c2 + 2.0 * p + 2.0 * q + 2.0 * r)
    subtrahend = (
        a2 * a2 * r * r
        + b2 * b2 * q * q
        + c2 * c2 * p * p
        + 4.0 * q * q * r * r
        + 2.0 * a2 * b2 * q * r
        - 2.0 * a2 * c2 * p * r
        - 2.0 * b2 * c2 * p * q
        + 4.0 * a2 * q * r * r
        + 4.0 * b2 * r * q * q
        - 4.0 * c2 * p * q * r
    )
    return first, subtrahend


def xi_polynomial(a2, b2, c2, p, q, r):
    first, subtrahend = xi_terms(a2, b2, c2, p, q, r)
    return first - subtrahend


def reduced_rhs(a2, b2, c2, p, q, r):
    return a2 * r + b2 * q - c2 * p + 2.0 * q * r


def quadratic_form(a2, b2, c2, p, q, r, alpha, beta, gamma):
    return (
        alpha * alpha * a2
        + beta * beta * b2
        + gamma * gamma * c2
        + 2.0 * alpha * beta * p
        + 2.0 * alpha * gamma * q
        + 2.0 * beta * gamma * r
    )


def substituted_form(a2, b2, c2, p, q, r, alpha, beta, gamma):
    return (
        alpha * alpha * a2 * r * r
        + beta * beta * b2 * q * q
        + gamma * gamma * c2 * p * p
        + 2.0 * (alpha * beta + alpha * gamma + beta * gamma) * p * q * r
    )


def corollary_sides(a2, b2, c2, p, q, r):
    """(lhs, rhs, D) with rhs = 3D for D > 0, -6D for D < 0 and 0 for D = 0."""
    d = p * q * r
    lhs = a2 * r * r + b2 * q * q + c2 * p * p
    rhs = np.where(d > 0, 3.0 * d, np.where(d < 0, -6.0 * d, 0.0))
    return lhs, rhs, d


# Vector-side evaluators

def _norm(v) -> float:
    return float(np.linalg.norm(v))


def classical_hlawka_slack(t: VectorTriple, tol: float = DEFAULT_TOL) -> SlackReport:
    x, y, z = t.as_array()
    lhs = _norm(x) + _norm(y) + _norm(z) + _norm(x + y + z)
    rhs = _norm(x + y) + _norm(x + z) + _norm(y + z)
    return make_report(InequalityId.CLASSICAL_HLAWKA, lhs, rhs, gram_from_vectors(t).scale, tol)


def strong_hlawka_slack(t: VectorTriple, tol: float = DEFAULT_TOL) -> SlackReport:
    x, y, z = t.as_array()
    lhs = _norm(x) * _norm(y) + _norm(z) * _norm(x + y + z)
    rhs = _norm(x + z) * _norm(y + z)
    return make_report(InequalityId.STRONG_HLAWKA, lhs, rhs, gram_from_vectors(t).scale, tol)


def cyclic_strong_decomposition(t: VectorTriple) -> tuple[float, float, float]:
    """
    The three strong-type slacks whose sum is half the difference of squares
    of the classical sides:

        |x||y| + |z||s| - |y+z||z+x|
        |y||z| + |x||s| - |z+x||x+y|
        |z||x| + |y||s| - |x+y||y+z|

    with s = x + y + z.
    """
    x, y, z = t.as_array()
    s = _norm(x + y + z)
    nx, ny, nz = _norm(x), _norm(y), _norm(z)
    nxy, nyz, nzx = _norm(x + y), _norm(y + z), _norm(z + x)
    return (
        nx * ny + nz * s - nyz * nzx,
        ny * nz + nx * s - nzx * nxy,
        nz * nx + ny * s - nxy * nyz,
    )


# Gram-side evaluators

def reduced_forms(g: GramParams, tol: float = DEFAULT_TOL) -> ReducedForms:
    require_psd(g, tol)
    radicand = g.trace + 2.0 * (g.p + g.q + g.r)
    if radicand < 0.0:
        logger.debug("clamping radicand %.3e to zero", radicand)
    l_bold = g.a * g.b * g.c * math.sqrt(max(radicand, 0.0))
    r_bold = float(reduced_rhs(*g.as_tuple()))
    return ReducedForms(L_bold=l_bold, R_bold=r_bold, xi=l_bold * l_bold - r_bold * r_bold)


def xi_quartic(g: GramParams) -> float:
    return float(xi_polynomial(*g.as_tuple()))


def gram_quadratic_Q(g: GramParams, w: WeightTriple = UNIT_WEIGHTS) -> float:
    return float(quadratic_form(*g.as_tuple(), *w.as_tuple()))


def substituted_R(g: GramParams, w: WeightTriple = UNIT_WEIGHTS) -> float:
    return float(substituted_form(*g.as_tuple(), *w.as_tuple()))


def corollary_slack(g: GramParams, tol: float = DEFAULT_TOL) -> SlackReport:
    require_psd(g, tol)
    lhs, rhs, d = corollary_sides(*g.as_tuple())
    inequality_id = InequalityId.COROLLARY_NEG if d < 0 else InequalityId.COROLLARY_POS
    return make_report(inequality_id, lhs, rhs, g.scale, tol)


def gram_det_identity_slack(g: GramParams, tol: float = DEFAULT_TOL) -> SlackReport:
    lhs = g.nsq_x * g.nsq_y * g.nsq_z + 2.0 * g.p * g.q * g.r
    rhs = g.nsq_x * g.r ** 2 + g.nsq_y * g.q ** 2 + g.nsq_z * g.p ** 2
    return make_report(InequalityId.GRAM_DET_IDENTITY, lhs, rhs, g.scale, tol)


def cauchy_schwarz_slack(x, y, tol: float = DEFAULT_TOL) -> SlackReport:
    """The corollary on (x, y, y): |x|²|y|⁴ - <x,y>²|y|² >= 0."""
    g = gram_from_vectors(VectorTriple(x, y, y))
    report = corollary_slack(g, tol)
    return make_report(InequalityId.CAUCHY_SCHWARZ, report.lhs, report.rhs, g.scale, tol)


WITNESSES: Mapping[str, VectorTriple] = {
    "ones": VectorTriple((1.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
    "planar120": VectorTriple(
        (1.0, 0.0, 0.0),
        (0.5, math.sqrt(3.0) / 2.0, 0.0),
        (0.5, -math.sqrt(3.0) / 2.0, 0.0),
    ),
}


def evaluate(
    inequality_id: InequalityId | str,
    value: VectorTriple | GramParams,
    tol: float = DEFAULT_TOL,
    weights: WeightTriple = UNIT_WEIGHTS,
) -> SlackReport:
    """Single-input dispatcher over every inequality id."""
    inequality_id = InequalityId(inequality_id)
    if inequality_id in VECTOR_SIDE or inequality_id is InequalityId.CAUCHY_SCHWARZ:
        triple = value if isinstance(value, VectorTriple) else realize_vectors(value, tol)
        if inequality_id is InequalityId.CLASSICAL_HLAWKA:
            return classical_hlawka_slack(triple, tol)
        if inequality_id is InequalityId.STRONG_HLAWKA:
            return strong_hlawka_slack(triple, tol)
        return cauchy_schwarz_slack(triple.x, triple.y, tol)

    g = value if isinstance(value, GramParams) else gram_from_vectors(value)
    if inequality_id is InequalityId.REDUCED_SCALAR:
        forms = reduced_forms(g, tol)
        return make_report(inequality_id, forms.L_bold, forms.R_bold, g.scale, tol)
    if inequality_id is InequalityId.XI_QUARTIC:
        return make_report(inequality_id, xi_quartic(g), 0.0, g.scale, tol)
    if inequality_id is InequalityId.GRAM_QUADRATIC_Q:
        return make_report(inequality_id, gram_quadratic_Q(g, weights), 0.0, g.scale, tol)
    if inequality_id is InequalityId.SUBSTITUTED_R:
        return make_report(inequality_id, substituted_R(g, weights), 0.0, g.scale, tol)
    if inequality_id in COROLLARY_IDS:
        return corollary_slack(g, tol)
    return gram_det_identity_slack(g, tol)


class BatchSides(NamedTuple):
    lhs: np.ndarray
    rhs: np.ndarray
    # rows the inequality applies to; None means every row
    mask: np.ndarray | None = None


def evaluate_batch(
    gram: np.ndarray,
    weights: np.ndarray | None = None,
    inequality_ids: Iterable[InequalityId] = ALL_INEQUALITIES,
) -> dict[InequalityId, BatchSides]:
    """
    Sides of each requested inequality for an (n, 6) array of Gram rows.

    ``weights`` is an (n, 3) array of (alpha, beta, gamma) per row for the
    Q and R forms; unit weights when omitted.
    """
    gram = np.atleast_2d(np.asarray(gram, dtype=float))
    if gram.shape[1] != 6:
        raise PreconditionError(f"expected an (n, 6) Gram array, got shape {gram.shape}")
    a2, b2, c2, p, q, r = gram.T
    if weights is None:
        alpha = beta = gamma = np.ones_like(a2)
    else:
        alpha, beta, gamma = np.atleast_2d(np.asarray(weights, dtype=float)).T

    na, nb, nc = _root(a2), _root(b2), _root(c2)
    ns = _root(a2 + b2 + c2 + 2.0 * (p + q + r))
    nxy, nxz, nyz = _root(a2 + b2 + 2.0 * p), _root(a2 + c2 + 2.0 * q), _root(b2 + c2 + 2.0 * r)
    zeros = np.zeros_like(a2)

    sides: dict[InequalityId, BatchSides] = {}
    for inequality_id in map(InequalityId, inequality_ids):
        if inequality_id is InequalityId.CLASSICAL_HLAWKA:
            sides[inequality_id] = BatchSides(na + nb + nc + ns, nxy + nxz + nyz)
        elif inequality_id is InequalityId.STRONG_HLAWKA:
            sides[inequality_id] = BatchSides(na * nb + nc * ns, nxz * nyz)
        elif inequality_id is InequalityId.REDUCED_SCALAR:
            sides[inequality_id] = BatchSides(na * nb * nc * ns, reduced_rhs(a2, b2, c2, p, q, r))
        elif inequality_id is InequalityId.XI_QUARTIC:
            sides[inequality_id] = BatchSides(*xi_terms(a2, b2, c2, p, q, r))
        elif inequality_id is InequalityId.GRAM_QUADRATIC_Q:
            sides[inequality_id] = BatchSides(quadratic_form(a2, b2, c2, p, q, r, alpha, beta, gamma), zeros)
        elif inequality_id is InequalityId.SUBSTITUTED_R:
            sides[inequality_id] = BatchSides(substituted_form(a2, b2, c2, p, q, r, alpha, beta, gamma), zeros)
        elif inequality_id in COROLLARY_IDS:
            lhs, rhs, d = corollary_sides(a2, b2, c2, p, q, r)
            mask = d < 0 if inequality_id is InequalityId.COROLLARY_NEG else d >= 0
            sides[inequality_id] = BatchSides(lhs, rhs, mask)
        elif inequality_id is InequalityId.GRAM_DET_IDENTITY:
            sides[inequality_id] = BatchSides(
                a2 * b2 * c2 + 2.0 * p * q * r,
                a2 * r * r + b2 * q * q + c2 * p * p,
            )
        else:
            # corollary on (x, y, y): nsq_z = b², q = p, r = b²
            d = p * p * b2
            lhs = a2 * b2 * b2 + 2.0 * b2 * p * p
            sides[inequality_id] = BatchSides(lhs, np.where(d > 0, 3.0 * d, 0.0))
    return sides
