"""
Numerical minimization over the PSD cone.

The cone is parametrized by an unconstrained factor B with G = B^T B (the
columns of B are the vectors x, y, z). Every objective is homogeneous, so
descent runs on the unit Frobenius sphere |B| = 1, i.e. trace G = 1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .boundary import DependenceWitness, classify_equality
from .exceptions import PreconditionError
from .gram import DEFAULT_TOL, GramParams, gram_determinant, realize_vectors
from .inequalities import (
    COROLLARY_IDS,
    DEGREE,
    UNIT_WEIGHTS,
    InequalityId,
    SlackReport,
    WeightTriple,
    evaluate,
    evaluate_batch,
    xi_polynomial,
)

logger = logging.getLogger(__name__)

ARMIJO_SHRINK = 0.5
ARMIJO_C = 1e-4
MIN_STEP = 1e-20
FD_STEP = 1e-6
_START_ATTEMPTS = 100


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    max_iters: int = 2000
    step_init: float = 0.1
    grad_tol: float = 1e-8
    seed: int = 0
    objective: InequalityId = InequalityId.XI_QUARTIC
    weights: WeightTriple = UNIT_WEIGHTS
    tol: float = DEFAULT_TOL
    # acceptance of equality points and their witnesses
    equality_tol: float = 1e-7
    witness_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "objective", InequalityId(self.objective))
        if self.restarts < 1 or self.max_iters < 1:
            raise PreconditionError("restarts and max_iters must be positive")
        if min(self.step_init, self.grad_tol, self.tol, self.equality_tol, self.witness_tol) <= 0:
            raise PreconditionError("step_init, grad_tol and tolerances must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise PreconditionError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    value: float
    det: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SearchResult:
    min_value: float
    argmin_factor: np.ndarray = field(compare=False)
    argmin_gram: GramParams
    det_at_argmin: float
    iterations: int
    converged: bool
    restarts: tuple[RestartOutcome, ...] = ()
    tol: float = DEFAULT_TOL

    @property
    def stationary_points(self) -> tuple[RestartOutcome, ...]:
        """Converged restarts that stopped at a positive value."""
        return tuple(outcome for outcome in self.restarts if outcome.converged and outcome.value > self.tol)


@dataclass(frozen=True)
class EqualityPoint:
    gram: GramParams
    report: SlackReport
    witnesses: tuple[DependenceWitness, ...]
    restart: int


def gram_rows(factors: np.ndarray) -> np.ndarray:
    """(n, 3, 3) factors B to (n, 6) Gram rows of B^T B."""
    g = np.einsum("nki,nkj->nij", factors, factors)
    return np.stack(
        [g[:, 0, 0], g[:, 1, 1], g[:, 2, 2], g[:, 0, 1], g[:, 0, 2], g[:, 1, 2]],
        axis=1,
    )


def gram_of_factor(factor: np.ndarray) -> GramParams:
    return GramParams.from_array(gram_rows(np.asarray(factor, dtype=float)[None])[0])


def xi_gradient(g: GramParams) -> tuple[float, float, float, float, float, float]:
    """Exact partial derivatives of xi with respect to (a², b², c², p, q, r)."""
    a, b, c, p, q, r = g.as_tuple()
    s = a + b + c + 2.0 * (p + q + r)
    abc = a * b * c
    return (
        b * c * s + abc - (2 * a * r * r + 2 * b * q * r - 2 * c * p * r + 4 * q * r * r),
        a * c * s + abc - (2 * b * q * q + 2 * a * q * r - 2 * c * p * q + 4 * r * q * q),
        a * b * s + abc - (2 * c * p * p - 2 * a * p * r - 2 * b * p * q - 4 * p * q * r),
        2 * abc - (2 * c * c * p - 2 * a * c * r - 2 * b * c * q - 4 * c * q * r),
        2 * abc
        - (2 * b * b * q + 8 * q * r * r + 2 * a * b * r - 2 * b * c * p + 4 * a * r * r + 8 * b * r * q - 4 * c * p * r),
        2 * abc
        - (2 * a * a * r + 8 * q * q * r + 2 * a * b * q - 2 * a * c * p + 8 * a * q * r + 4 * b * q * q - 4 * c * p * q),
    )


def _factor_gradient_from_gram(factor: np.ndarray, partials) -> np.ndarray:
    """Chain rule through G = B^T B: dF/dB = 2 B M, M the symmetric matrix of partials."""
    da, db, dc, dp, dq, dr = partials
    m = np.array(
        [
            [da, dp / 2.0, dq / 2.0],
            [dp / 2.0, db, dr / 2.0],
            [dq / 2.0, dr / 2.0, dc],
        ]
    )
    return 2.0 * factor @ m


class _Objective:
    """Vectorized objective over (n, 3, 3) factors."""

    def __init__(
        self,
        inequality_id: InequalityId,
        weights: WeightTriple = UNIT_WEIGHTS,
        relative: bool = False,
        tol: float = DEFAULT_TOL,
    ):
        self.inequality_id = InequalityId(inequality_id)
        self.weights = np.array(weights.as_tuple())
        self.relative = relative
        self.tol = tol

    def values(self, factors: np.ndarray) -> np.ndarray:
        rows = gram_rows(factors)
        if self.inequality_id is InequalityId.XI_QUARTIC and not self.relative:
            return xi_polynomial(*rows.T)
        weights = np.broadcast_to(self.weights, (rows.shape[0], 3))
        sides = evaluate_batch(rows, weights, (self.inequality_id,))[self.inequality_id]
        slack = sides.lhs - sides.rhs
        if self.relative:
            slack = slack / np.maximum(np.abs(sides.lhs) + np.abs(sides.rhs), self.tol)
        if sides.mask is not None:
            slack = np.where(sides.mask, slack, np.inf)
        return slack

    def value(self, factor: np.ndarray) -> float:
        return float(self.values(factor[None])[0])

    def gradient(self, factor: np.ndarray, value: float) -> np.ndarray:
        if self.inequality_id is InequalityId.XI_QUARTIC and not self.relative:
            return _factor_gradient_from_gram(factor, xi_gradient(gram_of_factor(factor)))
        # central differences, one-sided where a neighbor leaves the objective's domain
        steps = np.eye(9).reshape(9, 3, 3) * FD_STEP
        shifted = np.concatenate([factor + steps, factor - steps])
        values = self.values(shifted)
        forward, backward = values[:9], values[9:]
        gradient = np.where(
            np.isfinite(forward) & np.isfinite(backward),
            (forward - backward) / (2.0 * FD_STEP),
            np.where(
                np.isfinite(forward),
                (forward - value) / FD_STEP,
                np.where(np.isfinite(backward), (value - backward) / FD_STEP, 0.0),
            ),
        )
        return gradient.reshape(3, 3)


def _normalize(factor: np.ndarray) -> np.ndarray:
    return factor / np.linalg.norm(factor)


def _descend(objective: _Objective, factor: np.ndarray, cfg: SearchConfig) -> tuple[np.ndarray, float, int, bool]:
    factor = _normalize(factor)
    value = objective.value(factor)
    for iteration in range(cfg.max_iters):
        gradient = objective.gradient(factor, value)
        gradient = gradient - np.sum(gradient * factor) * factor
        gradient_norm = float(np.linalg.norm(gradient))
        if gradient_norm <= cfg.grad_tol * max(1.0, abs(value)):
            return factor, value, iteration, True

        step = cfg.step_init
        while True:
            candidate = _normalize(factor - step * gradient)
            candidate_value = objective.value(candidate)
            if candidate_value <= value - ARMIJO_C * step * gradient_norm ** 2:
                break
            step *= ARMIJO_SHRINK
            if step < MIN_STEP:
                return factor, value, iteration, False
        factor, value = candidate, candidate_value
    return factor, value, cfg.max_iters, False


def _starting_factor(rng: np.random.Generator, objective: _Objective) -> np.ndarray:
    for _ in range(_START_ATTEMPTS):
        factor = rng.standard_normal((3, 3))
        if np.isfinite(objective.value(_normalize(factor))):
            return factor
    raise PreconditionError(f"no admissible starting point for {objective.inequality_id}")


def minimize_xi(cfg: SearchConfig, start: np.ndarray | None = None) -> SearchResult:
    """
    Backtracking gradient descent from cfg.restarts random factors.

    ``start`` replaces the random factor of restart 0. Each restart draws from
    its own generator seeded by (seed, restart index); ties go to the lowest
    index.
    """
    objective = _Objective(cfg.objective, cfg.weights, tol=cfg.tol)
    outcomes: list[RestartOutcome] = []
    best = None
    for index in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, index])
        if start is not None and index == 0:
            factor = np.asarray(start, dtype=float)
        else:
            factor = _starting_factor(rng, objective)
        factor, value, iterations, converged = _descend(objective, factor, cfg)
        g = gram_of_factor(factor)
        outcome = RestartOutcome(index, value, g.determinant(), iterations, converged)
        outcomes.append(outcome)
        logger.debug(
            "restart %d: value=%.3e det=%.3e iterations=%d converged=%s",
            index, value, outcome.det, iterations, converged,
        )
        if best is None or value < best[0].value:
            best = (outcome, factor, g)

    outcome, factor, g = best
    logger.info(
        "%s minimum %.3e after %d restarts (restart %d, det=%.3e)",
        cfg.objective, outcome.value, cfg.restarts, outcome.index, outcome.det,
    )
    return SearchResult(
        min_value=outcome.value,
        argmin_factor=factor,
        argmin_gram=g,
        det_at_argmin=outcome.det,
        iterations=outcome.iterations,
        converged=outcome.converged,
        restarts=tuple(outcomes),
        tol=cfg.tol,
    )


def find_equality_points(inequality_id: InequalityId | str, cfg: SearchConfig) -> list[EqualityPoint]:
    """
    Hunt equality points by minimizing the relative slack from every restart.

    Corollary ids stay on their sign of D = pqr. A point is kept when its
    slack is within cfg.equality_tol (degree-scaled); strong_hlawka points
    must also carry a dependence witness.
    """
    inequality_id = InequalityId(inequality_id)
    objective = _Objective(inequality_id, cfg.weights, relative=True, tol=cfg.tol)
    degree = DEGREE[inequality_id]
    points: list[EqualityPoint] = []
    for index in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, index])
        factor, value, iterations, _ = _descend(objective, _starting_factor(rng, objective), cfg)
        g = gram_of_factor(factor)
        report = evaluate(inequality_id, g, cfg.tol, cfg.weights)
        if inequality_id in COROLLARY_IDS and report.inequality_id is not inequality_id:
            continue
        if abs(report.slack) > cfg.equality_tol * g.scale ** degree:
            logger.debug("restart %d stopped at slack %.3e after %d iterations", index, report.slack, iterations)
            continue
        witnesses = tuple(classify_equality(realize_vectors(g, cfg.tol), cfg.witness_tol))
        if inequality_id is InequalityId.STRONG_HLAWKA and not witnesses:
            logger.info("restart %d: equality point without a dependence witness dropped", index)
            continue
        points.append(EqualityPoint(gram=g, report=report, witnesses=witnesses, restart=index))
    logger.info("%s: %d equality points from %d restarts", inequality_id, len(points), cfg.restarts)
    return points


@dataclass(frozen=True)
class GridOracleResult:
    resolution: int
    admissible_points: int
    min_value: float
    argmin_gram: GramParams


def grid_oracle(resolution: int = 13, tol: float = DEFAULT_TOL) -> GridOracleResult:
    """
    Brute-force minimum of xi over a grid of squared norms in [0, 1] and
    correlation coefficients in [-1, 1], keeping points with det G >= 0.
    """
    if resolution < 2:
        raise PreconditionError("resolution must be >= 2")
    norms = np.linspace(0.0, 1.0, resolution)
    cosines = np.linspace(-1.0, 1.0, resolution)
    b2, c2, cp, cq, cr = np.meshgrid(norms, norms, cosines, cosines, cosines, indexing="ij")
    b2, c2, cp, cq, cr = (axis.ravel() for axis in (b2, c2, cp, cq, cr))

    admissible = 0
    best_value, best_row = np.inf, None
    for a2 in norms:
        p = cp * np.sqrt(a2 * b2)
        q = cq * np.sqrt(a2 * c2)
        r = cr * np.sqrt(b2 * c2)
        scale = np.maximum(1.0, np.maximum(a2, np.maximum(b2, c2)))
        keep = gram_determinant(a2, b2, c2, p, q, r) >= -tol * scale ** 3
        admissible += int(np.count_nonzero(keep))
        values = np.where(keep, xi_polynomial(a2, b2, c2, p, q, r), np.inf)
        position = int(np.argmin(values))
        if values[position] < best_value:
            best_value = float(values[position])
            best_row = (a2, b2[position], c2[position], p[position], q[position], r[position])

    logger.info("grid oracle: %d admissible points, minimum xi %.3e", admissible, best_value)
    return GridOracleResult(
        resolution=resolution,
        admissible_points=admissible,
        min_value=best_value,
        argmin_gram=GramParams.from_array(best_row),
    )
