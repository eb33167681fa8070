"""
Suite runners behind the management commands: randomized verification,
polynomial identity checks and the built-in sharpness witnesses.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .boundary import (
    FREE_KEYS,
    CaseTag,
    DependenceCase,
    DependenceWitness,
    PInterval,
    classify_equality,
    factored_xi,
    p_interval,
    substitute_dependence,
)
from .exceptions import PreconditionError
from .gram import (
    DEFAULT_TOL,
    GramParams,
    PsdReport,
    SampleConfig,
    ScaleLaw,
    VectorTriple,
    chunk_rng,
    gram_from_vectors,
    iter_sample_chunks,
    psd_check,
    relative_residual,
)
from .inequalities import (
    ALL_INEQUALITIES,
    DEGREE,
    WITNESSES,
    InequalityId,
    ReducedForms,
    SlackReport,
    WeightTriple,
    corollary_slack,
    evaluate_batch,
    gram_det_identity_slack,
    gram_quadratic_Q,
    reduced_forms,
    strong_hlawka_slack,
    substituted_R,
    xi_quartic,
)

logger = logging.getLogger(__name__)

IDENTITY_THRESHOLD = 1e-10
WEIGHT_RANGE = 3.0
_WEIGHT_STREAM = 1


@dataclass(frozen=True)
class SuiteConfig:
    trials: int = 10000
    dimension: int = 5
    seed: int = 42
    tol: float = DEFAULT_TOL
    strategies: tuple[str, ...] = ("ambient-vectors",)
    inequalities: tuple[InequalityId, ...] = ALL_INEQUALITIES
    scale_law: ScaleLaw = ScaleLaw.NORMAL
    chunk_size: int = 4096

    def __post_init__(self):
        if self.trials < 1 or self.dimension < 1:
            raise PreconditionError("trials and dimension must be >= 1")
        if self.tol <= 0:
            raise PreconditionError("tol must be positive")
        if not self.strategies:
            raise PreconditionError("at least one strategy is required")
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "inequalities", tuple(InequalityId(i) for i in self.inequalities))
        object.__setattr__(self, "scale_law", ScaleLaw(self.scale_law))

    def sample_configs(self) -> list[SampleConfig]:
        return [
            SampleConfig.from_descriptor(
                descriptor,
                count=self.trials,
                seed=self.seed,
                dim=self.dimension,
                scale_law=self.scale_law,
                chunk_size=self.chunk_size,
            )
            for descriptor in self.strategies
        ]


@dataclass
class InequalityStats:
    inequality_id: InequalityId
    count: int = 0
    min_slack: float | None = None
    equality_count: int = 0
    worst_gram: GramParams | None = None
    worst_vectors: VectorTriple | None = None

    def update(self, scaled: np.ndarray, equality: np.ndarray, gram: np.ndarray, vectors: np.ndarray | None):
        if scaled.size == 0:
            return
        self.count += int(scaled.size)
        self.equality_count += int(np.count_nonzero(equality))
        position = int(np.argmin(scaled))
        if self.min_slack is None or scaled[position] < self.min_slack:
            self.min_slack = float(scaled[position])
            self.worst_gram = GramParams.from_array(gram[position])
            self.worst_vectors = None if vectors is None else VectorTriple.from_array(vectors[position])


@dataclass
class SuiteReport:
    seed: int
    tol: float
    trials: int
    strategies: tuple[str, ...]
    stats: dict[InequalityId, InequalityStats]
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(s.min_slack is None or s.min_slack >= -self.tol for s in self.stats.values())

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _accumulate(
    stats: dict[InequalityId, InequalityStats],
    gram: np.ndarray,
    vectors: np.ndarray | None,
    weights: np.ndarray,
    tol: float,
):
    scale = np.maximum(1.0, gram[:, :3].max(axis=1))
    for inequality_id, sides in evaluate_batch(gram, weights, stats.keys()).items():
        degree_scale = scale ** DEGREE[inequality_id]
        slack = sides.lhs - sides.rhs
        scaled = slack / degree_scale
        equality = np.abs(slack) <= tol * degree_scale
        rows = np.arange(gram.shape[0]) if sides.mask is None else np.flatnonzero(sides.mask)
        stats[inequality_id].update(
            scaled[rows],
            equality[rows],
            gram[rows],
            None if vectors is None else vectors[rows],
        )


def run_verification(cfg: SuiteConfig, inject: Sequence[GramParams] = ()) -> SuiteReport:
    """
    Sample every strategy, evaluate the requested inequalities and keep the
    per-inequality minimum of the degree-scaled slack.

    ``inject`` appends extra Gram points after sampling.
    """
    started = time.perf_counter()
    stats = {inequality_id: InequalityStats(inequality_id) for inequality_id in cfg.inequalities}
    for sample_cfg in cfg.sample_configs():
        for chunk_index, vectors, gram in iter_sample_chunks(sample_cfg):
            weights = chunk_rng(sample_cfg, chunk_index, stream=_WEIGHT_STREAM).uniform(
                -WEIGHT_RANGE, WEIGHT_RANGE, (gram.shape[0], 3)
            )
            _accumulate(stats, gram, vectors, weights, cfg.tol)
        logger.info("%s: %d samples evaluated", sample_cfg.describe(), sample_cfg.count)

    if inject:
        gram = np.array([g.as_array() for g in inject])
        _accumulate(stats, gram, None, np.ones((gram.shape[0], 3)), cfg.tol)
        logger.info("%d injected Gram points evaluated", len(inject))

    report = SuiteReport(
        seed=cfg.seed,
        tol=cfg.tol,
        trials=cfg.trials,
        strategies=cfg.strategies,
        stats=stats,
        elapsed=time.perf_counter() - started,
    )
    for s in stats.values():
        if s.min_slack is not None and s.min_slack < -cfg.tol:
            logger.warning("%s violated: min scaled slack %.3e", s.inequality_id, s.min_slack)
    return report


@dataclass(frozen=True)
class IdentityRow:
    identity: str
    count: int
    max_residual: float
    threshold: float = IDENTITY_THRESHOLD

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold


@dataclass(frozen=True)
class IdentityReport:
    seed: int
    count: int
    rows: tuple[IdentityRow, ...]
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _free_block_draw(rng: np.random.Generator, tag: CaseTag) -> dict[str, float]:
    u, v = rng.standard_normal((2, 2))
    first_key, second_key, cross_key = FREE_KEYS[tag]
    return {first_key: float(u @ u), second_key: float(v @ v), cross_key: float(u @ v)}


def run_identities(count: int, seed: int, tamper: bool = False) -> IdentityReport:
    """
    Randomized checks of the three dependence factorizations of xi and of
    R(g, w) = Q(g, (alpha r, beta q, gamma p)).

    ``tamper`` flips the sign of the factored forms.
    """
    if count < 1:
        raise PreconditionError("count must be >= 1")
    started = time.perf_counter()
    sign = -1.0 if tamper else 1.0
    rows = []
    for stream, tag in enumerate(CaseTag):
        rng = np.random.default_rng([seed, stream])
        worst = 0.0
        for _ in range(count):
            lam, mu = rng.uniform(-3.0, 3.0, 2)
            case = DependenceCase(tag, lam, mu)
            free = _free_block_draw(rng, tag)
            g = substitute_dependence(case, free)
            worst = max(worst, relative_residual(xi_quartic(g), sign * factored_xi(case, free), g.scale, 4))
        rows.append(IdentityRow(f"xi_factorization_{tag.value}", count, worst))

    rng = np.random.default_rng([seed, len(rows)])
    worst = 0.0
    for _ in range(count):
        factor = rng.standard_normal((3, 3))
        g = GramParams.from_matrix(factor.T @ factor)
        w = WeightTriple(*rng.uniform(-WEIGHT_RANGE, WEIGHT_RANGE, 3))
        substituted = WeightTriple(w.alpha * g.r, w.beta * g.q, w.gamma * g.p)
        residual = abs(substituted_R(g, w) - gram_quadratic_Q(g, substituted)) / (
            g.scale ** 3 * (1.0 + w.norm_sq)
        )
        worst = max(worst, residual)
    rows.append(IdentityRow("qr_substitution", count, worst))

    for row in rows:
        log = logger.info if row.passed else logger.error
        log("%s: max residual %.3e over %d draws", row.identity, row.max_residual, row.count)
    return IdentityReport(seed=seed, count=count, rows=tuple(rows), elapsed=time.perf_counter() - started)


@dataclass(frozen=True)
class WitnessReport:
    name: str
    triple: VectorTriple
    gram: GramParams
    reports: tuple[SlackReport, ...] = field(default=())
    substituted_R: float = 0.0


def witness_report(name: str, tol: float = DEFAULT_TOL) -> WitnessReport:
    if name not in WITNESSES:
        raise PreconditionError(f"unknown witness {name!r}; valid names: {', '.join(sorted(WITNESSES))}")
    triple = WITNESSES[name]
    g = gram_from_vectors(triple)
    return WitnessReport(
        name=name,
        triple=triple,
        gram=g,
        reports=(corollary_slack(g, tol), gram_det_identity_slack(g, tol)),
        substituted_R=substituted_R(g),
    )


def parse_inequalities(values: Iterable[str] | None) -> tuple[InequalityId, ...]:
    if not values:
        return ALL_INEQUALITIES
    try:
        return tuple(InequalityId(value) for value in values)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc


@dataclass(frozen=True)
class Classification:
    triple: VectorTriple
    gram: GramParams
    psd: PsdReport
    reduced: ReducedForms
    p_interval: PInterval
    strong_hlawka: SlackReport
    witnesses: tuple[DependenceWitness, ...]


def classify_triple(triple: VectorTriple, tol: float = DEFAULT_TOL) -> Classification:
    """Strong slack, boundary diagnostics and dependence witnesses of one triple."""
    g = gram_from_vectors(triple)
    witnesses = tuple(classify_equality(triple, tol))
    strong = strong_hlawka_slack(triple, tol)
    logger.info("strong slack %.3e, %d dependence witnesses", strong.slack, len(witnesses))
    return Classification(
        triple=triple,
        gram=g,
        psd=psd_check(g, tol),
        reduced=reduced_forms(g, tol),
        p_interval=p_interval(g.nsq_x, g.nsq_y, g.nsq_z, g.q, g.r, tol),
        strong_hlawka=strong,
        witnesses=witnesses,
    )
