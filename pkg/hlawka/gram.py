"""
Gram-matrix data model for three vectors of a real inner-product space.

The space is modeled as d-dimensional coordinate space. Three vectors span at
most three dimensions, so every Gram matrix is realized in dimension 3.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .exceptions import DimensionMismatchError, NonFiniteError, NotPsdError, StrategyError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
GRAM_FIELDS = ("nsq_x", "nsq_y", "nsq_z", "p", "q", "r")
_SEED_LIMIT = 2 ** 64


def gram_determinant(a2, b2, c2, p, q, r):
    """det G for scalars or equally shaped arrays."""
    return a2 * b2 * c2 + 2.0 * p * q * r - a2 * r * r - b2 * q * q - c2 * p * p


def relative_residual(value, reference, scale: float, degree: int) -> float:
    """|value - reference| measured in units of max(1, scale) ** degree."""
    return float(abs(value - reference)) / max(1.0, scale) ** degree


def _as_coordinates(name: str, values: Sequence[float]) -> tuple[float, ...]:
    coords = tuple(float(value) for value in values)
    if not coords:
        raise DimensionMismatchError(f"vector {name} must have dimension >= 1")
    if not all(math.isfinite(value) for value in coords):
        raise NonFiniteError(f"vector {name} has non-finite coordinates")
    return coords


@dataclass(frozen=True)
class VectorTriple:
    """Three concrete vectors x, y, z of a common dimension."""

    x: tuple[float, ...]
    y: tuple[float, ...]
    z: tuple[float, ...]

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, _as_coordinates(name, getattr(self, name)))
        if not len(self.x) == len(self.y) == len(self.z):
            raise DimensionMismatchError(
                f"dimension mismatch: x={len(self.x)}, y={len(self.y)}, z={len(self.z)}"
            )

    @property
    def dim(self) -> int:
        return len(self.x)

    def as_array(self) -> np.ndarray:
        """Rows x, y, z as a (3, d) array."""
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, rows) -> "VectorTriple":
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != 3:
            raise DimensionMismatchError(f"expected a (3, d) array, got shape {rows.shape}")
        return cls(tuple(rows[0]), tuple(rows[1]), tuple(rows[2]))

    def scaled(self, factor: float) -> "VectorTriple":
        return VectorTriple.from_array(self.as_array() * factor)


@dataclass(frozen=True)
class GramParams:
    """
    The six scalars of a 3x3 Gram matrix.

    nsq_x, nsq_y, nsq_z are the squared norms a², b², c²; p, q, r are the
    inner products <x,y>, <x,z>, <y,z>.
    """

    nsq_x: float
    nsq_y: float
    nsq_z: float
    p: float
    q: float
    r: float

    def __post_init__(self):
        for name in GRAM_FIELDS:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise NonFiniteError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        for name in GRAM_FIELDS[:3]:
            if getattr(self, name) < 0.0:
                raise NotPsdError(f"{name} must be nonnegative, got {getattr(self, name)!r}")

    @property
    def a(self) -> float:
        return math.sqrt(self.nsq_x)

    @property
    def b(self) -> float:
        return math.sqrt(self.nsq_y)

    @property
    def c(self) -> float:
        return math.sqrt(self.nsq_z)

    @property
    def scale(self) -> float:
        return max(1.0, self.nsq_x, self.nsq_y, self.nsq_z)

    @property
    def trace(self) -> float:
        return self.nsq_x + self.nsq_y + self.nsq_z

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.nsq_x, self.nsq_y, self.nsq_z, self.p, self.q, self.r)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def as_matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.nsq_x, self.p, self.q],
                [self.p, self.nsq_y, self.r],
                [self.q, self.r, self.nsq_z],
            ],
            dtype=float,
        )

    @classmethod
    def from_matrix(cls, matrix) -> "GramParams":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise DimensionMismatchError(f"expected a 3x3 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[1, 1], m[2, 2], m[0, 1], m[0, 2], m[1, 2])

    @classmethod
    def from_array(cls, values) -> "GramParams":
        return cls(*(float(value) for value in values))

    def determinant(self) -> float:
        return float(gram_determinant(*self.as_tuple()))

    def scaled(self, factor: float) -> "GramParams":
        """Every entry multiplied by factor (vectors scaled by sqrt(factor))."""
        return GramParams.from_array(self.as_array() * factor)


@dataclass(frozen=True)
class PsdReport:
    minors_2x2: tuple[float, float, float]
    det: float
    is_psd: bool
    rank_estimate: int
    eigenvalues: tuple[float, float, float]


def psd_report(matrix, tol: float = DEFAULT_TOL) -> PsdReport:
    """
    Principal-minor PSD test of a symmetric 3x3 matrix.

    Diagonal, 2x2 minors and determinant are compared against tol scaled by
    max(1, largest diagonal entry) to the power of their degree.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(matrix, dtype=float)
    m = (m + m.T) / 2.0
    d0, d1, d2 = float(m[0, 0]), float(m[1, 1]), float(m[2, 2])
    m01, m02, m12 = float(m[0, 1]), float(m[0, 2]), float(m[1, 2])
    scale = max(1.0, d0, d1, d2)

    minors = (d0 * d1 - m01 * m01, d0 * d2 - m02 * m02, d1 * d2 - m12 * m12)
    det = float(gram_determinant(d0, d1, d2, m01, m02, m12))
    is_psd = (
        min(d0, d1, d2) >= -tol * scale
        and min(minors) >= -tol * scale ** 2
        and det >= -tol * scale ** 3
    )
    eigenvalues = np.linalg.eigvalsh(m)
    rank = int(np.count_nonzero(eigenvalues > tol * scale))
    return PsdReport(
        minors_2x2=minors,
        det=det,
        is_psd=bool(is_psd),
        rank_estimate=rank,
        eigenvalues=tuple(float(value) for value in eigenvalues),
    )


def psd_check(g: GramParams, tol: float = DEFAULT_TOL) -> PsdReport:
    return psd_report(g.as_matrix(), tol)


def require_psd(g: GramParams, tol: float = DEFAULT_TOL) -> PsdReport:
    report = psd_check(g, tol)
    if not report.is_psd:
        raise NotPsdError(f"Gram parameters are not positive semidefinite: {g}")
    return report


def gram_from_vectors(t: VectorTriple) -> GramParams:
    vectors = t.as_array()
    return GramParams.from_matrix(vectors @ vectors.T)


def gram_batch(vectors: np.ndarray) -> np.ndarray:
    """(n, 3, d) vector triples to an (n, 6) array of Gram parameters."""
    g = np.einsum("nid,njd->nij", vectors, vectors)
    return np.stack(
        [g[:, 0, 0], g[:, 1, 1], g[:, 2, 2], g[:, 0, 1], g[:, 0, 2], g[:, 1, 2]],
        axis=1,
    )


def realize_vectors(g: GramParams, tol: float = DEFAULT_TOL) -> VectorTriple:
    """
    Three vectors in dimension 3 whose Gram matrix is g.

    Uses a symmetric eigendecomposition G = V diag(w) V^T. Eigenvalues at or
    below tol * scale are dropped, so a rank-k matrix yields vectors whose
    coordinates beyond the first k are zero.
    """
    report = require_psd(g, tol)
    eigenvalues, eigenvectors = np.linalg.eigh(g.as_matrix())
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    kept = np.where(np.arange(3) < report.rank_estimate, np.maximum(eigenvalues, 0.0), 0.0)
    factor = np.sqrt(kept)[:, None] * eigenvectors.T
    return VectorTriple.from_array(factor.T)


class Strategy(str, Enum):
    AMBIENT_VECTORS = "ambient-vectors"
    FACTOR_3X3 = "factor-3x3"
    BOUNDARY_RANK2 = "boundary-rank2"
    BOUNDARY_RANK1 = "boundary-rank1"

    def __str__(self):
        return self.value


class ScaleLaw(str, Enum):
    NORMAL = "normal"
    HEAVY_TAIL = "heavy-tail"
    MIXED = "mixed"

    def __str__(self):
        return self.value


_STRATEGY_KEYS = {
    Strategy.AMBIENT_VECTORS: 1,
    Strategy.FACTOR_3X3: 2,
    Strategy.BOUNDARY_RANK2: 3,
    Strategy.BOUNDARY_RANK1: 4,
}
_DESCRIPTOR_RE = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


@dataclass(frozen=True)
class SampleConfig:
    strategy: Strategy
    count: int
    seed: int
    dim: int = 3
    scale_law: ScaleLaw = ScaleLaw.NORMAL
    chunk_size: int = 4096

    def __post_init__(self):
        try:
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        except ValueError as exc:
            raise StrategyError(f"unknown sampling strategy {self.strategy!r}") from exc
        try:
            object.__setattr__(self, "scale_law", ScaleLaw(self.scale_law))
        except ValueError as exc:
            raise StrategyError(f"unknown scale law {self.scale_law!r}") from exc
        if self.count < 1:
            raise StrategyError("count must be >= 1")
        if self.dim < 1:
            raise StrategyError("dim must be >= 1")
        if self.chunk_size < 1:
            raise StrategyError("chunk_size must be >= 1")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise StrategyError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_descriptor(
        cls,
        descriptor: str,
        count: int,
        seed: int,
        dim: int | None = None,
        scale_law: ScaleLaw | str = ScaleLaw.NORMAL,
        chunk_size: int = 4096,
    ) -> "SampleConfig":
        """Parse 'ambient-vectors(5)', 'factor-3x3', 'boundary-rank2' or 'boundary-rank1'."""
        match = _DESCRIPTOR_RE.match(descriptor or "")
        if not match:
            raise StrategyError(f"malformed strategy descriptor {descriptor!r}")
        name, explicit_dim = match.groups()
        if explicit_dim is not None:
            if name != Strategy.AMBIENT_VECTORS.value:
                raise StrategyError(f"strategy {name!r} takes no dimension")
            dim = int(explicit_dim)
        return cls(
            strategy=name,
            count=count,
            seed=seed,
            dim=dim if dim is not None else 3,
            scale_law=scale_law,
            chunk_size=chunk_size,
        )

    @property
    def vector_dim(self) -> int:
        if self.strategy is Strategy.AMBIENT_VECTORS:
            return self.dim
        if self.strategy is Strategy.BOUNDARY_RANK2:
            return 2
        if self.strategy is Strategy.BOUNDARY_RANK1:
            return 1
        return 3

    @property
    def chunk_count(self) -> int:
        return -(-self.count // self.chunk_size)

    def describe(self) -> str:
        if self.strategy is Strategy.AMBIENT_VECTORS:
            return f"{self.strategy.value}({self.dim})"
        return self.strategy.value


def chunk_rng(cfg: SampleConfig, chunk_index: int, stream: int = 0) -> np.random.Generator:
    """Generator for one chunk; depends only on (seed, strategy, stream, chunk)."""
    return np.random.default_rng([cfg.seed, _STRATEGY_KEYS[cfg.strategy], stream, chunk_index])


def sample_vectors_chunk(cfg: SampleConfig, chunk_index: int) -> np.ndarray:
    """Vector triples of one chunk as an (n, 3, d) array."""
    start = chunk_index * cfg.chunk_size
    n = min(cfg.chunk_size, cfg.count - start)
    if n <= 0:
        raise IndexError(f"chunk {chunk_index} is past the end of the sample")
    rng = chunk_rng(cfg, chunk_index)

    if cfg.strategy is Strategy.FACTOR_3X3:
        # columns of B are the vectors, G = B^T B
        factors = rng.standard_normal((n, 3, 3))
        vectors = np.swapaxes(factors, 1, 2)
    else:
        vectors = rng.standard_normal((n, 3, cfg.vector_dim))

    heavy = cfg.scale_law is ScaleLaw.HEAVY_TAIL or (
        cfg.scale_law is ScaleLaw.MIXED and chunk_index % 2 == 1
    )
    if heavy:
        vectors = vectors * np.exp(rng.standard_normal((n, 3, 1)))
    return vectors


def iter_sample_chunks(cfg: SampleConfig) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (chunk_index, vectors, gram) with gram an (n, 6) array."""
    for chunk_index in range(cfg.chunk_count):
        vectors = sample_vectors_chunk(cfg, chunk_index)
        yield chunk_index, vectors, gram_batch(vectors)


def sample_gram(cfg: SampleConfig) -> Iterator[GramParams]:
    """Deterministic stream of cfg.count Gram parameter samples."""
    logger.debug("sampling %d Gram points with %s (seed=%d)", cfg.count, cfg.describe(), cfg.seed)
    for _, _, gram in iter_sample_chunks(cfg):
        for row in gram:
            yield GramParams.from_array(row)
