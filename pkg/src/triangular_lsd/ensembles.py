import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from triangular_lsd.errors import ShapeError
from triangular_lsd.patterns import LinkPattern, link_matrix, parse_pattern, triangle_mask

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1


class InputDistribution(str, Enum):
    """Mean 0, variance 1 input laws."""

    STANDARD_GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM_SCALED = "uniform"


class Ensemble(str, Enum):
    WIGNER = "wigner"
    HANKEL = "hankel"
    TOEPLITZ = "toeplitz"
    SYMMETRIC_CIRCULANT = "symcirc"
    WIGNER_LOWER = "wigner-lower"
    WIGNER_FULL = "wigner-full"
    ASYM_GAUSS = "asym-gauss"
    ASYM_REAL = "asym-real"

    @property
    def link_pattern(self) -> Optional[LinkPattern]:
        try:
            return LinkPattern(self.value)
        except ValueError:
            return None

    @property
    def asymmetric(self) -> bool:
        return self in (Ensemble.ASYM_GAUSS, Ensemble.ASYM_REAL)


def parse_ensemble(name: Union[str, Ensemble, LinkPattern]) -> Ensemble:
    if isinstance(name, Ensemble):
        return name
    if isinstance(name, LinkPattern):
        return Ensemble(name.value)
    try:
        return Ensemble(name.strip().lower())
    except ValueError:
        return Ensemble(parse_pattern(name).value)


def parse_distribution(name: Union[str, InputDistribution]) -> InputDistribution:
    if isinstance(name, InputDistribution):
        return name
    try:
        return InputDistribution(name.strip().lower())
    except ValueError:
        valid = ", ".join(d.value for d in InputDistribution)
        raise ValueError(f"Unknown distribution: {name!r} (expected one of {valid})")


@dataclass
class MatrixDraw:
    pattern: str
    n: int
    entries: np.ndarray
    seed: int
    distribution: Optional[InputDistribution]
    n_inputs: int = 0

    def scaled(self) -> np.ndarray:
        """Entries divided by sqrt(n); asymmetric draws already carry 1/n variance."""
        if self.pattern in (Ensemble.ASYM_GAUSS.value, Ensemble.ASYM_REAL.value):
            return self.entries
        return self.entries / math.sqrt(self.n)


def derive_seed(master_seed: int, *keys: int) -> int:
    """G(seed, keys): a 64-bit child seed independent of call order."""
    seq = np.random.SeedSequence([master_seed & SEED_MASK, *keys])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _generator(seed: int) -> np.random.Generator:
    # Philox is counter based: draw t of the stream is a function of (seed, t).
    return np.random.Generator(np.random.Philox(key=seed & SEED_MASK))


def sample_inputs(dist: InputDistribution, count: int, seed: int) -> np.ndarray:
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    dist = parse_distribution(dist)
    rng = _generator(seed)
    if dist is InputDistribution.STANDARD_GAUSSIAN:
        return rng.standard_normal(count)
    if dist is InputDistribution.RADEMACHER:
        return rng.integers(0, 2, size=count).astype(np.float64) * 2.0 - 1.0
    if dist is InputDistribution.UNIFORM_SCALED:
        root3 = math.sqrt(3.0)
        return rng.uniform(-root3, root3, size=count)
    raise ValueError(f"Unsupported distribution: {dist}")


def _fill(keys: np.ndarray, mask: np.ndarray, dist: InputDistribution, seed: int) -> Tuple[np.ndarray, int]:
    # x_t is draw t of the stream for seed, whatever region of the grid is filled.
    values = sample_inputs(dist, int(keys.max()) + 1, seed)
    entries = np.where(mask, values[keys], 0.0)
    return entries, int(np.unique(keys[mask]).size)


def build_triangular(pattern: Union[str, LinkPattern], n: int,
                     dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                     seed: int = 0) -> MatrixDraw:
    """Symmetric patterned matrix with entry x_L(i,j) when i+j <= n+1, else 0."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    pattern = parse_pattern(pattern)
    dist = parse_distribution(dist)
    entries, used = _fill(link_matrix(pattern, n), triangle_mask(n), dist, seed)
    logger.debug(f"Built triangular {pattern.value} n={n} seed={seed} inputs={used}")
    return MatrixDraw(pattern.value, n, entries, seed, dist, used)


def build_full(pattern: Union[str, LinkPattern], n: int,
               dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
               seed: int = 0) -> MatrixDraw:
    """The full (non-triangular) patterned matrix."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    pattern = parse_pattern(pattern)
    dist = parse_distribution(dist)
    entries, used = _fill(link_matrix(pattern, n), np.ones((n, n), dtype=bool), dist, seed)
    return MatrixDraw(f"{pattern.value}-full", n, entries, seed, dist, used)


def build_lower_anti(n: int, dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                     seed: int = 0) -> MatrixDraw:
    """Wigner entries on and below the anti-diagonal, zeros above it."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    dist = parse_distribution(dist)
    idx = np.arange(1, n + 1)
    mask = (idx[:, None] + idx[None, :]) >= n + 1
    entries, used = _fill(link_matrix(LinkPattern.WIGNER, n), mask, dist, seed)
    return MatrixDraw(Ensemble.WIGNER_LOWER.value, n, entries, seed, dist, used)


def build_asym_upper(n: int, seed: int = 0, dist: Optional[InputDistribution] = None) -> MatrixDraw:
    """
    Upper triangular T with entries of variance 1/n.

    With dist=None the entries are complex Gaussian (real and imaginary parts
    each of variance 1/(2n)); otherwise they are real draws from dist / sqrt(n).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rows, cols = np.triu_indices(n)
    count = rows.size
    if dist is None:
        raw = sample_inputs(InputDistribution.STANDARD_GAUSSIAN, 2 * count, seed)
        values = (raw[:count] + 1j * raw[count:]) / math.sqrt(2 * n)
        entries = np.zeros((n, n), dtype=np.complex128)
        label = Ensemble.ASYM_GAUSS.value
    else:
        dist = parse_distribution(dist)
        values = sample_inputs(dist, count, seed) / math.sqrt(n)
        entries = np.zeros((n, n), dtype=np.float64)
        label = Ensemble.ASYM_REAL.value
    entries[rows, cols] = values
    return MatrixDraw(label, n, entries, seed, dist, int(count))


def flip_conjugate(a: np.ndarray) -> np.ndarray:
    """P A P^T for the anti-identity P: entry (i, j) moves to (n+1-i, n+1-j)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"flip_conjugate needs a square matrix, got shape {a.shape}")
    return np.ascontiguousarray(a[::-1, ::-1])


def split_anti_triangular(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(part with i+j <= n+1, part with i+j > n+1); the two sum back to a."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"split_anti_triangular needs a square matrix, got shape {a.shape}")
    mask = triangle_mask(a.shape[0])
    return np.where(mask, a, 0.0), np.where(mask, 0.0, a)


def draw(ensemble: Union[str, Ensemble], n: int,
         dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
         seed: int = 0) -> MatrixDraw:
    """Build one matrix of the named ensemble."""
    ensemble = parse_ensemble(ensemble)
    if ensemble.link_pattern is not None:
        return build_triangular(ensemble.link_pattern, n, dist, seed)
    if ensemble is Ensemble.WIGNER_LOWER:
        return build_lower_anti(n, dist, seed)
    if ensemble is Ensemble.WIGNER_FULL:
        return build_full(LinkPattern.WIGNER, n, dist, seed)
    if ensemble is Ensemble.ASYM_GAUSS:
        return build_asym_upper(n, seed)
    if ensemble is Ensemble.ASYM_REAL:
        return build_asym_upper(n, seed, dist)
    raise ValueError(f"Unsupported ensemble: {ensemble}")
