import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from triangular_lsd.ensembles import (
    Ensemble,
    InputDistribution,
    MatrixDraw,
    derive_seed,
    draw,
    parse_distribution,
    parse_ensemble,
)
from triangular_lsd.errors import ContractViolationError

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
DEFAULT_BINS = 101
DEFAULT_RANGE = (-3.0, 3.0)

T = TypeVar("T")


@dataclass
class SpectrumSample:
    eigenvalues: np.ndarray
    pattern: str
    n: int
    distribution: Optional[str]
    seed: int


@dataclass
class MomentEstimate:
    k: int
    mean: float
    stderr: float
    reps: int

    def to_dict(self) -> dict:
        return {"k": self.k, "mean": self.mean, "stderr": self.stderr, "reps": self.reps}


def ordered_map(func: Callable[[int], T], count: int, workers: int = 1) -> List[T]:
    """
    func(0..count-1) on a thread pool, results in index order.

    Reductions over the returned list are therefore schedule-independent.
    """
    if workers <= 1 or count <= 1:
        return [func(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(count)))


def eigenvalues(a: np.ndarray) -> np.ndarray:
    """Full ascending spectrum of a real symmetric matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolationError(f"eigenvalues needs a square matrix, got shape {a.shape}")
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > SYMMETRY_TOLERANCE:
        raise ContractViolationError(f"Matrix is not symmetric (max |A - A^T| = {asym:.3e})")
    return np.sort(np.linalg.eigvalsh(a))


def spectrum(matrix: MatrixDraw) -> SpectrumSample:
    """Eigenvalues of A / sqrt(n) with provenance."""
    eigs = eigenvalues(matrix.scaled())
    dist = matrix.distribution.value if matrix.distribution is not None else None
    return SpectrumSample(eigs, matrix.pattern, matrix.n, dist, matrix.seed)


def empirical_moments(sample: Union[SpectrumSample, np.ndarray], k_max: int) -> np.ndarray:
    """m_k = (1/n) sum lambda_i^k for k = 1..k_max."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    eigs = sample.eigenvalues if isinstance(sample, SpectrumSample) else np.asarray(sample)
    powers = np.arange(1, k_max + 1)
    return np.mean(eigs[:, None] ** powers[None, :], axis=0)


def squared_singular_values(matrix: MatrixDraw) -> np.ndarray:
    t = matrix.entries
    gram = t.conj().T @ t
    return np.clip(np.linalg.eigvalsh(gram).real, 0.0, None)


def singular_moments(matrix: MatrixDraw, k_max: int) -> np.ndarray:
    """
    m_k = (1/n) Tr((T* T)^k) for an upper triangular draw whose entries
    already have variance 1/n.
    """
    return empirical_moments(squared_singular_values(matrix), k_max)


def _replicate_moments(ensemble: Ensemble, n: int, dist: InputDistribution,
                       k_max: int, seed: int) -> np.ndarray:
    matrix = draw(ensemble, n, dist, seed)
    if ensemble.asymmetric:
        return singular_moments(matrix, k_max)
    return empirical_moments(spectrum(matrix), k_max)


def summarize(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Column means and standard errors of a (reps x k) array."""
    reps = values.shape[0]
    mean = values.mean(axis=0)
    if reps < 2:
        return mean, np.zeros_like(mean)
    return mean, values.std(axis=0, ddof=1) / math.sqrt(reps)


def monte_carlo_moments(pattern: Union[str, Ensemble], n: int,
                        dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                        k_max: int = 6, reps: int = 20, master_seed: int = 0,
                        workers: int = 1) -> List[MomentEstimate]:
    """
    Per-k mean and standard error of the empirical moments over reps draws.

    Replicate r uses seed derive_seed(master_seed, r). Asymmetric ensembles
    report singular moments (1/n) Tr((T* T)^k).
    """
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    ensemble = parse_ensemble(pattern)
    dist = parse_distribution(dist)

    def one(rep: int) -> np.ndarray:
        seed = derive_seed(master_seed, rep)
        logger.debug(f"{ensemble.value} n={n} replicate {rep} seed={seed}")
        return _replicate_moments(ensemble, n, dist, k_max, seed)

    values = np.vstack(ordered_map(one, reps, workers))
    mean, stderr = summarize(values)
    logger.info(f"Monte Carlo moments for {ensemble.value} n={n} reps={reps}: {np.round(mean, 4).tolist()}")
    return [MomentEstimate(k + 1, float(mean[k]), float(stderr[k]), reps) for k in range(k_max)]


def monte_carlo_spectra(pattern: Union[str, Ensemble], n: int,
                        dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                        reps: int = 1, master_seed: int = 0, workers: int = 1) -> List[SpectrumSample]:
    """Scaled spectra of reps symmetric draws (seeds as in monte_carlo_moments)."""
    ensemble = parse_ensemble(pattern)
    if ensemble.asymmetric:
        raise ValueError(f"{ensemble.value} has no real spectrum; use singular moments")
    dist = parse_distribution(dist)
    return ordered_map(lambda rep: spectrum(draw(ensemble, n, dist, derive_seed(master_seed, rep))),
                       reps, workers)


def replicate_values(pattern: Union[str, Ensemble], n: int,
                     dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                     reps: int = 1, master_seed: int = 0, workers: int = 1) -> List[np.ndarray]:
    """
    Per-replicate scaled eigenvalues, or squared singular values for the
    asymmetric ensembles, with the seeds of monte_carlo_moments.
    """
    ensemble = parse_ensemble(pattern)
    if not ensemble.asymmetric:
        return [s.eigenvalues for s in monte_carlo_spectra(ensemble, n, dist, reps, master_seed, workers)]
    dist = parse_distribution(dist)

    def one(rep: int) -> np.ndarray:
        return np.sort(squared_singular_values(draw(ensemble, n, dist, derive_seed(master_seed, rep))))

    return ordered_map(one, reps, workers)


def histogram(samples: Union[SpectrumSample, Sequence[SpectrumSample], np.ndarray],
              bins: int = DEFAULT_BINS,
              value_range: Tuple[float, float] = DEFAULT_RANGE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Density-normalized histogram: the densities integrate to the fraction of
    eigenvalues inside value_range.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    lo, hi = value_range
    if not lo < hi:
        raise ValueError(f"Histogram range needs lo < hi, got {value_range}")
    if isinstance(samples, SpectrumSample):
        eigs = samples.eigenvalues
    elif isinstance(samples, np.ndarray):
        eigs = samples.ravel()
    else:
        eigs = np.concatenate([s.eigenvalues for s in samples])
    counts, edges = np.histogram(eigs, bins=bins, range=(lo, hi))
    total = max(eigs.size, 1)
    density = counts / (total * np.diff(edges))
    return edges, density


def spectral_edge(samples: Sequence[Union[SpectrumSample, np.ndarray]]) -> np.ndarray:
    """Largest |eigenvalue| of each sample (reported, not asserted)."""
    eigs = [s.eigenvalues if isinstance(s, SpectrumSample) else np.asarray(s) for s in samples]
    return np.array([float(np.max(np.abs(e))) for e in eigs])


def square_law_check(n: int, reps: int,
                     dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                     master_seed: int = 0, k_max: int = 3, workers: int = 1) -> dict:
    """
    Moments of X X^T for a real upper triangular X (entries of variance 1/n)
    next to the even moments of the triangular Wigner LSD, k^k/(k+1)!.
    """
    from triangular_lsd.lsd import closed_moment

    estimates = monte_carlo_moments(Ensemble.ASYM_REAL, n, dist, k_max, reps, master_seed, workers)
    rows = []
    for est in estimates:
        target = float(closed_moment(est.k))
        rows.append({**est.to_dict(), "target": target, "gap": est.mean - target})
    return {"n": n, "reps": reps, "distribution": parse_distribution(dist).value, "moments": rows}
