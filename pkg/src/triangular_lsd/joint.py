"""
Empirical joint moments (1/n) E Tr(q) for monomials q in several
triangular matrices, and the checks built on them.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from triangular_lsd.ensembles import (
    Ensemble,
    InputDistribution,
    build_full,
    build_lower_anti,
    build_triangular,
    derive_seed,
    draw,
    flip_conjugate,
    parse_distribution,
    parse_ensemble,
    split_anti_triangular,
)
from triangular_lsd.patterns import LinkPattern
from triangular_lsd.spectra import eigenvalues, empirical_moments, ordered_map, summarize

logger = logging.getLogger(__name__)

FREENESS_SIGMAS = 5.0
MIN_FLAG_REPS = 10
SEMICIRCLE_MOMENTS = {1: 1.0, 2: 2.0, 3: 5.0}
SEMICIRCLE_TOLERANCES = {1: 0.02, 2: 0.05, 3: 0.2}


@dataclass(frozen=True)
class Monomial:
    labels: Tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise ValueError("A monomial needs at least one factor")
        if min(labels) < 1:
            raise ValueError(f"Monomial labels must be >= 1: {labels}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        return cls(tuple(int(tok) for tok in text.split(",") if tok.strip()))

    @property
    def n_labels(self) -> int:
        return max(self.labels)

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.labels)


@dataclass
class JointEstimate:
    monomial: Monomial
    mean: float
    stderr: float
    n: int
    reps: int

    def to_dict(self) -> dict:
        return {"monomial": str(self.monomial), "mean": self.mean, "stderr": self.stderr,
                "n": self.n, "reps": self.reps}


def _trace_product(factors: Sequence[np.ndarray]) -> float:
    n = factors[0].shape[0]
    if len(factors) == 1:
        return float(np.trace(factors[0]).real) / n
    prod = factors[0]
    for f in factors[1:-1]:
        prod = prod @ f
    # Tr(M B) = sum(M * B^T)
    return float(np.sum(prod * factors[-1].T).real) / n


def _resolve_ensembles(monomial: Monomial, patterns: Sequence[Union[str, Ensemble]]) -> List[Ensemble]:
    ensembles = [parse_ensemble(p) for p in patterns]
    if len(ensembles) == 1 and monomial.n_labels > 1:
        ensembles = ensembles * monomial.n_labels
    if len(ensembles) < monomial.n_labels:
        raise ValueError(f"Monomial {monomial} uses {monomial.n_labels} labels but only "
                         f"{len(ensembles)} patterns were given")
    return ensembles


def joint_moment(monomial: Union[str, Monomial], patterns: Sequence[Union[str, Ensemble]], n: int,
                 dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                 reps: int = 20, seed: int = 0, workers: int = 1) -> JointEstimate:
    """
    Monte Carlo (1/n) Tr(prod A_label / sqrt(n)). Label l of replicate r is
    drawn with seed derive_seed(seed, r, l), so labels are independent.
    """
    if isinstance(monomial, str):
        monomial = Monomial.parse(monomial)
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    dist = parse_distribution(dist)
    ensembles = _resolve_ensembles(monomial, patterns)

    def one(rep: int) -> float:
        mats: Dict[int, np.ndarray] = {}
        for label in sorted(set(monomial.labels)):
            mats[label] = draw(ensembles[label - 1], n, dist, derive_seed(seed, rep, label)).scaled()
        return _trace_product([mats[label] for label in monomial.labels])

    values = np.array(ordered_map(one, reps, workers))
    mean, stderr = summarize(values[:, None])
    logger.info(f"phi({monomial}) at n={n}: {mean[0]:.5f} +/- {stderr[0]:.5f}")
    return JointEstimate(monomial, float(mean[0]), float(stderr[0]), n, reps)


@dataclass
class FreenessReport:
    ensemble: str
    n: int
    reps: int
    mixed: float
    mixed_stderr: float
    phi_a1: float
    phi_a2: float
    product: float
    gap: float
    gap_stderr: float
    target_gap: float
    verdict: str

    @property
    def non_free(self) -> bool:
        return self.verdict == "non-free"

    def to_dict(self) -> dict:
        return {
            "ensemble": self.ensemble,
            "n": self.n,
            "reps": self.reps,
            "phi(a1 a1 a2 a2)": self.mixed,
            "phi(a1 a1 a2 a2) stderr": self.mixed_stderr,
            "phi(a1 a1)": self.phi_a1,
            "phi(a2 a2)": self.phi_a2,
            "product": self.product,
            "gap": self.gap,
            "gap_stderr": self.gap_stderr,
            "target_gap": self.target_gap,
            "verdict": self.verdict,
        }


def freeness_report(n: int, reps: int, seed: int = 0, control: bool = False,
                    dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                    workers: int = 1) -> FreenessReport:
    """
    phi(a1^2 a2^2) against phi(a1^2) phi(a2^2) for two independent Wigner
    matrices, triangular by default, full when control is set.
    """
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    dist = parse_distribution(dist)
    ensemble = Ensemble.WIGNER_FULL if control else Ensemble.WIGNER

    def one(rep: int) -> np.ndarray:
        a1 = draw(ensemble, n, dist, derive_seed(seed, rep, 1)).scaled()
        a2 = draw(ensemble, n, dist, derive_seed(seed, rep, 2)).scaled()
        s1, s2 = a1 @ a1, a2 @ a2
        mixed = float(np.sum(s1 * s2)) / n
        t1 = float(np.sum(a1 * a1)) / n
        t2 = float(np.sum(a2 * a2)) / n
        return np.array([mixed, t1, t2, mixed - t1 * t2])

    values = np.vstack(ordered_map(one, reps, workers))
    mean, stderr = summarize(values)
    gap, gap_stderr = float(mean[3]), float(stderr[3])
    if reps < MIN_FLAG_REPS:
        verdict = "inconclusive"
    elif abs(gap) > FREENESS_SIGMAS * gap_stderr:
        verdict = "non-free"
    else:
        verdict = "consistent with freeness"
    report = FreenessReport(
        ensemble=ensemble.value,
        n=n,
        reps=reps,
        mixed=float(mean[0]),
        mixed_stderr=float(stderr[0]),
        phi_a1=float(mean[1]),
        phi_a2=float(mean[2]),
        product=float(mean[1] * mean[2]),
        gap=gap,
        gap_stderr=gap_stderr,
        target_gap=0.0 if control else 1.0 / 12.0,
        verdict=verdict,
    )
    logger.info(f"Freeness check ({ensemble.value}, n={n}): gap {gap:.5f} +/- {gap_stderr:.5f} -> {verdict}")
    return report


class Wiring(str, Enum):
    """How W^u and W^l are coupled in the sum W^u + W^l."""

    SHARED_FULL_WIGNER = "shared"
    INDEPENDENT = "independent"


@dataclass
class SemicircleReport:
    wiring: str
    n: int
    reps: int
    moments: List[dict] = field(default_factory=list)
    passed: Optional[bool] = None

    def to_dict(self) -> dict:
        return {"wiring": self.wiring, "n": self.n, "reps": self.reps,
                "moments": self.moments, "passed": self.passed}


def _sum_matrix(wiring: Wiring, n: int, dist: InputDistribution, seed: int) -> np.ndarray:
    if wiring is Wiring.SHARED_FULL_WIGNER:
        upper, lower = split_anti_triangular(build_full(LinkPattern.WIGNER, n, dist, seed).entries)
    else:
        upper = build_triangular(LinkPattern.WIGNER, n, dist, derive_seed(seed, 1)).entries
        lower = build_lower_anti(n, dist, derive_seed(seed, 2)).entries
    return (upper + lower) / np.sqrt(n)


def sum_semicircle_check(n: int, reps: int, seed: int = 0,
                         wiring: Union[str, Wiring] = Wiring.SHARED_FULL_WIGNER,
                         dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                         k_max: int = 3, workers: int = 1) -> SemicircleReport:
    """
    Even moments of W^u + W^l next to the Catalan numbers 1, 2, 5. Only the
    shared wiring is asserted; the independent one is reported as is.
    """
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    wiring = Wiring(wiring)
    dist = parse_distribution(dist)

    def one(rep: int) -> np.ndarray:
        eigs = eigenvalues(_sum_matrix(wiring, n, dist, derive_seed(seed, rep)))
        return empirical_moments(eigs, 2 * k_max)[1::2]

    values = np.vstack(ordered_map(one, reps, workers))
    mean, stderr = summarize(values)
    report = SemicircleReport(wiring.value, n, reps)
    checks = []
    for k in range(1, k_max + 1):
        row = {"k": k, "order": 2 * k, "mean": float(mean[k - 1]), "stderr": float(stderr[k - 1])}
        if k in SEMICIRCLE_MOMENTS:
            row["target"] = SEMICIRCLE_MOMENTS[k]
            if wiring is Wiring.SHARED_FULL_WIGNER:
                row["within"] = abs(row["mean"] - row["target"]) < SEMICIRCLE_TOLERANCES[k]
                checks.append(row["within"])
        report.moments.append(row)
    if wiring is Wiring.SHARED_FULL_WIGNER:
        report.passed = all(checks)
    logger.info(f"Semicircle check ({wiring.value}, n={n}): {[round(r['mean'], 4) for r in report.moments]}")
    return report


def conjugation_check(n: int, reps: int, seed: int = 0,
                      dist: InputDistribution = InputDistribution.STANDARD_GAUSSIAN,
                      workers: int = 1) -> dict:
    """
    P W^u P^T against W^u (same spectrum) and against an independent W^l
    (same second and fourth moments in the limit).
    """
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    dist = parse_distribution(dist)

    def one(rep: int) -> np.ndarray:
        upper = build_triangular(LinkPattern.WIGNER, n, dist, derive_seed(seed, rep, 1)).scaled()
        lower = build_lower_anti(n, dist, derive_seed(seed, rep, 2)).scaled()
        eig_u = eigenvalues(upper)
        diff = float(np.max(np.abs(eigenvalues(flip_conjugate(upper)) - eig_u)))
        m_u = empirical_moments(eig_u, 4)
        m_l = empirical_moments(eigenvalues(lower), 4)
        return np.array([diff, m_u[1], m_u[3], m_l[1], m_l[3]])

    values = np.vstack(ordered_map(one, reps, workers))
    mean, stderr = summarize(values)
    result = {
        "n": n,
        "reps": reps,
        "max_spectral_difference": float(values[:, 0].max()),
        "upper": {"m2": float(mean[1]), "m2_stderr": float(stderr[1]),
                  "m4": float(mean[2]), "m4_stderr": float(stderr[2])},
        "lower": {"m2": float(mean[3]), "m2_stderr": float(stderr[3]),
                  "m4": float(mean[4]), "m4_stderr": float(stderr[4])},
    }
    logger.info(f"Conjugation check n={n}: max spectral difference {result['max_spectral_difference']:.2e}")
    return result
