"""
The numbered acceptance criteria run by `triangular-lsd verify`.

Each check returns (passed, detail). A check that raises is reported as a
failure with the exception text; it never aborts the remaining checks.
"""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from triangular_lsd.ensembles import Ensemble, InputDistribution
from triangular_lsd.joint import conjugation_check, freeness_report, joint_moment, sum_semicircle_check
from triangular_lsd.lsd import (
    SQRT_E,
    beta_2k,
    closed_moment,
    density_curve,
    density_moment,
    hankel_support_bound,
    lambert_series_check,
    wigner_lsd_density,
    wigner_lsd_moment,
)
from triangular_lsd.patterns import LinkPattern
from triangular_lsd.spectra import monte_carlo_moments
from triangular_lsd.volume import (
    count_circuits,
    fraction_text,
    g_closed_form,
    g_polynomial,
    pu_estimate,
    pu_exact_wigner,
    pu_grid_hankel,
    verify_appendix,
)
from triangular_lsd.words import Word, enumerate_catalan

logger = logging.getLogger(__name__)

CATALAN_VOLUMES = {
    "aa": Fraction(1, 2),
    "aabb": Fraction(1, 3),
    "abba": Fraction(1, 3),
    "aabbcc": Fraction(1, 4),
    "abbcca": Fraction(1, 4),
    "abbacc": Fraction(5, 24),
    "aabccb": Fraction(5, 24),
    "abccba": Fraction(5, 24),
}

# order -> tolerance on |m_order - target| for the triangular Wigner spectrum
SPECTRAL_TOLERANCES = {1: 0.02, 2: 0.01, 3: 0.02, 4: 0.02, 6: 0.06}
SINGULAR_TOLERANCES = {1: 0.02, 2: 0.03, 3: 0.08}
HANKEL_TOLERANCE = 0.01


@dataclass(frozen=True)
class Scale:
    name: str
    n_spectral: int
    reps_spectral: int
    n_singular: int
    reps_singular: int
    n_joint: int
    reps_joint: int
    n_conjugation: int
    reps_conjugation: int
    k_identity: int
    k_appendix: int
    k_support: int
    hankel_m: int
    hankel_n_list: Tuple[int, ...]


SCALES: Dict[str, Scale] = {
    "full": Scale("full", 2000, 20, 1000, 20, 2000, 40, 500, 10, 8, 5, 3, 160, (40, 80, 160)),
    "quick": Scale("quick", 400, 10, 300, 10, 400, 20, 200, 10, 6, 4, 2, 80, (20, 40, 80)),
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


Check = Callable[[Scale, int, int], Tuple[bool, str]]


def _catalan_volumes(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    found = {}
    for k in (1, 2, 3):
        for w in enumerate_catalan(k):
            found[str(w)] = pu_exact_wigner(w)
    ok = found == CATALAN_VOLUMES
    return ok, ", ".join(f"{w}={fraction_text(q)}" for w, q in found.items())


def _moment_identity(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    bad = [k for k in range(1, scale.k_identity + 1)
           if beta_2k(LinkPattern.WIGNER, k).exact != closed_moment(k)]
    return not bad, f"k=1..{scale.k_identity}" + (f", mismatches at {bad}" if bad else ", all exact")


def _g_identity(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    bad = [n for n in range(1, scale.k_identity + 1) if g_polynomial(n) != g_closed_form(n)]
    return not bad, f"n=1..{scale.k_identity}" + (f", mismatches at {bad}" if bad else ", coefficientwise equal")


def _moment_targets(estimates) -> Dict[int, float]:
    return {e.k: e.mean for e in estimates}


def _spectral_check(dist: InputDistribution) -> Check:
    def check(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
        estimates = monte_carlo_moments(Ensemble.WIGNER, scale.n_spectral, dist, 6,
                                        scale.reps_spectral, seed, workers)
        means = _moment_targets(estimates)
        targets = {1: 0.0, 2: 0.5, 3: 0.0, 4: 2.0 / 3.0, 6: 1.125}
        gaps = {order: abs(means[order] - targets[order]) for order in SPECTRAL_TOLERANCES}
        ok = all(gaps[order] < tol for order, tol in SPECTRAL_TOLERANCES.items())
        return ok, " ".join(f"m{o}={means[o]:.4f}" for o in sorted(SPECTRAL_TOLERANCES))
    return check


def _singular(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    estimates = monte_carlo_moments(Ensemble.ASYM_GAUSS, scale.n_singular, InputDistribution.STANDARD_GAUSSIAN,
                                    3, scale.reps_singular, seed, workers)
    means = _moment_targets(estimates)
    ok = all(abs(means[k] - float(closed_moment(k))) < tol for k, tol in SINGULAR_TOLERANCES.items())
    return ok, " ".join(f"m{k}={means[k]:.4f}" for k in sorted(means))


def _hankel_volumes(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    targets = {"aa": 0.5, "aabb": 1.0 / 3.0, "abba": 1.0 / 3.0}
    parts, ok = [], True
    for text, target in targets.items():
        w = Word.parse(text)
        grid = pu_grid_hankel(w, scale.hankel_m, True, workers)
        count = pu_estimate(LinkPattern.HANKEL, w, scale.hankel_n_list, workers)
        ok &= abs(grid.value - target) < HANKEL_TOLERANCE and abs(count.value - target) < HANKEL_TOLERANCE
        parts.append(f"{text}: grid={grid.value:.4f} count={count.value:.4f}")
    abab = pu_grid_hankel(Word.parse("abab"), scale.hankel_m, True, workers)
    ok &= abab.is_exact and abab.exact == 0
    parts.append(f"abab: {abab.to_dict()['mode']} {abab.value:g}")
    return ok, "; ".join(parts)


def _support_bound(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    report = hankel_support_bound(scale.k_support, m=80, tolerance=0.02, workers=workers)
    worst = min(r["p_u"] - r["lower_bound"] for r in report.words)
    return report.passed, f"{len(report.words)} symmetric words up to k={scale.k_support}, min margin {worst:.4f}"


def _density(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    mass = density_moment(0)
    ok = abs(mass - 1.0) <= 1e-8
    gaps = []
    for k in range(1, 5):
        gap = abs(density_moment(k) - float(closed_moment(k)))
        gaps.append(gap)
        ok &= gap <= 1e-6
    lsd_mass = wigner_lsd_moment(0)
    ok &= abs(lsd_mass - 1.0) <= 1e-8
    x, _ = density_curve("wigner-lsd")
    ok &= float(abs(x).max()) <= SQRT_E and wigner_lsd_density(SQRT_E * 1.0001) == 0.0
    return ok, f"mass={mass:.10f} lsd_mass={lsd_mass:.10f} max moment gap={max(gaps):.2e}"


def _lambert(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    checks = [lambert_series_check(x, 40) for x in (5.0, 10.0, -5.0)]
    ok = all(c.gap <= 1e-8 for c in checks)
    return ok, " ".join(f"x={c.x:g}: gap={c.gap:.1e}" for c in checks)


def _freeness(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    mixed = joint_moment("1,1,2,2", ["wigner"], scale.n_joint, reps=scale.reps_joint, seed=seed, workers=workers)
    report = freeness_report(scale.n_joint, scale.reps_joint, seed, workers=workers)
    control = freeness_report(scale.n_joint, scale.reps_joint, seed, control=True, workers=workers)
    ok = (abs(mixed.mean - 1.0 / 3.0) < 0.02 and report.non_free
          and abs(control.gap) <= 3.0 * control.gap_stderr)
    return ok, (f"phi(aabb)={mixed.mean:.4f} gap={report.gap:.4f}+/-{report.gap_stderr:.4f} "
                f"control gap={control.gap:.5f}+/-{control.gap_stderr:.5f}")


def _conjugation(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    result = conjugation_check(scale.n_conjugation, scale.reps_conjugation, seed, workers=workers)
    ok = result["max_spectral_difference"] <= 1e-8
    up, low = result["upper"], result["lower"]
    for key in ("m2", "m4"):
        spread = 5.0 * (up[f"{key}_stderr"] ** 2 + low[f"{key}_stderr"] ** 2) ** 0.5
        ok &= abs(up[key] - low[key]) <= max(spread, 0.01)
    return ok, (f"max |spectral diff|={result['max_spectral_difference']:.1e} "
                f"m2 {up['m2']:.4f}/{low['m2']:.4f} m4 {up['m4']:.4f}/{low['m4']:.4f}")


def _semicircle(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    report = sum_semicircle_check(scale.n_spectral, scale.reps_spectral, seed, "shared", workers=workers)
    return bool(report.passed), " ".join(f"m{r['order']}={r['mean']:.4f}" for r in report.moments)


def _appendix(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    report = verify_appendix(scale.k_appendix)
    return report.passed, " ".join(f"{c.name}:{c.checked}/{c.equalities}eq" for c in report.clauses)


def _non_catalan_decay(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    w = Word.parse("abab")
    sizes = (40, 80, 160, 320)
    values = [count_circuits(LinkPattern.WIGNER, w, n, True, workers) / n ** 3 for n in sizes]
    ok = all(b < a for a, b in zip(values, values[1:]))
    return ok, " ".join(f"n={n}:{v:.5f}" for n, v in zip(sizes, values))


def _universality(scale: Scale, seed: int, workers: int) -> Tuple[bool, str]:
    results = [_spectral_check(d)(scale, seed, workers)
               for d in (InputDistribution.RADEMACHER, InputDistribution.UNIFORM_SCALED)]
    return all(ok for ok, _ in results), " | ".join(detail for _, detail in results)


CRITERIA: List[Tuple[int, str, Check]] = [
    (1, "Exact Catalan word volumes", _catalan_volumes),
    (2, "Moment identity k^k/(k+1)!", _moment_identity),
    (3, "G-polynomial closed form", _g_identity),
    (4, "Spectral moments (Gaussian)", _spectral_check(InputDistribution.STANDARD_GAUSSIAN)),
    (5, "Universality (Rademacher, uniform)", _universality),
    (6, "Singular moments (complex Gaussian)", _singular),
    (7, "Hankel volumes", _hankel_volumes),
    (8, "Hankel unbounded-support inequality", _support_bound),
    (9, "Density consistency", _density),
    (10, "Lambert series", _lambert),
    (11, "Joint moments and non-freeness", _freeness),
    (12, "Anti-diagonal conjugation", _conjugation),
    (13, "Semicircle sum (shared wiring)", _semicircle),
    (14, "Appendix inequalities", _appendix),
    (15, "Non-Catalan decay", _non_catalan_decay),
]


def run_acceptance(scale: str = "full", seed: int = 0, workers: int = 1,
                   only: Tuple[int, ...] = ()) -> List[CriterionResult]:
    chosen = SCALES[scale]
    results = []
    for number, title, check in CRITERIA:
        if only and number not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = check(chosen, seed, workers)
        except Exception as e:
            logger.exception(f"Criterion {number} raised")
            passed, detail = False, f"error: {e}"
        elapsed = time.perf_counter() - start
        logger.info(f"Criterion {number} {'PASS' if passed else 'FAIL'} in {elapsed:.1f}s")
        results.append(CriterionResult(number, title, bool(passed), detail, elapsed))
    return results


def format_table(results: List[CriterionResult]) -> str:
    lines = [f"{'#':>2}  {'result':<6}  {'criterion':<38}  detail"]
    for r in results:
        lines.append(f"{r.number:>2}  {'PASS' if r.passed else 'FAIL':<6}  {r.title:<38}  {r.detail}")
    return "\n".join(lines)
