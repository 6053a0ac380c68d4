"""
Limit moments and the density of the triangular Wigner LSD.

The density psi of the law nu (moments k^k/(k+1)!) is given parametrically on
v in (0, pi):

    x(v)   = sin(v)/v * exp(v cot v)
    psi(x) = sin(v) * exp(-v cot v) / pi

and the LSD of the triangular Wigner matrix has density |x| psi(x^2).
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from triangular_lsd.errors import DomainError
from triangular_lsd.patterns import LinkPattern, parse_pattern
from triangular_lsd.volume import (
    ZERO,
    PuValue,
    g_polynomial,
    pu_estimate,
    pu_exact_wigner,
    pu_grid_hankel,
    pu_grid_wigner,
)
from triangular_lsd.words import Word, enumerate_catalan, enumerate_pair_matched, enumerate_symmetric

logger = logging.getLogger(__name__)

E = math.e
SQRT_E = math.sqrt(math.e)
INV_E = 1.0 / math.e
BISECTION_TOLERANCE = 1e-12
MONOTONE_GRID_POINTS = 10_000
QUAD_EPSABS = 1e-11
QUAD_LIMIT = 200
LAMBERT_RESIDUAL = 1e-14
DEFAULT_CURVE_POINTS = 2000


class MomentMethod(str, Enum):
    EXACT = "exact"
    COUNT = "count"
    GRID = "grid"


@dataclass
class MomentTable:
    pattern: str
    method: str
    entries: List[Tuple[int, PuValue]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "method": self.method,
            "moments": [{"k": k, "order": 2 * k, **value.to_dict()} for k, value in self.entries],
        }


@dataclass(frozen=True)
class DensityPoint:
    v: float
    x: float
    psi: float

    def to_dict(self) -> dict:
        return {"v": self.v, "x": self.x, "psi": self.psi}


@dataclass
class LambertSeriesCheck:
    x: float
    terms: int
    lhs: float
    rhs: float
    gap: float
    printed_lhs: float
    printed_gap: float

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "terms": self.terms,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "printed_lhs": self.printed_lhs,
            "printed_gap": self.printed_gap,
        }


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def closed_moment(k: int) -> Fraction:
    """k^k / (k+1)!, the k-th moment of nu (and beta_2k of the triangular Wigner LSD)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return Fraction(k ** k, math.factorial(k + 1))


def closed_moment_via_g(k: int) -> Fraction:
    """The same moment as int_0^1 G_2k, through word enumeration."""
    return g_polynomial(k).integrate(0, 1)


def contributing_words(pattern: LinkPattern, k: int) -> List[Word]:
    # Non-Catalan words vanish for Wigner links and non-symmetric ones for Hankel.
    if pattern is LinkPattern.WIGNER:
        return enumerate_catalan(k)
    if pattern is LinkPattern.HANKEL:
        return enumerate_symmetric(k)
    return enumerate_pair_matched(k)


def evaluate_word(pattern: Union[str, LinkPattern], w: Word, method: Union[str, MomentMethod] = MomentMethod.EXACT,
                  n_list: Sequence[int] = (40, 80, 160), m: int = 160, triangular: bool = True,
                  workers: int = 1) -> PuValue:
    """
    p_u(w) by one method. exact covers the triangular Wigner link, grid covers
    Hankel and triangular Wigner, count covers every link.
    """
    pattern = parse_pattern(pattern)
    method = MomentMethod(method)
    if method is MomentMethod.EXACT:
        if pattern is not LinkPattern.WIGNER or not triangular:
            raise DomainError(f"The exact method covers the triangular wigner link only, not {pattern.value}")
        return PuValue.from_exact(pu_exact_wigner(w))
    if method is MomentMethod.COUNT:
        return pu_estimate(pattern, w, n_list, workers, triangular)
    if pattern is LinkPattern.HANKEL:
        return pu_grid_hankel(w, m, triangular, workers)
    if pattern is LinkPattern.WIGNER and triangular:
        return pu_grid_wigner(w, m, workers)
    raise DomainError(f"The grid method covers hankel and triangular wigner, not {pattern.value}")


def beta_2k(pattern: Union[str, LinkPattern], k: int, method: Union[str, MomentMethod] = MomentMethod.EXACT,
            n_list: Sequence[int] = (40, 80, 160), m: int = 160, workers: int = 1) -> PuValue:
    """Sum of p_u(w) over the words of length 2k that can contribute."""
    pattern = parse_pattern(pattern)
    method = MomentMethod(method)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    if method is MomentMethod.EXACT:
        if pattern is not LinkPattern.WIGNER:
            raise DomainError(f"Exact moments exist only for the Wigner link, not {pattern.value}")
        return PuValue.from_exact(sum((pu_exact_wigner(w) for w in enumerate_catalan(k)), Fraction(0)))

    total = ZERO
    for w in contributing_words(pattern, k):
        value = evaluate_word(pattern, w, method, n_list, m, True, workers)
        logger.debug(f"beta_{2 * k} {pattern.value}: {w} -> {value.value:.6f}")
        total = total + value
    return total


def moment_table(pattern: Union[str, LinkPattern], k_max: int,
                 method: Union[str, MomentMethod] = MomentMethod.EXACT,
                 n_list: Sequence[int] = (40, 80, 160), m: int = 160, workers: int = 1) -> MomentTable:
    pattern = parse_pattern(pattern)
    method = MomentMethod(method)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    table = MomentTable(pattern.value, method.value)
    for k in range(1, k_max + 1):
        table.entries.append((k, beta_2k(pattern, k, method, n_list, m, workers)))
    logger.info(f"Moment table for {pattern.value} ({method.value}) up to order {2 * k_max}")
    return table


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------

def _log_x(v: float) -> float:
    return math.log(math.sin(v) / v) + v / math.tan(v)


def _log_psi(v: float) -> float:
    return math.log(math.sin(v)) - v / math.tan(v) - math.log(math.pi)


def _check_parameter(v: float) -> None:
    if not 0.0 < v < math.pi:
        raise DomainError(f"Parameter v must lie in (0, pi), got {v}")


def psi_parametric(v: float) -> DensityPoint:
    _check_parameter(v)
    log_psi = _log_psi(v)
    psi = math.exp(log_psi) if log_psi < 709.0 else math.inf
    return DensityPoint(v=v, x=math.exp(_log_x(v)), psi=psi)


@lru_cache(maxsize=1)
def check_parametrization(points: int = MONOTONE_GRID_POINTS) -> bool:
    """Whether log x(v) is strictly decreasing on an interior grid of (0, pi)."""
    v = np.linspace(0.0, math.pi, points + 2)[1:-1]
    log_x = np.log(np.sin(v) / v) + v / np.tan(v)
    monotone = bool(np.all(np.diff(log_x) < 0))
    if not monotone:
        logger.warning("x(v) is not strictly decreasing on the check grid; psi_at may be wrong")
    return monotone


def invert_parameter(x: float) -> float:
    """The v in (0, pi) with x(v) == x, by bisection on log x(v)."""
    if not 0.0 < x < E:
        raise DomainError(f"psi is supported on (0, e), got x={x}")
    check_parametrization()
    target = math.log(x)
    lo, hi = 0.0, math.pi
    while hi - lo > BISECTION_TOLERANCE:
        mid = 0.5 * (lo + hi)
        if _log_x(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def psi_at(x: float) -> float:
    return psi_parametric(invert_parameter(x)).psi


def wigner_lsd_density(x: float) -> float:
    """|x| psi(x^2); zero outside (-sqrt(e), sqrt(e))."""
    if x == 0:
        raise DomainError("The LSD density has an integrable singularity at 0")
    if abs(x) >= SQRT_E:
        return 0.0
    return abs(x) * psi_at(x * x)


def _mass_element(v: float) -> float:
    # psi(x(v)) |x'(v)|
    s = math.sin(v) / v
    return (1.0 + s * s - math.sin(2.0 * v) / v) / math.pi


def _v_moment(power: float) -> float:
    def integrand(v: float) -> float:
        weight = _mass_element(v)
        if power == 0:
            return weight
        return math.exp(power * _log_x(v)) * weight

    value, abserr = integrate.quad(integrand, 0.0, math.pi, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=QUAD_LIMIT)
    logger.debug(f"v-domain moment of order {power}: {value:.12f} (quad error {abserr:.1e})")
    return value


def density_moment(k: int) -> float:
    """int_0^e x^k psi(x) dx by quadrature in v; k=0 is the total mass."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return _v_moment(float(k))


def wigner_lsd_moment(j: int) -> float:
    """int x^j |x| psi(x^2) dx over the real line."""
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    half = 0.5 * _v_moment(j / 2.0)
    # The negative half-line contributes (-1)^j times the positive one.
    return half + (-1) ** j * half


def density_curve(what: str = "psi", points: int = DEFAULT_CURVE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """
    (x, density) sampled on a uniform interior v-grid, sorted by x.

    what="psi" gives psi on (0, e); what="wigner-lsd" gives |x| psi(x^2) on
    both half-lines. Points where psi overflows (v next to pi) are dropped.
    """
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    v = math.pi * (np.arange(points) + 0.5) / points
    with np.errstate(over="ignore"):
        cot_term = v / np.tan(v)
        x = np.sin(v) / v * np.exp(cot_term)
        psi = np.sin(v) * np.exp(-cot_term) / math.pi
    keep = np.isfinite(psi) & (x > 0)
    if not keep.all():
        logger.debug(f"Dropped {int((~keep).sum())} curve points where psi overflows")
    x, psi = x[keep][::-1], psi[keep][::-1]
    if what == "psi":
        return x, psi
    if what == "wigner-lsd":
        root = np.sqrt(x)
        density = root * psi
        return np.concatenate([-root[::-1], root]), np.concatenate([density[::-1], density])
    raise ValueError(f"Unknown curve: {what!r} (expected psi or wigner-lsd)")


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

def lambert_w0(y: float) -> float:
    """Principal branch W0(y) for y >= -1/e, by Halley iteration."""
    y = float(y)
    if y < -INV_E:
        if y < -INV_E - 1e-15:
            raise DomainError(f"W0 is real only for y >= -1/e, got {y}")
        y = -INV_E
    if y == 0.0:
        return 0.0

    if abs(y + INV_E) <= 1.5:
        # Series about the branch point.
        w = math.sqrt(max(2.0 * E * y + 2.0, 0.0)) - 1.0
    else:
        t = math.log(y)
        w = t - math.log(t)

    for _ in range(100):
        c1 = math.exp(w)
        c2 = w * c1 - y
        if c2 == 0.0:
            break
        w1 = w + (w != -1.0)
        dw = c2 / (c1 * w1 - (w + 2.0) * c2 / (2.0 * w1))
        w -= dw
        if abs(dw) < 0.7e-16 * (2.0 + abs(w)):
            break

    w = max(w, -1.0)
    residual = abs(w * math.exp(w) - y)
    if residual > LAMBERT_RESIDUAL * max(1.0, abs(y)):
        logger.warning(f"lambert_w0({y}) residual {residual:.2e} above tolerance")
    return w


def lambert_series_check(x: float, terms: int = 40) -> LambertSeriesCheck:
    """
    Partial sums of sum_k k^k/(k+1)! x^-(k+1) against 1 + 1/(x W0(-1/x)).

    The form 1 + 1/(x W0(1/x)) is reported alongside as printed_lhs; it does
    not match the series.
    """
    x = float(x)
    if abs(x) <= E:
        raise DomainError(f"The moment series converges only for |x| > e, got x={x}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    lhs = 1.0 + 1.0 / (x * lambert_w0(-1.0 / x))
    printed_lhs = 1.0 + 1.0 / (x * lambert_w0(1.0 / x))
    rhs = 0.0
    for k in range(terms):
        rhs += float(closed_moment(k)) * x ** (-(k + 1))
    return LambertSeriesCheck(x, terms, lhs, rhs, abs(lhs - rhs), printed_lhs, abs(printed_lhs - rhs))


# ---------------------------------------------------------------------------
# Hankel support bound
# ---------------------------------------------------------------------------

@dataclass
class SupportBoundReport:
    k_max: int
    tolerance: float
    words: List[dict] = field(default_factory=list)
    totals: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["holds"] for r in self.words) and all(t["holds"] for t in self.totals)

    def to_dict(self) -> dict:
        return {
            "k_max": self.k_max,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "words": self.words,
            "totals": self.totals,
        }


def hankel_support_bound(k_max: int = 3, m: int = 80, tolerance: float = 0.02,
                         workers: int = 1) -> SupportBoundReport:
    """p_u(w) >= p(w) / 2^k for symmetric words, and beta_2k >= beta'_2k / 2^k."""
    if not 1 <= k_max <= 3:
        raise ValueError(f"k_max must be in 1..3, got {k_max}")
    report = SupportBoundReport(k_max, tolerance)
    for k in range(1, k_max + 1):
        scale = 2.0 ** k
        beta_u = beta_full = ZERO
        for w in enumerate_symmetric(k):
            p_u = pu_grid_hankel(w, m, True, workers)
            p_full = pu_grid_hankel(w, m, False, workers)
            slack = p_u.error_bar + p_full.error_bar / scale + tolerance
            report.words.append({
                "word": str(w),
                "k": k,
                "p_u": p_u.value,
                "p_full": p_full.value,
                "lower_bound": p_full.value / scale,
                "slack": slack,
                "holds": p_u.value >= p_full.value / scale - slack,
            })
            beta_u = beta_u + p_u
            beta_full = beta_full + p_full
        slack = beta_u.error_bar + beta_full.error_bar / scale + tolerance
        report.totals.append({
            "k": k,
            "beta_u": beta_u.value,
            "beta_full": beta_full.value,
            "lower_bound": beta_full.value / scale,
            "holds": beta_u.value >= beta_full.value / scale - slack,
        })
    logger.info(f"Hankel support bound up to k={k_max}: {'pass' if report.passed else 'FAIL'}")
    return report