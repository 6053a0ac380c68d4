"""
Word contributions p_u(w).

Three engines sit behind the PuValue interface:

* exact: the Q_w polynomial calculus for triangular Wigner Catalan words;
* count: exact finite-n circuit counts for any link, extrapolated in n;
* grid: Riemann sums of the limit indicator over integer linear forms
  (Hankel elimination forms, or the phi-map forms for Wigner), extrapolated
  in the grid resolution.
"""
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from triangular_lsd.errors import DomainError, ResourceLimitError
from triangular_lsd.patterns import LinkPattern, link_keys, parse_pattern, solve_link
from triangular_lsd.polynomial import RationalPolynomial
from triangular_lsd.words import (
    Word,
    balanced_prefixes,
    canonicalize,
    catalan_split,
    classify,
    enumerate_catalan,
    generating_vertices,
    partners,
    phi_map,
    rotate,
)

logger = logging.getLogger(__name__)

MAX_COUNT_K = 4
DEFAULT_MAX_WORK = 4 * 10**9
CHUNK_ROWS = 1 << 20
MAX_APPENDIX_K = 6

ONE = RationalPolynomial.constant(1)
ONE_MINUS_X = RationalPolynomial([1, -1])


def max_work() -> int:
    return int(os.environ.get("TRILSD_MAX_WORK", DEFAULT_MAX_WORK))


class PuMode(str, Enum):
    EXACT = "exact"
    ESTIMATED = "estimated"


@dataclass(frozen=True)
class PuValue:
    """
    A word contribution (or a sum of them): an exact rational, or an
    estimate with a heuristic error bar and the sizes it was built from.
    """

    mode: PuMode
    exact: Optional[Fraction] = None
    estimate: float = 0.0
    error_bar: float = 0.0
    n_list: Tuple[int, ...] = ()

    @classmethod
    def from_exact(cls, value: Union[int, Fraction]) -> "PuValue":
        value = Fraction(value)
        return cls(PuMode.EXACT, exact=value, estimate=float(value))

    @classmethod
    def from_estimate(cls, estimate: float, error_bar: float, n_list: Sequence[int]) -> "PuValue":
        return cls(PuMode.ESTIMATED, estimate=float(estimate), error_bar=float(error_bar),
                   n_list=tuple(int(n) for n in n_list))

    @property
    def is_exact(self) -> bool:
        return self.mode is PuMode.EXACT

    @property
    def value(self) -> float:
        return float(self.exact) if self.is_exact else self.estimate

    def __add__(self, other: "PuValue") -> "PuValue":
        if self.is_exact and other.is_exact:
            return PuValue.from_exact(self.exact + other.exact)
        n_list = self.n_list or other.n_list
        return PuValue.from_estimate(self.value + other.value, self.error_bar + other.error_bar, n_list)

    def to_dict(self) -> dict:
        if self.is_exact:
            return {"mode": self.mode.value, "value": fraction_text(self.exact)}
        return {
            "mode": self.mode.value,
            "estimate": self.estimate,
            "error_bar": self.error_bar,
            "error_bar_kind": "heuristic (successive Richardson extrapolants)",
            "n_list": list(self.n_list),
        }


ZERO = PuValue.from_exact(0)


def fraction_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Exact engine (triangular Wigner)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _qw(letters: Tuple[int, ...]) -> RationalPolynomial:
    if not letters:
        return ONE
    partner = letters.index(letters[0], 1)
    inner = _qw(canonicalize(letters[1:partner]))
    rest = _qw(canonicalize(letters[partner + 1:]))
    # a w1 a  ->  x |-> int_0^{1-x} Q_{w1}(y) dy
    nested = inner.antiderivative().compose(ONE_MINUS_X)
    return nested * rest


def _require_catalan(w: Word, what: str) -> None:
    if not classify(w).catalan:
        raise DomainError(f"{what} needs a Catalan word, got {w}")


def qw_polynomial(w: Word) -> RationalPolynomial:
    """Q_w with p_u(w) = int_0^1 Q_w: products over concatenation, shifted integrals over nesting."""
    if w.length:
        _require_catalan(w, "qw_polynomial")
    return _qw(w.letters)


def pu_exact_wigner(w: Word) -> Fraction:
    """
    Exact p_u(w) for the triangular Wigner link. Non-Catalan words are a
    DomainError (their limit is 0, which is a proof, not a volume).
    """
    _require_catalan(w, "pu_exact_wigner")
    return qw_polynomial(w).integrate(0, 1)


def g_polynomial(n: int) -> RationalPolynomial:
    """Sum of Q_w over the Catalan words of length 2n."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return ONE
    total = RationalPolynomial()
    for w in enumerate_catalan(n):
        total = total + qw_polynomial(w)
    return total


def g_closed_form(n: int) -> RationalPolynomial:
    """(1 - x)(n + 1 - x)^(n-1) / n!"""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return ONE
    return ONE_MINUS_X * RationalPolynomial([n + 1, -1]) ** (n - 1) / math.factorial(n)


def g_recursive(n: int) -> RationalPolynomial:
    """G_2n = sum_k G_2(n-k)(x) * int_0^{1-x} G_2(k-1)(y) dy, without enumerating words."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    table = [ONE]
    for size in range(1, n + 1):
        total = RationalPolynomial()
        for k in range(1, size + 1):
            nested = table[k - 1].antiderivative().compose(ONE_MINUS_X)
            total = total + table[size - k] * nested
        table.append(total)
    return table[n]


# ---------------------------------------------------------------------------
# Circuit counting (any link)
# ---------------------------------------------------------------------------

def _check_pair_matched(w: Word) -> None:
    if not classify(w).pair_matched:
        raise DomainError(f"Word {w} is not pair-matched")


def _split_range(n: int, parts: int) -> List[np.ndarray]:
    values = np.arange(1, n + 1, dtype=np.int64)
    return [chunk for chunk in np.array_split(values, max(1, min(parts, n))) if chunk.size]


def _parallel_sum(func, blocks: List[np.ndarray], workers: int) -> int:
    # Partial counts are integers, so the reduction is exact in any order.
    if workers <= 1 or len(blocks) <= 1:
        return sum(func(b) for b in blocks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(func, blocks))


def count_circuits(pattern: Union[str, LinkPattern], w: Word, n: int, triangular: bool = True,
                   workers: int = 1, work_cap: Optional[int] = None) -> int:
    """
    Exact #Pi*(w) (or #Pi_1*(w) when triangular): circuits pi on {0..2k}
    into 1..n with L(pi(i-1), pi(i)) == L(pi(j-1), pi(j)) whenever
    w[i] == w[j], and, when triangular, pi(i-1) + pi(i) <= n + 1 for every i.
    """
    pattern = parse_pattern(pattern)
    _check_pair_matched(w)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = w.half_length
    cap = work_cap if work_cap is not None else max_work()
    if k > MAX_COUNT_K:
        raise ResourceLimitError(f"Circuit counting capped at k={MAX_COUNT_K}, got k={k}")
    if n ** (k + 1) > cap:
        raise ResourceLimitError(f"Circuit count for k={k}, n={n} exceeds work cap {cap}")

    length = w.length
    closing = partners(w)
    columns = np.arange(1, n + 1, dtype=np.int64)

    def count_block(starts: np.ndarray) -> int:
        total = 0
        stack = [starts[:, None]]
        while stack:
            states = stack.pop()
            j = states.shape[1]
            prev = states[:, -1]
            if j in closing:
                i = closing[j]
                target = link_keys(pattern, states[:, i - 1], states[:, i], n)
                parts = []
                for x in solve_link(pattern, prev, target, n):
                    keep = x > 0
                    if triangular:
                        keep &= prev + x <= n + 1
                    if j == length:
                        total += int(np.count_nonzero(keep & (x == states[:, 0])))
                    elif keep.any():
                        parts.append(np.column_stack([states[keep], x[keep]]))
                if parts:
                    stack.append(np.vstack(parts))
                continue
            rows_per_chunk = max(1, CHUNK_ROWS // n)
            for lo in range(0, states.shape[0], rows_per_chunk):
                chunk = states[lo:lo + rows_per_chunk]
                expanded = np.repeat(chunk, n, axis=0)
                x = np.tile(columns, chunk.shape[0])
                if triangular:
                    keep = expanded[:, -1] + x <= n + 1
                    expanded, x = expanded[keep], x[keep]
                if x.size:
                    stack.append(np.column_stack([expanded, x]))
        return total

    total = _parallel_sum(count_block, _split_range(n, 4 * max(1, workers)), workers)
    logger.debug(f"count_circuits({pattern.value}, {w}, n={n}, triangular={triangular}) = {total}")
    return total


# ---------------------------------------------------------------------------
# Richardson extrapolation
# ---------------------------------------------------------------------------

def richardson(sizes: Sequence[int], values: Sequence[float]) -> List[float]:
    """
    Pairwise extrapolants assuming value(n) = p + c/n + o(1/n):
    (r * v(n2) - v(n1)) / (r - 1) with r = n2 / n1.
    """
    out = []
    for (n1, v1), (n2, v2) in zip(zip(sizes, values), zip(sizes[1:], values[1:])):
        ratio = n2 / n1
        out.append((ratio * v2 - v1) / (ratio - 1.0))
    return out


def extrapolate(sizes: Sequence[int], values: Sequence[float]) -> Tuple[float, float]:
    """Estimate and heuristic error bar from the last two extrapolants."""
    if len(sizes) < 3 or len(sizes) != len(values):
        raise ValueError("Extrapolation needs at least three (size, value) pairs")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"Sizes must be strictly increasing: {list(sizes)}")
    ext = richardson(sizes, values)
    estimate = ext[-1]
    error_bar = abs(ext[-1] - ext[-2]) + abs(values[-1] - estimate)
    return estimate, error_bar


def pu_estimate(pattern: Union[str, LinkPattern], w: Word, n_list: Sequence[int] = (40, 80, 160),
                workers: int = 1, triangular: bool = True) -> PuValue:
    """Extrapolated count_circuits(...) / n^(k+1)."""
    pattern = parse_pattern(pattern)
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 3:
        raise ValueError(f"pu_estimate needs at least three sizes, got {n_list}")
    k = w.half_length
    values = [count_circuits(pattern, w, n, triangular, workers) / n ** (k + 1) for n in n_list]
    estimate, error_bar = extrapolate(n_list, values)
    logger.info(f"p_u estimate for {pattern.value} {w}: {estimate:.6f} +/- {error_bar:.6f}")
    return PuValue.from_estimate(estimate, error_bar, n_list)


# ---------------------------------------------------------------------------
# Linear forms and the grid engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HankelForms:
    """
    v_j = forms[j] . v_S for every position j, from Hankel link elimination.
    Only non-generating positions carry a nontrivial form.
    """

    word: Word
    generating: Tuple[int, ...]
    forms: Tuple[Tuple[int, ...], ...]
    closure_identity: bool


def hankel_forms(w: Word) -> HankelForms:
    """v_j = v_{i-1} + v_i - v_{j-1} at each second occurrence j with partner i."""
    _check_pair_matched(w)
    generating = generating_vertices(w)
    dim = len(generating)
    slot = {pos: idx for idx, pos in enumerate(generating)}
    closing = partners(w)
    forms: List[List[int]] = []
    for j in range(w.length + 1):
        if j in slot:
            row = [0] * dim
            row[slot[j]] = 1
        else:
            i = closing[j]
            row = [a + b - c for a, b, c in zip(forms[i - 1], forms[i], forms[j - 1])]
        forms.append(row)
    unit0 = [1] + [0] * (dim - 1)
    return HankelForms(
        word=w,
        generating=generating,
        forms=tuple(tuple(r) for r in forms),
        closure_identity=forms[-1] == unit0,
    )


def wigner_forms(w: Word) -> Tuple[Tuple[int, ...], ...]:
    """Unit forms v_j = v_phi(j) of a Catalan word."""
    pm = phi_map(w)
    slot = {pos: idx for idx, pos in enumerate(pm.generating)}
    dim = len(pm.generating)
    rows = []
    for j in range(w.length + 1):
        row = [0] * dim
        row[slot[pm.phi[j]]] = 1
        rows.append(tuple(row))
    return tuple(rows)


@dataclass
class _Constraints:
    coeffs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    dim: int
    by_last: Dict[int, np.ndarray] = field(default_factory=dict)


NO_LOWER = -(10**12)


def _build_constraints(forms: Sequence[Sequence[int]], generating: Sequence[int], m: int,
                       triangular: bool) -> Optional[_Constraints]:
    dim = len(generating)
    gen = set(generating)
    rows, lo, hi = [], [], []
    for j in range(1, len(forms)):
        if j in gen:
            continue
        row = forms[j]
        if sum(abs(c) for c in row) == 1 and max(row) == 1:
            continue  # unit form, always inside 1..m
        rows.append(row)
        lo.append(1)
        hi.append(m)
    if triangular:
        for i in generating[1:]:
            rows.append([a + b for a, b in zip(forms[i - 1], forms[i])])
            lo.append(NO_LOWER)
            hi.append(m + 1)
    if not rows:
        rows, lo, hi = [[0] * dim], [NO_LOWER], [m]
    cons = _Constraints(np.array(rows, dtype=np.int64), np.array(lo, dtype=np.int64),
                        np.array(hi, dtype=np.int64), dim)
    nonzero = cons.coeffs != 0
    last = np.where(nonzero.any(axis=1), dim - 1 - np.argmax(nonzero[:, ::-1], axis=1), -1)
    for idx in np.where(last < 0)[0]:
        if not cons.lo[idx] <= 0 <= cons.hi[idx]:
            return None
    for t in range(dim):
        cons.by_last[t] = np.where(last == t)[0]
    return cons


def _satisfied(states: np.ndarray, cons: _Constraints, rows: np.ndarray) -> np.ndarray:
    if rows.size == 0:
        return np.ones(states.shape[0], dtype=bool)
    values = states @ cons.coeffs[rows, :states.shape[1]].T
    return np.all((values >= cons.lo[rows]) & (values <= cons.hi[rows]), axis=1)


def _interval_count(states: np.ndarray, cons: _Constraints, m: int) -> int:
    """Number of last-coordinate values 1..m satisfying every constraint ending there."""
    t = states.shape[1]
    rows = cons.by_last[t]
    lower = np.ones(states.shape[0], dtype=np.int64)
    upper = np.full(states.shape[0], m, dtype=np.int64)
    for r in rows:
        c = int(cons.coeffs[r, t])
        b = states @ cons.coeffs[r, :t]
        lo_r, hi_r = cons.lo[r] - b, cons.hi[r] - b
        if c > 0:
            lower = np.maximum(lower, -np.floor_divide(-lo_r, c))
            upper = np.minimum(upper, np.floor_divide(hi_r, c))
        else:
            lower = np.maximum(lower, -np.floor_divide(-hi_r, c))
            upper = np.minimum(upper, np.floor_divide(lo_r, c))
    return int(np.clip(upper - lower + 1, 0, None).sum())


def grid_count(forms: Sequence[Sequence[int]], generating: Sequence[int], m: int,
               triangular: bool = True, workers: int = 1) -> int:
    """
    Integer points u in {1..m}^|S| with 1 <= forms[j].u <= m off S and,
    when triangular, forms[i-1].u + forms[i].u <= m + 1 for i in S \\ {0}.
    The last coordinate is counted by interval arithmetic.
    """
    if m < 1:
        raise ValueError(f"Grid resolution must be >= 1, got {m}")
    cons = _build_constraints(forms, generating, m, triangular)
    if cons is None:
        return 0
    dim = cons.dim
    if m ** (dim - 1) > max_work():
        raise ResourceLimitError(f"Grid of resolution {m} in dimension {dim} exceeds work cap {max_work()}")
    columns = np.arange(1, m + 1, dtype=np.int64)

    def count_block(starts: np.ndarray) -> int:
        total = 0
        first = starts[:, None]
        first = first[_satisfied(first, cons, cons.by_last[0])]
        stack = [first] if first.size else []
        while stack:
            states = stack.pop()
            if states.shape[1] == dim - 1:
                total += _interval_count(states, cons, m)
                continue
            t = states.shape[1]
            rows_per_chunk = max(1, CHUNK_ROWS // m)
            for lo in range(0, states.shape[0], rows_per_chunk):
                chunk = states[lo:lo + rows_per_chunk]
                expanded = np.column_stack([np.repeat(chunk, m, axis=0), np.tile(columns, chunk.shape[0])])
                expanded = expanded[_satisfied(expanded, cons, cons.by_last[t])]
                if expanded.size:
                    stack.append(expanded)
        return total

    if dim == 1:
        return _interval_count(np.zeros((1, 0), dtype=np.int64), cons, m)
    return _parallel_sum(count_block, _split_range(m, 4 * max(1, workers)), workers)


def grid_count_hankel(w: Word, m: int, triangular: bool = True, workers: int = 1) -> int:
    hf = hankel_forms(w)
    if not hf.closure_identity:
        return 0
    return grid_count(hf.forms, hf.generating, m, triangular, workers)


def grid_count_wigner(w: Word, m: int, workers: int = 1) -> int:
    _require_catalan(w, "grid_count_wigner")
    return grid_count(wigner_forms(w), generating_vertices(w), m, True, workers)


def _grid_sizes(m: int) -> List[int]:
    if m < 8 or m % 4:
        raise ValueError(f"Grid resolution must be a multiple of 4 and >= 8, got {m}")
    return [m // 4, m // 2, m]


def _grid_estimate(counter, w: Word, m: int) -> PuValue:
    sizes = _grid_sizes(m)
    k = w.half_length
    values = [counter(size) / size ** (k + 1) for size in sizes]
    estimate, error_bar = extrapolate(sizes, values)
    return PuValue.from_estimate(estimate, error_bar, sizes)


def pu_grid_hankel(w: Word, m: int = 160, triangular: bool = True, workers: int = 1) -> PuValue:
    """
    Riemann sum of the Hankel limit indicator, extrapolated over m/4, m/2, m.
    Words whose closure form is not v_0 lose a dimension: exact 0.
    With triangular=False this is p(w) for the full Hankel matrix.
    """
    hf = hankel_forms(w)
    if not hf.closure_identity:
        logger.debug(f"{w}: closure form is not v_0, contribution is exactly 0")
        return ZERO
    result = _grid_estimate(lambda size: grid_count(hf.forms, hf.generating, size, triangular, workers), w, m)
    logger.info(f"Hankel grid p{'_u' if triangular else ''}({w}) = {result.estimate:.6f} +/- {result.error_bar:.6f}")
    return result


def pu_grid_wigner(w: Word, m: int = 160, workers: int = 1) -> PuValue:
    """Riemann sum of the Wigner indicator over the phi-map forms."""
    forms = wigner_forms(w)
    generating = generating_vertices(w)
    return _grid_estimate(lambda size: grid_count(forms, generating, size, True, workers), w, m)


# ---------------------------------------------------------------------------
# Appendix inequalities
# ---------------------------------------------------------------------------

@dataclass
class ClauseResult:
    name: str
    description: str
    checked: int = 0
    equalities: int = 0
    counterexamples: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "checked": self.checked,
            "equalities": self.equalities,
            "counterexamples": self.counterexamples,
        }


@dataclass
class AppendixReport:
    k_max: int
    clauses: List[ClauseResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "passed": self.passed, "clauses": [c.to_dict() for c in self.clauses]}


def verify_appendix(k_max: int = 5) -> AppendixReport:
    """Exact checks of the word-contribution inequalities over all Catalan words up to length 2*k_max."""
    if not 1 <= k_max <= MAX_APPENDIX_K:
        raise ValueError(f"k_max must be in 1..{MAX_APPENDIX_K}, got {k_max}")

    ladder = ClauseResult("a", "p_u(a1 a1 ... ak ak) == 1/(k+1)")
    bound = ClauseResult("b", "p_u(w) <= 1/(k+1)")
    hoist = ClauseResult("c", "p_u(a w1 a w2) <= p_u(a a w1 w2)")
    unnest = ClauseResult("d", "p_u(abba w1 w2) >= p_u(ab w1 ba w2)")
    rotation = ClauseResult("e", "p_u(rotate(w, r)) == p_u(w)")

    def compare(clause: ClauseResult, lhs: Fraction, rhs: Fraction, ok: bool, label: str) -> None:
        clause.checked += 1
        if lhs == rhs:
            clause.equalities += 1
        if not ok:
            clause.counterexamples.append(f"{label}: {fraction_text(lhs)} vs {fraction_text(rhs)}")

    for k in range(1, k_max + 1):
        bound_k = Fraction(1, k + 1)
        flat = Word(tuple(x for letter in range(1, k + 1) for x in (letter, letter)))
        p_flat = pu_exact_wigner(flat)
        compare(ladder, p_flat, bound_k, p_flat == bound_k, str(flat))

        for w in enumerate_catalan(k):
            p = pu_exact_wigner(w)
            compare(bound, p, bound_k, p <= bound_k, str(w))

            w1, w2 = catalan_split(w)
            a = w.letters[0]
            hoisted = Word.of((a, a) + w1 + w2)
            p_hoisted = pu_exact_wigner(hoisted)
            compare(hoist, p, p_hoisted, p <= p_hoisted, f"{w} vs {hoisted}")

            if w.length >= 4 and w.letters[:4] == (1, 2, 2, 1):
                rest = w.letters[4:]
                for cut in balanced_prefixes(rest):
                    nested = Word.of((1, 2) + rest[:cut] + (2, 1) + rest[cut:])
                    p_nested = pu_exact_wigner(nested)
                    compare(unnest, p, p_nested, p >= p_nested, f"{w} vs {nested}")

            for r in range(1, w.length):
                p_rot = pu_exact_wigner(rotate(w, r))
                compare(rotation, p_rot, p, p_rot == p, f"rotate({w}, {r})")

    report = AppendixReport(k_max, [ladder, bound, hoist, unnest, rotation])
    logger.info(f"Appendix checks up to k={k_max}: {'pass' if report.passed else 'FAIL'}")
    return report
