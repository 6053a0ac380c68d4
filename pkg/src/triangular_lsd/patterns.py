import logging
from enum import Enum
from typing import List, Tuple, Union

import numpy as np

from triangular_lsd.errors import IndexRangeError

logger = logging.getLogger(__name__)

LinkValue = Union[int, Tuple[int, int]]


class LinkPattern(str, Enum):
    WIGNER = "wigner"
    HANKEL = "hankel"
    TOEPLITZ = "toeplitz"
    SYMMETRIC_CIRCULANT = "symcirc"
    # A triangular Reverse Circulant coincides with a triangular Hankel matrix.
    REVERSE_CIRCULANT = "hankel"


_ALIASES = {
    "reverse-circulant": LinkPattern.HANKEL,
    "revcirc": LinkPattern.HANKEL,
    "symmetric-circulant": LinkPattern.SYMMETRIC_CIRCULANT,
}


def parse_pattern(name: Union[str, LinkPattern]) -> LinkPattern:
    """Resolve a CLI / tool name (or an enum member) to a LinkPattern."""
    if isinstance(name, LinkPattern):
        return name
    key = name.strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return LinkPattern(key)
    except ValueError:
        valid = sorted({p.value for p in LinkPattern} | set(_ALIASES))
        raise ValueError(f"Unknown pattern: {name!r} (expected one of {', '.join(valid)})")


def _check_index(i: int, j: int, n: int) -> None:
    if n < 1:
        raise IndexRangeError(f"Matrix size must be >= 1, got {n}")
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexRangeError(f"Index ({i}, {j}) outside 1..{n}")


def link_value(pattern: LinkPattern, i: int, j: int, n: int) -> LinkValue:
    """
    Input-sequence index feeding entry (i, j) of an n x n patterned matrix.

    Wigner values are the ordered pair (min, max) so equality of link values
    is plain value equality. Only the Symmetric Circulant link depends on n.
    """
    _check_index(i, j, n)
    d = abs(i - j)
    if pattern is LinkPattern.WIGNER:
        return (min(i, j), max(i, j))
    if pattern is LinkPattern.HANKEL:
        return i + j
    if pattern is LinkPattern.TOEPLITZ:
        return d
    if pattern is LinkPattern.SYMMETRIC_CIRCULANT:
        return min(d, n - d)
    raise ValueError(f"Unsupported pattern: {pattern}")


def in_triangle(i: int, j: int, n: int) -> bool:
    """True iff (i, j) lies on or above the anti-diagonal."""
    _check_index(i, j, n)
    return i + j <= n + 1


def link_keys(pattern: LinkPattern, rows: np.ndarray, cols: np.ndarray, n: int) -> np.ndarray:
    """Vectorized link values as integers (1-based indices, broadcasting)."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    d = np.abs(rows - cols)
    if pattern is LinkPattern.WIGNER:
        return np.minimum(rows, cols) * (n + 1) + np.maximum(rows, cols)
    if pattern is LinkPattern.HANKEL:
        return rows + cols
    if pattern is LinkPattern.TOEPLITZ:
        return d
    if pattern is LinkPattern.SYMMETRIC_CIRCULANT:
        return np.minimum(d, n - d)
    raise ValueError(f"Unsupported pattern: {pattern}")


def link_matrix(pattern: LinkPattern, n: int) -> np.ndarray:
    """Integer link keys for every entry of the n x n grid (row/col 1..n)."""
    idx = np.arange(1, n + 1, dtype=np.int64)
    return link_keys(pattern, idx[:, None], idx[None, :], n)


def triangle_mask(n: int) -> np.ndarray:
    idx = np.arange(1, n + 1)
    return (idx[:, None] + idx[None, :]) <= n + 1


def solve_link(pattern: LinkPattern, c: np.ndarray, target: np.ndarray, n: int) -> List[np.ndarray]:
    """
    Columns x in 1..n with L(c, x) == target, vectorized over rows.

    Returns a list of candidate arrays; a candidate is 0 where it is not a
    solution. Candidates are pairwise distinct wherever both are nonzero, so
    each circuit is produced once even when two branches coincide.
    """
    c = np.asarray(c, dtype=np.int64)
    target = np.asarray(target, dtype=np.int64)

    def _valid(x: np.ndarray) -> np.ndarray:
        return np.where((x >= 1) & (x <= n), x, 0)

    if pattern is LinkPattern.WIGNER:
        lo, hi = target // (n + 1), target % (n + 1)
        x = np.where(c == lo, hi, np.where(c == hi, lo, 0))
        return [x]
    if pattern is LinkPattern.HANKEL:
        return [_valid(target - c)]
    if pattern is LinkPattern.TOEPLITZ:
        down = _valid(c - target)
        up = _valid(c + target)
        return [down, np.where(target == 0, 0, up)]
    if pattern is LinkPattern.SYMMETRIC_CIRCULANT:
        candidates = []
        for x in (c - target, c + target, c - (n - target), c + (n - target)):
            x = _valid(x)
            for prev in candidates:
                x = np.where(x == prev, 0, x)
            candidates.append(x)
        return candidates
    raise ValueError(f"Unsupported pattern: {pattern}")


def delta_bound(pattern: LinkPattern, n: int) -> int:
    """
    Largest number of columns l in one row k that share a link value,
    restricted to k + l <= n + 1 (brute force over rows and realized values).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    keys = link_matrix(pattern, n)
    mask = triangle_mask(n)
    best = 0
    for k in range(n):
        row = keys[k][mask[k]]
        if row.size:
            _, counts = np.unique(row, return_counts=True)
            best = max(best, int(counts.max()))
    logger.debug(f"delta_bound({pattern.value}, {n}) = {best}")
    return best


def property_p_bound(pattern: LinkPattern, n: int) -> int:
    """
    sup over i != j of #{k : k+i <= n+1, k+j <= n+1, L(k,i) == L(k,j)}.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    keys = link_matrix(pattern, n)
    mask = triangle_mask(n)
    best = 0
    for i in range(n):
        same = (keys[:, i][:, None] == keys) & mask[:, i][:, None] & mask
        counts = same.sum(axis=0)
        counts[i] = 0
        best = max(best, int(counts.max()))
    logger.debug(f"property_p_bound({pattern.value}, {n}) = {best}")
    return best
