import logging
import string
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from triangular_lsd.errors import DomainError, ResourceLimitError

logger = logging.getLogger(__name__)

MAX_PAIR_MATCHED_K = 8
MAX_CATALAN_K = 10


def canonicalize(letters: Sequence[int]) -> Tuple[int, ...]:
    """Relabel letters so first occurrences read 1, 2, 3, ... left to right."""
    relabel: Dict[int, int] = {}
    out = []
    for letter in letters:
        if letter not in relabel:
            relabel[letter] = len(relabel) + 1
        out.append(relabel[letter])
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A circuit equivalence class, stored as canonical positive integers."""

    letters: Tuple[int, ...]

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if any(x < 1 for x in letters):
            raise ValueError(f"Word letters must be >= 1: {letters}")
        if canonicalize(letters) != letters:
            raise ValueError(f"Word is not in canonical form: {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse 'abba' or '1,2,2,1'; the result is canonicalized."""
        text = text.strip()
        if "," in text:
            raw = [int(tok) for tok in text.split(",") if tok.strip()]
        else:
            raw = [string.ascii_lowercase.index(ch) + 1 for ch in text.lower()]
        return cls(canonicalize(raw))

    @classmethod
    def of(cls, letters: Sequence[int]) -> "Word":
        return cls(canonicalize(letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def half_length(self) -> int:
        return len(self.letters) // 2

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if self.letters and max(self.letters) <= 26:
            return "".join(string.ascii_lowercase[x - 1] for x in self.letters)
        return ",".join(str(x) for x in self.letters)


@dataclass(frozen=True)
class WordClassification:
    pair_matched: bool
    catalan: bool
    symmetric: bool

    def to_dict(self) -> dict:
        return {"pair_matched": self.pair_matched, "catalan": self.catalan, "symmetric": self.symmetric}


@dataclass(frozen=True)
class PhiMap:
    word: Word
    generating: Tuple[int, ...]
    phi: Tuple[int, ...]


def _is_pair_matched(letters: Sequence[int]) -> bool:
    counts: Dict[int, int] = {}
    for letter in letters:
        counts[letter] = counts.get(letter, 0) + 1
    return all(c == 2 for c in counts.values())


def classify(w: Word) -> WordClassification:
    pair_matched = _is_pair_matched(w.letters)
    if not pair_matched:
        return WordClassification(False, False, False)

    # Deleting adjacent double letters is a stack reduction.
    stack: List[int] = []
    for letter in w.letters:
        if stack and stack[-1] == letter:
            stack.pop()
        else:
            stack.append(letter)
    catalan = not stack

    parity: Dict[int, int] = {}
    for pos, letter in enumerate(w.letters, start=1):
        parity[letter] = parity.get(letter, 0) + pos % 2
    symmetric = all(v == 1 for v in parity.values())
    return WordClassification(True, catalan, symmetric)


def _matchings(k: int) -> Iterator[Tuple[int, ...]]:
    letters = [0] * (2 * k)

    def place(next_letter: int) -> Iterator[Tuple[int, ...]]:
        try:
            first = letters.index(0)
        except ValueError:
            yield tuple(letters)
            return
        letters[first] = next_letter
        for partner in range(first + 1, 2 * k):
            if letters[partner] == 0:
                letters[partner] = next_letter
                yield from place(next_letter + 1)
                letters[partner] = 0
        letters[first] = 0

    yield from place(1)


def enumerate_pair_matched(k: int, cap: int = MAX_PAIR_MATCHED_K) -> List[Word]:
    """All (2k-1)!! pair-matched words of length 2k, from perfect matchings."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > cap:
        raise ResourceLimitError(f"Pair-matched enumeration capped at k={cap}, got k={k}")
    words = [Word(letters) for letters in _matchings(k)]
    logger.debug(f"Enumerated {len(words)} pair-matched words of length {2 * k}")
    return words


def _dyck(k: int) -> Iterator[Tuple[int, ...]]:
    # w = a w1 a w2 with w1, w2 Catalan; letters relabelled afterwards.
    if k == 0:
        yield ()
        return
    for inner in range(k):
        for w1 in _dyck(inner):
            for w2 in _dyck(k - 1 - inner):
                shift1 = tuple(x + 1 for x in w1)
                shift2 = tuple(x + 1 + inner for x in w2)
                yield (1,) + shift1 + (1,) + shift2


def enumerate_catalan(k: int, cap: int = MAX_CATALAN_K) -> List[Word]:
    """All Catalan words of length 2k, in lexicographic order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > cap:
        raise ResourceLimitError(f"Catalan enumeration capped at k={cap}, got k={k}")
    words = sorted({canonicalize(letters) for letters in _dyck(k)})
    logger.debug(f"Enumerated {len(words)} Catalan words of length {2 * k}")
    return [Word(letters) for letters in words]


def enumerate_symmetric(k: int, cap: int = MAX_PAIR_MATCHED_K) -> List[Word]:
    return [w for w in enumerate_pair_matched(k, cap) if classify(w).symmetric]


WORD_CLASSES = ("all", "pair", "catalan", "symmetric")


def enumerate_class(word_class: str, k: int) -> List[Word]:
    """Words of length 2k in one class; "all" and "pair" both mean every pair-matched word."""
    if word_class == "catalan":
        return enumerate_catalan(k)
    if word_class == "symmetric":
        return enumerate_symmetric(k)
    if word_class in ("all", "pair"):
        return enumerate_pair_matched(k)
    raise ValueError(f"Unknown word class: {word_class!r} (expected one of {', '.join(WORD_CLASSES)})")


def generating_vertices(w: Word) -> Tuple[int, ...]:
    """Position 0 plus the (1-based) positions of first occurrences."""
    seen = set()
    out = [0]
    for pos, letter in enumerate(w.letters, start=1):
        if letter not in seen:
            seen.add(letter)
            out.append(pos)
    return tuple(out)


def partners(w: Word) -> Dict[int, int]:
    """Map each second-occurrence position to its first-occurrence position."""
    first: Dict[int, int] = {}
    out: Dict[int, int] = {}
    for pos, letter in enumerate(w.letters, start=1):
        if letter in first:
            out[pos] = first[letter]
        else:
            first[letter] = pos
    return out


def phi_map(w: Word) -> PhiMap:
    if not classify(w).catalan:
        raise DomainError(f"phi map needs a Catalan word, got {w}")
    phi = [0] * (w.length + 1)
    closing = partners(w)
    for pos in range(1, w.length + 1):
        if pos in closing:
            phi[pos] = phi[closing[pos] - 1]
        else:
            phi[pos] = pos
    return PhiMap(word=w, generating=generating_vertices(w), phi=tuple(phi))


def rotate(w: Word, r: int) -> Word:
    """Cyclic left shift by r positions, re-canonicalized."""
    if not w.letters:
        return w
    r %= w.length
    return Word.of(w.letters[r:] + w.letters[:r])


def catalan_split(w: Word) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Split a Catalan word as a w1 a w2 where a is the first letter.
    Returns (w1, w2) as raw letter tuples (not re-canonicalized).
    """
    letters = w.letters
    partner = letters.index(letters[0], 1)
    return letters[1:partner], letters[partner + 1:]


def balanced_prefixes(letters: Sequence[int]) -> List[int]:
    """Cut points c such that letters[:c] is itself pair-closed."""
    open_letters = set()
    cuts = [0]
    for pos, letter in enumerate(letters, start=1):
        if letter in open_letters:
            open_letters.remove(letter)
        else:
            open_letters.add(letter)
        if not open_letters:
            cuts.append(pos)
    return cuts
