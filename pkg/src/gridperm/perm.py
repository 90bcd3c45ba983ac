"""Permutations, point sets and containment primitives.

Permutations are 1-indexed sequences: ``p[i - 1]`` is the value at position
``i`` and the diagram of ``p`` is the point set ``{(i, p[i - 1])}``.
"""

from bisect import bisect_left
from typing import Iterable, Iterator, Optional, Sequence

Point = tuple[int, int]
Occurrence = tuple[int, ...]


class Permutation(tuple):
    """An immutable permutation of ``1..n``.

    Accepts any iterable of integers, or a string: either space separated
    (``"1 5 3 4 2"``) or a run of single digits (``"15342"``).
    """

    def __new__(cls, values: Iterable[int] | str = ()):
        if isinstance(values, str):
            text = values.strip()
            if not text:
                values = ()
            elif any(ch.isspace() for ch in text) or "," in text:
                values = [int(tok) for tok in text.replace(",", " ").split()]
            else:
                values = [int(ch) for ch in text]
        self = super().__new__(cls, values)
        if sorted(self) != list(range(1, len(self) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self)}: {tuple(self)}")
        return self

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    def points(self) -> list[Point]:
        return [(i, v) for i, v in enumerate(self, start=1)]

    def reverse(self) -> "Permutation":
        return Permutation(self[::-1])

    def complement(self) -> "Permutation":
        n = len(self)
        return Permutation(n + 1 - v for v in self)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for i, v in enumerate(self, start=1):
            inv[v - 1] = i
        return Permutation(inv)

    def __str__(self) -> str:
        if len(self) < 10:
            return "".join(map(str, self))
        return " ".join(map(str, self))

    def __repr__(self) -> str:
        return f"Permutation({str(self)!r})"


def check_point_set(points: Iterable[Point]) -> frozenset:
    """Return ``points`` as a frozenset, rejecting shared coordinates."""
    pts = frozenset((int(x), int(y)) for x, y in points)
    if len({x for x, _ in pts}) != len(pts) or len({y for _, y in pts}) != len(pts):
        raise ValueError("point set repeats an x or a y coordinate")
    return pts


def standardize(points: Iterable[Point]) -> Permutation:
    """The permutation order-isomorphic to a point set."""
    pts = sorted(check_point_set(points))
    ys = sorted(y for _, y in pts)
    rank = {y: r for r, y in enumerate(ys, start=1)}
    return Permutation(rank[y] for _, y in pts)


def pattern_of(text: Sequence[int], positions: Iterable[int]) -> Permutation:
    """Standardize the subsequence of ``text`` at 1-based ``positions``."""
    return standardize((i, text[i - 1]) for i in positions)


SYMMETRIES = ("reverse", "complement", "inverse")


def symmetry(p: Permutation, which: str) -> Permutation:
    if which == "reverse":
        return p.reverse()
    if which == "complement":
        return p.complement()
    if which == "inverse":
        return p.inverse()
    raise ValueError(f"unknown symmetry {which!r}; expected one of {SYMMETRIES}")


def _neighbour_table(pattern: Sequence[int]):
    # For each pattern index j: the earlier indices holding the nearest smaller
    # and nearest larger value. Matching them keeps the prefix order-isomorphic.
    table = []
    for j, v in enumerate(pattern):
        below = above = None
        for a in range(j):
            w = pattern[a]
            if w < v and (below is None or w > pattern[below]):
                below = a
            elif w > v and (above is None or w < pattern[above]):
                above = a
        table.append((below, above))
    return table


def iter_occurrences(
    pattern: Sequence[int],
    text: Sequence[int],
    allowed: Optional[Sequence[Optional[Iterable[int]]]] = None,
) -> Iterator[Occurrence]:
    """Yield every occurrence of ``pattern`` in ``text`` in lexicographic order.

    ``allowed[j]`` optionally restricts the text positions (1-based) that the
    pattern's ``j+1``-th entry may be mapped to; ``None`` means unrestricted.
    """
    k, n = len(pattern), len(text)
    if k > n:
        return
    if k == 0:
        yield ()
        return
    table = _neighbour_table(pattern)
    masks = None
    if allowed is not None:
        if len(allowed) != k:
            raise ValueError("allowed must have one entry per pattern position")
        masks = [None if a is None else frozenset(a) for a in allowed]
    chosen = [0] * k

    def extend(j: int, start: int):
        below, above = table[j]
        lo = text[chosen[below] - 1] if below is not None else 0
        hi = text[chosen[above] - 1] if above is not None else n + 1
        mask = masks[j] if masks is not None else None
        # leave room for the remaining k - j - 1 entries
        for pos in range(start, n - (k - j - 1) + 1):
            v = text[pos - 1]
            if lo < v < hi and (mask is None or pos in mask):
                chosen[j] = pos
                if j == k - 1:
                    yield tuple(chosen)
                else:
                    yield from extend(j + 1, pos + 1)

    yield from extend(0, 1)


def _labels_to_allowed(pattern_cells, text_cells):
    by_label: dict = {}
    for pos, label in enumerate(text_cells, start=1):
        by_label.setdefault(label, []).append(pos)
    return [by_label.get(label, ()) for label in pattern_cells]


def contains_brute(
    pattern: Sequence[int],
    text: Sequence[int],
    cells: Optional[tuple[Sequence, Sequence]] = None,
) -> Optional[Occurrence]:
    """Lexicographically first occurrence of ``pattern`` in ``text``, or None.

    With ``cells=(pattern_cells, text_cells)`` (one cell label per position)
    only occurrences mapping every entry into an equally labelled text entry
    are accepted, i.e. grid-preserving copies.
    """
    if len(pattern) > len(text):
        raise ValueError("pattern is longer than text")
    allowed = None
    if cells is not None:
        pattern_cells, text_cells = cells
        if len(pattern_cells) != len(pattern) or len(text_cells) != len(text):
            raise ValueError("cell labels must match the permutation lengths")
        allowed = _labels_to_allowed(pattern_cells, text_cells)
    return next(iter_occurrences(pattern, text, allowed), None)


def contains(pattern: Sequence[int], text: Sequence[int]) -> bool:
    return len(pattern) <= len(text) and contains_brute(pattern, text) is not None


def is_occurrence(pattern: Sequence[int], text: Sequence[int], positions: Sequence[int]) -> bool:
    """Independent re-check that ``positions`` carry a copy of ``pattern``."""
    if len(positions) != len(pattern) or list(positions) != sorted(set(positions)):
        return False
    if any(not 1 <= pos <= len(text) for pos in positions):
        return False
    return tuple(pattern_of(text, positions)) == tuple(pattern)


def _monotone_indices(seq: Sequence[int], increasing: bool) -> list[int]:
    # patience sorting with predecessor links; returns indices of one longest run
    key = (lambda v: v) if increasing else (lambda v: -v)
    tails: list[int] = []
    tail_idx: list[int] = []
    prev = [-1] * len(seq)
    for i, v in enumerate(seq):
        kv = key(v)
        slot = bisect_left(tails, kv)
        if slot == len(tails):
            tails.append(kv)
            tail_idx.append(i)
        else:
            tails[slot] = kv
            tail_idx[slot] = i
        prev[i] = tail_idx[slot - 1] if slot else -1
    out = []
    i = tail_idx[-1] if tail_idx else -1
    while i != -1:
        out.append(i)
        i = prev[i]
    return out[::-1]


def longest_monotone_subsequence(seq: Sequence[int], increasing: bool = True) -> list[int]:
    """0-based indices of a longest strictly increasing (or decreasing) subsequence."""
    return _monotone_indices(seq, increasing)


def lis_length(p: Sequence[int], direction: str = "increasing") -> int:
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    key = (lambda v: v) if direction == "increasing" else (lambda v: -v)
    tails: list[int] = []
    for v in p:
        kv = key(v)
        slot = bisect_left(tails, kv)
        if slot == len(tails):
            tails.append(kv)
        else:
            tails[slot] = kv
    return len(tails)


def longest_monotone_length(p: Sequence[int]) -> int:
    return max(lis_length(p, "increasing"), lis_length(p, "decreasing"))


def is_alternation(p: Sequence[int], axis: str = "horizontal") -> bool:
    """Horizontal: every even value precedes every odd value.

    Vertical: the inverse is a horizontal alternation.
    """
    if axis == "vertical":
        p = Permutation(p).inverse()
    elif axis != "horizontal":
        raise ValueError(f"unknown axis {axis!r}")
    seen_odd = False
    for v in p:
        if v % 2:
            seen_odd = True
        elif seen_odd:
            return False
    return True


def horizontal_alternation(left: Sequence[int], right: Sequence[int]) -> Permutation:
    """Build a horizontal alternation from two orderings of ``1..m``.

    ``left[t]`` ranks the t-th left entry among the left part (it receives
    value ``2 * left[t]``); ``right`` likewise receives the odd values.
    """
    if sorted(left) != list(range(1, len(left) + 1)) or sorted(right) != list(range(1, len(right) + 1)):
        raise ValueError("left and right must be permutations")
    if len(left) not in (len(right), len(right) - 1):
        raise ValueError("left part may be at most one entry shorter than the right part")
    return Permutation([2 * a for a in left] + [2 * b - 1 for b in right])


def extract_monotone_alternation(p: Sequence[int], axis: str = "horizontal") -> Permutation:
    """A monotone alternation of size at least ``2 * floor(m ** 0.25)`` inside ``p``.

    ``p`` must be an alternation of size ``2m``. Two Erdős–Szekeres sweeps:
    first keep a monotone run of the odd entries (each paired with the even
    value just above it), then a monotone run of the surviving even entries.
    """
    p = Permutation(p)
    if axis == "vertical":
        return extract_monotone_alternation(p.inverse(), "horizontal").inverse()
    if axis != "horizontal":
        raise ValueError(f"unknown axis {axis!r}")
    if len(p) % 2 or not is_alternation(p, "horizontal"):
        raise ValueError("input is not a horizontal alternation of even size")
    if not p:
        return p
    m = len(p) // 2
    pos = {v: i for i, v in enumerate(p)}
    odds = list(p[m:])
    keep = _longer_monotone(odds)
    kept_odds = [odds[i] for i in keep]
    # even partner of odd value o is o + 1, preserving the interleaving
    evens = sorted((o + 1 for o in kept_odds), key=lambda v: pos[v])
    keep = _longer_monotone(evens)
    kept_evens = [evens[i] for i in keep]
    chosen = kept_evens + [e - 1 for e in kept_evens]
    return standardize((pos[v], v) for v in chosen)


def _longer_monotone(seq: Sequence[int]) -> list[int]:
    inc = _monotone_indices(seq, True)
    dec = _monotone_indices(seq, False)
    return inc if len(inc) >= len(dec) else dec
