"""Pattern matching engines: brute force, grid-preserving, and a DP whose
state size is governed by the path-width of the pattern ordering."""

from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .exceptions import ResourceLimitError
from .grid import GriddedPermutation
from .perm import Permutation, contains_brute
from .width import PwOrdering, good_ordering, make_ordering

DEFAULT_MAX_STATES = 2_000_000


@dataclass(frozen=True)
class MatchRequest:
    pattern: Permutation
    text: Permutation
    strategy: str = "dp"
    ordering: Optional[PwOrdering] = None
    want_witness: bool = True
    max_states: int = DEFAULT_MAX_STATES

    def __post_init__(self):
        object.__setattr__(self, "pattern", Permutation(self.pattern))
        object.__setattr__(self, "text", Permutation(self.text))
        if self.strategy not in ("brute", "dp"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.ordering is not None and len(self.ordering.ordering) != len(self.pattern):
            raise ValueError("ordering length does not match the pattern")


@dataclass
class MatchResult:
    contained: bool
    witness: Optional[tuple]
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "contained": self.contained,
            "witness": list(self.witness) if self.witness is not None else None,
            "stats": dict(self.stats),
        }


def match(req: MatchRequest) -> MatchResult:
    """Decide whether ``req.text`` contains ``req.pattern``."""
    pattern, text = req.pattern, req.text
    if len(pattern) > len(text):
        return MatchResult(False, None, {"engine": req.strategy, "reason": "pattern longer than text"})
    if req.strategy == "brute":
        occ = contains_brute(pattern, text)
        return MatchResult(occ is not None, occ if req.want_witness else None, {"engine": "brute"})
    ordering = req.ordering or good_ordering(pattern)
    occ, stats = dp_match(pattern, text, ordering.ordering, req.max_states)
    stats["ordering_width"] = ordering.achieved_width
    return MatchResult(occ is not None, occ if req.want_witness else None, stats)


def _run_bounds(members: Sequence[int]) -> list[int]:
    """Sorted endpoints of the maximal runs of a sorted integer list."""
    out = []
    for idx, v in enumerate(members):
        first = idx == 0 or members[idx - 1] != v - 1
        last = idx == len(members) - 1 or members[idx + 1] != v + 1
        if first or last:  # a singleton run contributes one endpoint
            out.append(v)
    return out


def dp_match(pattern: Sequence[int], text: Sequence[int], sigma: Sequence[int], max_states: int = DEFAULT_MAX_STATES):
    """Layered DP over the pattern points in ``sigma`` order.

    After placing a set ``P`` of pattern positions, a state stores the text
    positions assigned to the endpoints of the runs of ``P`` and the text
    values assigned to the endpoints of the runs of ``pi(P)``. These are the
    only images a later point is compared with: its nearest placed
    neighbours in either coordinate are always run endpoints. A width-``w``
    ordering keeps at most ``2w`` endpoints per coordinate, so a layer holds
    at most ``n^(4w)`` states.

    Returns ``(occurrence or None, stats)``.
    """
    k, n = len(pattern), len(text)
    if len(sigma) != k or sorted(sigma) != list(range(1, k + 1)):
        raise ValueError("ordering must be a permutation of the pattern positions")
    stats = {"engine": "dp", "layers": k, "states": 0, "max_layer": 1}
    if k == 0:
        return (), stats
    xs_placed: list[int] = []  # pattern positions placed so far (sorted)
    ys_placed: list[int] = []  # their pattern values (sorted)
    # state: (tuple of x-images for x_bounds, tuple of y-images for y_bounds)
    layer = {((), ()): None}
    x_bounds: list[int] = []
    y_bounds: list[int] = []
    history = []
    total = 0
    for a in sigma:
        b = pattern[a - 1]
        xi = bisect_left(xs_placed, a)
        yi = bisect_left(ys_placed, b)
        left = xs_placed[xi - 1] if xi else None
        right = xs_placed[xi] if xi < len(xs_placed) else None
        below = ys_placed[yi - 1] if yi else None
        above = ys_placed[yi] if yi < len(ys_placed) else None
        new_xs = xs_placed[:]
        insort(new_xs, a)
        new_ys = ys_placed[:]
        insort(new_ys, b)
        new_xb = _run_bounds(new_xs)
        new_yb = _run_bounds(new_ys)
        xpos = {v: t for t, v in enumerate(x_bounds)}
        ypos = {v: t for t, v in enumerate(y_bounds)}
        # room needed on each side of the new image
        need_l = a - (left or 0) - 1
        need_r = (right or k + 1) - a - 1
        need_b = b - (below or 0) - 1
        need_a = (above or k + 1) - b - 1
        nxt: dict = {}
        for state in layer:
            ximg, yimg = state
            img_x = dict(zip(x_bounds, ximg))
            img_y = dict(zip(y_bounds, yimg))
            lo_x = ximg[xpos[left]] if left is not None else 0
            hi_x = ximg[xpos[right]] if right is not None else n + 1
            lo_y = yimg[ypos[below]] if below is not None else 0
            hi_y = yimg[ypos[above]] if above is not None else n + 1
            for x in range(lo_x + need_l + 1, hi_x - need_r):
                v = text[x - 1]
                if not (lo_y + need_b < v < hi_y - need_a):
                    continue
                img_x[a] = x
                img_y[b] = v
                key = (tuple(img_x[u] for u in new_xb), tuple(img_y[u] for u in new_yb))
                if key not in nxt:
                    nxt[key] = (state, x)
                    total += 1
                    if total > max_states:
                        raise ResourceLimitError(f"DP exceeded {max_states} states")
            img_x.pop(a, None)
            img_y.pop(b, None)
        history.append(nxt)
        stats["max_layer"] = max(stats["max_layer"], len(nxt))
        if not nxt:
            stats["states"] = total
            return None, stats
        layer = nxt
        xs_placed, ys_placed, x_bounds, y_bounds = new_xs, new_ys, new_xb, new_yb
    stats["states"] = total
    # walk the back-pointers from the first final state
    state = next(iter(layer))
    images = {}
    for a, nxt in zip(reversed(sigma), reversed(history)):
        prev, x = nxt[state]
        images[a] = x
        state = prev
    return tuple(images[a] for a in range(1, k + 1)), stats


def dp_contains(pattern: Sequence[int], text: Sequence[int], sigma: Optional[Sequence[int]] = None) -> bool:
    if len(pattern) > len(text):
        return False
    if sigma is None:
        sigma = good_ordering(pattern).ordering
    return dp_match(pattern, text, sigma)[0] is not None


def grid_preserving_match(p: GriddedPermutation, t: GriddedPermutation) -> Optional[tuple]:
    """First occurrence of ``p`` in ``t`` sending each cell into the same cell."""
    if p.matrix.shape != t.matrix.shape:
        raise ValueError(f"matrix shapes differ: {p.matrix.shape} vs {t.matrix.shape}")
    if len(p.perm) > len(t.perm):
        return None
    return contains_brute(p.perm, t.perm, cells=(p.cell_labels(), t.cell_labels()))


def ordering_for(pattern: Sequence[int], sigma: Sequence[int]) -> PwOrdering:
    return make_ordering(pattern, sigma)
