"""Exact enumeration of the combinatorial objects behind the Wick formulas.

Positions are 1-based throughout. Sign patterns use ``-1`` for an
annihilator and ``+1`` for a creator. Every enumerator returns a list in
lexicographic order of the canonical encoding, so results are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

Pair = tuple[int, int]
Pairing = tuple[Pair, ...]

PP_CAP = 8
NCPP_CAP = 10
PATTERN_CAP = 10


class CapExceededError(ValueError):
    """Raised when an exhaustive enumeration would exceed its documented cap."""


def _check_cap(n: int, cap: int, what: str) -> None:
    if n < 1:
        raise ValueError(f"{what}: half-size must be >= 1, got {n}")
    if n > cap:
        raise CapExceededError(f"{what}: n={n} exceeds cap {cap}")


# -- permutations -------------------------------------------------------------

def inversion_count(images: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``images[i] > images[j]``.

    >>> inversion_count((3, 2, 1))
    3
    """
    n = len(images)
    if sorted(images) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {tuple(images)}")
    return sum(1 for i in range(n) for j in range(i + 1, n) if images[i] > images[j])


# -- pair partitions ----------------------------------------------------------

@dataclass(frozen=True)
class PairPartition:
    pairs: Pairing

    def __post_init__(self):
        pairs = tuple(tuple(p) for p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        lefts = [l for l, _ in pairs]
        if lefts != sorted(set(lefts)):
            raise ValueError("left endpoints must be strictly increasing")
        if any(l >= r for l, r in pairs):
            raise ValueError("each pair needs l < r")
        ends = sorted(x for p in pairs for x in p)
        if ends != list(range(1, 2 * len(pairs) + 1)):
            raise ValueError("endpoints must be exactly 1..2n")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def is_noncrossing(self) -> bool:
        return not any(
            la < lb < ra < rb
            for (la, ra), (lb, rb) in combinations(self.pairs, 2)
        )


def _all_pairings(items: tuple[int, ...]) -> Iterator[Pairing]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in _all_pairings(rest[:i] + rest[i + 1:]):
            yield ((first, partner),) + tail


def enumerate_pair_partitions(n: int) -> list[PairPartition]:
    """All pair partitions of ``{1, ..., 2n}``; there are ``(2n-1)!!``."""
    _check_cap(n, PP_CAP, "pair partitions")
    return [PairPartition(p) for p in _all_pairings(tuple(range(1, 2 * n + 1)))]


def _noncrossing(lo: int, hi: int) -> Iterator[Pairing]:
    # non-crossing pairings of the contiguous interval [lo, hi]
    if lo > hi:
        yield ()
        return
    for r in range(lo + 1, hi + 1, 2):
        for inner in _noncrossing(lo + 1, r - 1):
            for outer in _noncrossing(r + 1, hi):
                yield tuple(sorted(((lo, r),) + inner + outer))


def enumerate_noncrossing(n: int) -> list[PairPartition]:
    """Non-crossing pair partitions of ``{1, ..., 2n}`` (Catalan many)."""
    _check_cap(n, NCPP_CAP, "non-crossing pair partitions")
    return [PairPartition(p) for p in sorted(_noncrossing(1, 2 * n))]


def pair_depth(theta: PairPartition, k: int) -> int:
    """Number of pairs of ``theta`` strictly enclosing its ``k``-th pair."""
    if not 1 <= k <= len(theta):
        raise IndexError(f"pair index {k} out of range 1..{len(theta)}")
    if not theta.is_noncrossing:
        raise ValueError("depth is defined for non-crossing partitions")
    lk, rk = theta.pairs[k - 1]
    return sum(1 for l, r in theta.pairs if l < lk and rk < r)


# -- sign patterns ------------------------------------------------------------

def is_balanced(signs: Sequence[int]) -> bool:
    """Total sum zero and every suffix sum non-negative."""
    total = 0
    for s in reversed(signs):
        total += s
        if total < 0:
            return False
    return total == 0


def _check_signs(signs: Sequence[int]) -> tuple[int, ...]:
    signs = tuple(int(s) for s in signs)
    if any(s not in (-1, 1) for s in signs):
        raise ValueError(f"sign pattern must be over {{-1, +1}}: {signs}")
    return signs


def enumerate_balanced_patterns(n: int) -> list[tuple[int, ...]]:
    """Balanced sign patterns of length ``2n``, in lexicographic order."""
    _check_cap(n, PATTERN_CAP, "balanced patterns")
    out: list[tuple[int, ...]] = []

    def grow(prefix: list[int], height: int, opened: int) -> None:
        # height = -(prefix sum) = number of unmatched annihilators
        if len(prefix) == 2 * n:
            out.append(tuple(prefix))
            return
        for s in (-1, 1):
            if s == -1 and opened < n:
                prefix.append(-1)
                grow(prefix, height + 1, opened + 1)
                prefix.pop()
            elif s == 1 and height > 0:
                prefix.append(1)
                grow(prefix, height - 1, opened)
                prefix.pop()

    grow([], 0, 0)
    return out


def ncpp_from_pattern(signs: Sequence[int]) -> PairPartition:
    """The unique non-crossing partition pairing each -1 with a later +1."""
    signs = _check_signs(signs)
    if not is_balanced(signs):
        raise ValueError(f"pattern is not balanced: {signs}")
    stack: list[int] = []
    pairs = []
    for pos, s in enumerate(signs, start=1):
        if s == -1:
            stack.append(pos)
        else:
            pairs.append((stack.pop(), pos))
    return PairPartition(tuple(sorted(pairs)))


def pattern_from_ncpp(theta: PairPartition) -> tuple[int, ...]:
    signs = [0] * (2 * len(theta))
    for l, r in theta.pairs:
        signs[l - 1] = -1
        signs[r - 1] = 1
    return tuple(signs)


# -- index families and brackets ---------------------------------------------

@dataclass(frozen=True)
class IndexFamily:
    """Completely ordered blocks ``I_1, ..., I_n`` of positive integers."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        last = 0
        for b in blocks:
            if not b:
                continue
            if min(b) < 1:
                raise ValueError("block elements must be positive")
            if min(b) <= last:
                raise ValueError("blocks are not completely ordered")
            last = max(b)

    @classmethod
    def of(cls, *blocks: Iterable[int]) -> "IndexFamily":
        return cls(tuple(frozenset(b) for b in blocks))

    def __len__(self) -> int:
        return len(self.blocks)

    def union(self, s: int, t: int) -> frozenset[int]:
        """``I_s^t``; empty when ``s > t``."""
        out: set[int] = set()
        for b in self.blocks[max(s, 1) - 1:t]:
            out |= b
        return frozenset(out)

    def cut(self, s: int, t: int, i: int) -> frozenset[int]:
        """``I_s^t(i)``: the elements of ``I_s^t`` below ``i``."""
        return frozenset(x for x in self.union(s, t) if x < i)


def enumerate_bracket(family: IndexFamily, k: int) -> list[Pairing]:
    """The bracket set ``[I_1, ..., I_n]_k``.

    Each element is a tuple ``((l_1, r_1), ..., (l_k, r_k))`` where the
    ``l``'s are increasing block indices and the ``r``'s are distinct with
    ``r_h`` in ``I_{l_h}^n``.
    """
    n = len(family)
    if k < 0:
        raise ValueError("degree must be non-negative")
    if k == 0:
        return [()]
    tails = [sorted(family.union(j, n)) for j in range(1, n + 1)]
    out: list[Pairing] = []
    for lefts in combinations(range(1, n + 1), k):
        _assign_distinct(lefts, [tails[l - 1] for l in lefts], out)
    return sorted(out)


def _assign_distinct(lefts: Sequence[int], options: list[list[int]],
                     out: list[Pairing]) -> None:
    chosen: list[int] = []

    def go(h: int) -> None:
        if h == len(lefts):
            out.append(tuple(zip(lefts, chosen)))
            return
        for r in options[h]:
            if r not in chosen:
                chosen.append(r)
                go(h + 1)
                chosen.pop()

    go(0)


def _check_bracket_member(family: IndexFamily, pairs: Pairing) -> None:
    n = len(family)
    lefts = [l for l, _ in pairs]
    rights = [r for _, r in pairs]
    if lefts != sorted(set(lefts)) or any(not 1 <= l <= n for l in lefts):
        raise ValueError(f"pairs {pairs} are not in the bracket set")
    if len(set(rights)) != len(rights):
        raise ValueError(f"pairs {pairs} reuse a creator index")
    for l, r in pairs:
        if r not in family.union(l, n):
            raise ValueError(f"pairs {pairs} are not in the bracket set")


def c_statistic(family: IndexFamily, pairs: Pairing, s: int) -> int:
    """The block exponent ``c(pairs; s)`` for block ``s`` of ``family``.

    With ``l_0 = 0`` and ``l_{k+1} = n + 1``: if ``s = l_p`` the value is
    ``|I_s^n(r_p) minus {r_{p+1}, ..., r_k}|``; if ``l_p < s < l_{p+1}`` it is
    ``|I_s^n minus {r_{p+1}, ..., r_k}|``.
    """
    pairs = tuple(tuple(p) for p in pairs)
    _check_bracket_member(family, pairs)
    n = len(family)
    if not 1 <= s <= n:
        raise IndexError(f"block index {s} out of range 1..{n}")
    lefts = [l for l, _ in pairs]
    rights = [r for _, r in pairs]
    # p = number of l's that are <= s
    p = sum(1 for l in lefts if l <= s)
    later = set(rights[p:])
    if p >= 1 and lefts[p - 1] == s:
        base = family.cut(s, n, rights[p - 1])
    else:
        base = family.union(s, n)
    return len(base - later)


def c_total(family: IndexFamily, pairs: Pairing) -> int:
    return sum(c_statistic(family, pairs, s) for s in range(1, len(family) + 1))


# -- Feynman diagrams ---------------------------------------------------------

@dataclass(frozen=True)
class FeynmanDiagram:
    """A partial matching of annihilator positions to later creator positions."""

    ground: tuple[int, ...]
    pairs: Pairing

    def __post_init__(self):
        object.__setattr__(self, "ground", _check_signs(self.ground))
        pairs = tuple(tuple(p) for p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        n = len(self.ground)
        lefts = [l for l, _ in pairs]
        if lefts != sorted(set(lefts)):
            raise ValueError("left endpoints must be strictly increasing")
        rights = [r for _, r in pairs]
        if len(set(rights)) != len(rights):
            raise ValueError("right endpoints must be distinct")
        for l, r in pairs:
            if not (1 <= l < r <= n):
                raise ValueError(f"bad pair ({l}, {r}) for length {n}")
            if self.ground[l - 1] != -1 or self.ground[r - 1] != 1:
                raise ValueError(f"pair ({l}, {r}) does not join -1 to +1")

    @property
    def degree(self) -> int:
        return len(self.pairs)

    @cached_property
    def unpaired(self) -> frozenset[int]:
        used = {x for p in self.pairs for x in p}
        return frozenset(range(1, len(self.ground) + 1)) - used

    def left_prefix(self, h: int) -> frozenset[int]:
        """``L_h``: the first ``h`` paired annihilator positions."""
        return frozenset(l for l, _ in self.pairs[:h])

    def right_prefix(self, h: int) -> frozenset[int]:
        """``R_h``: the first ``h`` paired creator positions."""
        return frozenset(r for _, r in self.pairs[:h])


def positions_of(signs: Sequence[int], value: int) -> list[int]:
    return [i for i, s in enumerate(signs, start=1) if s == value]


def enumerate_feynman(signs: Sequence[int], k: int) -> list[FeynmanDiagram]:
    """``F_eps(k)``: Feynman diagrams of degree ``k`` over ``signs``."""
    signs = _check_signs(signs)
    if k < 1:
        raise ValueError("degree must be >= 1")
    minus = positions_of(signs, -1)
    plus = positions_of(signs, 1)
    if k > min(len(minus), len(plus)):
        return []
    out: list[Pairing] = []
    for lefts in combinations(minus, k):
        _assign_distinct(lefts, [[r for r in plus if r > l] for l in lefts], out)
    return [FeynmanDiagram(signs, p) for p in sorted(out)]


@dataclass(frozen=True)
class DiagramStatistics:
    d1: int
    d2: int
    d3: int

    @property
    def pi(self) -> int:
        return self.d1 + self.d2 + self.d3


def diagram_statistics(g: FeynmanDiagram) -> DiagramStatistics:
    """Restricted crossing number, degenerate crossing number and length."""
    pairs = g.pairs
    d1 = sum(
        1
        for lh, rh in pairs
        for lp, rp in pairs
        if lp < lh < rp < rh
    )
    d2 = sum(1 for lh, rh in pairs for x in g.unpaired if lh < x < rh)
    free_minus = [s for s in positions_of(g.ground, -1) if s in g.unpaired]
    free_plus = [s for s in positions_of(g.ground, 1) if s in g.unpaired]
    d3 = sum(1 for s in free_minus for t in free_plus if t > s)
    return DiagramStatistics(d1, d2, d3)


# -- block decomposition ------------------------------------------------------

@dataclass(frozen=True)
class BlockDecomposition:
    anchors: tuple[int, ...]
    family: IndexFamily = field(compare=True)

    @property
    def N(self) -> int:
        return len(self.anchors)

    def block_of(self, position: int) -> int:
        """Block index ``j`` of an anchor position ``m_j``."""
        return self.anchors.index(position) + 1


def split_blocks(signs: Sequence[int]) -> BlockDecomposition:
    """Anchors at the -1 positions; block ``j`` holds the +1 positions
    strictly between ``m_j`` and ``m_{j+1}`` (after ``m_N`` for the last).

    Leading +1 positions, if any, belong to no block.
    """
    signs = _check_signs(signs)
    anchors = positions_of(signs, -1)
    bounds = anchors[1:] + [len(signs) + 1]
    blocks = [
        frozenset(range(a + 1, b)) for a, b in zip(anchors, bounds)
    ]
    return BlockDecomposition(tuple(anchors), IndexFamily(tuple(blocks)))


def blocks_from_pattern(signs: Sequence[int]) -> BlockDecomposition:
    signs = _check_signs(signs)
    if not signs or signs[0] != -1 or signs[-1] != 1:
        raise ValueError("pattern must start with -1 and end with +1")
    return split_blocks(signs)


def diagram_to_bracket(blocks: BlockDecomposition, g: FeynmanDiagram) -> Pairing:
    """Replace each annihilator position of ``g`` by its block index."""
    return tuple((blocks.block_of(l), r) for l, r in g.pairs)


def bracket_to_diagram(blocks: BlockDecomposition, signs: Sequence[int],
                       pairs: Pairing) -> FeynmanDiagram:
    return FeynmanDiagram(tuple(signs), tuple((blocks.anchors[l - 1], r) for l, r in pairs))
