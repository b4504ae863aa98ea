"""Exact symbolic algebra of the Quon algebra with parameter ``(q, m)``.

A word is a product of creators ``A+(f)``, annihilators ``A(f)`` and
projector symbols ``p_k``. Two independent engines bring a word to normal
order (projector, then creators, then annihilators):

* :func:`normal_order_wick` evaluates the closed-form block expansion,
* :func:`normal_order_rewrite` applies the defining relations as rewrite
  rules until nothing is left to rewrite.

``q`` stays formal: a term carries an integer exponent, an integer
multiplicity and at most one projector level (``None`` for the identity).
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .combinatorics import (
    CapExceededError,
    c_statistic,
    enumerate_bracket,
    split_blocks,
)

DEFAULT_CAP = 12


class Kind(enum.Enum):
    CREATOR = "creator"
    ANNIHILATOR = "annihilator"
    PROJECTOR = "projector"


@dataclass(frozen=True)
class Op:
    kind: Kind
    label: str | None = None
    level: int | None = None

    def __post_init__(self):
        if self.kind is Kind.PROJECTOR:
            if self.level is None or self.label is not None:
                raise ValueError("a projector carries a level and no label")
        elif self.label is None or self.level is not None:
            raise ValueError(f"a {self.kind.value} carries a label and no level")

    @property
    def sign(self) -> int:
        """+1 for a creator, -1 for an annihilator, 0 for a projector."""
        return {Kind.CREATOR: 1, Kind.ANNIHILATOR: -1, Kind.PROJECTOR: 0}[self.kind]

    def __str__(self) -> str:
        if self.kind is Kind.CREATOR:
            return f"a+({self.label})"
        if self.kind is Kind.ANNIHILATOR:
            return f"a({self.label})"
        return f"p[{self.level}]"


def creator(label: str) -> Op:
    return Op(Kind.CREATOR, label=label)


def annihilator(label: str) -> Op:
    return Op(Kind.ANNIHILATOR, label=label)


def projector(level: int) -> Op:
    return Op(Kind.PROJECTOR, level=int(level))


@dataclass(frozen=True)
class Word:
    m: int
    factors: tuple[Op, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        object.__setattr__(self, "factors", tuple(self.factors))

    def __len__(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        return " ".join(str(op) for op in self.factors)

    @property
    def operators(self) -> tuple[Op, ...]:
        return tuple(op for op in self.factors if op.kind is not Kind.PROJECTOR)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(op.sign for op in self.operators)

    @property
    def has_projectors(self) -> bool:
        return any(op.kind is Kind.PROJECTOR for op in self.factors)


def min_level(a: int | None, b: int | None) -> int | None:
    """Product of two projector symbols; ``None`` is the identity."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _shift(level: int | None, by: int) -> int | None:
    return None if level is None else level + by


# -- normal forms -------------------------------------------------------------

# (pairings, creators, annihilators, q_exponent, projector_level)
TermKey = tuple[tuple[tuple[int, int], ...], tuple[int, ...], tuple[int, ...], int, "int | None"]


@dataclass(frozen=True)
class NormalTerm:
    coeff: int
    q_exp: int
    level: int | None
    pairings: tuple[tuple[int, int], ...]
    creators: tuple[int, ...]
    annihilators: tuple[int, ...]

    @property
    def key(self) -> TermKey:
        return (self.pairings, self.creators, self.annihilators, self.q_exp, self.level)

    @property
    def is_scalar(self) -> bool:
        return not self.creators and not self.annihilators


def _sort_key(key: TermKey):
    pairings, creators, annihilators, q_exp, level = key
    return (-len(pairings), pairings, creators, annihilators, q_exp,
            (0, 0) if level is None else (1, level))


@dataclass(frozen=True)
class NormalForm:
    """Canonical sum of normally ordered terms.

    ``m`` is ``None`` for the scalar algebra where every projector is the
    identity. ``core`` is the projector-free operator sequence the term
    positions refer to; it is informational and ignored by equality.
    """

    m: int | None
    terms: Mapping[TermKey, int]
    core: tuple[Op, ...] = field(default=(), compare=False)

    def __post_init__(self):
        clean = {k: v for k, v in self.terms.items() if v != 0}
        ordered = dict(sorted(clean.items(), key=lambda kv: _sort_key(kv[0])))
        object.__setattr__(self, "terms", ordered)
        object.__setattr__(self, "core", tuple(self.core))

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.m == other.m and list(self.terms.items()) == list(other.terms.items())

    def __hash__(self):
        return hash((self.m, tuple(self.terms.items())))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        for (pairings, creators, annihilators, q_exp, level), coeff in self.terms.items():
            yield NormalTerm(coeff, q_exp, level, pairings, creators, annihilators)

    @classmethod
    def from_terms(cls, m: int | None, terms: Iterable[NormalTerm],
                   core: Sequence[Op] = ()) -> "NormalForm":
        acc: dict[TermKey, int] = defaultdict(int)
        for t in terms:
            acc[t.key] += t.coeff
        return cls(m, dict(acc), tuple(core))

    def relabel(self, offset: int) -> "NormalForm":
        """Shift every stored position by ``offset``."""
        def mv(xs):
            return tuple(x + offset for x in xs)
        terms = {
            (tuple((a + offset, c + offset) for a, c in pr), mv(cr), mv(an), e, lv): v
            for (pr, cr, an, e, lv), v in self.terms.items()
        }
        return NormalForm(self.m, terms, self.core)


def normal_form_equal(a: NormalForm, b: NormalForm) -> bool:
    if a.m != b.m:
        raise ValueError(f"normal forms over different m: {a.m} vs {b.m}")
    return a == b


def specialize_scalar(nf: NormalForm) -> NormalForm:
    """Send every projector to the identity and re-merge."""
    acc: dict[TermKey, int] = defaultdict(int)
    for (pr, cr, an, e, _), v in nf.terms.items():
        acc[(pr, cr, an, e, None)] += v
    return NormalForm(None, dict(acc), nf.core)


# -- projectors ---------------------------------------------------------------

def reduce_projector_prefix(word: Word) -> tuple[int | None, Word]:
    """Move every projector to the front and merge them.

    A projector with ``S`` net creators to its left becomes ``p_{k+S}`` at
    the front (``A(f) p_{k+1} = p_k A(f)``, ``A+(f) p_k = p_{k+1} A+(f)``).
    Returns the merged level (``None`` without projectors) and the core word.
    """
    level: int | None = None
    height = 0
    for op in word.factors:
        if op.kind is Kind.PROJECTOR:
            level = min_level(level, op.level + height)
        else:
            height += op.sign
    return level, Word(word.m, word.operators)


def _check_cap(word: Word, cap: int) -> None:
    if len(word) > cap:
        raise CapExceededError(f"word length {len(word)} exceeds cap {cap}")


# -- closed-form engine -------------------------------------------------------

def annihilator_through_creators(f: str, creators: Sequence[str], m: int) -> NormalForm:
    """Normal form of ``A(f) A+(g_1) ... A+(g_n)``.

    Positions: the annihilator is 1, creator ``g_i`` is ``i + 1``.
    """
    word = Word(m, (annihilator(f),) + tuple(creator(g) for g in creators))
    return normal_order_wick(word)


def _core_expansion(signs: Sequence[int], m: int) -> list[NormalTerm]:
    """Block expansion for a projector-free core, positions 1-based."""
    lead = 0
    while lead < len(signs) and signs[lead] == 1:
        lead += 1
    leading = tuple(range(1, lead + 1))
    blocks = split_blocks(signs)
    anchors = blocks.anchors
    if not anchors:
        return [NormalTerm(1, 0, None, (), tuple(range(1, len(signs) + 1)), ())]

    family = blocks.family
    N = len(family)
    all_creators = sorted(family.union(1, N))
    # projector index attached to block s
    block_level = [m + len(family.union(1, s - 1)) - (s - 1) for s in range(1, N + 1)]

    out = []
    for k in range(0, N + 1):
        for pairs in enumerate_bracket(family, k):
            q_exp = 0
            level = None
            for s in range(1, N + 1):
                c = c_statistic(family, pairs, s)
                if c:
                    q_exp += c
                    level = min_level(level, block_level[s - 1])
            used_r = {r for _, r in pairs}
            used_l = {l for l, _ in pairs}
            out.append(NormalTerm(
                coeff=1,
                q_exp=q_exp,
                level=_shift(level, lead),
                pairings=tuple(sorted((anchors[l - 1], r) for l, r in pairs)),
                creators=leading + tuple(r for r in all_creators if r not in used_r),
                annihilators=tuple(a for j, a in enumerate(anchors, 1) if j not in used_l),
            ))
    return out


def normal_order_wick(word: Word, cap: int = DEFAULT_CAP) -> NormalForm:
    """Normal order through the closed-form block expansion."""
    _check_cap(word, cap)
    front, core = reduce_projector_prefix(word)
    terms = [
        NormalTerm(t.coeff, t.q_exp, min_level(front, t.level),
                   t.pairings, t.creators, t.annihilators)
        for t in _core_expansion(core.signs, word.m)
    ]
    return NormalForm.from_terms(word.m, terms, core.factors)


# -- rewrite engine -----------------------------------------------------------

def _float_projectors(word: Word) -> tuple[int | None, list[tuple[int, int]]]:
    """Bubble projectors leftwards one adjacent swap at a time."""
    # tokens: ("p", level) or (sign, position)
    tokens: list[tuple] = []
    pos = 0
    for op in word.factors:
        if op.kind is Kind.PROJECTOR:
            tokens.append(("p", op.level))
        else:
            pos += 1
            tokens.append((op.sign, pos))
    changed = True
    while changed:
        changed = False
        for i in range(len(tokens) - 1):
            a, b = tokens[i], tokens[i + 1]
            if b[0] == "p" and a[0] == "p":
                tokens[i:i + 2] = [("p", min(a[1], b[1]))]
                changed = True
                break
            if b[0] == "p":
                # A^eps p_k = p_{k+eps} A^eps
                tokens[i], tokens[i + 1] = ("p", b[1] + a[0]), a
                changed = True
                break
    level = None
    if tokens and tokens[0][0] == "p":
        level = tokens.pop(0)[1]
    return level, [t for t in tokens]


def normal_order_rewrite(word: Word, cap: int = DEFAULT_CAP) -> NormalForm:
    """Normal order by repeatedly rewriting the leftmost ``A(f) A+(g)``
    into ``<f,g> + q p_m A+(g) A(f)`` and floating projectors to the front.
    """
    _check_cap(word, cap)
    m = word.m
    front, seq = _float_projectors(word)
    core = word.operators

    # state key: (sequence of (sign, position), pairings, q_exp, level)
    todo: dict[tuple, int] = {(tuple(seq), (), 0, front): 1}
    done: dict[TermKey, int] = defaultdict(int)
    while todo:
        (seq, pairings, q_exp, level), mult = todo.popitem()
        hit = next(
            (i for i in range(len(seq) - 1) if seq[i][0] == -1 and seq[i + 1][0] == 1),
            None,
        )
        if hit is None:
            creators = tuple(p for s, p in seq if s == 1)
            annihilators = tuple(p for s, p in seq if s == -1)
            done[(pairings, creators, annihilators, q_exp, level)] += mult
            continue
        a, c = seq[hit], seq[hit + 1]
        contracted = (seq[:hit] + seq[hit + 2:],
                      tuple(sorted(pairings + ((a[1], c[1]),))), q_exp, level)
        height = sum(s for s, _ in seq[:hit])
        swapped = (seq[:hit] + (c, a) + seq[hit + 2:], pairings, q_exp + 1,
                   min_level(level, m + height))
        for key in (contracted, swapped):
            todo[key] = todo.get(key, 0) + mult
    return NormalForm(m, dict(done), core)


# -- vacuum expectation -------------------------------------------------------

Monomial = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class VacuumPolynomial:
    """``sum coeff * q**e * prod <f, g>`` keyed by ``(monomial, e)``."""

    coeffs: Mapping[tuple[Monomial, int], int]

    def __post_init__(self):
        clean = {k: v for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __eq__(self, other):
        if not isinstance(other, VacuumPolynomial):
            return NotImplemented
        return list(self.coeffs.items()) == list(other.coeffs.items())

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def at_q(self, q) -> dict[Monomial, object]:
        """Collapse the q-dependence for a concrete ``q`` (Fraction or float)."""
        out: dict[Monomial, object] = defaultdict(int)
        for (mono, e), c in self.coeffs.items():
            out[mono] += c * q ** e
        return {k: v for k, v in out.items() if v != 0}

    def evaluate(self, q, inner: Mapping[tuple[str, str], complex]):
        total = 0
        for (mono, e), c in self.coeffs.items():
            term = c * q ** e
            for pair in mono:
                term *= inner[pair]
            total += term
        return total


def vacuum_expectation(word: Word, concrete: bool = True,
                       cap: int = DEFAULT_CAP) -> VacuumPolynomial:
    """``<Phi, W Phi>`` as a polynomial in ``q`` and the pairings ``<f, g>``.

    With ``concrete`` set, ``p_k`` acts on the vacuum as 1 when ``k >= 1`` and
    as 0 otherwise; without it every projector is the identity.
    """
    nf = normal_order_wick(word, cap=cap)
    core = nf.core
    acc: dict[tuple[Monomial, int], int] = defaultdict(int)
    for t in nf:
        if not t.is_scalar:
            continue
        if concrete and t.level is not None and t.level < 1:
            continue
        mono = tuple(sorted((core[a - 1].label, core[c - 1].label) for a, c in t.pairings))
        acc[(mono, t.q_exp)] += t.coeff
    return VacuumPolynomial(dict(acc))


# -- engine equivalence sweeps ------------------------------------------------

def random_word(rng, length: int, m: int, projector_rate: float = 0.25,
                annihilator_labels: Sequence[str] = ("f1", "f2", "f3"),
                creator_labels: Sequence[str] = ("g1", "g2", "g3", "g4"),
                level_range: tuple[int, int] = (-1, 5)) -> Word:
    """A word of ``length`` factors drawn with ``rng`` (a ``random.Random``)."""
    factors = []
    for _ in range(length):
        roll = rng.random()
        if roll < projector_rate:
            factors.append(projector(rng.randint(*level_range)))
        elif roll < projector_rate + (1 - projector_rate) / 2:
            factors.append(annihilator(rng.choice(annihilator_labels)))
        else:
            factors.append(creator(rng.choice(creator_labels)))
    return Word(m, tuple(factors))


def pattern_words(max_len: int, m: int) -> list[Word]:
    """Every sign pattern up to ``max_len`` with distinct labels per position."""
    from itertools import product

    out = []
    for n in range(1, max_len + 1):
        for signs in product((-1, 1), repeat=n):
            out.append(Word(m, tuple(
                creator(f"g{i}") if s == 1 else annihilator(f"f{i}")
                for i, s in enumerate(signs, start=1)
            )))
    return out


def verify_engines(max_len: int = 6, random_cases: int = 200, random_len: int = 8,
                   ms: Sequence[int] = (1, 2, 3, 5), seed: int = 0) -> dict:
    """Closed form against rewriting: exhaustive patterns plus random words."""
    import random

    rng = random.Random(seed)
    mismatches = []
    checked = 0
    for m in ms:
        for w in pattern_words(max_len, m):
            checked += 1
            if normal_order_wick(w) != normal_order_rewrite(w):
                mismatches.append(f"m={m}: {w}")
    for i in range(random_cases):
        m = ms[i % len(ms)]
        w = random_word(rng, random_len, m)
        checked += 1
        if normal_order_wick(w) != normal_order_rewrite(w):
            mismatches.append(f"m={m}: {w}")
    return {
        "suite": "wick-vs-rewrite",
        "grid": {"max_len": max_len, "m": list(ms), "random_cases": random_cases,
                 "random_len": random_len, "seed": seed, "words": checked},
        "max_residual": len(mismatches),
        "pass": not mismatches,
        "mismatches": mismatches,
    }
