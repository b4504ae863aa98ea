"""The scalar q-Wick theorem (every projector equal to the identity).

Terms are weighted by ``q**pi`` with ``pi = d1 + d2 + d3`` of the Feynman
diagram. :func:`verify_pi_equals_c` checks exhaustively that this weight
coincides with the block exponent used by the operator-parameter formula.
"""
from __future__ import annotations

from itertools import product
from typing import Sequence

from .combinatorics import (
    BlockDecomposition,
    CapExceededError,
    FeynmanDiagram,
    blocks_from_pattern,
    c_total,
    diagram_statistics,
    diagram_to_bracket,
    enumerate_feynman,
    positions_of,
)
from .symbolic import (
    NormalForm,
    NormalTerm,
    Word,
    annihilator,
    creator,
    normal_order_wick,
    specialize_scalar,
)


def leading_exponent(signs: Sequence[int]) -> int:
    """Creators to the right of each annihilator, summed."""
    plus = positions_of(signs, 1)
    return sum(1 for s in positions_of(signs, -1) for t in plus if t > s)


def qwick_normal_order(signs: Sequence[int], labels: Sequence[str]) -> NormalForm:
    """Normal form of ``A^eps(1)(g_1) ... A^eps(n)(g_n)`` in the scalar algebra."""
    signs = tuple(signs)
    if len(signs) != len(labels):
        raise ValueError(f"{len(signs)} signs but {len(labels)} labels")
    core = tuple(creator(g) if s == 1 else annihilator(g) for s, g in zip(signs, labels))
    plus = positions_of(signs, 1)
    minus = positions_of(signs, -1)
    terms = [NormalTerm(1, leading_exponent(signs), None, (), tuple(plus), tuple(minus))]
    for k in range(1, min(len(plus), len(minus)) + 1):
        for g in enumerate_feynman(signs, k):
            used = {x for p in g.pairs for x in p}
            terms.append(NormalTerm(
                1, diagram_statistics(g).pi, None, g.pairs,
                tuple(r for r in plus if r not in used),
                tuple(a for a in minus if a not in used),
            ))
    return NormalForm.from_terms(None, terms, core)


def pi_from_blocks(blocks: BlockDecomposition, g: FeynmanDiagram) -> int:
    """``pi`` recomputed through block cut sets and the prefix sets ``L_h, R_h``.

    ``d1`` counts earlier paired creators inside each cut set, ``d2`` splits
    into unpaired creators of the cut set plus free annihilators inside the
    pair, and ``d3`` counts unpaired creators in the tails of the free blocks.
    """
    fam = blocks.family
    N = len(fam)
    k = g.degree
    R_k = g.right_prefix(k)
    L_k = g.left_prefix(k)
    minus = set(positions_of(g.ground, -1))
    total = 0
    for h, (l, r) in enumerate(g.pairs, start=1):
        j = blocks.block_of(l)
        cut = fam.cut(j, N, r)
        total += len(cut & g.right_prefix(h))
        total += len(cut - R_k)
        total += sum(1 for x in range(l + 1, r) if x in minus and x not in L_k)
    paired_blocks = {blocks.block_of(l) for l in L_k}
    for s in range(1, N + 1):
        if s not in paired_blocks:
            total += len(fam.union(s, N) - R_k)
    return total


def _patterns(max_len: int):
    for n in range(2, max_len + 1):
        for middle in product((-1, 1), repeat=n - 2):
            yield (-1,) + middle + (1,)


def verify_pi_equals_c(max_n: int = 10) -> dict:
    """Check ``pi == c_total`` on every diagram of every admissible pattern."""
    if max_n > 10:
        raise CapExceededError(f"pi = c verification is capped at length 10, got {max_n}")
    counterexamples = []
    patterns = diagrams = 0
    worst = 0
    for signs in _patterns(max_n):
        patterns += 1
        blocks = blocks_from_pattern(signs)
        lead_gap = abs(leading_exponent(signs)
                       - sum(len(blocks.family.union(j, blocks.N)) for j in range(1, blocks.N + 1)))
        if lead_gap:
            counterexamples.append({"pattern": list(signs), "pairs": [], "gap": lead_gap})
            worst = max(worst, lead_gap)
        for k in range(1, blocks.N + 1):
            for g in enumerate_feynman(signs, k):
                diagrams += 1
                pi = diagram_statistics(g).pi
                c = c_total(blocks.family, diagram_to_bracket(blocks, g))
                if pi != c:
                    counterexamples.append({"pattern": list(signs),
                                            "pairs": [list(p) for p in g.pairs],
                                            "pi": pi, "c": c})
                    worst = max(worst, abs(pi - c))
    return {
        "suite": "pi-equals-c",
        "grid": {"max_len": max_n, "patterns": patterns, "diagrams": diagrams},
        "max_residual": worst,
        "pass": not counterexamples,
        "counterexamples": counterexamples,
    }


def crosscheck_specialization(word: Word) -> bool:
    """Operator-parameter formula with ``p_k = 1`` against the scalar q-Wick formula."""
    if word.has_projectors:
        raise ValueError("specialization check needs a projector-free word")
    ops = word.factors
    scalar = qwick_normal_order(word.signs, [op.label for op in ops])
    return specialize_scalar(normal_order_wick(word)) == scalar


def all_words(length: int, m: int = 2) -> list[Word]:
    """Every projector-free word of a given length, distinct labels by position."""
    out = []
    for signs in product((-1, 1), repeat=length):
        ops = tuple(
            creator(f"g{i}") if s == 1 else annihilator(f"f{i}")
            for i, s in enumerate(signs, start=1)
        )
        out.append(Word(m, ops))
    return out


def verify_specialization(max_len: int = 6, m: int = 2) -> dict:
    mismatches = []
    checked = 0
    for n in range(1, max_len + 1):
        for w in all_words(n, m):
            checked += 1
            if not crosscheck_specialization(w):
                mismatches.append(str(w))
    return {
        "suite": "specialization",
        "grid": {"max_len": max_len, "m": m, "words": checked},
        "max_residual": len(mismatches),
        "pass": not mismatches,
        "mismatches": mismatches,
    }

