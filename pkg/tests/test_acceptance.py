"""Acceptance gate: eight criteria, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""
import sys
import time
from math import comb

import numpy as np
import pytest

from quonalg.combinatorics import (
    enumerate_balanced_patterns,
    enumerate_noncrossing,
    enumerate_pair_partitions,
)
from quonalg.fock import (
    FockConfig,
    GRID_D,
    GRID_M,
    GRID_Q,
    expected_norm,
    field_moments,
    operator_norm,
    verify_bridge,
    verify_relation_grid,
)
from quonalg.qwick import verify_pi_equals_c, verify_specialization
from quonalg.symbolic import verify_engines

ACCEPTANCE_LINES: list[str] = []


def emit(number: int, title: str, ok: bool, detail: str, elapsed: float, limit: float) -> None:
    status = "PASS" if ok and elapsed < limit else "FAIL"
    # collected here and printed by the terminal summary hook in conftest.py
    ACCEPTANCE_LINES.append(
        f"[{status}] criterion {number}: {title} ({detail}; {elapsed:.2f}s, limit {limit:g}s)")


def timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def test_criterion_1_counts():
    def run():
        exact = len(enumerate_pair_partitions(2)) == 3 and len(enumerate_noncrossing(2)) == 2
        catalan = all(
            len(enumerate_noncrossing(n)) == len(enumerate_balanced_patterns(n)) == comb(2 * n, n) // (n + 1)
            for n in range(1, 9)
        )
        return exact, catalan

    (exact, catalan), elapsed = timed(run)
    ok = exact and catalan
    emit(1, "combinatorial counts", ok, f"|PP(4)|=3,|NCPP(4)|=2: {exact}; Catalan n<=8: {catalan}", elapsed, 5)
    assert ok and elapsed < 5


def test_criterion_2_engine_equivalence():
    report, elapsed = timed(lambda: verify_engines(max_len=6, random_cases=200, random_len=8,
                                                   ms=(1, 2, 3, 5), seed=0))
    ok = report["pass"]
    emit(2, "wick = rewrite", ok,
         f"{report['grid']['words']} words, {len(report['mismatches'])} mismatches", elapsed, 60)
    assert ok and elapsed < 60


def test_criterion_3_pi_equals_c():
    report, elapsed = timed(lambda: verify_pi_equals_c(10))
    ok = report["pass"]
    emit(3, "pi = c_total", ok,
         f"{report['grid']['patterns']} patterns, {report['grid']['diagrams']} diagrams, "
         f"{len(report['counterexamples'])} counterexamples", elapsed, 120)
    assert ok and elapsed < 120


def test_criterion_4_scalar_specialization():
    report, elapsed = timed(lambda: verify_specialization(6))
    ok = report["pass"]
    emit(4, "scalar specialization", ok,
         f"{report['grid']['words']} words, {len(report['mismatches'])} mismatches", elapsed, 30)
    assert ok and elapsed < 30


def test_criterion_5_matrix_identities():
    report, elapsed = timed(lambda: verify_relation_grid(GRID_Q, GRID_M, GRID_D, n_max=4))
    ok = report["pass"] and report["max_residual"] <= 1e-10 and report["min_eigenvalue"] >= -1e-8
    emit(5, "matrix-model identities", ok,
         f"max residual {report['max_residual']:.2e}, min eigenvalue {report['min_eigenvalue']:.2e}",
         elapsed, 60)
    assert ok and elapsed < 60


def test_criterion_6_norm_formula():
    def run():
        rng = np.random.default_rng(6)
        worst = 0.0
        for q in GRID_Q:
            for m in GRID_M:
                for d in GRID_D:
                    f = rng.normal(size=d) + 1j * rng.normal(size=d)
                    want = expected_norm(q, m, float(np.linalg.norm(f)))
                    got = operator_norm(FockConfig(q, m, d, m + 2), f)
                    worst = max(worst, abs(got - want) / want)
        return worst

    worst, elapsed = timed(run)
    ok = worst <= 1e-6
    emit(6, "operator norm formula", ok, f"max relative error {worst:.2e}", elapsed, 60)
    assert ok and elapsed < 60


def test_criterion_7_symbolic_numeric_bridge():
    report, elapsed = timed(lambda: verify_bridge(cases=200, max_len=6, d=2, n_max=4,
                                                  ms=(1, 2, 3), seed=0, tol=1e-9))
    ok = report["pass"] and report["max_residual"] <= 1e-9
    emit(7, "symbolic-numeric bridge", ok,
         f"200 words, max discrepancy {report['max_residual']:.2e}", elapsed, 60)
    assert ok and elapsed < 60


def test_criterion_8_moments():
    def run():
        f = np.array([1.0, 0.0])
        free = field_moments(FockConfig(0.0, 2, 2, 4), f, 7)
        fermi = field_moments(FockConfig(-1.0, 2, 2, 4), f, 7)
        return free, fermi

    (free, fermi), elapsed = timed(run)
    m2, m4, m6 = free[1], free[3], free[5]
    catalan = max(abs(m2 - 1), abs(m4 - 2), abs(m6 - 5)) <= 1e-8
    n2, n4, n6 = fermi[1], fermi[3], fermi[5]
    two_point = abs(n4 - n2 ** 2) <= 1e-8 and abs(n6 - n2 ** 3) <= 1e-8
    odd = max(abs(x) for x in free[0::2] + fermi[0::2]) <= 1e-12
    ok = catalan and two_point and odd
    emit(8, "moment sanity", ok,
         f"q=0: {m2:.6g},{m4:.6g},{m6:.6g}; q=-1: m4-m2^2={n4 - n2 ** 2:.1e}, "
         f"m6-m2^3={n6 - n2 ** 3:.1e}; odd ok: {odd}", elapsed, 10)
    assert ok and elapsed < 10


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
