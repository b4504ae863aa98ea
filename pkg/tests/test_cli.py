import io
import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from quonalg.cli import main
from quonalg.formatting import format_normal_form, format_vacuum, normal_form_from_json
from quonalg.parsing import ExpressionSyntaxError, parse_expression
from quonalg.symbolic import (
    Kind,
    NormalForm,
    normal_form_equal,
    normal_order_wick,
    random_word,
    vacuum_expectation,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParser:
    def test_pair(self):
        w = parse_expression("a(f) a+(g)", 2)
        assert [op.kind for op in w.factors] == [Kind.ANNIHILATOR, Kind.CREATOR]
        assert [op.label for op in w.factors] == ["f", "g"]
        assert w.m == 2

    def test_projectors_and_adjacency(self):
        w = parse_expression("p[2] a(f1)a+(g1)  p[5]", 3)
        assert len(w) == 4
        assert [op.level for op in w.factors if op.kind is Kind.PROJECTOR] == [2, 5]

    def test_signed_levels(self):
        w = parse_expression("p[-1] p[+3]", 1)
        assert [op.level for op in w.factors] == [-1, 3]

    @pytest.mark.parametrize("text, column", [
        ("a+(g", 4),
        ("a(f) b", 6),
        ("a(1)", 3),
        ("p[x]", 3),
        ("a(f", 3),
        ("a+[g]", 3),
        ("a(f))", 5),
    ])
    def test_errors(self, text, column):
        with pytest.raises(ExpressionSyntaxError) as exc:
            parse_expression(text, 2)
        assert exc.value.column == column

    @pytest.mark.parametrize("text", ["", "   \n"])
    def test_empty(self, text):
        with pytest.raises(ExpressionSyntaxError):
            parse_expression(text, 2)

    @given(st.integers(0, 10 ** 9), st.integers(1, 8))
    @settings(max_examples=50)
    def test_print_parse_round_trip(self, seed, n):
        w = random_word(random.Random(seed), n, 2)
        assert parse_expression(str(w), 2) == w


class TestFormatting:
    def test_json_example(self):
        nf = normal_order_wick(parse_expression("a(f) a+(g)", 2))
        data = json.loads(format_normal_form(nf, "json"))
        assert data["m"] == 2
        assert len(data["terms"]) == 2
        assert data["terms"][0] == {"coeff": 1, "q_exp": 0, "proj_level": None,
                                    "pairings": [[1, 2]], "creators": [], "annihilators": []}
        assert data["terms"][1]["proj_level"] == 2

    def test_zero(self):
        nf = NormalForm(3, {})
        assert json.loads(format_normal_form(nf, "json")) == {"m": 3, "terms": []}
        assert format_normal_form(nf) == "0"

    def test_plain_and_latex(self):
        nf = normal_order_wick(parse_expression("a(f) a+(g)", 2))
        assert format_normal_form(nf) == "<f,g> + q p[2] a+(g) a(f)"
        assert format_normal_form(nf, "latex") == r"\langle f,g\rangle + q p_{2} A^{+}(g) A(f)"

    def test_latex_level_is_numeric(self):
        nf = normal_order_wick(parse_expression("a(f1) a(f2) a+(g)", 2))
        assert "p_{1}" in format_normal_form(nf, "latex")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            format_normal_form(NormalForm(2, {}), "html")

    @given(st.integers(0, 10 ** 9), st.integers(1, 7), st.sampled_from([1, 2, 3, 5]))
    @settings(max_examples=60, deadline=None)
    def test_json_round_trip(self, seed, n, m):
        nf = normal_order_wick(random_word(random.Random(seed), n, m))
        back = normal_form_from_json(format_normal_form(nf, "json"))
        assert normal_form_equal(back, nf)

    def test_vacuum_exact_rational(self):
        from fractions import Fraction

        v = vacuum_expectation(parse_expression("a(f1) a(f2) a+(g1) a+(g2)", 2))
        assert format_vacuum(v) == "q <f1,g1> <f2,g2> + <f1,g2> <f2,g1>"
        assert format_vacuum(v, q=Fraction(1, 3)) == "1/3 <f1,g1> <f2,g2> + <f1,g2> <f2,g1>"
        assert format_vacuum(v, q=0.5) == "0.5 <f1,g1> <f2,g2> + <f1,g2> <f2,g1>"


class TestCommands:
    def test_count_ncpp(self, capsys):
        assert run(capsys, "count", "--what", "ncpp", "--n", "2")[:2] == (0, "2\n")

    @pytest.mark.parametrize("what, n, expected", [
        ("pp", 2, 3), ("pp", 4, 105), ("ncpp", 5, 42), ("patterns", 3, 5), ("feynman", 3, 15),
    ])
    def test_counts(self, capsys, what, n, expected):
        code, out, _ = run(capsys, "count", "--what", what, "--n", str(n))
        assert code == 0 and int(out) == expected

    def test_count_feynman_pattern(self, capsys):
        code, out, _ = run(capsys, "count", "--what", "feynman", "--pattern=-1,-1,1,1", "--k", "2")
        assert (code, int(out)) == (0, 2)
        code, out, _ = run(capsys, "count", "--what", "feynman", "--pattern=-+-+")
        # degree 1: (1,2),(1,4),(3,4); degree 2: (1,2)(3,4)
        assert (code, int(out)) == (0, 4)

    def test_count_cap(self, capsys):
        assert run(capsys, "count", "--what", "pp", "--n", "9")[0] == 3

    def test_count_needs_n(self, capsys):
        assert run(capsys, "count", "--what", "pp")[0] == 2

    def test_normal_order_both(self, capsys):
        code, out, _ = run(capsys, "normal-order", "--m", "2", "--mode", "both", "a(f) a+(g) a+(h)")
        assert code == 0
        assert out.strip() == "<f,g> a+(h) + q p[2] <f,h> a+(g) + q^2 p[2] a+(g) a+(h) a(f)"

    def test_normal_order_rewrite_json(self, capsys):
        code, out, _ = run(capsys, "normal-order", "--m", "3", "--mode", "rewrite",
                           "--format", "json", "p[2] a(f) a+(g) p[5]")
        assert code == 0
        assert {t["proj_level"] for t in json.loads(out)["terms"]} == {2}

    def test_syntax_error_exit(self, capsys):
        code, _, err = run(capsys, "normal-order", "--m", "2", "a+(g")
        assert code == 2 and "column 4" in err

    def test_cap_exit(self, capsys):
        code, _, _ = run(capsys, "normal-order", "--m", "2", "--cap", "2", "a(f) a(g) a+(h)")
        assert code == 3

    def test_usage_errors(self, capsys):
        assert run(capsys, "normal-order", "a(f)")[0] == 2
        assert run(capsys, "normal-order", "--m", "0", "a(f)")[0] == 2
        assert run(capsys, "frobnicate")[0] == 2
        assert run(capsys, "vacuum", "--m", "2", "--q", "3/2", "a(f) a+(g)")[0] == 2

    def test_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO("a(f)\na+(g)\n"))
        code, out, _ = run(capsys, "normal-order", "--m", "2", "-")
        assert code == 0 and out.startswith("<f,g>")

    def test_vacuum(self, capsys):
        word = "a(f1) a(f2) a+(g1) a+(g2)"
        assert run(capsys, "vacuum", "--m", "1", word)[1].strip() == "<f1,g2> <f2,g1>"
        out = run(capsys, "vacuum", "--m", "1", "--concrete-projectors", "off", word)[1]
        assert out.strip() == "q <f1,g1> <f2,g2> + <f1,g2> <f2,g1>"
        out = run(capsys, "vacuum", "--m", "2", "--q", "1/2", word)[1]
        assert out.strip() == "1/2 <f1,g1> <f2,g2> + <f1,g2> <f2,g1>"
        assert run(capsys, "vacuum", "--m", "2", "a+(g)")[1].strip() == "0"

    def test_moments(self, capsys):
        code, out, _ = run(capsys, "moments", "--q", "0", "--m", "2", "--dim", "2",
                           "--levels", "3", "--orders", "6", "--format", "json")
        assert code == 0
        mom = json.loads(out)["moments"]
        assert mom[1::2] == pytest.approx([1, 2, 5], abs=1e-8)

    def test_moments_unbounded(self, capsys):
        code, out, _ = run(capsys, "moments", "--q", "1/2", "--m", "inf", "--levels", "2", "--orders", "4")
        assert code == 0
        # q-Gaussian fourth moment is 2 + q
        assert float(out.splitlines()[3].split()[1]) == pytest.approx(2.5)

    def test_moments_limits(self, capsys):
        assert run(capsys, "moments", "--q", "0", "--m", "2", "--levels", "2", "--orders", "6")[0] == 2
        assert run(capsys, "moments", "--q", "0", "--m", "2", "--dim", "5")[0] == 3
        assert run(capsys, "moments", "--q", "0", "--m", "2", "--levels", "7")[0] == 3

    def test_verify_pi_equals_c(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "pi-equals-c", "--max-len", "10")
        report = json.loads(out)
        assert code == 0 and report["pass"] and report["counterexamples"] == []

    def test_verify_cap(self, capsys):
        assert run(capsys, "verify", "--suite", "pi-equals-c", "--max-len", "11")[0] == 3

    @pytest.mark.parametrize("suite", ["wick-vs-rewrite", "fock-relations", "specialization"])
    def test_verify_suites(self, capsys, suite):
        code, out, _ = run(capsys, "verify", "--suite", suite, "--max-len", "5", "--random", "50")
        assert code == 0 and json.loads(out)["pass"]

    def test_verify_all(self, capsys):
        code, out, _ = run(capsys, "verify", "--max-len", "6", "--random", "20")
        report = json.loads(out)
        assert code == 0 and len(report["reports"]) == 4

    def test_deterministic(self, capsys):
        argv = ["normal-order", "--m", "3", "--format", "json", "a(f1) a(f2) a+(g1) p[2] a+(g2)"]
        assert run(capsys, *argv) == run(capsys, *argv)

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "quonalg", "count", "--what", "ncpp", "--n", "3"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout == "5\n"
