"""Plain, LaTeX and JSON emitters for normal forms and vacuum polynomials."""
from __future__ import annotations

import json
from fractions import Fraction

from .symbolic import NormalForm, NormalTerm, Op, VacuumPolynomial

FORMATS = ("plain", "latex", "json")


def _label(core: tuple[Op, ...], pos: int) -> str:
    # forms rebuilt from JSON carry no labels, so fall back to positions
    if 0 < pos <= len(core):
        return core[pos - 1].label
    return f"#{pos}"


def _coeff_prefix(coeff: int, rest_empty: bool) -> str:
    if coeff == 1:
        return "1" if rest_empty else ""
    if coeff == -1:
        return "-1" if rest_empty else "-"
    return str(coeff) if rest_empty else f"{coeff} "


def _join_terms(parts: list[str]) -> str:
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:].lstrip()}" if p.startswith("-") else f" + {p}"
    return out


def _plain_term(t: NormalTerm, core) -> str:
    factors = []
    if t.q_exp == 1:
        factors.append("q")
    elif t.q_exp:
        factors.append(f"q^{t.q_exp}")
    if t.level is not None:
        factors.append(f"p[{t.level}]")
    factors += [f"<{_label(core, a)},{_label(core, c)}>" for a, c in t.pairings]
    factors += [f"a+({_label(core, c)})" for c in t.creators]
    factors += [f"a({_label(core, a)})" for a in t.annihilators]
    return _coeff_prefix(t.coeff, not factors) + " ".join(factors)


def _latex_term(t: NormalTerm, core) -> str:
    factors = []
    if t.q_exp == 1:
        factors.append("q")
    elif t.q_exp:
        factors.append(f"q^{{{t.q_exp}}}")
    if t.level is not None:
        factors.append(f"p_{{{t.level}}}")
    factors += [rf"\langle {_label(core, a)},{_label(core, c)}\rangle" for a, c in t.pairings]
    factors += [f"A^{{+}}({_label(core, c)})" for c in t.creators]
    factors += [f"A({_label(core, a)})" for a in t.annihilators]
    return _coeff_prefix(t.coeff, not factors) + " ".join(factors)


def normal_form_to_dict(nf: NormalForm) -> dict:
    return {
        "m": nf.m,
        "terms": [
            {
                "coeff": t.coeff,
                "q_exp": t.q_exp,
                "proj_level": t.level,
                "pairings": [[a, c] for a, c in t.pairings],
                "creators": list(t.creators),
                "annihilators": list(t.annihilators),
            }
            for t in nf
        ],
    }


def _json_rows(payload: dict) -> str:
    """JSON with one line per entry of ``payload["terms"]``."""
    head = {k: v for k, v in payload.items() if k != "terms"}
    lines = [json.dumps(row) for row in payload["terms"]]
    body = "[]" if not lines else "[\n    " + ",\n    ".join(lines) + "\n  ]"
    fields = [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in head.items()]
    return "{\n" + ",\n".join(fields + [f'  "terms": {body}']) + "\n}"


def normal_form_from_json(text: str) -> NormalForm:
    data = json.loads(text)
    terms = [
        NormalTerm(
            int(t["coeff"]), int(t["q_exp"]),
            None if t["proj_level"] is None else int(t["proj_level"]),
            tuple((int(a), int(c)) for a, c in t["pairings"]),
            tuple(int(c) for c in t["creators"]),
            tuple(int(a) for a in t["annihilators"]),
        )
        for t in data["terms"]
    ]
    return NormalForm.from_terms(data["m"], terms)


def format_normal_form(nf: NormalForm, fmt: str = "plain") -> str:
    """Render ``nf`` deterministically in canonical term order."""
    if fmt == "json":
        return _json_rows(normal_form_to_dict(nf))
    if fmt == "plain":
        return _join_terms([_plain_term(t, nf.core) for t in nf])
    if fmt == "latex":
        return _join_terms([_latex_term(t, nf.core) for t in nf])
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


# -- vacuum polynomials -------------------------------------------------------

def _monomial(mono, latex: bool) -> list[str]:
    if latex:
        return [rf"\langle {f},{g}\rangle" for f, g in mono]
    return [f"<{f},{g}>" for f, g in mono]


def format_vacuum(poly: VacuumPolynomial, fmt: str = "plain", q=None) -> str:
    """Render a vacuum expectation; with ``q`` given the q-dependence is collapsed."""
    latex = fmt == "latex"
    if fmt == "json":
        if q is None:
            rows = [{"inner": [list(p) for p in mono], "q_exp": e, "coeff": c}
                    for (mono, e), c in poly.coeffs.items()]
        else:
            rows = [{"inner": [list(p) for p in mono], "value": _number_json(v)}
                    for mono, v in poly.at_q(q).items()]
        return _json_rows({"terms": rows})
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    parts = []
    if q is None:
        for (mono, e), c in poly.coeffs.items():
            factors = []
            if e == 1:
                factors.append("q")
            elif e:
                factors.append(f"q^{{{e}}}" if latex else f"q^{e}")
            factors += _monomial(mono, latex)
            parts.append(_coeff_prefix(c, not factors) + " ".join(factors))
    else:
        for mono, v in poly.at_q(q).items():
            factors = _monomial(mono, latex)
            if not factors:
                parts.append(_number_text(v))
            elif v in (1, -1):
                parts.append(("-" if v == -1 else "") + " ".join(factors))
            else:
                parts.append(f"{_number_text(v)} " + " ".join(factors))
    return _join_terms(parts)


def _number_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _number_json(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v
