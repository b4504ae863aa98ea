"""Text syntax for words: ``a(f)``, ``a+(g)`` and ``p[k]`` separated by optional whitespace."""
from __future__ import annotations

import re

from .symbolic import Op, Word, annihilator, creator, projector

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_INT = re.compile(r"[+-]?[0-9]+")


class ExpressionSyntaxError(ValueError):
    """Parse failure at a 1-based column."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column
        self.reason = message


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ExpressionSyntaxError:
        # running off the end points at the last character present
        column = min(self.pos, len(self.text) - 1) + 1 if self.text else 1
        return ExpressionSyntaxError(message, column)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def skip_space(self) -> None:
        while not self.at_end() and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, literal: str) -> None:
        if not self.text.startswith(literal, self.pos):
            found = "end of input" if self.at_end() else repr(self.text[self.pos])
            raise self.error(f"expected {literal!r}, found {found}")
        self.pos += len(literal)

    def match(self, pattern: re.Pattern, what: str) -> str:
        hit = pattern.match(self.text, self.pos)
        if hit is None:
            found = "end of input" if self.at_end() else repr(self.text[self.pos])
            raise self.error(f"expected {what}, found {found}")
        self.pos = hit.end()
        return hit.group()


def _term(sc: _Scanner) -> Op:
    ch = sc.text[sc.pos]
    if ch == "a":
        sc.pos += 1
        is_creator = sc.text.startswith("+", sc.pos)
        if is_creator:
            sc.pos += 1
        sc.expect("(")
        label = sc.match(_IDENT, "identifier")
        sc.expect(")")
        return creator(label) if is_creator else annihilator(label)
    if ch == "p":
        sc.pos += 1
        sc.expect("[")
        level = int(sc.match(_INT, "integer"))
        sc.expect("]")
        return projector(level)
    raise sc.error(f"unexpected character {ch!r}")


def parse_expression(text: str, m: int) -> Word:
    """Parse ``text`` into a :class:`Word` over the algebra with parameter ``m``."""
    sc = _Scanner(text)
    factors = []
    sc.skip_space()
    while not sc.at_end():
        factors.append(_term(sc))
        sc.skip_space()
    if not factors:
        raise ExpressionSyntaxError("empty expression", 1)
    return Word(m, tuple(factors))
