"""Words in surface-group generators.

Grammar (whitespace ignored)::

    word      := letter*
    letter    := generator ["'"]
    generator := ("a" | "b" | "c") digits

``a_j, b_j`` are the handle generators of handle j and ``c_k`` the boundary
generator of boundary circle k (all indices start at 1). A prime marks the
inverse. The empty word is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from qpl.errors import WordParseError


@dataclass(frozen=True)
class Letter:
    kind: str
    index: int
    power: int = 1

    def __str__(self):
        return f"{self.kind}{self.index}" + ("'" if self.power < 0 else "")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def word(self):
        out = []
        while self.peek():
            out.append(self.letter())
        return tuple(out)

    def letter(self):
        kind = self.peek()
        if kind not in ("a", "b", "c"):
            raise WordParseError(f"expected a generator, found {kind!r}", self.pos)
        self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise WordParseError("generator needs an index", self.pos)
        index = int(self.text[digits:self.pos])
        if index < 1:
            raise WordParseError("generator indices start at 1", digits)
        power = 1
        if self.pos < len(self.text) and self.text[self.pos] == "'":
            if self.pos + 1 < len(self.text) and self.text[self.pos + 1] == "'":
                raise WordParseError("repeated inverse marker", self.pos)
            power = -1
            self.pos += 1
        return Letter(kind, index, power)


def parse_word(text):
    """Parse a word into a tuple of letters."""
    return _Parser(str(text)).word()


def format_word(letters):
    return "".join(str(x) for x in letters)


def invert(letters):
    return tuple(Letter(x.kind, x.index, -x.power) for x in reversed(letters))
