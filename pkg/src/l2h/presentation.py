"""Parsing and printing of finite group presentation files.

A presentation file looks like::

    # the torus
    group "Z2" { generators a, b; relators [a, b]; }

Letters are stored as signed integers: generator ``i`` (0-based) is the
letter ``i + 1`` and its inverse is ``-(i + 1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DuplicateGenerator, PresentationSyntaxError, UnknownGenerator

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[{};,\[\]()^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple = ()
    name: str = ""
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        seen = set()
        for g in gens:
            if not isinstance(g, str) or not IDENT.match(g):
                raise PresentationSyntaxError(f"invalid generator name {g!r}")
            if g in seen:
                raise DuplicateGenerator(f"generator {g!r} declared twice")
            seen.add(g)
        rels = tuple(tuple(r) for r in self.relators)
        for r in rels:
            for letter in r:
                if letter == 0 or abs(letter) > len(gens):
                    raise UnknownGenerator(f"relator letter {letter} references no generator")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(gens)})

    @property
    def ngens(self):
        return len(self.generators)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name!r}") from None

    def letter(self, name, exponent=1):
        return (self.index(name) + 1) * (1 if exponent > 0 else -1)

    def format_word(self, letters):
        return format_letters(letters, self.generators)

    def parse_word(self, text):
        return parse_word(text, self.generators)

    def max_relator_length(self):
        return max((len(r) for r in self.relators), default=0)


def format_letters(letters, names):
    if not letters:
        return "e"
    parts = []
    for x in letters:
        name = names[abs(x) - 1]
        parts.append(name if x > 0 else name + "^-1")
    return " ".join(parts)


def invert_letters(letters):
    return tuple(-x for x in reversed(letters))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                self._fail(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0
        self.names = None

    def _fail(self, message, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        raise PresentationSyntaxError(message, position=pos, line=line, column=col)

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value, kind="punct"):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            self._fail(f"expected {want!r}, found {got!r}", tok[2])
        return tok

    def at(self, value, kind="punct"):
        tok = self.peek()
        return tok[0] == kind and tok[1] == value

    def presentation(self):
        self.expect("group", "ident")
        name_tok = self.expect(None, "string")
        name = re.sub(r"\\(.)", r"\1", name_tok[1][1:-1])
        self.expect("{")
        self.expect("generators", "ident")
        gens = [self.expect(None, "ident")]
        while self.at(","):
            self.next()
            gens.append(self.expect(None, "ident"))
        self.expect(";")
        seen = {}
        for _, g, pos in gens:
            if g in seen:
                raise DuplicateGenerator(f"generator {g!r} declared twice (position {pos})")
            seen[g] = len(seen)
        self.names = seen
        self.expect("relators", "ident")
        relators = []
        if not self.at(";"):
            relators.append(self.wordexpr())
            while self.at(","):
                self.next()
                relators.append(self.wordexpr())
        self.expect(";")
        self.expect("}")
        self.expect(None, "eof")
        return Presentation(tuple(g for _, g, _ in gens), tuple(relators), name)

    def wordexpr(self):
        letters = []
        count = 0
        while True:
            tok = self.peek()
            if tok[0] == "ident" or (tok[0] == "punct" and tok[1] in "[("):
                letters.extend(self.term())
                count += 1
            else:
                break
        if count == 0:
            tok = self.peek()
            self._fail(f"expected a word, found {tok[1] or 'end of input'!r}", tok[2])
        return tuple(letters)

    def term(self):
        tok = self.next()
        if tok[0] == "ident":
            if tok[1] not in self.names:
                raise UnknownGenerator(f"unknown generator {tok[1]!r} at position {tok[2]}")
            base = (self.names[tok[1]] + 1,)
        elif tok[1] == "[":
            u = self.wordexpr()
            self.expect(",")
            v = self.wordexpr()
            self.expect("]")
            base = u + v + invert_letters(u) + invert_letters(v)
        else:
            base = self.wordexpr()
            self.expect(")")
        if self.at("^"):
            self.next()
            n = int(self.expect(None, "int")[1])
            return power_letters(base, n)
        return base


def power_letters(letters, n):
    if n < 0:
        return invert_letters(letters) * (-n)
    return tuple(letters) * n


def parse_presentation(text: str) -> Presentation:
    """Parse presentation-file text, expanding exponents and commutators."""
    return _Parser(text).presentation()


def parse_word(text, names):
    """Parse a bare word expression over the given generator names."""
    stripped = text.strip()
    if stripped in ("e", "1", "") and "e" not in names:
        return ()
    p = _Parser(text)
    p.names = {g: i for i, g in enumerate(names)}
    word = p.wordexpr()
    p.expect(None, "eof")
    return word


def format_presentation(P: Presentation) -> str:
    """Canonical text form; ``parse_presentation`` inverts it exactly."""
    name = P.name.replace("\\", "\\\\").replace('"', '\\"')
    gens = ", ".join(P.generators)
    rels = ", ".join(P.format_word(r) if r else P.generators[0] + "^0" for r in P.relators)
    return f'group "{name}" {{\n  generators {gens};\n  relators {rels};\n}}\n'


def load_presentation(path) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())
