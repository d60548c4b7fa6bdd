# Python imports
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Union

# Local imports
from cohere.commutator.constants import CONSTANT_PREFIX, VARIABLE_PREFIX
from cohere.commutator.exceptions import TermError

_VARIABLE_RE = re.compile(rf"^{VARIABLE_PREFIX}(0|[1-9][0-9]*)$")
_CONSTANT_RE = re.compile(rf"^{re.escape(CONSTANT_PREFIX)}(0|[1-9][0-9]*)$")


@dataclass(frozen=True)
class Variable:
    """A variable leaf ``x<index>``."""

    index: int

    def to_text(self) -> str:  # noqa: D102
        return f"{VARIABLE_PREFIX}{self.index}"


@dataclass(frozen=True)
class Constant:
    """
    A constant leaf ``@<element>``.

    Constants only occur in polynomials (unary polynomial clones, Mal'tsev chains);
    term operations never contain them.
    """

    value: int

    def to_text(self) -> str:  # noqa: D102
        return f"{CONSTANT_PREFIX}{self.value}"


@dataclass(frozen=True)
class Application:
    """A fundamental operation applied to subterms."""

    symbol: str
    children: tuple["Term", ...] = ()

    def to_text(self) -> str:  # noqa: D102
        if not self.children:
            return self.symbol
        return f"{self.symbol}({','.join(c.to_text() for c in self.children)})"


Term = Union[Variable, Constant, Application]


def term_variables(t: Term) -> set[int]:
    """Return the variable indices occurring in ``t``."""
    found: set[int] = set()
    seen: set[int] = set()
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Variable):
            found.add(node.index)
        elif isinstance(node, Application):
            stack.extend(node.children)
    return found


def term_size(t: Term) -> int:
    """Return the number of nodes of ``t`` written out as a tree."""
    memo: dict[int, int] = {}

    def size(node: Term) -> int:
        if id(node) not in memo:
            children = node.children if isinstance(node, Application) else ()
            memo[id(node)] = 1 + sum(size(c) for c in children)
        return memo[id(node)]

    return size(t)


def term_depth(t: Term) -> int:
    """Return the height of ``t``; leaves have depth 0."""
    memo: dict[int, int] = {}

    def depth(node: Term) -> int:
        if id(node) not in memo:
            children = node.children if isinstance(node, Application) else ()
            memo[id(node)] = 1 + max(depth(c) for c in children) if children else 0
        return memo[id(node)]

    return depth(t)


def parse_term(text: str) -> Term:
    """
    Parse a term from prefix notation.

    ``x<i>`` is a variable, ``@<a>`` a constant, ``sym(t1,...,tk)`` an application and
    a bare symbol a nullary operation. Whitespace is ignored.

    :param text: the term text.

    :returns: the parsed term.

    :raises TermError: if the text is not a well-formed term.
    """
    source = "".join(text.split())
    term, pos = _parse_at(source, 0)
    if pos != len(source):
        raise TermError(f"Unexpected {source[pos:]!r} after term at offset {pos}")
    return term


def _parse_at(source: str, pos: int) -> tuple[Term, int]:
    end = pos
    while end < len(source) and source[end] not in "(),":
        end += 1
    token = source[pos:end]
    if not token:
        raise TermError(f"Expected a symbol at offset {pos} in {source!r}")

    if end < len(source) and source[end] == "(":
        children: list[Term] = []
        end += 1
        if end < len(source) and source[end] == ")":
            return Application(token, ()), end + 1
        while True:
            child, end = _parse_at(source, end)
            children.append(child)
            if end >= len(source):
                raise TermError(f"Unclosed application of {token!r} in {source!r}")
            if source[end] == ",":
                end += 1
            elif source[end] == ")":
                return Application(token, tuple(children)), end + 1
            else:
                raise TermError(f"Unexpected {source[end]!r} at offset {end}")

    if match := _VARIABLE_RE.match(token):
        return Variable(int(match.group(1))), end
    if match := _CONSTANT_RE.match(token):
        return Constant(int(match.group(1))), end
    if token.startswith(CONSTANT_PREFIX):
        raise TermError(f"Malformed constant {token!r}")
    return Application(token, ()), end


def is_reserved_symbol(symbol: str) -> bool:
    """Return whether ``symbol`` would be read back as a variable or constant leaf."""
    return bool(_VARIABLE_RE.match(symbol)) or symbol.startswith(CONSTANT_PREFIX)


class TermFamily(str, Enum):
    """Families of Mal'tsev conditions the term search understands."""

    Maltsev = "maltsev"
    Jonsson = "jonsson"
    Day = "day"
    Gumm = "gumm"

    @classmethod
    def _missing_(cls, value: Any):
        return cls.Maltsev

    @property
    def arity(self) -> int:
        """Number of variables of the terms in the family."""
        return 4 if self is TermFamily.Day else 3


class SearchOutcome(str, Enum):
    """Result of a term search."""

    Found = "found"
    NoTerms = "none"
    Undecided = "undecided"


@dataclass(frozen=True)
class TermChain:
    """
    A chain of terms witnessing a Mal'tsev condition.

    For the Mal'tsev family ``terms`` holds the single term ``p``. For Gumm terms
    ``terms`` is ``q_1, ..., q_n`` and ``p`` carries the extra ternary term.
    """

    family: TermFamily
    terms: tuple[Term, ...]
    p: Optional[Term] = None

    @property
    def length(self) -> int:
        """The index ``n`` of the last term of the chain."""
        if self.family in (TermFamily.Jonsson, TermFamily.Day):
            return len(self.terms) - 1
        return len(self.terms)

    def to_text(self) -> list[str]:
        """Serialize the chain, ``p`` first when present."""
        prefix = [self.p.to_text()] if self.p is not None else []
        return prefix + [t.to_text() for t in self.terms]


@dataclass(frozen=True)
class TermSearchResult:
    """The outcome of a term search together with how it was decided."""

    family: TermFamily
    outcome: SearchOutcome
    chain: Optional[TermChain] = None
    reason: str = ""
    elements_generated: int = 0
    notes: list[str] = field(default_factory=list, compare=False)

    @property
    def found(self) -> bool:  # noqa: D102
        return self.outcome == SearchOutcome.Found
