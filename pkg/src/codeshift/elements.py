"""Detection of language elements over the token stream.

The taxonomy is a fixed, versioned set of thirteen syntactic categories
(keywords, operators, and expression forms). Detection is rule-based on the
lexed token stream rather than a full parse; the rules below are part of the
package contract and are frozen so that splits are reproducible:

  else / true / break / long      keyword occurrence
  for                             keyword "for" or "foreach" (for-each headers
                                  count as for)
  while_statement                 keyword "while"; the tail of a do-while
                                  counts, a known divergence from parse trees
  floating_point_type             keyword "float" or "double"
  >= and ||                       operator tokens after maximal-munch lexing
  unary_expression                prefix "!" or "~" always; "-" / "+" when the
                                  previous significant token is an operator,
                                  "(", "[", ",", "return", "case", or the
                                  stream start
  array_access                    "[" preceded by an identifier, "]" or ")",
                                  excluding creation dimensions after
                                  "new Type" and empty "[]" declarator pairs
  array_creation_expression       "new" + type name (qualified / generic /
                                  primitive) + "["; counted once per "new"
  conditional_expression          "?" preceded by an expression-ending token
                                  (identifier, literal, ")", "]"), excluding
                                  "?" inside matched generic argument brackets

Comments and literal contents never produce elements: "while" inside a string
does not count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .lexer import Token, TokenKind, tokenize


class ElementKind(str, Enum):
    """Closed element taxonomy; values are the stable serialized names."""

    ELSE = "else"
    TRUE = "true"
    FLOATING_POINT_TYPE = "floating_point_type"
    UNARY_EXPRESSION = "unary_expression"
    ARRAY_ACCESS = "array_access"
    WHILE_STATEMENT = "while_statement"
    LONG = "long"
    ARRAY_CREATION_EXPRESSION = "array_creation_expression"
    BREAK = "break"
    GE_OPERATOR = ">="
    FOR = "for"
    OR_OPERATOR = "||"
    CONDITIONAL_EXPRESSION = "conditional_expression"


TAXONOMY_VERSION = 1

#: Taxonomy order, used for deterministic tie-breaking in rankings.
ALL_KINDS: tuple[ElementKind, ...] = tuple(ElementKind)

_BY_NAME = {k.value: k for k in ElementKind}


def kind_from_name(name: str) -> ElementKind:
    try:
        return _BY_NAME[name]
    except KeyError:
        known = ", ".join(sorted(_BY_NAME))
        raise ValueError(f"unknown element kind {name!r}; known kinds: {known}") from None


@dataclass
class ElementHistogram:
    """Multiset of detected elements; absent kinds count zero."""

    counts: dict[ElementKind, int] = field(default_factory=dict)

    def __getitem__(self, kind: ElementKind) -> int:
        return self.counts.get(kind, 0)

    def add(self, kind: ElementKind, n: int = 1) -> None:
        self.counts[kind] = self.counts.get(kind, 0) + n

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict[str, int]:
        return {k.value: self.counts[k] for k in ALL_KINDS if self.counts.get(k, 0)}


_KEYWORD_KINDS = {
    "else": ElementKind.ELSE,
    "true": ElementKind.TRUE,
    "break": ElementKind.BREAK,
    "long": ElementKind.LONG,
    "for": ElementKind.FOR,
    "foreach": ElementKind.FOR,
    "while": ElementKind.WHILE_STATEMENT,
    "float": ElementKind.FLOATING_POINT_TYPE,
    "double": ElementKind.FLOATING_POINT_TYPE,
}

_OPERATOR_KINDS = {
    ">=": ElementKind.GE_OPERATOR,
    "||": ElementKind.OR_OPERATOR,
}

# tokens after which a "-" or "+" is a prefix sign
_UNARY_PREV_TEXT = {"(", "[", ","}
_UNARY_PREV_KEYWORDS = {"return", "case"}

# tokens that end an expression, making a following "?" a ternary
_EXPR_END_PUNCT = {")", "]"}
_LITERAL_KEYWORDS = {"true", "false", "null"}

_PRIMITIVE_TYPES = {
    "int", "long", "float", "double", "byte", "short", "char", "boolean",
    "bool", "decimal", "sbyte", "ushort", "uint", "ulong", "string", "object",
}

# a candidate generic "<...>" span cannot cross these
_GENERIC_BREAKERS = {";", "{", "}", "(", ")", "=", "&&", "||"}


def _match_brackets(tokens: list[Token]) -> dict[int, int]:
    """Index of each "[" -> index of its matching "]"."""
    match: dict[int, int] = {}
    stack: list[int] = []
    for i, tok in enumerate(tokens):
        if tok.text == "[" and tok.kind is TokenKind.PUNCT:
            stack.append(i)
        elif tok.text == "]" and tok.kind is TokenKind.PUNCT and stack:
            match[stack.pop()] = i
    return match


def _generic_spans(tokens: list[Token]) -> list[tuple[int, int]]:
    """Matched candidate generic-argument spans (lt_index, gt_index).

    A "<" opened right after an identifier starts a candidate; an operator
    made only of ">" characters closes as many candidates as it has chars.
    Statement-level separators discard open candidates, and candidates never
    matched by a ">" produce no span.
    """
    spans: list[tuple[int, int]] = []
    stack: list[int] = []
    for i, tok in enumerate(tokens):
        text = tok.text
        if text in _GENERIC_BREAKERS:
            stack.clear()
        elif text == "<" and i > 0 and tokens[i - 1].kind is TokenKind.IDENTIFIER:
            stack.append(i)
        elif tok.kind is TokenKind.OPERATOR and set(text) == {">"}:
            for _ in range(min(len(text), len(stack))):
                spans.append((stack.pop(), i))
    return spans


def _creation_info(tokens: list[Token], bracket_match: dict[int, int]):
    """Scan for array creations.

    Returns (creation_count, creation_dim_openers) where the second item is
    the set of "[" indices that are dimension brackets of a creation (the
    whole "new int[5][3]" chain), which array-access detection must skip.
    """
    creations = 0
    dim_openers: set[int] = set()
    n = len(tokens)
    i = 0
    while i < n:
        tok = tokens[i]
        if not (tok.kind is TokenKind.KEYWORD and tok.text == "new"):
            i += 1
            continue
        j = i + 1
        # type name: primitive keyword, or dotted identifier chain
        if j < n and tokens[j].kind is TokenKind.KEYWORD and tokens[j].text in _PRIMITIVE_TYPES:
            j += 1
        elif j < n and tokens[j].kind is TokenKind.IDENTIFIER:
            j += 1
            while j + 1 < n and tokens[j].text == "." and tokens[j + 1].kind is TokenKind.IDENTIFIER:
                j += 2
        else:
            i += 1
            continue
        # optional generic arguments, bounded to stay out of expressions
        if j < n and tokens[j].text == "<":
            depth, k = 0, j
            ok = False
            while k < n and k - j < 64:
                text = tokens[k].text
                if text == "<":
                    depth += 1
                elif tokens[k].kind is TokenKind.OPERATOR and set(text) == {">"}:
                    depth -= len(text)
                    if depth <= 0:
                        ok = True
                        k += 1
                        break
                elif text in (";", "{", "}", ")"):
                    break
                k += 1
            if not ok:
                i += 1
                continue
            j = k
        if j < n and tokens[j].text == "[":
            creations += 1
            # the whole chain of dimension brackets belongs to this creation
            while j < n and tokens[j].text == "[" and j in bracket_match:
                dim_openers.add(j)
                j = bracket_match[j] + 1
            i = j
        else:
            i += 1
    return creations, dim_openers


def extract_elements(tokens: list[Token]) -> ElementHistogram:
    """Count element occurrences in a significant-token stream."""
    hist = ElementHistogram()
    n = len(tokens)
    bracket_match = _match_brackets(tokens)
    generic_spans = _generic_spans(tokens)
    creations, creation_dims = _creation_info(tokens, bracket_match)
    if creations:
        hist.add(ElementKind.ARRAY_CREATION_EXPRESSION, creations)

    for i, tok in enumerate(tokens):
        text = tok.text
        prev = tokens[i - 1] if i > 0 else None

        if tok.kind is TokenKind.KEYWORD:
            kind = _KEYWORD_KINDS.get(text)
            if kind is not None:
                hist.add(kind)
            continue

        if tok.kind is TokenKind.OPERATOR:
            kind = _OPERATOR_KINDS.get(text)
            if kind is not None:
                hist.add(kind)
            if text in ("!", "~"):
                hist.add(ElementKind.UNARY_EXPRESSION)
            elif text in ("-", "+"):
                if (
                    prev is None
                    or prev.kind is TokenKind.OPERATOR
                    or prev.text in _UNARY_PREV_TEXT
                    or (prev.kind is TokenKind.KEYWORD and prev.text in _UNARY_PREV_KEYWORDS)
                ):
                    hist.add(ElementKind.UNARY_EXPRESSION)
            elif text == "?":
                ends_expr = prev is not None and (
                    prev.kind in (TokenKind.IDENTIFIER, TokenKind.NUMBER,
                                  TokenKind.STRING_LIT, TokenKind.CHAR_LIT)
                    or prev.text in _EXPR_END_PUNCT
                    or (prev.kind is TokenKind.KEYWORD and prev.text in _LITERAL_KEYWORDS)
                )
                in_generic = any(lo < i < hi for lo, hi in generic_spans)
                if ends_expr and not in_generic:
                    hist.add(ElementKind.CONDITIONAL_EXPRESSION)
            continue

        if text == "[" and tok.kind is TokenKind.PUNCT:
            if i in creation_dims:
                continue
            nxt = tokens[i + 1] if i + 1 < n else None
            if nxt is not None and nxt.text == "]":
                continue  # empty [] declarator pair
            if prev is not None and (
                prev.kind is TokenKind.IDENTIFIER or prev.text in (")", "]")
            ):
                hist.add(ElementKind.ARRAY_ACCESS)

    return hist


def element_histogram(code: str) -> ElementHistogram:
    """Convenience: lex then extract."""
    return extract_elements(tokenize(code))


def contains_element(sample, task, kind: ElementKind, override: str | None = None) -> bool:
    """Property test for syntax scenarios: does the sample's basis text use `kind`?"""
    from .corpus import basis_text

    return element_histogram(basis_text(sample, task, override))[kind] >= 1


# Default scenario element lists per task, as shipped presets.
SYNTAX_PRESETS: dict[str, tuple[ElementKind, ...]] = {
    "text2code": (
        ElementKind.ELSE,
        ElementKind.FLOATING_POINT_TYPE,
        ElementKind.UNARY_EXPRESSION,
        ElementKind.ARRAY_ACCESS,
        ElementKind.TRUE,
    ),
    "refinement": (
        ElementKind.WHILE_STATEMENT,
        ElementKind.LONG,
        ElementKind.ARRAY_CREATION_EXPRESSION,
        ElementKind.BREAK,
        ElementKind.GE_OPERATOR,
    ),
    "translation": (
        ElementKind.FOR,
        ElementKind.TRUE,
        ElementKind.ARRAY_CREATION_EXPRESSION,
        ElementKind.OR_OPERATOR,
        ElementKind.CONDITIONAL_EXPRESSION,
    ),
}
