"""Lexer for Java- and C#-like source text.

Single shared token language: the keyword and operator sets are the union of
both languages, scanned with maximal munch (">=" is one token, "a||b" lexes
as three). The public token stream drops comments and whitespace but keeps
byte offsets, so the original bytes can be reconstructed from tokens plus the
gaps between them.

Covered literal forms: decimal / hex / binary integers with digit separators
and suffixes, floats with exponents, standard strings and chars with escapes,
C# verbatim (@"...") and interpolated ($"...") strings, and Java text blocks.
Unterminated string, char, or text-block literals raise LexError with the
byte offset; an unterminated block comment is tolerated and runs to EOF.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import LexError


class TokenKind(str, Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    NUMBER = "number"
    STRING_LIT = "string_lit"
    CHAR_LIT = "char_lit"
    OPERATOR = "operator"
    PUNCT = "punct"
    COMMENT = "comment"


# Java plus C#; contextual keywords (var, yield, record, ...) stay identifiers
# so code using them as plain names lexes the way both languages treat it.
KEYWORDS = frozenset("""
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null
    as base bool checked decimal delegate event explicit extern fixed foreach
    implicit in internal is lock namespace object operator out override params
    readonly ref sbyte sealed sizeof stackalloc string struct typeof uint
    ulong unchecked unsafe ushort using virtual
""".split())

# Longest first so the regex alternation implements maximal munch.
OPERATORS = [
    ">>>=",
    ">>>", "<<=", ">>=", "??=",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", ">>", "->", "=>", "::", "??", "?.",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?", ":",
]

PUNCTS = ["...", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "#"]


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    offset: int  # byte offset into the UTF-8 encoding of the source

    def end(self) -> int:
        return self.offset + len(self.text.encode("utf-8"))


_NUMBER = r"""
    0[xX][0-9a-fA-F_]+[lLuU]*
  | 0[bB][01_]+[lLuU]*
  | (?: \d[\d_]*\.[\d_]* | \.\d[\d_]* | \d[\d_]* )
    (?:[eE][+-]?\d[\d_]*)? [fFdDlLuUmM]*
"""

_MASTER = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*(?:[^*]|\*(?!/))*\*/)
  | (?P<number>""" + _NUMBER + r""")
  | (?P<identifier>[^\W\d][\w$]*)
  | (?P<operator>""" + "|".join(re.escape(op) for op in OPERATORS) + r""")
  | (?P<punct>""" + "|".join(re.escape(p) for p in PUNCTS) + r""")
    """,
    re.VERBOSE,
)

_DOLLAR_IDENT = re.compile(r"\$[\w$]*")
_SIMPLE_STRING = re.compile(r'"(?:[^"\\\n]|\\.)*"')
_SIMPLE_CHAR = re.compile(r"'(?:[^'\\\n]|\\.)*'")
_VERBATIM_STRING = re.compile(r'[@$]{1,2}"(?:[^"]|"")*"')
_TEXT_BLOCK = re.compile(r'"""(?:[^\\]|\\.)*?"""', re.DOTALL)


class _ByteMap:
    """char index -> byte offset; identity for pure-ASCII text."""

    def __init__(self, code: str):
        if code.isascii():
            self._prefix = None
        else:
            prefix = [0]
            total = 0
            for ch in code:
                total += len(ch.encode("utf-8"))
                prefix.append(total)
            self._prefix = prefix

    def __getitem__(self, char_pos: int) -> int:
        return char_pos if self._prefix is None else self._prefix[char_pos]


def _scan(code: str, bytemap: _ByteMap):
    """Yield (kind, text, byte_offset) for every token including comments."""
    pos = 0
    n = len(code)
    while pos < n:
        ch = code[pos]

        if ch == '"':
            if code.startswith('"""', pos):
                m = _TEXT_BLOCK.match(code, pos)
                if m is None:
                    raise LexError("unterminated text block", bytemap[pos])
            else:
                m = _SIMPLE_STRING.match(code, pos)
                if m is None:
                    raise LexError("unterminated string literal", bytemap[pos])
            yield TokenKind.STRING_LIT, m.group(), bytemap[pos]
            pos = m.end()
            continue

        if ch == "'":
            m = _SIMPLE_CHAR.match(code, pos)
            if m is None:
                raise LexError("unterminated char literal", bytemap[pos])
            yield TokenKind.CHAR_LIT, m.group(), bytemap[pos]
            pos = m.end()
            continue

        if ch in "@$":
            m = _VERBATIM_STRING.match(code, pos)
            if m is not None:
                yield TokenKind.STRING_LIT, m.group(), bytemap[pos]
                pos = m.end()
                continue
            if ch == "$":
                m = _DOLLAR_IDENT.match(code, pos)
                yield TokenKind.IDENTIFIER, m.group(), bytemap[pos]
                pos = m.end()
                continue
            yield TokenKind.PUNCT, ch, bytemap[pos]  # annotation/attribute @
            pos += 1
            continue

        if code.startswith("/*", pos) and "*/" not in code[pos + 2:]:
            yield TokenKind.COMMENT, code[pos:], bytemap[pos]
            break

        m = _MASTER.match(code, pos)
        if m is None:
            raise LexError(f"unexpected character {ch!r}", bytemap[pos])
        group = m.lastgroup
        text = m.group()
        if group == "ws":
            pass
        elif group in ("line_comment", "block_comment"):
            yield TokenKind.COMMENT, text, bytemap[pos]
        elif group == "number":
            yield TokenKind.NUMBER, text, bytemap[pos]
        elif group == "identifier":
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            yield kind, text, bytemap[pos]
        elif group == "operator":
            yield TokenKind.OPERATOR, text, bytemap[pos]
        else:
            yield TokenKind.PUNCT, text, bytemap[pos]
        pos = m.end()


def scan_with_comments(code: str) -> list[Token]:
    """Full token stream including comment tokens (reconstruction, tooling)."""
    bytemap = _ByteMap(code)
    return [Token(k, t, o) for k, t, o in _scan(code, bytemap)]


def tokenize(code: str) -> list[Token]:
    """Lex `code`, returning significant tokens (comments dropped).

    Offsets are byte offsets into the UTF-8 encoding, so reconstruction and
    error reporting agree with what is on disk.
    """
    bytemap = _ByteMap(code)
    return [
        Token(k, t, o)
        for k, t, o in _scan(code, bytemap)
        if k is not TokenKind.COMMENT
    ]


def token_size(code: str) -> int:
    """Number of significant tokens; the complexity measure of a program."""
    return len(tokenize(code))
