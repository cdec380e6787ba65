import pytest
from hypothesis import given, strategies as st

from codeshift.errors import LexError
from codeshift.lexer import Token, TokenKind, scan_with_comments, token_size, tokenize


def texts(code):
    return [t.text for t in tokenize(code)]


def kinds(code):
    return [t.kind for t in tokenize(code)]


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_ge_operator(self):
        toks = tokenize("i >= 0")
        assert [(t.kind, t.text) for t in toks] == [
            (TokenKind.IDENTIFIER, "i"),
            (TokenKind.OPERATOR, ">="),
            (TokenKind.NUMBER, "0"),
        ]

    def test_maximal_munch_or(self):
        toks = tokenize("a||b")
        assert [(t.kind, t.text) for t in toks] == [
            (TokenKind.IDENTIFIER, "a"),
            (TokenKind.OPERATOR, "||"),
            (TokenKind.IDENTIFIER, "b"),
        ]

    def test_shift_assign_is_one_token(self):
        assert texts("x >>>= 2") == ["x", ">>>=", "2"]
        assert texts("x >>= 2") == ["x", ">>=", "2"]

    def test_generic_close_merges(self):
        assert ">>" in texts("Map<String, List<Integer>> m;")

    def test_keywords_vs_identifiers(self):
        toks = tokenize("while whileLoop foreach forx")
        assert [t.kind for t in toks] == [
            TokenKind.KEYWORD, TokenKind.IDENTIFIER, TokenKind.KEYWORD, TokenKind.IDENTIFIER,
        ]

    def test_numbers(self):
        assert kinds("0xFF_EEL 0b1010 1_000 .5e-3f 1.5d 42") == [TokenKind.NUMBER] * 6

    def test_dollar_identifiers(self):
        assert texts("$tmp foo$bar") == ["$tmp", "foo$bar"]

    def test_strings_and_chars(self):
        toks = tokenize(r'''s = "a\"b" + 'c';''')
        assert toks[2].kind is TokenKind.STRING_LIT
        assert toks[4].kind is TokenKind.CHAR_LIT

    def test_verbatim_and_interpolated_strings(self):
        assert tokenize('v = @"c:\\dir\\""x";')[2].text == '@"c:\\dir\\""x"'
        assert tokenize('v = $"n={n}";')[2].kind is TokenKind.STRING_LIT

    def test_text_block(self):
        toks = tokenize('s = """\nline1\n""";')
        assert toks[2].kind is TokenKind.STRING_LIT
        assert "line1" in toks[2].text

    def test_annotation_at(self):
        assert texts("@Override void f() {}")[0] == "@"

    def test_comments_dropped(self):
        assert texts("a /* b */ c // d") == ["a", "c"]
        full = scan_with_comments("a /* b */ c // d")
        assert [t.kind for t in full].count(TokenKind.COMMENT) == 2

    def test_unterminated_block_comment_tolerated(self):
        assert texts("a; /* no close") == ["a", ";"]


class TestErrors:
    def test_unterminated_string(self):
        with pytest.raises(LexError) as err:
            tokenize('x = "abc')
        assert err.value.offset == 4

    def test_unterminated_char(self):
        with pytest.raises(LexError):
            tokenize("c = 'x")

    def test_string_with_newline(self):
        with pytest.raises(LexError):
            tokenize('s = "ab\ncd"')

    def test_unterminated_text_block(self):
        with pytest.raises(LexError):
            tokenize('s = """never closed')


class TestTokenSize:
    def test_empty(self):
        assert token_size("") == 0

    def test_return_true(self):
        assert token_size("return true;") == 3

    def test_comments_only(self):
        assert token_size("// nothing\n/* here */") == 0

    def test_counts_significant_only(self):
        assert token_size("int x = 1; // trailing") == 5


def reconstruct(code: str) -> bytes:
    src = code.encode("utf-8")
    out, prev = b"", 0
    for tok in tokenize(code):
        out += src[prev:tok.offset] + tok.text.encode("utf-8")
        prev = tok.end()
    return out + src[prev:]


SNIPPETS = [
    "int x = 1;",
    'String s = "with // no comment" + name;',
    "for (int i = 0; i < n; i++) { total += data[i]; }",
    "if (a >= b || c != d) { return -1; } /* block */",
    "double d = .5e3; char c = '\\n'; // done",
    "Map<String, List<Integer>> m = new HashMap<>();",
    'v = @"verbatim\\";',
    "x >>>= 3; y = a >>> b; z = p ?? q;",
]


@pytest.mark.parametrize("code", SNIPPETS)
def test_reconstruction_fixture(code):
    assert reconstruct(code) == code.encode("utf-8")


def test_reconstruction_fixture_corpus(fixture_records):
    for record in fixture_records:
        code = record["target"]
        assert reconstruct(code) == code.encode("utf-8")


def test_offsets_strictly_increasing(fixture_records):
    for record in fixture_records[:50]:
        offsets = [t.offset for t in tokenize(record["target"])]
        assert offsets == sorted(set(offsets))


def test_byte_offsets_with_unicode():
    code = 'prefix = "héllo"; é = 1;'
    src = code.encode("utf-8")
    for tok in tokenize(code):
        assert src[tok.offset:tok.end()] == tok.text.encode("utf-8")
    assert reconstruct(code) == src


@given(st.lists(st.sampled_from(SNIPPETS), min_size=0, max_size=6))
def test_reconstruction_property(parts):
    code = "\n".join(parts)
    assert reconstruct(code) == code.encode("utf-8")


@given(st.lists(st.sampled_from(SNIPPETS), min_size=1, max_size=4),
       st.lists(st.sampled_from(SNIPPETS), min_size=1, max_size=4))
def test_token_size_additive_at_statement_boundary(left, right):
    a = "\n".join(left) + "\n"
    b = "\n".join(right)
    assert token_size(a + b) == token_size(a) + token_size(b)


def test_token_dataclass_end():
    tok = Token(TokenKind.IDENTIFIER, "héllo", 10)
    assert tok.end() == 10 + len("héllo".encode("utf-8"))
