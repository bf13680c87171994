import pytest
from hypothesis import given, strategies as st

from nullforge.javalex import CHAR, IDENT, KEYWORD, NUMBER, OP, STRING, LexError, tokenize


def kinds(text):
    return [(t.kind, t.text) for t in tokenize(text)[0]]


def test_basic_statement():
    assert kinds("int x = a + 1;") == [
        (KEYWORD, "int"), (IDENT, "x"), (OP, "="), (IDENT, "a"), (OP, "+"), (NUMBER, "1"), (OP, ";"),
    ]


@pytest.mark.parametrize(
    "text, ops",
    [
        ("a>>>=b", [">>>="]),
        ("a>>>b", [">>>"]),
        ("i++ + ++j", ["++", "+", "++"]),
        ("x->y", ["->"]),
        ("a&&b||c", ["&&", "||"]),
        ("Foo::new", ["::"]),
    ],
)
def test_maximal_munch(text, ops):
    assert [t.text for t in tokenize(text)[0] if t.kind == OP] == ops


def test_comments_and_literals_are_masked():
    text = 'a /* x + y */ + "p - q" // r * s\n + \'c\''
    tokens, masks = tokenize(text)
    assert [text[a:b] for a, b in masks] == ["/* x + y */", '"p - q"', "// r * s", "'c'"]
    assert [t.text for t in tokens if t.kind == OP] == ["+", "+"]
    assert [t.kind for t in tokens if t.kind in (STRING, CHAR)] == [STRING, CHAR]


def test_escaped_quotes_and_text_blocks():
    text = 's = "a\\"b" + """\nline "q"\n""";'
    tokens, masks = tokenize(text)
    strings = [t.text for t in tokens if t.kind == STRING]
    assert strings == ['"a\\"b"', '"""\nline "q"\n"""']
    assert len(masks) == 2


@pytest.mark.parametrize("num", ["0x1F", "1_000L", "3.14", "1e-9", ".5f", "0b1010", "2d"])
def test_numbers(num):
    assert kinds(num) == [(NUMBER, num)]


def test_dot_after_number_followed_by_identifier_is_member_access():
    assert [t.text for t in tokenize("1.toString")[0]] == ["1", ".", "toString"]
    assert [t.text for t in tokenize("a[1].b")[0]] == ["a", "[", "1", "]", ".", "b"]


@pytest.mark.parametrize("bad, offset", [('x = "abc', 4), ("/* never", 0), ("a # b", 2), ("'\n'", 0)])
def test_errors_report_offset(bad, offset):
    with pytest.raises(LexError) as info:
        tokenize(bad)
    assert info.value.offset == offset


def test_unicode_identifier():
    assert kinds("int größe = 1;")[1] == (IDENT, "größe")


@given(st.lists(st.sampled_from(["a", "b1", "+", "-", "==", "null", "(", ")", "42", '"s+t"', "/*c*/", "// d\n", " ", "\n"]), max_size=30))
def test_tokens_are_ordered_and_faithful(parts):
    text = " ".join(parts)
    tokens, masks = tokenize(text)
    last = 0
    for t in tokens:
        assert t.start >= last
        assert text[t.start:t.end] == t.text
        last = t.end
    for a, b in masks:
        # a token inside a mask must be the literal that the mask covers
        for t in tokens:
            if a <= t.start < b:
                assert (t.start, t.end) == (a, b)
