from __future__ import annotations

from hypothesis import given, strategies as st

from satdscope.lexer import lex, merge_line_comments
from satdscope.scanner import scan_source

LISTING_2 = """public ResponseEntity<String> uploadAirport() {
    // validate file
    if (file.isEmpty())
        // seek valid file
        return new ResponseEntity<>("Please upload a valid file.", BAD_REQUEST);
}

public String getAuthor() {
    // returns author name
    return author;
    // contains both first and last name
}
"""


def comment_tuples(text: str):
    scan = scan_source("T.java", text)
    return [(c.start_line, c.style, c.trailing, c.text) for c in scan.comments]


def test_listing_two_comment_spans():
    got = comment_tuples(LISTING_2)
    assert got == [
        (2, "line", False, " validate file"),
        (4, "line", False, " seek valid file"),
        (9, "line", False, " returns author name"),
        (11, "line", False, " contains both first and last name"),
    ]


def test_empty_file():
    assert comment_tuples("") == []


def test_string_literal_with_comment_lookalike_and_trailing():
    got = comment_tuples('String s = "// x"; // real\n')
    assert got == [(1, "line", True, " real")]


def test_char_and_text_block_literals_are_opaque():
    src = (
        "class A {\n"
        "    char c = '/';\n"
        "    char d = '\\'';\n"
        '    String t = """\n'
        "        // not a comment /* no */\n"
        '        """;\n'
        "    String e = \"escaped \\\" // still string\";\n"
        "}\n"
    )
    assert comment_tuples(src) == []


def test_escaped_quote_does_not_end_string():
    assert comment_tuples('String s = "a\\"// nope"; // yes\n') == [(1, "line", True, " yes")]


def test_block_and_javadoc_styles():
    src = "/* plain */\n/** doc */\n/**/\nclass A {}\n"
    got = comment_tuples(src)
    assert got == [
        (1, "block", False, " plain "),
        (2, "javadoc", False, " doc "),
        (3, "block", False, ""),
    ]


def test_multiline_block_span_and_text():
    src = "/* one\n   two */ int x;\n"
    scan = scan_source("T.java", src)
    (c,) = scan.comments
    assert (c.start_line, c.end_line, c.style) == (1, 2, "block")
    assert c.text == " one\n   two "
    # code after the closer on the end line counts as a code line
    assert scan.source.code_line_count == 1


def test_unterminated_block_comment_extends_to_eof_with_diagnostic():
    src = "int a;\n/* never closed\nmore text\n"
    scan = scan_source("T.java", src)
    (c,) = scan.comments
    assert (c.start_line, c.end_line) == (2, 3)
    assert scan.diagnostics and "unterminated" in scan.diagnostics[0]


def test_adjacent_line_comments_merge():
    src = "// one\n// two\n// three\nint x;\n"
    scan = scan_source("T.java", src)
    (c,) = scan.comments
    assert (c.start_line, c.end_line) == (1, 3)
    assert c.text == " one\n two\n three"
    assert c.style == "line"


def test_blank_line_splits_line_comment_runs():
    src = "// one\n\n// two\nint x;\n"
    got = comment_tuples(src)
    assert [g[0] for g in got] == [1, 3]


def test_intervening_code_splits_runs():
    src = "// one\nint x;\n// two\n"
    assert [g[0] for g in comment_tuples(src)] == [1, 3]


def test_trailing_comment_does_not_merge_with_following_line_comment():
    src = "int x; // tail\n// own line\n"
    got = comment_tuples(src)
    assert got[0] == (1, "line", True, " tail")
    assert got[1] == (2, "line", False, " own line")


def test_block_comments_do_not_merge():
    src = "/* a */\n/* b */\nint x;\n"
    assert len(comment_tuples(src)) == 2


def test_code_line_count_excludes_blank_and_comment_only_lines():
    src = "\n// comment only\nint a;\n\n/* block\n   spans */\nint b; // tail\n"
    scan = scan_source("T.java", src)
    assert scan.source.line_count == 7
    assert scan.source.code_line_count == 2


def test_determinism_same_bytes_same_records():
    a = scan_source("T.java", LISTING_2)
    b = scan_source("T.java", LISTING_2)
    assert a.comments == b.comments
    assert a.statements == b.statements
    assert a.source == b.source


@given(
    payload=st.text(
        alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40
    )
)
def test_literal_immunity_property(payload: str):
    escaped = (
        payload.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )
    src = f'class A {{ String s = "{escaped}"; }}\n// only one\n'
    assert comment_tuples(src) == [(2, "line", False, " only one")]


@given(st.lists(st.sampled_from(["// c", "int x;", "", "/* b */"]), max_size=12))
def test_merge_preserves_physical_comment_text(lines: list[str]):
    src = "\n".join(lines) + "\n"
    scan = scan_source("T.java", src)
    merged_text = "\n".join(c.text for c in scan.comments)
    raw = lex(src, "T.java")
    raw_text = "\n".join(c.text for c in raw.comments)
    assert merged_text == raw_text
