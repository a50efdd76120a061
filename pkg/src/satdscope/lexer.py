"""Comment-aware lexical scanning of Java source text.

Single pass over the raw text producing code tokens and comment spans with
exact 1-based line/column positions. String, char, and text-block literals
are consumed as single tokens, so comment-like sequences inside them never
produce comments. `<` and `>` are always emitted as single-character tokens
so generic type arguments can be matched by simple depth counting.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

JAVA_EXTENSION = ".java"

# Multi-char operators we keep as units. Anything containing '<' or '>' is
# deliberately absent (generics matching needs single angle tokens).
_OPERATORS = (
    "...", "->", "::", "==", "!=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
)

_IDENT_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")


@dataclass(frozen=True)
class Token:
    type: str  # "ident" | "number" | "string" | "char" | "punct"
    value: str
    line: int
    col: int


@dataclass(frozen=True)
class CommentSpan:
    """One comment (or merged run of line comments) without its delimiters."""

    style: str  # "line" | "block" | "javadoc"
    start_line: int
    end_line: int
    start_col: int
    end_col: int  # column one past the last delimiter char on end_line
    text: str
    trailing: bool  # code tokens appear before it on start_line
    file: str


@dataclass(frozen=True)
class SourceFile:
    path: str
    lines: tuple[str, ...]
    line_count: int
    code_line_count: int


@dataclass
class LexResult:
    tokens: list[Token]
    comments: list[CommentSpan]  # physical comments, unmerged
    code_lines: set[int]
    diagnostics: list[str]


def lex(text: str, path: str = "<memory>") -> LexResult:
    """Tokenize Java source, separating code tokens from comment spans."""
    tokens: list[Token] = []
    comments: list[CommentSpan] = []
    code_lines: set[int] = set()
    diagnostics: list[str] = []

    n = len(text)
    pos = 0
    line = 1
    col = 1

    def mark_code(tok_line: int) -> None:
        code_lines.add(tok_line)

    while pos < n:
        ch = text[pos]

        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r\f\v":
            pos += 1
            col += 1
            continue

        if ch == "/" and pos + 1 < n:
            nxt = text[pos + 1]
            if nxt == "/":
                end = text.find("\n", pos)
                if end == -1:
                    end = n
                raw = text[pos:end]
                comments.append(
                    CommentSpan(
                        style="line",
                        start_line=line,
                        end_line=line,
                        start_col=col,
                        end_col=col + len(raw),
                        text=raw[2:],
                        trailing=line in code_lines,
                        file=path,
                    )
                )
                pos = end
                col += len(raw)
                continue
            if nxt == "*":
                close = text.find("*/", pos + 2)
                start_line, start_col = line, col
                trailing = line in code_lines
                if close == -1:
                    # runs to end of file; a trailing newline is not part of
                    # the span
                    raw = text[pos:n].rstrip("\n")
                    body = raw[2:]
                    terminated = False
                    end_pos = n
                else:
                    end_pos = close + 2
                    raw = text[pos:end_pos]
                    body = raw[2:-2]
                    terminated = True
                style = "javadoc" if raw.startswith("/**") and len(raw) > 4 else "block"
                if style == "javadoc":
                    body = body[1:]  # the second '*' of the opener
                nl_count = raw.count("\n")
                if nl_count:
                    last_nl = raw.rfind("\n")
                    end_line = line + nl_count
                    end_col = len(raw) - last_nl  # one past last char, 1-based
                else:
                    end_line = line
                    end_col = col + len(raw)
                if not terminated:
                    diagnostics.append(
                        f"{path}:{start_line}: unterminated block comment runs to end of file"
                    )
                comments.append(
                    CommentSpan(
                        style=style,
                        start_line=start_line,
                        end_line=end_line,
                        start_col=start_col,
                        end_col=end_col,
                        text=body,
                        trailing=trailing,
                        file=path,
                    )
                )
                pos = end_pos
                line = end_line
                col = end_col
                continue

        if ch == '"':
            if text.startswith('"""', pos):
                end_pos, end_line, end_col = _scan_text_block(text, pos, line, col)
            else:
                end_pos, end_line, end_col = _scan_quoted(text, pos, line, col, '"')
            tokens.append(Token("string", text[pos:end_pos], line, col))
            for covered in range(line, end_line + 1):
                mark_code(covered)
            pos, line, col = end_pos, end_line, end_col
            continue

        if ch == "'":
            end_pos, end_line, end_col = _scan_quoted(text, pos, line, col, "'")
            tokens.append(Token("char", text[pos:end_pos], line, col))
            mark_code(line)
            pos, line, col = end_pos, end_line, end_col
            continue

        if ch in _IDENT_START or ch.isalpha():
            start = pos
            pos += 1
            while pos < n and (text[pos].isalnum() or text[pos] in "_$"):
                pos += 1
            value = text[start:pos]
            tokens.append(Token("ident", value, line, col))
            mark_code(line)
            col += pos - start
            continue

        if ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit()):
            start = pos
            pos += 1
            while pos < n:
                c = text[pos]
                if c.isalnum() or c in "._":
                    pos += 1
                elif c in "+-" and text[pos - 1] in "eEpP":
                    pos += 1
                else:
                    break
            tokens.append(Token("number", text[start:pos], line, col))
            mark_code(line)
            col += pos - start
            continue

        # punctuation / operators, longest match first
        op = None
        for cand in _OPERATORS:
            if text.startswith(cand, pos):
                op = cand
                break
        if op is None:
            op = ch
        tokens.append(Token("punct", op, line, col))
        mark_code(line)
        pos += len(op)
        col += len(op)

    return LexResult(tokens=tokens, comments=comments, code_lines=code_lines, diagnostics=diagnostics)


def _scan_quoted(text: str, pos: int, line: int, col: int, quote: str) -> tuple[int, int, int]:
    """Consume a single-line quoted literal; returns (end_pos, line, col).

    An unterminated literal ends at the newline so the rest of the file still
    scans (malformed input falls back to MISC downstream, never an error).
    """
    n = len(text)
    i = pos + 1
    c = col + 1
    while i < n:
        ch = text[i]
        if ch == "\\" and i + 1 < n:
            i += 2
            c += 2
            continue
        if ch == quote:
            return i + 1, line, c + 1
        if ch == "\n":
            return i, line, c
        i += 1
        c += 1
    return n, line, c


def _scan_text_block(text: str, pos: int, line: int, col: int) -> tuple[int, int, int]:
    """Consume a Java text block (three-quote literal) incl. its delimiters."""
    n = len(text)
    i = pos + 3
    cur_line, cur_col = line, col + 3
    while i < n:
        ch = text[i]
        if ch == "\\" and i + 1 < n:
            i += 2
            cur_col += 2
            continue
        if text.startswith('"""', i):
            return i + 3, cur_line, cur_col + 3
        if ch == "\n":
            cur_line += 1
            cur_col = 1
            i += 1
            continue
        i += 1
        cur_col += 1
    return n, cur_line, cur_col


def merge_line_comments(comments: list[CommentSpan], code_lines: set[int]) -> list[CommentSpan]:
    """Merge runs of line comments on adjacent lines into logical comments.

    Only whole-line (non-trailing) line comments merge, and only when no code
    or blank line sits between them. Block and javadoc comments pass through.
    """
    merged: list[CommentSpan] = []
    run: list[CommentSpan] = []

    def flush() -> None:
        if not run:
            return
        if len(run) == 1:
            merged.append(run[0])
        else:
            first, last = run[0], run[-1]
            merged.append(
                replace(
                    first,
                    end_line=last.end_line,
                    end_col=last.end_col,
                    text="\n".join(c.text for c in run),
                )
            )
        run.clear()

    for comment in comments:
        if comment.style != "line" or comment.trailing:
            flush()
            merged.append(comment)
            continue
        if run and comment.start_line == run[-1].end_line + 1:
            run.append(comment)
        else:
            flush()
            run = [comment]
    flush()
    merged.sort(key=lambda c: (c.start_line, c.start_col))
    return merged


def make_source_file(path: str, text: str, code_lines: set[int]) -> SourceFile:
    lines = tuple(text.splitlines())
    return SourceFile(
        path=path,
        lines=lines,
        line_count=len(lines),
        code_line_count=sum(1 for ln in code_lines if 1 <= ln <= len(lines)),
    )


def decode_java_bytes(data: bytes) -> str:
    """Decode source bytes as UTF-8 with lossy replacement (BOM stripped)."""
    return data.decode("utf-8-sig", errors="replace")
