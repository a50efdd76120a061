"""Per-file scanning: comments, statements, neighbor contexts, headers.

A FileScan bundles everything the downstream linker needs: the source file
with its line counts, the merged logical comments, the statement records, and
any diagnostics. All operations here are pure over the scanned content.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .lexer import (
    CommentSpan,
    SourceFile,
    decode_java_bytes,
    lex,
    make_source_file,
    merge_line_comments,
)
from .statements import MEMBER_SCOPES, StatementRecord, build_statements
from .taxonomy import HeaderKind, StatementCategory, category_of

#: Pseudo-statement kind used for comment entries in the context stream.
COMMENT_KIND = "comment"


@dataclass
class FileScan:
    source: SourceFile
    comments: list[CommentSpan]
    statements: list[StatementRecord]
    diagnostics: list[str]
    close_braces: list[tuple[int, int]] = field(default_factory=list, repr=False)
    _stream: list[tuple[int, int, int, int, str]] = field(default_factory=list, repr=False)

    def stream(self) -> list[tuple[int, int, int, int, str]]:
        """Code statements and logical comments ordered by position.

        Entries are (start_line, start_col, end_line, end_col, kind); code
        statements occupy a single position, comments cover their span.
        """
        if not self._stream:
            entries = [(s.line, s.col, s.line, s.col, s.kind) for s in self.statements]
            entries += [
                (c.start_line, c.start_col, c.end_line, c.end_col, COMMENT_KIND)
                for c in self.comments
            ]
            entries.sort(key=lambda e: (e[0], e[1]))
            self._stream = entries
        return self._stream


def scan_source(path: str, text: str) -> FileScan:
    """Scan Java source text into comments, statements, and line counts."""
    lexed = lex(text, path)
    comments = merge_line_comments(lexed.comments, lexed.code_lines)
    statements = build_statements(lexed.tokens)
    source = make_source_file(path, text, lexed.code_lines)
    return FileScan(
        source=source,
        comments=comments,
        statements=statements,
        diagnostics=lexed.diagnostics,
        close_braces=[
            (t.line, t.col)
            for t in lexed.tokens
            if t.type == "punct" and t.value == "}"
        ],
    )


def scan_file(path: str | Path, display_path: str | None = None) -> FileScan:
    """Read and scan a file; invalid bytes decode with lossy replacement."""
    data = Path(path).read_bytes()
    return scan_source(display_path or str(path), decode_java_bytes(data))


def extract_comments(scan: FileScan) -> list[CommentSpan]:
    """Ordered logical comments of a scanned file."""
    return list(scan.comments)


def classify_statement_at(
    scan: FileScan, line: int, direction: str
) -> tuple[str, StatementCategory] | None:
    """Kind and category of the nearest statement start above/below a line.

    Searches strictly off the given line; an adjacent comment is itself a
    statement of kind "comment" (DOC). Returns None at the file boundary.
    """
    if direction == "before":
        return context_before(scan, line, 0)
    if direction == "after":
        return context_after(scan, line, 10**9)
    raise ValueError(f"direction must be 'before' or 'after', got {direction!r}")


def context_before(
    scan: FileScan, line: int, col: int
) -> tuple[str, StatementCategory] | None:
    """Nearest stream entry starting strictly before (line, col)."""
    best = None
    for entry in scan.stream():
        if (entry[0], entry[1]) < (line, col):
            best = entry
        else:
            break
    if best is None:
        return None
    return best[4], category_of(best[4])


def context_after(
    scan: FileScan, line: int, col: int
) -> tuple[str, StatementCategory] | None:
    """Nearest stream entry starting strictly after (line, col)."""
    for entry in scan.stream():
        if (entry[0], entry[1]) > (line, col):
            return entry[4], category_of(entry[4])
    return None


_TYPE_HEADERS = {
    "class": HeaderKind.CLASS,
    "interface": HeaderKind.INTERFACE,
    "enum": HeaderKind.ENUM,
}


def detect_header_construct(scan: FileScan, comment: CommentSpan) -> HeaderKind | None:
    """Header kind of the construct a comment announces, if any.

    The nearest following code statement decides, skipping annotations (and,
    implicitly, other comments, which are not code statements). A closing
    brace between the comment and that statement disqualifies it: the comment
    then sits at the tail of an inner scope, it does not announce anything.
    Type and member headers only count at type-member or top level; a comment
    above the package declaration, or above any code at the very top of the
    file that is not itself a construct, is a FILE header.
    """
    following = None
    preceded_by_code = False
    end_pos = (comment.end_line, comment.end_col)
    for rec in scan.statements:
        if (rec.line, rec.col) < end_pos:
            preceded_by_code = True
            continue
        if rec.kind == "annotation":
            continue
        following = rec
        break

    if following is None:
        return None
    if any(
        end_pos <= brace < (following.line, following.col)
        for brace in scan.close_braces
    ):
        return None
    if following.kind in _TYPE_HEADERS and following.scope in MEMBER_SCOPES:
        return _TYPE_HEADERS[following.kind]
    if following.scope == "type":
        if following.kind in ("function", "function_decl"):
            return HeaderKind.FUNCTION
        if following.kind in ("constructor", "constructor_decl"):
            return HeaderKind.CONSTRUCTOR
    if following.kind == "package":
        return HeaderKind.FILE
    if not preceded_by_code:
        return HeaderKind.FILE
    return None
