"""Single-pass statement scanner over the Java token stream.

Produces one record per statement start, keyed on leading keywords and shape,
with a scope stack so member-level constructs (methods, constructors, nested
types) are distinguished from statements inside bodies. This is deliberately
not a parser: kinds come from lexical shape only, and anything unrecognized
degrades to a MISC-categorized kind instead of erroring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import Token

MODIFIER_KEYWORDS = frozenset({
    "public", "private", "protected", "static", "final", "abstract",
    "native", "synchronized", "transient", "volatile", "strictfp",
    "sealed", "default",
})

PRIMITIVE_TYPES = frozenset({
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
    "void", "var",
})

RESERVED = frozenset({
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while",
})

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="})

# Scopes where a statement start can be a major construct for header purposes.
MEMBER_SCOPES = ("top", "type")


@dataclass(frozen=True)
class StatementRecord:
    line: int
    col: int
    kind: str
    scope: str  # "top" | "type" | "method" | "block" | "switch" | "array"


@dataclass
class _Scope:
    kind: str
    type_name: str | None = None
    enum_constants: bool = False
    do_loop: bool = False
    expr_context: bool = False


def build_statements(tokens: list[Token]) -> list[StatementRecord]:
    return _Scanner(tokens).run()


class _Scanner:
    def __init__(self, tokens: list[Token]) -> None:
        self.toks = tokens
        self.n = len(tokens)
        self.records: list[StatementRecord] = []
        self.stack: list[_Scope] = [_Scope("top")]
        self.pending: _Scope | None = None

    # -- small helpers -------------------------------------------------

    def val(self, i: int) -> str:
        return self.toks[i].value if 0 <= i < self.n else ""

    def typ(self, i: int) -> str:
        return self.toks[i].type if 0 <= i < self.n else ""

    def scope(self) -> _Scope:
        return self.stack[-1]

    def emit(self, tok: Token, kind: str) -> None:
        self.records.append(StatementRecord(tok.line, tok.col, kind, self.scope().kind))

    def run(self) -> list[StatementRecord]:
        i = 0
        while i < self.n:
            prev = i
            i = self._step(i)
            if i <= prev:  # belt and braces: a scan step must always advance
                i = prev + 1
        return self.records

    # -- main dispatch -------------------------------------------------

    def _step(self, i: int) -> int:
        t = self.toks[i]
        v = t.value
        sc = self.scope()
        pend = self.pending
        self.pending = None

        if t.type == "punct" and v == "{":
            if pend is None:
                if sc.kind == "array":
                    pend = _Scope("array")
                else:
                    self.emit(t, "block")
                    pend = _Scope("block")
            self.stack.append(pend)
            return i + 1

        if t.type == "punct" and v == "}":
            popped = self.stack.pop() if len(self.stack) > 1 else None
            i += 1
            if popped is not None and popped.do_loop and self.val(i) == "while":
                i = self._skip_parens(i + 1)
                if self.val(i) == ";":
                    i += 1
            elif popped is not None and popped.expr_context:
                i = self._consume_expression(i, continuation=True)
            return i

        if t.type == "punct" and v == ";":
            if sc.kind in ("method", "block", "switch"):
                self.emit(t, "empty_stmt")
            elif sc.kind == "type" and sc.enum_constants:
                sc.enum_constants = False
            return i + 1

        if sc.kind == "array":
            if t.type == "punct" and v == ",":
                return i + 1
            return self._consume_expression(i)

        if t.type == "punct" and v == ",":
            return i + 1

        if sc.kind == "type" and sc.enum_constants:
            return self._consume_enum_constant(i)
        if sc.kind in MEMBER_SCOPES:
            return self._consume_member(i)
        return self._consume_statement(i)

    # -- statement scopes ----------------------------------------------

    def _consume_statement(self, i: int) -> int:
        t = self.toks[i]
        v = t.value

        if t.type == "punct" and v == "@":
            return self._consume_annotation(i, emit=True)

        if t.type == "ident":
            if v == "if":
                self.emit(t, "if")
                i = self._skip_parens(i + 1)
                self.pending = _Scope("block")
                return i
            if v == "else":
                self.emit(t, "else")
                i += 1
                if self.val(i) == "if":
                    i = self._skip_parens(i + 1)
                self.pending = _Scope("block")
                return i
            if v == "for":
                kind = "range" if self._for_is_enhanced(i + 1) else "for"
                self.emit(t, kind)
                i = self._skip_parens(i + 1)
                self.pending = _Scope("block")
                return i
            if v == "while":
                self.emit(t, "while")
                i = self._skip_parens(i + 1)
                self.pending = _Scope("block")
                return i
            if v == "do":
                self.emit(t, "do")
                self.pending = _Scope("block", do_loop=True)
                return i + 1
            if v == "switch":
                self.emit(t, "switch")
                i = self._skip_parens(i + 1)
                self.pending = _Scope("switch")
                return i
            if v == "case" or (v == "default" and self.scope().kind == "switch"):
                self.emit(t, v)
                return self._consume_case_label(i + 1)
            if v in ("break", "continue"):
                self.emit(t, v)
                i += 1
                if self.typ(i) == "ident":
                    i += 1
                if self.val(i) == ";":
                    i += 1
                return i
            if v in ("return", "throw", "assert", "yield"):
                self.emit(t, v)
                return self._consume_expression(i + 1)
            if v == "try":
                self.emit(t, "try")
                i += 1
                if self.val(i) == "(":
                    i = self._skip_parens(i)
                self.pending = _Scope("block")
                return i
            if v == "catch":
                self.emit(t, "catch")
                i = self._skip_parens(i + 1)
                self.pending = _Scope("block")
                return i
            if v == "finally":
                self.emit(t, "finally")
                self.pending = _Scope("block")
                return i + 1
            if v == "synchronized" and self.val(i + 1) == "(":
                self.emit(t, "synchronized")
                i = self._skip_parens(i + 1)
                self.pending = _Scope("block")
                return i
            if v in ("class", "interface", "enum"):
                return self._consume_type_decl(i, i, v)
            if v == "record" and self.typ(i + 1) == "ident" and self.val(i + 2) == "(":
                return self._consume_type_decl(i, i, "record")
            if (
                v not in RESERVED
                and self.val(i + 1) == ":"
                and self.typ(i + 1) == "punct"
            ):
                self.emit(t, "label")
                return i + 2

        return self._consume_decl_or_expr(i)

    def _consume_case_label(self, i: int) -> int:
        """Consume a case/default label up to ':' or '->'."""
        depth = 0
        while i < self.n:
            v = self.val(i)
            if self.typ(i) == "punct":
                if v in "([":
                    depth += 1
                elif v in ")]":
                    depth = max(0, depth - 1)
                elif v == ":" and depth == 0:
                    return i + 1
                elif v == "->" and depth == 0:
                    i += 1
                    if self.val(i) == "{":
                        self.pending = _Scope("block")
                        return i
                    return self._consume_expression(i)
                elif v in "{}" and depth == 0:
                    return i
            i += 1
        return i

    def _for_is_enhanced(self, i: int) -> bool:
        """True for `for (Type x : iterable)`: a depth-1 ':' and no ';'."""
        if self.val(i) != "(":
            return False
        depth = 0
        saw_colon = False
        while i < self.n:
            v = self.val(i)
            if self.typ(i) == "punct":
                if v == "(":
                    depth += 1
                elif v == ")":
                    depth -= 1
                    if depth == 0:
                        return saw_colon
                elif v == ";" and depth == 1:
                    return False
                elif v == ":" and depth == 1:
                    saw_colon = True
            i += 1
        return saw_colon

    # -- member scopes ---------------------------------------------------

    def _consume_member(self, i: int) -> int:
        t = self.toks[i]
        v = t.value

        if t.type == "punct" and v == "@":
            if self.val(i + 1) == "interface":
                return self._consume_type_decl(i, i + 1, "annotation_defn")
            return self._consume_annotation(i, emit=True)

        if v == "package":
            self.emit(t, "package")
            return self._skip_to_semicolon(i + 1)
        if v == "import":
            self.emit(t, "import")
            return self._skip_to_semicolon(i + 1)

        j = self._skip_member_prefix(i)
        w = self.val(j)

        if self.typ(j) == "punct" and w == "@" and self.val(j + 1) == "interface":
            return self._consume_type_decl(i, j + 1, "annotation_defn")
        if w in ("class", "interface", "enum"):
            return self._consume_type_decl(i, j, w)
        if w == "record" and self.typ(j + 1) == "ident" and self.val(j + 2) == "(":
            return self._consume_type_decl(i, j, "record")
        if self.typ(j) == "punct" and w == "{":
            # static/instance initializer block
            self.emit(t, "block")
            self.pending = _Scope("block")
            return j

        return self._consume_signature_or_field(i, j)

    def _skip_member_prefix(self, i: int) -> int:
        """Skip modifiers, inline annotations, and leading type parameters."""
        while i < self.n:
            v = self.val(i)
            if self.typ(i) == "ident" and v in MODIFIER_KEYWORDS:
                i += 1
            elif self.typ(i) == "punct" and v == "@" and self.val(i + 1) != "interface":
                i = self._consume_annotation(i, emit=False)
            elif self.typ(i) == "punct" and v == "<":
                i = self._skip_angles(i)
            else:
                break
        return i

    def _consume_signature_or_field(self, start: int, j: int) -> int:
        """Classify a member that is not a nested type: method-ish or field."""
        t = self.toks[start]
        sc = self.scope()
        angle = 0
        k = j
        name_tok: Token | None = None
        while k < self.n:
            v = self.val(k)
            ty = self.typ(k)
            if ty == "punct":
                if v == "<":
                    angle += 1
                elif v == ">":
                    angle = max(0, angle - 1)
                elif v == "@":
                    k = self._consume_annotation(k, emit=False)
                    continue
                elif angle == 0 and v == "(":
                    return self._finish_method(start, j, k, name_tok)
                elif angle == 0 and v == "=":
                    self.emit(t, "decl_stmt")
                    return self._consume_expression(k + 1)
                elif angle == 0 and v == ";":
                    self.emit(t, "decl_stmt")
                    return k + 1
                elif angle == 0 and v == "{":
                    self.emit(t, "block")
                    self.pending = _Scope("block")
                    return k
                elif angle == 0 and v == "}":
                    if k > j:
                        self.emit(t, "decl")
                    return k
            elif ty == "ident":
                name_tok = self.toks[k]
            k += 1
        if k > j:
            self.emit(t, "decl")
        return k

    def _finish_method(self, start: int, j: int, paren: int, name_tok: Token | None) -> int:
        """Member signature with a parameter list: method or constructor."""
        t = self.toks[start]
        sc = self.scope()
        is_ctor = (
            name_tok is not None
            and sc.kind == "type"
            and sc.type_name is not None
            and name_tok.value == sc.type_name
            and self.toks[j] is name_tok  # nothing but the name before '(' => no return type
        )
        i = self._skip_parens(paren)
        # throws clause, trailing annotations, interface default values
        while i < self.n:
            v = self.val(i)
            ty = self.typ(i)
            if ty == "punct" and v == "{":
                self.emit(t, "constructor" if is_ctor else "function")
                self.pending = _Scope("method")
                return i
            if ty == "punct" and v == ";":
                self.emit(t, "constructor_decl" if is_ctor else "function_decl")
                return i + 1
            if ty == "punct" and v == "@":
                i = self._consume_annotation(i, emit=False)
                continue
            if ty == "punct" and v == "}":
                self.emit(t, "constructor" if is_ctor else "function")
                return i
            if ty == "ident" and v == "default":
                # annotation member default value
                self.emit(t, "function_decl")
                return self._consume_expression(i + 1)
            if ty == "punct" and v == "[":
                i += 1  # archaic `int foo()[]` array dims
                continue
            if ty == "ident" or (ty == "punct" and v in (",", ".", "<", ">", "]", "&")):
                i += 1
                continue
            if ty == "punct" and v == "(":
                i = self._skip_parens(i)
                continue
            break
        self.emit(t, "constructor" if is_ctor else "function")
        return i

    def _consume_type_decl(self, start: int, kw: int, raw_kind: str) -> int:
        """class / interface / enum / record / @interface declaration head."""
        t = self.toks[start]
        kind = {"record": "class"}.get(raw_kind, raw_kind)
        self.emit(t, kind)
        i = kw + 1  # for annotation_defn, kw already sits on 'interface'
        name: str | None = None
        while i < self.n:
            v = self.val(i)
            if self.typ(i) == "ident" and name is None and v not in RESERVED:
                name = v
                i += 1
                continue
            if self.typ(i) == "punct":
                if v == "(":
                    i = self._skip_parens(i)
                    continue
                if v == "<":
                    i = self._skip_angles(i)
                    continue
                if v == "@":
                    i = self._consume_annotation(i, emit=False)
                    continue
                if v == "{":
                    self.pending = _Scope(
                        "type",
                        type_name=name,
                        enum_constants=(raw_kind == "enum"),
                    )
                    return i
                if v == ";":
                    return i + 1
                if v == "}":
                    return i
            i += 1
        return i

    def _consume_enum_constant(self, i: int) -> int:
        t = self.toks[i]
        if t.type == "punct" and t.value == "@":
            return self._consume_annotation(i, emit=True)
        if t.type != "ident":
            return i + 1
        self.emit(t, "decl")
        i += 1
        if self.val(i) == "(":
            i = self._skip_parens(i)
        if self.val(i) == "{":
            # constant with a class body; members inside classify normally
            self.pending = _Scope("type", type_name=self.scope().type_name)
            return i
        return i

    # -- declaration vs expression  --------------------------------------

    def _consume_decl_or_expr(self, i: int) -> int:
        t = self.toks[i]
        kind = self._decl_or_expr_kind(i)
        self.emit(t, kind)
        return self._consume_expression(i)

    def _decl_or_expr_kind(self, i: int) -> str:
        if self._looks_like_declaration(i):
            return "decl_stmt"
        # call: the statement opens with a (dotted) name applied to arguments
        # and carries no top-level assignment afterwards
        k = i
        depth = 0
        chain_ok = self.typ(i) == "ident" and (
            self.val(i) not in RESERVED or self.val(i) in ("this", "super")
        )
        expect_ident = True
        first_call: bool | None = None
        while k < self.n:
            v = self.val(k)
            ty = self.typ(k)
            if ty == "punct":
                if v in "([":
                    if v == "(" and depth == 0 and first_call is None:
                        first_call = chain_ok and not expect_ident
                    depth += 1
                elif v in ")]":
                    if depth == 0:
                        break  # resync point; caller tolerates
                    depth -= 1
                elif depth == 0:
                    if v in ASSIGN_OPS:
                        return "expr_stmt"
                    if v in (";", "{", "}"):
                        break
                    if v == ".":
                        expect_ident = True
                    elif first_call is None:
                        chain_ok = False
            elif ty == "ident" and depth == 0 and first_call is None:
                if not expect_ident or (v in RESERVED and v not in ("this", "super")):
                    chain_ok = False
                expect_ident = False
            k += 1
        return "call" if first_call else "expr_stmt"

    def _looks_like_declaration(self, i: int) -> bool:
        """Lexical test for `[final] Type name [= ..., ...];` shapes."""
        while self.val(i) == "final" or (self.typ(i) == "punct" and self.val(i) == "@"):
            if self.val(i) == "final":
                i += 1
            else:
                i = self._consume_annotation(i, emit=False)
        ty = self.typ(i)
        v = self.val(i)
        if ty != "ident":
            return False
        if v in PRIMITIVE_TYPES:
            i += 1
        elif v in RESERVED:
            return False
        else:
            i += 1
            while self.val(i) == "." and self.typ(i + 1) == "ident":
                i += 2
            if self.val(i) == "<":
                i = self._skip_angles(i)
        while self.val(i) == "[" and self.val(i + 1) == "]":
            i += 2
        if self.typ(i) != "ident" or self.val(i) in RESERVED:
            return False
        i += 1
        while self.val(i) == "[" and self.val(i + 1) == "]":
            i += 2
        return self.typ(i) == "punct" and self.val(i) in ("=", ";", ",")

    # -- expression consumption ------------------------------------------

    def _consume_expression(self, i: int, continuation: bool = False) -> int:
        """Advance past one expression/initializer segment.

        Stops after ';' at depth 0, or at '{' (setting a pending scope so the
        main loop descends into it: anonymous class bodies, lambda bodies,
        switch expressions, and array initializers all stay scannable), or at
        '}' closing the enclosing scope. `continuation` marks re-entry after
        an inner scope popped, where unmatched closers are tolerated.
        """
        depth = 0
        prev = ""
        saw_new = False
        new_type: str | None = None
        pending_new_name = False
        switch_head = False
        while i < self.n:
            t = self.toks[i]
            v = t.value
            if t.type == "punct":
                if v in "([":
                    depth += 1
                elif v in ")]":
                    if depth == 0 and not continuation:
                        return i  # malformed; let caller resync
                    depth = max(0, depth - 1)
                elif v == ";" and depth == 0:
                    return i + 1
                elif v == "," and depth == 0 and self.scope().kind == "array":
                    return i
                elif v == "}":
                    return i
                elif v == "{":
                    self.pending = self._expression_brace_scope(prev, saw_new, new_type, switch_head)
                    return i
            elif t.type == "ident":
                if v == "new":
                    saw_new = True
                    pending_new_name = True
                elif v == "switch":
                    switch_head = True
                elif pending_new_name:
                    new_type = v
                    if self.val(i + 1) != ".":
                        pending_new_name = False
            prev = v
            i += 1
        return i

    def _expression_brace_scope(
        self, prev: str, saw_new: bool, new_type: str | None, switch_head: bool
    ) -> _Scope:
        if switch_head and prev == ")":
            return _Scope("switch", expr_context=True)
        if prev == "->":
            return _Scope("block", expr_context=True)
        if prev == ")" and saw_new:
            return _Scope("type", type_name=new_type, expr_context=True)
        if prev == ")":
            return _Scope("block", expr_context=True)
        return _Scope("array", expr_context=True)

    # -- token skipping utilities ------------------------------------------

    def _skip_parens(self, i: int) -> int:
        """From a '(' token, return the index just past its match."""
        if self.val(i) != "(":
            return i
        depth = 0
        while i < self.n:
            v = self.val(i)
            if self.typ(i) == "punct":
                if v == "(":
                    depth += 1
                elif v == ")":
                    depth -= 1
                    if depth == 0:
                        return i + 1
            i += 1
        return i

    def _skip_angles(self, i: int) -> int:
        if self.val(i) != "<":
            return i
        depth = 0
        while i < self.n:
            v = self.val(i)
            if self.typ(i) == "punct":
                if v == "<":
                    depth += 1
                elif v == ">":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                elif v in ("{", "}", ";", "("):
                    return i  # not generics after all; resync
            i += 1
        return i

    def _consume_annotation(self, i: int, emit: bool) -> int:
        t = self.toks[i]
        if emit:
            self.emit(t, "annotation")
        i += 1
        if self.typ(i) == "ident":
            i += 1
            while self.val(i) == "." and self.typ(i + 1) == "ident":
                i += 2
        if self.val(i) == "(":
            i = self._skip_parens(i)
        return i

    def _skip_to_semicolon(self, i: int) -> int:
        while i < self.n:
            if self.typ(i) == "punct" and self.val(i) == ";":
                return i + 1
            i += 1
        return i
