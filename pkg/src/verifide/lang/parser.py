"""Recursive-descent parser for MiniSpec.

Parsing is recoverable: a syntax error inside one declaration produces a
diagnostic and skips ahead to the next top-level ``method``/``function``
keyword, so later declarations still yield entities. Comments and
whitespace are dropped before parsing and never reach the tree.
"""

from __future__ import annotations

from .ast import (
    ArrayAssignStmt, AssertStmt, AssignStmt, AssumeStmt, Attribute, BinaryOp,
    Block, BoolLit, CallExpr, CallStmt, Decl, Diagnostic, Expr, ForallExpr,
    FunctionDecl, IfStmt, IndexExpr, IntLit, LengthExpr, MethodDecl, OldExpr,
    Param, Program, ReturnStmt, SpecClause, Stmt, Type, UnaryOp, VarDeclStmt,
    VarRef, WhileStmt,
)
from .tokens import Span, Token, TokenKind, lex_scan, merge_spans

_COMPARISONS = {"==", "!=", "<", "<=", ">", ">="}


class ParseError(Exception):
    def __init__(self, message: str, span: Span) -> None:
        super().__init__(message)
        self.message = message
        self.span = span


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = [t for t in lex_scan(text)
                       if t.kind not in (TokenKind.WHITESPACE, TokenKind.COMMENT)]
        self.pos = 0
        self.text = text
        self.diagnostics: list[Diagnostic] = []

    # ── token access ─────────────────────────────────────────────

    def _eof_span(self) -> Span:
        if self.tokens:
            s = self.tokens[-1].span
            return Span(s.end_line, s.end_col, s.end_line, s.end_col)
        return Span(0, 0, 0, 0)

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def at_kind(self, kind: TokenKind) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind

    def advance(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self._eof_span())
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError(f"expected '{text}' but reached end of input", self._eof_span())
        if t.text != text:
            raise ParseError(f"expected '{text}' but found '{t.text}'", t.span)
        self.pos += 1
        return t

    def expect_ident(self, what: str) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError(f"expected {what} but reached end of input", self._eof_span())
        if t.kind != TokenKind.IDENT:
            raise ParseError(f"expected {what} but found '{t.text}'", t.span)
        self.pos += 1
        return t

    # ── declarations ─────────────────────────────────────────────

    def parse_program(self) -> Program:
        decls: list[Decl] = []
        while self.peek() is not None:
            t = self.peek()
            assert t is not None
            if t.text in ("method", "function"):
                try:
                    decls.append(self.parse_decl())
                except ParseError as err:
                    self.diagnostics.append(
                        Diagnostic("error", err.message, err.span, "syntax"))
                    self._recover()
            else:
                self.diagnostics.append(Diagnostic(
                    "error", f"expected a declaration but found '{t.text}'",
                    t.span, "syntax"))
                self._recover()
        return Program(self.text, tuple(decls), self.diagnostics)

    def _recover(self) -> None:
        # Skip to the next top-level declaration keyword, tracking brace
        # depth so keywords inside stray blocks are not mistaken for decls.
        depth = 0
        if self.peek() is not None and self.peek().text in ("method", "function"):
            self.pos += 1
        while (t := self.peek()) is not None:
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth = max(0, depth - 1)
            elif t.text in ("method", "function") and depth == 0:
                return
            self.pos += 1

    def parse_decl(self) -> Decl:
        t = self.advance()
        attrs = self.parse_attributes()
        name_tok = self.expect_ident("a declaration name")
        params = self.parse_param_list()
        if t.text == "function":
            self.expect(":")
            ret = self.parse_type()
            sig_end = self.tokens[self.pos - 1].span
            clauses = self.parse_spec_clauses(allowed=("decreases",))
            self.expect("{")
            body = self.parse_expr()
            close = self.expect("}")
            return FunctionDecl(
                name=name_tok.text, params=params, return_type=ret,
                decreases=clauses.get("decreases", ()), body=body,
                attributes=attrs,
                span=merge_spans(t.span, close.span),
                name_span=name_tok.span,
                sig_span=merge_spans(t.span, sig_end))
        outs: tuple[Param, ...] = ()
        if self.at("returns"):
            self.advance()
            outs = self.parse_param_list()
        sig_end = self.tokens[self.pos - 1].span
        clauses = self.parse_spec_clauses(allowed=("requires", "ensures", "decreases"))
        body = self.parse_block()
        return MethodDecl(
            name=name_tok.text, params=params, outs=outs,
            requires=clauses.get("requires", ()),
            ensures=clauses.get("ensures", ()),
            decreases=clauses.get("decreases", ()),
            body=body, attributes=attrs,
            span=merge_spans(t.span, body.span),
            name_span=name_tok.span,
            sig_span=merge_spans(t.span, sig_end))

    def parse_attributes(self) -> tuple[Attribute, ...]:
        attrs: list[Attribute] = []
        while self.at("{") and (nxt := self.peek(1)) is not None and nxt.text == ":":
            open_tok = self.advance()
            self.advance()  # ':'
            name_tok = self.expect_ident("an attribute name")
            value: int | None = None
            if self.at_kind(TokenKind.NUMBER):
                value = int(self.advance().text)
            close = self.expect("}")
            attrs.append(Attribute(name_tok.text, value,
                                   merge_spans(open_tok.span, close.span)))
        return tuple(attrs)

    def parse_param_list(self) -> tuple[Param, ...]:
        self.expect("(")
        params: list[Param] = []
        if not self.at(")"):
            while True:
                name_tok = self.expect_ident("a parameter name")
                self.expect(":")
                ty = self.parse_type()
                end = self.tokens[self.pos - 1].span
                params.append(Param(name_tok.text, ty,
                                    merge_spans(name_tok.span, end), name_tok.span))
                if self.at(","):
                    self.advance()
                else:
                    break
        self.expect(")")
        return tuple(params)

    def parse_type(self) -> Type:
        t = self.advance()
        if t.text == "int":
            return Type.INT
        if t.text == "bool":
            return Type.BOOL
        if t.text == "array":
            self.expect("<")
            self.expect("int")
            self.expect(">")
            return Type.ARRAY_INT
        raise ParseError(f"expected a type but found '{t.text}'", t.span)

    def parse_spec_clauses(self, allowed: tuple[str, ...]) -> dict[str, tuple[SpecClause, ...]]:
        out: dict[str, list[SpecClause]] = {}
        while (t := self.peek()) is not None and t.text in ("requires", "ensures", "decreases", "invariant"):
            if t.text not in allowed:
                raise ParseError(f"'{t.text}' clause is not allowed here", t.span)
            self.advance()
            if t.text == "decreases":
                exprs = [self.parse_expr()]
                while self.at(","):
                    self.advance()
                    exprs.append(self.parse_expr())
            else:
                exprs = [self.parse_expr()]
            span = merge_spans(t.span, _expr_span(exprs[-1]))
            out.setdefault(t.text, []).append(SpecClause(t.text, tuple(exprs), span))
        return {k: tuple(v) for k, v in out.items()}

    # ── statements ───────────────────────────────────────────────

    def parse_block(self) -> Block:
        open_tok = self.expect("{")
        stmts: list[Stmt] = []
        while not self.at("}"):
            if self.peek() is None:
                raise ParseError("unterminated block", self._eof_span())
            stmts.append(self.parse_stmt())
        close = self.expect("}")
        return Block(tuple(stmts), merge_spans(open_tok.span, close.span), close.span)

    def parse_stmt(self) -> Stmt:
        t = self.peek()
        assert t is not None
        if t.text == "var":
            self.advance()
            name_tok = self.expect_ident("a variable name")
            self.expect(":=")
            value = self.parse_expr()
            semi = self.expect(";")
            return VarDeclStmt(name_tok.text, value,
                               merge_spans(t.span, semi.span), name_tok.span)
        if t.text == "if":
            self.advance()
            cond = self.parse_expr()
            header = merge_spans(t.span, _expr_span(cond))
            then_block = self.parse_block()
            else_block = None
            end = then_block.span
            if self.at("else"):
                self.advance()
                else_block = self.parse_block()
                end = else_block.span
            return IfStmt(cond, then_block, else_block,
                          merge_spans(t.span, end), header)
        if t.text == "while":
            self.advance()
            cond = self.parse_expr()
            header = merge_spans(t.span, _expr_span(cond))
            clauses = self.parse_spec_clauses(allowed=("invariant", "decreases"))
            body = self.parse_block()
            return WhileStmt(cond, clauses.get("invariant", ()),
                             clauses.get("decreases", ()), body,
                             merge_spans(t.span, body.span), header)
        if t.text == "assert":
            self.advance()
            cond = self.parse_expr()
            semi = self.expect(";")
            return AssertStmt(cond, merge_spans(t.span, semi.span))
        if t.text == "assume":
            self.advance()
            cond = self.parse_expr()
            semi = self.expect(";")
            return AssumeStmt(cond, merge_spans(t.span, semi.span))
        if t.text == "return":
            self.advance()
            semi = self.expect(";")
            return ReturnStmt(merge_spans(t.span, semi.span))
        if t.kind == TokenKind.IDENT:
            return self._parse_ident_stmt()
        raise ParseError(f"expected a statement but found '{t.text}'", t.span)

    def _parse_ident_stmt(self) -> Stmt:
        first = self.expect_ident("a statement")
        nxt = self.peek()
        if nxt is not None and nxt.text == "(":
            args, close = self._parse_args()
            semi = self.expect(";")
            return CallStmt((), first.text, args,
                            merge_spans(first.span, semi.span), first.span)
        if nxt is not None and nxt.text == "[":
            self.advance()
            index = self.parse_expr()
            self.expect("]")
            self.expect(":=")
            value = self.parse_expr()
            semi = self.expect(";")
            return ArrayAssignStmt(first.text, index, value,
                                   merge_spans(first.span, semi.span), first.span)
        if nxt is not None and nxt.text == ",":
            targets = [first]
            while self.at(","):
                self.advance()
                targets.append(self.expect_ident("an assignment target"))
            self.expect(":=")
            callee = self.expect_ident("a method name")
            args, _ = self._parse_args()
            semi = self.expect(";")
            return CallStmt(tuple(t.text for t in targets), callee.text, args,
                            merge_spans(first.span, semi.span), callee.span,
                            tuple(t.span for t in targets))
        if nxt is not None and nxt.text == ":=":
            self.advance()
            value = self.parse_expr()
            semi = self.expect(";")
            return AssignStmt(first.text, value,
                              merge_spans(first.span, semi.span), first.span)
        bad = nxt.span if nxt is not None else self._eof_span()
        raise ParseError("expected ':=', '[', ',' or '(' after identifier", bad)

    def _parse_args(self) -> tuple[tuple[Expr, ...], Token]:
        self.expect("(")
        args: list[Expr] = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if self.at(","):
                    self.advance()
                else:
                    break
        close = self.expect(")")
        return tuple(args), close

    # ── expressions ──────────────────────────────────────────────

    def parse_expr(self) -> Expr:
        return self._parse_implies()

    def _parse_implies(self) -> Expr:
        left = self._parse_or()
        if self.at("==>"):
            self.advance()
            right = self._parse_implies()  # right-associative
            return BinaryOp("==>", left, right,
                            merge_spans(_expr_span(left), _expr_span(right)))
        return left

    def _parse_or(self) -> Expr:
        left = self._parse_and()
        while self.at("||"):
            self.advance()
            right = self._parse_and()
            left = BinaryOp("||", left, right,
                            merge_spans(_expr_span(left), _expr_span(right)))
        return left

    def _parse_and(self) -> Expr:
        left = self._parse_cmp()
        while self.at("&&"):
            self.advance()
            right = self._parse_cmp()
            left = BinaryOp("&&", left, right,
                            merge_spans(_expr_span(left), _expr_span(right)))
        return left

    def _parse_cmp(self) -> Expr:
        left = self._parse_add()
        t = self.peek()
        if t is not None and t.text in _COMPARISONS:
            self.advance()
            right = self._parse_add()
            nxt = self.peek()
            if nxt is not None and nxt.text in _COMPARISONS:
                raise ParseError(
                    "comparisons do not chain outside a forall range", nxt.span)
            return BinaryOp(t.text, left, right,
                            merge_spans(_expr_span(left), _expr_span(right)))
        return left

    def _parse_add(self) -> Expr:
        left = self._parse_mul()
        while (t := self.peek()) is not None and t.text in ("+", "-"):
            self.advance()
            right = self._parse_mul()
            left = BinaryOp(t.text, left, right,
                            merge_spans(_expr_span(left), _expr_span(right)))
        return left

    def _parse_mul(self) -> Expr:
        left = self._parse_unary()
        while (t := self.peek()) is not None and t.text in ("*", "/", "%"):
            self.advance()
            right = self._parse_unary()
            left = BinaryOp(t.text, left, right,
                            merge_spans(_expr_span(left), _expr_span(right)))
        return left

    def _parse_unary(self) -> Expr:
        t = self.peek()
        if t is not None and t.text in ("!", "-"):
            self.advance()
            operand = self._parse_unary()
            return UnaryOp(t.text, operand, merge_spans(t.span, _expr_span(operand)))
        return self._parse_postfix()

    def _parse_postfix(self) -> Expr:
        expr = self._parse_primary()
        while True:
            if self.at("["):
                self.advance()
                index = self.parse_expr()
                close = self.expect("]")
                expr = IndexExpr(expr, index, merge_spans(_expr_span(expr), close.span))
            elif self.at(".") and (nxt := self.peek(1)) is not None and nxt.text == "Length":
                self.advance()
                name_tok = self.advance()
                expr = LengthExpr(expr, merge_spans(_expr_span(expr), name_tok.span),
                                  name_tok.span)
            else:
                return expr

    def _parse_primary(self) -> Expr:
        t = self.peek()
        if t is None:
            raise ParseError("expected an expression but reached end of input",
                             self._eof_span())
        if t.kind == TokenKind.NUMBER:
            self.advance()
            return IntLit(int(t.text), t.span)
        if t.text in ("true", "false"):
            self.advance()
            return BoolLit(t.text == "true", t.span)
        if t.text == "old":
            self.advance()
            self.expect("(")
            operand = self.parse_expr()
            close = self.expect(")")
            return OldExpr(operand, merge_spans(t.span, close.span))
        if t.text == "forall":
            return self._parse_forall(t)
        if t.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if t.kind == TokenKind.IDENT:
            self.advance()
            if self.at("("):
                args, close = self._parse_args()
                return CallExpr(t.text, args, merge_spans(t.span, close.span), t.span)
            return VarRef(t.text, t.span)
        raise ParseError(f"expected an expression but found '{t.text}'", t.span)

    def _parse_forall(self, kw: Token) -> Expr:
        # forall v :: lo <= v < hi ==> body
        self.advance()
        var_tok = self.expect_ident("a bound variable")
        self.expect("::")
        lo = self._parse_add()
        self.expect("<=")
        mid = self.expect_ident("the bound variable")
        if mid.text != var_tok.text:
            raise ParseError(
                f"forall range must bound '{var_tok.text}', found '{mid.text}'",
                mid.span)
        self.expect("<")
        hi = self._parse_add()
        self.expect("==>")
        body = self.parse_expr()
        return ForallExpr(var_tok.text, lo, hi, body,
                          merge_spans(kw.span, _expr_span(body)), var_tok.span)


def _expr_span(expr: Expr) -> Span:
    return expr.span


def parse(text: str) -> Program:
    """Parse ``text`` into a Program; syntax errors become diagnostics."""
    return _Parser(text).parse_program()
