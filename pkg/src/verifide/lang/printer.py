"""Canonical pretty-printer: parse(pretty_print(parse(t))) == parse(t)."""

from __future__ import annotations

from .ast import (
    ArrayAssignStmt, AssertStmt, AssignStmt, AssumeStmt, BinaryOp, Block,
    BoolLit, CallExpr, CallStmt, Decl, Expr, ForallExpr, FunctionDecl,
    IfStmt, IndexExpr, IntLit, LengthExpr, MethodDecl, OldExpr, Program,
    ReturnStmt, SpecClause, Stmt, UnaryOp, VarDeclStmt, VarRef, WhileStmt,
)

# Binding strength, loosest first. Comparison operands are printed with
# parens around any comparison child, mirroring the no-chaining parse rule.
_PREC = {"==>": 1, "||": 2, "&&": 3,
         "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_RIGHT_ASSOC = {"==>"}


def print_expr(expr: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, UnaryOp):
        return f"{expr.op}{print_expr(expr.operand, 7)}"
    if isinstance(expr, BinaryOp):
        prec = _PREC[expr.op]
        if expr.op in _RIGHT_ASSOC:
            left = print_expr(expr.left, prec + 1)
            right = print_expr(expr.right, prec)
        else:
            left = print_expr(expr.left, prec)
            right = print_expr(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        need = prec < parent_prec or (prec == parent_prec and right_side != (expr.op in _RIGHT_ASSOC))
        # comparisons never nest without parens
        if prec == 4 and parent_prec == 4:
            need = True
        return f"({text})" if need else text
    if isinstance(expr, IndexExpr):
        return f"{print_expr(expr.base, 8)}[{print_expr(expr.index)}]"
    if isinstance(expr, LengthExpr):
        return f"{print_expr(expr.base, 8)}.Length"
    if isinstance(expr, CallExpr):
        return f"{expr.name}({', '.join(print_expr(a) for a in expr.args)})"
    if isinstance(expr, OldExpr):
        return f"old({print_expr(expr.operand)})"
    if isinstance(expr, ForallExpr):
        body = print_expr(expr.body)
        text = f"forall {expr.var} :: {print_expr(expr.lo, 5)} <= {expr.var} < {print_expr(expr.hi, 5)} ==> {body}"
        return f"({text})" if parent_prec > 0 else text
    raise TypeError(f"unknown expression node: {expr!r}")


def _print_clause(clause: SpecClause, indent: str) -> str:
    if clause.kind == "decreases":
        return f"{indent}decreases {', '.join(print_expr(e) for e in clause.exprs)}"
    return f"{indent}{clause.kind} {print_expr(clause.expr)}"


def _print_stmt(stmt: Stmt, indent: str) -> list[str]:
    if isinstance(stmt, VarDeclStmt):
        return [f"{indent}var {stmt.name} := {print_expr(stmt.value)};"]
    if isinstance(stmt, AssignStmt):
        return [f"{indent}{stmt.target} := {print_expr(stmt.value)};"]
    if isinstance(stmt, ArrayAssignStmt):
        return [f"{indent}{stmt.target}[{print_expr(stmt.index)}] := {print_expr(stmt.value)};"]
    if isinstance(stmt, CallStmt):
        call = f"{stmt.method}({', '.join(print_expr(a) for a in stmt.args)})"
        if stmt.targets:
            return [f"{indent}{', '.join(stmt.targets)} := {call};"]
        return [f"{indent}{call};"]
    if isinstance(stmt, AssertStmt):
        return [f"{indent}assert {print_expr(stmt.cond)};"]
    if isinstance(stmt, AssumeStmt):
        return [f"{indent}assume {print_expr(stmt.cond)};"]
    if isinstance(stmt, ReturnStmt):
        return [f"{indent}return;"]
    if isinstance(stmt, IfStmt):
        lines = [f"{indent}if {print_expr(stmt.cond)} {{"]
        lines += _print_block_body(stmt.then_block, indent + "  ")
        if stmt.else_block is not None:
            lines.append(f"{indent}}} else {{")
            lines += _print_block_body(stmt.else_block, indent + "  ")
        lines.append(f"{indent}}}")
        return lines
    if isinstance(stmt, WhileStmt):
        lines = [f"{indent}while {print_expr(stmt.cond)}"]
        for inv in stmt.invariants:
            lines.append(_print_clause(inv, indent + "  "))
        for dec in stmt.decreases:
            lines.append(_print_clause(dec, indent + "  "))
        lines.append(f"{indent}{{")
        lines += _print_block_body(stmt.body, indent + "  ")
        lines.append(f"{indent}}}")
        return lines
    raise TypeError(f"unknown statement node: {stmt!r}")


def _print_block_body(block: Block, indent: str) -> list[str]:
    lines: list[str] = []
    for stmt in block.stmts:
        lines += _print_stmt(stmt, indent)
    return lines


def _attrs_text(decl: Decl) -> str:
    parts = []
    for a in decl.attributes:
        parts.append(f"{{:{a.name} {a.value}}}" if a.value is not None else f"{{:{a.name}}}")
    return (" ".join(parts) + " ") if parts else ""


def print_decl(decl: Decl) -> str:
    params = ", ".join(f"{p.name}: {p.type}" for p in decl.params)
    if isinstance(decl, FunctionDecl):
        lines = [f"function {_attrs_text(decl)}{decl.name}({params}): {decl.return_type}"]
        for dec in decl.decreases:
            lines.append(_print_clause(dec, "  "))
        lines.append(f"{{ {print_expr(decl.body)} }}")
        return "\n".join(lines)
    assert isinstance(decl, MethodDecl)
    header = f"method {_attrs_text(decl)}{decl.name}({params})"
    if decl.outs:
        outs = ", ".join(f"{p.name}: {p.type}" for p in decl.outs)
        header += f" returns ({outs})"
    lines = [header]
    for c in decl.requires:
        lines.append(_print_clause(c, "  "))
    for c in decl.ensures:
        lines.append(_print_clause(c, "  "))
    for c in decl.decreases:
        lines.append(_print_clause(c, "  "))
    lines.append("{")
    lines += _print_block_body(decl.body, "  ")
    lines.append("}")
    return "\n".join(lines)


def pretty_print(program: Program) -> str:
    return "\n\n".join(print_decl(d) for d in program.decls) + "\n"
