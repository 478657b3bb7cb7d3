"""Python frontend: lowers stdlib ast nodes to the expression IR.

Coverage follows the supported subset: module imports, assignments, dict
literals, f-strings and + concatenation, os.environ/os.getenv reads, direct
and one-level-wrapped SDK method calls. Reflection (non-literal getattr)
lowers to a computed member, dynamic values to Unknown.
"""

from __future__ import annotations

import ast

from ..errors import ParseError
from ..model import Location, SourceUnit
from ..registry import (
    ECall,
    EConcat,
    EEnv,
    EIR,
    EMember,
    EName,
    EObject,
    EStr,
    EUnknown,
    RegistryBuilder,
)


def _loc(node: ast.AST) -> tuple[int, int]:
    return getattr(node, "lineno", 0), getattr(node, "col_offset", -1) + 1


def _span(unit: SourceUnit, node: ast.AST) -> tuple[int, int]:
    try:
        start = unit.line_index[node.lineno - 1] + node.col_offset
        end = unit.line_index[node.end_lineno - 1] + node.end_col_offset
        return (start, end)
    except (AttributeError, IndexError, TypeError):
        return (0, 0)


def _expr_children(node: ast.AST):
    """Direct expression children, descending through helper nodes such as
    comprehension clauses so nested calls are still walked."""
    for child in ast.iter_child_nodes(node):
        if isinstance(child, ast.expr):
            yield child
        else:
            yield from _expr_children(child)


def _is_env_read(node: ast.expr) -> str | None:
    """Return the env var name for os.environ[...]/os.environ.get/os.getenv."""
    if isinstance(node, ast.Subscript):
        target = node.value
        if (
            isinstance(target, ast.Attribute)
            and target.attr == "environ"
            and isinstance(target.value, ast.Name)
            and target.value.id == "os"
            and isinstance(node.slice, ast.Constant)
            and isinstance(node.slice.value, str)
        ):
            return node.slice.value
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Attribute):
        func = node.func
        if (
            func.attr == "get"
            and isinstance(func.value, ast.Attribute)
            and func.value.attr == "environ"
            and isinstance(func.value.value, ast.Name)
            and func.value.value.id == "os"
            and node.args
            and isinstance(node.args[0], ast.Constant)
            and isinstance(node.args[0].value, str)
        ):
            return node.args[0].value
        if (
            func.attr == "getenv"
            and isinstance(func.value, ast.Name)
            and func.value.id == "os"
            and node.args
            and isinstance(node.args[0], ast.Constant)
            and isinstance(node.args[0].value, str)
        ):
            return node.args[0].value
    return None


class _Lowerer:
    def __init__(self, unit: SourceUnit):
        self.unit = unit

    def lower(self, node: ast.expr) -> EIR:
        line, col = _loc(node)
        span = _span(self.unit, node)
        env = _is_env_read(node)
        if env is not None:
            return EEnv(line, col, span, name=env)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, str):
                return EStr(line, col, span, value=node.value)
            return EUnknown(line, col, span)
        if isinstance(node, ast.JoinedStr):
            parts: list[EIR] = []
            for piece in node.values:
                if isinstance(piece, ast.Constant) and isinstance(piece.value, str):
                    parts.append(EStr(*_loc(piece), _span(self.unit, piece), value=piece.value))
                elif isinstance(piece, ast.FormattedValue):
                    parts.append(self.lower(piece.value))
            return EConcat(line, col, span, parts=parts)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
            return EConcat(line, col, span, parts=[self.lower(node.left), self.lower(node.right)])
        if isinstance(node, ast.Name):
            return EName(line, col, span, id=node.id)
        if isinstance(node, ast.Attribute):
            member = EMember(line, col, span, base=self.lower(node.value), attr=node.attr)
            member.attr_line, member.attr_col = self._attr_pos(node)
            return member
        if isinstance(node, ast.Subscript):
            if isinstance(node.slice, ast.Constant) and isinstance(node.slice.value, str):
                member = EMember(line, col, span, base=self.lower(node.value), attr=node.slice.value)
                member.attr_line, member.attr_col = _loc(node.slice)
                return member
            return EMember(line, col, span, base=self.lower(node.value), attr=None)
        if isinstance(node, ast.Call):
            return self._lower_call(node, line, col, span)
        if isinstance(node, ast.Dict):
            props: dict[str, EIR] = {}
            dynamic = False
            for key, value in zip(node.keys, node.values):
                if isinstance(key, ast.Constant) and isinstance(key.value, str):
                    props[key.value] = self.lower(value)
                else:
                    dynamic = True
            return EObject(line, col, span, props=props, has_dynamic=dynamic)
        if isinstance(node, ast.Await):
            return self.lower(node.value)
        inner = [self.lower(child) for child in _expr_children(node)]
        return EUnknown(line, col, span, inner=inner)

    def _attr_pos(self, node: ast.Attribute) -> tuple[int, int]:
        """Locate the attribute token itself (the method-call token)."""
        base_end_line = getattr(node.value, "end_lineno", node.lineno)
        base_end_col = getattr(node.value, "end_col_offset", node.col_offset)
        text = self.unit.text
        try:
            offset = self.unit.line_index[base_end_line - 1] + base_end_col
            idx = text.index(node.attr, offset)
            loc = self.unit.location_of(idx)
            return loc.line, loc.column
        except (ValueError, IndexError):
            return node.lineno, node.col_offset + 1

    def _lower_call(self, node: ast.Call, line, col, span) -> EIR:
        # getattr(x, "lit") -> member; getattr(x, expr) -> computed member call
        if isinstance(node.func, ast.Name) and node.func.id == "getattr" and len(node.args) >= 2:
            base = self.lower(node.args[0])
            name_arg = node.args[1]
            if isinstance(name_arg, ast.Constant) and isinstance(name_arg.value, str):
                member = EMember(line, col, span, base=base, attr=name_arg.value)
                member.attr_line, member.attr_col = _loc(name_arg)
            else:
                member = EMember(line, col, span, base=base, attr=None)
            return member
        callee = self.lower(node.func)
        args = [self.lower(a) for a in node.args if not isinstance(a, ast.Starred)]
        kwargs = {kw.arg: self.lower(kw.value) for kw in node.keywords if kw.arg is not None}
        return ECall(line, col, span, callee=callee, args=args, kwargs=kwargs)


def walk(unit: SourceUnit, builder: RegistryBuilder):
    try:
        tree = ast.parse(unit.text)
    except SyntaxError as exc:
        raise ParseError(exc.msg or "invalid syntax", str(unit.path), exc.lineno or 0, exc.offset or 0)
    lower = _Lowerer(unit)
    for stmt in tree.body:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            builder.declare_function(
                stmt.name,
                tuple(a.arg for a in stmt.args.args),
                Location(*_loc(stmt)),
            )
    _walk_body(tree.body, unit, builder, lower)


def _walk_body(body, unit: SourceUnit, builder: RegistryBuilder, lower: _Lowerer):
    for stmt in body:
        builder.set_statement_span(_span(unit, stmt))
        if isinstance(stmt, ast.Import):
            for name in stmt.names:
                if name.asname:
                    builder.add_import(name.name, name.asname, "", Location(*_loc(stmt)))
                else:
                    root = name.name.split(".")[0]
                    builder.add_import(name.name, root, "", Location(*_loc(stmt)),
                                       bind_module=root)
        elif isinstance(stmt, ast.ImportFrom):
            if stmt.module is None:
                continue
            for name in stmt.names:
                alias = name.asname or name.name
                # `from pkg import sub` may bind a submodule; record the full
                # dotted path as the module so client patterns match either way
                builder.add_import(f"{stmt.module}.{name.name}", alias, "", Location(*_loc(stmt)))
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            builder.declare_function(
                stmt.name, tuple(a.arg for a in stmt.args.args), Location(*_loc(stmt))
            )
            builder.begin_function(stmt.name, tuple(a.arg for a in stmt.args.args))
            _walk_body(stmt.body, unit, builder, lower)
            builder.end_function()
        elif isinstance(stmt, ast.Assign):
            value = lower.lower(stmt.value)
            handled = False
            for target in stmt.targets:
                if isinstance(target, ast.Name):
                    builder.assign(target.id, value, Location(*_loc(stmt)))
                    handled = True
                elif isinstance(target, ast.Attribute) and isinstance(target.value, ast.Name):
                    builder.assign_prop(target.value.id, target.attr, value, Location(*_loc(stmt)))
                    handled = True
                elif (
                    isinstance(target, ast.Subscript)
                    and isinstance(target.value, ast.Name)
                    and isinstance(target.slice, ast.Constant)
                    and isinstance(target.slice.value, str)
                ):
                    builder.assign_prop(
                        target.value.id, target.slice.value, value, Location(*_loc(stmt))
                    )
                    handled = True
            if not handled:
                builder.expression(value)
        elif isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
            value = lower.lower(stmt.value)
            if isinstance(stmt.target, ast.Name):
                builder.assign(stmt.target.id, value, Location(*_loc(stmt)))
            else:
                builder.expression(value)
        elif isinstance(stmt, ast.AugAssign):
            builder.expression(lower.lower(stmt.value))
            if isinstance(stmt.target, ast.Name):
                builder.assign(stmt.target.id, EUnknown(*_loc(stmt), (0, 0)), Location(*_loc(stmt)))
        elif isinstance(stmt, ast.Expr):
            builder.expression(lower.lower(stmt.value))
        elif isinstance(stmt, ast.Return) and stmt.value is not None:
            builder.expression(lower.lower(stmt.value))
        elif isinstance(stmt, ast.If):
            builder.begin_block()
            _walk_body(stmt.body, unit, builder, lower)
            builder.end_block()
            if stmt.orelse:
                builder.begin_block()
                _walk_body(stmt.orelse, unit, builder, lower)
                builder.end_block()
            builder.expression(lower.lower(stmt.test))
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            builder.expression(lower.lower(stmt.iter))
            builder.begin_block()
            _walk_body(stmt.body, unit, builder, lower)
            builder.end_block()
        elif isinstance(stmt, ast.While):
            builder.expression(lower.lower(stmt.test))
            builder.begin_block()
            _walk_body(stmt.body, unit, builder, lower)
            builder.end_block()
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                builder.expression(lower.lower(item.context_expr))
            builder.begin_block()
            _walk_body(stmt.body, unit, builder, lower)
            builder.end_block()
        elif isinstance(stmt, ast.Try):
            builder.begin_block()
            _walk_body(stmt.body, unit, builder, lower)
            builder.end_block()
            for handler in stmt.handlers:
                builder.begin_block()
                _walk_body(handler.body, unit, builder, lower)
                builder.end_block()
            if stmt.finalbody:
                builder.begin_block()
                _walk_body(stmt.finalbody, unit, builder, lower)
                builder.end_block()
            if stmt.orelse:
                builder.begin_block()
                _walk_body(stmt.orelse, unit, builder, lower)
                builder.end_block()
        else:
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.expr):
                    builder.expression(lower.lower(child))
