"""Go frontend: tokenizer and subset parser lowering to the EIR.

Covers the supported subset: package/import declarations, := and var
assignments, selector call chains, composite struct literals as call
parameters, + concatenation, os.Getenv reads, simple fmt.Sprintf folding.
Control-flow bodies are walked (path union); unsupported constructs are
skipped after a call scan. Lexical errors and unbalanced braces raise
ParseError.
"""

from __future__ import annotations

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

_PUNCT = [
    ":=", "...", "==", "!=", "<=", ">=", "&&", "||", "<-", "++", "--", "+=",
    "-=", "*=", "/=", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "+",
    "-", "*", "/", "%", "<", ">", "=", "!", "&", "|", "^", "_",
]

_KEYWORDS = {
    "package", "import", "func", "var", "const", "type", "struct", "interface",
    "map", "chan", "if", "else", "for", "range", "switch", "case", "default",
    "break", "continue", "return", "defer", "go", "select", "fallthrough",
    "goto", "nil", "true", "false",
}


class Tok:
    __slots__ = ("kind", "value", "start", "end")

    def __init__(self, kind, value, start, end):
        self.kind = kind
        self.value = value
        self.start = start
        self.end = end

    def __repr__(self):
        return f"Tok({self.kind},{self.value!r})"


def tokenize(unit: SourceUnit, start: int = 0, end: int | None = None) -> list[Tok]:
    text = unit.text
    end = len(text) if end is None else end
    pos = start
    toks: list[Tok] = []

    def err(msg, at):
        loc = unit.location_of(at)
        raise ParseError(msg, str(unit.path), loc.line, loc.column)

    while pos < end:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        if text.startswith("//", pos):
            nl = text.find("\n", pos)
            pos = end if nl == -1 else nl + 1
            continue
        if text.startswith("/*", pos):
            close = text.find("*/", pos + 2)
            if close == -1:
                err("unterminated block comment", pos)
            pos = close + 2
            continue
        if ch == '"':
            p = pos + 1
            while p < end and text[p] != '"':
                if text[p] == "\\":
                    p += 1
                elif text[p] == "\n":
                    err("unterminated string literal", pos)
                p += 1
            if p >= end:
                err("unterminated string literal", pos)
            raw = text[pos + 1:p]
            toks.append(Tok("str", _unescape(raw), pos, p + 1))
            pos = p + 1
            continue
        if ch == "`":
            close = text.find("`", pos + 1)
            if close == -1:
                err("unterminated raw string literal", pos)
            toks.append(Tok("str", text[pos + 1:close], pos, close + 1))
            pos = close + 1
            continue
        if ch == "'":
            p = pos + 1
            while p < end and text[p] != "'":
                if text[p] == "\\":
                    p += 1
                p += 1
            if p >= end:
                err("unterminated rune literal", pos)
            toks.append(Tok("num", text[pos:p + 1], pos, p + 1))
            pos = p + 1
            continue
        if ch.isdigit():
            p = pos + 1
            while p < end and (text[p].isalnum() or text[p] == "."):
                p += 1
            toks.append(Tok("num", text[pos:p], pos, p))
            pos = p
            continue
        if ch.isalpha() or ch == "_":
            p = pos + 1
            while p < end and (text[p].isalnum() or text[p] == "_"):
                p += 1
            word = text[pos:p]
            if word == "_":
                toks.append(Tok("punct", "_", pos, p))
            else:
                toks.append(Tok("id", word, pos, p))
            pos = p
            continue
        for punct in _PUNCT:
            if text.startswith(punct, pos):
                toks.append(Tok("punct", punct, pos, pos + len(punct)))
                pos += len(punct)
                break
        else:
            err(f"unexpected character {ch!r}", pos)
    toks.append(Tok("eof", None, end, end))
    return toks


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        c = raw[i]
        if c == "\\" and i + 1 < len(raw):
            nxt = raw[i + 1]
            out.append({"n": "\n", "t": "\t", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


class _Recover(Exception):
    pass


class Parser:
    def __init__(self, unit: SourceUnit, builder: RegistryBuilder,
                 toks: list[Tok], lo: int = 0, hi: int | None = None):
        self.unit = unit
        self.b = builder
        self.toks = toks
        self.i = lo
        self.hi = hi if hi is not None else len(toks) - 1  # exclusive of eof

    # -- token helpers ---------------------------------------------------------

    def peek(self, offset=0) -> Tok:
        j = self.i + offset
        if j >= self.hi:
            return self.toks[-1]  # eof
        return self.toks[j]

    def next(self) -> Tok:
        t = self.peek()
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, value) -> bool:
        t = self.peek()
        return (t.kind == "punct" and t.value == value) or (t.kind == "id" and t.value == value)

    def eat(self, value) -> bool:
        if self.at(value):
            self.next()
            return True
        return False

    def expect(self, value):
        if not self.eat(value):
            raise _Recover()

    def _pos(self, tok: Tok) -> tuple[int, int]:
        loc = self.unit.location_of(tok.start)
        return loc.line, loc.column

    # -- top level ---------------------------------------------------------------

    def parse_file(self):
        self._predeclare()
        while self.peek().kind != "eof":
            t = self.peek()
            before = self.i
            try:
                if t.kind == "id" and t.value == "package":
                    self.next()
                    self.next()
                elif t.kind == "id" and t.value == "import":
                    self._imports()
                elif t.kind == "id" and t.value == "func":
                    self._func_decl()
                elif t.kind == "id" and t.value in ("var", "const"):
                    self._var_decl()
                elif t.kind == "id" and t.value == "type":
                    self._skip_decl()
                else:
                    self.statement()
            except _Recover:
                self.i = max(self.i, before)
                self._skip_statement()
                if self.i == before:
                    self.next()

    def _predeclare(self):
        j = 0
        hi = len(self.toks) - 1
        while j < hi:
            t = self.toks[j]
            if t.kind == "id" and t.value == "func" and j + 1 < hi:
                k = j + 1
                if self.toks[k].kind == "punct" and self.toks[k].value == "(":
                    close = self._match(k, "(", ")")
                    k = close + 1 if close is not None else k
                if k < hi and self.toks[k].kind == "id":
                    name = self.toks[k].value
                    params = self._param_names(k + 1)
                    self.b.declare_function(name, params, self.unit.location_of(t.start))
            j += 1

    def _param_names(self, j) -> tuple[str, ...]:
        if j >= len(self.toks) or not (self.toks[j].kind == "punct" and self.toks[j].value == "("):
            return ()
        close = self._match(j, "(", ")")
        if close is None:
            return ()
        names: list[str] = []
        group: list[str] = []
        k = j + 1
        while k < close:
            t = self.toks[k]
            if t.kind == "id" and t.value not in _KEYWORDS:
                nxt = self.toks[k + 1]
                if nxt.kind == "punct" and nxt.value == ",":
                    group.append(t.value)
                    k += 2
                    continue
                if nxt.kind == "punct" and nxt.value == ")":
                    break
                # identifier followed by a type expression
                group.append(t.value)
                names.extend(group)
                group = []
                depth = 0
                k += 1
                while k < close:
                    tt = self.toks[k]
                    if tt.kind == "punct" and tt.value in "([{":
                        depth += 1
                    elif tt.kind == "punct" and tt.value in ")]}":
                        depth -= 1
                    elif tt.kind == "punct" and tt.value == "," and depth == 0:
                        k += 1
                        break
                    k += 1
                continue
            k += 1
        return tuple(names)

    def _match(self, j, open_p, close_p) -> int | None:
        if not (self.toks[j].kind == "punct" and self.toks[j].value == open_p):
            return None
        depth = 0
        for k in range(j, len(self.toks)):
            t = self.toks[k]
            if t.kind == "punct" and t.value in "([{":
                depth += 1
            elif t.kind == "punct" and t.value in ")]}":
                depth -= 1
                if depth == 0:
                    return k
        return None

    def _imports(self):
        tok = self.next()  # import
        loc = Location(*self._pos(tok))
        if self.eat("("):
            while not self.at(")") and self.peek().kind != "eof":
                self._one_import(loc)
                self.eat(";")
            self.expect(")")
        else:
            self._one_import(loc)

    def _one_import(self, loc: Location):
        alias = None
        t = self.peek()
        if t.kind == "id":
            alias = self.next().value
        elif t.kind == "punct" and t.value == "_":
            self.next()
            alias = "_"
        mod_tok = self.next()
        if mod_tok.kind != "str":
            raise _Recover()
        module = mod_tok.value
        if alias is None:
            alias = module.rstrip("/").split("/")[-1]
        self.b.add_import(module, alias, "", Location(*self._pos(mod_tok)))

    def _func_decl(self):
        self.next()  # func
        if self.at("("):
            close = self._match(self.i, "(", ")")
            if close is None:
                raise _Recover()
            self.i = close + 1  # skip method receiver
        name = ""
        if self.peek().kind == "id":
            name = self.next().value
        params = self._param_names(self.i)
        if self.at("("):
            close = self._match(self.i, "(", ")")
            self.i = close + 1 if close is not None else self.i
        # skip return types up to the body brace
        while not self.at("{") and self.peek().kind != "eof":
            if self.at("("):
                close = self._match(self.i, "(", ")")
                if close is None:
                    raise _Recover()
                self.i = close + 1
            else:
                self.next()
        self.b.declare_function(name, params, self.unit.location_of(self.peek().start))
        self.b.begin_function(name, params)
        self._block()
        self.b.end_function()

    def _var_decl(self):
        self.next()  # var | const
        if self.eat("("):
            while not self.at(")") and self.peek().kind != "eof":
                self._one_var()
                self.eat(";")
            self.expect(")")
            return
        self._one_var()

    def _one_var(self):
        t = self.peek()
        if t.kind != "id":
            raise _Recover()
        name = self.next().value
        # optional type tokens until '=' or end of line
        line = self.unit.location_of(t.start).line
        while not self.at("=") and self.peek().kind != "eof":
            nt = self.peek()
            if self.unit.location_of(nt.start).line != line or \
                    (nt.kind == "punct" and nt.value in (")", ";")):
                return  # declaration without initializer
            self.next()
        if self.eat("="):
            value = self.expression()
            self.b.assign(name, value, Location(*self._pos(t)))

    def _skip_decl(self):
        depth = 0
        line = self.unit.location_of(self.peek().start).line
        while self.peek().kind != "eof":
            t = self.peek()
            if t.kind == "punct" and t.value in "([{":
                depth += 1
            elif t.kind == "punct" and t.value in ")]}":
                depth -= 1
            elif depth == 0 and self.unit.location_of(t.start).line != line:
                return
            self.next()

    # -- statements -----------------------------------------------------------------

    def _block(self):
        self.expect("{")
        while not self.at("}") and self.peek().kind != "eof":
            self.statement()
        self.expect("}")

    def _nested_block(self):
        self.b.begin_block()
        self._block()
        self.b.end_block()

    def statement(self):
        t = self.peek()
        before = self.i
        try:
            self._statement_inner(t)
        except _Recover:
            self.i = max(self.i, before)
            self._skip_statement()
            if self.i == before and not self.at("}") and self.peek().kind != "eof":
                self.next()
        self.eat(";")

    def _statement_inner(self, t: Tok):
        self.b.set_statement_span(self._stmt_span(t))
        if t.kind == "eof":
            return
        if t.kind == "id" and t.value in ("var", "const"):
            self._var_decl()
            return
        if t.kind == "id" and t.value == "func":
            self._func_decl()
            return
        if t.kind == "id" and t.value == "if":
            self._if_statement()
            return
        if t.kind == "id" and t.value == "for":
            self._for_statement()
            return
        if t.kind == "id" and t.value in ("switch", "select"):
            self._switch_statement()
            return
        if t.kind == "id" and t.value == "return":
            self.next()
            line = self.unit.location_of(t.start).line
            if self.peek().kind != "eof" and not self.at("}") and \
                    self.unit.location_of(self.peek().start).line == line:
                self.b.expression(self.expression())
                while self.eat(","):
                    self.b.expression(self.expression())
            return
        if t.kind == "id" and t.value in ("defer", "go"):
            self.next()
            self.b.expression(self.expression())
            return
        if t.kind == "id" and t.value in ("break", "continue", "fallthrough"):
            self.next()
            return
        if t.kind == "punct" and t.value == "{":
            self._nested_block()
            return
        self._simple_statement()

    def _stmt_span(self, t: Tok) -> tuple[int, int]:
        nl = self.unit.text.find("\n", t.start)
        return (t.start, len(self.unit.text) if nl == -1 else nl)

    def _skip_statement(self):
        depth = 0
        line = self.unit.location_of(self.peek().start).line if self.peek().kind != "eof" else 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                return
            if depth == 0 and self.unit.location_of(t.start).line != line:
                return
            if t.kind == "punct" and t.value in "([{":
                depth += 1
            elif t.kind == "punct" and t.value in ")]}":
                if depth == 0:
                    return
                depth -= 1
            elif depth == 0 and t.kind == "punct" and t.value == ";":
                return
            self.next()

    def _simple_statement(self):
        """Assignments (:=, =, multi-target) and expression statements."""
        start = self.i
        targets = self._try_targets()
        if targets is not None:
            op_tok = self.next()  # := or =
            values = [self.expression()]
            while self.eat(","):
                values.append(self.expression())
            loc = Location(*self._pos(self.toks[start]))
            if len(values) == len(targets):
                pairs = zip(targets, values)
            elif len(values) == 1:
                # multi-return call: the first target carries the value
                pairs = [(targets[0], values[0])] + [(t, None) for t in targets[1:]]
            else:
                for v in values:
                    self.b.expression(v)
                pairs = ((tg, None) for tg in targets)
            for target, value in pairs:
                if target is None:
                    if value is not None:
                        self.b.expression(value)
                    continue
                kind, payload = target
                if value is None:
                    value = EUnknown(loc.line, loc.column, (0, 0))
                if kind == "name":
                    self.b.assign(payload, value, loc)
                else:
                    base, prop = payload
                    self.b.assign_prop(base, prop, value, loc)
            return
        self.i = start
        self.b.expression(self.expression())

    def _try_targets(self):
        """Look ahead for `x, y := expr` / `x = expr` / `x.f = expr` forms."""
        save = self.i
        targets = []
        while True:
            t = self.peek()
            if t.kind == "punct" and t.value == "_":
                self.next()
                targets.append(None)
            elif t.kind == "id" and t.value not in _KEYWORDS:
                name = self.next().value
                if self.at(".") and self.peek(1).kind == "id" and \
                        self.peek(2).kind == "punct" and self.peek(2).value in ("=",):
                    self.next()
                    prop = self.next().value
                    targets.append(("prop", (name, prop)))
                else:
                    targets.append(("name", name))
            else:
                self.i = save
                return None
            if self.eat(","):
                continue
            if self.peek().kind == "punct" and self.peek().value in (":=", "="):
                return targets
            self.i = save
            return None

    def _header_region(self) -> int:
        """Index of the body '{' for a control statement header."""
        depth = 0
        j = self.i
        while j < self.hi:
            t = self.toks[j]
            if t.kind == "punct" and t.value in "([":
                depth += 1
            elif t.kind == "punct" and t.value in ")]":
                depth -= 1
            elif t.kind == "punct" and t.value == "{" and depth == 0:
                return j
            j += 1
        raise _Recover()

    def _walk_header(self, lo: int, hi: int):
        """Parse `init; cond` header parts inside [lo, hi) token range."""
        sub = Parser(self.unit, self.b, self.toks, lo, hi)
        while sub.peek().kind != "eof" and sub.i < hi:
            before = sub.i
            try:
                sub._simple_statement()
            except _Recover:
                sub.i = before + 1
            if not (sub.eat(";") or sub.eat(",")):
                if sub.i == before:
                    sub.i += 1

    def _if_statement(self):
        self.next()  # if
        body = self._header_region()
        self._walk_header(self.i, body)
        self.i = body
        self._nested_block()
        if self.eat("else"):
            if self.at("if"):
                self._if_statement()
            else:
                self._nested_block()

    def _for_statement(self):
        self.next()
        body = self._header_region()
        # `for i := 0; ...` / `for _, x := range xs` / bare `for {`
        lo = self.i
        self.i = body
        # walk range expressions for calls
        sub = Parser(self.unit, self.b, self.toks, lo, body)
        while sub.peek().kind != "eof" and sub.i < body:
            t = sub.peek()
            if t.kind == "id" and t.value == "range":
                sub.next()
                try:
                    self.b.expression(sub.expression())
                except _Recover:
                    sub.next()
            elif t.kind == "punct" and t.value in (";", ",", ":=", "=", "_"):
                sub.next()
            else:
                before = sub.i
                try:
                    sub.b.expression(sub.expression())
                except _Recover:
                    pass
                if sub.i == before:
                    sub.next()
        self._nested_block()

    def _switch_statement(self):
        self.next()
        body = self._header_region()
        self._walk_header(self.i, body)
        self.i = body
        self.expect("{")
        self.b.begin_block()
        while not self.at("}") and self.peek().kind != "eof":
            if self.eat("case"):
                try:
                    self.b.expression(self.expression())
                except _Recover:
                    pass
                while self.eat(","):
                    self.b.expression(self.expression())
                self.eat(":")
            elif self.eat("default"):
                self.eat(":")
            else:
                self.statement()
        self.expect("}")
        self.b.end_block()

    # -- expressions --------------------------------------------------------------

    def expression(self, allow_composite: bool = True) -> EIR:
        parts = [self._unary(allow_composite)]
        ops = []
        while True:
            t = self.peek()
            if t.kind == "punct" and t.value in ("+", "-", "*", "/", "%", "==",
                                                 "!=", "<", ">", "<=", ">=",
                                                 "&&", "||", "&", "|", "^"):
                ops.append(t.value)
                self.next()
                parts.append(self._unary(allow_composite))
            else:
                break
        if not ops:
            return parts[0]
        first = parts[0]
        if all(op == "+" for op in ops):
            return EConcat(first.line, first.col,
                           (first.span[0], parts[-1].span[1]), parts=parts)
        return EUnknown(first.line, first.col,
                        (first.span[0], parts[-1].span[1]), inner=parts)

    def _unary(self, allow_composite: bool) -> EIR:
        t = self.peek()
        if t.kind == "punct" and t.value in ("&", "*", "!", "-", "+", "<-"):
            self.next()
            return self._unary(allow_composite)
        return self._postfix(allow_composite)

    def _postfix(self, allow_composite: bool) -> EIR:
        e = self._primary(allow_composite)
        while True:
            t = self.peek()
            if t.kind == "punct" and t.value == ".":
                nxt = self.peek(1)
                if nxt.kind == "punct" and nxt.value == "(":
                    # type assertion x.(T)
                    self.next()
                    close = self._match(self.i, "(", ")")
                    if close is None:
                        raise _Recover()
                    self.i = close + 1
                    continue
                self.next()
                name_tok = self.next()
                if name_tok.kind != "id":
                    raise _Recover()
                line, col = self._pos(name_tok)
                member = EMember(line, col, (e.span[0], name_tok.end),
                                 base=e, attr=name_tok.value)
                member.attr_line, member.attr_col = line, col
                e = member
            elif t.kind == "punct" and t.value == "(":
                args = self._arguments()
                end = self.toks[self.i - 1].end
                e = self._lower_call(e, args, end)
            elif t.kind == "punct" and t.value == "[":
                close = self._match(self.i, "[", "]")
                if close is None:
                    raise _Recover()
                self.next()
                if not self.at("]"):
                    save = self.i
                    index = None
                    try:
                        index = self.expression()
                    except _Recover:
                        self.i = save
                    if isinstance(index, EStr) and self.at("]"):
                        e = EMember(e.line, e.col, (e.span[0], index.span[1]),
                                    base=e, attr=index.value)
                    else:
                        # computed index or slice expression
                        e = EMember(e.line, e.col, e.span, base=e, attr=None)
                self.i = close
                self.expect("]")
            elif t.kind == "punct" and t.value == "{" and allow_composite and \
                    isinstance(e, (EName, EMember)):
                obj = self._composite_literal()
                obj.line, obj.col = e.line, e.col
                obj.span = (e.span[0], obj.span[1])
                e = obj
            else:
                return e

    def _lower_call(self, callee: EIR, args: list[EIR], end: int) -> EIR:
        from ..registry import path_text

        path = path_text(callee)
        if path == "os.Getenv" and args and isinstance(args[0], EStr):
            return EEnv(callee.line, callee.col, (callee.span[0], end), name=args[0].value)
        if path == "fmt.Sprintf" and args and isinstance(args[0], EStr):
            folded = _fold_sprintf(args[0], args[1:], callee, end)
            if folded is not None:
                return folded
        return ECall(callee.line, callee.col, (callee.span[0], end),
                     callee=callee, args=args)

    def _arguments(self) -> list[EIR]:
        self.expect("(")
        args: list[EIR] = []
        while not self.at(")") and self.peek().kind != "eof":
            args.append(self.expression())
            self.eat("...")
            if not self.eat(","):
                break
        self.expect(")")
        return args

    def _composite_map_literal(self) -> EUnknown:
        """Skip a brace-balanced map literal body, walking nothing."""
        t = self.peek()
        depth = 0
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.kind == "punct" and tok.value in "([{":
                depth += 1
            elif tok.kind == "punct" and tok.value in ")]}":
                depth -= 1
                if depth == 0:
                    return EUnknown(*self._pos(t), (t.start, tok.end))
        raise _Recover()

    def _composite_literal(self) -> EObject:
        t = self.next()  # {
        line, col = self._pos(t)
        props: dict[str, EIR] = {}
        dynamic = False
        while not self.at("}") and self.peek().kind != "eof":
            key_tok = self.peek()
            if key_tok.kind == "id" and self.peek(1).kind == "punct" and \
                    self.peek(1).value == ":":
                self.next()
                self.next()
                props[key_tok.value] = self.expression()
            else:
                dynamic = True
                try:
                    self.b.expression(self.expression())
                except _Recover:
                    self.next()
            if not self.eat(","):
                break
        self.expect("}")
        return EObject(line, col, (t.start, self.toks[self.i - 1].end),
                       props=props, has_dynamic=dynamic)

    def _primary(self, allow_composite: bool) -> EIR:
        t = self.peek()
        line, col = self._pos(t)
        if t.kind == "str":
            self.next()
            return EStr(line, col, (t.start, t.end), value=t.value)
        if t.kind == "num":
            self.next()
            return EUnknown(line, col, (t.start, t.end))
        if t.kind == "id" and t.value == "func":
            # function literal
            self.next()
            params = self._param_names(self.i)
            if self.at("("):
                close = self._match(self.i, "(", ")")
                self.i = close + 1 if close is not None else self.i
            while not self.at("{") and self.peek().kind != "eof":
                self.next()
            self.b.begin_function("", params)
            self._block()
            self.b.end_function()
            return EUnknown(line, col, (t.start, self.toks[self.i - 1].end))
        if t.kind == "id" and t.value in ("nil", "true", "false"):
            self.next()
            return EUnknown(line, col, (t.start, t.end))
        if t.kind == "id" and t.value == "map":
            # map[K]V{...} literal: type tokens then a composite body
            self.next()
            if self.at("["):
                close = self._match(self.i, "[", "]")
                if close is None:
                    raise _Recover()
                self.i = close + 1
            while not self.at("{") and self.peek().kind != "eof":
                if self.at("["):
                    close = self._match(self.i, "[", "]")
                    if close is None:
                        raise _Recover()
                    self.i = close + 1
                else:
                    self.next()
            if self.at("{"):
                obj = self._composite_map_literal()
                return EUnknown(line, col, (t.start, obj.span[1]), inner=obj.inner)
            raise _Recover()
        if t.kind == "id" and t.value in ("struct", "chan", "interface"):
            raise _Recover()
        if t.kind == "id" and t.value not in _KEYWORDS:
            self.next()
            return EName(line, col, (t.start, t.end), id=t.value)
        if t.kind == "punct" and t.value == "(":
            self.next()
            e = self.expression()
            self.expect(")")
            return e
        if t.kind == "punct" and t.value == "[":
            # slice literal []T{...}
            close = self._match(self.i, "[", "]")
            if close is None:
                raise _Recover()
            self.i = close + 1
            while self.peek().kind == "id" or (self.peek().kind == "punct" and
                                               self.peek().value in (".", "*")):
                self.next()
            if self.at("{"):
                obj = self._composite_literal()
                return EUnknown(line, col, obj.span, inner=list(obj.props.values()))
            return EUnknown(line, col, (t.start, t.end))
        raise _Recover()


def _fold_sprintf(fmt: EStr, args: list[EIR], callee: EIR, end: int) -> EIR | None:
    """Fold fmt.Sprintf with only %s/%v/%d verbs into a concatenation."""
    parts: list[EIR] = []
    buf = []
    arg_iter = iter(args)
    i = 0
    template = fmt.value
    while i < len(template):
        c = template[i]
        if c == "%" and i + 1 < len(template):
            verb = template[i + 1]
            if verb == "%":
                buf.append("%")
                i += 2
                continue
            if verb not in "svd":
                return None
            if buf:
                parts.append(EStr(fmt.line, fmt.col, fmt.span, value="".join(buf)))
                buf = []
            try:
                parts.append(next(arg_iter))
            except StopIteration:
                return None
            i += 2
            continue
        buf.append(c)
        i += 1
    if buf:
        parts.append(EStr(fmt.line, fmt.col, fmt.span, value="".join(buf)))
    if len(parts) == 1:
        return parts[0]
    return EConcat(callee.line, callee.col, (callee.span[0], end), parts=parts)


def check_brackets(unit: SourceUnit, toks: list[Tok]):
    stack: list[Tok] = []
    pairs = {")": "(", "]": "[", "}": "{"}
    for t in toks:
        if t.kind == "punct" and t.value in "([{":
            stack.append(t)
        elif t.kind == "punct" and t.value in ")]}":
            if not stack or stack[-1].value != pairs[t.value]:
                loc = unit.location_of(t.start)
                raise ParseError(f"unbalanced {t.value!r}", str(unit.path), loc.line, loc.column)
            stack.pop()
    if stack:
        loc = unit.location_of(stack[-1].start)
        raise ParseError(f"unclosed {stack[-1].value!r}", str(unit.path), loc.line, loc.column)


def walk(unit: SourceUnit, builder: RegistryBuilder):
    toks = tokenize(unit)
    check_brackets(unit, toks)
    Parser(unit, builder, toks).parse_file()
