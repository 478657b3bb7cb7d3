"""JavaScript frontend: tokenizer and subset parser lowering to the EIR.

Covers the supported subset: require/import bindings, const/let/var
declarations, function and arrow-function definitions, object literals,
template literals and + concatenation, process.env reads, member/call
chains. Statements outside the subset are scanned for call expressions and
otherwise skipped; lexical errors and unbalanced braces raise ParseError.
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
    "=>", "...", "===", "!==", "==", "!=", "<=", ">=", "&&", "||", "??", "?.",
    "++", "--", "+=", "-=", "*=", "/=", "%=", "**", "(", ")", "[", "]", "{", "}",
    ",", ";", ":", ".", "?", "+", "-", "*", "/", "%", "<", ">", "=", "!", "&",
    "|", "^", "~",
]

_KEYWORDS = {
    "const", "let", "var", "function", "return", "if", "else", "for", "while",
    "do", "switch", "case", "default", "break", "continue", "try", "catch",
    "finally", "throw", "new", "await", "async", "typeof", "delete", "void",
    "in", "of", "instanceof", "import", "export", "from", "class", "null",
    "true", "false", "undefined",
}

# tokens a regex literal may follow (otherwise "/" is division)
_REGEX_PREV = {"(", "[", "{", ",", ";", ":", "=", "=>", "return", "&&", "||",
               "!", "?", "+", "-", "*", "/", "%", "==", "===", "!=", "!==",
               "case", "typeof", "in", "of", "instanceof", None}


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

    prev_significant = None
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
            if close == -1 or close + 2 > end:
                err("unterminated block comment", pos)
            pos = close + 2
            continue
        if ch in "'\"":
            p = pos + 1
            while p < end and text[p] != ch:
                if text[p] == "\\":
                    p += 1
                elif text[p] == "\n":
                    err("unterminated string literal", pos)
                p += 1
            if p >= end:
                err("unterminated string literal", pos)
            raw = text[pos + 1:p]
            toks.append(Tok("str", _unescape(raw), pos, p + 1))
            prev_significant = "str"
            pos = p + 1
            continue
        if ch == "`":
            pieces, p = _scan_template(text, pos, end, err)
            toks.append(Tok("template", pieces, pos, p))
            prev_significant = "str"
            pos = p
            continue
        if ch == "/" and prev_significant in _REGEX_PREV:
            p = pos + 1
            in_class = False
            while p < end:
                c = text[p]
                if c == "\\":
                    p += 2
                    continue
                if c == "[":
                    in_class = True
                elif c == "]":
                    in_class = False
                elif c == "/" and not in_class:
                    break
                elif c == "\n":
                    err("unterminated regex literal", pos)
                p += 1
            if p >= end:
                err("unterminated regex literal", pos)
            p += 1
            while p < end and text[p].isalpha():
                p += 1
            toks.append(Tok("regex", text[pos:p], pos, p))
            prev_significant = "str"
            pos = p
            continue
        if ch.isdigit():
            p = pos + 1
            while p < end and (text[p].isalnum() or text[p] == "."):
                p += 1
            toks.append(Tok("num", text[pos:p], pos, p))
            prev_significant = "num"
            pos = p
            continue
        if ch.isalpha() or ch in "_$":
            p = pos + 1
            while p < end and (text[p].isalnum() or text[p] in "_$"):
                p += 1
            word = text[pos:p]
            toks.append(Tok("id", word, pos, p))
            prev_significant = word if word in _KEYWORDS else "id"
            pos = p
            continue
        for punct in _PUNCT:
            if text.startswith(punct, pos):
                toks.append(Tok("punct", punct, pos, pos + len(punct)))
                prev_significant = punct
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


def _scan_template(text, pos, end, err):
    """Scan a template literal into (kind, payload) pieces."""
    pieces = []
    p = pos + 1
    buf = []
    while p < end:
        c = text[p]
        if c == "\\" and p + 1 < end:
            buf.append({"n": "\n", "t": "\t"}.get(text[p + 1], text[p + 1]))
            p += 2
            continue
        if c == "`":
            if buf:
                pieces.append(("str", "".join(buf)))
            return pieces, p + 1
        if text.startswith("${", p):
            if buf:
                pieces.append(("str", "".join(buf)))
                buf = []
            depth = 1
            q = p + 2
            while q < end and depth:
                if text[q] == "{":
                    depth += 1
                elif text[q] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                elif text[q] in "'\"":
                    quote = text[q]
                    q += 1
                    while q < end and text[q] != quote:
                        q += 2 if text[q] == "\\" else 1
                q += 1
            if depth:
                err("unterminated template expression", p)
            pieces.append(("expr", (p + 2, q)))
            p = q + 1
            continue
        buf.append(c)
        p += 1
    err("unterminated template literal", pos)


class _Recover(Exception):
    """Internal: statement outside the subset; skip to a safe point."""


class Parser:
    def __init__(self, unit: SourceUnit, builder: RegistryBuilder,
                 toks: list[Tok] | None = None):
        self.unit = unit
        self.b = builder
        self.toks = toks if toks is not None else tokenize(unit)
        self.i = 0

    # -- token helpers ---------------------------------------------------

    def peek(self, offset=0) -> Tok:
        j = min(self.i + offset, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Tok:
        t = self.toks[self.i]
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

    # -- program ------------------------------------------------------------

    def parse_program(self):
        self._predeclare()
        while self.peek().kind != "eof":
            self.statement()

    def _predeclare(self):
        """Pre-scan for function definitions so forward helper calls bind."""
        hi = len(self.toks) - 1
        j = 0
        while j < hi:
            t = self.toks[j]
            if t.kind == "id" and t.value == "function" and j + 1 < hi:
                name_tok = self.toks[j + 1]
                if name_tok.kind == "id" and name_tok.value not in _KEYWORDS:
                    self.b.declare_function(name_tok.value, self._scan_params(j + 2),
                                            self.unit.location_of(t.start))
            if (
                t.kind == "id" and t.value in ("const", "let", "var")
                and j + 3 < hi
                and self.toks[j + 1].kind == "id"
                and self.toks[j + 2].kind == "punct" and self.toks[j + 2].value == "="
            ):
                k = j + 3
                if self.toks[k].kind == "id" and self.toks[k].value == "async":
                    k += 1
                if self.toks[k].kind == "id" and self.toks[k].value == "function":
                    self.b.declare_function(self.toks[j + 1].value, self._scan_params(k + 1),
                                            self.unit.location_of(t.start))
                elif self.toks[k].kind == "punct" and self.toks[k].value == "(":
                    close = self._match_paren(k)
                    if close is not None and close + 1 < len(self.toks) and \
                            self.toks[close + 1].kind == "punct" and \
                            self.toks[close + 1].value == "=>":
                        self.b.declare_function(self.toks[j + 1].value, self._scan_params(k),
                                                self.unit.location_of(t.start))
                elif self.toks[k].kind == "id" and k + 1 < len(self.toks) and \
                        self.toks[k + 1].kind == "punct" and self.toks[k + 1].value == "=>":
                    self.b.declare_function(self.toks[j + 1].value, (self.toks[k].value,),
                                            self.unit.location_of(t.start))
            j += 1

    def _scan_params(self, j) -> tuple[str, ...]:
        while j < len(self.toks) and not (self.toks[j].kind == "punct" and self.toks[j].value == "("):
            if self.toks[j].kind == "eof":
                return ()
            j += 1
        close = self._match_paren(j)
        if close is None:
            return ()
        return tuple(t.value for t in self.toks[j + 1:close]
                     if t.kind == "id" and t.value not in _KEYWORDS)

    def _match_paren(self, j) -> int | None:
        if j >= len(self.toks) or not (self.toks[j].kind == "punct" and self.toks[j].value == "("):
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

    # -- statements ------------------------------------------------------------

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
        self.b.set_statement_span((t.start, self._line_end(t)))
        if t.kind == "id" and t.value in ("const", "let", "var"):
            self.next()
            self._declaration()
            return
        if t.kind == "id" and t.value == "import":
            self._import_statement()
            return
        if t.kind == "id" and t.value == "export":
            self.next()
            self.eat("default")
            return
        if t.kind == "id" and t.value == "async" and self.peek(1).kind == "id" \
                and self.peek(1).value == "function":
            self.next()
            t = self.peek()
        if t.kind == "id" and t.value == "function":
            self._function_declaration()
            return
        if t.kind == "id" and t.value in ("if", "for", "while", "switch"):
            self._control(t.value)
            return
        if t.kind == "id" and t.value == "do":
            self.next()
            self._block_or_statement()
            if self.eat("while"):
                self._paren_expr_walk()
            return
        if t.kind == "id" and t.value == "try":
            self._try_statement()
            return
        if t.kind == "id" and t.value in ("return", "throw"):
            self.next()
            if not (self.at(";") or self.at("}") or self.peek().kind == "eof"):
                self.b.expression(self.expression())
            return
        if t.kind == "id" and t.value in ("break", "continue"):
            self.next()
            return
        if t.kind == "punct" and t.value == "{":
            self.next()
            self.b.begin_block()
            while not self.at("}") and self.peek().kind != "eof":
                self.statement()
            self.expect("}")
            self.b.end_block()
            return
        if t.kind == "punct" and t.value == ";":
            return
        if t.kind == "eof":
            return
        self._expression_statement()

    def _line_end(self, t: Tok) -> int:
        nl = self.unit.text.find("\n", t.start)
        return len(self.unit.text) if nl == -1 else nl

    def _skip_statement(self):
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
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

    def _declaration(self):
        while True:
            t = self.peek()
            if t.kind == "punct" and t.value == "{":
                names = self._object_pattern()
                if self.eat("="):
                    value = self.expression()
                    module = self._require_module(value)
                    if module is not None:
                        for local, imported in names:
                            self.b.add_import(module, local, imported, Location(*self._pos(t)))
                    else:
                        self.b.expression(value)
            elif t.kind == "punct" and t.value == "[":
                self._skip_balanced("[", "]")
                if self.eat("="):
                    self.b.expression(self.expression())
            elif t.kind == "id":
                name = self.next().value
                if self.eat("="):
                    if not self._maybe_function_value(name):
                        value = self.expression()
                        module = self._require_module(value)
                        if module is not None:
                            self.b.add_import(module, name, "", Location(*self._pos(t)))
                        else:
                            self.b.assign(name, value, Location(*self._pos(t)))
            else:
                raise _Recover()
            if not self.eat(","):
                break

    def _object_pattern(self) -> list[tuple[str, str]]:
        self.expect("{")
        names: list[tuple[str, str]] = []
        while not self.at("}") and self.peek().kind != "eof":
            t = self.next()
            if t.kind == "id":
                imported = t.value
                local = imported
                if self.eat(":"):
                    alias_tok = self.next()
                    if alias_tok.kind == "id":
                        local = alias_tok.value
                names.append((local, imported))
            self.eat(",")
        self.expect("}")
        return names

    def _require_module(self, e: EIR) -> str | None:
        if isinstance(e, ECall) and isinstance(e.callee, EName) and e.callee.id == "require":
            if e.args and isinstance(e.args[0], EStr):
                return e.args[0].value
        return None

    def _import_statement(self):
        tok = self.next()
        loc = Location(*self._pos(tok))
        if self.peek().kind == "str":
            module = self.next().value
            self.b.add_import(module, module, "", loc)
            return
        default_name = None
        star = None
        names: list[tuple[str, str]] = []
        if self.peek().kind == "id" and not self.at("{") and not self.at("*"):
            default_name = self.next().value
            self.eat(",")
        if self.eat("*"):
            self.expect("as")
            star = self.next().value
        elif self.at("{"):
            names = self._object_pattern()
        self.expect("from")
        module_tok = self.next()
        module = module_tok.value if module_tok.kind == "str" else ""
        if default_name:
            self.b.add_import(module, default_name, "", loc)
        if star:
            self.b.add_import(module, star, "", loc)
        for local, imported in names:
            self.b.add_import(module, local, imported, loc)

    def _function_declaration(self):
        self.next()
        name = ""
        if self.peek().kind == "id":
            name = self.next().value
        params = self._params()
        self.b.declare_function(name, params, self.unit.location_of(self.peek().start))
        self.b.begin_function(name, params)
        self._braced_body()
        self.b.end_function()

    def _params(self) -> tuple[str, ...]:
        if not self.at("("):
            return ()
        close = self._match_paren(self.i)
        if close is None:
            raise _Recover()
        names = tuple(t.value for t in self.toks[self.i + 1:close]
                      if t.kind == "id" and t.value not in _KEYWORDS)
        self.i = close + 1
        return names

    def _braced_body(self):
        self.expect("{")
        while not self.at("}") and self.peek().kind != "eof":
            self.statement()
        self.expect("}")

    def _maybe_function_value(self, name: str) -> bool:
        """Parse `<async>? function|arrow` initializer as a named local fn."""
        save = self.i
        self.eat("async")
        if self.at("function"):
            self.next()
            if self.peek().kind == "id":
                self.next()
            params = self._params()
            self.b.declare_function(name, params, self.unit.location_of(self.peek().start))
            self.b.begin_function(name, params)
            self._braced_body()
            self.b.end_function()
            return True
        if self.at("("):
            close = self._match_paren(self.i)
            if close is not None and close + 1 < len(self.toks) and \
                    self.toks[close + 1].kind == "punct" and self.toks[close + 1].value == "=>":
                params = self._params()
                self.expect("=>")
                self.b.declare_function(name, params, self.unit.location_of(self.peek().start))
                self.b.begin_function(name, params)
                if self.at("{"):
                    self._braced_body()
                else:
                    self.b.expression(self.expression())
                self.b.end_function()
                return True
        if self.peek().kind == "id" and self.peek().value not in _KEYWORDS and \
                self.peek(1).kind == "punct" and self.peek(1).value == "=>":
            param_name = self.next().value
            self.expect("=>")
            self.b.declare_function(name, (param_name,), self.unit.location_of(self.peek().start))
            self.b.begin_function(name, (param_name,))
            if self.at("{"):
                self._braced_body()
            else:
                self.b.expression(self.expression())
            self.b.end_function()
            return True
        self.i = save
        return False

    def _control(self, kind: str):
        self.next()
        if kind == "for":
            self.eat("await")
            if self.at("("):
                close = self._match_paren(self.i)
                self.next()
                while self.i < close:
                    if self.at(";") or self.at(",") or self.at("of") or self.at("in"):
                        self.next()
                        continue
                    if self.peek().kind == "id" and self.peek().value in ("const", "let", "var"):
                        self.next()
                        continue
                    try:
                        self.b.expression(self.expression())
                    except _Recover:
                        self.next()
                self.i = close + 1
        else:
            self._paren_expr_walk()
        if kind == "switch":
            self.expect("{")
            self.b.begin_block()
            while not self.at("}") and self.peek().kind != "eof":
                if self.eat("case"):
                    try:
                        self.b.expression(self.expression())
                    except _Recover:
                        pass
                    self.eat(":")
                elif self.eat("default"):
                    self.eat(":")
                else:
                    self.statement()
            self.expect("}")
            self.b.end_block()
            return
        self._block_or_statement()
        if kind == "if" and self.at("else"):
            self.next()
            if self.at("if"):
                self._control("if")
            else:
                self._block_or_statement()

    def _paren_expr_walk(self):
        if self.at("("):
            close = self._match_paren(self.i)
            self.next()
            try:
                self.b.expression(self.expression())
            except _Recover:
                pass
            if close is not None:
                self.i = close + 1

    def _block_or_statement(self):
        self.b.begin_block()
        if self.at("{"):
            self.next()
            while not self.at("}") and self.peek().kind != "eof":
                self.statement()
            self.expect("}")
        else:
            self.statement()
        self.b.end_block()

    def _try_statement(self):
        self.next()
        self.b.begin_block()
        self._braced_body()
        self.b.end_block()
        if self.eat("catch"):
            if self.at("("):
                close = self._match_paren(self.i)
                if close is not None:
                    self.i = close + 1
            self.b.begin_block()
            self._braced_body()
            self.b.end_block()
        if self.eat("finally"):
            self.b.begin_block()
            self._braced_body()
            self.b.end_block()

    def _expression_statement(self):
        first = self.peek()
        e = self.expression()
        if self.at("=") and isinstance(e, EMember) and e.attr is not None:
            root = e
            while isinstance(root, EMember) and root.base is not None:
                root = root.base
            self.next()
            if isinstance(root, EName) and root.id in ("exports", "module"):
                if not self._maybe_function_value(e.attr):
                    self.b.expression(self.expression())
            elif isinstance(e.base, EName):
                value = self.expression()
                self.b.assign_prop(e.base.id, e.attr, value, Location(*self._pos(first)))
            else:
                self.b.expression(self.expression())
            return
        if self.at("=") and isinstance(e, EName):
            self.next()
            if not self._maybe_function_value(e.id):
                value = self.expression()
                self.b.assign(e.id, value, Location(*self._pos(first)))
            return
        self.b.expression(e)

    # -- expressions ------------------------------------------------------------

    def expression(self) -> EIR:
        return self._ternary()

    def _ternary(self) -> EIR:
        cond = self._binary()
        if self.at("?"):
            self.next()
            a = self._ternary()
            self.expect(":")
            b = self._ternary()
            return EUnknown(cond.line, cond.col, cond.span, inner=[cond, a, b])
        return cond

    _BINOPS = {"+", "-", "*", "/", "%", "==", "===", "!=", "!==", "<", ">",
               "<=", ">=", "&&", "||", "??", "&", "|", "^", "**"}

    def _binary(self) -> EIR:
        parts = [self._unary()]
        ops = []
        while True:
            t = self.peek()
            if (t.kind == "punct" and t.value in self._BINOPS) or \
                    (t.kind == "id" and t.value in ("instanceof", "in")):
                ops.append(t.value)
                self.next()
                parts.append(self._unary())
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

    def _unary(self) -> EIR:
        t = self.peek()
        if t.kind == "id" and t.value in ("await", "typeof", "void", "delete"):
            self.next()
            return self._unary()
        if t.kind == "punct" and t.value in ("!", "-", "+", "~", "++", "--"):
            self.next()
            inner = self._unary()
            return EUnknown(inner.line, inner.col, inner.span, inner=[inner])
        if t.kind == "id" and t.value == "new":
            self.next()
            callee = self._postfix(new_stop=True)
            line, col = self._pos(t)
            if self.at("("):
                args = self._arguments()
                call = ECall(line, col, (t.start, self.toks[self.i - 1].end),
                             callee=callee, args=args, is_new=True)
                return self._postfix_chain(call)
            return ECall(line, col, (t.start, t.end), callee=callee, args=[], is_new=True)
        return self._postfix()

    def _postfix(self, new_stop: bool = False) -> EIR:
        e = self._primary()
        return self._postfix_chain(e, new_stop=new_stop)

    def _postfix_chain(self, e: EIR, new_stop: bool = False) -> EIR:
        while True:
            t = self.peek()
            if t.kind == "punct" and t.value in (".", "?."):
                self.next()
                name_tok = self.next()
                if name_tok.kind != "id":
                    raise _Recover()
                line, col = self._pos(name_tok)
                e = self._make_member(e, name_tok.value, line, col,
                                      (e.span[0], name_tok.end))
            elif t.kind == "punct" and t.value == "[":
                self.next()
                index = self.expression()
                self.expect("]")
                end = self.toks[self.i - 1].end
                if isinstance(index, EStr):
                    e = self._make_member(e, index.value, index.line, index.col,
                                          (e.span[0], end))
                else:
                    e = EMember(e.line, e.col, (e.span[0], end), base=e, attr=None)
            elif t.kind == "punct" and t.value == "(":
                if new_stop:
                    return e
                args = self._arguments()
                end = self.toks[self.i - 1].end
                e = ECall(e.line, e.col, (e.span[0], end), callee=e, args=args)
            else:
                return e

    def _make_member(self, base: EIR, attr: str, line: int, col: int,
                     span: tuple[int, int]) -> EIR:
        if isinstance(base, EMember) and base.attr == "env" and \
                isinstance(base.base, EName) and base.base.id == "process":
            return EEnv(line, col, span, name=attr)
        member = EMember(line, col, span, base=base, attr=attr)
        member.attr_line, member.attr_col = line, col
        return member

    def _arguments(self) -> list[EIR]:
        self.expect("(")
        args: list[EIR] = []
        while not self.at(")") and self.peek().kind != "eof":
            if self.eat("..."):
                spread = self.expression()
                args.append(EUnknown(spread.line, spread.col, spread.span, inner=[spread]))
            else:
                args.append(self.expression())
            if not self.eat(","):
                break
        self.expect(")")
        return args

    def _primary(self) -> EIR:
        t = self.peek()
        line, col = self._pos(t)
        if t.kind == "str":
            self.next()
            return EStr(line, col, (t.start, t.end), value=t.value)
        if t.kind in ("num", "regex"):
            self.next()
            return EUnknown(line, col, (t.start, t.end))
        if t.kind == "template":
            self.next()
            parts: list[EIR] = []
            for kind, payload in t.value:
                if kind == "str":
                    parts.append(EStr(line, col, (t.start, t.end), value=payload))
                else:
                    sub_start, sub_end = payload
                    sub = Parser(self.unit, self.b, tokenize(self.unit, sub_start, sub_end))
                    try:
                        parts.append(sub.expression())
                    except (_Recover, ParseError):
                        parts.append(EUnknown(line, col, (sub_start, sub_end)))
            if not parts:
                return EStr(line, col, (t.start, t.end), value="")
            if len(parts) == 1 and isinstance(parts[0], EStr):
                return parts[0]
            return EConcat(line, col, (t.start, t.end), parts=parts)
        if t.kind == "id" and t.value == "async":
            nxt = self.peek(1)
            if nxt.kind == "id" and nxt.value == "function":
                self.next()
                t = self.peek()
            elif (nxt.kind == "punct" and nxt.value == "(") or nxt.kind == "id":
                self.next()
                t = self.peek()
        if t.kind == "id" and t.value == "function":
            self.next()
            if self.peek().kind == "id":
                self.next()
            params = self._params()
            self.b.begin_function("", params)
            self._braced_body()
            self.b.end_function()
            return EUnknown(line, col, (t.start, self.toks[self.i - 1].end))
        if t.kind == "id" and t.value in ("null", "true", "false", "undefined", "this"):
            self.next()
            return EUnknown(line, col, (t.start, t.end))
        if t.kind == "id" and t.value not in _KEYWORDS:
            if self.peek(1).kind == "punct" and self.peek(1).value == "=>":
                self.next()
                self.next()
                self.b.begin_function("", (t.value,))
                if self.at("{"):
                    self._braced_body()
                else:
                    self.b.expression(self.expression())
                self.b.end_function()
                return EUnknown(line, col, (t.start, self.toks[self.i - 1].end))
            self.next()
            return EName(line, col, (t.start, t.end), id=t.value)
        if t.kind == "punct" and t.value == "(":
            close = self._match_paren(self.i)
            if close is not None and close + 1 < len(self.toks) and \
                    self.toks[close + 1].kind == "punct" and self.toks[close + 1].value == "=>":
                params = self._params()
                self.expect("=>")
                self.b.begin_function("", params)
                if self.at("{"):
                    self._braced_body()
                else:
                    self.b.expression(self.expression())
                self.b.end_function()
                return EUnknown(line, col, (t.start, self.toks[self.i - 1].end))
            self.next()
            e = self.expression()
            self.expect(")")
            return e
        if t.kind == "punct" and t.value == "{":
            return self._object_literal()
        if t.kind == "punct" and t.value == "[":
            self.next()
            inner = []
            while not self.at("]") and self.peek().kind != "eof":
                self.eat("...")
                inner.append(self.expression())
                if not self.eat(","):
                    break
            self.expect("]")
            return EUnknown(line, col, (t.start, self.toks[self.i - 1].end), inner=inner)
        raise _Recover()

    def _object_literal(self) -> EIR:
        t = self.next()  # {
        line, col = self._pos(t)
        props: dict[str, EIR] = {}
        dynamic = False
        while not self.at("}") and self.peek().kind != "eof":
            if self.eat("..."):
                dynamic = True
                self.b.expression(self.expression())
            else:
                key_tok = self.peek()
                key = None
                if key_tok.kind in ("id", "str", "num"):
                    self.next()
                    key = str(key_tok.value)
                elif key_tok.kind == "punct" and key_tok.value == "[":
                    dynamic = True
                    self._skip_balanced("[", "]")
                    if self.eat(":"):
                        self.b.expression(self.expression())
                    if not self.eat(","):
                        break
                    continue
                else:
                    raise _Recover()
                if self.eat(":"):
                    value = self.expression()
                elif self.at("(") and key is not None:
                    params = self._params()
                    self.b.begin_function(key, params)
                    self._braced_body()
                    self.b.end_function()
                    value = EUnknown(line, col, (key_tok.start, key_tok.end))
                else:
                    value = EName(*self._pos(key_tok), (key_tok.start, key_tok.end),
                                  id=key or "")
                if key is not None:
                    props[key] = value
            if not self.eat(","):
                break
        self.expect("}")
        return EObject(line, col, (t.start, self.toks[self.i - 1].end),
                       props=props, has_dynamic=dynamic)

    def _skip_balanced(self, open_p: str, close_p: str):
        depth = 0
        while self.peek().kind != "eof":
            t = self.next()
            if t.kind == "punct" and t.value == open_p:
                depth += 1
            elif t.kind == "punct" and t.value == close_p:
                depth -= 1
                if depth == 0:
                    return


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
    Parser(unit, builder, toks).parse_program()
