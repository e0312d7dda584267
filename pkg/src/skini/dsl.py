"""Parser and printer for the textual orchestration language.

The language is deliberately small: modules declare their interface signals,
bodies combine emit/await/fork/every/if/loop/abort/suspend/run plus local
signal declarations, and conditions are pure signal expressions.  A parsed
tree pretty-prints back to canonical text; parsing that text again yields a
structurally identical tree.

    module Pulse(in beat, out tick) {
      every (beat.now) {
        emit tick(true);
      }
    }
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from . import expr as ex
from . import statements as st
from .errors import DuplicateSignalDecl, ScoreSyntaxError, UnknownConstruct

_KEYWORDS = {
    "module", "in", "out", "signal", "emit", "await", "count", "fork", "par",
    "every", "if", "else", "loop", "abort", "suspend", "run", "as",
    "true", "false",
}

_PUNCT = [
    "===", "!==", "...", "&&", "||", "==", "!=", "<=", ">=",
    "(", ")", "{", "}", ",", ";", ".", "<", ">", "+", "-", "*", "%",
    "!", "=",
]


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'number' | 'string' | 'punct' | 'eof'
    text: str
    value: object
    line: int
    col: int


def _lex(source: str) -> List[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg):
        raise ScoreSyntaxError(msg, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            tokens.append(Token("ident", text, text, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_float = False
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            value = float(text) if is_float else int(text)
            tokens.append(Token("number", text, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    err("unterminated string")
                if source[j] == "\\" and j + 1 < n:
                    esc = source[j + 1]
                    buf.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                err("unterminated string")
            j += 1
            tokens.append(
                Token("string", source[i:j], "".join(buf), start_line, start_col)
            )
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if source.startswith(p, i):
                tokens.append(Token("punct", p, p, start_line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            err(f"unexpected character {c!r}")
    tokens.append(Token("eof", "", None, line, col))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _lex(source)
        self.pos = 0

    # token plumbing ----------------------------------------------------------
    def peek(self, ahead=0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text) -> bool:
        tok = self.peek()
        return tok.text == text and tok.kind in ("punct", "ident")

    def accept(self, text) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text) -> Token:
        tok = self.peek()
        if not self.at(text):
            raise ScoreSyntaxError(
                f"expected {text!r}, found {tok.text or tok.kind!r}",
                tok.line, tok.col,
            )
        return self.next()

    def expect_ident(self, what="identifier") -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise ScoreSyntaxError(
                f"expected {what}, found {tok.text or tok.kind!r}",
                tok.line, tok.col,
            )
        return self.next()

    # grammar -----------------------------------------------------------------
    def parse_modules(self):
        modules = {}
        while self.peek().kind != "eof":
            mod = self.module()
            if mod.name in modules:
                tok = self.peek(-1)
                raise ScoreSyntaxError(
                    f"module {mod.name!r} defined twice", mod.pos[0], mod.pos[1]
                )
            modules[mod.name] = mod
        return modules

    def module(self) -> st.ModuleDef:
        kw = self.expect("module")
        name = self.expect_ident("module name")
        self.expect("(")
        decls = []
        seen = set()
        if not self.at(")"):
            while True:
                tok = self.peek()
                if self.accept("in"):
                    direction = "in"
                elif self.accept("out"):
                    direction = "out"
                else:
                    raise ScoreSyntaxError(
                        "interface signal needs 'in' or 'out'",
                        tok.line, tok.col,
                    )
                sig = self.expect_ident("signal name")
                if sig.text in seen:
                    raise DuplicateSignalDecl(
                        f"signal {sig.text!r} declared twice", sig.line, sig.col
                    )
                seen.add(sig.text)
                decls.append(st.SignalDecl(sig.text, direction))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.block()
        return st.ModuleDef(
            name.text, tuple(decls), body, pos=(kw.line, kw.col)
        )

    def block(self) -> st.Stmt:
        open_tok = self.expect("{")
        stmts = self.statements_until("}")
        self.expect("}")
        return _seq(stmts, (open_tok.line, open_tok.col))

    def statements_until(self, closer) -> List[st.Stmt]:
        """Statements up to ``closer`` (or end of input when closer is None)."""
        stmts = []
        while True:
            if closer is None:
                if self.peek().kind == "eof":
                    break
            elif self.at(closer):
                break
            elif self.peek().kind == "eof":
                tok = self.peek()
                raise ScoreSyntaxError(
                    f"expected {closer!r} before end of input", tok.line, tok.col
                )
            if self.at("signal"):
                # a local declaration scopes over the rest of the block
                stmts.append(self.local_decl(closer))
                break
            stmts.append(self.statement())
        return stmts

    def local_decl(self, closer) -> st.Stmt:
        kw = self.expect("signal")
        name = self.expect_ident("signal name")
        initial = None
        if self.accept("="):
            initial = self.literal()
        self.expect(";")
        rest = self.statements_until(closer)
        decl = st.SignalDecl(name.text, "local", initial)
        return st.Local(
            decl, _seq(rest, (kw.line, kw.col)), display=name.text,
            pos=(kw.line, kw.col),
        )

    def statement(self) -> st.Stmt:
        tok = self.peek()
        pos = (tok.line, tok.col)
        if self.accept("emit"):
            sig = self.expect_ident("signal name")
            self.expect("(")
            value = None
            if not self.at(")"):
                value = ex.Lit(self.literal())
            self.expect(")")
            self.expect(";")
            return st.Emit(sig.text, value, pos=pos)
        if self.accept("await"):
            if self.accept("count"):
                self.expect("(")
                count_tok = self.peek()
                if count_tok.kind != "number" or not isinstance(
                    count_tok.value, int
                ):
                    raise ScoreSyntaxError(
                        "await count needs an integer", count_tok.line,
                        count_tok.col,
                    )
                self.next()
                if count_tok.value < 1:
                    raise ScoreSyntaxError(
                        "await count needs n >= 1", count_tok.line,
                        count_tok.col,
                    )
                self.expect(",")
                cond = self.expression()
                self.expect(")")
                self.expect(";")
                return st.AwaitCount(count_tok.value, cond, pos=pos)
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            self.expect(";")
            return st.Await(cond, pos=pos)
        if self.accept("fork"):
            branches = [self.block()]
            while self.accept("par"):
                branches.append(self.block())
            if len(branches) < 2:
                raise ScoreSyntaxError("fork needs at least one 'par'", *pos)
            return st.Fork(tuple(branches), pos=pos)
        if self.accept("every"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return st.Every(cond, self.block(), pos=pos)
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.block()
            orelse = self.block() if self.accept("else") else None
            return st.If(cond, then, orelse, pos=pos)
        if self.accept("loop"):
            return st.Loop(self.block(), pos=pos)
        if self.accept("abort"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return st.Abort(cond, self.block(), pos=pos)
        if self.accept("suspend"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return st.Suspend(cond, self.block(), pos=pos)
        if self.accept("run"):
            mod = self.expect_ident("module name")
            self.expect("(")
            bindings = None
            if self.accept("..."):
                bindings = None
            else:
                pairs = []
                while True:
                    a = self.expect_ident("signal name")
                    if self.accept("as"):
                        form = "as"
                    elif self.accept("="):
                        form = "="
                    else:
                        t = self.peek()
                        raise ScoreSyntaxError(
                            "binding needs 'as' or '='", t.line, t.col
                        )
                    b = self.expect_ident("signal name")
                    pairs.append(st.Binding(a.text, b.text, form))
                    if not self.accept(","):
                        break
                bindings = tuple(pairs)
            self.expect(")")
            self.expect(";")
            return st.Run(mod.text, bindings, pos=pos)
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            raise UnknownConstruct(
                f"unknown construct {tok.text!r}", tok.line, tok.col
            )
        raise ScoreSyntaxError(
            f"expected a statement, found {tok.text or tok.kind!r}",
            tok.line, tok.col,
        )

    def literal(self):
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return tok.value
        if tok.kind == "string":
            self.next()
            return tok.value
        if self.accept("true"):
            return True
        if self.accept("false"):
            return False
        if self.accept("-"):
            num = self.peek()
            if num.kind != "number":
                raise ScoreSyntaxError(
                    "expected a number after '-'", num.line, num.col
                )
            self.next()
            return -num.value
        raise ScoreSyntaxError(
            f"expected a literal, found {tok.text or tok.kind!r}",
            tok.line, tok.col,
        )

    # expressions (precedence climbing) ---------------------------------------
    def expression(self) -> ex.SigExpr:
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.accept("||"):
            left = ex.Binary("||", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.eq_expr()
        while self.accept("&&"):
            left = ex.Binary("&&", left, self.eq_expr())
        return left

    def eq_expr(self):
        left = self.rel_expr()
        while True:
            if self.accept("===") or self.accept("=="):
                left = ex.Binary("==", left, self.rel_expr())
            elif self.accept("!==") or self.accept("!="):
                left = ex.Binary("!=", left, self.rel_expr())
            else:
                return left

    def rel_expr(self):
        left = self.add_expr()
        while True:
            for op in ("<=", ">=", "<", ">"):
                if self.accept(op):
                    left = ex.Binary(op, left, self.add_expr())
                    break
            else:
                return left

    def add_expr(self):
        left = self.mul_expr()
        while True:
            if self.accept("+"):
                left = ex.Binary("+", left, self.mul_expr())
            elif self.accept("-"):
                left = ex.Binary("-", left, self.mul_expr())
            else:
                return left

    def mul_expr(self):
        left = self.unary_expr()
        while True:
            if self.accept("*"):
                left = ex.Binary("*", left, self.unary_expr())
            elif self.accept("%"):
                left = ex.Binary("%", left, self.unary_expr())
            else:
                return left

    def unary_expr(self):
        if self.accept("!"):
            return ex.Unary("!", self.unary_expr())
        if self.accept("-"):
            return ex.Unary("-", self.unary_expr())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if self.accept("("):
            inner = self.expression()
            self.expect(")")
            return inner
        if tok.kind == "number" or tok.kind == "string":
            self.next()
            return ex.Lit(tok.value)
        if self.accept("true"):
            return ex.Lit(True)
        if self.accept("false"):
            return ex.Lit(False)
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.next()
            self.expect(".")
            acc = self.expect_ident("'now' or 'nowval'")
            if acc.text == "now":
                return ex.Now(tok.text)
            if acc.text == "nowval":
                return ex.NowVal(tok.text)
            raise ScoreSyntaxError(
                f"expected 'now' or 'nowval' after '.', found {acc.text!r}",
                acc.line, acc.col,
            )
        raise ScoreSyntaxError(
            f"expected an expression, found {tok.text or tok.kind!r}",
            tok.line, tok.col,
        )


def _seq(stmts, pos):
    if len(stmts) == 1:
        return stmts[0]
    if not stmts:
        return st.Nothing(pos=pos)
    return st.Seq(tuple(stmts), pos=pos)


def parse_orchestration(source: str):
    """Parse DSL text into a map of module name -> ModuleDef."""
    return _Parser(source).parse_modules()


def parse_statement(source: str) -> st.Stmt:
    """Parse a statement sequence outside a module (testing convenience)."""
    p = _Parser(source)
    stmts = p.statements_until(None)
    tok = p.peek()
    if tok.kind != "eof":
        raise ScoreSyntaxError(
            f"trailing input {tok.text!r}", tok.line, tok.col
        )
    return _seq(stmts, (1, 1))


# --- printing ----------------------------------------------------------------

_INDENT = "  "


def print_modules(modules) -> str:
    return "\n\n".join(print_module(m) for m in modules.values()) + "\n"


def print_module(mod: st.ModuleDef) -> str:
    sig = ", ".join(f"{d.direction} {d.name}" for d in mod.interface)
    lines = [f"module {mod.name}({sig}) {{"]
    lines.extend(_stmt_lines(mod.body, 1, top=True))
    lines.append("}")
    return "\n".join(lines)


def print_statement(stmt: st.Stmt) -> str:
    return "\n".join(_stmt_lines(stmt, 0, top=True))


def _block_lines(stmt, depth):
    # a block prints its sequence flattened; anything else as one statement
    return _stmt_lines(stmt, depth, top=True)


def _stmt_lines(stmt, depth, top=False):
    pad = _INDENT * depth
    if isinstance(stmt, st.Nothing):
        return []
    if isinstance(stmt, st.Seq) and top:
        out = []
        for child in stmt.body:
            out.extend(_stmt_lines(child, depth, top=True))
        return out
    if isinstance(stmt, st.Emit):
        arg = "" if stmt.value is None else ex.format_literal(stmt.value.value)
        return [f"{pad}emit {stmt.signal}({arg});"]
    if isinstance(stmt, st.Await):
        return [f"{pad}await ({ex.to_source(stmt.cond)});"]
    if isinstance(stmt, st.AwaitCount):
        return [f"{pad}await count({stmt.count}, {ex.to_source(stmt.cond)});"]
    if isinstance(stmt, st.Fork):
        out = [f"{pad}fork {{"]
        for i, b in enumerate(stmt.branches):
            if i:
                out.append(f"{pad}}} par {{")
            out.extend(_block_lines(b, depth + 1))
        out.append(f"{pad}}}")
        return out
    if isinstance(stmt, st.Every):
        out = [f"{pad}every ({ex.to_source(stmt.cond)}) {{"]
        out.extend(_block_lines(stmt.body, depth + 1))
        out.append(f"{pad}}}")
        return out
    if isinstance(stmt, st.If):
        out = [f"{pad}if ({ex.to_source(stmt.cond)}) {{"]
        out.extend(_block_lines(stmt.then, depth + 1))
        if stmt.orelse is not None:
            out.append(f"{pad}}} else {{")
            out.extend(_block_lines(stmt.orelse, depth + 1))
        out.append(f"{pad}}}")
        return out
    if isinstance(stmt, st.Loop):
        out = [f"{pad}loop {{"]
        out.extend(_block_lines(stmt.body, depth + 1))
        out.append(f"{pad}}}")
        return out
    if isinstance(stmt, st.Abort):
        out = [f"{pad}abort ({ex.to_source(stmt.cond)}) {{"]
        out.extend(_block_lines(stmt.body, depth + 1))
        out.append(f"{pad}}}")
        return out
    if isinstance(stmt, st.Suspend):
        out = [f"{pad}suspend ({ex.to_source(stmt.cond)}) {{"]
        out.extend(_block_lines(stmt.body, depth + 1))
        out.append(f"{pad}}}")
        return out
    if isinstance(stmt, st.Run):
        if stmt.bindings is None:
            args = "..."
        else:
            args = ", ".join(
                f"{b.callee} {b.form} {b.caller}" if b.form == "as"
                else f"{b.callee} = {b.caller}"
                for b in stmt.bindings
            )
        return [f"{pad}run {stmt.module}({args});"]
    if isinstance(stmt, st.Local):
        name = stmt.display or stmt.decl.name
        init = (
            ""
            if stmt.decl.initial is None
            else f" = {ex.format_literal(stmt.decl.initial)}"
        )
        out = [f"{pad}signal {name}{init};"]
        out.extend(_stmt_lines(stmt.body, depth, top=True))
        return out
    if isinstance(stmt, st.Seq):
        out = []
        for child in stmt.body:
            out.extend(_stmt_lines(child, depth, top=True))
        return out
    raise TypeError(f"cannot print {stmt!r}")
