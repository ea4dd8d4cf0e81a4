"""The input script language: tokenizer, parser, AST, and canonical renderer.

Statements are parsed into semantic form (polynomials over the declared
ring's variables), names are resolved during the single parse pass, and
render() emits a canonical text that parses back to an equal Script.
Errors carry line:col positions and the expected-token set.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ScriptError
from .rings import FieldSpec, Poly, RingPresentation

CHECK_KINDS = (
    "rn1",
    "perfect",
    "prop23",
    "cor25",
    "param",
    "thm51",
    "socle-mult",
    "witness",
)
COMPUTE_KINDS = (
    "socle",
    "colength",
    "mingens",
    "fitting",
    "resolve",
    "dual-image",
    "closure",
    "socdim",
)
VERDICT_WORDS = ("holds", "fails", "hypothesis-not-met")

_PUNCT = ";=[](),^*+-/"


@dataclass
class Token:
    kind: str  # name | int | punct | end
    value: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            start = i
            c0 = col
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            tokens.append(Token("int", text[start:i], line, c0))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            c0 = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token("name", text[start:i], line, c0))
            continue
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        raise ScriptError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("end", "", line, col))
    return tokens


@dataclass
class RingDecl:
    name: str
    field_spec: FieldSpec
    vars: tuple
    relations: tuple
    cm: bool
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class IdealDecl:
    name: str
    ring_name: str
    gens: tuple
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class MatrixDecl:
    name: str
    ring_name: str
    entries: tuple
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class ModuleDecl:
    name: str
    ring_name: str
    rank: int
    mode: str  # cols | gens
    entries: tuple
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class CheckStmt:
    kind: str
    target: str
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class ComputeStmt:
    kind: str
    arg: object
    target: str
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class ExpectStmt:
    value: object  # verdict word, int, or tuple of ints
    pos: tuple = field(default=(0, 0), compare=False)


@dataclass
class Script:
    statements: tuple

    def render(self):
        return render_script(self)


class _Parser:
    def __init__(self, tokens, field_override=None):
        self.tokens = tokens
        self.i = 0
        self.field_override = field_override
        self.rings = {}  # name -> RingPresentation
        self.bindings = {}  # name -> ("ideal" | "matrix" | "module", ring_name)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, expected=()):
        tok = self.peek()
        raise ScriptError(message, tok.line, tok.col, expected)

    def expect_punct(self, ch):
        tok = self.peek()
        if tok.kind != "punct" or tok.value != ch:
            self.error(f"expected {ch!r}, found {tok.value!r}", {ch})
        return self.advance()

    def expect_name(self, what="name"):
        tok = self.peek()
        if tok.kind != "name":
            self.error(f"expected {what}, found {tok.value!r}", {what})
        return self.advance()

    def expect_int(self):
        tok = self.peek()
        if tok.kind != "int":
            self.error(f"expected an integer, found {tok.value!r}", {"integer"})
        return int(self.advance().value)

    def at_name(self, value):
        tok = self.peek()
        return tok.kind == "name" and tok.value == value

    def eat_name(self, value):
        if self.at_name(value):
            self.advance()
            return True
        return False

    # -- statements ------------------------------------------------------

    def parse_script(self):
        stmts = []
        while self.peek().kind != "end":
            stmts.append(self.parse_statement())
        return Script(tuple(stmts))

    def parse_statement(self):
        tok = self.peek()
        heads = {"ring", "ideal", "matrix", "module", "check", "compute", "expect"}
        if tok.kind != "name" or tok.value not in heads:
            self.error(f"expected a statement, found {tok.value!r}", heads)
        return getattr(self, f"_parse_{tok.value}")()

    def _parse_ring(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        name = self.expect_name("ring name").value
        self.expect_punct("=")
        fs = self._parse_field()
        if self.field_override is not None:
            fs = self.field_override
        self.expect_punct("[")
        vars = [self.expect_name("variable").value]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.advance()
            vars.append(self.expect_name("variable").value)
        self.expect_punct("]")
        ring = RingPresentation(fs, vars)
        relations = ()
        if self.peek().kind == "punct" and self.peek().value == "/":
            self.advance()
            self.expect_punct("(")
            relations = tuple(self._parse_poly_list(ring))
            self.expect_punct(")")
        cm = self.eat_name("cm")
        self.expect_punct(";")
        final = RingPresentation(fs, vars, relations, cm=cm)
        self.rings[name] = final
        return RingDecl(name, fs, tuple(vars), relations, cm, pos)

    def _parse_field(self):
        tok = self.peek()
        if self.eat_name("QQ"):
            return FieldSpec.rationals()
        if self.eat_name("GF"):
            self.expect_punct("(")
            p = self.expect_int()
            self.expect_punct(")")
            return FieldSpec.prime_field(p)
        self.error(f"expected a field (QQ or GF(p)), found {tok.value!r}", {"QQ", "GF"})

    def _ring_of(self, name_tok_value):
        ring = self.rings.get(name_tok_value)
        if ring is None:
            self.error(f"undeclared ring {name_tok_value!r}")
        return ring

    def _parse_ideal(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        name = self.expect_name("ideal name").value
        if not self.eat_name("in"):
            self.error("expected 'in'", {"in"})
        ring_name = self.expect_name("ring name").value
        ring = self._ring_of(ring_name)
        self.expect_punct("=")
        self.expect_punct("(")
        gens = tuple(self._parse_poly_list(ring))
        self.expect_punct(")")
        self.expect_punct(";")
        self.bindings[name] = ("ideal", ring_name)
        return IdealDecl(name, ring_name, gens, pos)

    def _parse_matrix(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        name = self.expect_name("matrix name").value
        if not self.eat_name("in"):
            self.error("expected 'in'", {"in"})
        ring_name = self.expect_name("ring name").value
        ring = self._ring_of(ring_name)
        self.expect_punct("=")
        entries = self._parse_matrix_literal(ring)
        self.expect_punct(";")
        self.bindings[name] = ("matrix", ring_name)
        return MatrixDecl(name, ring_name, entries, pos)

    def _parse_module(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        name = self.expect_name("module name").value
        if not self.eat_name("in"):
            self.error("expected 'in'", {"in"})
        ring_name = self.expect_name("ring name").value
        ring = self._ring_of(ring_name)
        self.expect_punct("^")
        rank = self.expect_int()
        self.expect_punct("=")
        if self.eat_name("cols"):
            mode = "cols"
        elif self.eat_name("gens"):
            mode = "gens"
        else:
            self.error("expected 'cols' or 'gens'", {"cols", "gens"})
        entries = self._parse_matrix_literal(ring)
        if mode == "cols" and len(entries) != rank:
            self.error(f"cols matrix needs {rank} rows, found {len(entries)}")
        if mode == "gens" and any(len(row) != rank for row in entries):
            self.error(f"each generator needs {rank} components")
        self.expect_punct(";")
        self.bindings[name] = ("module", ring_name)
        return ModuleDecl(name, ring_name, rank, mode, entries, pos)

    def _parse_matrix_literal(self, ring):
        self.expect_punct("[")
        rows = [self._parse_row(ring)]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.advance()
            rows.append(self._parse_row(ring))
        self.expect_punct("]")
        if any(len(r) != len(rows[0]) for r in rows):
            self.error("ragged matrix literal")
        return tuple(rows)

    def _parse_row(self, ring):
        self.expect_punct("[")
        row = [self.parse_poly(ring)]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.advance()
            row.append(self.parse_poly(ring))
        self.expect_punct("]")
        return tuple(row)

    def _parse_kind(self, allowed, what):
        tok = self.expect_name(what)
        kind = tok.value
        while (
            self.peek().kind == "punct"
            and self.peek().value == "-"
            and self.tokens[self.i + 1].kind == "name"
        ):
            self.advance()
            kind += "-" + self.advance().value
        if kind not in allowed:
            raise ScriptError(f"unknown {what} {kind!r}", tok.line, tok.col, set(allowed))
        return kind

    def _target(self):
        tok = self.expect_name("target name")
        if tok.value not in self.bindings:
            raise ScriptError(f"undeclared name {tok.value!r}", tok.line, tok.col)
        return tok.value

    def _parse_check(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        kind = self._parse_kind(CHECK_KINDS, "check kind")
        target = self._target()
        self.expect_punct(";")
        return CheckStmt(kind, target, pos)

    def _parse_compute(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        kind = self._parse_kind(COMPUTE_KINDS, "compute kind")
        arg = None
        if kind == "fitting":
            arg = self.expect_int()
        target = self._target()
        self.expect_punct(";")
        return ComputeStmt(kind, arg, target, pos)

    def _parse_expect(self):
        pos = (self.peek().line, self.peek().col)
        self.advance()
        tok = self.peek()
        if tok.kind == "int":
            value = self.expect_int()
        elif tok.kind == "punct" and tok.value == "[":
            self.advance()
            items = [self.expect_int()]
            while self.peek().kind == "punct" and self.peek().value == ",":
                self.advance()
                items.append(self.expect_int())
            self.expect_punct("]")
            value = tuple(items)
        else:
            value = self._parse_kind(VERDICT_WORDS, "expected verdict")
        self.expect_punct(";")
        return ExpectStmt(value, pos)

    # -- polynomial expressions ------------------------------------------

    def _parse_poly_list(self, ring):
        out = [self.parse_poly(ring)]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.advance()
            out.append(self.parse_poly(ring))
        return out

    def parse_poly(self, ring):
        return self._expr(ring)

    def _expr(self, ring):
        value = self._term(ring)
        while self.peek().kind == "punct" and self.peek().value in "+-":
            op = self.advance().value
            rhs = self._term(ring)
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self, ring):
        value = self._factor(ring)
        while self.peek().kind == "punct" and self.peek().value == "*":
            self.advance()
            value = value * self._factor(ring)
        return value

    def _factor(self, ring):
        neg = False
        while self.peek().kind == "punct" and self.peek().value == "-":
            self.advance()
            neg = not neg
        base = self._atom(ring)
        if self.peek().kind == "punct" and self.peek().value == "^":
            self.advance()
            e = self.expect_int()
            out = ring.one()
            for _ in range(e):
                out = out * base
            base = out
        return -base if neg else base

    def _atom(self, ring):
        tok = self.peek()
        if tok.kind == "int":
            num = self.expect_int()
            den = 1
            if self.peek().kind == "punct" and self.peek().value == "/":
                self.advance()
                den = self.expect_int()
            return ring.constant(ring.field.of_int(num, den))
        if tok.kind == "name":
            if tok.value not in ring.vars:
                raise ScriptError(
                    f"unknown variable {tok.value!r}", tok.line, tok.col, set(ring.vars)
                )
            self.advance()
            return ring.variable(tok.value)
        if tok.kind == "punct" and tok.value == "(":
            self.advance()
            value = self._expr(ring)
            self.expect_punct(")")
            return value
        self.error(f"expected a polynomial atom, found {tok.value!r}", {"variable", "integer", "("})


def parse_script(text, field_override=None):
    """Parse UTF-8 script text into a Script; raises ScriptError with position."""
    return _Parser(tokenize(text), field_override).parse_script()


# -- canonical renderer ---------------------------------------------------


def _field_text(fs):
    return "QQ" if fs.characteristic == 0 else f"GF({fs.characteristic})"


def render_script(script):
    rings = {}
    lines = []
    for st in script.statements:
        if isinstance(st, RingDecl):
            ring = RingPresentation(st.field_spec, st.vars, st.relations, cm=st.cm)
            rings[st.name] = ring
            text = f"ring {st.name} = {_field_text(st.field_spec)}[{', '.join(st.vars)}]"
            if st.relations:
                text += " / (" + ", ".join(ring.render_poly(r) for r in st.relations) + ")"
            if st.cm:
                text += " cm"
            lines.append(text + ";")
        elif isinstance(st, IdealDecl):
            ring = rings[st.ring_name]
            gens = ", ".join(ring.render_poly(g) for g in st.gens)
            lines.append(f"ideal {st.name} in {st.ring_name} = ({gens});")
        elif isinstance(st, MatrixDecl):
            ring = rings[st.ring_name]
            body = ", ".join(
                "[" + ", ".join(ring.render_poly(e) for e in row) + "]" for row in st.entries
            )
            lines.append(f"matrix {st.name} in {st.ring_name} = [{body}];")
        elif isinstance(st, ModuleDecl):
            ring = rings[st.ring_name]
            body = ", ".join(
                "[" + ", ".join(ring.render_poly(e) for e in row) + "]" for row in st.entries
            )
            lines.append(
                f"module {st.name} in {st.ring_name}^{st.rank} = {st.mode} [{body}];"
            )
        elif isinstance(st, CheckStmt):
            lines.append(f"check {st.kind} {st.target};")
        elif isinstance(st, ComputeStmt):
            arg = f" {st.arg}" if st.arg is not None else ""
            lines.append(f"compute {st.kind}{arg} {st.target};")
        elif isinstance(st, ExpectStmt):
            if isinstance(st.value, tuple):
                val = "[" + ", ".join(str(v) for v in st.value) + "]"
            else:
                val = str(st.value)
            lines.append(f"expect {val};")
        else:
            raise TypeError(f"unknown statement {st!r}")
    return "\n".join(lines) + "\n"
