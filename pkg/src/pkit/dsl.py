"""Text DSL for posets, lattices, spaces and set descriptors.

Grammar (see README for examples)::

    file     := item*
    item     := poset | lattice | space | let | set
    poset    := 'poset' NAME '{' 'elements' ':' ELEM (','? ELEM)* ';' ['order' ':' chains ';'] '}'
    lattice  := 'lattice' NAME '{' 'elements' ':' ELEM (','? ELEM)* ';' ['order' ':' chains ';'] '}'
    chains   := chain (','? chain)*          chain := ELEM ('<' ELEM)+    ELEM := NAME | INT
    space    := 'space' NAME '{' (part | order)* '}'
    part     := 'part' NAME ':' INT ';'
    order    := 'order' head '<=' head ':=' formula ';'
    head     := NAME ['(' [NAME (',' NAME)*] ')']
    formula  := conj (('|' | 'or') conj)*
    conj     := unary (('&' | 'and') unary)*
    unary    := ('!' | 'not') unary | '(' formula ')' | 'true' | 'false' | term CMP term
    term     := factor (('+' | '-') factor)*     factor := NAME | INT | 'omega'
    let      := 'let' NAME '=' sexpr [';']
    set      := 'set' NAME '=' dexpr [';']
    sexpr    := ATOM | NAME | 'finite' '(' NAME ')' | 'dual' '(' sexpr ')'
              | ('union' | 'lsum') '(' sexpr ',' sexpr ')'
              | 'dsum' '(' sexpr ',' dexpr ',' sexpr ',' dexpr ')'
    dexpr    := dconj ('|' dconj)*               dconj := dunary ('&' dunary)*
    dunary   := '!' dunary | '(' dexpr ')' | 'all' | 'none' | 'limit' | NAME
              | 'in' '(' NAME ')' | ('eq' | 'geq') '(' INT ',' INT ')' | 'isomega' '(' INT ')'
              | 'box' '(' NAME (',' range)* ')'  range := INT | 'omega' | '*' | INT '..' [INT]

Names may contain dots (``l.main``).  Only the linear fragment of order
formulas is accepted; ``*`` and ``/`` raise FragmentViolation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import rules as R
from .birkhoff import lattice_from_order
from .descriptors import (ALL, NONE, CoordEq, CoordGeq, CoordIsOmega, DAnd, DNot, DOr, InPart, Limit,
                          descriptor_str)
from .errors import FragmentViolation, ParseError, PkitError
from .order import FinitePoset, validate_poset
from .presentation import SpacePresentation
from .spaces import (ATOM_ALIASES, Atom, Custom, Dual, DownUpSum, Finite, LinearSum, Union, atom,
                     disjoint_union, down_up_sum, finite_space, linear_sum, order_dual)

KEYWORDS = {"poset", "lattice", "space", "let", "set", "part", "order", "elements", "omega",
            "true", "false", "and", "or", "not"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<op>:=|<=|>=|==|!=|\.\.|[{}();:,=<>!&|+\-*/])
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<omega>ω)
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str       # 'op', 'int', 'name', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind == "omega":
            out.append(Tok("name", "omega", line, pos - start + 1))
        elif kind not in ("ws", "comment"):
            out.append(Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Tok("eof", "", line, pos - start + 1))
    return out


@dataclass(frozen=True)
class Ref:
    """A name bound by ``let`` or ``space`` in the same workspace."""
    name: str


@dataclass
class Workspace:
    posets: dict = field(default_factory=dict)
    lattices: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)      # name -> SpacePresentation (space blocks)
    lets: dict = field(default_factory=dict)        # name -> expression AST
    sets: dict = field(default_factory=dict)        # name -> SetDescriptor
    order: list = field(default_factory=list)       # (kind, name) in source order
    _compiled: dict = field(default_factory=dict, repr=False)

    def names(self):
        return [n for _, n in self.order]

    def is_empty(self):
        return not self.order

    def compile(self, e) -> SpacePresentation:
        """Compile an expression, resolving references against this workspace."""
        if isinstance(e, Ref):
            if e.name in self.spaces:
                return self.spaces[e.name]
            if e.name in self.lets:
                if e.name not in self._compiled:
                    self._compiled[e.name] = self.compile(self.lets[e.name])
                return self._compiled[e.name]
            raise ParseError(f"unknown space {e.name!r}")
        if isinstance(e, Atom):
            return atom(e.name)
        if isinstance(e, Finite):
            if e.name not in self.posets:
                raise ParseError(f"unknown poset {e.name!r}")
            return finite_space(self.posets[e.name], e.name)
        if isinstance(e, Dual):
            return order_dual(self.compile(e.arg))
        if isinstance(e, Union):
            return disjoint_union(self.compile(e.left), self.compile(e.right))
        if isinstance(e, LinearSum):
            return linear_sum(self.compile(e.left), self.compile(e.right))
        if isinstance(e, DownUpSum):
            return down_up_sum(self.compile(e.left), e.D, self.compile(e.right), e.U)
        raise TypeError(e)

    def space(self, name) -> SpacePresentation:
        return self.compile(Ref(name))

    def validate(self, window=None, cross_check=None):
        from .engine import validate_presentation
        for kind, n in self.order:
            if kind in ("space", "let"):
                validate_presentation(self.space(n), window, cross_check)


class Parser:
    def __init__(self, text: str, ws: Workspace | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.ws = ws if ws is not None else Workspace()

    # token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def fail(self, msg, expected=None, tok=None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col, expected)

    def at(self, *texts) -> bool:
        return self.tok.kind in ("op", "name") and self.tok.text in texts

    def eat(self, text) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", [text])
        t = self.tok
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def name(self, what="name") -> str:
        t = self.tok
        if t.kind != "name":
            self.fail(f"expected {what}, found {t.text or 'end of input'!r}", [what])
        self.i += 1
        return t.text

    def element(self) -> str:
        """Poset and lattice elements may be names or digits (0, 1)."""
        if self.tok.kind == "int":
            self.i += 1
            return self.toks[self.i - 1].text
        return self.name("element")

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            self.fail(f"expected integer, found {t.text or 'end of input'!r}", ["integer"])
        self.i += 1
        return int(t.text)

    # top level
    def parse_file(self) -> Workspace:
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("poset", "lattice"):
                self.poset_block()
            elif self.at("space"):
                self.space_block()
            elif self.at("let"):
                self.let_item()
            elif self.at("set"):
                self.set_item()
            else:
                self.fail(f"unexpected {t.text!r}", ["poset", "lattice", "space", "let", "set"])
        return self.ws

    def define(self, kind, name, tok):
        if name in self.ws.names():
            raise ParseError(f"duplicate definition of {name!r}", tok.line, tok.col)
        if name in KEYWORDS:
            raise ParseError(f"{name!r} is a keyword", tok.line, tok.col)
        self.ws.order.append((kind, name))

    def poset_block(self):
        kind = self.tok.text
        self.i += 1
        nt = self.tok
        name = self.name()
        self.eat("{")
        self.eat("elements")
        self.eat(":")
        elements = [self.element()]
        while not self.at(";"):
            self.accept(",")
            elements.append(self.element())
        self.eat(";")
        pairs = []
        if self.accept("order"):
            self.eat(":")
            while not self.at(";"):
                self.accept(",")
                chain = [self.element()]
                self.eat("<")
                chain.append(self.element())
                while self.accept("<"):
                    chain.append(self.element())
                pairs += list(zip(chain, chain[1:]))
            self.eat(";")
        self.eat("}")
        self.define(kind, name, nt)
        if kind == "poset":
            self.ws.posets[name] = validate_poset(elements, pairs)
        else:
            self.ws.lattices[name] = lattice_from_order(elements, pairs)

    def space_block(self):
        self.eat("space")
        nt = self.tok
        name = self.name()
        self.eat("{")
        parts, orders = [], []
        while not self.at("}"):
            if self.accept("part"):
                p = self.name("part name")
                self.eat(":")
                parts.append((p, self.integer()))
                self.eat(";")
            elif self.accept("order"):
                src, uvars = self.head()
                self.eat("<=")
                dst, vvars = self.head()
                self.eat(":=")
                env = {}
                for n, c in [(n, R.Coord("u", i)) for i, n in enumerate(uvars)] + \
                            [(n, R.Coord("v", i)) for i, n in enumerate(vvars)]:
                    if n in env:
                        self.fail(f"variable {n!r} bound twice")
                    env[n] = c
                orders.append((src, dst, self.formula(env)))
                self.eat(";")
            else:
                self.fail(f"unexpected {self.tok.text!r}", ["part", "order", "}"])
        self.eat("}")
        self.define("space", name, nt)
        self.ws.spaces[name] = SpacePresentation(name, tuple(parts), tuple(orders), Custom(name))

    def head(self):
        p = self.name("part name")
        vs = []
        if self.accept("("):
            if not self.at(")"):
                vs.append(self.name("variable"))
                while self.accept(","):
                    vs.append(self.name("variable"))
            self.eat(")")
        return p, vs

    # order formulas
    def formula(self, env):
        items = [self.fconj(env)]
        while self.accept("|") or self.accept("or"):
            items.append(self.fconj(env))
        return items[0] if len(items) == 1 else R.Or(tuple(items))

    def fconj(self, env):
        items = [self.funary(env)]
        while self.accept("&") or self.accept("and"):
            items.append(self.funary(env))
        return items[0] if len(items) == 1 else R.And(tuple(items))

    def funary(self, env):
        if self.accept("!") or self.accept("not"):
            return R.Not(self.funary(env))
        if self.accept("("):
            f = self.formula(env)
            self.eat(")")
            return f
        if self.accept("true"):
            return R.TRUE
        if self.accept("false"):
            return R.FALSE
        lhs = self.term(env)
        t = self.tok
        if not (t.kind == "op" and t.text in R.CMP_OPS):
            self.fail(f"expected comparison, found {t.text or 'end of input'!r}", list(R.CMP_OPS))
        self.i += 1
        rhs = self.term(env)
        return R.Cmp(t.text, lhs, rhs)

    def term(self, env):
        t = self.factor(env)
        while True:
            if self.at("*", "/"):
                raise FragmentViolation(f"line {self.tok.line}, col {self.tok.col}: "
                                        f"{self.tok.text!r} is outside the linear fragment")
            if self.accept("+"):
                t = R.Add(t, self.factor(env))
            elif self.accept("-"):
                t = R.Sub(t, self.factor(env))
            else:
                break
        try:
            R.check_term(t)
        except FragmentViolation as e:
            raise FragmentViolation(f"line {self.tok.line}, col {self.tok.col}: {e}") from None
        return t

    def factor(self, env):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return R.Const(int(t.text))
        if self.accept("omega"):
            return R.OmegaConst()
        if t.kind == "name":
            if t.text not in env:
                self.fail(f"unknown variable {t.text!r}", sorted(env))
            self.i += 1
            return env[t.text]
        self.fail(f"expected term, found {t.text or 'end of input'!r}", ["variable", "integer", "omega"])

    # let / set
    def let_item(self):
        self.eat("let")
        nt = self.tok
        name = self.name()
        self.eat("=")
        e = self.sexpr()
        self.accept(";")
        self.define("let", name, nt)
        self.ws.lets[name] = e

    def set_item(self):
        self.eat("set")
        nt = self.tok
        name = self.name()
        self.eat("=")
        d = self.dexpr()
        self.accept(";")
        self.define("set", name, nt)
        self.ws.sets[name] = d

    def sexpr(self):
        t = self.tok
        n = self.name("space expression")
        if n == "dual":
            self.eat("(")
            a = self.sexpr()
            self.eat(")")
            return Dual(a)
        if n in ("union", "lsum"):
            self.eat("(")
            a = self.sexpr()
            self.eat(",")
            b = self.sexpr()
            self.eat(")")
            return Union(a, b) if n == "union" else LinearSum(a, b)
        if n == "dsum":
            self.eat("(")
            a = self.sexpr()
            self.eat(",")
            D = self.dexpr()
            self.eat(",")
            b = self.sexpr()
            self.eat(",")
            U = self.dexpr()
            self.eat(")")
            return DownUpSum(a, D, b, U)
        if n == "finite":
            self.eat("(")
            p = self.name("poset name")
            self.eat(")")
            if p not in self.ws.posets:
                raise ParseError(f"unknown poset {p!r}", t.line, t.col)
            return Finite(self.ws.posets[p], p)
        if n in self.ws.spaces or n in self.ws.lets:
            return Ref(n)
        if n in ATOM_ALIASES:
            return Atom(ATOM_ALIASES[n])
        raise ParseError(f"unknown space {n!r}", t.line, t.col, ["atom", "let name", "dual", "union",
                                                                 "lsum", "dsum", "finite"])

    # descriptors
    def dexpr(self):
        items = [self.dconj()]
        while self.accept("|"):
            items.append(self.dconj())
        return items[0] if len(items) == 1 else DOr(tuple(items))

    def dconj(self):
        items = [self.dunary()]
        while self.accept("&"):
            items.append(self.dunary())
        return items[0] if len(items) == 1 else DAnd(tuple(items))

    def dunary(self):
        if self.accept("!"):
            return DNot(self.dunary())
        if self.accept("("):
            d = self.dexpr()
            self.eat(")")
            return d
        t = self.tok
        n = self.name("set expression")
        if n == "all":
            return ALL
        if n == "none":
            return NONE
        if n == "limit":
            return Limit()
        if n == "in":
            self.eat("(")
            p = self.name("part name")
            self.eat(")")
            return InPart(p)
        if n in ("eq", "geq"):
            self.eat("(")
            i = self.integer()
            self.eat(",")
            c = self.integer()
            self.eat(")")
            return CoordEq(i, c) if n == "eq" else CoordGeq(i, c)
        if n == "isomega":
            self.eat("(")
            i = self.integer()
            self.eat(")")
            return CoordIsOmega(i)
        if n == "box":
            return self.box()
        if n in self.ws.sets:
            return self.ws.sets[n]
        raise ParseError(f"unknown set {n!r}", t.line, t.col,
                         ["all", "none", "limit", "in", "eq", "geq", "isomega", "box", "set name"])

    def box(self):
        self.eat("(")
        atoms = [InPart(self.name("part name"))]
        i = 0
        while self.accept(","):
            if self.accept("*"):
                pass
            elif self.accept("omega"):
                atoms.append(CoordIsOmega(i))
            else:
                lo = self.integer()
                if self.accept(".."):
                    atoms.append(CoordGeq(i, lo))
                    if self.tok.kind == "int":
                        atoms.append(DNot(CoordGeq(i, self.integer() + 1)))
                else:
                    atoms.append(CoordEq(i, lo))
            i += 1
        self.eat(")")
        return atoms[0] if len(atoms) == 1 else DAnd(tuple(atoms))

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r} after expression", ["end of input"])


def parse(text: str) -> Workspace:
    return Parser(text).parse_file()


def parse_descriptor(text: str, ws: Workspace | None = None):
    p = Parser(text, ws)
    d = p.dexpr()
    p.expect_eof()
    return d


def parse_space_expr(text: str, ws: Workspace | None = None):
    p = Parser(text, ws)
    e = p.sexpr()
    p.expect_eof()
    return e


# printing ---------------------------------------------------------------------


def sexpr_str(e) -> str:
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Finite):
        return f"finite({e.name})"
    if isinstance(e, Dual):
        return f"dual({sexpr_str(e.arg)})"
    if isinstance(e, Union):
        return f"union({sexpr_str(e.left)}, {sexpr_str(e.right)})"
    if isinstance(e, LinearSum):
        return f"lsum({sexpr_str(e.left)}, {sexpr_str(e.right)})"
    if isinstance(e, DownUpSum):
        return (f"dsum({sexpr_str(e.left)}, {descriptor_str(e.D)}, "
                f"{sexpr_str(e.right)}, {descriptor_str(e.U)})")
    raise TypeError(e)


def _chains(P: FinitePoset):
    return ", ".join(f"{a} < {b}" for a, b in P.hasse_edges())


def _head(part, k, var):
    return f"{part}({', '.join(f'{var}{i}' for i in range(k))})"


def print_workspace(ws: Workspace) -> str:
    out = []
    for kind, n in ws.order:
        if kind == "poset":
            P = ws.posets[n]
            order = f" order: {_chains(P)};" if P.hasse_edges() else ""
            out.append(f"poset {n} {{ elements: {', '.join(P.elements)};{order} }}")
        elif kind == "lattice":
            P = ws.lattices[n].as_poset()
            order = f" order: {_chains(P)};" if P.hasse_edges() else ""
            out.append(f"lattice {n} {{ elements: {', '.join(P.elements)};{order} }}")
        elif kind == "space":
            S = ws.spaces[n]
            lines = [f"space {n} {{"]
            lines += [f"  part {p}: {k};" for p, k in S.parts]
            for s, d, f in S.clauses:
                lines.append(f"  order {_head(s, S.arity(s), 'u')} <= {_head(d, S.arity(d), 'v')} := "
                             f"{R.formula_str(f)};")
            lines.append("}")
            out.append("\n".join(lines))
        elif kind == "let":
            out.append(f"let {n} = {sexpr_str(ws.lets[n])}")
        else:
            out.append(f"set {n} = {descriptor_str(ws.sets[n])}")
    return "\n".join(out) + ("\n" if out else "")


def workspaces_equal(a: Workspace, b: Workspace) -> bool:
    """Semantic equality: same names and kinds, isomorphic-by-label posets and lattices, equal
    presentations and descriptors (compared through their regions on the compiled spaces)."""
    from .descriptors import Region, d_parts
    if a.order != b.order:
        return False
    for kind, n in a.order:
        if kind == "poset" and a.posets[n] != b.posets[n]:
            return False
        if kind == "lattice":
            La, Lb = a.lattices[n].as_poset(), b.lattices[n].as_poset()
            if La != Lb:
                return False
        if kind in ("space", "let"):
            Sa, Sb = a.space(n), b.space(n)
            if Sa.parts != Sb.parts:
                return False
            w = Sa.window_bound
            if (Sa.order_block(w, w) != Sb.order_block(w, w)).any():
                return False
        if kind == "set":
            da, db = a.sets[n], b.sets[n]
            parts = tuple((p, 2) for p in sorted(d_parts(da) | d_parts(db) | {"_"}))
            try:
                if Region.from_descriptor(parts, da) != Region.from_descriptor(parts, db):
                    return False
            except PkitError:
                if descriptor_str(da) != descriptor_str(db):
                    return False
    return True
