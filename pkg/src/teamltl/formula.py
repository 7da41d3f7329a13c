"""Formula AST, concrete syntax and structural helpers.

Grammar (whitespace-insensitive, `#`-free; see parse_formula):

    formula  := split
    split    := conj ("|" conj)*            left associative
    conj     := untilrel ("&" untilrel)*    left associative
    untilrel := unary (("U" | "R") unary)*  right associative, one operator kind per chain
    unary    := ("X" | "F" | "G" | "~") unary | "!" IDENT | atom
    atom     := IDENT
              | "dep" "(" [identlist] ";" identlist ")"
              | "@" IDENT "(" [identlist] ")"
              | "(" formula ")"

`X F G U R` are reserved operator names.  `!` applies to a single proposition
only; `~` is the contradictory negation and applies to any subformula.

Operand order for the binary temporal operators: in `a U b` the right operand
`b` must eventually hold and `a` holds at all strictly earlier suffixes; in
`a R b` the right operand `b` holds at every suffix unless some strictly
earlier suffix satisfied `a`.  Example: `{p}{q}...` satisfies `p U q` and
`(p & q) R p` fails on `{p}{}...` because nothing ever releases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityMismatch, NameCollision, ParseError, UnknownAtom, UnsupportedFragment

Proposition = str


class Formula:
    """Base class for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class PositiveLiteral(Formula):
    name: Proposition


@dataclass(frozen=True)
class NegativeLiteral(Formula):
    name: Proposition


@dataclass(frozen=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Split(Formula):
    """Splitjunction: the team splits into two covering subteams."""

    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    sub: Formula


@dataclass(frozen=True)
class Globally(Formula):
    sub: Formula


@dataclass(frozen=True)
class Until(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Release(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class ContradictoryNeg(Formula):
    """Boolean negation over teams, written `~`."""

    sub: Formula


@dataclass(frozen=True)
class DepAtom(Formula):
    """dep(determinants; determined): the determinants functionally fix the determined."""

    determinants: tuple[Proposition, ...]
    determined: tuple[Proposition, ...]


@dataclass(frozen=True)
class GenAtom(Formula):
    """Occurrence of a registered generalised atom, written `@name(args)`."""

    name: str
    args: tuple[Proposition, ...]


_CONNECTIVES = (And, Split, Next, Eventually, Globally, Until, Release, ContradictoryNeg)


# ---------------------------------------------------------------------------
# lexer / parser

_KEYWORDS = frozenset("XFGUR")
_PUNCT = {
    "&": "AMP",
    "|": "PIPE",
    "!": "BANG",
    "~": "TILDE",
    "(": "LPAR",
    ")": "RPAR",
    ";": "SEMI",
    ",": "COMMA",
    "@": "AT",
    ".": "DOT",
}


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if _is_ident_start(c):
            start = i
            startcol = col
            while i < n and _is_ident_char(text[i]):
                i += 1
                col += 1
            word = text[start:i]
            if word in _KEYWORDS:
                tokens.append((word, word, line, startcol))
            else:
                tokens.append(("IDENT", word, line, startcol))
            continue
        kind = _PUNCT.get(c)
        if kind is None:
            raise ParseError(f"unexpected character {c!r}", line, col)
        tokens.append((kind, c, line, col))
        i += 1
        col += 1
    tokens.append(("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok[2], tok[3])

    # grammar rules -----------------------------------------------------

    def formula(self) -> Formula:
        f = self.split()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
        return f

    def split(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "PIPE":
            self.advance()
            f = Split(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.untilrel()
        while self.peek()[0] == "AMP":
            self.advance()
            f = And(f, self.untilrel())
        return f

    def untilrel(self) -> Formula:
        first = self.unary()
        chain = []
        op = None
        while self.peek()[0] in ("U", "R"):
            tok = self.advance()
            if op is None:
                op = tok[0]
            elif tok[0] != op:
                raise ParseError(
                    "cannot mix U and R at the same level, parenthesise", tok[2], tok[3]
                )
            chain.append(self.unary())
        if not chain:
            return first
        node = Until if op == "U" else Release
        operands = [first] + chain
        f = operands[-1]
        for lhs in reversed(operands[:-1]):
            f = node(lhs, f)
        return f

    def unary(self) -> Formula:
        kind = self.peek()[0]
        if kind == "X":
            self.advance()
            return Next(self.unary())
        if kind == "F":
            self.advance()
            return Eventually(self.unary())
        if kind == "G":
            self.advance()
            return Globally(self.unary())
        if kind == "TILDE":
            self.advance()
            return ContradictoryNeg(self.unary())
        if kind == "BANG":
            self.advance()
            tok = self.expect("IDENT")
            if tok[1] == "dep" and self.peek()[0] == "LPAR":
                raise ParseError("'!' applies to a proposition, not a dep atom", tok[2], tok[3])
            return NegativeLiteral(tok[1])
        return self.atom()

    def atom(self) -> Formula:
        kind, value, line, col = self.peek()
        if kind == "LPAR":
            self.advance()
            f = self.split()
            self.expect("RPAR")
            return f
        if kind == "AT":
            self.advance()
            name = self.expect("IDENT")[1]
            self.expect("LPAR")
            args = self.identlist(allow_empty=True)
            self.expect("RPAR")
            return GenAtom(name, tuple(args))
        if kind == "IDENT":
            self.advance()
            if value == "dep" and self.peek()[0] == "LPAR":
                self.advance()
                determinants = self.identlist(allow_empty=True)
                self.expect("SEMI")
                determined = self.identlist(allow_empty=False)
                self.expect("RPAR")
                return DepAtom(tuple(determinants), tuple(determined))
            return PositiveLiteral(value)
        raise ParseError(f"expected a formula, found {value!r}", line, col)

    def identlist(self, allow_empty: bool):
        names = []
        if self.peek()[0] != "IDENT":
            if allow_empty:
                return names
            self.fail("expected a proposition name")
        names.append(self.advance()[1])
        while self.peek()[0] == "COMMA":
            self.advance()
            names.append(self.expect("IDENT")[1])
        return names


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into a Formula, reporting line/column on errors."""
    return _Parser(text).formula()


# ---------------------------------------------------------------------------
# rendering

_LEVEL_SPLIT, _LEVEL_AND, _LEVEL_UNTILREL, _LEVEL_UNARY, _LEVEL_ATOM = range(5)


def _render(f: Formula, required: int) -> str:
    match f:
        case PositiveLiteral(name):
            return name
        case NegativeLiteral(name):
            s, level = f"!{name}", _LEVEL_ATOM
        case DepAtom(determinants, determined):
            s = f"dep({','.join(determinants)};{','.join(determined)})"
            level = _LEVEL_ATOM
        case GenAtom(name, args):
            s, level = f"@{name}({','.join(args)})", _LEVEL_ATOM
        case Next(sub):
            s, level = f"X {_render(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case Eventually(sub):
            s, level = f"F {_render(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case Globally(sub):
            s, level = f"G {_render(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case ContradictoryNeg(sub):
            s, level = f"~{_render(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case Until(lhs, rhs):
            right = _render(rhs, _LEVEL_UNTILREL if isinstance(rhs, Until) else _LEVEL_UNARY)
            s, level = f"{_render(lhs, _LEVEL_UNARY)} U {right}", _LEVEL_UNTILREL
        case Release(lhs, rhs):
            right = _render(rhs, _LEVEL_UNTILREL if isinstance(rhs, Release) else _LEVEL_UNARY)
            s, level = f"{_render(lhs, _LEVEL_UNARY)} R {right}", _LEVEL_UNTILREL
        case And(lhs, rhs):
            s = f"{_render(lhs, _LEVEL_AND)} & {_render(rhs, _LEVEL_UNTILREL)}"
            level = _LEVEL_AND
        case Split(lhs, rhs):
            s = f"{_render(lhs, _LEVEL_SPLIT)} | {_render(rhs, _LEVEL_AND)}"
            level = _LEVEL_SPLIT
        case _:
            raise TypeError(f"not a formula node: {f!r}")
    if level < required:
        return f"({s})"
    return s


def render_formula(f: Formula) -> str:
    """Render with minimal parentheses; parse_formula(render_formula(f)) == f."""
    return _render(f, _LEVEL_SPLIT)


# ---------------------------------------------------------------------------
# structural helpers

def formula_length(f: Formula) -> int:
    """Number of connective nodes; literals and atoms count zero."""
    match f:
        case And(lhs, rhs) | Split(lhs, rhs) | Until(lhs, rhs) | Release(lhs, rhs):
            return 1 + formula_length(lhs) + formula_length(rhs)
        case Next(sub) | Eventually(sub) | Globally(sub) | ContradictoryNeg(sub):
            return 1 + formula_length(sub)
        case _:
            return 0


def props(f: Formula) -> frozenset[Proposition]:
    """All proposition names occurring in f, including atom arguments."""
    out: set[Proposition] = set()

    def walk(g: Formula):
        match g:
            case PositiveLiteral(name) | NegativeLiteral(name):
                out.add(name)
            case DepAtom(determinants, determined):
                out.update(determinants)
                out.update(determined)
            case GenAtom(_, args):
                out.update(args)
            case And(lhs, rhs) | Split(lhs, rhs) | Until(lhs, rhs) | Release(lhs, rhs):
                walk(lhs)
                walk(rhs)
            case Next(sub) | Eventually(sub) | Globally(sub) | ContradictoryNeg(sub):
                walk(sub)

    walk(f)
    return frozenset(out)


def dualize(f: Formula) -> Formula:
    """Syntactic dual of a pure-LTL formula; satisfies t |= dual(f) iff t |/= f."""
    match f:
        case PositiveLiteral(name):
            return NegativeLiteral(name)
        case NegativeLiteral(name):
            return PositiveLiteral(name)
        case And(lhs, rhs):
            return Split(dualize(lhs), dualize(rhs))
        case Split(lhs, rhs):
            return And(dualize(lhs), dualize(rhs))
        case Next(sub):
            return Next(dualize(sub))
        case Eventually(sub):
            return Globally(dualize(sub))
        case Globally(sub):
            return Eventually(dualize(sub))
        case Until(lhs, rhs):
            return Release(dualize(lhs), dualize(rhs))
        case Release(lhs, rhs):
            return Until(dualize(lhs), dualize(rhs))
        case _:
            raise UnsupportedFragment("dualize is defined for pure LTL only")


def bar_transform(f: Formula) -> Formula:
    """Replace every negative literal !p by a fresh positive proposition p_bar.

    Splitjunctions and atoms are rejected; `~` passes through unchanged.
    Raises NameCollision when some p_bar already occurs in f.
    """
    present = props(f)

    def walk(g: Formula) -> Formula:
        match g:
            case PositiveLiteral(_):
                return g
            case NegativeLiteral(name):
                bar = name + "_bar"
                if bar in present:
                    raise NameCollision(f"proposition {bar!r} already occurs in the formula")
                return PositiveLiteral(bar)
            case And(lhs, rhs):
                return And(walk(lhs), walk(rhs))
            case Next(sub):
                return Next(walk(sub))
            case Eventually(sub):
                return Eventually(walk(sub))
            case Globally(sub):
                return Globally(walk(sub))
            case Until(lhs, rhs):
                return Until(walk(lhs), walk(rhs))
            case Release(lhs, rhs):
                return Release(walk(lhs), walk(rhs))
            case ContradictoryNeg(sub):
                return ContradictoryNeg(walk(sub))
            case Split(_, _):
                raise UnsupportedFragment("bar transform requires a splitjunction-free formula")
            case _:
                raise UnsupportedFragment("bar transform does not accept dependence or generalised atoms")

    return walk(f)


@dataclass(frozen=True)
class FragmentInfo:
    pure_ltl: bool
    splitjunction_free: bool
    has_dep: bool
    has_gen: bool
    has_contradictory_neg: bool
    downward_closed_syntactic: bool


def fragment_info(f: Formula, atoms=None) -> FragmentInfo:
    """Classify which fragment f belongs to.

    `atoms` maps generalised atom names to their registered definitions and is
    consulted for downward closure flags and arity checks.
    """
    has_dep = has_gen = has_neg = has_split = False
    gen_downward = True

    def walk(g: Formula):
        nonlocal has_dep, has_gen, has_neg, has_split, gen_downward
        match g:
            case PositiveLiteral(_) | NegativeLiteral(_):
                pass
            case DepAtom(_, _):
                has_dep = True
            case GenAtom(name, args):
                has_gen = True
                defn = atoms.get(name) if atoms is not None else None
                if defn is None:
                    raise UnknownAtom(f"generalised atom {name!r} is not registered")
                if defn.arity is not None and defn.arity != len(args):
                    raise ArityMismatch(
                        f"atom {name!r} expects {defn.arity} arguments, got {len(args)}"
                    )
                if not defn.downward_closed:
                    gen_downward = False
            case Split(lhs, rhs):
                has_split = True
                walk(lhs)
                walk(rhs)
            case And(lhs, rhs) | Until(lhs, rhs) | Release(lhs, rhs):
                walk(lhs)
                walk(rhs)
            case ContradictoryNeg(sub):
                has_neg = True
                walk(sub)
            case Next(sub) | Eventually(sub) | Globally(sub):
                walk(sub)
            case _:
                raise TypeError(f"not a formula node: {g!r}")

    walk(f)
    return FragmentInfo(
        pure_ltl=not (has_dep or has_gen or has_neg),
        splitjunction_free=not has_split,
        has_dep=has_dep,
        has_gen=has_gen,
        has_contradictory_neg=has_neg,
        downward_closed_syntactic=not has_neg and gen_downward,
    )
