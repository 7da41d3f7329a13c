"""Trace-quantified LTL over finite teams, and the asynchronous translations.

Sentences are prenex: a quantifier prefix binding trace variables and a
quantifier-free body whose atoms `p@pi` read proposition p on the trace
bound to pi.  The body has full classical negation; conjunction and the
derived temporal operators F, G, R are first-class nodes so that the
translations and the renderer round-trip structurally.

check_hyper enumerates the quantifiers over the members of a finite team
and evaluates the body on the joint lasso of the assigned traces: with
stem the maximal prefix length and period the lcm of the loop lengths,
position stem + period wraps back to stem.  Temporal operators advance
one shared position index across all assigned traces.

ltl_to_forall_hyper prefixes a pure-LTL formula with a single universal
trace quantifier; on any team the result agrees with the asynchronous
team semantics, because pure LTL is flat (the team satisfies it iff each
trace does).  forall_hyper_to_ltl inverts this on single-universal
sentences, pushing classical negation down to literals with the usual
temporal dualities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BoundExceeded,
    MalformedStructure,
    NotForallFragment,
    ParseError,
    UnsupportedFragment,
)
from .formula import (
    And,
    ContradictoryNeg,
    DepAtom,
    Eventually,
    Formula,
    GenAtom,
    Globally,
    NegativeLiteral,
    Next,
    PositiveLiteral,
    Release,
    Split,
    Until,
    _tokenize,
)
from .traces import Team, UPTrace, serialize_trace, value_at

__all__ = [
    "HYPER_PREFIX_CAP",
    "HAtom",
    "HNot",
    "HAnd",
    "HOr",
    "HNext",
    "HEventually",
    "HGlobally",
    "HUntil",
    "HRelease",
    "HyperBody",
    "HyperSentence",
    "free_trace_variables",
    "parse_hyper",
    "render_hyper",
    "check_hyper",
    "ltl_to_forall_hyper",
    "forall_hyper_to_ltl",
]

HYPER_PREFIX_CAP = 4


# ---------------------------------------------------------------------------
# syntax


class HyperBody:
    """Base class for quantifier-free body nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class HAtom(HyperBody):
    prop: str
    var: str


@dataclass(frozen=True)
class HNot(HyperBody):
    sub: HyperBody


@dataclass(frozen=True)
class HAnd(HyperBody):
    lhs: HyperBody
    rhs: HyperBody


@dataclass(frozen=True)
class HOr(HyperBody):
    lhs: HyperBody
    rhs: HyperBody


@dataclass(frozen=True)
class HNext(HyperBody):
    sub: HyperBody


@dataclass(frozen=True)
class HEventually(HyperBody):
    sub: HyperBody


@dataclass(frozen=True)
class HGlobally(HyperBody):
    sub: HyperBody


@dataclass(frozen=True)
class HUntil(HyperBody):
    lhs: HyperBody
    rhs: HyperBody


@dataclass(frozen=True)
class HRelease(HyperBody):
    lhs: HyperBody
    rhs: HyperBody


def free_trace_variables(body: HyperBody) -> frozenset[str]:
    """Trace variables read by the body's atoms."""
    out: set[str] = set()

    def walk(b: HyperBody):
        match b:
            case HAtom(_, var):
                out.add(var)
            case HNot(sub) | HNext(sub) | HEventually(sub) | HGlobally(sub):
                walk(sub)
            case HAnd(lhs, rhs) | HOr(lhs, rhs) | HUntil(lhs, rhs) | HRelease(lhs, rhs):
                walk(lhs)
                walk(rhs)
            case _:
                raise TypeError(f"not a hyper body node: {b!r}")

    walk(body)
    return frozenset(out)


@dataclass(frozen=True)
class HyperSentence:
    """A prenex sentence: quantifier prefix plus quantifier-free body.

    The prefix lists ("E" | "A", trace variable) pairs outermost first.
    Every trace variable read in the body must be bound by the prefix;
    rebinding a variable is allowed and the innermost binding wins.
    """

    prefix: tuple[tuple[str, str], ...]
    body: HyperBody

    def __post_init__(self):
        for quant, var in self.prefix:
            if quant not in ("E", "A"):
                raise MalformedStructure(
                    f"trace quantifier must be E or A, got {quant!r} for {var!r}"
                )
        bound = {var for _, var in self.prefix}
        unbound = free_trace_variables(self.body) - bound
        if unbound:
            raise MalformedStructure(f"unbound trace variables: {sorted(unbound)}")


# ---------------------------------------------------------------------------
# parsing (token stream shared with the plain formula grammar)


class _HyperParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def sentence(self) -> HyperSentence:
        prefix = []
        while (
            self.peek()[0] == "IDENT"
            and self.peek()[1] in ("E", "A")
            and self.peek(1)[0] == "IDENT"
            and self.peek(2)[0] == "DOT"
        ):
            quant = self.advance()[1]
            var = self.advance()[1]
            self.advance()  # the dot
            prefix.append((quant, var))
        body = self.disj()
        tok = self.peek()
        if tok[0] != "EOF":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
        return HyperSentence(tuple(prefix), body)

    def disj(self) -> HyperBody:
        f = self.conj()
        while self.peek()[0] == "PIPE":
            self.advance()
            f = HOr(f, self.conj())
        return f

    def conj(self) -> HyperBody:
        f = self.untilrel()
        while self.peek()[0] == "AMP":
            self.advance()
            f = HAnd(f, self.untilrel())
        return f

    def untilrel(self) -> HyperBody:
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
        node = HUntil if op == "U" else HRelease
        operands = [first] + chain
        f = operands[-1]
        for lhs in reversed(operands[:-1]):
            f = node(lhs, f)
        return f

    def unary(self) -> HyperBody:
        kind = self.peek()[0]
        if kind == "X":
            self.advance()
            return HNext(self.unary())
        if kind == "F":
            self.advance()
            return HEventually(self.unary())
        if kind == "G":
            self.advance()
            return HGlobally(self.unary())
        if kind == "BANG":
            self.advance()
            return HNot(self.unary())
        return self.atom()

    def atom(self) -> HyperBody:
        kind, value, line, col = self.peek()
        if kind == "LPAR":
            self.advance()
            f = self.disj()
            self.expect("RPAR")
            return f
        if kind == "IDENT":
            self.advance()
            self.expect("AT")
            var = self.expect("IDENT")[1]
            return HAtom(value, var)
        raise ParseError(f"expected an atom p@var, found {value!r}", line, col)


def parse_hyper(text: str) -> HyperSentence:
    """Parse `E pi. A rho. body` concrete syntax into a sentence."""
    return _HyperParser(text).sentence()


_LEVEL_OR, _LEVEL_AND, _LEVEL_UNTILREL, _LEVEL_UNARY, _LEVEL_ATOM = range(5)


def _render_body(b: HyperBody, required: int) -> str:
    match b:
        case HAtom(prop, var):
            return f"{prop}@{var}"
        case HNot(sub):
            s, level = f"!{_render_body(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case HNext(sub):
            s, level = f"X {_render_body(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case HEventually(sub):
            s, level = f"F {_render_body(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case HGlobally(sub):
            s, level = f"G {_render_body(sub, _LEVEL_UNARY)}", _LEVEL_UNARY
        case HUntil(lhs, rhs):
            right = _render_body(
                rhs, _LEVEL_UNTILREL if isinstance(rhs, HUntil) else _LEVEL_UNARY
            )
            s = f"{_render_body(lhs, _LEVEL_UNARY)} U {right}"
            level = _LEVEL_UNTILREL
        case HRelease(lhs, rhs):
            right = _render_body(
                rhs, _LEVEL_UNTILREL if isinstance(rhs, HRelease) else _LEVEL_UNARY
            )
            s = f"{_render_body(lhs, _LEVEL_UNARY)} R {right}"
            level = _LEVEL_UNTILREL
        case HAnd(lhs, rhs):
            s = f"{_render_body(lhs, _LEVEL_AND)} & {_render_body(rhs, _LEVEL_UNTILREL)}"
            level = _LEVEL_AND
        case HOr(lhs, rhs):
            s = f"{_render_body(lhs, _LEVEL_OR)} | {_render_body(rhs, _LEVEL_AND)}"
            level = _LEVEL_OR
        case _:
            raise TypeError(f"not a hyper body node: {b!r}")
    if level < required:
        return f"({s})"
    return s


def render_hyper(s: HyperSentence) -> str:
    """Render with minimal parentheses; parse_hyper inverts this."""
    head = "".join(f"{quant} {var}. " for quant, var in s.prefix)
    return head + _render_body(s.body, _LEVEL_OR)


# ---------------------------------------------------------------------------
# evaluation over a finite team


def _eval_body(body: HyperBody, assignment: dict[str, UPTrace]) -> bool:
    """Classical evaluation on the joint lasso of the assigned traces.

    All assigned traces advance through one shared position index; the
    index space is the joint lasso [0, stem + period) with the back edge
    stem + period -> stem, which covers every joint suffix of the
    assignment because each trace's letters repeat with its loop length
    from its own prefix end onwards.
    """
    if assignment:
        stem = max(len(t.prefix) for t in assignment.values())
        period = math.lcm(*(len(t.loop) for t in assignment.values()))
    else:
        stem, period = 0, 1
    horizon = stem + period

    def wrap(i: int) -> int:
        return i if i < horizon else stem + (i - stem) % period

    def walk(i: int) -> list[int]:
        """Positions reachable from i, in path order, each exactly once."""
        if i < stem:
            return list(range(i, horizon))
        return list(range(i, horizon)) + list(range(stem, i))

    memo: dict[tuple[int, int], bool] = {}

    def val(b: HyperBody, i: int) -> bool:
        key = (id(b), i)
        hit = memo.get(key)
        if hit is not None:
            return hit
        match b:
            case HAtom(prop, var):
                out = prop in value_at(assignment[var], i)
            case HNot(sub):
                out = not val(sub, i)
            case HAnd(lhs, rhs):
                out = val(lhs, i) and val(rhs, i)
            case HOr(lhs, rhs):
                out = val(lhs, i) or val(rhs, i)
            case HNext(sub):
                out = val(sub, wrap(i + 1))
            case HEventually(sub):
                out = any(val(sub, j) for j in walk(i))
            case HGlobally(sub):
                out = all(val(sub, j) for j in walk(i))
            case HUntil(lhs, rhs):
                # only the first rhs-position can witness: any later one
                # needs lhs on a superset of the positions before it
                out = False
                before: list[int] = []
                for j in walk(i):
                    if val(rhs, j):
                        out = all(val(lhs, w) for w in before)
                        break
                    before.append(j)
            case HRelease(lhs, rhs):
                out = True
                before = []
                for j in walk(i):
                    if not val(rhs, j):
                        out = any(val(lhs, w) for w in before)
                        break
                    before.append(j)
            case _:
                raise TypeError(f"not a hyper body node: {b!r}")
        memo[key] = out
        return out

    return val(body, 0)


def check_hyper(team: Team, s: HyperSentence, prefix_cap: int = HYPER_PREFIX_CAP) -> bool:
    """Does the team satisfy the sentence, quantifiers ranging over its members?

    An existential quantifier over the empty team is false, a universal
    one true.  Raises BoundExceeded when the prefix is longer than the
    cap (the enumeration is |team| ** len(prefix)).
    """
    if len(s.prefix) > prefix_cap:
        raise BoundExceeded(
            f"quantifier prefix length {len(s.prefix)} exceeds the cap {prefix_cap}"
        )
    members = sorted(team, key=serialize_trace)

    def run(i: int, assignment: dict[str, UPTrace]) -> bool:
        if i == len(s.prefix):
            return _eval_body(s.body, assignment)
        quant, var = s.prefix[i]
        branch = any if quant == "E" else all
        return branch(run(i + 1, {**assignment, var: t}) for t in members)

    return run(0, {})


# ---------------------------------------------------------------------------
# translations to and from the asynchronous team semantics


def ltl_to_forall_hyper(f: Formula, trace_var: str = "pi") -> HyperSentence:
    """Prefix a pure-LTL formula with one universal trace quantifier.

    Propositions become atoms on the quantified trace; the result agrees
    with the asynchronous team semantics of f on every team, since pure
    LTL holds on a team iff it holds on each trace separately.
    """

    def go(g: Formula) -> HyperBody:
        match g:
            case PositiveLiteral(name):
                return HAtom(name, trace_var)
            case NegativeLiteral(name):
                return HNot(HAtom(name, trace_var))
            case And(lhs, rhs):
                return HAnd(go(lhs), go(rhs))
            case Split(lhs, rhs):
                return HOr(go(lhs), go(rhs))
            case Next(sub):
                return HNext(go(sub))
            case Eventually(sub):
                return HEventually(go(sub))
            case Globally(sub):
                return HGlobally(go(sub))
            case Until(lhs, rhs):
                return HUntil(go(lhs), go(rhs))
            case Release(lhs, rhs):
                return HRelease(go(lhs), go(rhs))
            case ContradictoryNeg(_) | DepAtom(_, _) | GenAtom(_, _):
                raise UnsupportedFragment(
                    f"only pure LTL translates to a universal sentence: {g!r}"
                )
            case _:
                raise TypeError(f"not a formula node: {g!r}")

    return HyperSentence((("A", trace_var),), go(f))


def forall_hyper_to_ltl(s: HyperSentence) -> Formula:
    """Strip the single universal quantifier, yielding pure LTL in
    negation normal form.

    Classical negation is pushed to the literals with the temporal
    dualities (X self-dual, F/G dual, U/R dual).  Sentences with any
    other prefix are rejected: an existential quantifier has no
    team-equivalent formula (witness: a team satisfying `E pi. p@pi`
    with a subteam that does not, while team satisfaction of formulas
    is downward closed on the pure fragment).
    """
    if len(s.prefix) != 1 or s.prefix[0][0] != "A":
        raise NotForallFragment(
            "only sentences with exactly one universal quantifier translate; "
            f"got prefix {' '.join(q + ' ' + v for q, v in s.prefix) or '(empty)'}"
        )

    def go(b: HyperBody, negated: bool) -> Formula:
        match b:
            case HAtom(prop, _):
                return NegativeLiteral(prop) if negated else PositiveLiteral(prop)
            case HNot(sub):
                return go(sub, not negated)
            case HAnd(lhs, rhs):
                node = Split if negated else And
                return node(go(lhs, negated), go(rhs, negated))
            case HOr(lhs, rhs):
                node = And if negated else Split
                return node(go(lhs, negated), go(rhs, negated))
            case HNext(sub):
                return Next(go(sub, negated))
            case HEventually(sub):
                node = Globally if negated else Eventually
                return node(go(sub, negated))
            case HGlobally(sub):
                node = Eventually if negated else Globally
                return node(go(sub, negated))
            case HUntil(lhs, rhs):
                node = Release if negated else Until
                return node(go(lhs, negated), go(rhs, negated))
            case HRelease(lhs, rhs):
                node = Until if negated else Release
                return node(go(lhs, negated), go(rhs, negated))
            case _:
                raise TypeError(f"not a hyper body node: {b!r}")

    return go(s.body, False)
