"""Path checking for teams of traces, synchronous and asynchronous.

Synchronous semantics moves all traces in lockstep: temporal operators
quantify one global shift k, bounded by prfx(T) + lcm(T) because the team
of suffixes repeats beyond that.  Asynchronous semantics gives each trace
its own shift; temporal operators quantify vectors of per-trace shifts,
each bounded by that trace's own |prefix| + |loop| suffix classes.

For Until and Release the asynchronous side conditions are evaluated per
trace on singleton teams: `a U b` needs one shift vector whose shifted
team satisfies b while every strictly earlier suffix of each trace
satisfies a on its own.  This is the unique reading compatible with
flatness of pure LTL (per-vector side conditions, whether strictly or
partially smaller, both yield wrong answers on teams mixing shift 0 with
positive shifts).

Splitjunction enumerates subteam pairs.  For downward-closed formulas it
is enough to consider partitions (DisjointOnly); a trace can go to a part
only if the part's formula holds on the singleton, and a partially built
part that already fails its formula can never recover — both prunings are
licensed by downward closure.  With contradictory negation in scope the
semantics-faithful mode enumerates all covers (AllCovers), including
overlapping ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Callable

from .errors import BoundExceeded, DuplicateName, UnknownAtom, VectorSpaceExceeded
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
    fragment_info,
)
from .classical import check_trace
from .traces import PropSet, Team, UPTrace, serialize_trace, suffix_encoding, value_at


# ---------------------------------------------------------------------------
# generalised atoms


@dataclass(frozen=True)
class GenAtomDef:
    """A registered team atom.

    `predicate` receives the first-position letters of the team's traces
    (deterministically ordered; it must not depend on the order) and the
    proposition arguments from the formula occurrence.  `downward_closed`
    and `singleton_trivial` are declared by the registrant and gate the
    optimisations that rely on them.
    """

    name: str
    arity: int | None
    predicate: Callable[[list[PropSet], tuple[str, ...]], bool]
    downward_closed: bool = False
    singleton_trivial: bool = False


class AtomRegistry:
    """Immutable-after-setup mapping from atom names to definitions."""

    def __init__(self, defs=()):
        self._defs: dict[str, GenAtomDef] = {}
        for defn in defs:
            self.register(defn)

    def register(self, defn: GenAtomDef) -> "AtomRegistry":
        if defn.name in self._defs:
            raise DuplicateName(f"atom {defn.name!r} is already registered")
        self._defs[defn.name] = defn
        return self

    def get(self, name: str) -> GenAtomDef | None:
        return self._defs.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self._defs))


def register_gen_atom(defn: GenAtomDef, registry: AtomRegistry | None = None) -> AtomRegistry:
    """Add a definition to a registry (a fresh one when none is given)."""
    if registry is None:
        registry = AtomRegistry()
    return registry.register(defn)


def eval_dep_atom(first_letters, determinants, determined) -> bool:
    """dep(determinants; determined) on a list of first-position letters.

    True iff any two entries that agree on membership of every determinant
    also agree on every determined proposition.
    """
    groups: dict[tuple[bool, ...], tuple[bool, ...]] = {}
    for letter in first_letters:
        key = tuple(p in letter for p in determinants)
        val = tuple(p in letter for p in determined)
        seen = groups.get(key)
        if seen is None:
            groups[key] = val
        elif seen != val:
            return False
    return True


def constancy_atom_def(name: str = "constant") -> GenAtomDef:
    """A ready-made generalised atom equivalent to dep(; args)."""

    def predicate(first_letters, args):
        return eval_dep_atom(first_letters, (), args)

    return GenAtomDef(
        name=name,
        arity=None,
        predicate=predicate,
        downward_closed=True,
        singleton_trivial=True,
    )


# ---------------------------------------------------------------------------
# evaluation configuration


class SplitMode(Enum):
    DISJOINT_ONLY = "disjoint"
    ALL_COVERS = "covers"


@dataclass(frozen=True)
class Limits:
    """Resource caps; exceeding one raises, never silently degrades."""

    max_lcm: int = 10**6
    max_split_team: int = 12
    max_grid: int = 10**7


DEFAULT_LIMITS = Limits()


def _pick_mode(f: Formula, atoms) -> SplitMode:
    info = fragment_info(f, atoms)
    return SplitMode.DISJOINT_ONLY if info.downward_closed_syntactic else SplitMode.ALL_COVERS


def _flatten_split(f: Formula) -> list[Formula]:
    if isinstance(f, Split):
        return _flatten_split(f.lhs) + _flatten_split(f.rhs)
    return [f]


class _Engine:
    """Shared machinery: memoisation, split enumeration, atoms."""

    def __init__(self, atoms, limits: Limits, mode: SplitMode):
        self.atoms = atoms
        self.limits = limits
        self.mode = mode
        # memo keys use id(f): formula nodes are immutable, stay alive via
        # the root formula for the engine's lifetime, and identity lookups
        # avoid rehashing deep subtrees on every cache probe
        self.memo: dict = {}
        self._pure: dict[int, bool] = {}
        self._flat: dict[int, bool] = {}
        self._parts: dict[int, list] = {}
        self._trace_memo: dict = {}

    # fragment caches ----------------------------------------------------

    def pure(self, f: Formula) -> bool:
        got = self._pure.get(id(f))
        if got is None:
            match f:
                case DepAtom() | GenAtom() | ContradictoryNeg():
                    got = False
                case And(lhs=a, rhs=b) | Split(lhs=a, rhs=b) | Until(lhs=a, rhs=b) | Release(lhs=a, rhs=b):
                    got = self.pure(a) and self.pure(b)
                case Next(sub=s) | Eventually(sub=s) | Globally(sub=s):
                    got = self.pure(s)
                case _:
                    got = True
            self._pure[id(f)] = got
        return got

    def flat(self, f: Formula) -> bool:
        """Literals, And, Split and Next only: satisfied iff per-trace."""
        got = self._flat.get(id(f))
        if got is None:
            match f:
                case PositiveLiteral() | NegativeLiteral():
                    got = True
                case And(lhs=a, rhs=b) | Split(lhs=a, rhs=b):
                    got = self.flat(a) and self.flat(b)
                case Next(sub=s):
                    got = self.flat(s)
                case _:
                    got = False
            self._flat[id(f)] = got
        return got

    def trace_value(self, t: UPTrace, f: Formula) -> bool:
        key = (t, id(f))
        got = self._trace_memo.get(key)
        if got is None:
            got = check_trace(t, f)
            self._trace_memo[key] = got
        return got

    # atoms ----------------------------------------------------------------

    def first_letters(self, team) -> list[PropSet]:
        return [value_at(t, 0) for t in sorted(team, key=serialize_trace)]

    def atom_value(self, team, f) -> bool:
        match f:
            case PositiveLiteral(name=name):
                return all(name in value_at(t, 0) for t in team)
            case NegativeLiteral(name=name):
                return all(name not in value_at(t, 0) for t in team)
            case DepAtom(determinants=ds, determined=qs):
                return eval_dep_atom(self.first_letters(team), ds, qs)
            case GenAtom(name=name, args=args):
                defn = self.atoms.get(name) if self.atoms is not None else None
                if defn is None:
                    raise UnknownAtom(f"generalised atom {name!r} is not registered")
                return bool(defn.predicate(self.first_letters(team), args))
        raise AssertionError(f"not an atom: {f!r}")

    # splits ---------------------------------------------------------------

    def split_value(self, team, f: Split) -> bool:
        if self.mode is SplitMode.DISJOINT_ONLY:
            parts = self._parts.get(id(f))
            if parts is None:
                parts = _flatten_split(f)
                self._parts[id(f)] = parts
            return self._split_disjoint(team, parts)
        return self._split_covers(team, f.lhs, f.rhs)

    def _split_disjoint(self, team, parts) -> bool:
        # Assign every trace to exactly one part.  Sound and complete for
        # downward-closed parts: singleton failure rules a part out for a
        # trace, and a partial part that fails can never be repaired by
        # adding more traces.  Empty parts hold trivially (empty team
        # property for ~-free formulas).
        candidates: dict = {}
        for t in team:
            cand = [i for i, p in enumerate(parts) if self.eval(frozenset((t,)), p)]
            if not cand:
                return False
            candidates[t] = cand
        # traces with a single admissible part are placed up front, and each
        # such core is checked once; traces with a real choice are assigned
        # by backtracking with incremental checks on the growing parts
        acc = [
            frozenset(t for t in team if candidates[t] == [i])
            for i in range(len(parts))
        ]
        for i, core in enumerate(acc):
            if core and not self.eval(core, parts[i]):
                return False
        flexible = sorted(
            (t for t in team if len(candidates[t]) > 1),
            key=lambda t: (len(candidates[t]), serialize_trace(t)),
        )

        def assign(idx: int) -> bool:
            if idx == len(flexible):
                # parts left empty must hold on the empty team (automatic
                # for ~-free formulas, decisive when a forced DisjointOnly
                # run meets contradictory negation)
                return all(
                    self.eval(acc[i], parts[i]) for i in range(len(parts)) if not acc[i]
                )
            t = flexible[idx]
            for i in candidates[t]:
                grown = acc[i] | {t}
                if self.eval(grown, parts[i]):
                    previous = acc[i]
                    acc[i] = grown
                    if assign(idx + 1):
                        return True
                    acc[i] = previous
            return False

        return assign(0)

    def _split_covers(self, team, lhs, rhs) -> bool:
        n = len(team)
        if n > self.limits.max_split_team:
            raise BoundExceeded(
                f"cover enumeration over {n} traces exceeds the cap of "
                f"{self.limits.max_split_team}"
            )
        members = sorted(team, key=serialize_trace)
        seen = set()
        for sides in product((0, 1, 2), repeat=n):  # left, right, both
            left = frozenset(m for m, s in zip(members, sides) if s != 1)
            right = frozenset(m for m, s in zip(members, sides) if s != 0)
            if (left, right) in seen:
                continue
            seen.add((left, right))
            if self.eval(left, lhs) and self.eval(right, rhs):
                return True
        return False

    def eval(self, team, f) -> bool:  # overridden
        raise NotImplementedError


class _SyncEngine(_Engine):
    def bound(self, team) -> int:
        loops = 1
        prefix = 0
        for t in team:
            loops = math.lcm(loops, len(t.loop))
            if self.limits.max_lcm is not None and loops > self.limits.max_lcm:
                raise BoundExceeded(
                    f"loop lcm exceeds the cap of {self.limits.max_lcm}"
                )
            prefix = max(prefix, len(t.prefix))
        return prefix + loops

    def shifted(self, team, k: int):
        return frozenset(suffix_encoding(t, k) for t in team)

    def eval(self, team, f) -> bool:
        key = (team, id(f))
        got = self.memo.get(key)
        if got is not None:
            return got
        if self.pure(f) and (len(team) == 1 or self.flat(f)):
            result = all(self.trace_value(t, f) for t in team)
        else:
            match f:
                case PositiveLiteral() | NegativeLiteral() | DepAtom() | GenAtom():
                    result = self.atom_value(team, f)
                case ContradictoryNeg(sub=sub):
                    result = not self.eval(team, sub)
                case And(lhs=lhs, rhs=rhs):
                    result = self.eval(team, lhs) and self.eval(team, rhs)
                case Split():
                    result = self.split_value(team, f)
                case Next(sub=sub):
                    result = self.eval(self.shifted(team, 1), sub)
                case Eventually(sub=sub):
                    bound = self.bound(team)
                    result = any(
                        self.eval(self.shifted(team, k), sub) for k in range(bound + 1)
                    )
                case Globally(sub=sub):
                    bound = self.bound(team)
                    result = all(
                        self.eval(self.shifted(team, k), sub) for k in range(bound + 1)
                    )
                case Until(lhs=lhs, rhs=rhs):
                    bound = self.bound(team)
                    result = False
                    for k in range(bound + 1):
                        if self.eval(self.shifted(team, k), rhs) and all(
                            self.eval(self.shifted(team, j), lhs) for j in range(k)
                        ):
                            result = True
                            break
                case Release(lhs=lhs, rhs=rhs):
                    bound = self.bound(team)
                    result = True
                    for k in range(bound + 1):
                        if not self.eval(self.shifted(team, k), rhs) and not any(
                            self.eval(self.shifted(team, j), lhs) for j in range(k)
                        ):
                            result = False
                            break
                case _:
                    raise AssertionError(f"not a formula node: {f!r}")
        self.memo[key] = result
        return result


class _AsyncEngine(_Engine):
    def __init__(self, atoms, limits, mode, flat_subformulas: bool):
        super().__init__(atoms, limits, mode)
        self.flat_subformulas = flat_subformulas
        self._orbit_memo: dict = {}
        self._orbits: dict = {}

    @staticmethod
    def classes(t: UPTrace) -> int:
        return len(t.prefix) + len(t.loop)

    def orbit_key(self, team):
        """Phase-blind team key: the multiset of per-trace shift orbits.

        F and G quantify over all shift vectors, so their value on a team
        is unchanged when members are replaced by other suffixes of
        themselves; memoising on the orbit multiset collapses all those
        phase variants into one computation.
        """
        counts: dict = {}
        for t in team:
            orb = self._orbits.get(t)
            if orb is None:
                orb = frozenset(
                    suffix_encoding(t, k) for k in range(self.classes(t))
                )
                self._orbits[t] = orb
            counts[orb] = counts.get(orb, 0) + 1
        return frozenset(counts.items())

    def vectors(self, members, ranges):
        """Distinct shifted teams from per-trace shift ranges, budgeted."""
        space = 1
        for r in ranges:
            space *= len(r)
            if space > self.limits.max_grid:
                raise VectorSpaceExceeded(
                    f"shift vector grid exceeds the cap of {self.limits.max_grid}"
                )
        suffixes = [
            tuple(suffix_encoding(t, k) for k in r)
            for t, r in zip(members, ranges)
        ]
        seen = set()
        out = []
        for combo in product(*suffixes):
            shifted = frozenset(combo)
            if shifted not in seen:
                seen.add(shifted)
                out.append(shifted)
        return out

    def singleton_holds(self, t: UPTrace, f) -> bool:
        return self.eval(frozenset((t,)), f)

    def eval(self, team, f) -> bool:
        key = (team, id(f))
        got = self.memo.get(key)
        if got is not None:
            return got
        if self.pure(f) and (self.flat_subformulas or self.flat(f) or len(team) == 1):
            # flatness: pure LTL holds on a team iff it holds on every trace
            result = all(self.trace_value(t, f) for t in team)
        else:
            match f:
                case PositiveLiteral() | NegativeLiteral() | DepAtom() | GenAtom():
                    result = self.atom_value(team, f)
                case ContradictoryNeg(sub=sub):
                    result = not self.eval(team, sub)
                case And(lhs=lhs, rhs=rhs):
                    result = self.eval(team, lhs) and self.eval(team, rhs)
                case Split():
                    result = self.split_value(team, f)
                case Next(sub=sub):
                    result = self.eval(
                        frozenset(suffix_encoding(t, 1) for t in team), sub
                    )
                case Eventually(sub=sub):
                    okey = (self.orbit_key(team), id(f))
                    cached = self._orbit_memo.get(okey)
                    if cached is None:
                        members = sorted(team, key=serialize_trace)
                        ranges = [range(self.classes(t)) for t in members]
                        cached = any(
                            self.eval(s, sub) for s in self.vectors(members, ranges)
                        )
                        self._orbit_memo[okey] = cached
                    result = cached
                case Globally(sub=sub):
                    okey = (self.orbit_key(team), id(f))
                    cached = self._orbit_memo.get(okey)
                    if cached is None:
                        members = sorted(team, key=serialize_trace)
                        ranges = [range(self.classes(t)) for t in members]
                        cached = all(
                            self.eval(s, sub) for s in self.vectors(members, ranges)
                        )
                        self._orbit_memo[okey] = cached
                    result = cached
                case Until(lhs=lhs, rhs=rhs):
                    members = sorted(team, key=serialize_trace)
                    ranges = []
                    for t in members:
                        stop = None
                        for j in range(self.classes(t)):
                            if not self.singleton_holds(suffix_encoding(t, j), lhs):
                                stop = j
                                break
                        # k_t may equal the first failure point (the side
                        # condition constrains strictly earlier suffixes)
                        ranges.append(
                            range(stop + 1) if stop is not None else range(self.classes(t))
                        )
                    result = any(
                        self.eval(s, rhs) for s in self.vectors(members, ranges)
                    )
                case Release(lhs=lhs, rhs=rhs):
                    members = sorted(team, key=serialize_trace)
                    ranges = []
                    for t in members:
                        release = None
                        for j in range(self.classes(t)):
                            if self.singleton_holds(suffix_encoding(t, j), lhs):
                                release = j
                                break
                        # beyond its release point a trace no longer
                        # constrains the team
                        ranges.append(
                            range(release + 1)
                            if release is not None
                            else range(self.classes(t))
                        )
                    result = all(
                        self.eval(s, rhs) for s in self.vectors(members, ranges)
                    )
                case _:
                    raise AssertionError(f"not a formula node: {f!r}")
        self.memo[key] = result
        return result


# ---------------------------------------------------------------------------
# public entry points


def _prepare(team, f, atoms, limits, split_mode):
    fragment_info(f, atoms)  # validates atom registration and arities
    mode = split_mode if split_mode is not None else _pick_mode(f, atoms)
    members = frozenset(team)
    return members, mode, limits if limits is not None else DEFAULT_LIMITS


def check_sync(
    team: Team,
    f: Formula,
    atoms: AtomRegistry | None = None,
    limits: Limits | None = None,
    split_mode: SplitMode | None = None,
) -> bool:
    """Does the team satisfy f under synchronous semantics?"""
    members, mode, limits = _prepare(team, f, atoms, limits, split_mode)
    engine = _SyncEngine(atoms, limits, mode)
    return engine.eval(members, f)


def check_async(
    team: Team,
    f: Formula,
    atoms: AtomRegistry | None = None,
    limits: Limits | None = None,
    split_mode: SplitMode | None = None,
) -> bool:
    """Does the team satisfy f under asynchronous semantics?

    Pure LTL goes through the flatness fast path (satisfied iff every
    trace satisfies it on its own); everything else through the shift
    vector engine.
    """
    members, mode, limits = _prepare(team, f, atoms, limits, split_mode)
    engine = _AsyncEngine(atoms, limits, mode, flat_subformulas=True)
    if engine.pure(f):
        return all(check_trace(t, f) for t in members)
    return engine.eval(members, f)


def check_async_general(
    team: Team,
    f: Formula,
    atoms: AtomRegistry | None = None,
    limits: Limits | None = None,
    split_mode: SplitMode | None = None,
    flat_subformulas: bool = True,
) -> bool:
    """Asynchronous semantics via explicit shift vectors.

    With flat_subformulas=False even pure-LTL subformulas are evaluated
    through the literal vector clauses (slower; used to cross-check the
    flatness shortcut).
    """
    members, mode, limits = _prepare(team, f, atoms, limits, split_mode)
    engine = _AsyncEngine(atoms, limits, mode, flat_subformulas=flat_subformulas)
    return engine.eval(members, f)
