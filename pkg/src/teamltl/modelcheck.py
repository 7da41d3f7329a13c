"""Team model checking over Kripke structures.

The team of all traces of a structure is usually infinite, but its
synchronous satisfaction of a splitjunction-free formula is decided by a
single derived trace: position i of that trace carries the propositions
common to all worlds reachable in exactly i steps, plus `p_bar` for the
propositions absent from all of them.  Replacing every negative literal
!p by p_bar then reduces team satisfaction to classical satisfaction of
the derived trace.

Asynchronous team model checking of pure LTL is classical model checking
(flatness).  Synchronous model checking with splitjunctions has no known
algorithm and is reported as an open problem rather than approximated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classical import LassoWitness, check_trace, classical_mc, ltl_to_nba, _emptiness_search
from .errors import (
    BoundExceeded,
    UnknownAtom,
    UnsupportedFragment,
    UnsupportedOpenProblem,
)
from .formula import Formula, bar_transform, dualize, fragment_info, props
from .kripke import (
    KripkeStructure,
    parse_kripke,
    serialize_kripke,
    traces_team_finite,
    validate_kripke,
)
from .traces import Characteristic, PropSet, UPTrace

__all__ = [
    "KripkeStructure",
    "SubsetSequence",
    "parse_kripke",
    "serialize_kripke",
    "subset_sequence",
    "team_trace",
    "tmc_sync_splitfree",
    "tmc_sync_splitfree_onthefly",
    "tmc_async",
    "traces_team_finite",
]

DEFAULT_WORLD_CAP = 20


@dataclass
class SubsetSequence:
    """The lasso of successor-set images S_0 = {init}, S_{i+1} = image(S_i)."""

    sets: list[frozenset]
    characteristic: Characteristic


def _image(k: KripkeStructure, worlds: frozenset) -> frozenset:
    out: set[str] = set()
    for w in worlds:
        out.update(k.edges[w])
    return frozenset(out)


def subset_sequence(k: KripkeStructure, world_cap: int = DEFAULT_WORLD_CAP) -> SubsetSequence:
    """Iterate successor sets from {init} until the first repetition."""
    validate_kripke(k)
    if len(k.worlds) > world_cap:
        raise BoundExceeded(
            f"subset sequence over {len(k.worlds)} worlds exceeds the cap of {world_cap}"
        )
    current = frozenset({k.init})
    seen_at = {current: 0}
    sets = [current]
    while True:
        current = _image(k, current)
        if current in seen_at:
            stem = seen_at[current]
            period = len(sets) - stem
            return SubsetSequence(sets=sets, characteristic=Characteristic(stem, period))
        seen_at[current] = len(sets)
        sets.append(current)


def _subset_letter(k: KripkeStructure, worlds: frozenset, universe: frozenset) -> PropSet:
    letter: set[str] = set()
    labels = [k.labels[w] for w in worlds]
    for p in universe:
        if all(p in label for label in labels):
            letter.add(p)
        if all(p not in label for label in labels):
            letter.add(p + "_bar")
    return frozenset(letter)


def team_trace(k: KripkeStructure, extra_props=()) -> UPTrace:
    """The derived trace of common/commonly-absent propositions.

    `extra_props` widens the proposition universe beyond the labels of k
    (needed when the formula mentions propositions no world carries).
    """
    universe = k.proposition_universe() | frozenset(extra_props)
    seq = subset_sequence(k)
    stem, period = seq.characteristic
    letters = [_subset_letter(k, worlds, universe) for worlds in seq.sets]
    return UPTrace(tuple(letters[:stem]), tuple(letters[stem : stem + period]))


def _fragment_without_registry(f: Formula):
    try:
        return fragment_info(f)
    except UnknownAtom:
        raise UnsupportedFragment(
            "team model checking does not support generalised atoms"
        ) from None


def _require_splitfree(f: Formula):
    info = _fragment_without_registry(f)
    if not info.splitjunction_free:
        raise UnsupportedOpenProblem(
            "synchronous team model checking with splitjunctions is an open "
            "problem; only splitjunction-free formulas are supported"
        )
    if info.has_dep or info.has_gen:
        raise UnsupportedFragment(
            "synchronous team model checking does not support dependence or "
            "generalised atoms"
        )
    return info


def tmc_sync_splitfree(k: KripkeStructure, f: Formula) -> bool:
    """Synchronous team model checking for splitjunction-free formulas.

    ~ is permitted and evaluated classically on the derived trace.
    """
    _require_splitfree(f)
    derived = team_trace(k, props(f))
    return check_trace(derived, bar_transform(f))


def tmc_sync_splitfree_onthefly(k: KripkeStructure, f: Formula) -> bool:
    """Same verdict as tmc_sync_splitfree, without materializing the sequence.

    Restricted to ~-free formulas: the derived trace violates the
    transformed formula iff the product of the deterministic subset graph
    with an automaton for its dual has an accepting lasso.
    """
    info = _require_splitfree(f)
    if info.has_contradictory_neg:
        raise UnsupportedFragment(
            "the on-the-fly engine requires a ~-free formula"
        )
    validate_kripke(k)
    universe = k.proposition_universe() | props(f)
    nba = ltl_to_nba(dualize(bar_transform(f)))
    relevant = frozenset(nba.props)

    start_set = frozenset({k.init})
    initial = tuple((start_set, q) for q in nba.initial)
    letters: dict[frozenset, PropSet] = {}
    adjacency: dict = {}
    queue = list(initial)
    explored = set(initial)
    while queue:
        node = queue.pop(0)
        worlds, q = node
        letter = letters.get(worlds)
        if letter is None:
            letter = _subset_letter(k, worlds, universe)
            letters[worlds] = letter
        restricted = letter & relevant
        succ_set = _image(k, worlds)
        edges = []
        for (edge_letter, succ_q) in nba.transitions.get(q, ()):
            if edge_letter == restricted:
                target = (succ_set, succ_q)
                edges.append((letter, target))
                if target not in explored:
                    explored.add(target)
                    queue.append(target)
        adjacency[node] = tuple(edges)

    accepting = {(s, q) for (s, q) in explored if q in nba.accepting}
    return _emptiness_search(initial, adjacency, accepting) is None


def tmc_async(k: KripkeStructure, f: Formula) -> tuple[bool, LassoWitness | None]:
    """Asynchronous team model checking = classical model checking (flatness)."""
    info = _fragment_without_registry(f)
    if not info.pure_ltl:
        raise UnsupportedFragment(
            "asynchronous team model checking supports pure LTL only; the "
            "extensions have hardness reductions but no evaluation algorithm"
        )
    return classical_mc(k, f)
