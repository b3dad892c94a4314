"""Exponential-time ground truth used to cross-validate every solver.

Each routine is a direct transcription of a definition over exhaustive
enumeration and shares no logic with the polynomial-time code paths. All of
it is desk-scale only: enumeration refuses to run past its edge-count bound.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Instance, Matching, compare, matching_cost, unpopularity_ratio
from .errors import BoundExceededError

DEFAULT_BOUND = 24


def enum_matchings(inst: Instance, bound: int = DEFAULT_BOUND) -> list[Matching]:
    """All matchings of the instance, including the empty one.

    Recursion over edges with disjointness pruning; visits every partial
    matching exactly once. Refuses instances with more than `bound` edges.
    """
    edges = inst.edges
    if len(edges) > bound:
        raise BoundExceededError(
            f"enumeration bound exceeded: {len(edges)} edges > bound {bound}")
    out: list[Matching] = []
    chosen: list = []
    used: set[str] = set()

    def rec(i: int):
        if i == len(edges):
            out.append(Matching(frozenset(chosen)))
            return
        rec(i + 1)
        a, b = edges[i]
        if a not in used and b not in used:
            chosen.append(edges[i])
            used.add(a)
            used.add(b)
            rec(i + 1)
            chosen.pop()
            used.discard(a)
            used.discard(b)

    rec(0)
    return out


def enum_max_matchings(inst: Instance, bound: int = DEFAULT_BOUND) -> list[Matching]:
    """All maximum-cardinality matchings."""
    all_matchings = enum_matchings(inst, bound)
    best = max((len(m) for m in all_matchings), default=0)
    return [m for m in all_matchings if len(m) == best]


def brute_popular_max(inst: Instance, bound: int = DEFAULT_BOUND) -> list[Matching]:
    """All maximum matchings M with delta(M, N) >= 0 against every maximum N."""
    maxes = enum_max_matchings(inst, bound)
    return [m for m in maxes if all(compare(inst, m, n).delta >= 0 for n in maxes)]


def brute_min_cost_popular_max(inst: Instance, bound: int = DEFAULT_BOUND) -> tuple[Matching, int]:
    """Cheapest popular max-matching; ties broken by lexicographic edge list."""
    candidates = brute_popular_max(inst, bound)
    best = min(candidates, key=lambda m: (matching_cost(inst, m), sorted(m.pairs)))
    return best, matching_cost(inst, best)


def brute_unpopularity_factor(inst: Instance, m: Matching,
                              bound: int = DEFAULT_BOUND) -> Fraction | float:
    """max over N != M of phi(N,M)/phi(M,N); inf when some N wins unopposed.

    Matchings N with phi(N,M) = 0 contribute 0; the 0/0 corner never takes
    the max because of that convention.
    """
    worst: Fraction | float = Fraction(0)
    for n in enum_matchings(inst, bound):
        if n.pairs == m.pairs:
            continue
        tally = compare(inst, n, m)
        ratio = unpopularity_ratio(tally.phi_mn, tally.phi_nm)
        if ratio == float("inf"):
            return float("inf")
        if ratio > worst:
            worst = ratio
    return worst
