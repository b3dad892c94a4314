"""Instance and matching data model, file formats, and vote arithmetic.

An instance is a bipartite graph where every node holds a strict preference
list over its neighbors; edges may carry integer costs. Matchings, the
three-valued edge weight `wt_edge`, and head-to-head vote tallies between
matchings are defined here and used by every other module.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ParseError, ValidationError

Edge = tuple[str, str]  # always oriented (A-side id, B-side id)


@dataclass(frozen=True)
class Instance:
    """A bipartite preference instance.

    `prefs[u]` lists u's neighbors from most to least preferred. Preference
    lists must be mutually consistent: b appears in prefs[a] iff a appears in
    prefs[b], and the edge set is exactly those mutual pairs. Costs default
    to 0 and are stored only for nonzero values; keys must be edges.
    Instances are immutable; all operations on them are pure.
    """

    side_a: tuple[str, ...]
    side_b: tuple[str, ...]
    prefs: dict[str, tuple[str, ...]]
    costs: dict[Edge, int] = field(default_factory=dict)
    edges: tuple[Edge, ...] = field(init=False, repr=False, compare=False)
    _rank: dict[str, dict[str, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "side_a", tuple(self.side_a))
        object.__setattr__(self, "side_b", tuple(self.side_b))
        a_set, b_set = set(self.side_a), set(self.side_b)
        if len(a_set) != len(self.side_a) or len(b_set) != len(self.side_b) or (a_set & b_set):
            raise ValidationError("duplicate node identifier")
        for u in list(a_set) + list(b_set):
            if not u or any(c.isspace() for c in u) or ":" in u:
                raise ValidationError(f"bad node identifier {u!r}")
        prefs = {u: tuple(self.prefs.get(u, ())) for u in self.side_a + self.side_b}
        if set(self.prefs) - set(prefs):
            raise ValidationError(f"preference list for unknown node {sorted(set(self.prefs) - set(prefs))[0]!r}")
        object.__setattr__(self, "prefs", prefs)
        for u, lst in prefs.items():
            opposite = b_set if u in a_set else a_set
            if len(set(lst)) != len(lst):
                raise ValidationError(f"duplicate entry in preference list of {u!r}")
            for v in lst:
                if v not in opposite:
                    raise ValidationError(f"{u!r} lists {v!r}, which is not on the opposite side")
        for a in self.side_a:
            for b in prefs[a]:
                if a not in prefs[b]:
                    raise ValidationError(f"non-mutual preference: {a!r} lists {b!r} but not vice versa")
        for b in self.side_b:
            for a in prefs[b]:
                if b not in prefs[a]:
                    raise ValidationError(f"non-mutual preference: {b!r} lists {a!r} but not vice versa")
        edges = tuple((a, b) for a in self.side_a for b in prefs[a])
        object.__setattr__(self, "edges", edges)
        rank = {u: {v: i for i, v in enumerate(lst)} for u, lst in prefs.items()}
        object.__setattr__(self, "_rank", rank)
        edge_set = set(edges)
        costs = {}
        for e, c in self.costs.items():
            e = (e[0], e[1])
            if e not in edge_set:
                raise ValidationError(f"cost on non-edge {e!r}")
            if int(c) != c:
                raise ValidationError(f"non-integer cost on {e!r}")
            if int(c) != 0:
                costs[e] = int(c)
        object.__setattr__(self, "costs", costs)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.side_a + self.side_b

    def is_a(self, u: str) -> bool:
        try:
            cache = self.__dict__["_a_cache"]
        except KeyError:
            cache = self.__dict__["_a_cache"] = frozenset(self.side_a)
        return u in cache

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._rank.get(u, {})

    def as_edge(self, u: str, v: str) -> Edge:
        """Return (u, v) oriented as (A-node, B-node); raise if not an edge."""
        if self.is_a(u):
            a, b = u, v
        else:
            a, b = v, u
        if not self.has_edge(a, b):
            raise ValidationError(f"({u!r}, {v!r}) is not an edge")
        return (a, b)

    def rank(self, u: str, v: str) -> int:
        return self._rank[u][v]

    def prefers(self, u: str, v: str, w: str | None) -> bool:
        """True iff u strictly prefers neighbor v to w; w=None means unmatched."""
        if w is None:
            return True
        return self._rank[u][v] < self._rank[u][w]

    def cost(self, e: Edge) -> int:
        return self.costs.get(e, 0)


@dataclass(frozen=True)
class Matching:
    """A set of pairwise node-disjoint edges; `partner` is the derived map."""

    pairs: frozenset[Edge]
    partner: dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        partner: dict[str, str] = {}
        for a, b in self.pairs:
            if a in partner or b in partner:
                raise ValidationError("matching edges are not node-disjoint")
            partner[a] = b
            partner[b] = a
        object.__setattr__(self, "partner", partner)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def partner_of(self, u: str) -> str | None:
        return self.partner.get(u)

    def is_matched(self, u: str) -> bool:
        return u in self.partner


def make_matching(inst: Instance, pairs: Iterable[Sequence[str]]) -> Matching:
    """Validate `pairs` against `inst` and build a Matching (edges reoriented A-first)."""
    return Matching(frozenset(inst.as_edge(u, v) for u, v in pairs))


class VoteTally:
    """Head-to-head election result between two matchings."""

    __slots__ = ("phi_mn", "phi_nm")

    def __init__(self, phi_mn: int, phi_nm: int):
        self.phi_mn = phi_mn
        self.phi_nm = phi_nm

    @property
    def delta(self) -> int:
        return self.phi_mn - self.phi_nm

    def astuple(self) -> tuple[int, int, int]:
        return (self.phi_mn, self.phi_nm, self.delta)

    def __eq__(self, other):
        if isinstance(other, tuple):
            return self.astuple() == other
        return isinstance(other, VoteTally) and self.astuple() == other.astuple()

    def __repr__(self):
        return f"VoteTally(phi_mn={self.phi_mn}, phi_nm={self.phi_nm}, delta={self.delta})"


def wt_edge(inst: Instance, m: Matching, e: Edge) -> int:
    """Three-valued weight of edge e against matching m.

    2 if both endpoints strictly prefer each other to their assignment under m
    (a blocking edge; being unmatched counts as the worst assignment), -2 if
    both endpoints are matched and strictly prefer their partners to each
    other, 0 otherwise. In particular every edge of m has weight 0.
    """
    a, b = inst.as_edge(*e)
    pa = m.partner_of(a)
    pb = m.partner_of(b)
    if pa == b:
        return 0
    a_wants = inst.prefers(a, b, pa)
    b_wants = inst.prefers(b, a, pb)
    if a_wants and b_wants:
        return 2
    if not a_wants and not b_wants and pa is not None and pb is not None:
        return -2
    return 0


def compare(inst: Instance, m: Matching, n: Matching) -> VoteTally:
    """Count the nodes preferring m over n and vice versa.

    A node prefers the matching where it is matched over one where it is not;
    a node matched in both prefers the better partner; otherwise it abstains.
    """
    phi_mn = phi_nm = 0
    for u in inst.nodes:
        pm = m.partner_of(u)
        pn = n.partner_of(u)
        if pm == pn:
            continue
        rm = inst._rank[u][pm] if pm is not None else None
        rn = inst._rank[u][pn] if pn is not None else None
        if rn is None or (rm is not None and rm < rn):
            phi_mn += 1
        elif rm is None or rn < rm:
            phi_nm += 1
    return VoteTally(phi_mn, phi_nm)


def is_maximum(inst: Instance, m: Matching) -> tuple[bool, list[str] | None]:
    """Decide maximality by alternating-path search from unmatched A-nodes.

    Returns (True, None) or (False, witness) where the witness is an
    augmenting path as a node sequence a - b - ... - b' between two
    unmatched nodes.
    """
    for start in inst.side_a:
        if m.is_matched(start):
            continue
        parent: dict[str, str] = {}
        frontier = [start]
        seen_a = {start}
        while frontier:
            next_frontier = []
            for a in frontier:
                for b in inst.prefs[a]:
                    if b in parent:
                        continue
                    parent[b] = a
                    pb = m.partner_of(b)
                    if pb is None:
                        path = [b]
                        node = b
                        while node != start:
                            node = parent[node]
                            path.append(node)
                        path.reverse()
                        return False, path
                    if pb not in seen_a:
                        seen_a.add(pb)
                        parent[pb] = b
                        next_frontier.append(pb)
            frontier = next_frontier
    return True, None


def matching_cost(inst: Instance, m: Matching) -> int:
    """Total integer cost of the matching; the empty matching costs 0."""
    return sum(inst.cost(e) for e in m.pairs)


# ---------------------------------------------------------------------------
# File formats


def parse_instance(text: str) -> Instance:
    """Parse the line-based instance format.

    Lines: `side A <id> ...`, `side B <id> ...`, `pref <id>: <id> ...`,
    `cost <idA> <idB> <int>`. Lines whose first non-blank character is '#'
    are comments. A node without a pref line has an empty list.
    """
    side_a: list[str] = []
    side_b: list[str] = []
    prefs: dict[str, tuple[str, ...]] = {}
    costs: dict[Edge, int] = {}
    pref_lines: dict[str, int] = {}
    cost_lines: dict[Edge, int] = {}

    def column(line: str, token_index: int) -> int:
        pos = 0
        for _ in range(token_index):
            while pos < len(line) and line[pos].isspace():
                pos += 1
            while pos < len(line) and not line[pos].isspace():
                pos += 1
        while pos < len(line) and line[pos].isspace():
            pos += 1
        return pos + 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        kind = tokens[0]
        if kind == "side":
            if len(tokens) < 2 or tokens[1] not in ("A", "B"):
                raise ParseError("expected `side A ...` or `side B ...`", lineno, column(raw, 1))
            (side_a if tokens[1] == "A" else side_b).extend(tokens[2:])
        elif kind == "pref":
            if len(tokens) < 2 or not tokens[1].endswith(":"):
                raise ParseError("expected `pref <id>: ...`", lineno, column(raw, 1))
            node = tokens[1][:-1]
            if not node:
                raise ParseError("empty node id before ':'", lineno, column(raw, 1))
            if node in pref_lines:
                raise ParseError(f"duplicate pref line for {node!r} (first at line {pref_lines[node]})", lineno, column(raw, 1))
            pref_lines[node] = lineno
            prefs[node] = tuple(tokens[2:])
        elif kind == "cost":
            if len(tokens) != 4:
                raise ParseError("expected `cost <idA> <idB> <integer>`", lineno, column(raw, 1))
            try:
                value = int(tokens[3])
            except ValueError:
                raise ParseError(f"bad integer {tokens[3]!r}", lineno, column(raw, 3)) from None
            e = (tokens[1], tokens[2])
            if e in cost_lines:
                raise ParseError(f"duplicate cost line for {e} (first at line {cost_lines[e]})", lineno, column(raw, 1))
            cost_lines[e] = lineno
            costs[e] = value
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno, column(raw, 0))

    known = set(side_a) | set(side_b)
    for node in prefs:
        if node not in known:
            raise ValidationError(f"pref line for undeclared node {node!r} (line {pref_lines[node]})")
    for (u, v), lineno in cost_lines.items():
        if u not in set(side_a) or v not in set(side_b):
            raise ValidationError(f"cost line must name an A-node then a B-node (line {lineno})")
    return Instance(tuple(side_a), tuple(side_b), prefs, costs)


def serialize_instance(inst: Instance) -> str:
    """Canonical text for an instance; parse(serialize(x)) == x."""
    lines = ["side A " + " ".join(inst.side_a) if inst.side_a else "side A",
             "side B " + " ".join(inst.side_b) if inst.side_b else "side B"]
    for u in inst.nodes:
        lst = inst.prefs[u]
        lines.append(f"pref {u}:" + ("" if not lst else " " + " ".join(lst)))
    for e in inst.edges:
        if inst.cost(e):
            lines.append(f"cost {e[0]} {e[1]} {inst.cost(e)}")
    return "\n".join(lines) + "\n"


def serialize_matching(m: Matching) -> str:
    """One `<idA> <idB>` line per pair, lexicographically sorted."""
    return "".join(f"{a} {b}\n" for a, b in sorted(m.pairs))


def matching_to_json(inst: Instance, m: Matching) -> dict:
    return {"pairs": [list(e) for e in sorted(m.pairs)], "cost": matching_cost(inst, m)}


def parse_matching(inst: Instance, text: str) -> Matching:
    """Parse a matching file: `<idA> <idB>` lines, or the JSON alternative."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", exc.lineno, exc.colno) from None
        if not isinstance(obj, dict) or "pairs" not in obj:
            raise ValidationError("matching JSON must be an object with a `pairs` key")
        return make_matching(inst, [tuple(p) for p in obj["pairs"]])
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        tokens = s.split()
        if len(tokens) != 2:
            raise ParseError("expected `<idA> <idB>`", lineno)
        pairs.append((tokens[0], tokens[1]))
    return make_matching(inst, pairs)


def random_instance(na: int, nb: int, density: float, seed: int,
                    cost_range: tuple[int, int] | None = None) -> Instance:
    """Seeded random instance: sample an edge set, then shuffle each node's
    incident list independently. Guarantees mutual preference lists."""
    rng = random.Random(seed)
    side_a = tuple(f"a{i+1}" for i in range(na))
    side_b = tuple(f"b{j+1}" for j in range(nb))
    incident: dict[str, list[str]] = {u: [] for u in side_a + side_b}
    costs: dict[Edge, int] = {}
    for a in side_a:
        for b in side_b:
            if rng.random() < density:
                incident[a].append(b)
                incident[b].append(a)
                if cost_range is not None:
                    costs[(a, b)] = rng.randint(cost_range[0], cost_range[1])
    for u in side_a + side_b:
        rng.shuffle(incident[u])
    prefs = {u: tuple(v) for u, v in incident.items()}
    return Instance(side_a, side_b, prefs, costs)


def unpopularity_ratio(phi_nm: int, phi_mn: int) -> Fraction | float:
    """phi(N,M)/phi(M,N) with the conventions used for u(M)."""
    if phi_nm == 0:
        return Fraction(0)
    if phi_mn == 0:
        return float("inf")
    return Fraction(phi_nm, phi_mn)
