"""Popularity and Pareto-optimality verdicts with explicit witnesses.

A maximum matching is popular within the maximum matchings iff there is no
positive-weight alternating cycle and no positive-weight alternating path
with an unmatched endpoint. Both conditions are decided on a digraph whose
vertices are matched pairs plus unmatched nodes and whose arcs are the
non-matching edges weighted by `wt_edge`; matched edges live inside the
pair vertices and contribute weight 0, so directed walks are alternating
walks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Edge, Instance, Matching, is_maximum, wt_edge
from .errors import InternalError, NotMaximumError

Arc = tuple[int, int, str, str, int]  # (src vertex, dst vertex, a, b, weight)


@dataclass(frozen=True)
class AlternatingDigraph:
    vertices: tuple[tuple, ...]  # ("pair", a, b) | ("ua", a) | ("ub", b)
    arcs: tuple[Arc, ...]
    vertex_of: dict[str, int]


def build_alternating_digraph(inst: Instance, m: Matching) -> AlternatingDigraph:
    """One vertex per matched pair and per unmatched node; one arc per
    non-matching edge (a, b), from a's vertex to b's vertex."""
    vertices: list[tuple] = []
    vertex_of: dict[str, int] = {}
    for a, b in sorted(m.pairs):
        vertex_of[a] = vertex_of[b] = len(vertices)
        vertices.append(("pair", a, b))
    for a in inst.side_a:
        if a not in vertex_of:
            vertex_of[a] = len(vertices)
            vertices.append(("ua", a))
    for b in inst.side_b:
        if b not in vertex_of:
            vertex_of[b] = len(vertices)
            vertices.append(("ub", b))
    arcs = []
    for a, b in inst.edges:
        if m.partner_of(a) == b:
            continue
        arcs.append((vertex_of[a], vertex_of[b], a, b, wt_edge(inst, m, (a, b))))
    return AlternatingDigraph(tuple(vertices), tuple(arcs), vertex_of)


@dataclass(frozen=True)
class Witness:
    """An alternating cycle or path.

    `edges` is the ordered edge list of the walk (matching edges included);
    `nodes` is the node sequence: bare unmatched endpoints, and each
    traversed pair listed entry-node first. Toggling `edges` against the
    matching realizes the improvement the witness claims.
    """

    kind: str  # "cycle" or "path"
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    weight: int


@dataclass(frozen=True)
class PopularityVerdict:
    popular: bool
    witness: Witness | None


@dataclass(frozen=True)
class ParetoVerdict:
    pareto: bool
    witness: Witness | None


def apply_witness(m: Matching, witness: Witness) -> Matching:
    """Symmetric difference of the matching with the witness edges."""
    return Matching(frozenset(m.pairs) ^ frozenset(witness.edges))


def format_witness(m: Matching, witness: Witness) -> str:
    """One-line rendering: bare ids for unmatched endpoints, `(entry,partner)`
    for traversed pairs, then the walk weight."""
    tokens = []
    nodes = witness.nodes
    i = 0
    while i < len(nodes):
        if i + 1 < len(nodes) and m.partner_of(nodes[i]) == nodes[i + 1]:
            tokens.append(f"({nodes[i]},{nodes[i + 1]})")
            i += 2
        else:
            tokens.append(nodes[i])
            i += 1
    return f"{witness.kind}: " + " ".join(tokens) + f" wt={witness.weight}"


def _cycle_witness(dg: AlternatingDigraph, cycle_arcs: list[Arc]) -> Witness:
    """Convert a directed cycle of arcs into the alternating cycle it encodes."""
    pivot = min(range(len(cycle_arcs)), key=lambda k: dg.vertices[cycle_arcs[k][1]])
    cycle_arcs = cycle_arcs[pivot:] + cycle_arcs[:pivot]
    edges: list[Edge] = []
    nodes: list[str] = []
    weight = 0
    for arc in cycle_arcs:
        _src, dst, a, b, w = arc
        kind, pa, pb = dg.vertices[dst]
        if kind != "pair":
            raise InternalError("directed cycle through an unmatched vertex")
        edges.append((a, b))
        edges.append((pa, pb))
        nodes.append(b)
        nodes.append(pa)
        weight += w
    return Witness("cycle", tuple(nodes), tuple(edges), weight)


def _path_witness(dg: AlternatingDigraph, arcs_seq: list[Arc]) -> Witness:
    """Convert a forward arc sequence into an alternating path. Terminal pair
    vertices contribute their matched edge so toggling stays a matching."""
    edges: list[Edge] = []
    nodes: list[str] = []
    weight = 0
    first = dg.vertices[arcs_seq[0][0]]
    if first[0] == "pair":
        _, pa, pb = first
        nodes.extend([pb, pa])
        edges.append((pa, pb))
    else:
        nodes.append(first[1])
    for arc in arcs_seq:
        _src, dst, a, b, w = arc
        edges.append((a, b))
        weight += w
        target = dg.vertices[dst]
        if target[0] == "pair":
            _, pa, pb = target
            nodes.extend([pb, pa])
            edges.append((pa, pb))
        else:
            nodes.append(target[1])
    return Witness("path", tuple(nodes), tuple(edges), weight)


def _positive_cycle(dg: AlternatingDigraph) -> list[Arc] | None:
    """Any positive-weight directed cycle, by n rounds of longest-walk
    relaxation with every vertex seeded at 0."""
    n = len(dg.vertices)
    dist = [0] * n
    pred: list[Arc | None] = [None] * n
    for _round in range(n + 1):
        improved = -1
        for arc in dg.arcs:
            src, dst, _a, _b, w = arc
            if dist[src] + w > dist[dst]:
                dist[dst] = dist[src] + w
                pred[dst] = arc
                improved = dst
        if improved == -1:
            return None
    v = improved
    for _ in range(n):
        v = pred[v][0]
    cycle: list[Arc] = []
    u = v
    while True:
        arc = pred[u]
        cycle.append(arc)
        u = arc[0]
        if u == v:
            break
    cycle.reverse()
    return cycle


def _longest_paths(n: int, arcs, sources: list[int]) -> tuple[list, list]:
    """Longest-walk values from the source set; requires no positive cycles."""
    dist: list[int | None] = [None] * n
    pred: list[Arc | None] = [None] * n
    for s in sources:
        dist[s] = 0
    for _ in range(n + 1):
        changed = False
        for arc in arcs:
            src, dst, _a, _b, w = arc
            if dist[src] is not None and (dist[dst] is None or dist[src] + w > dist[dst]):
                dist[dst] = dist[src] + w
                pred[dst] = arc
                changed = True
        if not changed:
            return dist, pred
    raise InternalError("relaxation did not converge although no positive cycle exists")


def _best_positive(dg: AlternatingDigraph, dist: list) -> int:
    best, best_v = 0, -1
    for i in range(len(dist)):
        if dist[i] is not None and dist[i] > best:
            best, best_v = dist[i], i
    return best_v


def _collect_arcs(pred: list, v: int) -> list[Arc]:
    seq = []
    while pred[v] is not None:
        arc = pred[v]
        seq.append(arc)
        v = arc[0]
    seq.reverse()
    return seq


def verify_popular_max(inst: Instance, m: Matching) -> PopularityVerdict:
    """Decide whether a maximum matching is popular among maximum matchings.

    Raises NotMaximumError unless m is maximum. A negative verdict carries a
    positive-weight alternating cycle (preferred when both exist) or a
    positive-weight alternating path with an unmatched endpoint; toggling
    the witness yields a maximum matching preferred by a majority.
    """
    maximum, _ = is_maximum(inst, m)
    if not maximum:
        raise NotMaximumError(
            "matching is not maximum; popularity among maximum matchings is undefined")
    dg = build_alternating_digraph(inst, m)
    cycle = _positive_cycle(dg)
    if cycle is not None:
        return PopularityVerdict(False, _cycle_witness(dg, cycle))
    n = len(dg.vertices)

    sources = [i for i, v in enumerate(dg.vertices) if v[0] == "ua"]
    if sources:
        dist, pred = _longest_paths(n, dg.arcs, sources)
        v = _best_positive(dg, dist)
        if v >= 0:
            if dg.vertices[v][0] == "ub":
                raise InternalError("augmenting path in a maximum matching")
            return PopularityVerdict(False, _path_witness(dg, _collect_arcs(pred, v)))

    sinks = [i for i, v in enumerate(dg.vertices) if v[0] == "ub"]
    if sinks:
        reversed_arcs = [(dst, src, a, b, w) for (src, dst, a, b, w) in dg.arcs]
        dist, pred = _longest_paths(n, reversed_arcs, sinks)
        v = _best_positive(dg, dist)
        if v >= 0:
            if dg.vertices[v][0] == "ua":
                raise InternalError("augmenting path in a maximum matching")
            seq = [(arc[1], arc[0], arc[2], arc[3], arc[4]) for arc in _collect_arcs(pred, v)]
            seq.reverse()
            return PopularityVerdict(False, _path_witness(dg, seq))
    return PopularityVerdict(True, None)


def is_pareto_optimal(inst: Instance, m: Matching) -> ParetoVerdict:
    """Decide Pareto-optimality (finite unpopularity factor), with a witness.

    m fails exactly when some matching beats it unopposed: a directed cycle
    of weight-2 arcs, or an augmenting path whose non-matching edges are all
    weight-2 arcs. Toggling the witness Pareto-dominates m. Cycles are
    reported in preference to paths.
    """
    dg = build_alternating_digraph(inst, m)
    n = len(dg.vertices)
    adj: list[list[Arc]] = [[] for _ in range(n)]
    for arc in dg.arcs:
        if arc[4] == 2:
            adj[arc[0]].append(arc)

    color = [0] * n
    stack_arcs: list[Arc] = []

    def dfs(v: int) -> list[Arc] | None:
        color[v] = 1
        for arc in adj[v]:
            dst = arc[1]
            if color[dst] == 0:
                stack_arcs.append(arc)
                found = dfs(dst)
                if found is not None:
                    return found
                stack_arcs.pop()
            elif color[dst] == 1:
                suffix: list[Arc] = []
                for prev in reversed(stack_arcs):
                    suffix.append(prev)
                    if prev[0] == dst:
                        break
                suffix.reverse()
                return suffix + [arc]
        color[v] = 2
        return None

    for v in range(n):
        if color[v] == 0 and dg.vertices[v][0] == "pair":
            stack_arcs.clear()
            cycle = dfs(v)
            if cycle is not None:
                return ParetoVerdict(False, _cycle_witness(dg, cycle))

    pred: dict[int, Arc] = {}
    frontier = [i for i, v in enumerate(dg.vertices) if v[0] == "ua"]
    seen = set(frontier)
    while frontier:
        nxt = []
        for v in frontier:
            for arc in adj[v]:
                dst = arc[1]
                if dst in seen:
                    continue
                seen.add(dst)
                pred[dst] = arc
                if dg.vertices[dst][0] == "ub":
                    seq = []
                    u = dst
                    while u in pred:
                        seq.append(pred[u])
                        u = pred[u][0]
                    seq.reverse()
                    return ParetoVerdict(False, _path_witness(dg, seq))
                nxt.append(dst)
        frontier = nxt
    return ParetoVerdict(True, None)
