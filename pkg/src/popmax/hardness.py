"""3SAT-to-matching reduction showing min-cost Pareto-optimal matching is hard.

A formula is first normalized so every clause is purely positive (2-3
literals) or purely negative (exactly 2 literals, each negative literal
occurring once). Every positive literal occurrence gets a 4-node gadget,
every variable a 4-node gadget for its negation, wired by cost-1
consistency edges; gadget-internal edges cost 0. The instance then has a
cost-0 Pareto-optimal matching iff the formula is satisfiable, and
`check_reduction` confirms both directions exhaustively at tiny scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import Edge, Instance, Matching, compare, make_matching, matching_cost, wt_edge
from .errors import (
    BoundExceededError,
    InternalError,
    ParseError,
    UnsupportedClauseError,
    ValidationError,
)
from .popularity import is_pareto_optimal

Clause = tuple[int, ...]  # nonzero literals; negative int = negated variable


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if not c:
                raise ValidationError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(f"literal {lit} out of range")


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS CNF: `p cnf <vars> <clauses>` header, clauses 0-terminated."""
    num_vars = 0
    clauses: list[Clause] = []
    current: list[int] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("c") or s.startswith("#"):
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected `p cnf <vars> <clauses>`", lineno)
            num_vars = int(parts[2])
            saw_header = True
            continue
        for tok in s.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if not saw_header:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    return CnfFormula(num_vars, tuple(clauses))


def to_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def evaluate(f: CnfFormula, assignment: dict[int, bool]) -> bool:
    return all(
        any(assignment[abs(l)] == (l > 0) for l in c) for c in f.clauses)


def brute_sat(f: CnfFormula) -> bool:
    return any(evaluate(f, dict(zip(range(1, f.num_vars + 1), bits)))
               for bits in itertools.product((False, True), repeat=f.num_vars))


def pad_unit_clauses(f: CnfFormula) -> CnfFormula:
    """Duplicate the literal of 1-literal clauses; 1-literal positive
    clauses survive the transformation and have no gadget otherwise."""
    return CnfFormula(f.num_vars,
                      tuple(c if len(c) > 1 else (c[0], c[0]) for c in f.clauses))


def transform_formula(f: CnfFormula) -> CnfFormula:
    """Split every variable X_i into X_i and its stand-in X_{n+i}.

    Occurrences of -X_i become X_{n+i}, and the clauses (X_i or X_{n+i})
    and (-X_i or -X_{n+i}) are added, so the result has 2n variables, all
    original clauses purely positive, every negative clause 2 literals,
    every negative literal occurring exactly once. Equisatisfiable with
    the input.
    """
    n = f.num_vars
    clauses: list[Clause] = []
    for c in f.clauses:
        if len(c) > 3:
            raise ValidationError("clauses must have at most 3 literals")
        clauses.append(tuple(l if l > 0 else n + (-l) for l in c))
    for i in range(1, n + 1):
        clauses.append((i, n + i))
        clauses.append((-i, -(n + i)))
    return CnfFormula(2 * n, tuple(clauses))


# ---------------------------------------------------------------------------
# Gadget construction


@dataclass(frozen=True)
class GadgetInstance:
    """The reduction graph with bookkeeping from formula parts to nodes.

    `pos[(clause_idx, slot)]` holds the (a, b, a', b') node names of that
    positive-literal occurrence's gadget; `neg[var]` the (c, d, c', d')
    names of the variable's negation gadget. Gadget-internal edges cost 0,
    everything else (clause cross edges and consistency edges) costs 1.
    """

    instance: Instance
    formula: CnfFormula
    pos: dict[tuple[int, int], tuple[str, str, str, str]] = field(repr=False)
    neg: dict[int, tuple[str, str, str, str]] = field(repr=False)
    occurrences: dict[int, tuple[tuple[int, int], ...]] = field(repr=False)


def _shape_check(f: CnfFormula) -> tuple[list[int], list[int]]:
    """Classify clause indices into positive/negative and validate the
    transformed shape."""
    pos_idx, neg_idx = [], []
    neg_seen: set[int] = set()
    for ci, c in enumerate(f.clauses):
        signs = {l > 0 for l in c}
        if len(signs) != 1:
            raise UnsupportedClauseError(
                f"clause {ci} mixes positive and negative literals; run transform_formula first")
        if c[0] > 0:
            if len(c) == 1:
                raise UnsupportedClauseError(
                    f"clause {ci} is a 1-literal positive clause, which has no gadget; "
                    "pad it to (l or l) with pad_unit_clauses before transforming")
            if len(c) > 3:
                raise UnsupportedClauseError(f"clause {ci} has more than 3 literals")
            pos_idx.append(ci)
        else:
            if len(c) != 2:
                raise UnsupportedClauseError(
                    f"negative clause {ci} must have exactly 2 literals")
            for l in c:
                if -l in neg_seen:
                    raise UnsupportedClauseError(
                        f"negative literal {l} occurs more than once")
                neg_seen.add(-l)
            neg_idx.append(ci)
    used = {abs(l) for c in f.clauses for l in c}
    for v in used:
        if v not in neg_seen:
            raise UnsupportedClauseError(
                f"variable X{v} has no negation clause; the consistency wiring needs one")
    return pos_idx, neg_idx


def build_gadget_instance(f: CnfFormula) -> GadgetInstance:
    """Build the reduction graph for a formula in transformed shape."""
    pos_idx, neg_idx = _shape_check(f)
    pos: dict[tuple[int, int], tuple[str, str, str, str]] = {}
    neg: dict[int, tuple[str, str, str, str]] = {}
    occurrences: dict[int, list[tuple[int, int]]] = {}
    for ci in pos_idx:
        for slot, lit in enumerate(f.clauses[ci]):
            v = lit
            stem = f"X{v}c{ci}o{slot}"
            pos[(ci, slot)] = (f"a{stem}", f"b{stem}", f"ap{stem}", f"bp{stem}")
            occurrences.setdefault(v, []).append((ci, slot))
    for ci in neg_idx:
        for lit in f.clauses[ci]:
            v = -lit
            neg[v] = (f"cX{v}", f"dX{v}", f"cpX{v}", f"dpX{v}")
            occurrences.setdefault(v, [])

    side_a: list[str] = []
    side_b: list[str] = []
    prefs: dict[str, tuple[str, ...]] = {}
    for ci in pos_idx:
        k = len(f.clauses[ci])
        for slot, lit in enumerate(f.clauses[ci]):
            a, b, ap, bp = pos[(ci, slot)]
            _, b_prev, _, _ = pos[(ci, (slot - 1) % k)]
            a_next = pos[(ci, (slot + 1) % k)][0]
            _c, _d, _cp, dp = neg[lit]
            c = neg[lit][0]
            side_a += [a, ap]
            side_b += [b, bp]
            prefs[a] = (b_prev, b, dp, bp)
            prefs[ap] = (b, bp)
            prefs[b] = (a_next, a, ap)
            prefs[bp] = (ap, c, a)
    for ci in neg_idx:
        u, v = (-l for l in f.clauses[ci])
        for this, other in ((u, v), (v, u)):
            c, d, cp, dp = neg[this]
            c_other, d_other = neg[other][0], neg[other][1]
            bp_block = tuple(pos[occ][3] for occ in occurrences[this])
            a_block = tuple(pos[occ][0] for occ in occurrences[this])
            side_a += [c, cp]
            side_b += [d, dp]
            prefs[c] = (d_other, d) + bp_block + (dp,)
            prefs[cp] = (d, dp)
            prefs[d] = (c_other, c, cp)
            prefs[dp] = (cp,) + a_block + (c,)

    costs: dict[Edge, int] = {}
    for ci in pos_idx:
        k = len(f.clauses[ci])
        for slot, lit in enumerate(f.clauses[ci]):
            a, b, ap, bp = pos[(ci, slot)]
            b_prev = pos[(ci, (slot - 1) % k)][1]
            c, _d, _cp, dp = neg[lit]
            costs[(a, b_prev)] = 1
            costs[(a, dp)] = 1
            costs[(c, bp)] = 1
    for ci in neg_idx:
        u, v = (-l for l in f.clauses[ci])
        costs[(neg[u][0], neg[v][1])] = 1
        costs[(neg[v][0], neg[u][1])] = 1

    inst = Instance(tuple(side_a), tuple(side_b), prefs, costs)
    return GadgetInstance(inst, f, pos, neg,
                          {v: tuple(o) for v, o in occurrences.items()})


def _pattern_pairs(g: GadgetInstance, neg_true: dict[int, bool],
                   occ_true: dict[tuple[int, int], bool]) -> Matching:
    """Cost-0 perfect matching from per-gadget pattern choices."""
    pairs = []
    for v, (c, d, cp, dp) in g.neg.items():
        if neg_true[v]:
            pairs += [(c, d), (cp, dp)]
        else:
            pairs += [(c, dp), (cp, d)]
    for occ, (a, b, ap, bp) in g.pos.items():
        if occ_true[occ]:
            pairs += [(a, bp), (ap, b)]
        else:
            pairs += [(a, b), (ap, bp)]
    return make_matching(g.instance, pairs)


def assignment_to_matching(g: GadgetInstance, assignment: dict[int, bool]) -> Matching:
    """Perfect cost-0 Pareto-optimal matching from a satisfying assignment.

    True variables pair (c,d),(c',d') and take (a,b'),(a',b) in each of
    their occurrence gadgets; false variables the other diagonal.
    """
    if not evaluate(g.formula, assignment):
        raise ValidationError("assignment does not satisfy the formula")
    occ_true = {occ: assignment[v] for v, occs in g.occurrences.items() for occ in occs}
    neg_true = {v: assignment[v] for v in g.neg}
    return _pattern_pairs(g, neg_true, occ_true)


def matching_to_assignment(g: GadgetInstance, m: Matching) -> dict[int, bool]:
    """Satisfying assignment from a Pareto-optimal matching of cost 0:
    a variable is false iff its negation gadget pairs (c,d'),(c',d)."""
    if matching_cost(g.instance, m) != 0:
        raise ValidationError("matching has nonzero cost")
    if not is_pareto_optimal(g.instance, m).pareto:
        raise ValidationError("matching is not Pareto-optimal")
    assignment = {}
    for v, (c, d, cp, dp) in g.neg.items():
        if (c, dp) in m.pairs:
            assignment[v] = False
        elif (c, d) in m.pairs:
            assignment[v] = True
        else:
            raise InternalError("cost-0 Pareto-optimal matching breaks a negation gadget")
    if not evaluate(g.formula, assignment):
        raise InternalError("derived assignment does not satisfy the formula")
    return assignment


# ---------------------------------------------------------------------------
# End-to-end checker


@dataclass(frozen=True)
class ReductionReport:
    satisfiable: bool
    cost0_pareto_exists: bool
    candidates_checked: int
    canonical_iff_ok: bool
    converse_ok: bool
    perfect_ok: bool
    consistency_ok: bool
    falsifying_cycles_ok: bool
    gadget_nodes: int
    gadget_edges: int

    @property
    def equivalence_holds(self) -> bool:
        return (self.satisfiable == self.cost0_pareto_exists
                and self.canonical_iff_ok and self.converse_ok and self.perfect_ok
                and self.consistency_ok and self.falsifying_cycles_ok)

    def __str__(self):
        lines = [
            f"formula satisfiable:              {self.satisfiable}",
            f"cost-0 Pareto-optimal exists:     {self.cost0_pareto_exists}",
            f"candidates checked:               {self.candidates_checked}",
            f"canonical matchings match SAT:    {self.canonical_iff_ok}",
            f"satisfying assignments round-trip: {self.converse_ok}",
            f"cost-0 Pareto implies perfect:    {self.perfect_ok}",
            f"consistency pairs excluded:       {self.consistency_ok}",
            f"falsifying cycles certified:      {self.falsifying_cycles_ok}",
            f"gadget size:                      {self.gadget_nodes} nodes, {self.gadget_edges} edges",
            f"equivalence holds:                {self.equivalence_holds}",
        ]
        return "\n".join(lines)


def _dominates(g: GadgetInstance, m: Matching, cycle_edges: list[Edge],
               expect_voters: int) -> bool:
    """Certify a falsifying cycle: its non-matching edges all block m and
    toggling it beats m `expect_voters` to zero."""
    for e in cycle_edges:
        if e not in m.pairs and wt_edge(g.instance, m, e) != 2:
            return False
    flipped = Matching(frozenset(m.pairs) ^ frozenset(cycle_edges))
    tally = compare(g.instance, flipped, m)
    return tally.phi_mn == expect_voters and tally.phi_nm == 0 \
        and not is_pareto_optimal(g.instance, m).pareto


def check_reduction(f: CnfFormula, max_vars: int = 4, max_clauses: int = 6) -> ReductionReport:
    """Confirm at tiny scale that the gadget instance has a cost-0
    Pareto-optimal matching iff the formula is satisfiable.

    Checks, exhaustively over all assignments of the transformed formula:
    the canonical pattern matching of an assignment is Pareto-optimal iff
    the assignment satisfies; every satisfying assignment round-trips
    through the gadget; every non-perfect cost-0 matching leaves two
    adjacent nodes unmatched; and each falsified-clause and
    consistency-violation pattern carries its all-blocking cycle, certified
    by an explicit vote count.
    """
    if f.num_vars > max_vars:
        raise BoundExceededError(f"{f.num_vars} variables > bound {max_vars}")
    if len(f.clauses) > max_clauses:
        raise BoundExceededError(f"{len(f.clauses)} clauses > bound {max_clauses}")
    ft = transform_formula(f)
    satisfiable = brute_sat(f)
    if brute_sat(ft) != satisfiable:
        raise InternalError("transformation broke satisfiability")
    g = build_gadget_instance(ft)
    inst = g.instance

    canonical_iff_ok = True
    converse_ok = True
    exists = False
    count = 0
    for bits in itertools.product((False, True), repeat=ft.num_vars):
        beta = dict(zip(range(1, ft.num_vars + 1), bits))
        sat = evaluate(ft, beta)
        occ_true = {occ: beta[v] for v, occs in g.occurrences.items() for occ in occs}
        neg_true = {v: beta[v] for v in g.neg}
        m = _pattern_pairs(g, neg_true, occ_true)
        count += 1
        if matching_cost(inst, m) != 0 or len(m.pairs) * 2 != len(inst.nodes):
            raise InternalError("pattern matching is not perfect and free")
        pareto = is_pareto_optimal(inst, m).pareto
        if pareto != sat:
            canonical_iff_ok = False
        if pareto:
            exists = True
        if sat:
            m2 = assignment_to_matching(g, beta)
            if matching_cost(inst, m2) != 0 or not is_pareto_optimal(inst, m2).pareto:
                converse_ok = False
            elif matching_to_assignment(g, m2) != beta:
                converse_ok = False

    perfect_ok = True
    quads = list(g.pos.values()) + list(g.neg.values())
    for x, y, xp, yp in quads:
        internal = [(x, y), (x, yp), (xp, y), (xp, yp)]
        for pattern in ([], [(x, y)], [(x, yp)], [(xp, y)], [(xp, yp)]):
            matched = {n for e in pattern for n in e}
            free = [n for n in (x, y, xp, yp) if n not in matched]
            if not any(inst.has_edge(u, v) for u in free for v in free
                       if inst.is_a(u) and not inst.is_a(v)):
                perfect_ok = False

    consistency_ok = True
    all_true = {v: True for v in g.neg}
    all_occ_true = {occ: True for occ in g.pos}
    for v in sorted(g.neg):
        if not g.occurrences[v]:
            continue
        neg_true = dict(all_true)
        neg_true[v] = False  # negation gadget in false pattern, occurrences true
        m = _pattern_pairs(g, neg_true, all_occ_true)
        c, d, cp, dp = g.neg[v]
        for occ in g.occurrences[v]:
            a, b, ap, bp = g.pos[occ]
            cycle = [(a, dp), (c, dp), (c, bp), (a, bp)]
            if not _dominates(g, m, cycle, 4):
                consistency_ok = False

    falsifying_cycles_ok = True
    for ci, clause in enumerate(ft.clauses):
        k = len(clause)
        if clause[0] > 0:
            neg_true = {v: v not in set(clause) for v in g.neg}
            occ_true = {occ: neg_true[v] for v, occs in g.occurrences.items() for occ in occs}
            m = _pattern_pairs(g, neg_true, occ_true)
            cycle = []
            for slot in range(k):
                a = g.pos[(ci, slot)][0]
                b_prev = g.pos[(ci, (slot - 1) % k)][1]
                b = g.pos[(ci, slot)][1]
                cycle += [(a, b_prev), (a, b)]
            if not _dominates(g, m, cycle, 2 * k):
                falsifying_cycles_ok = False
        else:
            u, v = (-l for l in clause)
            neg_true = {w: w in (u, v) for w in g.neg}
            occ_true = {occ: neg_true[w] for w, occs in g.occurrences.items() for occ in occs}
            m = _pattern_pairs(g, neg_true, occ_true)
            cu, du = g.neg[u][0], g.neg[u][1]
            cv, dv = g.neg[v][0], g.neg[v][1]
            cycle = [(cu, dv), (cu, du), (cv, du), (cv, dv)]
            if not _dominates(g, m, cycle, 4):
                falsifying_cycles_ok = False

    return ReductionReport(
        satisfiable=satisfiable,
        cost0_pareto_exists=exists,
        candidates_checked=count,
        canonical_iff_ok=canonical_iff_ok,
        converse_ok=converse_ok,
        perfect_ok=perfect_ok,
        consistency_ok=consistency_ok,
        falsifying_cycles_ok=falsifying_cycles_ok,
        gadget_nodes=len(inst.nodes),
        gadget_edges=len(inst.edges),
    )
