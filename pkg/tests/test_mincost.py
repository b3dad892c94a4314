"""Rotation poset, enumeration, max-flow, weighted closure, LP emitter."""

from __future__ import annotations

import random
import re

import pytest

from popmax import (
    FlowNetwork,
    LimitExceededError,
    emit_lp,
    enumerate_stable,
    find_rotations,
    gale_shapley,
    is_stable,
    make_matching,
    matching_cost,
    max_flow,
    min_cost_popular_max,
    min_cost_stable,
    parse_instance,
    verify_certificate,
    verify_popular_max,
)
from popmax.gstar import build_gstar, project
from popmax.mincost import closed_subsets, eliminate, matching_of_closed_subset
from popmax.oracle import brute_min_cost_popular_max, enum_matchings

from conftest import random_cases


def _brute_stable(inst, bound=30):
    return [m for m in enum_matchings(inst, bound) if is_stable(inst, m)]


def test_no_rotations_single_edge(i0):
    poset = find_rotations(i0)
    assert poset.rotations == ()
    assert poset.base.pairs == gale_shapley(i0, "B").pairs  # woman-optimal too


def test_i2_single_rotation(i2):
    poset = find_rotations(i2)
    assert len(poset.rotations) == 1
    rot = poset.rotations[0]
    assert set(rot.cycle) == {("a1", "b1"), ("a2", "b2")}
    assert sorted(eliminate(i2, poset.base, rot).pairs) == [("a1", "b2"), ("a2", "b1")]


def test_enumerate_fixtures(i0, i1, i2):
    assert len(enumerate_stable(i0)) == 1
    assert len(enumerate_stable(i2)) == 2
    assert [sorted(m.pairs) for m in enumerate_stable(i1)] == [[("a2", "b1")]]


def test_enumerate_limit_distinct_from_completion(i2):
    with pytest.raises(LimitExceededError) as exc:
        enumerate_stable(i2, limit=1)
    assert len(exc.value.partial) == 1
    assert len(enumerate_stable(i2, limit=2)) == 2


def test_gstar_poset_projects_to_both_popular_max(i2):
    gs = build_gstar(i2)
    projections = {frozenset(project(gs, s).pairs) for s in enumerate_stable(gs.inner)}
    assert projections == {frozenset({("a1", "b1"), ("a2", "b2")}),
                           frozenset({("a1", "b2"), ("a2", "b1")})}


def test_max_flow_single_arc():
    res = max_flow(FlowNetwork(2, ((0, 1, 3),), 0, 1))
    assert res.value == 3 and res.cut_capacity == 3


def test_max_flow_diamond():
    net = FlowNetwork(4, ((0, 1, 2), (0, 2, 1), (1, 3, 1), (2, 3, 2), (1, 2, 1)), 0, 3)
    res = max_flow(net)
    assert res.value == 3
    assert res.cut_capacity == res.value


def test_max_flow_disconnected():
    assert max_flow(FlowNetwork(3, (), 0, 2)).value == 0


def test_max_flow_random_cut_certificates():
    rng = random.Random(99)
    for _ in range(30):
        n = rng.randint(2, 8)
        arcs = tuple((rng.randrange(n), rng.randrange(n), rng.randint(0, 9))
                     for _ in range(rng.randint(0, 20)))
        arcs = tuple((u, v, c) for u, v, c in arcs if u != v)
        res = max_flow(FlowNetwork(n, arcs, 0, n - 1))
        assert res.cut_capacity == res.value  # also asserted internally


def test_min_cost_stable_unique(i0):
    assert sorted(min_cost_stable(i0).pairs) == [("a", "b")]


def test_min_cost_stable_picks_cheaper(i2c):
    m = min_cost_stable(i2c)
    assert sorted(m.pairs) == [("a1", "b2"), ("a2", "b1")]
    assert matching_cost(i2c, m) == 0


def test_min_cost_stable_tie_break_deterministic(i2):
    text = ("side A a1 a2\nside B b1 b2\n"
            "pref a1: b1 b2\npref a2: b2 b1\npref b1: a2 a1\npref b2: a1 a2\n"
            "cost a1 b1 1\ncost a2 b2 1\ncost a1 b2 1\ncost a2 b1 1\n")
    inst = parse_instance(text)
    first = min_cost_stable(inst)
    assert matching_cost(inst, first) == 2
    # inclusion-minimal optimal closure: the base matching wins ties
    assert first.pairs == gale_shapley(inst, "A").pairs
    assert min_cost_stable(inst).pairs == first.pairs


def test_min_cost_popular_max_fixtures(i0, i1, i2c):
    assert sorted(min_cost_popular_max(i0).matching.pairs) == [("a", "b")]
    res = min_cost_popular_max(i2c)
    assert sorted(res.matching.pairs) == [("a1", "b2"), ("a2", "b1")]
    assert res.cost == 0
    assert verify_certificate(i2c, res.matching, res.certificate).ok
    res1 = min_cost_popular_max(i1)
    assert sorted(res1.matching.pairs) == [("a1", "b1"), ("a2", "b2")]


def test_closed_subset_bijection_and_topo_independence():
    """Closed-subset enumeration hits every stable matching exactly once,
    and eliminating a closed subset in any topological order gives the
    same matching."""
    rng = random.Random(31337)
    for _seed, inst in random_cases(40, 5, 9000, costs=(0, 9)):
        got = sorted(sorted(m.pairs) for m in enumerate_stable(inst))
        want = sorted(sorted(m.pairs) for m in _brute_stable(inst))
        assert got == want
        poset = find_rotations(inst)
        for subset in closed_subsets(poset):
            baseline = matching_of_closed_subset(poset, subset)
            remaining = set(subset)
            done: set[int] = set()
            m = poset.base
            while remaining:
                ready = [r for r in remaining if set(poset.preds[r]) <= done]
                r = rng.choice(sorted(ready))
                m = eliminate(inst, m, poset.rotations[r])
                remaining.discard(r)
                done.add(r)
            assert m.pairs == baseline.pairs


def test_rotation_set_independent_of_discovery_order():
    for _seed, inst in random_cases(40, 5, 9100):
        first = {r.cycle for r in find_rotations(inst, tie_break="min").rotations}
        last = {r.cycle for r in find_rotations(inst, tie_break="max").rotations}
        assert first == last


def test_min_cost_stable_matches_oracle():
    for _seed, inst in random_cases(60, 5, 9200, costs=(0, 9)):
        m = min_cost_stable(inst)
        assert is_stable(inst, m)
        best = min(matching_cost(inst, s) for s in _brute_stable(inst))
        assert matching_cost(inst, m) == best


def test_min_cost_popular_max_matches_oracle():
    for _seed, inst in random_cases(50, 4, 9300, costs=(0, 9)):
        res = min_cost_popular_max(inst)
        assert verify_popular_max(inst, res.matching).popular
        assert verify_certificate(inst, res.matching, res.certificate).ok
        _m, best = brute_min_cost_popular_max(inst, bound=30)
        assert res.cost == best


# ---------------------------------------------------------------------------
# LP emitter


def _parse_lp(text: str):
    """Minimal parser for the emitter's own output."""
    section = None
    objective: dict[str, float] = {}
    rows = []  # (name, {var: coef}, op, rhs)
    bounds: dict[str, tuple[float, float]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Bounds", "End"):
            section = line
            continue
        if section == "Minimize":
            _name, expr = line.split(":", 1)
            objective.update(_parse_expr(expr))
        elif section == "Subject To":
            name, rest = line.split(":", 1)
            m = re.match(r"(.*?)(<=|>=|=)\s*(-?\d+)\s*$", rest.strip())
            coefs = _parse_expr(m.group(1))
            rows.append((name.strip(), coefs, m.group(2), float(m.group(3))))
        elif section == "Bounds":
            lo, var, hi = re.match(r"(-?\d+)\s*<=\s*(\S+)\s*<=\s*(-?\d+)", line).groups()
            bounds[var] = (float(lo), float(hi))
    return objective, rows, bounds


def _parse_expr(expr: str) -> dict[str, float]:
    coefs: dict[str, float] = {}
    sign, pending = 1.0, None
    for tok in expr.split():
        if tok == "+":
            sign, pending = 1.0, None
        elif tok == "-":
            sign, pending = -1.0, None
        elif re.fullmatch(r"-?\d+", tok):
            pending = float(tok)
        else:
            coefs[tok] = coefs.get(tok, 0.0) + sign * (pending if pending is not None else 1.0)
            sign, pending = 1.0, None
    return coefs


def test_emit_lp_single_edge_structure(i0):
    text = emit_lp(i0)
    _obj, rows, _bounds = _parse_lp(text)
    stab = [r for r in rows if r[0].startswith("stab.")]
    link = [r for r in rows if r[0].startswith("link.")]
    assert len(stab) == 1 and len(link) == 1
    assert "x.a.b" in link[0][1]


def test_emit_lp_i1_variable_counts(i1):
    text = emit_lp(i1)
    variables = set()
    _obj, rows, bounds = _parse_lp(text)
    for _name, coefs, _op, _rhs in rows:
        variables |= set(coefs)
    assert sum(v.startswith("xs.") for v in variables) == 10
    assert sum(v.startswith("x.") and not v.startswith("xs.") for v in variables) == 3
    assert set(bounds) == variables


def test_emit_lp_deterministic(i2c):
    assert emit_lp(i2c) == emit_lp(i2c)


def _solve_lp(text: str):
    import numpy as np
    from scipy.optimize import linprog

    objective, rows, bounds = _parse_lp(text)
    variables = sorted(bounds)
    index = {v: i for i, v in enumerate(variables)}
    c = np.zeros(len(variables))
    for v, coef in objective.items():
        c[index[v]] = coef
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for _name, coefs, op, rhs in rows:
        row = np.zeros(len(variables))
        for v, coef in coefs.items():
            row[index[v]] = coef
        if op == "<=":
            a_ub.append(row)
            b_ub.append(rhs)
        elif op == ">=":
            a_ub.append(-row)
            b_ub.append(-rhs)
        else:
            a_eq.append(row)
            b_eq.append(rhs)
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                  A_eq=np.array(a_eq), b_eq=np.array(b_eq),
                  bounds=[bounds[v] for v in variables], method="highs")
    assert res.success
    return res.fun, dict(zip(variables, res.x))


def test_emit_lp_external_solver_matches(i2c):
    pytest.importorskip("scipy")
    optimum, values = _solve_lp(emit_lp(i2c))
    res = min_cost_popular_max(i2c)
    assert abs(optimum - res.cost) < 1e-6
    for v, x in values.items():
        assert min(abs(x), abs(x - 1)) < 1e-6  # integral vertex
    chosen = {v for v, x in values.items()
              if v.startswith("x.") and not v.startswith("xs.") and x > 0.5}
    assert chosen == {"x.a1.b2", "x.a2.b1"}


def test_emit_lp_external_solver_random():
    pytest.importorskip("scipy")
    for _seed, inst in random_cases(12, 3, 9400, costs=(0, 9)):
        if not inst.edges:
            continue
        optimum, values = _solve_lp(emit_lp(inst))
        res = min_cost_popular_max(inst)
        assert abs(optimum - res.cost) < 1e-6
        for x in values.values():
            assert min(abs(x), abs(x - 1)) < 1e-6
        pairs = []
        for v, x in values.items():
            if v.startswith("x.") and not v.startswith("xs.") and x > 0.5:
                _, a, b = v.split(".")
                pairs.append((a, b))
        m = make_matching(inst, pairs)
        assert verify_popular_max(inst, m).popular
        assert matching_cost(inst, m) == res.cost
