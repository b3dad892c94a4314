"""LP-dual certificates of popularity for maximum matchings.

A certificate assigns each matched node an even integer: nonpositive on the
A-side, nonnegative on the B-side, summing to 0, with matched pairs tight
and every edge between matched nodes satisfied. Neighbors of unmatched
B-nodes must sit at 0 and neighbors of unmatched A-nodes at the top of the
range. Certificates are read off the copy subscripts of a stable matching
of the derived instance, after compressing the subscript levels into the
range the matched-pair count allows.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Instance, Matching, is_maximum, wt_edge
from .errors import CertificateError, InternalError, NotPopularError, ParseError
from .gstar import GStarInstance, _remap_levels, build_gstar, levels, project
from .stable import gale_shapley


@dataclass(frozen=True)
class DualCertificate:
    """alpha maps every matched node to an even integer; n0_prime is the
    number of matched pairs, which bounds the value range."""

    alpha: dict[str, int]
    n0_prime: int


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    violations: tuple[str, ...]


def extract_certificate(inst: Instance, gs: GStarInstance, s: Matching) -> DualCertificate:
    """Certificate for project(s) from the level partition of stable s.

    Matched nodes at compressed level i get alpha -2i (A-side) or +2i
    (B-side). Raw copy subscripts are order-preservingly remapped into
    0..n0'-1: levels chained by an edge whose A-end sits one level above its
    B-end stay adjacent, the bottom is pinned to 0 when some unmatched
    B-node has neighbors, and the top to n0'-1 when some unmatched A-node
    does. The result always passes verify_certificate.
    """
    lp = levels(gs, s)  # raises NotStableError for unstable s
    m = project(gs, s)
    raw = {}
    for a, b in m.pairs:
        raw[a] = lp.level_of_a[a]
        raw[b] = lp.level_of_b[b]
    n0_prime = len(m.pairs)
    unmatched_a = [a for a in inst.side_a if not m.is_matched(a) and inst.prefs[a]]
    unmatched_b = [b for b in inst.side_b if not m.is_matched(b) and inst.prefs[b]]
    remap = _remap_levels(inst, m, raw, n0_prime,
                          pin_bottom=bool(unmatched_b), pin_top=bool(unmatched_a))
    alpha = {}
    for a, b in m.pairs:
        alpha[a] = -2 * remap[raw[a]]
        alpha[b] = 2 * remap[raw[b]]
    cert = DualCertificate(alpha, n0_prime)
    report = verify_certificate(inst, m, cert)
    if not report.ok:
        raise InternalError(
            f"extracted certificate failed verification: {list(report.violations)}")
    return cert


def verify_certificate(inst: Instance, m: Matching, cert: DualCertificate) -> CertificateReport:
    """Check all six certificate conditions, reporting violations individually.

    (F) alpha_a + alpha_b >= wt(a,b) on every edge between matched nodes;
    (CS) alpha_a + alpha_b = 0 on matched pairs; (Z) the values sum to 0;
    (R) evenness and the ranges 0..-2(n0'-1) / 0..2(n0'-1); (P1) alpha_a = 0
    for neighbors of unmatched B-nodes; (P2) alpha_b = 2(n0'-1) for
    neighbors of unmatched A-nodes.
    """
    maximum, _ = is_maximum(inst, m)
    if not maximum:
        from .errors import NotMaximumError
        raise NotMaximumError("certificates are only defined for maximum matchings")
    matched = set(m.partner)
    if set(cert.alpha) != matched:
        raise CertificateError(
            "certificate domain mismatch: must assign exactly the matched nodes")
    if cert.n0_prime != len(m.pairs):
        raise CertificateError(
            f"certificate n0_prime={cert.n0_prime} but the matching has {len(m.pairs)} pairs")
    violations = []
    top = 2 * (cert.n0_prime - 1)
    for u in inst.nodes:
        if u not in cert.alpha:
            continue
        v = cert.alpha[u]
        if inst.is_a(u):
            if v % 2 or not (-top <= v <= 0):
                violations.append(f"R: alpha[{u}] = {v} not in {{0, -2, ..., {-top}}}")
        else:
            if v % 2 or not (0 <= v <= top):
                violations.append(f"R: alpha[{u}] = {v} not in {{0, 2, ..., {top}}}")
    for a, b in sorted(m.pairs):
        s = cert.alpha[a] + cert.alpha[b]
        if s != 0:
            violations.append(f"CS: alpha[{a}] + alpha[{b}] = {s} != 0 on matching edge")
    total = sum(cert.alpha.values())
    if total != 0:
        violations.append(f"Z: certificate sums to {total} != 0")
    for a, b in inst.edges:
        if a in cert.alpha and b in cert.alpha:
            s = cert.alpha[a] + cert.alpha[b]
            w = wt_edge(inst, m, (a, b))
            if s < w:
                violations.append(f"F: alpha[{a}] + alpha[{b}] = {s} < wt = {w} at ({a},{b})")
    for b in inst.side_b:
        if not m.is_matched(b):
            for a in inst.prefs[b]:
                if cert.alpha.get(a, 0) != 0:
                    violations.append(
                        f"P1: alpha[{a}] = {cert.alpha[a]} != 0 but {a} neighbors unmatched {b}")
    for a in inst.side_a:
        if not m.is_matched(a):
            for b in inst.prefs[a]:
                if cert.alpha.get(b) != top:
                    violations.append(
                        f"P2: alpha[{b}] = {cert.alpha.get(b)} != {top} but {b} neighbors unmatched {a}")
    return CertificateReport(not violations, tuple(violations))


def certify_popular_max(inst: Instance, m: Matching) -> DualCertificate:
    """Produce a verified certificate for a verified popular max-matching.

    Extracts from the canonical proposal run of the derived instance when
    that run already projects to m; otherwise scans the stable-matching
    enumeration of the derived instance for a preimage. A verified popular
    max-matching always has one; not finding it indicates a bug, not bad
    input.
    """
    from .popularity import verify_popular_max

    verdict = verify_popular_max(inst, m)  # raises NotMaximumError if not maximum
    if not verdict.popular:
        raise NotPopularError("matching is not a popular max-matching; no certificate exists")
    gs = build_gstar(inst)
    s = gale_shapley(gs.inner, "A")
    if project(gs, s).pairs == m.pairs:
        return extract_certificate(inst, gs, s)
    from .mincost import enumerate_stable

    for s in enumerate_stable(gs.inner):
        if project(gs, s).pairs == m.pairs:
            return extract_certificate(inst, gs, s)
    raise InternalError("no stable preimage found for a verified popular max-matching")


def serialize_certificate(inst: Instance, cert: DualCertificate) -> str:
    """`alpha <node> <even-integer>` lines in instance node order."""
    return "".join(
        f"alpha {u} {cert.alpha[u]}\n" for u in inst.nodes if u in cert.alpha)


def parse_certificate(text: str) -> DualCertificate:
    """Parse certificate lines; order-insensitive."""
    alpha: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        tokens = s.split()
        if len(tokens) != 3 or tokens[0] != "alpha":
            raise ParseError("expected `alpha <node> <even-integer>`", lineno)
        try:
            value = int(tokens[2])
        except ValueError:
            raise ParseError(f"bad integer {tokens[2]!r}", lineno) from None
        if tokens[1] in alpha:
            raise ParseError(f"duplicate alpha line for {tokens[1]!r}", lineno)
        alpha[tokens[1]] = value
    if len(alpha) % 2:
        raise ParseError("certificate must cover matched nodes, an even count", 1)
    return DualCertificate(alpha, len(alpha) // 2)
