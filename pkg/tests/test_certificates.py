"""Dual certificates: extraction, verification, certify, serialization."""

from __future__ import annotations

import pytest

from popmax import (
    CertificateError,
    DualCertificate,
    NotMaximumError,
    NotPopularError,
    build_gstar,
    certify_popular_max,
    extract_certificate,
    gale_shapley,
    parse_certificate,
    project,
    serialize_certificate,
    verify_certificate,
    verify_popular_max,
)
from popmax.mincost import enumerate_stable
from popmax.oracle import brute_popular_max

from conftest import mk, random_cases


def test_extract_single_level(i0):
    gs = build_gstar(i0)
    cert = extract_certificate(i0, gs, gale_shapley(gs.inner))
    assert cert.alpha == {"a": 0, "b": 0}
    assert cert.n0_prime == 1


def test_extract_i1(i1):
    gs = build_gstar(i1)
    cert = extract_certificate(i1, gs, gale_shapley(gs.inner))
    assert cert.alpha == {"a1": -2, "b1": 2, "a2": 0, "b2": 0}


def test_extract_i3_compresses_levels(i3):
    # the only stable matching of the derived instance parks the matched
    # pair at the top copy; one matched pair forces alpha to zero.
    gs = build_gstar(i3)
    cert = extract_certificate(i3, gs, gale_shapley(gs.inner))
    assert cert.alpha == {"a1": 0, "b1": 0}
    assert cert.n0_prime == 1


def test_verify_good_certificate(i1):
    m = mk(i1, ("a1", "b1"), ("a2", "b2"))
    cert = DualCertificate({"a1": -2, "a2": 0, "b1": 2, "b2": 0}, 2)
    assert verify_certificate(i1, m, cert).ok


def test_verify_all_zero_fails_feasibility(i1):
    m = mk(i1, ("a1", "b1"), ("a2", "b2"))
    report = verify_certificate(i1, m, DualCertificate({"a1": 0, "a2": 0, "b1": 0, "b2": 0}, 2))
    assert not report.ok
    assert any(v.startswith("F:") and "(a2,b1)" in v for v in report.violations)


def test_verify_zero_on_single_edge(i0):
    m = mk(i0, ("a", "b"))
    assert verify_certificate(i0, m, DualCertificate({"a": 0, "b": 0}, 1)).ok


def test_verify_range_and_cs_and_sign_violations(i2):
    m = mk(i2, ("a1", "b1"), ("a2", "b2"))
    report = verify_certificate(i2, m, DualCertificate({"a1": -4, "a2": 0, "b1": 4, "b2": 0}, 2))
    assert not report.ok and any(v.startswith("R:") for v in report.violations)
    report = verify_certificate(i2, m, DualCertificate({"a1": -2, "a2": 0, "b1": 0, "b2": 0}, 2))
    assert any(v.startswith("CS:") for v in report.violations)
    assert any(v.startswith("Z:") for v in report.violations)
    report = verify_certificate(i2, m, DualCertificate({"a1": -1, "a2": 0, "b1": 1, "b2": 0}, 2))
    assert sum(v.startswith("R:") for v in report.violations) == 2


def test_verify_domain_mismatch(i1):
    m = mk(i1, ("a1", "b1"), ("a2", "b2"))
    with pytest.raises(CertificateError, match="domain"):
        verify_certificate(i1, m, DualCertificate({"a1": 0}, 2))
    with pytest.raises(CertificateError, match="n0_prime"):
        verify_certificate(i1, m, DualCertificate({"a1": 0, "a2": 0, "b1": 0, "b2": 0}, 3))


def test_verify_requires_maximum(i1):
    with pytest.raises(NotMaximumError):
        verify_certificate(i1, mk(i1, ("a2", "b1")), DualCertificate({"a2": 0, "b1": 0}, 1))


def test_certify_zero_certificate(i0):
    cert = certify_popular_max(i0, mk(i0, ("a", "b")))
    assert cert.alpha == {"a": 0, "b": 0}


def test_certify_via_enumeration(i2):
    # the B-optimal projection is not the canonical run's projection
    m2 = mk(i2, ("a1", "b2"), ("a2", "b1"))
    cert = certify_popular_max(i2, m2)
    assert verify_certificate(i2, m2, cert).ok


def test_certify_i3(i3):
    cert = certify_popular_max(i3, mk(i3, ("a1", "b1")))
    assert cert.alpha == {"a1": 0, "b1": 0} and cert.n0_prime == 1


def test_certify_rejects_unpopular(i3):
    with pytest.raises(NotPopularError):
        certify_popular_max(i3, mk(i3, ("a3", "b1")))


def test_certificate_file_roundtrip(i1):
    gs = build_gstar(i1)
    cert = extract_certificate(i1, gs, gale_shapley(gs.inner))
    text = serialize_certificate(i1, cert)
    assert text == "alpha a1 -2\nalpha a2 0\nalpha b1 2\nalpha b2 0\n"
    back = parse_certificate(text)
    assert back.alpha == cert.alpha and back.n0_prime == cert.n0_prime
    shuffled = "".join(sorted(text.splitlines(keepends=True), reverse=True))
    assert parse_certificate(shuffled).alpha == cert.alpha


def test_extracted_certificates_verify_on_randoms():
    for _seed, inst in random_cases(50, 4, 8000):
        gs = build_gstar(inst)
        for s in enumerate_stable(gs.inner, limit=3000):
            cert = extract_certificate(inst, gs, s)
            assert verify_certificate(inst, project(gs, s), cert).ok


def test_certificate_soundness_cross_check():
    """A matching carrying a verified certificate is popular (checked by
    cross-running both verifiers over the extraction corpus)."""
    for _seed, inst in random_cases(40, 4, 8100):
        gs = build_gstar(inst)
        for s in enumerate_stable(gs.inner, limit=2000):
            m = project(gs, s)
            cert = extract_certificate(inst, gs, s)
            if verify_certificate(inst, m, cert).ok:
                assert verify_popular_max(inst, m).popular


def test_certificate_completeness_at_desk_scale():
    """Every oracle-certified popular max-matching admits a certificate."""
    for _seed, inst in random_cases(40, 4, 8200):
        for m in brute_popular_max(inst, bound=30):
            cert = certify_popular_max(inst, m)
            assert verify_certificate(inst, m, cert).ok


def test_extract_compresses_when_only_isolated_nodes_unmatched():
    """A pair floating at a high copy level with only an isolated node
    unmatched must still compress into the matched-pair range."""
    from popmax import parse_instance

    inst = parse_instance("side A x z\nside B y\npref x: y\npref y: x\npref z:\n")
    gs = build_gstar(inst)
    for s in enumerate_stable(gs.inner):
        cert = extract_certificate(inst, gs, s)
        assert cert.alpha == {"x": 0, "y": 0}
        m = project(gs, s)
        from popmax import lift

        lifted = lift(inst, m, cert, gs=gs)
        assert project(gs, lifted).pairs == m.pairs


def test_lift_uses_perfect_certificate_levels_verbatim():
    """With no unmatched nodes the copy index is exactly half the
    certificate value, even across unused levels."""
    from popmax import lift, parse_instance

    inst = parse_instance(
        "side A a1 a2\nside B b1 b2\n"
        "pref a1: b1\npref a2: b2\npref b1: a1\npref b2: a2\n")
    m = mk(inst, ("a1", "b1"), ("a2", "b2"))
    gap = DualCertificate({"a1": 0, "b1": 0, "a2": -2, "b2": 2}, 2)
    assert verify_certificate(inst, m, gap).ok
    lifted = lift(inst, m, gap)
    assert ("a2#1", "b2~") in lifted.pairs and ("a1#0", "b1~") in lifted.pairs


def test_neighbors_of_unmatched_prefer_partner():
    """On verified popular max-matchings, every neighbor of an unmatched
    node prefers its partner to all its unmatched neighbors."""
    for _seed, inst in random_cases(40, 4, 8300):
        for m in brute_popular_max(inst, bound=30):
            unmatched = [u for u in inst.nodes if not m.is_matched(u)]
            for u in unmatched:
                for v in inst.prefs[u]:
                    assert m.is_matched(v)
                    assert inst.rank(v, m.partner_of(v)) < inst.rank(v, u)
