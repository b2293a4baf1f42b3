import numpy as np
import pytest

from lempertpoles.complex_kernel import moebius
from lempertpoles.covering_domains import PlaneDomain, find_pole_with_value
from lempertpoles.disc_domain import PoleSet, lempert_disc
from lempertpoles.product_engine import (
    BoundsReport,
    ProductInstance,
    corollary8_sample,
    prop9_extend,
    prop10_construct,
    prop11_construct,
    theorem5_bounds,
    theorem7_decide,
)

DISC = PlaneDomain("disc")


def test_bounds_report_ordering_enforced():
    with pytest.raises(ValueError):
        BoundsReport(lower=0.5, upper=0.4, certificate=None,
                     certificate_nodes=(), equality_flag=False)


def test_theorem5_disc_equality():
    A = PoleSet(points=(0.5, 0.5j))
    rep = theorem5_bounds(DISC, DISC, A, 0.3 - 0.2j, 0.1 + 0.05j, -0.2 + 0.1j)
    assert rep.lower <= rep.upper + 1e-12
    assert rep.upper - rep.lower < 1e-9
    assert rep.equality_flag
    assert rep.meta["certificate_residual"] < 1e-9


def test_theorem5_singleton_A():
    A = PoleSet(points=(0.4,))
    rep = theorem5_bounds(DISC, DISC, A, 0.3, 0.0, 0.0)
    assert rep.lower == pytest.approx(max(0.4, 0.3))
    assert rep.upper - rep.lower < 1e-9


def test_theorem5_annulus_strict_gap():
    G = PlaneDomain("annulus", R=0.1)
    A = PoleSet(points=(0.12 + 0.02j, -0.05 + 0.13j))
    b = 0.45 * np.exp(1j * np.pi * 0.9)
    rep = theorem5_bounds(DISC, G, A, b, 0.1, 0.4)
    assert rep.upper - rep.lower > 1e-6
    assert not rep.equality_flag
    assert rep.meta["certificate_residual"] < 1e-9


def test_theorem5_pole_through_base():
    # z in A forces l_D(A, z) = 0; the certificate runs through the
    # zero-value reduction of the interpolation lemma
    A = PoleSet(points=(0.2, 0.5j))
    rep = theorem5_bounds(DISC, DISC, A, 0.3, 0.2, 0.0)
    assert rep.lower == pytest.approx(0.3)
    assert rep.upper == pytest.approx(0.3, abs=1e-5)
    assert rep.meta["certificate_residual"] < 1e-9


def test_theorem7_rotation_detection():
    A = PoleSet(points=(0.5, 0.5j))
    res = theorem7_decide(A, PoleSet(points=(0.5j, -0.5)))
    assert res.rotation == pytest.approx(np.pi / 2)
    assert res.value == pytest.approx(0.25)
    v = res.certificate.eval(0.5)
    assert complex(v[0]) == pytest.approx(0.5)
    assert complex(v[1]) == pytest.approx(0.5j)


def test_theorem7_identity_rotation():
    A = PoleSet(points=(0.5, 0.5j))
    res = theorem7_decide(A, A)
    assert res.rotation == pytest.approx(0.0)
    assert res.value == pytest.approx(0.25)


def test_theorem7_no_rotation():
    res = theorem7_decide(PoleSet(points=(0.5, 0.5j)), PoleSet(points=(0.5, -0.5)))
    assert res.rotation is None
    assert "fails" in res.message


def test_theorem7_hypothesis_checks():
    with pytest.raises(ValueError):
        theorem7_decide(PoleSet(points=(0.5, 0.5j)), PoleSet(points=(0.4, -0.5)))
    with pytest.raises(ValueError):
        theorem7_decide(PoleSet(points=(0.5,)), PoleSet(points=(0.5, -0.5)))


def test_corollary8_level_and_flags():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5j, -0.5))  # congruent: two automorphism images exist
    samples = corollary8_sample(A, B, 0.2, count=8, seed=3)
    assert len(samples) == 8
    assert all(s.level_residual <= 1e-10 for s in samples)
    assert sum(s.automorphism for s in samples) <= 2
    assert sum(s.automorphism for s in samples) == 2


def test_corollary8_incongruent_pairs_give_no_flags():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.4, -0.3j))
    samples = corollary8_sample(A, B, 0.2, count=6, seed=1)
    assert all(not s.automorphism for s in samples)
    t = lempert_disc(A, 0.2).value
    for s in samples:
        lv = abs(moebius(B.points[0], s.w)) * abs(moebius(B.points[1], s.w))
        assert abs(lv - t) <= 1e-10


def test_prop9_disc_case():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5, -0.5))
    q = 0.25 / 0.2713  # max(l) over the certified product upper bound
    rep = prop9_extend(DISC, DISC, A, B, 0.0, 0.0, q,
                       PoleSet(points=(0.97,)), PoleSet(points=(0.96j,)))
    assert rep["condition3"]
    assert rep["g_product"] > q
    assert rep["strict_gap"] > 0
    # the disc green used inside matches the closed form
    from lempertpoles.disc_domain import green_disc
    g_direct = green_disc(PoleSet(points=(0.97,)), 0.0)
    assert rep["g_D_A1"] == pytest.approx(g_direct, abs=1e-12)


def test_prop9_near_boundary_poles_beat_q():
    # poles within 1 - q of the boundary push the green product above q
    q = 0.9
    A1 = PoleSet(points=(0.995,))
    B1 = PoleSet(points=(0.997j,))
    rep = prop9_extend(DISC, DISC, PoleSet(points=(0.3,)), PoleSet(points=(0.4,)),
                       0.0, 0.0, q, A1, B1)
    assert rep["g_product"] > q
    assert rep["condition3"]


def test_prop9_failing_condition():
    rep = prop9_extend(DISC, DISC, PoleSet(points=(0.3,)), PoleSet(points=(0.4,)),
                       0.0, 0.0, 0.9, PoleSet(points=(0.5,)), PoleSet(points=(0.5,)))
    assert not rep["condition3"]
    assert rep["verdict"] == "condition (3) fails"


def test_prop9_overlap_rejected():
    with pytest.raises(ValueError, match="overlap"):
        prop9_extend(DISC, DISC, PoleSet(points=(0.3,)), PoleSet(points=(0.4,)),
                     0.0, 0.0, 0.5, PoleSet(points=(0.3,)), PoleSet(points=(0.9,)))


def test_prop10_small_instance():
    D = PlaneDomain("annulus", R=0.3)
    G = PlaneDomain("annulus", R=0.5)
    z = 0.6 * np.exp(0.5j)
    w = 0.72 * np.exp(-1.1j)
    b = 0.68 * np.exp(2.0j)
    A2, rep = prop10_construct(D, G, z, w, b, N=2, seed=0)
    assert max(rep["equal_errors"]) <= 1e-10
    assert rep["condition4_margin"] > 1e-6
    assert rep["bounds_lower"] <= rep["bounds_upper"] + 1e-12


def test_prop10_requires_nonsimply_connected():
    with pytest.raises(ValueError):
        prop10_construct(DISC, DISC, 0.0, 0.0, 0.3, N=2)


def test_prop11_chain():
    D = PlaneDomain("annulus", R=0.3)
    G = PlaneDomain("annulus", R=0.1)
    z = 0.6 * np.exp(0.5j)
    w = 0.32 * np.exp(-1.1j)
    b = 0.35 * np.exp(1j * (np.pi - 1.1))
    e1 = find_pole_with_value(D, z, 0.995, np.exp(0.3j))
    e2 = find_pole_with_value(D, z, 0.996, np.exp(2.4j))
    extra = PoleSet(points=(e1, e2), domain=D)
    rep = prop11_construct(D, G, z, w, b, extra, seed=0)
    assert rep["paper_strict"]
    assert rep["l_extra"] > rep["q"] + 1e-9
    # the two-point equality is inherited from the construction
    assert abs(rep["l_G_2"] - rep["l_union"] / rep["l_extra"]) < 1e-9
    # green never exceeds the two-visit value
    assert rep["g_G_b"] <= rep["l_G_2"] + 1e-12


def test_prop11_rejects_weak_extra():
    D = PlaneDomain("annulus", R=0.3)
    G = PlaneDomain("annulus", R=0.1)
    z = 0.6 * np.exp(0.5j)
    w = 0.32 * np.exp(-1.1j)
    b = 0.35 * np.exp(1j * (np.pi - 1.1))
    weak = PoleSet(points=(0.6 * np.exp(1.5j),), domain=D)
    with pytest.raises(ValueError, match="<= q"):
        prop11_construct(D, G, z, w, b, weak, seed=0)


def test_product_instance_validation():
    with pytest.raises(ValueError):
        ProductInstance(D=DISC, G=PlaneDomain("annulus", R=0.3),
                        A=PoleSet(points=(0.5,)), B=PoleSet(points=(0.2,)),
                        z=0.0, w=0.5)  # B[0]=0.2 outside the annulus
