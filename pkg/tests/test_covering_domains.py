import math

import numpy as np
import pytest

from lempertpoles.acceptance import annulus_green_image_series
from lempertpoles.complex_kernel import moebius
from lempertpoles.covering_domains import (
    PlaneDomain,
    build_cover,
    find_pole_with_value,
    green_plane,
    lempert_N_plane,
    lempert_poleset_plane,
    parse_domain,
    preimage_moduli,
)
from lempertpoles.disc_domain import PoleSet


def test_domain_parsing_and_membership():
    assert parse_domain("disc").kind == "disc"
    assert parse_domain("annulus:0.25").R == 0.25
    ann = PlaneDomain("annulus", R=0.3)
    assert ann.contains(0.5) and not ann.contains(0.2) and not ann.contains(1.01)
    punct = PlaneDomain("punctured")
    assert punct.contains(0.5) and not punct.contains(0.0)
    with pytest.raises(ValueError):
        PlaneDomain("annulus", R=1e-9)
    with pytest.raises(ValueError):
        parse_domain("square")


def test_unnormalized_base_points():
    punct = build_cover(PlaneDomain("punctured"), 0.3)
    assert punct.eval_raw(0j) == pytest.approx(math.exp(-1))
    ann = build_cover(PlaneDomain("annulus", R=0.3), 0.5)
    assert ann.eval_raw(0j) == pytest.approx(math.sqrt(0.3))


def test_normalization_pins_base_point():
    rng = np.random.default_rng(2)
    for dom in (PlaneDomain("punctured"), PlaneDomain("annulus", R=0.2)):
        lo = 0.05 if dom.kind == "punctured" else dom.R + 0.05
        for _ in range(50):
            z = (lo + (0.95 - lo) * rng.random()) * np.exp(2j * np.pi * rng.random())
            cover = build_cover(dom, z)
            assert abs(complex(cover.eval(0j)) - z) < 1e-12


def test_covering_identity_on_lifts():
    rng = np.random.default_rng(3)
    for dom in (PlaneDomain("punctured"), PlaneDomain("annulus", R=0.3)):
        lo = 0.1 if dom.kind == "punctured" else dom.R + 0.05
        for _ in range(10):
            z = (lo + (0.9 - lo) * rng.random()) * np.exp(2j * np.pi * rng.random())
            a = (lo + (0.9 - lo) * rng.random()) * np.exp(2j * np.pi * rng.random())
            cover = build_cover(dom, z)
            ls = cover.lifts(a, 6)
            # strip coordinates reproduce the pole exactly for every winding
            assert np.max(np.abs(cover.eval_at_strip(ls.s) - a)) < 1e-11
            # disc coordinates reproduce it for lifts that floats can
            # resolve; precision degrades like eps/delta near the circle
            resolved = ls.delta > 1e-3
            if resolved.any():
                vals = cover.eval(ls.eta[resolved])
                assert np.max(np.abs(vals - a)) < 1e-9


def test_first_lift_of_base_is_zero():
    cover = build_cover(PlaneDomain("punctured"), 0.4 + 0.1j)
    m = preimage_moduli(cover, 0.4 + 0.1j, K=3)
    assert m[0] < 1e-14


def test_preimage_moduli_delta_cutoff():
    cover = build_cover(PlaneDomain("punctured"), 0.4)
    m = preimage_moduli(cover, 0.5 * np.exp(0.9j), delta=1e-3)
    assert np.all(np.diff(m) >= 0)
    assert np.all(1.0 - m >= 1e-3)
    # a tighter cutoff keeps strictly more lifts
    m2 = preimage_moduli(cover, 0.5 * np.exp(0.9j), delta=1e-5)
    assert len(m2) > len(m)


def test_cover_maps_sampled_points_into_domain():
    rng = np.random.default_rng(21)
    for dom in (PlaneDomain("punctured"), PlaneDomain("annulus", R=0.3)):
        lo = 0.1 if dom.kind == "punctured" else 0.45
        cover = build_cover(dom, lo + 0.2)
        pts = 0.97 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
        vals = cover.eval(pts)
        assert all(dom.contains(v, margin=-1e-12) for v in vals)


def test_deck_invariance_of_moduli():
    # shifted base lifts must reproduce the modulus multiset; shifts are kept
    # within the float-resolved range of the deck orbit (deeper annulus
    # translates collapse onto the unit circle and carry no position data)
    for dom, shifts in ((PlaneDomain("punctured"), (1, -2)),
                        (PlaneDomain("annulus", R=0.25), (1,))):
        lo = 0.1 if dom.kind == "punctured" else 0.35
        cover = build_cover(dom, lo + 0.2)
        a = (lo + 0.3) * np.exp(1.3j)
        m0 = preimage_moduli(cover, a, K=9)
        for shift in shifts:
            m1 = preimage_moduli(cover, a, K=9, base_shift=shift)
            assert np.max(np.abs(m0 - m1)) < 1e-10


def test_moduli_increase_to_one_with_annulus_exponential_rate():
    R = 0.3
    dom = PlaneDomain("annulus", R=R)
    cover = build_cover(dom, 0.5)
    a = 0.6 * np.exp(0.7j)
    ls = cover.lifts(a, 6)
    deltas = ls.delta
    assert np.all(np.diff(ls.moduli) >= 0)
    # fit log(1 - |eta_k|) against winding for one side: slope ~ -2 pi^2 / L
    ks = ls.windings
    pos = ks > 0
    x = ks[pos].astype(float)
    y = np.log(deltas[pos])
    slope = np.polyfit(x, y, 1)[0]
    expected = -2 * np.pi ** 2 / (-np.log(R))
    assert abs(slope - expected) < 0.05 * abs(expected)


def test_punctured_decay_is_quadratic_in_winding():
    dom = PlaneDomain("punctured")
    cover = build_cover(dom, 0.4)
    a = 0.5 * np.exp(0.9j)
    ls = cover.lifts(a, 64)
    ks = ls.windings
    keep = ks > 4
    slope = np.polyfit(np.log(ks[keep].astype(float)), np.log(ls.delta[keep]), 1)[0]
    assert abs(slope + 2.0) < 0.05


def test_lempert_N_strict_decrease_and_domain_monotonicity():
    dom = PlaneDomain("punctured")
    a, z = 0.45 * np.exp(0.4j), 0.3 * np.exp(-1.0j)
    vals = [lempert_N_plane(dom, a, z, N).value for N in range(1, 6)]
    assert all(vals[i + 1] < vals[i] for i in range(4))
    # discs into the punctured disc are discs into the disc
    assert vals[0] >= abs(moebius(a, z)) - 1e-15


def test_lempert_N_degenerate_at_pole():
    res = lempert_N_plane(PlaneDomain("annulus", R=0.2), 0.5, 0.5, 3)
    assert res.value == 0.0 and res.nodes == (0j,)


def test_poleset_plane_consistency_and_monotonicity():
    dom = PlaneDomain("annulus", R=0.2)
    z = 0.5
    a1, a2 = 0.4 * np.exp(2.0j), 0.7 * np.exp(-0.5j)
    single = lempert_poleset_plane(dom, PoleSet(points=(a1,), domain=dom), z)
    assert single.value == pytest.approx(lempert_N_plane(dom, a1, z, 1).value)
    both = lempert_poleset_plane(dom, PoleSet(points=(a1, a2), domain=dom), z)
    assert both.value <= single.value
    # domain monotonicity against the disc formula
    assert both.value >= abs(moebius(a1, z)) * abs(moebius(a2, z)) - 1e-15


def test_prop2_certificate_reproduces_poles():
    dom = PlaneDomain("annulus", R=0.2)
    z = 0.45 * np.exp(1.0j)
    A = PoleSet(points=(0.4, 0.6 * np.exp(2.2j)), domain=dom)
    res = lempert_poleset_plane(dom, A, z)
    for node, pole in zip(res.nodes, A):
        assert abs(complex(res.certificate.eval(node)) - pole) < 1e-10


def test_partial_products_bounded_by_green():
    dom = PlaneDomain("punctured")
    a, z = 0.5 * np.exp(0.3j), 0.35 * np.exp(-2.0j)
    g, tail = green_plane(dom, a, z, tol_tail=1e-9)
    prev = 1.0
    for N in range(1, 9):
        v = lempert_N_plane(dom, a, z, N).value
        assert v < prev
        assert v >= g * (1 - tail) - 1e-15
        prev = v


def test_green_punctured_matches_moebius():
    dom = PlaneDomain("punctured")
    rng = np.random.default_rng(8)
    for _ in range(25):
        a = (0.1 + 0.8 * rng.random()) * np.exp(2j * np.pi * rng.random())
        z = (0.1 + 0.8 * rng.random()) * np.exp(2j * np.pi * rng.random())
        v, tail = green_plane(dom, a, z, tol_tail=1e-9)
        assert abs(v - abs(moebius(a, z))) < 1e-8
        assert tail <= 1e-9
        # the certificate itself: the true value lies inside the stated band
        truth = abs(moebius(a, z))
        assert v * (1 - tail) - 1e-14 <= truth <= v * (1 + tail) + 1e-14


def test_green_thin_and_deep_annulus_radii():
    for R in (1e-6, 0.9999):
        dom = PlaneDomain("annulus", R=R)
        a = (R + (1 - R) * 0.3) * np.exp(0.4j)
        z = (R + (1 - R) * 0.7) * np.exp(-0.9j)
        v, tail = green_plane(dom, a, z)
        assert 0.0 < v <= 1.0
        assert tail < 1e-10


def test_green_annulus_matches_image_series():
    rng = np.random.default_rng(12)
    for R in (0.1, 0.3, 0.6):
        dom = PlaneDomain("annulus", R=R)
        for _ in range(5):
            a = (R + (1 - R) * (0.2 + 0.6 * rng.random())) * np.exp(2j * np.pi * rng.random())
            z = (R + (1 - R) * (0.2 + 0.6 * rng.random())) * np.exp(2j * np.pi * rng.random())
            v, _ = green_plane(dom, a, z)
            oracle = annulus_green_image_series(a, z, R)
            assert abs(v - oracle) / oracle < 1e-6


def test_green_bounded_by_lempert():
    dom = PlaneDomain("annulus", R=0.3)
    a, z = 0.6 * np.exp(1.0j), 0.45
    g, _ = green_plane(dom, a, z)
    l1 = lempert_poleset_plane(dom, PoleSet(points=(a,), domain=dom), z).value
    assert g <= l1 + 1e-15


def test_find_pole_disc_closed_form():
    # oracle: solve |Phi_a(z)| = t along the ray in closed form (quadratic in s)
    z = 0.2 + 0.1j
    t = 0.6
    phi = 0.9
    d = np.exp(1j * phi)
    c1 = 1 - t * t * abs(z) ** 2
    c2 = 2 * t * t * (1 - abs(z) ** 2) * (np.conj(z) * d).real
    c3 = -t * t * (1 - abs(z) ** 2) ** 2
    s_oracle = (-c2 + math.sqrt(c2 * c2 - 4 * c1 * c3)) / (2 * c1)
    a_oracle = z + s_oracle * d
    a = find_pole_with_value(PlaneDomain("disc"), z, t, d)
    assert abs(a - a_oracle) < 1e-9
    assert abs(abs(moebius(a, z)) - t) < 1e-10


def test_find_pole_continuity_and_multiplicity():
    dom = PlaneDomain("annulus", R=0.2)
    z = 0.5
    # t -> 0 pulls the pole to the base point
    a_small = find_pole_with_value(dom, z, 1e-4, np.exp(0.4j))
    assert abs(a_small - z) < 1e-2
    # two directions give two poles with the same value
    a1 = find_pole_with_value(dom, z, 0.7, np.exp(0.4j))
    a2 = find_pole_with_value(dom, z, 0.7, np.exp(2.9j))
    assert abs(a1 - a2) > 1e-3
    v1 = lempert_N_plane(dom, a1, z, 1).value
    v2 = lempert_N_plane(dom, a2, z, 1).value
    assert abs(v1 - 0.7) < 1e-10 and abs(v2 - 0.7) < 1e-10


def test_complex_trigamma_against_real_reference():
    from scipy.special import polygamma
    from lempertpoles.covering_domains import _trigamma_complex
    for x in (60.0, 123.5, 1025.0, 9001.25):
        ours = _trigamma_complex(complex(x))
        ref = float(polygamma(1, x))
        assert abs(ours - ref) < 1e-16 + 1e-13 * ref


def test_find_pole_rejects_bad_level():
    with pytest.raises(ValueError):
        find_pole_with_value(PlaneDomain("disc"), 0.0, 1.5, 1.0)
