import numpy as np
import pytest

from lempertpoles.complex_kernel import PickProblem, pick_feasible
from lempertpoles.covering_domains import PlaneDomain
from lempertpoles.disc_domain import PoleSet, lempert_disc
from lempertpoles.node_optimizer import (
    OptimizerSettings,
    bidisc_lempert,
    mixed_product_upper,
)
from lempertpoles.product_engine import theorem5_bounds

FAST = OptimizerSettings(restarts=48, seed=0, max_iterations=1200)


def test_singletons_exact():
    cfg, v = bidisc_lempert(PoleSet(points=(0.3,)), PoleSet(points=(0.6j,)), 0, 0, FAST)
    assert v == pytest.approx(0.6)
    cfg, v = bidisc_lempert(PoleSet(points=(0.7,)), PoleSet(points=(0.2,)), 0, 0, FAST)
    assert v == pytest.approx(0.7)


def test_rotation_case_reaches_floor():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5j, -0.5))
    cfg, v = bidisc_lempert(A, B, 0, 0, FAST)
    assert abs(v - 0.25) <= 1e-6
    assert v >= 0.25 - 1e-12


def test_failure_case_strictly_above_floor():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5, -0.5))
    cfg, v = bidisc_lempert(A, B, 0, 0, FAST)
    assert v > 0.25 + 1e-3
    assert v == pytest.approx(0.2713, abs=2e-3)


def test_inequality_two_floor():
    rng = np.random.default_rng(3)
    for _ in range(3):
        A = PoleSet(points=tuple(0.6 * np.exp(2j * np.pi * rng.random()) * (0.4 + 0.6 * rng.random())
                                 for _ in range(2)))
        B = PoleSet(points=tuple(0.6 * np.exp(2j * np.pi * rng.random()) * (0.4 + 0.6 * rng.random())
                                 for _ in range(2)))
        z = 0.2 * rng.random()
        w = 0.2 * rng.random()
        _, v = bidisc_lempert(A, B, z, w, FAST)
        floor = max(lempert_disc(A, z).value, lempert_disc(B, w).value)
        assert v >= floor - 1e-12


def test_upper_bound_soundness_reverified():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5, -0.5))
    cfg, v = bidisc_lempert(A, B, 0, 0, FAST)
    for targets in cfg.coord_targets:
        ok, min_eig = pick_feasible(PickProblem(nodes=(0j, *cfg.nodes),
                                                targets=(0j, *targets)))
        assert min_eig >= -1e-12
    assert v == pytest.approx(float(np.prod([abs(n) for n in cfg.nodes])), abs=1e-14)


def test_subset_monotonicity_under_pole_addition():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5, -0.5))
    _, v_small = bidisc_lempert(A, B, 0, 0, FAST)
    A_big = PoleSet(points=(0.5, 0.5j, -0.45))
    _, v_big = bidisc_lempert(A_big, B, 0, 0, FAST)
    assert v_big <= v_small + 1e-9


def test_determinism_same_seed_and_threads():
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5, -0.5))
    _, v1 = bidisc_lempert(A, B, 0, 0, OptimizerSettings(restarts=32, seed=11))
    _, v2 = bidisc_lempert(A, B, 0, 0, OptimizerSettings(restarts=32, seed=11))
    _, v4 = bidisc_lempert(A, B, 0, 0, OptimizerSettings(restarts=32, seed=11, threads=4))
    assert repr(v1) == repr(v2) == repr(v4)


def test_automorphism_reduction_invariance():
    # moving the base point together with the poles leaves the value unchanged
    A = PoleSet(points=(0.5, 0.5j))
    B = PoleSet(points=(0.5, -0.5))
    _, v0 = bidisc_lempert(A, B, 0, 0, FAST)
    from lempertpoles.complex_kernel import moebius
    c = 0.3 - 0.1j
    A2 = PoleSet(points=tuple(moebius(c, a) for a in A))
    _, v1 = bidisc_lempert(A2, B, moebius(c, 0), 0, FAST)
    assert abs(v0 - v1) < 1e-6


def test_pole_cap():
    with pytest.raises(ValueError):
        bidisc_lempert(PoleSet(points=tuple(0.1 * k + 0.1j for k in range(1, 6))),
                       PoleSet(points=(0.5,)), 0, 0, FAST)


def test_mixed_upper_disc_singleton_matches_theorem5():
    D = PlaneDomain("disc")
    G = PlaneDomain("disc")
    A = PoleSet(points=(0.5, 0.5j))
    b = 0.3 - 0.2j
    z, w = 0.1 + 0.05j, -0.2 + 0.1j
    rep = theorem5_bounds(D, G, A, b, z, w)
    v, cfg = mixed_product_upper(D, G, A, PoleSet(points=(b,)), z, w, FAST)
    assert v <= rep.upper + 1e-6
    assert v >= rep.lower - 1e-12


def test_mixed_upper_annulus_factor():
    D = PlaneDomain("disc")
    G = PlaneDomain("annulus", R=0.1)
    A = PoleSet(points=(0.15, 0.1j))
    b = 0.4 * np.exp(2.0j)
    z, w = 0.05, 0.45
    rep = theorem5_bounds(D, G, A, b, z, w)
    v, cfg = mixed_product_upper(D, G, A, PoleSet(points=(b,), domain=G), z, w, FAST)
    # sound upper bound: above the Theorem 5 lower bound, at or below the
    # Lemma 4 certificate value up to optimizer tolerance
    assert v >= rep.lower - 1e-12
    assert v <= rep.upper + 1e-4


def test_mixed_upper_degree_cap_monotone():
    D = PlaneDomain("disc")
    G = PlaneDomain("annulus", R=0.1)
    A = PoleSet(points=(0.15, 0.1j))
    b = 0.4 * np.exp(2.0j)
    v2, _ = mixed_product_upper(D, G, A, PoleSet(points=(b,), domain=G), 0.05, 0.45,
                                FAST, degree_cap=2)
    v1, _ = mixed_product_upper(D, G, A, PoleSet(points=(b,), domain=G), 0.05, 0.45,
                                FAST, degree_cap=1)
    assert v1 >= v2 - 1e-12


def test_mixed_upper_degree_cap_validation():
    D = PlaneDomain("disc")
    with pytest.raises(ValueError, match="degree"):
        mixed_product_upper(D, D, PoleSet(points=(0.3,)), PoleSet(points=(0.4,)),
                            0, 0, FAST, degree_cap=7)
