import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lempertpoles.complex_kernel import solve_node_quadratic
from lempertpoles.disc_domain import MoebiusExpr, PoleSet, lempert_disc
from lempertpoles.interpolation import (
    Lemma4Problem,
    curves_gh,
    lemma4_solve,
    theorem5_certificate,
)

nonzero_targets = st.complex_numbers(min_magnitude=0.05, max_magnitude=0.9,
                                     allow_nan=False, allow_infinity=False)


def test_curves_anchors_at_zero():
    mu = (0.3, 0.4j, -0.2 + 0.35j)
    p = np.prod([abs(m) for m in mu])
    g0, h0 = curves_gh(mu, 0.0)
    assert abs(g0 - math.sqrt(p)) < 1e-12
    assert abs(h0 - math.sqrt(p)) < 1e-12


def test_curves_endpoint_limits():
    mu = (0.3, 0.4j, -0.2 + 0.35j)
    p = np.prod([abs(m) for m in mu])
    g, h = curves_gh(mu, 1 - 1e-6)
    assert abs(g - p) < 1e-3
    assert abs(h - 1.0) < 1e-3


@given(st.lists(nonzero_targets, min_size=1, max_size=5),
       st.floats(min_value=0.0, max_value=0.999))
@settings(max_examples=200)
def test_curves_vieta_product(mu, a):
    mu = tuple(mu)
    p = np.prod([abs(m) for m in mu])
    g, h = curves_gh(mu, a)
    assert abs(g * h - p) < 1e-12


def test_curves_reject_zero_entries():
    with pytest.raises(ValueError):
        curves_gh((0.3, 0j), 0.5)


def test_g_continuity_envelope():
    mu = tuple(0.5 * np.exp(1j * k) for k in range(4))
    grid = np.linspace(0, 1 - 1e-6, 4097)
    vals = np.array([curves_gh(mu, a)[0] for a in grid])
    assert np.max(np.abs(np.diff(vals))) < 1e-2 * len(mu)


def test_branch_separation():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = rng.random() * 0.999
        mu = (0.05 + 0.9 * rng.random()) * np.exp(2j * np.pi * rng.random())
        z, w = solve_node_quadratic(a, mu)
        assert abs(z) <= math.sqrt(abs(mu)) + 1e-13
        assert abs(w) >= math.sqrt(abs(mu)) - 1e-13


def test_solution_at_q_sqrt_p():
    mu = (0.3, 0.4j)
    p = np.prod([abs(m) for m in mu])
    sol = lemma4_solve(Lemma4Problem(mu=mu, q=math.sqrt(p)))
    assert sol.a < 1e-6
    for e, m in zip(sol.eta, mu):
        assert abs(abs(e) - math.sqrt(abs(m))) < 1e-6


def test_reference_instance():
    # the q = 0.9 instance; crossing parameter confirmed against a separate
    # dense scan of h built on numpy.roots (scripts/lemma4_scan.py)
    sol = lemma4_solve(Lemma4Problem(mu=(0.3, 0.4j), q=0.9))
    assert sol.branch == "large"
    assert abs(sol.a - 0.96112949) < 1e-7
    assert sol.residual < 1e-9
    assert sol.product_error < 1e-9


def test_zero_entry_reduction():
    sol = lemma4_solve(Lemma4Problem(mu=(0j, 0.5), q=0.3))
    assert sol.reduction_alpha is not None
    assert sol.residual < 1e-9
    assert sol.product_error < 1e-9
    assert abs(complex(sol.f.eval(0.0))) < 1e-14


def test_all_zero_targets():
    sol = lemma4_solve(Lemma4Problem(mu=(0j, 0j, 0j), q=0.75))
    assert sol.residual < 1e-9 and sol.product_error < 1e-9


def test_solver_is_deterministic():
    prob = Lemma4Problem(mu=(0.2 + 0.1j, -0.4j, 0.6), q=0.5)
    s1 = lemma4_solve(prob)
    s2 = lemma4_solve(prob)
    assert s1.a == s2.a and s1.eta == s2.eta


def test_precondition_rejected():
    with pytest.raises(ValueError):
        Lemma4Problem(mu=(0.5, 0.5), q=0.1)  # q below p
    with pytest.raises(ValueError):
        Lemma4Problem(mu=(0.5,), q=1.0)


def test_invariant_roundtrip_random():
    rng = np.random.default_rng(17)
    for _ in range(100):
        N = int(rng.integers(1, 7))
        mu = tuple((0.05 + 0.9 * rng.random()) * np.exp(2j * np.pi * rng.random())
                   for _ in range(N))
        p = float(np.prod([abs(m) for m in mu]))
        q = p + (1 - p) * rng.uniform(0.01, 0.99)
        sol = lemma4_solve(Lemma4Problem(mu=mu, q=q))
        assert sol.residual <= 1e-9
        assert sol.product_error <= 1e-9
        assert abs(complex(sol.f.eval(0.0))) < 1e-14


def test_theorem5_certificate_bidisc():
    z, w, b = 0.1 + 0.05j, -0.2 + 0.1j, 0.3 - 0.2j
    A = PoleSet(points=(0.5, 0.5j))
    lA = lempert_disc(A, z)
    from lempertpoles.complex_kernel import moebius
    zeta = complex(moebius(w, b))
    alpha = max(lA.value, abs(zeta)) + 1e-6
    xi, eta = theorem5_certificate(MoebiusExpr(z), lA.nodes, MoebiusExpr(w), zeta, alpha)
    v0 = xi.eval(0.0)
    assert abs(complex(v0[0]) - z) < 1e-9 and abs(complex(v0[1]) - w) < 1e-9
    for e, a in zip(eta, A):
        ve = xi.eval(e)
        assert abs(complex(ve[0]) - a) < 1e-9
        assert abs(complex(ve[1]) - b) < 1e-9
    assert abs(np.prod([abs(e) for e in eta]) - alpha) < 1e-9
    # the certified upper bound respects the lower bound of the sandwich
    assert alpha >= max(lA.value, abs(zeta)) - 1e-12


def test_certificate_tightens_with_alpha():
    z, w, b = 0.0, 0.0, 0.4
    A = PoleSet(points=(0.5, 0.5j))
    lA = lempert_disc(A, z)
    zeta = 0.4
    prev = None
    for slack in (1e-2, 1e-4, 1e-6):
        alpha = max(lA.value, abs(zeta)) + slack
        _, eta = theorem5_certificate(MoebiusExpr(0), lA.nodes, MoebiusExpr(0), zeta, alpha)
        prod = float(np.prod([abs(e) for e in eta]))
        if prev is not None:
            assert prod < prev
        prev = prod


def test_certificate_alpha_validation():
    A = PoleSet(points=(0.5,))
    lA = lempert_disc(A, 0.0)
    with pytest.raises(ValueError):
        theorem5_certificate(MoebiusExpr(0), lA.nodes, MoebiusExpr(0), 0.3, 0.2)
