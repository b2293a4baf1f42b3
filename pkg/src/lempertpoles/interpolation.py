"""Constructive interpolation: given targets mu_1..mu_N in the disc and any
q strictly between prod|mu_j| and 1, build f with f(0)=0, f(eta_j)=mu_j and
prod|eta_j| = q.

The solver works inside the family f_a(z) = z*Phi_a(z), a in [0,1).  Each
target mu_j has two preimages z_j(a), w_j(a) with |z_j| <= sqrt|mu_j| <= |w_j|;
the curves g(a) = prod|z_j(a)| and h(a) = prod|w_j(a)| run continuously from
the common value sqrt(p) at a=0 to p and 1 respectively, so one of them
crosses q and the crossing parameter is found by a grid scan plus bisection.
Zero targets are removed first by pulling every target back through one more
map z*Phi_alpha(z) (the nonzero preimage of 0 is alpha itself), solving the
reduced problem and composing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex_kernel import BlaschkeDisc, solve_node_quadratic
from .disc_domain import (
    BlaschkeExpr,
    ComposeExpr,
    DiscExpr,
    MoebiusExpr,
    PairExpr,
    ScaleExpr,
)

MAX_TARGETS = 64
BRACKET_GRID = 1024
BISECT_TOL = 1e-11
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class Lemma4Problem:
    mu: tuple
    q: float

    def __post_init__(self):
        mu = tuple(complex(m) for m in self.mu)
        object.__setattr__(self, "mu", mu)
        if not 1 <= len(mu) <= MAX_TARGETS:
            raise ValueError(f"need 1..{MAX_TARGETS} targets, got {len(mu)}")
        for j, m in enumerate(mu):
            if abs(m) >= 1.0:
                raise ValueError(f"|mu[{j}]| = {abs(m)} not inside the disc")
        p = float(np.prod([abs(m) for m in mu]))
        if not p < self.q < 1.0:
            raise ValueError(f"q={self.q} outside (p, 1) with p={p}")

    @property
    def p(self) -> float:
        return float(np.prod([abs(m) for m in self.mu]))


@dataclass
class Lemma4Solution:
    a: float
    branch: str  # "small" or "large"
    eta: tuple
    f: DiscExpr
    residual: float
    product_error: float
    reduction_alpha: float | None = None


def _roots_grid(mus: np.ndarray, a_grid: np.ndarray):
    """Moduli of both roots of z^2 - a(1+mu)z + mu = 0 on a grid of a.

    Vectorized version of solve_node_quadratic (all mu nonzero here)."""
    a = a_grid[:, None]
    mu = mus[None, :]
    b = a * (1.0 + mu)
    sq = np.sqrt(b * b - 4.0 * mu)
    flip = (np.conj(b) * sq).real < 0.0
    sq = np.where(flip, -sq, sq)
    w = (b + sq) / 2.0
    w = np.where(w == 0, 1j * np.sqrt(mu * np.ones_like(a)), w)
    zs = mu / w
    az, aw = np.abs(zs), np.abs(w)
    small = np.minimum(az, aw)
    large = np.maximum(az, aw)
    return small, large


def curves_gh(mu, a: float) -> tuple:
    """g(a) = prod |z_j(a)|, h(a) = prod |w_j(a)| for nonzero targets."""
    mus = np.asarray([complex(m) for m in mu])
    if np.any(mus == 0):
        raise ValueError("zero entries are handled upstream by the reduction")
    small, large = _roots_grid(mus, np.asarray([float(a)]))
    return float(np.prod(small[0])), float(np.prod(large[0]))


def _solve_nonzero(mu: tuple, q: float):
    """Core two-branch solve for nonzero targets; returns (a_star, branch)."""
    mus = np.asarray(mu)
    p = float(np.prod(np.abs(mus)))
    branch = "small" if q <= math.sqrt(p) else "large"
    idx = 0 if branch == "small" else 1

    # grid scan: uniform 1/1024 plus points accumulating at 1 so that the
    # endpoint limits g -> p, h -> 1 always yield a bracket
    a_grid = np.concatenate([
        np.arange(0, BRACKET_GRID) / BRACKET_GRID,
        1.0 - 2.0 ** (-np.arange(10, 49, dtype=float)),
    ])
    a_grid = np.unique(a_grid)
    vals = _roots_grid(mus, a_grid)[idx].prod(axis=1)
    diff = vals - q
    sign_change = np.nonzero(diff[:-1] * diff[1:] <= 0.0)[0]
    if len(sign_change) == 0:
        j = int(np.argmin(np.abs(diff)))
        if abs(diff[j]) <= BISECT_TOL:
            return float(a_grid[j]), branch
        raise RuntimeError("no bracket found for the Lemma 4 curve; should not occur")
    j = int(sign_change[0])
    lo, hi = float(a_grid[j]), float(a_grid[j + 1])
    flo = float(vals[j] - q)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = float(_roots_grid(mus, np.asarray([mid]))[idx].prod(axis=1)[0]) - q
        if abs(fm) <= BISECT_TOL:
            return mid, branch
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi), branch


def _eval_f(a: float, z: complex) -> complex:
    return z * (a - z) / (1.0 - a * z)


def _deriv_f(a: float, z: complex) -> complex:
    # d/dz [z Phi_a(z)] with a real: Phi_a(z) + z (a^2 - 1)/(1 - a z)^2
    return (a - z) / (1.0 - a * z) + z * (a * a - 1.0) / (1.0 - a * z) ** 2


def lemma4_solve(problem: Lemma4Problem) -> Lemma4Solution:
    """Solve the interpolation problem of the lemma for finite target lists.

    Zero targets: every mu_j is replaced by a preimage under g_alpha(z) =
    z*Phi_alpha(z) (zeros become alpha, the nonzero preimage of 0; nonzero
    targets use their small-root preimage), the reduced problem is solved and
    f = g_alpha o f' composed.  alpha starts at 1 - 2^-20 and is decreased
    geometrically until the reduced product prod|mu'_j| drops below q, which
    always happens because the zero replacements shrink with alpha.
    """
    mu, q = problem.mu, problem.q
    has_zero = any(m == 0 for m in mu)
    if not has_zero:
        a_star, branch = _solve_nonzero(mu, q)
        roots = [solve_node_quadratic(a_star, m) for m in mu]
        eta = tuple(r[0] if branch == "small" else r[1] for r in roots)
        f = BlaschkeExpr(BlaschkeDisc(phase=math.pi, zeros=(0.0, a_star)))
        residual = max(abs(_eval_f(a_star, e) - m) for e, m in zip(eta, mu))
        prod_err = abs(float(np.prod(np.abs(eta))) - q)
        return Lemma4Solution(a=a_star, branch=branch, eta=eta, f=f,
                              residual=residual, product_error=prod_err)

    # zero-value reduction
    alpha = 1.0 - 2.0 ** -20
    for _ in range(80):
        mu_red = tuple(
            complex(alpha) if m == 0 else solve_node_quadratic(alpha, m)[0]
            for m in mu
        )
        p_red = float(np.prod(np.abs(np.asarray(mu_red))))
        if p_red < q * (1.0 - 1e-9):
            break
        alpha = 1.0 - min((1.0 - alpha) * 4.0, 0.5) if alpha > 0.5 else alpha * 0.5
        if alpha <= 1e-8:
            raise RuntimeError("zero-value reduction failed to find alpha")
    else:
        raise RuntimeError("zero-value reduction failed to find alpha")

    inner = lemma4_solve(Lemma4Problem(mu=mu_red, q=q))
    g_alpha = BlaschkeExpr(BlaschkeDisc(phase=math.pi, zeros=(0.0, alpha)))
    f = ComposeExpr(g_alpha, inner.f)
    # the derivative of g_alpha at the replaced-zero targets is O(1/(1-alpha^2)),
    # which amplifies the inner root error; two Newton steps on the composed
    # map bring the residual back to evaluation-noise level
    a_in = inner.a
    eta = list(inner.eta)
    for j, m in enumerate(mu):
        for _ in range(2):
            val = _eval_f(alpha, _eval_f(a_in, eta[j])) - m
            der = _deriv_f(alpha, _eval_f(a_in, eta[j])) * _deriv_f(a_in, eta[j])
            if abs(der) < 1e-8 or abs(val) < 1e-14:
                break
            eta[j] = eta[j] - val / der
    eta = tuple(eta)
    residual = max(abs(complex(f.eval(e)) - m) for e, m in zip(eta, mu))
    prod_err = abs(float(np.prod(np.abs(eta))) - q)
    return Lemma4Solution(a=a_in, branch=inner.branch, eta=eta, f=f,
                          residual=residual, product_error=prod_err,
                          reduction_alpha=alpha)


def theorem5_certificate(phi: DiscExpr, lam, psi: DiscExpr, zeta: complex,
                         alpha: float) -> tuple:
    """Disc into the product domain certifying an upper bound alpha.

    phi hits the poles at nodes lam with prod|lam| < alpha, psi hits the
    second-factor pole at zeta with |zeta| < alpha.  The interpolating f and
    nodes eta come from the lemma with q = alpha; B is the normalized
    Blaschke product over eta with B(0) = alpha, and
        xi = (phi o f, psi((zeta/alpha) Phi_alpha(B(.)))).
    Then xi(0) = (z, w), xi(eta_j) = (a_j, b) and prod|eta_j| = alpha.
    """
    lam = tuple(complex(v) for v in lam)
    p = float(np.prod([abs(v) for v in lam]))
    if not (alpha < 1.0 and alpha > max(p, abs(zeta))):
        raise ValueError(f"alpha={alpha} must lie in (max(prod|lam|, |zeta|), 1)"
                         f" = ({max(p, abs(zeta))}, 1)")
    sol = lemma4_solve(Lemma4Problem(mu=lam, q=alpha))
    B = BlaschkeDisc.normalized_from_zeros(sol.eta)
    second = ComposeExpr(psi, ScaleExpr(zeta / alpha,
                                        ComposeExpr(MoebiusExpr(alpha), BlaschkeExpr(B))))
    xi = PairExpr(ComposeExpr(phi, sol.f), second)
    return xi, list(sol.eta)
