#!/usr/bin/env python3
"""Pre-build grid oracle for the bidisc two-point pole instances.

Estimates min prod|lambda_j| over node configurations subject to Pick
feasibility in both coordinates, for every nonempty subset of pole pairs,
by pure lattice search: a coarse scan of the (rotation-reduced) node space
followed by beam refinement of the best surviving cells on progressively
finer lattices.  No descent method is shared with the package optimizer;
feasibility here goes through numpy.linalg.eigvalsh directly.

Writes one line per subset and the final margin over max(l(A), l(B)).

Usage:
    python scripts/grid_oracle.py            # the Theorem 7 failure case
    python scripts/grid_oracle.py --rotation # the equality case (expect 0.25)
"""

import argparse
import itertools
import time

import numpy as np

rng_global = np.random.default_rng(20240501)


def pick_min_eig(lam, targets):
    B = lam.shape[0]
    L = np.concatenate([np.zeros((B, 1), complex), lam], axis=1)
    w = np.concatenate([[0j], np.asarray(targets, complex)])
    num = 1 - w[None, :, None] * np.conj(w)[None, None, :]
    den = 1 - L[:, :, None] * np.conj(L)[:, None, :]
    return np.linalg.eigvalsh(num / den)[:, 0]


def feasible_mask(lam, ta, tb, tol=-1e-11):
    CH = 200000
    out = np.empty(lam.shape[0], dtype=bool)
    for i0 in range(0, lam.shape[0], CH):
        sl = slice(i0, i0 + CH)
        out[sl] = (pick_min_eig(lam[sl], ta) >= tol) & (pick_min_eig(lam[sl], tb) >= tol)
    return out


def prefilter(lam, ta, tb):
    keep = np.ones(lam.shape[0], dtype=bool)
    m = lam.shape[1]
    for i in range(m):
        keep &= np.abs(lam[:, i]) >= max(abs(ta[i]), abs(tb[i])) - 1e-9
        for j in range(i + 1, m):
            req = 0.0
            if ta[i] != ta[j]:
                req = max(req, abs((ta[i] - ta[j]) / (1 - np.conj(ta[i]) * ta[j])))
            if tb[i] != tb[j]:
                req = max(req, abs((tb[i] - tb[j]) / (1 - np.conj(tb[i]) * tb[j])))
            rho = np.abs((lam[:, i] - lam[:, j]) / (1 - np.conj(lam[:, i]) * lam[:, j]))
            keep &= rho >= req - 1e-9
    return keep


def lattice_around(centers, spread_r, spread_ph, per_center, m):
    """Lattice-like cloud around each retained center (low-discrepancy grid)."""
    pts = []
    for c in centers:
        r0 = np.abs(c)
        p0 = np.angle(c)
        n = int(round(per_center ** (1.0 / (2 * m - 1))))
        n = max(n, 2)
        axes = []
        for j in range(m):
            axes.append(np.linspace(max(0.05, r0[j] - spread_r), min(0.99995, r0[j] + spread_r), n))
        for j in range(m):
            if j == 0:
                axes.append(np.zeros(1))
            else:
                axes.append(np.linspace(p0[j] - spread_ph, p0[j] + spread_ph, n))
        mesh = np.meshgrid(*axes, indexing="ij")
        rs = np.stack([g.ravel() for g in mesh[:m]], axis=1)
        ps = np.stack([np.broadcast_to(g, mesh[0].shape).ravel() for g in mesh[m:]], axis=1)
        pts.append(rs * np.exp(1j * ps))
    return np.concatenate(pts, axis=0)


def scan_subset(S, A, B, budget=10):
    m = len(S)
    ta = np.array([A[k] for k, l in S])
    tb = np.array([B[l] for k, l in S])
    if m == 1:
        return max(abs(ta[0]), abs(tb[0]))
    floors = np.maximum(np.abs(ta), np.abs(tb))
    best_v, beam = np.inf, None
    # stage 0: dense random cloud (effectively a jittered coarse lattice)
    n0 = {2: 3_000_000, 3: 6_000_000}.get(m, 8_000_000)
    r = floors[None, :] + (0.9995 - floors[None, :]) * rng_global.random((n0, m))
    ph = 2 * np.pi * rng_global.random((n0, m))
    ph[:, 0] = 0.0
    lam = r * np.exp(1j * ph)
    keep = prefilter(lam, ta, tb)
    lam = lam[keep]
    obj = np.prod(np.abs(lam), axis=1)
    order = np.argsort(obj)
    lam, obj = lam[order], obj[order]
    feas_idx = []
    CH = 200000
    for i0 in range(0, len(obj), CH):
        ok = feasible_mask(lam[i0:i0 + CH], ta, tb)
        feas_idx.extend(i0 + np.nonzero(ok)[0][:50])
        if len(feas_idx) >= 50:
            break
    if not feas_idx:
        return np.inf
    beam = lam[np.array(feas_idx[:12])]
    best_v = float(obj[feas_idx[0]])
    spread_r, spread_ph = 0.06, 0.3
    for stage in range(budget):
        per = 80000 if m >= 4 else 40000
        cloud = lattice_around(beam, spread_r, spread_ph, per, m)
        keep = np.max(np.abs(cloud), axis=1) < 1.0
        cloud = cloud[keep]
        ok = feasible_mask(cloud, ta, tb)
        cloud = cloud[ok]
        if len(cloud):
            obj = np.prod(np.abs(cloud), axis=1)
            order = np.argsort(obj)
            take = cloud[order[:12]]
            if obj[order[0]] < best_v:
                best_v = float(obj[order[0]])
                beam = take
            else:
                beam = np.concatenate([beam[:4], take[:8]], axis=0)
        spread_r *= 0.45
        spread_ph *= 0.45
    return best_v


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rotation", action="store_true",
                    help="run the rotation (equality) case instead of the failure case")
    args = ap.parse_args()
    A = [0.5, 0.5j]
    B = [0.5j, -0.5] if args.rotation else [0.5, -0.5]
    lA = abs(A[0]) * abs(A[1])
    pairs = list(itertools.product(range(2), range(2)))
    t0 = time.time()
    best = np.inf
    for size in range(1, 5):
        for S in itertools.combinations(pairs, size):
            v = scan_subset(S, A, B)
            best = min(best, v)
            print(f"S={S}: V~{v:.8f}   ({time.time()-t0:.0f}s)", flush=True)
    print(f"\nbidisc value estimate: {best:.8f}")
    print(f"margin over max(l(A,0), l(B,0)) = {lA}: delta = {best - lA:.8f}")


if __name__ == "__main__":
    main()
