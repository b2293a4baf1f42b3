"""Upper bounds for product-domain Lempert functions with product pole sets.

A configuration assigns one disc node per selected pole pair; it certifies an
upper bound when, for each coordinate, the interpolation problem
(0 -> base, node -> pole data) admits an analytic self-map of the disc.  Disc
coordinates use the Pick criterion directly; plane-domain coordinates ask the
node to be sent to some lift of the pole through the normalized cover, which
again is a Pick problem once the lift assignment is chosen (a sufficient
family of maps cover o h with h(0) = 0).

The search over node space runs random-direction compass descent with an
eigenvalue penalty from many seeded restarts, then polishes the best
candidates with SLSQP, then repairs to strict feasibility by scaling nodes
outward.  Every reported value is realized by a configuration re-verified
through the cyclic-Jacobi Pick path.  Restarts use per-restart RNG streams,
so results are bit-identical for any thread count.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .complex_kernel import (
    PickProblem,
    moebius,
    pick_feasible,
    solve_node_quadratic,
)
from .covering_domains import PlaneDomain, build_cover
from .disc_domain import PoleSet

NODE_COLLISION_TOL = 1e-8
FEASIBILITY_TOL = 1e-12
# the repair phase targets a stricter tolerance than the final verification
# so that the LAPACK and Jacobi eigenvalue routes cannot disagree about it
REPAIR_TOL = 5e-13
MAX_SUBSET_SIZE = 8
MAX_BLASCHKE_DEGREE = 6

logger = logging.getLogger(__name__)
# subsets whose closed-form lower bound sits within this margin of the best
# value found so far cannot improve it meaningfully and are skipped
LB_SKIP_MARGIN = 1e-9


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 200
    seed: int = 0
    max_iterations: int = 2000
    penalty_weight: float = 1e4
    penalty_ramp_every: int = 500
    penalty_ramp_factor: float = 10.0
    tolerance: float = 1e-9
    step_init: float = 0.12
    step_decay: float = 0.6
    threads: int = 1
    polish_top: int = 2

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1 or self.threads < 1:
            raise ValueError("invalid settings")


@dataclass
class NodeConfig:
    """Certificate of an upper bound: selected pole pairs, their nodes and
    the product of node moduli."""

    subset: tuple
    nodes: tuple
    value: float
    coord_targets: tuple = field(default_factory=tuple)
    min_eigs: tuple = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# coordinate problems
# ---------------------------------------------------------------------------


@dataclass
class _Coord:
    """One coordinate of the product: fixed disc targets or lift candidates."""

    kind: str                      # "disc" | "plane"
    targets: np.ndarray | None     # (m,) for disc coordinates
    lift_candidates: list | None   # per node: (n_lifts,) complex arrays
    pole_values: tuple             # pole per node (for reporting)

    def batch_targets(self, lam: np.ndarray) -> np.ndarray:
        """Targets per configuration; greedy nearest-lift for plane kind."""
        B, m = lam.shape
        if self.kind == "disc":
            return np.broadcast_to(self.targets, (B, m))
        out = np.empty((B, m), dtype=complex)
        for j in range(m):
            nu = self.lift_candidates[j]
            d = np.abs((lam[:, j, None] - nu[None, :])
                       / (1.0 - np.conj(lam[:, j, None]) * nu[None, :]))
            # lifts larger than the node cannot be hit by a map fixing 0
            bad = np.abs(nu)[None, :] > np.abs(lam[:, j, None]) + 1e-12
            d = np.where(bad, d + 10.0, d)
            out[:, j] = nu[np.argmin(d, axis=1)]
        return out


def _batch_min_eig(lam: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Min Pick eigenvalue per configuration, targets varying per row."""
    B, m = lam.shape
    L = np.concatenate([np.zeros((B, 1), dtype=complex), lam], axis=1)
    W = np.concatenate([np.zeros((B, 1), dtype=complex), targets], axis=1)
    num = 1.0 - W[:, :, None] * np.conj(W)[:, None, :]
    den = 1.0 - L[:, :, None] * np.conj(L)[:, None, :]
    return np.linalg.eigvalsh(num / den)[:, 0]


def _penalized(lam: np.ndarray, coords: list, weight: np.ndarray) -> np.ndarray:
    B, m = lam.shape
    am = np.abs(lam)
    obj = np.prod(am, axis=1)
    pen = np.zeros(B)
    for coord in coords:
        tg = coord.batch_targets(lam)
        pen += np.maximum(0.0, -_batch_min_eig(lam, tg))
    coll = np.zeros(B)
    for i in range(m):
        for j in range(i + 1, m):
            coll += np.maximum(0.0, NODE_COLLISION_TOL - np.abs(lam[:, i] - lam[:, j]))
    outside = np.maximum(0.0, np.max(am, axis=1) - 0.9999995)
    return obj + weight * (pen + coll) + 1e7 * outside


def _config_min_eigs(nodes: np.ndarray, coords: list):
    lam = nodes[None, :]
    return tuple(float(_batch_min_eig(lam, c.batch_targets(lam))[0]) for c in coords)


def _feasible(nodes: np.ndarray, coords: list, tol: float = REPAIR_TOL) -> bool:
    return all(e >= -tol for e in _config_min_eigs(nodes, coords))


def _repair(nodes: np.ndarray, coords: list):
    """Scale the configuration outward until strictly feasible."""
    if _feasible(nodes, coords):
        return nodes, float(np.prod(np.abs(nodes)))
    top = 0.9999999 / np.max(np.abs(nodes))
    lo, hi = 1.0, min(1.05, top)
    if hi <= lo or not _feasible(nodes * hi, coords):
        return None, math.inf
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _feasible(nodes * mid, coords):
            hi = mid
        else:
            lo = mid
    repaired = nodes * hi
    return repaired, float(np.prod(np.abs(repaired)))


# ---------------------------------------------------------------------------
# starts
# ---------------------------------------------------------------------------


def _structured_starts(subset, coords, rng, n_theta=8):
    """Degree-2 Blaschke starts: nodes are preimages of the coordinate poles
    under e^{i theta} z Phi_alpha.  Available when no pole repeats more than
    twice in that coordinate.  These sit at the coordinate-extremal product
    value next to the feasible set, which is where optimal configurations
    live."""
    m = len(subset)
    starts = []
    for role, coord in enumerate(coords):
        if coord.kind == "disc":
            pole_of = coord.targets
        else:
            pole_of = np.array([c[0] if len(c) else 0j for c in coord.lift_candidates])
        labels = {}
        for j in range(m):
            labels.setdefault(complex(pole_of[j]), []).append(j)
        if any(len(v) > 2 for v in labels.values()):
            continue
        for th in np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False):
            alpha = 0.35 * complex(rng.random() - 0.5, rng.random() - 0.5)
            rootmap = {}
            ok = True
            for tv in labels:
                try:
                    r1, r2 = solve_node_quadratic(abs(alpha), tv * np.exp(-1j * th))
                except ValueError:
                    ok = False
                    break
                phase = np.exp(1j * np.angle(alpha)) if alpha != 0 else 1.0
                rootmap[tv] = (r1 * phase, r2 * phase)
            if not ok:
                continue
            for flip in (0, 1):
                lam = np.zeros(m, dtype=complex)
                for tv, idxs in labels.items():
                    for pos, j in enumerate(idxs):
                        lam[j] = rootmap[tv][(pos + flip) % 2]
                if np.max(np.abs(lam)) < 0.999:
                    starts.append(lam)
    return starts


# ---------------------------------------------------------------------------
# the search engine
# ---------------------------------------------------------------------------


def _compass_chunk(x, step, weight, gens, coords, settings):
    """Lockstep compass descent for one chunk of restarts.

    x: (n, 2m) real coordinates.  Each restart draws its probe directions
    from its own generator, so trajectories do not depend on the chunk
    composition.  All probes of an iteration are evaluated in one batched
    eigenvalue call; acceptance takes the best probe per restart, which is
    order-independent.
    """
    n, d = x.shape
    lam_of = lambda xx: xx[..., 0::2] + 1j * xx[..., 1::2]
    f = _penalized(lam_of(x), coords, weight)
    ndir = 2 * d + 2
    for it in range(settings.max_iterations):
        active = np.nonzero(step >= settings.tolerance)[0]
        na = len(active)
        if na == 0:
            break
        dirs = np.empty((na, ndir, d))
        for i, r in enumerate(active):
            v = gens[r].standard_normal((ndir, d))
            dirs[i] = v / np.linalg.norm(v, axis=1, keepdims=True)
        probes = x[active, None, :] + step[active, None, None] * dirs
        lam = lam_of(x[active])
        lam_shrunk = lam * (1.0 - 0.3 * step[active])[:, None]
        shrink_probe = np.empty((na, 1, d))
        shrink_probe[:, 0, 0::2] = lam_shrunk.real
        shrink_probe[:, 0, 1::2] = lam_shrunk.imag
        probes = np.concatenate([probes, shrink_probe], axis=1)
        np_, nprobe = probes.shape[0], probes.shape[1]
        fp = _penalized(lam_of(probes.reshape(na * nprobe, d)), coords,
                        np.repeat(weight[active], nprobe)).reshape(na, nprobe)
        jbest = np.argmin(fp, axis=1)
        fbest = fp[np.arange(na), jbest]
        improved = fbest < f[active] - 1e-15
        acc = active[improved]
        x[acc] = probes[improved, jbest[improved], :]
        f[acc] = fbest[improved]
        step[active[~improved]] *= settings.step_decay
        if (it + 1) % settings.penalty_ramp_every == 0:
            weight[active] *= settings.penalty_ramp_factor
            f[active] = _penalized(lam_of(x[active]), coords, weight[active])
    return x


def _polish(nodes: np.ndarray, coords: list, rounds: int = 2) -> np.ndarray:
    """SLSQP refinement of a candidate with eigenvalue inequality constraints.

    The lift assignment of plane coordinates is frozen at the incoming
    configuration so the constraints stay smooth.
    """
    m = len(nodes)
    to_lam = lambda x: x[:m] + 1j * x[m:]
    frozen = [np.asarray(c.batch_targets(nodes[None, :])[0]) for c in coords]

    def eig_fun(x, tg):
        lam = np.concatenate([[0j], to_lam(x)])
        w = np.concatenate([[0j], tg])
        num = 1.0 - w[:, None] * np.conj(w)[None, :]
        den = 1.0 - lam[:, None] * np.conj(lam)[None, :]
        return float(np.linalg.eigvalsh(num / den)[0]) * 1e3

    cons = [{"type": "ineq", "fun": (lambda x, tg=tg: eig_fun(x, tg))} for tg in frozen]
    cons.append({"type": "ineq",
                 "fun": lambda x: 0.9999999 - float(np.max(np.abs(to_lam(x))))})
    x0 = np.concatenate([nodes.real, nodes.imag])
    best = nodes
    for _ in range(rounds):
        res = minimize(lambda x: float(np.prod(np.abs(to_lam(x)))), x0,
                       method="SLSQP", constraints=cons,
                       options={"maxiter": 80, "ftol": 1e-14})
        x0 = res.x
        cand = to_lam(res.x)
        if np.max(np.abs(cand)) < 1.0:
            best = cand
    return best


def _search_subset(subset, coords, settings: OptimizerSettings, subset_key):
    m = len(subset)
    restarts = settings.restarts
    # Schwarz floor per node: |node| >= |target| in each coordinate
    floors = np.zeros(m)
    for coord in coords:
        if coord.kind == "disc":
            floors = np.maximum(floors, np.abs(coord.targets))
        else:
            floors = np.maximum(floors,
                                np.array([np.min(np.abs(c)) if len(c) else 0.0
                                          for c in coord.lift_candidates]))
    gens = [np.random.default_rng(np.random.SeedSequence(entropy=settings.seed,
                                                         spawn_key=(*subset_key, r)))
            for r in range(restarts)]
    start_rng = np.random.default_rng(np.random.SeedSequence(entropy=settings.seed,
                                                             spawn_key=(*subset_key, 1 << 20)))
    r0 = floors[None, :] + (0.995 - floors[None, :]) * start_rng.random((restarts, m))
    ph0 = 2.0 * np.pi * start_rng.random((restarts, m))
    lam0 = r0 * np.exp(1j * ph0)
    for i, st in enumerate(_structured_starts(subset, coords, start_rng)):
        if i >= restarts // 2:
            break
        lam0[i] = st
    x = np.empty((restarts, 2 * m))
    x[:, 0::2] = lam0.real
    x[:, 1::2] = lam0.imag
    step = np.full(restarts, settings.step_init)
    weight = np.full(restarts, settings.penalty_weight)

    if settings.threads == 1 or restarts < 2 * settings.threads:
        x = _compass_chunk(x, step, weight, gens, coords, settings)
    else:
        bounds = np.linspace(0, restarts, settings.threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            futs = []
            for t in range(settings.threads):
                sl = slice(bounds[t], bounds[t + 1])
                futs.append(pool.submit(_compass_chunk, x[sl], step[sl].copy(),
                                        weight[sl].copy(), gens[sl], coords, settings))
            x = np.concatenate([f.result() for f in futs], axis=0)

    lam = x[:, 0::2] + 1j * x[:, 1::2]
    raw_vals = np.prod(np.abs(lam), axis=1)
    order = sorted(range(restarts), key=lambda r: (raw_vals[r], r))
    candidates = [lam[r] for r in order[: max(settings.polish_top, 1)]]
    candidates += [_polish(c, coords) for c in list(candidates)]
    best_val, best_nodes = math.inf, None
    for cand in candidates:
        repaired, val = _repair(cand, coords)
        if repaired is not None and val < best_val:
            best_val, best_nodes = val, repaired
    if best_nodes is None:
        return None
    return NodeConfig(subset=tuple(subset), nodes=tuple(best_nodes), value=best_val,
                      coord_targets=tuple(tuple(c.batch_targets(best_nodes[None, :])[0])
                                          for c in coords),
                      min_eigs=_config_min_eigs(best_nodes, coords))


def _verify_config(config: NodeConfig) -> None:
    """Re-check the reported configuration through the certifying Pick path."""
    for targets in config.coord_targets:
        prob = PickProblem(nodes=(0j, *config.nodes), targets=(0j, *targets))
        ok, min_eig = pick_feasible(prob)
        if min_eig < -FEASIBILITY_TOL:
            raise RuntimeError(f"optimizer returned infeasible configuration ({min_eig})")


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def _subset_lower_bound(subset, reduced_targets) -> float:
    """max over coordinates of the disc Lempert value of the projected poles."""
    lb = 0.0
    for targets in reduced_targets:
        seen = {}
        for j, t in enumerate(targets):
            seen[complex(t)] = True
        lb = max(lb, float(np.prod([abs(t) for t in seen])))
    return lb


def bidisc_lempert(A: PoleSet, B: PoleSet, z: complex, w: complex,
                   settings: OptimizerSettings | None = None):
    """Upper-bound evaluation of the bidisc Lempert function with pole set
    A x B at (z, w), minimized over nonempty subsets of pole pairs.

    The instance is first reduced by the automorphism pair (Phi_z, Phi_w) to
    base point (0, 0).  Singleton subsets have the exact value
    max(|a'|, |b'|); larger subsets run the compass/polish/repair search.
    Subsets whose coordinate-projection lower bound cannot beat the current
    best are skipped.
    """
    settings = settings or OptimizerSettings()
    if len(A) > 4 or len(B) > 4:
        raise ValueError("pole sets capped at 4 points each")
    a_red = [complex(moebius(z, a)) for a in A]
    b_red = [complex(moebius(w, b)) for b in B]
    pairs = list(itertools.product(range(len(A)), range(len(B))))

    best_val, best_cfg = math.inf, None
    # singletons are exact
    for (k, l) in pairs:
        val = max(abs(a_red[k]), abs(b_red[l]))
        if val < best_val:
            node = a_red[k] if abs(a_red[k]) >= abs(b_red[l]) else b_red[l]
            if abs(node) < 1e-15:
                node = 0j
            best_val = val
            best_cfg = NodeConfig(subset=((k, l),), nodes=(node,), value=val,
                                  coord_targets=((a_red[k],), (b_red[l],)),
                                  min_eigs=(0.0, 0.0))

    for size in range(2, min(len(pairs), MAX_SUBSET_SIZE) + 1):
        for subset in itertools.combinations(pairs, size):
            ta = np.array([a_red[k] for k, l in subset])
            tb = np.array([b_red[l] for k, l in subset])
            if _subset_lower_bound(subset, (ta, tb)) >= best_val - LB_SKIP_MARGIN:
                continue
            coords = [_Coord("disc", ta, None, tuple(ta)),
                      _Coord("disc", tb, None, tuple(tb))]
            key = tuple(k * 64 + l for k, l in subset)
            cfg = _search_subset(subset, coords, settings, key)
            if cfg is None:
                logger.debug("subset %s: no feasible configuration found", subset)
            elif cfg.value < best_val:
                best_val, best_cfg = cfg.value, cfg
    if best_cfg is not None and len(best_cfg.subset) > 1:
        _verify_config(best_cfg)
    return best_cfg, best_val


def mixed_product_upper(D: PlaneDomain, G: PlaneDomain, A: PoleSet, B: PoleSet,
                        z: complex, w: complex,
                        settings: OptimizerSettings | None = None,
                        degree_cap: int = MAX_BLASCHKE_DEGREE,
                        lifts_per_pole: int = 6):
    """Upper bound for l_{DxG}(A x B, (z, w)) over the sufficient family of
    cover-composed disc maps.

    Plane-domain coordinates route each node to a lift of its pole (greedy
    nearest-lift assignment inside the search); disc coordinates use Pick
    feasibility after automorphism reduction.  The returned value is an upper
    bound on the Lempert function; it is not claimed minimal, but it always
    satisfies every known lower bound.
    """
    settings = settings or OptimizerSettings()
    if degree_cap > MAX_BLASCHKE_DEGREE:
        raise ValueError(f"Blaschke degree > {MAX_BLASCHKE_DEGREE}")
    if len(A) > 4 or len(B) > 4:
        raise ValueError("pole sets capped at 4 points each")

    def coord_data(domain, poles, base):
        if domain.kind == "disc":
            red = [complex(moebius(base, p)) for p in poles]
            return ("disc", red)
        cover = build_cover(domain, base)
        lifts = []
        for p in poles:
            ls = cover.lifts(p, max(lifts_per_pole, 4))
            lifts.append(np.asarray(ls.eta[:lifts_per_pole], dtype=complex))
        return ("plane", lifts)

    kind_a, data_a = coord_data(D, list(A), z)
    kind_b, data_b = coord_data(G, list(B), w)
    pairs = list(itertools.product(range(len(A)), range(len(B))))

    best_val, best_cfg = math.inf, None
    for size in range(1, min(len(pairs), degree_cap, MAX_SUBSET_SIZE) + 1):
        for subset in itertools.combinations(pairs, size):
            if kind_a == "disc":
                ca = _Coord("disc", np.array([data_a[k] for k, l in subset]), None,
                            tuple(A.points[k] for k, l in subset))
                proj_a = np.array([data_a[k] for k, l in subset])
            else:
                ca = _Coord("plane", None, [data_a[k] for k, l in subset],
                            tuple(A.points[k] for k, l in subset))
                proj_a = np.array([data_a[k][0] for k, l in subset])
            if kind_b == "disc":
                cb = _Coord("disc", np.array([data_b[l] for k, l in subset]), None,
                            tuple(B.points[l] for k, l in subset))
                proj_b = np.array([data_b[l] for k, l in subset])
            else:
                cb = _Coord("plane", None, [data_b[l] for k, l in subset],
                            tuple(B.points[l] for k, l in subset))
                proj_b = np.array([data_b[l][0] for k, l in subset])
            if _subset_lower_bound(subset, (proj_a, proj_b)) >= best_val - LB_SKIP_MARGIN:
                continue
            key = tuple(1_000_000 + k * 64 + l for k, l in subset)
            cfg = _search_subset(subset, [ca, cb], settings, key)
            if cfg is not None and cfg.value < best_val:
                best_val, best_cfg = cfg.value, cfg
    if best_cfg is None:
        raise RuntimeError("no feasible configuration found")
    _verify_config(best_cfg)
    return best_val, best_cfg
