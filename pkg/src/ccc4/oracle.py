"""Independent ground-truth checks for the distance-space machinery.

Everything here recomputes main-path quantities by a second, slower route:
Cartesian residuals of the defining central-configuration equations,
finite-difference derivatives, circumradius identities, and brute-force
multistart sweeps for uniqueness.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import serialize
from .chart import sample_interior
from .errors import NonRealizableError
from .geometry import (MassVector, K_term, Q_term, _m, _r6,
                       canonical_distance_tuple, cayley_menger_H, is_geometric,
                       moment_I, potential_U, ptolemy_P)
from .inverse import CyclicShape, shape_to_distances
from .solver import SolverOptions, minimize_from

_PAIR_INDEX = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True, eq=False)
class PlanarConfig:
    """Four planar points with masses; center of mass at the origin."""

    positions: np.ndarray   # shape (4, 2)
    masses: MassVector

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(4, 2).copy()
        object.__setattr__(self, "positions", pos)
        scale = max(1.0, float(np.abs(pos).max()))
        com = self.masses.array @ pos / self.masses.M
        if np.linalg.norm(com) > 1e-12 * scale:
            raise ValueError(f"center of mass {com} is not at the origin")

    def distances(self) -> np.ndarray:
        pos = self.positions
        return np.array([np.linalg.norm(pos[i] - pos[j]) for i, j in _PAIR_INDEX])


def _heron_area(a: float, b: float, c: float) -> float:
    """Numerically stable triangle area (sorted-edge form, safe for the thin
    triangles that show up near the chart boundary)."""
    a, b, c = sorted((a, b, c), reverse=True)
    inner = c - (a - b)
    if inner < 0.0:
        raise NonRealizableError(f"sides {a:.6g}, {b:.6g}, {c:.6g} violate "
                                 "the triangle inequality")
    return 0.25 * math.sqrt((a + (b + c)) * inner * (c + (a - b)) * (a + (b - c)))


def circumradius(r, rtol: float = 1e-9) -> float:
    """Circumradius of the cyclic quadrilateral from triangle (1,2,3),
    cross-checked against triangle (1,2,4)."""
    r12, r13, r14, r23, r24, r34 = _r6(r)
    rc1 = r12 * r13 * r23 / (4.0 * _heron_area(r12, r13, r23))
    rc2 = r12 * r14 * r24 / (4.0 * _heron_area(r12, r14, r24))
    if abs(rc1 - rc2) > rtol * max(rc1, rc2):
        raise NonRealizableError(
            f"triangle circumradii disagree ({rc1:.12g} vs {rc2:.12g}); "
            "the four bodies are not concyclic")
    return rc1


def embed_cyclic(r, m, rtol: float = 1e-9) -> PlanarConfig:
    """Planar positions of a realizable cyclic distance vector, with the
    center of mass moved to the origin.

    The first three bodies are placed by trilateration and the fourth by
    its two circle-consistent candidates, keeping the one that reproduces
    r34; every mutual distance of the result matches the input to rtol.
    """
    arr = _r6(r)
    scale = float(arr.max())
    if not is_geometric(arr):
        raise NonRealizableError("distance vector is not geometrically realizable")
    if abs(K_term(arr)) > 1e-6 * scale ** 3 or abs(ptolemy_P(arr)) > 1e-6 * scale ** 2:
        raise NonRealizableError("distance vector is not cyclic (P or K residual "
                                 "too large)")
    r12, r13, r14, r23, r24, r34 = arr
    p1 = np.array([0.0, 0.0])
    p2 = np.array([r12, 0.0])
    x3 = (r12 ** 2 + r13 ** 2 - r23 ** 2) / (2.0 * r12)
    y3sq = r13 ** 2 - x3 ** 2
    if y3sq < -rtol * scale ** 2:
        raise NonRealizableError("triangle (1,2,3) cannot be embedded")
    p3 = np.array([x3, math.sqrt(max(y3sq, 0.0))])
    x4 = (r12 ** 2 + r14 ** 2 - r24 ** 2) / (2.0 * r12)
    y4sq = r14 ** 2 - x4 ** 2
    if y4sq < -rtol * scale ** 2:
        raise NonRealizableError("triangle (1,2,4) cannot be embedded")
    y4 = math.sqrt(max(y4sq, 0.0))
    cands = [np.array([x4, y4]), np.array([x4, -y4])]
    p4 = min(cands, key=lambda q: abs(np.linalg.norm(q - p3) - r34))
    if abs(np.linalg.norm(p4 - p3) - r34) > rtol * scale:
        raise NonRealizableError("no embedding reproduces r34; input is not "
                                 "a realizable cyclic vector")
    pos = np.vstack([p1, p2, p3, p4])
    masses = _m(m)
    pos -= masses.array @ pos / masses.M
    cfg = PlanarConfig(positions=pos, masses=masses)
    if np.max(np.abs(cfg.distances() - arr)) > rtol * scale:
        raise NonRealizableError("embedded distances do not reproduce the input")
    return cfg


def circumcenter(positions: np.ndarray) -> np.ndarray:
    """Center of the circle through the first three points."""
    (x1, y1), (x2, y2), (x3, y3) = positions[:3]
    d = 2.0 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2))
    if d == 0.0:
        raise NonRealizableError("first three points are collinear")
    s1, s2, s3 = x1 ** 2 + y1 ** 2, x2 ** 2 + y2 ** 2, x3 ** 2 + y3 ** 2
    return np.array([
        (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / d,
        (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / d,
    ])


def cartesian_cc_residual(cfg: PlanarConfig, lambda_q: float | None = None,
                          fit: bool = False) -> float:
    """Worst-body residual of the defining equations
    lambda m_i q_i = sum_j m_i m_j (q_j - q_i) / r_ij^3.

    With fit=True the multiplier is chosen by least squares over all four
    bodies; otherwise lambda_q must be supplied.
    """
    pos, masses = cfg.positions, cfg.masses.array
    F = np.zeros((4, 2))
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            diff = pos[j] - pos[i]
            F[i] += masses[i] * masses[j] * diff / np.linalg.norm(diff) ** 3
    target = masses[:, None] * pos
    if fit:
        denom = float(np.sum(target * target))
        if denom == 0.0:
            raise ValueError("all bodies at the origin; multiplier is undefined")
        lambda_q = float(np.sum(F * target)) / denom
    elif lambda_q is None:
        raise ValueError("lambda_q is required unless fit=True")
    return float(np.max(np.linalg.norm(F - lambda_q * target, axis=1)))


def embed_planar_lsq(r, m) -> PlanarConfig:
    """Best planar embedding of an arbitrary distance vector by classical
    multidimensional scaling (rank-2 projection of the Gram matrix).

    For non-realizable vectors the embedded distances differ from the input;
    this is the converse route used to show that rejected minimizers are
    genuinely far from any planar configuration."""
    arr = _r6(r)
    D2 = np.zeros((4, 4))
    for (i, j), d in zip(_PAIR_INDEX, arr):
        D2[i, j] = D2[j, i] = d * d
    J = np.eye(4) - 0.25
    G = -0.5 * J @ D2 @ J
    vals, vecs = np.linalg.eigh(G)
    top = np.argsort(vals)[-2:]
    pos = vecs[:, top] * np.sqrt(np.maximum(vals[top], 0.0))
    masses = _m(m)
    pos -= masses.array @ pos / masses.M
    return PlanarConfig(positions=pos, masses=masses)


# --- finite differences ----------------------------------------------------

def _steps(r_arr: np.ndarray, h) -> np.ndarray:
    if h is None:
        return 1e-5 * np.maximum(1.0, r_arr)
    h_arr = np.asarray(h, dtype=float)
    return np.full(6, float(h)) if h_arr.ndim == 0 else h_arr


def fd_gradient(f, r, h=None) -> np.ndarray:
    """Central-difference gradient of a scalar field on distance vectors."""
    r_arr = _r6(r)
    hs = _steps(r_arr, h)
    out = np.zeros(6)
    for k in range(6):
        up, dn = r_arr.copy(), r_arr.copy()
        up[k] += hs[k]
        dn[k] -= hs[k]
        out[k] = (f(up) - f(dn)) / (2.0 * hs[k])
    return out


def fd_hessian(f, r, h=None) -> np.ndarray:
    """Central-difference Hessian of a scalar field on distance vectors.

    The default step (1e-5 per unit length) is tuned for gradients; second
    differences divide by h^2, so a coarser step around 1e-4 gives the
    better truncation/roundoff balance here.
    """
    r_arr = _r6(r)
    hs = _steps(r_arr, h)
    H = np.zeros((6, 6))
    f0 = f(r_arr.copy())
    for k in range(6):
        up, dn = r_arr.copy(), r_arr.copy()
        up[k] += hs[k]
        dn[k] -= hs[k]
        H[k, k] = (f(up) + f(dn) - 2.0 * f0) / hs[k] ** 2
    for k in range(6):
        for l in range(k + 1, 6):
            pp, pm, mp, mm = (r_arr.copy() for _ in range(4))
            pp[k] += hs[k]; pp[l] += hs[l]
            pm[k] += hs[k]; pm[l] -= hs[l]
            mp[k] -= hs[k]; mp[l] += hs[l]
            mm[k] -= hs[k]; mm[l] -= hs[l]
            H[k, l] = H[l, k] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hs[k] * hs[l])
    return H


# --- randomized shapes and uniqueness sweeps --------------------------------

def sample_cyclic_shapes(n: int, seed: int, min_gap: float = 0.15,
                         radius_range=(0.5, 2.0)) -> list:
    """Deterministic batch of random cyclic shapes with a minimum angular
    separation, keeping all chords well away from zero."""
    rng = np.random.default_rng(seed)
    shapes = []
    for _ in range(n):
        gaps = min_gap + rng.dirichlet(np.ones(4)) * (2.0 * math.pi - 4.0 * min_gap)
        theta = (0.0, gaps[0], gaps[0] + gaps[1], gaps[0] + gaps[1] + gaps[2])
        shapes.append(CyclicShape(theta=theta,
                                  radius=float(rng.uniform(*radius_range))))
    return shapes


@dataclass(frozen=True)
class UniquenessReport:
    """Endpoint clustering of independent multistart solves for one mass
    vector; more than one cluster contradicts uniqueness of the minimizer."""

    n_starts: int
    seed: int
    cluster_count: int
    clusters: tuple      # (representative r tuple, member count, U value)
    failures: tuple      # indices of starts that did not converge
    theorem_violated: bool

    def to_json_dict(self) -> dict:
        return {"n_starts": self.n_starts, "seed": self.seed,
                "cluster_count": self.cluster_count,
                "clusters": [{"r": list(rep), "count": count, "U": U}
                             for rep, count, U in self.clusters],
                "failures": list(self.failures),
                "theorem_violated": self.theorem_violated}

    def to_json(self) -> str:
        return serialize.dumps(self.to_json_dict())


def multistart_uniqueness(m, n_starts: int = 50, seed: int = 0,
                          opts: SolverOptions | None = None,
                          jobs: int | None = None,
                          cluster_radius: float = 1e-6) -> UniquenessReport:
    """Run n_starts independent solves from random interior starts and
    cluster the converged endpoints (after identifying relabeled copies
    admissible for the mass symmetry)."""
    masses = _m(m)
    opts = opts or SolverOptions()
    starts = []
    for i in range(n_starts):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, i)))
        starts.append(sample_interior(seed, margin=opts.interior_margin, rng=rng))

    def run(vw):
        return minimize_from(masses, vw, opts)

    if jobs is not None and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run, starts))
    else:
        records = [run(vw) for vw in starts]

    clusters = []   # [canonical r array, count, U]
    failures = []
    for idx, rec in enumerate(records):
        if not rec.converged:
            failures.append(idx)
            continue
        canon = np.array(canonical_distance_tuple(rec.r_star.array, masses))
        for entry in clusters:
            if np.linalg.norm(entry[0] - canon) <= cluster_radius:
                entry[1] += 1
                break
        else:
            clusters.append([canon, 1, rec.scalars.U])
    return UniquenessReport(
        n_starts=n_starts, seed=seed, cluster_count=len(clusters),
        clusters=tuple((tuple(float(x) for x in rep), count, U)
                       for rep, count, U in clusters),
        failures=tuple(failures), theorem_violated=len(clusters) > 1)


# --- identity battery -------------------------------------------------------

@dataclass(frozen=True)
class IdentityRow:
    name: str
    samples: int
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold


def run_identity_battery(samples: int, seed: int) -> list:
    """The randomized identity suite behind `ccc4 identities` and the
    acceptance criteria: the determinant factorization, the cyclic
    vanishing of K and H, gradient parallelism, the circumradius relation,
    and the homogeneity table."""
    rng = np.random.default_rng(seed)
    rows = []

    # determinant factorization H/2 = P Q - K^2 against the raw determinant
    worst = 0.0
    for _ in range(samples):
        arr = rng.uniform(0.05, 10.0, 6)
        res = abs(0.5 * cayley_menger_H(arr)
                  - (ptolemy_P(arr) * Q_term(arr) - K_term(arr) ** 2))
        worst = max(worst, res / (1.0 + arr.max()) ** 8)
    rows.append(IdentityRow("pech_identity", samples, worst, 1e-9))

    sq = np.array([1.0, math.sqrt(2.0), 1.0, 1.0, math.sqrt(2.0), 1.0])
    ones = np.ones(6)
    rows.append(IdentityRow("pech_anchor_points", 2,
                            max(abs(Q_term(sq) - 8.0), abs(Q_term(ones) - 2.0)),
                            1e-12))

    n_shapes = max(100, samples // 10)
    shapes = sample_cyclic_shapes(n_shapes, seed + 1)
    worst_k = worst_h = worst_grad = worst_rc = 0.0
    for shape in shapes:
        arr = shape_to_distances(shape).array
        worst_k = max(worst_k, abs(K_term(arr)))
        worst_h = max(worst_h, abs(cayley_menger_H(arr)))
        q2 = 2.0 * Q_term(arr)
        grad_p = np.array([arr[5], -arr[4], arr[3], arr[2], -arr[1], arr[0]])
        fd_h = fd_gradient(cayley_menger_H, arr)
        worst_grad = max(worst_grad, float(np.max(
            np.abs(fd_h - q2 * grad_p) / np.abs(q2 * grad_p))))
        rc = circumradius(arr)
        worst_rc = max(worst_rc, abs(q2 - 4.0 / rc ** 2 * float(np.prod(arr))) / abs(q2))
    rows.append(IdentityRow("cyclic_K_vanishes", n_shapes, worst_k, 1e-10))
    rows.append(IdentityRow("cyclic_H_vanishes", n_shapes, worst_h, 1e-9))
    rows.append(IdentityRow("gradient_parallelism", n_shapes, worst_grad, 1e-6))
    rows.append(IdentityRow("circumradius_relation", n_shapes, worst_rc, 1e-9))

    # homogeneity degrees: U -1, I 2, P 2, K 3, Q 4, H 6 (the bordered
    # determinant is 288 V^2 and the volume scales as k^3, consistent with
    # deg P + deg Q = 2 deg K = 6 in the factorization).  Residuals are
    # normalized by the positive monomial sum of each function (P, K, Q can
    # cancel catastrophically, so relative-to-value is meaningless there).
    n_hom = max(100, samples // 10)
    worst_hom = 0.0
    for _ in range(n_hom):
        arr = rng.uniform(0.2, 3.0, 6)
        masses = MassVector.from_iterable(rng.uniform(0.2, 5.0, 4))
        k = float(rng.uniform(0.1, 10.0))
        scaled = k * arr
        r12, r13, r14, r23, r24, r34 = arr
        scale_p = r12 * r34 + r14 * r23 + r13 * r24
        scale_k = (r12 * r13 * r23 + r12 * r14 * r24
                   + r13 * r14 * r34 + r23 * r24 * r34)
        scale_q = 6.0 * float(np.max(arr)) ** 4
        checks = [
            (potential_U(scaled, masses), potential_U(arr, masses) / k,
             potential_U(arr, masses) / k),
            (moment_I(scaled, masses), moment_I(arr, masses) * k ** 2,
             moment_I(arr, masses) * k ** 2),
            (ptolemy_P(scaled), ptolemy_P(arr) * k ** 2, scale_p * k ** 2),
            (K_term(scaled), K_term(arr) * k ** 3, scale_k * k ** 3),
            (Q_term(scaled), Q_term(arr) * k ** 4, scale_q * k ** 4),
        ]
        for got, want, scale in checks:
            worst_hom = max(worst_hom, abs(got - want) / (1e-12 * abs(scale)))
        res_h = abs(cayley_menger_H(scaled) - cayley_menger_H(arr) * k ** 6)
        worst_hom = max(worst_hom, res_h / (1e-9 * (1.0 + scaled.max()) ** 8))
    rows.append(IdentityRow("homogeneity_degrees", n_hom, worst_hom, 1.0))
    return rows
