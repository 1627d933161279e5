"""Constellations of linear combinations: trajectories, intersections, bounds.

A linear combination of two coherent states has roots moving along circles
that meet the two defining roots equiangularly; a combination of arbitrary
states keeps every common star and obeys a Mason-theorem lower bound on its
distinct-star count.  For spin 3/2 every non-degenerate state decomposes
into exactly two coherent states in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    DegenerateDenominator,
    MasonBoundViolation,
    PoleAtT,
    ValidationError,
    ZeroCombination,
)
from .scbasis import sc_state
from .stellar import (
    Constellation,
    Direction,
    INFINITY,
    SpinState,
    StereoPoint,
    chordal_distance,
    majorana_polynomial,
    point_to_vector,
    polynomial_roots,
    rotation_matrix,
    spin_state,
    state_from_constellation,
    stereo_to_sphere,
    sphere_to_stereo,
)

__all__ = [
    "SuperposeResult",
    "Trajectory",
    "TwoSCDecomposition",
    "LineIntersection",
    "superpose",
    "mason_bound",
    "two_sc_trajectory",
    "trajectory_root",
    "spin1_line_intersections",
    "spin32_decompose",
    "distinct_star_count",
]


@dataclass(frozen=True)
class SuperposeResult:
    state: SpinState
    constellation: Constellation
    mason_bound: int


@dataclass(frozen=True)
class Trajectory:
    """Closed-form root curves of cos(t) |g1> (+) e^{i Omega} sin(t) |g2>.

    ``roots[i, k]`` is zeta_k at ts[i]; infinite values mark parameter
    values where root k passes through the south pole.  ``poles`` lists the
    (i, k) pairs where that happens.
    """

    gamma1: complex
    gamma2: complex
    omega: float
    ts: np.ndarray
    roots: np.ndarray
    poles: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class LineIntersection:
    """One coherent point on the line through two spin-1 states."""

    gamma: StereoPoint
    alpha1: complex
    alpha2: complex


@dataclass(frozen=True)
class TwoSCDecomposition:
    """Spin-3/2 state as alpha1 |n(gamma1)> + alpha2 |n(gamma2)>.

    ``beta1``/``beta2`` are the monic-polynomial weights
    (z-z1)(z-z2)(z-z3) = beta1 (z-g1)^3 + beta2 (z-g2)^3; they are None when
    an input star sits at the south pole (no monic cubic exists).  For a
    degenerate (repeated-star) input no two-SC decomposition exists:
    ``degenerate`` is set and ``tangent_coeff`` holds the coefficient c of
    the tangent-line limit (z-zd)^3 + c (z-zd)^2 at the doubled root zd.
    """

    gamma1: StereoPoint
    gamma2: StereoPoint
    alpha1: complex | None
    alpha2: complex | None
    beta1: complex | None
    beta2: complex | None
    degenerate: bool
    tangent_coeff: complex | None


# ---------------------------------------------------------------------------
# superposition and the Mason bound
# ---------------------------------------------------------------------------

def superpose(
    a: complex,
    s1: SpinState,
    b: complex,
    s2: SpinState,
    tols: Tolerances = DEFAULT_TOLS,
) -> SuperposeResult:
    """Normalized combination a s1 + b s2 with constellation and star bound.

    The returned ``mason_bound`` is the guaranteed minimum number of
    distinct stars of the combination; the observed count is checked
    against it and a violation raises (it would indicate a numerical
    failure, the bound itself is a theorem).
    """
    if s1.two_s != s2.two_s:
        raise ValidationError("states have different spin")
    combo = a * s1.coeffs + b * s2.coeffs
    norm = np.linalg.norm(combo)
    if norm < 1e-12 * (abs(a) + abs(b)):
        raise ZeroCombination("the combination is numerically the zero vector")
    state = spin_state(combo, s1.two_s)
    con = polynomial_roots(majorana_polynomial(state), tols)
    bound = mason_bound(s1, s2, tols)
    observed = len(con.points)
    if observed < bound:
        raise MasonBoundViolation(f"{observed} distinct stars < bound {bound}")
    return SuperposeResult(state, con, bound)


def mason_bound(s1: SpinState, s2: SpinState, tols: Tolerances = DEFAULT_TOLS) -> int:
    """Lower bound N' - n1' - n2' + 1 on distinct stars of any combination.

    Common stars are canceled at min multiplicity first, reducing to a
    lower-spin problem with no shared stars, to which the polynomial abc
    inequality applies.
    """
    c1 = polynomial_roots(majorana_polynomial(s1), tols)
    c2 = polynomial_roots(majorana_polynomial(s2), tols)
    match_tol = max(tols.cluster_chordal * 10, 1e-6)
    v1 = [point_to_vector(p) for p in c1.points]
    v2 = [point_to_vector(p) for p in c2.points]
    n = s1.two_s
    n1, n2 = len(v1), len(v2)
    canceled = 0
    used = set()
    drop1 = drop2 = 0
    for i, (vi, mi) in enumerate(zip(v1, c1.mults)):
        for j, (vj, mj) in enumerate(zip(v2, c2.mults)):
            if j in used or np.linalg.norm(vi - vj) > match_tol:
                continue
            used.add(j)
            canceled += min(mi, mj)
            if mi <= mj:
                drop1 += 1
            if mj <= mi:
                drop2 += 1
            break
    return (n - canceled) - (n1 - drop1) - (n2 - drop2) + 1


def distinct_star_count(
    state: SpinState,
    tols: Tolerances = DEFAULT_TOLS,
    cluster_tol: float | None = None,
) -> int:
    """Number of distinct stars after tolerance clustering."""
    use = tols if cluster_tol is None else tols.override(cluster_chordal=cluster_tol)
    return len(polynomial_roots(majorana_polynomial(state), use).points)


# ---------------------------------------------------------------------------
# two-coherent-state trajectories
# ---------------------------------------------------------------------------

def trajectory_root(
    gamma1: complex, gamma2: complex, omega: float, t: float, k: int, n: int
) -> complex:
    """zeta_k(t) = (g1 cos t - g2 e^{i Omega} xi^k sin t)/(cos t - e^{i Omega} xi^k sin t).

    Raises PoleAtT when the denominator vanishes (the root is at infinity).
    """
    xi_k = np.exp(1j * (omega + 2 * math.pi * k / n))
    den = math.cos(t) - xi_k * math.sin(t)
    if abs(den) < 1e-14:
        raise PoleAtT(f"root {k} passes through infinity at t = {t}")
    return (gamma1 * math.cos(t) - gamma2 * xi_k * math.sin(t)) / den


def two_sc_trajectory(
    gamma1,
    gamma2,
    omega: float,
    ts,
    tols: Tolerances = DEFAULT_TOLS,
    two_s: int = 3,
) -> Trajectory:
    """Root curves of cos^N t (z-g1)^N - e^{i N Omega} sin^N t (z-g2)^N.

    Both roots must be finite and distinct (rotate the configuration first
    otherwise).  Samples where a root passes through the south pole are
    recorded as infinities rather than aborting the sweep.
    """
    g1, g2 = complex(_value(gamma1)), complex(_value(gamma2))
    if chordal_distance(StereoPoint(g1), StereoPoint(g2)) <= tols.basis_chordal:
        raise ValidationError("trajectory needs two distinct coherent roots")
    ts = np.asarray(ts, dtype=float)
    n = two_s
    k = np.arange(n)
    xi = np.exp(1j * (omega + 2 * math.pi * k / n))
    cos_t, sin_t = np.cos(ts)[:, None], np.sin(ts)[:, None]
    den = cos_t - xi[None, :] * sin_t
    num = g1 * cos_t - g2 * xi[None, :] * sin_t
    roots = np.empty_like(den)
    pole = np.abs(den) < 1e-14
    roots[~pole] = num[~pole] / den[~pole]
    roots[pole] = np.inf
    poles = tuple((int(i), int(j)) for i, j in np.argwhere(pole))
    return Trajectory(g1, g2, float(omega), ts, roots, poles)


def _value(p) -> complex:
    if isinstance(p, StereoPoint):
        if p.is_infinite:
            raise ValidationError("rotate the configuration: root at infinity")
        return p.value
    return complex(p)


# ---------------------------------------------------------------------------
# spin-1 line intersections with the coherent sphere
# ---------------------------------------------------------------------------

def spin1_line_intersections(
    zeta1, zeta2, xi1, xi2, tols: Tolerances = DEFAULT_TOLS
) -> list[LineIntersection]:
    """Coherent points on the line through spin-1 states {z1,z2} and {x1,x2}.

    Solves a1 (z-z1)(z-z2) + a2 (z-x1)(z-x2) = (z-gamma)^2.  Two solutions
    when the states share no star, one when they do; when the sums of roots
    coincide one intersection sits at the south pole and is returned with
    gamma = infinity.
    """
    z1, z2, x1, x2 = (complex(_value(v)) for v in (zeta1, zeta2, xi1, xi2))
    sz, sx = z1 + z2, x1 + x2
    pz, px = z1 * z2, x1 * x2
    scale = max(1.0, abs(z1), abs(z2), abs(x1), abs(x2))
    if abs(sz - sx) < 1e-12 * scale:
        if abs(pz - px) < 1e-12 * scale**2:
            raise ValidationError("the two states coincide")
        # finite branch gamma = s/2 plus one intersection at the south pole
        gamma = sz / 2
        a1 = (gamma**2 - px) / (pz - px)
        out = [
            LineIntersection(StereoPoint(gamma), a1, 1 - a1),
            LineIntersection(INFINITY, 1.0 + 0j, -1.0 + 0j),
        ]
        return out
    rad = np.sqrt(complex((z1 - x1) * (z1 - x2) * (z2 - x1) * (z2 - x2)))
    out = []
    seen: list[complex] = []
    for sign in (1, -1):
        gamma = (pz - px + sign * rad) / (sz - sx)
        if any(abs(gamma - g) < 1e-10 * scale for g in seen):
            continue  # shared star: the double solution counts once
        seen.append(gamma)
        a1 = (2 * gamma - sx) / (sz - sx)
        a2 = (-2 * gamma + sz) / (sz - sx)
        out.append(LineIntersection(StereoPoint(gamma), a1, a2))
    return out


# ---------------------------------------------------------------------------
# spin-3/2 two-coherent-state decomposition
# ---------------------------------------------------------------------------

def spin32_decompose(
    zeta1, zeta2, zeta3, tols: Tolerances = DEFAULT_TOLS
) -> TwoSCDecomposition:
    """Decompose the spin-3/2 state with the given stars into two SC states.

    Closed forms in the elementary symmetric polynomials; |A| below the
    degeneracy threshold routes to the branch with one root at the south
    pole.  Repeated stars have no such decomposition: the result is flagged
    degenerate and carries the tangent-line limit coefficient instead.
    """
    pts = [_as_stereo(z) for z in (zeta1, zeta2, zeta3)]

    # repeated-star detection is geometric, so do it before any rotation
    groups = _group_by_distance(pts, max(tols.cluster_chordal, 1e-9))
    if len(groups) < 3:
        return _degenerate_decomposition(pts, groups)

    if any(p.is_infinite for p in pts) or max(
        abs(p.value) for p in pts
    ) > 1e6:
        return _decompose_rotated(pts, tols)
    return _decompose_finite([p.value for p in pts], pts, tols)


def _as_stereo(z) -> StereoPoint:
    if isinstance(z, StereoPoint):
        return z
    return StereoPoint(complex(z))


def _group_by_distance(pts, tol):
    groups: list[list[int]] = []
    for i, p in enumerate(pts):
        for g in groups:
            if chordal_distance(p, pts[g[0]]) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _degenerate_decomposition(pts, groups) -> TwoSCDecomposition:
    groups = sorted(groups, key=len, reverse=True)
    doubled = pts[groups[0][0]]
    single = pts[groups[1][0]] if len(groups) > 1 else doubled
    coeff = None
    if not doubled.is_infinite and not single.is_infinite:
        coeff = doubled.value - single.value
    return TwoSCDecomposition(
        gamma1=doubled,
        gamma2=doubled,
        alpha1=None,
        alpha2=None,
        beta1=None,
        beta2=None,
        degenerate=True,
        tangent_coeff=coeff,
    )


def _decompose_finite(zs, pts, tols: Tolerances) -> TwoSCDecomposition:
    z1, z2, z3 = zs
    e1 = z1 + z2 + z3
    e2 = z1 * z2 + z2 * z3 + z3 * z1
    e3 = z1 * z2 * z3
    a_disc = 2 * (z1 * z1 + z2 * z2 + z3 * z3 - e2)
    scale = max(1.0, max(abs(z) for z in zs) ** 2)
    if abs(a_disc) < tols.a_degenerate_rel * scale:
        # one coherent root at the south pole; the finite one is e1/3
        g1 = e1 / 3
        beta1 = 1.0 + 0j
        beta2 = g1**3 - e3  # weight of the constant polynomial
        gam1, gam2 = StereoPoint(g1), INFINITY
        alphas = _state_alphas(pts, gam1, gam2)
        return TwoSCDecomposition(gam1, gam2, alphas[0], alphas[1], beta1, beta2, False, None)
    z12, z23, z31 = z1 - z2, z2 - z3, z3 - z1
    core = (
        z1 * z1 * (z2 + z3)
        + z2 * z2 * (z3 + z1)
        + z3 * z3 * (z1 + z2)
        - 6 * e3
    )
    root = 1j * math.sqrt(3) * z12 * z23 * z31
    g1 = (core + root) / a_disc
    g2 = (core - root) / a_disc
    beta1 = (-3 * g2 + e1) / (3 * (g1 - g2))
    beta2 = (3 * g1 - e1) / (3 * (g1 - g2))
    if (g2.real, g2.imag) < (g1.real, g1.imag):
        g1, g2, beta1, beta2 = g2, g1, beta2, beta1
    gam1, gam2 = StereoPoint(g1), StereoPoint(g2)
    alphas = _state_alphas(pts, gam1, gam2)
    return TwoSCDecomposition(gam1, gam2, alphas[0], alphas[1], beta1, beta2, False, None)


def _decompose_rotated(pts, tols: Tolerances) -> TwoSCDecomposition:
    rng = np.random.default_rng(0xD15C)
    for _ in range(16):
        rotvec = rng.standard_normal(3)
        rot = rotation_matrix(rotvec)
        new_pts = [
            sphere_to_stereo(Direction.from_vector(rot @ point_to_vector(p)))
            for p in pts
        ]
        if any(p.is_infinite or abs(p.value) > 1e3 for p in new_pts):
            continue
        inner = _decompose_finite([p.value for p in new_pts], new_pts, tols)
        back = rotation_matrix(-rotvec)
        gam1 = sphere_to_stereo(
            Direction.from_vector(back @ point_to_vector(inner.gamma1))
        )
        gam2 = sphere_to_stereo(
            Direction.from_vector(back @ point_to_vector(inner.gamma2))
        )
        alphas = _state_alphas(pts, gam1, gam2)
        # monic weights live in the rotated frame only
        return TwoSCDecomposition(gam1, gam2, alphas[0], alphas[1], None, None, False, None)
    raise ValidationError("could not rotate the configuration to finite roots")


def _state_alphas(pts, gam1: StereoPoint, gam2: StereoPoint):
    """State-level weights by least squares against the canonical state."""
    from .stellar import cluster_points

    target = state_from_constellation(cluster_points(list(pts), 1e-12))
    m = np.column_stack(
        [
            sc_state(stereo_to_sphere(gam1), 3).coeffs,
            sc_state(stereo_to_sphere(gam2), 3).coeffs,
        ]
    )
    sol, *_ = np.linalg.lstsq(m, target.coeffs, rcond=None)
    return complex(sol[0]), complex(sol[1])
