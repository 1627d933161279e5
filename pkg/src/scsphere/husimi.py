"""Husimi function on the coherent sphere: values, critical points, closest SC state.

The Husimi function of a state is H(n) = |<n|psi>|^2.  Its zeros are the
star antipodes; every other critical point satisfies <n, s-1|psi> = 0 and is
classified by the moduli of the state's components in the n.S eigenbasis:
a local maximum when sqrt(s) rho_s > sqrt(2s-1) rho_{s-2}, a saddle when the
inequality is reversed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    ConvergenceWarning,
    DegenerateStar,
    NotCritical,
    ValidationError,
)
from .stellar import (
    Direction,
    SpinState,
    antipode,
    coherent_overlap,
    direction,
    majorana_polynomial,
    polynomial_roots,
    rotate_state,
    rotation_matrix,
    spin_matrices,
    wigner_d_matrix,
)

__all__ = [
    "CriticalPoint",
    "RotatedExpansion",
    "husimi",
    "husimi_grid",
    "rotated_expansion",
    "classify_critical",
    "critical_points",
    "closest_sc",
    "cone_coefficient",
]

GLOBAL_MIN = "GlobalMin"
LOCAL_MAX = "LocalMax"
SADDLE = "Saddle"

_KIND_ORDER = {LOCAL_MAX: 0, SADDLE: 1, GLOBAL_MIN: 2}


@dataclass(frozen=True)
class RotatedExpansion:
    """Moduli and phases of the state in the n.S eigenbasis, m = s .. -s."""

    rho: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class CriticalPoint:
    direction: Direction
    kind: str
    value: float
    saddle_phi: float | None
    rho: tuple[float, float, float]      # (rho_s, rho_{s-1}, rho_{s-2})
    phases: tuple[float, float]          # (alpha_s, alpha_{s-2})
    marginal: bool
    residual: float


def husimi(state: SpinState, n: Direction) -> float:
    """H(n) = |<n|psi>|^2, clipped into [0, 1]."""
    h = abs(coherent_overlap(state, n)) ** 2
    return float(min(1.0, h))


def husimi_grid(state: SpinState, resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Equiangular (theta, phi) grid with H values; rows ordered by theta, phi."""
    thetas = np.linspace(0.0, math.pi, resolution)
    phis = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    h = np.empty((resolution, resolution))
    for i, th in enumerate(thetas):
        for j, ph in enumerate(phis):
            h[i, j] = husimi(state, direction(th, ph))
    return thetas, phis, h


def rotated_expansion(state: SpinState, n0: Direction) -> RotatedExpansion:
    """Expand the state in the n0.S eigenbasis (frame: rotate +z onto n0)."""
    w = _frame_coeffs(state, n0.theta, n0.phi)
    return RotatedExpansion(rho=np.abs(w), alpha=np.angle(w))


def classify_critical(
    state: SpinState, n0: Direction, tols: Tolerances = DEFAULT_TOLS
) -> CriticalPoint:
    """Classify a critical direction of the Husimi function.

    Raises NotCritical when neither rho_s nor rho_{s-1} is below tolerance.
    The ``marginal`` flag marks a degenerate Hessian, where the second-order
    test cannot separate maximum from saddle.
    """
    two_s = state.two_s
    s = two_s / 2
    w = _frame_coeffs(state, n0.theta, n0.phi)
    rho_s = abs(w[0])
    rho_s1 = abs(w[1]) if two_s >= 1 else 0.0
    rho_s2 = abs(w[2]) if two_s >= 2 else 0.0
    alpha_s = float(np.angle(w[0]))
    alpha_s2 = float(np.angle(w[2])) if two_s >= 2 else 0.0
    rho = (float(rho_s), float(rho_s1), float(rho_s2))
    phases = (alpha_s, alpha_s2)
    value = float(min(1.0, rho_s**2))

    if rho_s < tols.crit_residual:
        return CriticalPoint(n0, GLOBAL_MIN, value, None, rho, phases, False, float(rho_s))
    if rho_s1 > tols.crit_residual:
        raise NotCritical(f"|<n,s-1|psi>| = {rho_s1:.3e} exceeds tolerance")

    delta = math.sqrt(s) * rho_s - math.sqrt(2 * s - 1) * rho_s2
    marginal = abs(delta) < tols.marginal
    if delta >= 0:
        return CriticalPoint(n0, LOCAL_MAX, value, None, rho, phases, marginal, float(rho_s1))
    saddle_phi = ((alpha_s2 - alpha_s) / 2) % math.pi
    return CriticalPoint(n0, SADDLE, value, saddle_phi, rho, phases, marginal, float(rho_s1))


def critical_points(
    state: SpinState,
    tols: Tolerances = DEFAULT_TOLS,
    seed_offset: float = 0.5,
) -> list[CriticalPoint]:
    """All critical points found by multistart Newton refinement.

    The N global minima at the star antipodes are inserted analytically from
    the constellation; maxima and saddles come from damped Newton on the
    criticality condition, seeded on a Fibonacci sphere lattice and
    de-duplicated.  Emits ConvergenceWarning when seeds fail.
    """
    two_s = state.two_s
    con = polynomial_roots(majorana_polynomial(state), tols)
    results: list[CriticalPoint] = []
    min_vecs = []
    for d in con.directions:
        nd = antipode(d)
        results.append(classify_critical(state, nd, tols))
        min_vecs.append(nd.unit_vector)

    n_seeds = max(50, 40 * two_s)
    seeds = _fibonacci_lattice(n_seeds, seed_offset)
    found_vecs: list[np.ndarray] = []
    failures = 0
    for v0 in seeds:
        v = _newton_refine(state, v0, tols)
        if v is None:
            failures += 1
            continue
        if any(_angle_between(v, u) < tols.dedup_radius for u in found_vecs):
            continue
        if any(_angle_between(v, u) < tols.dedup_radius for u in min_vecs):
            continue
        n0 = Direction.from_vector(v)
        try:
            cp = classify_critical(state, n0, tols)
        except NotCritical:
            failures += 1
            continue
        if cp.kind == GLOBAL_MIN:
            # a degenerate-star antipode: the criticality function has a
            # high-order zero there and the minimum is already inserted
            continue
        found_vecs.append(v)
        results.append(cp)

    if failures:
        warnings.warn(
            f"{failures} of {n_seeds} multistart seeds did not converge",
            ConvergenceWarning,
            stacklevel=2,
        )
    results.sort(key=lambda c: (_KIND_ORDER[c.kind], c.direction.theta, c.direction.phi))
    return results


def closest_sc(
    state: SpinState, tols: Tolerances = DEFAULT_TOLS
) -> tuple[Direction, float, list[Direction]]:
    """Closest SC direction, its Fubini-Study distance, and any ties.

    The distance r_c = arccos(sqrt(H_max)) is the geometric measure of
    entanglement.  Ties within the Husimi tolerance are returned sorted by
    (theta, phi); the first one is the reported direction.
    """
    maxima = [c for c in critical_points(state, tols) if c.kind == LOCAL_MAX]
    if not maxima:
        raise ValidationError("no local maximum found; increase seed density")
    h_max = max(c.value for c in maxima)
    ties = [c.direction for c in maxima if h_max - c.value <= tols.tie_h]
    ties.sort(key=lambda d: (d.theta, d.phi))
    r_c = math.acos(min(1.0, math.sqrt(max(0.0, h_max))))
    return ties[0], r_c, ties


def cone_coefficient(
    state: SpinState, star: Direction, tols: Tolerances = DEFAULT_TOLS
) -> float:
    """Quadratic growth rate of H around the antipode of a simple star.

    In the frame where the antipode of the star is the north pole, H grows as
    (s/2) |<z, s-1|psi>|^2 theta^2, independent of azimuth: the level curves
    are circular cones.
    """
    con = polynomial_roots(majorana_polynomial(state), tols)
    sv = star.unit_vector
    dists = [np.linalg.norm(sv - d.unit_vector) for d in con.directions]
    k = int(np.argmin(dists))
    if dists[k] > max(10 * tols.cluster_chordal, 1e-6):
        raise ValidationError("given direction is not a star of the state")
    if con.mults[k] > 1:
        raise DegenerateStar(f"star has multiplicity {con.mults[k]}")
    w = _frame_coeffs(state, math.pi - star.theta, star.phi + math.pi)
    s = state.two_s / 2
    return float(s / 2 * abs(w[1]) ** 2)


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _sy_eig(two_s: int) -> tuple[np.ndarray, np.ndarray]:
    _, sy, _ = spin_matrices(two_s)
    w, u = np.linalg.eigh(sy)
    return w, u


def _frame_coeffs(state: SpinState, theta: float, phi: float) -> np.ndarray:
    """Components of the state on D(R)|z, m> with D = e^{-i phi Sz} e^{-i theta Sy}.

    The moduli agree with stellar.rotated_frame_coeffs; the phases differ by
    an azimuthal twist because that frame rotates about z cross n instead.
    All saddle azimuths reported by this module live in the z-y-z frame.
    """
    two_s = state.two_s
    m = two_s / 2 - np.arange(two_s + 1)
    c1 = np.exp(1j * phi * m) * state.coeffs          # e^{i phi Sz} psi
    lam, u = _sy_eig(two_s)
    return u @ (np.exp(1j * theta * lam) * (u.conj().T @ c1))


def _fibonacci_lattice(n: int, offset: float) -> np.ndarray:
    i = np.arange(n)
    z = 1 - 2 * (i + offset) / n
    r = np.sqrt(np.clip(1 - z * z, 0, 1))
    golden = math.pi * (3 - math.sqrt(5))
    phi = golden * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _angle_between(u: np.ndarray, v: np.ndarray) -> float:
    return math.acos(min(1.0, max(-1.0, float(np.dot(u, v)))))


def _newton_refine(
    state: SpinState,
    v0: np.ndarray,
    tols: Tolerances,
    max_iter: int = 60,
    gtol: float = 1e-13,
) -> np.ndarray | None:
    """Damped Newton on <n, s-1|psi> = 0; returns the unit vector or None.

    Works on a rotated copy of the problem whenever the iterate drifts into a
    polar cap, keeping the (theta, phi) chart well-conditioned.
    """
    two_s = state.two_s
    _, sy, sz = spin_matrices(two_s)
    lam, u = _sy_eig(two_s)
    mdiag = two_s / 2 - np.arange(two_s + 1)

    psi = state.coeffs.copy()
    acc = np.eye(3)            # accumulated frame rotation: v_work = acc @ v_orig
    v = np.asarray(v0, float)

    def recenter() -> None:
        nonlocal psi, acc, v
        axis = np.cross(v, np.array([1.0, 0.0, 0.0]))
        na = np.linalg.norm(axis)
        if na < 1e-12:
            rotvec = np.array([0.0, 0.0, 0.0]) if v[0] > 0 else np.array([0.0, 0.0, math.pi])
        else:
            ang = _angle_between(v, np.array([1.0, 0.0, 0.0]))
            rotvec = axis / na * ang
        psi = wigner_d_matrix(two_s, rotvec) @ psi
        q = rotation_matrix(rotvec)
        acc = q @ acc
        v = q @ v

    def eval_g(theta: float, phi: float):
        c1 = np.exp(1j * phi * mdiag) * psi
        e_th = u @ (np.exp(1j * theta * lam)[:, None] * u.conj().T)
        w = e_th @ c1
        g = w[1]
        dth = (1j * (sy @ w))[1]
        dph = (e_th @ (1j * mdiag * c1))[1]
        return g, dth, dph

    recenter()
    theta, phi = math.pi / 2, 0.0
    g, dth, dph = eval_g(theta, phi)
    for _ in range(max_iter):
        if abs(g) < gtol:
            return acc.T @ v
        jac = np.array([[dth.real, dph.real], [dth.imag, dph.imag]])
        rhs = -np.array([g.real, g.imag])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        # damping: halve until |g| decreases
        scale = 1.0
        for _ in range(8):
            th_new = theta + scale * step[0]
            ph_new = phi + scale * step[1]
            g_new, dth_new, dph_new = eval_g(th_new, ph_new)
            if abs(g_new) < abs(g):
                theta, phi = th_new, ph_new
                g, dth, dph = g_new, dth_new, dph_new
                break
            scale /= 2
        else:
            return None
        st, ct = math.sin(theta), math.cos(theta)
        v = np.array([st * math.cos(phi), st * math.sin(phi), ct])
        if theta < tols.pole_margin or theta > math.pi - tols.pole_margin:
            recenter()
            theta, phi = math.pi / 2, 0.0
            g, dth, dph = eval_g(theta, phi)
    if abs(g) < gtol:
        return acc.T @ v
    return None
