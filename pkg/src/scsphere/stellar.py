"""Stellar representation core: states, constellations, and conversions.

A spin-s pure state (N = 2s) is encoded, up to global phase, by the multiset
of N roots of its associated degree-N polynomial, projected onto the unit
sphere stereographically from the south pole.  This module holds the value
types and the conversions between them, plus SU(2) rotations, the
permanent-based symmetrization norm, and coherent-state overlaps.

All functions are pure; every value type is immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import AllZeroPolynomial, ValidationError

__all__ = [
    "SpinState",
    "StereoPoint",
    "INFINITY",
    "Direction",
    "Constellation",
    "MajoranaPolynomial",
    "spin_state",
    "two_s_from_spin",
    "spin_label",
    "majorana_polynomial",
    "state_from_polynomial",
    "polynomial_roots",
    "state_from_constellation",
    "stereo_to_sphere",
    "sphere_to_stereo",
    "direction",
    "antipode",
    "antipode_stereo",
    "chordal_distance",
    "cluster_points",
    "rotate_state",
    "rotate_direction",
    "rotation_matrix",
    "wigner_d_matrix",
    "spin_matrices",
    "symmetrized_norm",
    "coherent_overlap",
    "fidelity",
    "random_spin_state",
]

_HUGE = 1e100  # |zeta| beyond this is handled through the inverted chart


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpinState:
    """Normalized spin-s state in the S_z eigenbasis.

    ``two_s`` is the doubled spin N = 2s; ``coeffs`` has length N + 1 with
    index 0 holding the m = s amplitude and index N the m = -s amplitude.
    """

    two_s: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.two_s < 1:
            raise ValidationError(f"need 2s >= 1, got {self.two_s}")
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.two_s + 1,):
            raise ValidationError(
                f"coefficient vector has shape {c.shape}, expected ({self.two_s + 1},)"
            )
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > DEFAULT_TOLS.norm_atol:
            raise ValidationError(f"state norm {norm} deviates from 1")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def spin(self) -> float:
        return self.two_s / 2

    @property
    def dim(self) -> int:
        return self.two_s + 1


@dataclass(frozen=True)
class StereoPoint:
    """Point of the extended complex plane; ``value is None`` encodes infinity."""

    value: complex | None = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __repr__(self) -> str:  # compact, test-friendly
        return "StereoPoint(inf)" if self.is_infinite else f"StereoPoint({self.value!r})"


INFINITY = StereoPoint(None)


@dataclass(frozen=True)
class Direction:
    """Direction on the unit sphere, theta in [0, pi], phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (-1e-12 <= self.theta <= math.pi + 1e-12):
            raise ValidationError(f"theta {self.theta} outside [0, pi]")

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    @staticmethod
    def from_vector(v: np.ndarray) -> "Direction":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("zero vector has no direction")
        v = v / n
        theta = math.acos(min(1.0, max(-1.0, v[2])))
        phi = math.atan2(v[1], v[0]) % (2 * math.pi)
        return direction(theta, phi)


def direction(theta: float, phi: float = 0.0) -> Direction:
    """Canonicalized Direction: phi reduced mod 2*pi and zeroed at the poles."""
    theta = float(min(math.pi, max(0.0, theta)))
    phi = float(phi) % (2 * math.pi)
    if theta == 0.0 or theta == math.pi:
        phi = 0.0
    return Direction(theta, phi)


@dataclass(frozen=True)
class Constellation:
    """Multiset of stars: cluster representatives with multiplicities."""

    points: tuple[StereoPoint, ...]
    mults: tuple[int, ...]
    cluster_tol: float = DEFAULT_TOLS.cluster_chordal

    def __post_init__(self) -> None:
        if len(self.points) != len(self.mults):
            raise ValidationError("points and mults length mismatch")
        if any(m < 1 for m in self.mults):
            raise ValidationError("multiplicities must be positive")

    @property
    def total(self) -> int:
        return sum(self.mults)

    @property
    def directions(self) -> tuple[Direction, ...]:
        return tuple(stereo_to_sphere(p) for p in self.points)

    def expanded(self) -> list[StereoPoint]:
        """Stars repeated according to multiplicity."""
        out: list[StereoPoint] = []
        for p, m in zip(self.points, self.mults):
            out.extend([p] * m)
        return out


@dataclass(frozen=True)
class MajoranaPolynomial:
    """Polynomial coefficients in ascending powers zeta^0 .. zeta^N."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex).copy()
        if c.ndim != 1 or c.size < 2:
            raise ValidationError("polynomial needs at least two coefficients")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def nominal_degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, zeta: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(zeta, self.coeffs))


# ---------------------------------------------------------------------------
# constructors and small helpers
# ---------------------------------------------------------------------------

def two_s_from_spin(spin: float | int | str) -> int:
    """Parse a spin label (2, 1.5, "3/2") into the doubled integer N = 2s."""
    if isinstance(spin, str):
        s = spin.strip()
        if "/" in s:
            num, den = s.split("/")
            if int(den) != 2:
                raise ValidationError(f"spin denominators must be 2, got {spin!r}")
            two_s = int(num)
        else:
            two_s = 2 * int(s)
    else:
        two_s = int(round(2 * float(spin)))
        if abs(2 * float(spin) - two_s) > 1e-9:
            raise ValidationError(f"spin {spin} is not a half-integer")
    if two_s < 1:
        raise ValidationError(f"need spin >= 1/2, got {spin}")
    return two_s


def spin_label(two_s: int) -> str | int:
    """JSON-friendly spin: integer for integer spin, "N/2" string otherwise."""
    return two_s // 2 if two_s % 2 == 0 else f"{two_s}/2"


def spin_state(coeffs, two_s: int | None = None) -> SpinState:
    """Build a SpinState, normalizing the coefficient vector."""
    c = np.asarray(coeffs, dtype=complex)
    n = np.linalg.norm(c)
    if n == 0:
        raise ValidationError("zero vector is not a state")
    if two_s is None:
        two_s = len(c) - 1
    return SpinState(two_s, c / n)


def canonical_phase(coeffs: np.ndarray, floor_rel: float = DEFAULT_TOLS.phase_floor) -> np.ndarray:
    """Rephase so the first non-negligible coefficient (from m = s) is real positive."""
    c = np.asarray(coeffs, dtype=complex)
    floor = floor_rel * np.abs(c).max()
    for x in c:
        if abs(x) > floor:
            return c * (abs(x) / x)
    return c


def fidelity(a: SpinState, b: SpinState) -> float:
    """|<a|b>| between two states of the same spin."""
    if a.two_s != b.two_s:
        raise ValidationError("states have different spin")
    return abs(np.vdot(a.coeffs, b.coeffs))


def random_spin_state(rng: np.random.Generator, two_s: int) -> SpinState:
    """Haar-like random pure state of spin two_s/2."""
    c = rng.standard_normal(two_s + 1) + 1j * rng.standard_normal(two_s + 1)
    return spin_state(c, two_s)


@lru_cache(maxsize=None)
def _binom_sqrt(two_s: int) -> np.ndarray:
    return np.array([math.sqrt(math.comb(two_s, k)) for k in range(two_s + 1)])


# ---------------------------------------------------------------------------
# stereographic projection (from the south pole): zeta = tan(theta/2) e^{i phi}
# ---------------------------------------------------------------------------

def stereo_to_sphere(p: StereoPoint | complex) -> Direction:
    """Direction of a stereographic point; infinity maps to the south pole."""
    p = _as_point(p)
    if p.is_infinite:
        return direction(math.pi, 0.0)
    z = p.value
    return direction(2 * math.atan(abs(z)), math.atan2(z.imag, z.real))


def sphere_to_stereo(n: Direction) -> StereoPoint:
    """Stereographic image tan(theta/2) e^{i phi}; the south pole maps to infinity."""
    if n.theta >= math.pi * (1 - 1e-12):
        return INFINITY
    r = math.tan(n.theta / 2)
    return StereoPoint(r * complex(math.cos(n.phi), math.sin(n.phi)))


def _as_point(p: StereoPoint | complex) -> StereoPoint:
    if isinstance(p, StereoPoint):
        return p
    z = complex(p)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return INFINITY
    return StereoPoint(z)


def point_to_vector(p: StereoPoint | complex) -> np.ndarray:
    """Unit 3-vector of a stereographic point (overflow-safe for huge |zeta|)."""
    p = _as_point(p)
    if p.is_infinite:
        return np.array([0.0, 0.0, -1.0])
    z = p.value
    if abs(z) > _HUGE:
        w = 1 / z.conjugate()  # same azimuth, mirrored polar angle
        d = 1 + abs(w) ** 2
        return np.array([2 * w.real / d, 2 * w.imag / d, -(1 - abs(w) ** 2) / d])
    d = 1 + abs(z) ** 2
    return np.array([2 * z.real / d, 2 * z.imag / d, (1 - abs(z) ** 2) / d])


def antipode(n: Direction) -> Direction:
    return direction(math.pi - n.theta, n.phi + math.pi)


def antipode_stereo(p: StereoPoint | complex) -> StereoPoint:
    """Antipodal map zeta -> -1/conj(zeta); 0 <-> infinity."""
    p = _as_point(p)
    if p.is_infinite:
        return StereoPoint(0j)
    if p.value == 0:
        return INFINITY
    return StereoPoint(-1 / p.value.conjugate())


def chordal_distance(p: StereoPoint | complex, q: StereoPoint | complex) -> float:
    """Euclidean distance between the sphere images of two stereographic points."""
    return float(np.linalg.norm(point_to_vector(p) - point_to_vector(q)))


# ---------------------------------------------------------------------------
# Majorana polynomial and roots
# ---------------------------------------------------------------------------

def majorana_polynomial(state: SpinState) -> MajoranaPolynomial:
    """Binomial-weighted polynomial whose roots are the state's stars.

    The coefficient of zeta^(s+m) is (-1)^(s-m) sqrt(C(2s, s-m)) c_m.
    """
    n = state.two_s
    k = np.arange(n + 1)
    a = np.empty(n + 1, dtype=complex)
    a[n - k] = ((-1.0) ** k) * _binom_sqrt(n)[k] * state.coeffs[k]
    return MajoranaPolynomial(a)


def state_from_polynomial(a: np.ndarray, two_s: int | None = None) -> SpinState:
    """Invert the coefficient map, normalize, and fix the canonical phase."""
    a = np.asarray(a, dtype=complex)
    n = len(a) - 1 if two_s is None else two_s
    if len(a) != n + 1:
        raise ValidationError("coefficient count does not match spin")
    k = np.arange(n + 1)
    c = ((-1.0) ** k) * a[n - k] / _binom_sqrt(n)[k]
    return spin_state(canonical_phase(c), n)


def polynomial_roots(
    p: MajoranaPolynomial, tols: Tolerances = DEFAULT_TOLS
) -> Constellation:
    """All N roots counting multiplicity, clustered into a constellation.

    Vanishing leading coefficients (relative to the largest one) contribute
    roots at infinity; finite roots come from balanced companion-matrix
    eigenvalues, then a few guarded Newton steps.  A k-fold root scatters by
    roughly eps^(1/k) under any backward-stable solver, so clusters merge
    under a multiplicity-aware radius and the representative of a multiple
    root is re-polished as a simple root of the (k-1)-th derivative.
    """
    a = p.coeffs
    n = p.nominal_degree
    amax = np.abs(a).max()
    if amax < tols.poly_abs_floor:
        raise AllZeroPolynomial("all coefficients below the absolute floor")
    a = a / amax

    deg = n
    while deg > 0 and abs(a[deg]) <= tols.inf_root_rel:
        deg -= 1
    n_inf = n - deg

    finite = np.array([], dtype=complex)
    if deg > 0:
        finite = np.roots(a[deg::-1])
        finite = _newton_polish(a[: deg + 1], finite)

    pts = [_as_point(z) for z in finite] + [INFINITY] * n_inf
    return _cluster_roots(pts, a[: deg + 1], tols)


def _merge_tol(k: int, base: float) -> float:
    # scatter radius of a k-fold root under double-precision root finding
    return max(base, 1e-14 ** (1.0 / k))


def _cluster_roots(
    points: list[StereoPoint], a_asc: np.ndarray, tols: Tolerances
) -> Constellation:
    """Group computed roots into stars with multiplicities.

    Finite roots first merge by single linkage at the base radius, then
    candidate multiple roots merge under the eps^(1/k) scatter radius -- but
    a merge of total size k is accepted only if the polynomial residual at
    the derivative-polished center is consistent with a genuine k-fold root.
    This keeps distinct-but-close simple roots apart while regrouping the
    scatter ring of a true multiple root.
    """
    fin_idx = [i for i, q in enumerate(points) if not q.is_infinite]
    n_inf = len(points) - len(fin_idx)
    zs = np.array([points[i].value for i in fin_idx], dtype=complex)

    clusters = _single_linkage(zs, tols.cluster_chordal)
    deg = len(a_asc) - 1

    def centroid(idx: list[int]) -> complex:
        return complex(zs[idx].mean())

    def consistent_center(idx: list[int]) -> complex | None:
        k = len(idx)
        c0 = centroid(idx)
        c = _derivative_polish(a_asc, c0, k)
        if abs(c - c0) > 2 * _merge_tol(k, tols.cluster_chordal) * (1 + abs(c0) ** 2):
            return None
        scale = (1 + abs(c)) ** deg
        if abs(np.polynomial.polynomial.polyval(c, a_asc)) > 1e-10 * scale:
            return None
        return c

    # A k-fold root shatters into a ring of radius ~eps^(1/k), so candidate
    # groups are gathered at the radius matching their own total size and
    # accepted only when the residual test confirms a genuine multiple root.
    changed = True
    while changed and len(clusters) > 1:
        changed = False
        reps = [centroid(c) for c in clusters]
        sizes = [len(c) for c in clusters]
        total = sum(sizes)
        for i in range(len(clusters)):
            # beyond multiplicity 8 the scatter radius rivals genuine star
            # separations and the residual test loses its discriminating power
            for k_hyp in range(min(total, 8), sizes[i], -1):
                # the reference point sits on the scatter ring: use its diameter
                radius = 2 * _merge_tol(k_hyp, tols.cluster_chordal)
                group = [
                    j
                    for j in range(len(clusters))
                    if chordal_distance(StereoPoint(reps[i]), StereoPoint(reps[j]))
                    <= radius
                ]
                if len(group) < 2 or sum(sizes[j] for j in group) != k_hyp:
                    continue
                union = [idx for j in group for idx in clusters[j]]
                if consistent_center(union) is None:
                    continue
                clusters = [c for j, c in enumerate(clusters) if j not in group]
                clusters.append(union)
                changed = True
                break
            if changed:
                break

    out: list[tuple[Direction, StereoPoint, int]] = []
    for idx in clusters:
        k = len(idx)
        center = centroid(idx)
        if k > 1:
            polished = consistent_center(idx)
            if polished is not None:
                center = polished
        pt = _as_point(center)
        d = stereo_to_sphere(pt)
        # roots drifting off the double-precision sphere join the infinity stars
        if n_inf and 2 / (1 + abs(center)) <= _merge_tol(k + n_inf, tols.cluster_chordal):
            n_inf += k
            continue
        out.append((d, pt, k))

    if n_inf:
        out.append((direction(math.pi, 0.0), INFINITY, n_inf))

    out.sort(key=lambda r: (round(r[0].theta * 1e9), round(r[0].phi * 1e9)))
    return Constellation(
        points=tuple(r[1] for r in out),
        mults=tuple(r[2] for r in out),
        cluster_tol=tols.cluster_chordal,
    )


def _single_linkage(zs: np.ndarray, tol: float) -> list[list[int]]:
    m = len(zs)
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if chordal_distance(StereoPoint(complex(zs[i])), StereoPoint(complex(zs[j]))) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _derivative_polish(a_asc: np.ndarray, z0: complex, k: int) -> complex:
    """Refine a k-fold root as a simple root of the (k-1)-th derivative."""
    d = a_asc
    for _ in range(k - 1):
        d = np.polynomial.polynomial.polyder(d)
    z = _newton_polish(d, np.array([z0], dtype=complex), steps=20)
    return complex(z[0])


def _newton_polish(a_asc: np.ndarray, roots: np.ndarray, steps: int = 6) -> np.ndarray:
    """Guarded Newton refinement; keeps a step only if |p| decreases."""
    da = np.polynomial.polynomial.polyder(a_asc)
    z = roots.astype(complex)
    pv = np.polynomial.polynomial.polyval(z, a_asc)
    for _ in range(steps):
        dv = np.polynomial.polynomial.polyval(z, da)
        ok = np.abs(dv) > 0
        step = np.zeros_like(z)
        step[ok] = pv[ok] / dv[ok]
        cand = z - step
        pc = np.polynomial.polynomial.polyval(cand, a_asc)
        better = np.abs(pc) < np.abs(pv)
        z[better] = cand[better]
        pv[better] = pc[better]
        if not better.any():
            break
    return z


def cluster_points(
    points: list[StereoPoint], tol: float = DEFAULT_TOLS.cluster_chordal
) -> Constellation:
    """Single-linkage clustering in the chordal metric; canonical ordering."""
    m = len(points)
    if m == 0:
        raise ValidationError("empty constellation")
    vecs = np.array([point_to_vector(p) for p in points])
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if np.linalg.norm(vecs[i] - vecs[j]) <= tol:
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)

    reps: list[tuple[Direction, StereoPoint, int]] = []
    for idx in groups.values():
        v = vecs[idx].mean(axis=0)
        nv = np.linalg.norm(v)
        if nv < 1e-12:  # pathological: antipodal pair inside one cluster
            v = vecs[idx[0]]
            nv = np.linalg.norm(v)
        d = Direction.from_vector(v / nv)
        reps.append((d, sphere_to_stereo(d), len(idx)))

    reps.sort(key=lambda r: (round(r[0].theta * 1e9), round(r[0].phi * 1e9)))
    return Constellation(
        points=tuple(r[1] for r in reps),
        mults=tuple(r[2] for r in reps),
        cluster_tol=tol,
    )


def constellation_from_directions(
    dirs, mults=None, tol: float = DEFAULT_TOLS.cluster_chordal
) -> Constellation:
    """Constellation from Direction values (no clustering beyond dedup)."""
    pts: list[StereoPoint] = []
    for i, d in enumerate(dirs):
        m = 1 if mults is None else mults[i]
        pts.extend([sphere_to_stereo(d)] * m)
    return cluster_points(pts, tol)


def state_from_constellation(
    c: Constellation, tols: Tolerances = DEFAULT_TOLS
) -> SpinState:
    """Normalized state whose stars reproduce the constellation.

    Global phase: first nonzero coefficient, scanning from m = s, is made
    real positive.
    """
    n = c.total
    if n < 1:
        raise ValidationError("constellation must carry at least one star")
    finite = [p.value for p in c.expanded() if not p.is_infinite]
    a = np.zeros(n + 1, dtype=complex)
    mono = np.polynomial.polynomial.polyfromroots(finite) if finite else np.array([1.0 + 0j])
    a[: len(mono)] = mono
    return state_from_polynomial(a, n)


# ---------------------------------------------------------------------------
# SU(2) rotations
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def spin_matrices(two_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(S_x, S_y, S_z) in the |s, m> basis ordered m = s .. -s."""
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    sz = np.diag(m.astype(complex))
    # S+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>; raising moves toward index 0
    up = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    sp = np.zeros((two_s + 1, two_s + 1), dtype=complex)
    sp[np.arange(two_s), np.arange(1, two_s + 1)] = up
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    for mat in (sx, sy, sz):
        mat.flags.writeable = False
    return sx, sy, sz


def wigner_d_matrix(two_s: int, rotvec: np.ndarray) -> np.ndarray:
    """Spin-s irreducible representation of the rotation exp(-i rotvec . S)."""
    rotvec = np.asarray(rotvec, dtype=float)
    sx, sy, sz = spin_matrices(two_s)
    h = rotvec[0] * sx + rotvec[1] * sy + rotvec[2] * sz
    w, u = np.linalg.eigh(h)
    return (u * np.exp(-1j * w)) @ u.conj().T


def rotation_matrix(rotvec: np.ndarray) -> np.ndarray:
    """SO(3) matrix of the axis-angle vector (Rodrigues formula)."""
    rotvec = np.asarray(rotvec, dtype=float)
    angle = np.linalg.norm(rotvec)
    if angle == 0:
        return np.eye(3)
    k = rotvec / angle
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)


def rotate_direction(n: Direction, rotvec: np.ndarray) -> Direction:
    return Direction.from_vector(rotation_matrix(rotvec) @ n.unit_vector)


def rotate_state(state: SpinState, rotvec: np.ndarray) -> SpinState:
    """Apply the spin-s representation of the rotation with axis-angle rotvec.

    The constellation of the result is the rotated constellation of the input.
    """
    d = wigner_d_matrix(state.two_s, rotvec)
    return SpinState(state.two_s, d @ state.coeffs)


def _frame_rotvec(n: Direction) -> np.ndarray:
    """Axis-angle vector rotating +z onto n (rotation about z cross n)."""
    return n.theta * np.array([-math.sin(n.phi), math.cos(n.phi), 0.0])


def rotated_frame_coeffs(state: SpinState, n: Direction) -> np.ndarray:
    """Coefficients of the state in the n.S eigenbasis |n, m>, m = s .. -s.

    The frame is D(R_n)|z, m> with R_n the rotation of +z onto n about the
    axis z x n; phases of the m < s components depend on this convention.
    """
    d = wigner_d_matrix(state.two_s, _frame_rotvec(n))
    return d.conj().T @ state.coeffs


# ---------------------------------------------------------------------------
# symmetrization norm (permanent of the spin-1/2 Gram matrix)
# ---------------------------------------------------------------------------

def _spinor(n: Direction) -> np.ndarray:
    return np.array(
        [math.cos(n.theta / 2), math.sin(n.theta / 2) * np.exp(1j * n.phi)],
        dtype=complex,
    )


def _permanent(g: np.ndarray) -> complex:
    n = g.shape[0]
    if n <= 8:
        return sum(
            np.prod(g[np.arange(n), list(sigma)]) for sigma in permutations(range(n))
        )
    return _permanent_ryser(g)


def _permanent_ryser(g: np.ndarray) -> complex:
    # Ryser with Gray-code subset updates: O(2^n n)
    n = g.shape[0]
    row = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    sign = 1 if n % 2 == 0 else -1
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        j = (gray ^ new_gray).bit_length() - 1
        if new_gray & (1 << j):
            row = row + g[:, j]
        else:
            row = row - g[:, j]
        gray = new_gray
        bits = bin(new_gray).count("1")
        total += ((-1) ** bits) * np.prod(row)
    return sign * total


def symmetrized_norm(c: Constellation, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Normalization factor A of the symmetrized product state.

    A^2 = N! / perm(G) with G the Gram matrix of the constituent spin-1/2
    states.  Direct permutation sum for N <= 8, Ryser's formula above.
    """
    n = c.total
    if n > 20:
        raise ValidationError("permanent cost limits the symmetrization norm to N <= 20")
    spinors = [_spinor(stereo_to_sphere(p)) for p in c.expanded()]
    g = np.array([[np.vdot(a, b) for b in spinors] for a in spinors])
    perm = _permanent(g).real
    if perm <= 0:
        raise ValidationError("non-positive Gram permanent")
    return math.sqrt(math.factorial(n) / perm)


# ---------------------------------------------------------------------------
# coherent-state overlap
# ---------------------------------------------------------------------------

def coherent_overlap(state: SpinState, n: Direction) -> complex:
    """<n|psi> via the homogenized transition-amplitude identity.

    Equals sum_j a_j (-1)^(N-j) sin(theta/2)^(N-j) cos(theta/2)^j
    e^{-i(N-j)phi}, the pole-safe rearrangement of evaluating the stellar
    polynomial at the stereographic image of the antipode of n.
    """
    a = majorana_polynomial(state).coeffs
    nn = state.two_s
    j = np.arange(nn + 1)
    half = n.theta / 2
    terms = (
        a
        * ((-1.0) ** (nn - j))
        * (math.sin(half) ** (nn - j))
        * (math.cos(half) ** j)
        * np.exp(-1j * (nn - j) * n.phi)
    )
    return complex(terms.sum())
