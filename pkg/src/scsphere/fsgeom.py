"""Fubini-Study geometry: distances, geodesics, log maps, tangent frames, clouds.

Projective points are represented by normalized state vectors with
density-matrix semantics; tangent vectors at a point are Hermitian matrices
with the inner product <u, v> = Tr(u v)/2.  The log map sends a target state
to the initial velocity (scaled by arclength) of the connecting geodesic;
mapping the whole coherent sphere produces the point clouds used for the
tangent-space portraits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    AntipodalTarget,
    CutLocus,
    DegenerateTriangle,
    UndefinedPhase,
    ValidationError,
)
from .scbasis import sc_state
from .stellar import (
    Direction,
    SpinState,
    canonical_phase,
    direction,
    spin_state,
)

__all__ = [
    "TangentFrame",
    "LogCloud",
    "DirectionCloud",
    "overlap",
    "fs_distance",
    "geodesic",
    "log_map",
    "fs_norm",
    "tangent_frame",
    "frame_components",
    "sc_log_cloud",
    "direction_cloud",
    "tangent_angle",
    "bargmann_phase",
    "equatorial_pair_state",
    "equatorial_pair_frame",
]

CUT_FLAG = "cutlocus"
OK_FLAG = "ok"


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal Hermitian basis of the tangent space at a base point.

    ``mats`` has shape (4s, dim, dim); (1/2) Tr(h_i h_j) = delta_ij.  The
    elements pair up as (A_k, B_k) built from an orthonormal completion
    {e_k} of the base vector, so components combine into the complex numbers
    v^{2k-1} + i v^{2k} = <psi| v |e_k>.
    """

    base: SpinState
    mats: np.ndarray


@dataclass(frozen=True)
class LogCloud:
    """Log-map image of the coherent sphere, sampled on a (theta, phi) grid.

    Columnar records: components[i] are the frame components of the log of
    the SC state along (thetas[i], phis[i]); omega[i] its geodesic distance;
    flags[i] is "cutlocus" where the distance reaches pi/2 and the log map
    blows up (components are NaN there).
    """

    base: SpinState
    frame: TangentFrame
    thetas: np.ndarray
    phis: np.ndarray
    components: np.ndarray
    omegas: np.ndarray
    flags: np.ndarray


@dataclass(frozen=True)
class DirectionCloud:
    """Unit tangent directions toward the coherent sphere plus cut-locus circles.

    ``components`` are unit vectors in the frame (rows, length 4s);
    ``projected`` their stereographic images (from the negative pole of the
    last axis) restricted to the first three axes.  Each cut-locus circle is
    a closed curve of unit tangent vectors toward one star antipode.
    """

    base: SpinState
    frame: TangentFrame
    thetas: np.ndarray
    phis: np.ndarray
    components: np.ndarray
    projected: np.ndarray
    flags: np.ndarray
    circle_components: tuple[np.ndarray, ...]
    circle_projected: tuple[np.ndarray, ...]


def overlap(a: SpinState, b: SpinState) -> complex:
    """<a|b> for two states of the same spin."""
    if a.two_s != b.two_s:
        raise ValidationError("states have different spin")
    return complex(np.vdot(a.coeffs, b.coeffs))


def fs_distance(a: SpinState, b: SpinState) -> float:
    """Fubini-Study distance omega = arccos|<a|b>| in [0, pi/2]."""
    return math.acos(min(1.0, abs(overlap(a, b))))


def density(a: SpinState) -> np.ndarray:
    return np.outer(a.coeffs, a.coeffs.conj())


def geodesic(
    a: SpinState, b: SpinState, t: float, tols: Tolerances = DEFAULT_TOLS
) -> SpinState:
    """Point at arclength t along the unit-speed geodesic from a toward b.

    The representative (cos t - cot w sin t)|a> + e^{i eta} sin t csc w |b>
    stays normalized for all t; t = 0 gives a and t = w gives b.  Raises
    AntipodalTarget when the endpoints are a quarter circle apart and the
    geodesic is not unique.
    """
    z = overlap(b, a)  # <b|a> = cos w e^{i eta}
    w = math.acos(min(1.0, abs(z)))
    if w >= math.pi / 2 - tols.cut_locus_margin:
        raise AntipodalTarget(f"endpoints at distance {w}; geodesic not unique")
    if w < 1e-15:
        return a
    eta = math.atan2(z.imag, z.real)
    c = (math.cos(t) - math.sin(t) / math.tan(w)) * a.coeffs + (
        np.exp(1j * eta) * math.sin(t) / math.sin(w)
    ) * b.coeffs
    return spin_state(c, a.two_s)


def log_map(
    base: SpinState, target: SpinState, tols: Tolerances = DEFAULT_TOLS
) -> np.ndarray:
    """Tangent matrix v with |v| = omega whose geodesic reaches the target.

    v = w [ -2 cot w rho + csc w (e^{i eta}|t><base| + e^{-i eta}|base><t|) ];
    the rho term cancels against the parallel part of the target terms, so
    Tr(v rho) = 0 and v lies in the tangent space.  Raises CutLocus within
    the cut-locus margin of pi/2, where single points blow up to circles.
    """
    z = overlap(target, base)
    w = math.acos(min(1.0, abs(z)))
    dim = base.two_s + 1
    if w < 1e-15:
        return np.zeros((dim, dim))
    if w >= math.pi / 2 - tols.cut_locus_margin:
        raise CutLocus(f"target at distance {w} >= pi/2 - margin")
    eta = math.atan2(z.imag, z.real)
    cross = np.exp(1j * eta) * np.outer(target.coeffs, base.coeffs.conj())
    return w * (
        -2 / math.tan(w) * density(base) + (cross + cross.conj().T) / math.sin(w)
    )


def fs_norm(v: np.ndarray) -> float:
    """Fubini-Study norm sqrt(Tr(v^2)/2) of a Hermitian tangent matrix."""
    return math.sqrt(max(0.0, float(np.trace(v @ v).real) / 2))


def tangent_frame(base: SpinState, completion: np.ndarray | None = None) -> TangentFrame:
    """Orthonormal Hermitian frame {A_k, B_k} from a completion of the base.

    A_k = |psi><e_k| + |e_k><psi| and B_k = i(|psi><e_k| - |e_k><psi|) for an
    orthonormal basis {e_k} of the orthogonal complement.  The base
    representative is rephased canonically first, so frame components of a
    log map do not depend on the caller's choice of global phase.
    """
    psi = canonical_phase(base.coeffs)
    dim = base.two_s + 1
    if completion is None:
        q, _ = np.linalg.qr(np.column_stack([psi, np.eye(dim)[:, : dim - 1]]))
        completion = q[:, 1:dim]
    else:
        completion = np.asarray(completion, dtype=complex)
        if completion.shape != (dim, dim - 1):
            raise ValidationError("completion must hold dim-1 column vectors")
    mats = []
    for k in range(dim - 1):
        e = completion[:, k]
        cross = np.outer(psi, e.conj())
        mats.append(cross + cross.conj().T)
        mats.append(1j * (cross - cross.conj().T))
    return TangentFrame(base, np.array(mats))


def frame_components(v: np.ndarray, frame: TangentFrame) -> np.ndarray:
    """Components v^i = Tr(v h_i)/2 (real for Hermitian input)."""
    return np.einsum("kij,ji->k", frame.mats, v).real / 2


def _phase_fixed_overlaps(base: SpinState, coherent: np.ndarray) -> np.ndarray:
    """<n|psi> for a batch of coherent rows (conjugation handled here)."""
    return coherent.conj() @ base.coeffs


def _coherent_batch(two_s: int, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Rows of SC-state coefficients for paired (theta, phi) samples."""
    k = np.arange(two_s + 1)
    binom = np.sqrt([math.comb(two_s, int(j)) for j in k])
    ct = np.cos(thetas / 2)[:, None] ** (two_s - k)
    stp = (np.exp(1j * phis)[:, None] * np.sin(thetas / 2)[:, None]) ** k
    return binom * ct * stp


def _cloud_samples(
    base: SpinState,
    frame: TangentFrame,
    thetas: np.ndarray,
    phis: np.ndarray,
    tols: Tolerances,
):
    """Shared log-cloud computation over paired angle arrays."""
    psi = canonical_phase(base.coeffs)
    coherent = _coherent_batch(base.two_s, thetas, phis)
    z = coherent.conj() @ psi  # <n|psi> with the canonical representative
    cosw = np.minimum(1.0, np.abs(z))
    omegas = np.arccos(cosw)
    cut = omegas >= math.pi / 2 - tols.cut_locus_margin

    # v^{2k-1} + i v^{2k} = w csc w e^{-i eta} <n|e_k>, eta = arg <n|psi>
    dim = base.two_s + 1
    e_mat = np.empty((dim, dim - 1), dtype=complex)
    for kk in range(dim - 1):
        # recover e_k from A_k = |psi><e_k| + |e_k><psi|: A_k |psi> = e_k
        e_mat[:, kk] = frame.mats[2 * kk] @ psi
    inner = coherent.conj() @ e_mat  # rows: <n|e_k>... conjugate below
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.where(np.abs(z) > 0, z / np.where(np.abs(z) > 0, np.abs(z), 1), 0)
        scale = np.where(cut, np.nan, omegas / np.where(np.sin(omegas) > 0, np.sin(omegas), 1))
        scale = np.where(omegas < 1e-15, 0.0, scale)
        cvals = scale[:, None] * np.conj(phase)[:, None] * inner
    comps = np.empty((len(thetas), 2 * (dim - 1)))
    comps[:, 0::2] = cvals.real
    comps[:, 1::2] = cvals.imag
    comps[cut] = np.nan
    flags = np.where(cut, CUT_FLAG, OK_FLAG)
    return comps, omegas, flags


def equiangular_grid(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Paired (theta, phi) arrays for a resolution x resolution lattice."""
    th = np.linspace(0.0, math.pi, resolution)
    ph = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    return tt.ravel(), pp.ravel()


def sc_log_cloud(
    base: SpinState,
    resolution: int = 100,
    tols: Tolerances = DEFAULT_TOLS,
    frame: TangentFrame | None = None,
    directions: list[Direction] | None = None,
) -> LogCloud:
    """Log-map image of the coherent sphere on an equiangular lattice.

    The SC phase at each sample is fixed so <n|psi> is real nonnegative;
    samples within the cut-locus margin of pi/2 carry the "cutlocus" flag
    and NaN components.  An explicit direction list overrides the lattice.
    """
    if frame is None:
        frame = tangent_frame(base)
    if directions is None:
        thetas, phis = equiangular_grid(resolution)
    else:
        thetas = np.array([d.theta for d in directions])
        phis = np.array([d.phi for d in directions])
    comps, omegas, flags = _cloud_samples(base, frame, thetas, phis, tols)
    return LogCloud(base, frame, thetas, phis, comps, omegas, flags)


def direction_cloud(
    base: SpinState,
    resolution: int = 100,
    tols: Tolerances = DEFAULT_TOLS,
    frame: TangentFrame | None = None,
    circle_samples: int = 256,
) -> DirectionCloud:
    """Unit initial directions toward the coherent sphere, stereo-projected.

    Cut-locus targets (the star antipodes) blow up to entire circles of unit
    tangent vectors e^{i eta}|t><psi| + h.c.; these are emitted as closed
    curves alongside the regular samples.
    """
    from .stellar import antipode, majorana_polynomial, polynomial_roots

    if frame is None:
        frame = tangent_frame(base)
    thetas, phis = equiangular_grid(resolution)
    comps, omegas, flags = _cloud_samples(base, frame, thetas, phis, tols)
    ok = flags == OK_FLAG
    unit = comps.copy()
    unit[ok] = comps[ok] / omegas[ok, None]
    projected = _stereo_project(unit)

    psi = canonical_phase(base.coeffs)
    circles_c = []
    circles_p = []
    con = polynomial_roots(majorana_polynomial(base), tols)
    etas = np.linspace(0, 2 * math.pi, circle_samples)
    for d in con.directions:
        t = sc_state(antipode(d), base.two_s).coeffs
        cross0 = np.outer(t, psi.conj())
        rows = np.empty((circle_samples, comps.shape[1]))
        for i, eta in enumerate(etas):
            v_hat = np.exp(1j * eta) * cross0
            v_hat = v_hat + v_hat.conj().T
            rows[i] = frame_components(v_hat, frame)
        circles_c.append(rows)
        circles_p.append(_stereo_project(rows))
    return DirectionCloud(
        base,
        frame,
        thetas,
        phis,
        unit,
        projected,
        flags,
        tuple(circles_c),
        tuple(circles_p),
    )


def _stereo_project(unit_rows: np.ndarray) -> np.ndarray:
    """Stereographic projection from the negative pole of the last axis,
    restricted to the first three axes."""
    last = unit_rows[:, -1]
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = 1 + last
        out = unit_rows[:, :3] / denom[:, None]
    return out


def bargmann_phase(
    a: SpinState, b: SpinState, c: SpinState, tols: Tolerances = DEFAULT_TOLS
) -> float:
    """Phase of the three-state invariant <a|b><b|c><c|a>.

    Independent of the representatives' phases; undefined (raises) when any
    pairwise overlap vanishes.
    """
    zab, zbc, zca = overlap(a, b), overlap(b, c), overlap(c, a)
    if min(abs(zab), abs(zbc), abs(zca)) < 1e-14:
        raise UndefinedPhase("a pairwise overlap vanishes")
    prod = zab * zbc * zca
    return math.atan2(prod.imag, prod.real)


def tangent_angle(
    base: SpinState, a: SpinState, b: SpinState, tols: Tolerances = DEFAULT_TOLS
) -> float:
    """Angle at the base between the geodesics toward a and b.

    cos Theta = (cos w_ab cos Omega - cos w_a cos w_b) / (sin w_a sin w_b)
    with Omega the Bargmann phase of (a, b, base); for Omega = 0 this is the
    spherical law of cosines.
    """
    w_a = fs_distance(base, a)
    w_b = fs_distance(base, b)
    w_ab = fs_distance(a, b)
    eps = tols.cut_locus_margin
    if min(w_a, w_b) < eps or max(w_a, w_b) > math.pi / 2 - eps:
        raise DegenerateTriangle("side lengths must lie strictly inside (0, pi/2)")
    omega = bargmann_phase(a, b, base, tols)
    cos_theta = (math.cos(w_ab) * math.cos(omega) - math.cos(w_a) * math.cos(w_b)) / (
        math.sin(w_a) * math.sin(w_b)
    )
    return math.acos(min(1.0, max(-1.0, cos_theta)))


# ---------------------------------------------------------------------------
# the worked spin-1 family: stars in the x-z plane at angle alpha from z
# ---------------------------------------------------------------------------

def equatorial_pair_state(alpha: float) -> SpinState:
    """Spin-1 state with stars (sin a, 0, +-cos a...) at angle alpha from z.

    Components (cos^2(a/2), 0, -sin^2(a/2)) times 2/sqrt(3 + cos 2a).
    """
    b = math.sqrt(3 + math.cos(2 * alpha))
    return spin_state(
        np.array([math.cos(alpha / 2) ** 2, 0.0, -math.sin(alpha / 2) ** 2]) * 2 / b
    )


def equatorial_pair_frame(alpha: float) -> TangentFrame:
    """The fixed tangent frame used for the spin-1 family's cloud portraits.

    Completion vectors e_1 = (0, 1, 0) and
    e_2 = (2/b)(sin^2(a/2), 0, cos^2(a/2)).
    """
    base = equatorial_pair_state(alpha)
    b = math.sqrt(3 + math.cos(2 * alpha))
    e1 = np.array([0.0, 1.0, 0.0], dtype=complex)
    e2 = np.array([math.sin(alpha / 2) ** 2, 0.0, math.cos(alpha / 2) ** 2]) * 2 / b
    return tangent_frame(base, np.column_stack([e1, e2]))
