"""SC bases: coherent states, Vandermonde expansions, dual and adapted bases.

Any N + 1 distinct spin-coherent states span the spin-s Hilbert space.  The
expansion of a state in such a basis reduces, through the stellar polynomial,
to a Vandermonde system in the basis roots; the analytic inverse is used for
small N, a pivoted dense solve beyond.  The dual basis is built from
antipodal constellations with one star omitted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    DegenerateBasis,
    DegenerateConstellation,
    IllConditionedWarning,
    NonUniqueClosestWarning,
    ValidationError,
)
from .stellar import (
    Constellation,
    Direction,
    SpinState,
    StereoPoint,
    antipode,
    chordal_distance,
    cluster_points,
    majorana_polynomial,
    point_to_vector,
    polynomial_roots,
    rotate_state,
    rotation_matrix,
    sphere_to_stereo,
    spin_state,
    state_from_constellation,
    stereo_to_sphere,
    symmetrized_norm,
    wigner_d_matrix,
)

__all__ = [
    "SCBasis",
    "ExpansionCoefficients",
    "DualBasis",
    "sc_state",
    "sc_basis",
    "vandermonde_inverse",
    "expand_in_sc_basis",
    "expand_via_dual",
    "dual_basis",
    "adapted_basis",
    "time_reversal",
]

_ANALYTIC_MAX_N = 8


@dataclass(frozen=True)
class SCBasis:
    """N + 1 distinct SC directions with cached structured inverse.

    ``vinv`` is the analytic inverse of the Vandermonde matrix in the basis
    roots; it is None when a direction sits at the south pole (infinite root),
    in which case expansions pre-rotate the problem.
    """

    two_s: int
    directions: tuple[Direction, ...]
    gammas: tuple[StereoPoint, ...]
    states: tuple[SpinState, ...]
    vinv: np.ndarray | None


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Expansion data of a state over an SC basis.

    ``alphas`` are the state-level coefficients (state = sum alphas[k] |c_k>).
    ``alphas_sym`` divide out the symmetrization norm of the state, matching
    the coefficient normalization of the worked small-spin examples.
    ``tilde_alphas`` solve the monic Vandermonde system directly; None when
    the state has a star at the south pole (no monic normalization exists).
    """

    alphas: np.ndarray
    alphas_sym: np.ndarray
    tilde_alphas: np.ndarray | None
    residual: float


@dataclass(frozen=True)
class DualBasis:
    states: tuple[SpinState, ...]


def sc_state(n: Direction, spin_two_s: int) -> SpinState:
    """Spin coherent state along n: maximal eigenstate of n.S.

    Component m is sqrt(C(N, s-m)) cos(theta/2)^(s+m) (e^{i phi} sin(theta/2))^(s-m),
    the symmetric tensor power of the spin-1/2 state along n.
    """
    nn = spin_two_s
    k = np.arange(nn + 1)  # k = s - m
    binom = np.array([math.sqrt(math.comb(nn, int(j))) for j in k])
    c = (
        binom
        * np.cos(n.theta / 2) ** (nn - k)
        * (np.exp(1j * n.phi) * np.sin(n.theta / 2)) ** k
    )
    return spin_state(c, nn)


def sc_basis(
    directions, two_s: int, tols: Tolerances = DEFAULT_TOLS
) -> SCBasis:
    """Bundle N + 1 SC directions into a basis with a cached inverse."""
    dirs = tuple(directions)
    if len(dirs) != two_s + 1:
        raise ValidationError(f"need {two_s + 1} directions, got {len(dirs)}")
    gammas = tuple(sphere_to_stereo(d) for d in dirs)
    _check_separation(gammas, tols.basis_chordal)
    states = tuple(sc_state(d, two_s) for d in dirs)
    vinv = None
    if all(not g.is_infinite for g in gammas):
        vinv = vandermonde_inverse([g.value for g in gammas], tols)
    return SCBasis(two_s, dirs, gammas, states, vinv)


def _check_separation(gammas, tol: float) -> None:
    for i in range(len(gammas)):
        for j in range(i + 1, len(gammas)):
            if chordal_distance(gammas[i], gammas[j]) <= tol:
                raise DegenerateBasis(
                    f"basis points {i} and {j} closer than {tol} in the chordal metric"
                )


def vandermonde_inverse(gammas, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Analytic inverse of the Vandermonde matrix V_jk = gamma_k^j.

    Row i holds the coefficients of P_i(z) / P_i(gamma_i) where
    P_i(z) = prod_{k != i} (z - gamma_k).
    """
    g = np.asarray([complex(x) for x in gammas])
    _check_separation([StereoPoint(x) for x in g], tols.basis_chordal)
    n = len(g)
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        others = np.delete(g, i)
        p = np.polynomial.polynomial.polyfromroots(others)
        out[i] = p / np.polynomial.polynomial.polyval(g[i], p)
    return out


def expand_in_sc_basis(
    state: SpinState, basis: SCBasis, tols: Tolerances = DEFAULT_TOLS
) -> ExpansionCoefficients:
    """Solve state = sum_k alphas[k] |c_k> through the stellar polynomial.

    Uses the analytic Vandermonde inverse (plus one refinement step) for
    N <= 8 and a pivoted dense solve beyond; pre-rotates the whole problem
    whenever a basis root or the state's leading coefficient sits at
    infinity.  Warns IllConditionedWarning above the condition threshold.
    """
    if state.two_s != basis.two_s:
        raise ValidationError("state and basis spin mismatch")
    a = majorana_polynomial(state).coeffs
    leading_ok = abs(a[-1]) > tols.phase_floor * np.abs(a).max()
    finite = all(not g.is_infinite for g in basis.gammas)
    if finite and basis.vinv is not None:
        cond = np.linalg.cond(_vandermonde(basis))
        if cond > tols.cond_warn:
            warnings.warn(
                f"Vandermonde condition number {cond:.2e}", IllConditionedWarning,
                stacklevel=2,
            )
    if finite and leading_ok:
        alphas, tilde = _solve_finite(a, basis, tols)
    else:
        alphas, tilde = _solve_rotated(state, basis, tols)
    recon = sum(al * st.coeffs for al, st in zip(alphas, basis.states))
    residual = float(np.linalg.norm(recon - state.coeffs))
    a_psi = symmetrized_norm(polynomial_roots(majorana_polynomial(state), tols), tols)
    return ExpansionCoefficients(alphas, alphas / a_psi, tilde, residual)


def _vandermonde(basis: SCBasis) -> np.ndarray:
    g = np.array([x.value for x in basis.gammas])
    return np.vander(g, increasing=True).T


def _sc_columns(basis: SCBasis) -> np.ndarray:
    return np.column_stack([majorana_polynomial(st).coeffs for st in basis.states])


def _solve_finite(a: np.ndarray, basis: SCBasis, tols: Tolerances):
    n = basis.two_s
    m = _sc_columns(basis)
    if n <= _ANALYTIC_MAX_N:
        g = np.array([x.value for x in basis.gammas])
        a_monic = a / a[-1]
        i = np.arange(n + 1)
        btilde = ((-1.0) ** i) * a_monic[n - i] / np.array([math.comb(n, int(k)) for k in i])
        tilde = basis.vinv @ btilde
        alphas = a[-1] * (1 + np.abs(g) ** 2) ** (n / 2) * tilde
        # one refinement step tightens the analytic formula to solver accuracy
        alphas += np.linalg.solve(m, a - m @ alphas)
    else:
        alphas = np.linalg.solve(m, a)
        g = np.array([x.value for x in basis.gammas])
        tilde = alphas / (a[-1] * (1 + np.abs(g) ** 2) ** (n / 2))
    return alphas, tilde


def _solve_rotated(state: SpinState, basis: SCBasis, tols: Tolerances):
    """Rotate everything until all roots are finite, solve, undo the phases."""
    rng = np.random.default_rng(0x5C0FFEE)
    for _ in range(16):
        rotvec = rng.standard_normal(3)
        rot = rotation_matrix(rotvec)
        new_dirs = [Direction.from_vector(rot @ d.unit_vector) for d in basis.directions]
        if any(d.theta > math.pi - 1e-3 for d in new_dirs):
            continue
        rot_state = rotate_state(state, rotvec)
        a_rot = majorana_polynomial(rot_state).coeffs
        if abs(a_rot[-1]) < 1e-8 * np.abs(a_rot).max():
            continue
        rot_basis = sc_basis(new_dirs, basis.two_s, tols)
        betas, _ = _solve_finite(a_rot, rot_basis, tols)
        d_mat = wigner_d_matrix(basis.two_s, rotvec)
        alphas = np.empty(basis.two_s + 1, dtype=complex)
        for k, st in enumerate(basis.states):
            mu = np.vdot(rot_basis.states[k].coeffs, d_mat @ st.coeffs)
            alphas[k] = betas[k] / mu
        a = majorana_polynomial(state).coeffs
        tilde = None
        if abs(a[-1]) > tols.phase_floor * np.abs(a).max() and all(
            not g.is_infinite for g in basis.gammas
        ):
            g = np.array([x.value for x in basis.gammas])
            tilde = alphas / (a[-1] * (1 + np.abs(g) ** 2) ** (basis.two_s / 2))
        return alphas, tilde
    raise DegenerateBasis("could not find a rotation keeping all roots finite")


def expand_via_dual(
    state: SpinState, basis: SCBasis, tols: Tolerances = DEFAULT_TOLS
) -> np.ndarray:
    """Expansion coefficients through the dual pairing <c^i|psi>."""
    dual = dual_basis(basis, tols)
    return np.array([np.vdot(d.coeffs, state.coeffs) for d in dual.states])


def dual_basis(basis: SCBasis, tols: Tolerances = DEFAULT_TOLS) -> DualBasis:
    """States |c^i> with <c^j|c_i> = delta, from one-star-omitted antipodes.

    |c^i> is the constellation state of the antipodes of all basis directions
    except the i-th, divided by its overlap with |c_i>; the result is not
    normalized in general.
    """
    states = []
    for i in range(len(basis.directions)):
        others = [antipode(d) for j, d in enumerate(basis.directions) if j != i]
        pts = [sphere_to_stereo(d) for d in others]
        numer = state_from_constellation(cluster_points(pts, tols.cluster_chordal), tols)
        denom = np.vdot(basis.states[i].coeffs, numer.coeffs)
        coeffs = numer.coeffs / denom
        # dual elements are generally not unit vectors; bypass normalization
        st = SpinState.__new__(SpinState)
        object.__setattr__(st, "two_s", basis.two_s)
        c = np.asarray(coeffs, dtype=complex)
        c.flags.writeable = False
        object.__setattr__(st, "coeffs", c)
        states.append(st)
    return DualBasis(tuple(states))


def adapted_basis(
    state: SpinState, tols: Tolerances = DEFAULT_TOLS
) -> tuple[SCBasis, ExpansionCoefficients]:
    """Basis adapted to the state: its stars, plus the Husimi-extremal direction.

    The first basis direction is the SC state closest to the antipodal state
    (the state whose stars are the antipodes of the input's); the remaining N
    are the stars themselves.  Requires a non-degenerate constellation.
    """
    from . import husimi as _husimi

    con = polynomial_roots(majorana_polynomial(state), tols)
    if any(m > 1 for m in con.mults):
        raise DegenerateConstellation("adapted basis needs N distinct stars")
    # quantized sort key: stars equal to ~1e-9 should not be reordered by ulps
    star_dirs = sorted(
        con.directions, key=lambda d: (round(d.theta * 1e9), round(d.phi * 1e9))
    )
    anti_pts = [sphere_to_stereo(antipode(d)) for d in star_dirs]
    anti_state = state_from_constellation(
        cluster_points(anti_pts, tols.cluster_chordal), tols
    )
    c0, _, ties = _husimi.closest_sc(anti_state, tols)
    if len(ties) > 1:
        warnings.warn(
            f"{len(ties)} closest SC states tie; picking lexicographically first",
            NonUniqueClosestWarning,
            stacklevel=2,
        )
    basis = sc_basis([c0, *star_dirs], state.two_s, tols)
    return basis, expand_in_sc_basis(state, basis, tols)


def time_reversal(state: SpinState) -> SpinState:
    """Antiunitary time reversal: tensor power of (-i sigma_y) o conjugation.

    Acts on components as (T psi)_m = (-1)^(s+m) conj(psi_{-m}); the
    constellation of the result is the antipodal constellation.
    """
    n = state.two_s
    k = np.arange(n + 1)
    c = ((-1.0) ** (n - k)) * np.conj(state.coeffs[n - k])
    return SpinState(n, c)
