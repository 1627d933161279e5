"""Seeded invariant suite behind the `verify` subcommand.

Each check is a pure function of (rng, tols) returning pass/fail plus a
one-line detail.  Output is deterministic for a fixed seed: same checks,
same order, same formatted numbers, no timing or environment information.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .fsgeom import (
    bargmann_phase,
    fs_distance,
    fs_norm,
    geodesic,
    log_map,
    density,
    tangent_angle,
)
from .husimi import LOCAL_MAX, SADDLE, GLOBAL_MIN, closest_sc, critical_points
from .scbasis import (
    dual_basis,
    expand_in_sc_basis,
    expand_via_dual,
    sc_basis,
    time_reversal,
)
from .stellar import (
    Direction,
    antipode_stereo,
    coherent_overlap,
    direction,
    fidelity,
    majorana_polynomial,
    point_to_vector,
    polynomial_roots,
    random_spin_state,
    rotate_state,
    rotation_matrix,
    state_from_constellation,
)
from .superpose import superpose, two_sc_trajectory

__all__ = ["run_verify", "CHECKS"]


def _fmt(x: float) -> str:
    return f"{x:.3e}"


def check_round_trip(rng, tols):
    worst = 0.0
    for two_s in (2, 3, 4, 6):
        for _ in range(100):
            st = random_spin_state(rng, two_s)
            back = state_from_constellation(
                polynomial_roots(majorana_polynomial(st), tols), tols
            )
            worst = max(worst, 1 - fidelity(st, back))
    return worst < 1e-10, f"max infidelity {_fmt(worst)}"


def check_transition_identity(rng, tols):
    st = random_spin_state(rng, 6)
    p = majorana_polynomial(st)
    worst = 0.0
    for theta in np.linspace(0, math.pi, 34)[1:-1]:
        for phi in np.linspace(0, 2 * math.pi, 32, endpoint=False):
            zeta = math.tan(theta / 2) * np.exp(1j * phi)
            rhs = (math.cos(theta / 2) * np.exp(-1j * phi)) ** 6 * p(zeta)
            lhs = coherent_overlap(st, direction(math.pi - theta, phi + math.pi))
            worst = max(worst, abs(lhs - rhs))
    return worst < 1e-10, f"max pointwise error {_fmt(worst)}"


def check_rotation_equivariance(rng, tols):
    worst = 0.0
    for _ in range(30):
        two_s = int(rng.integers(1, 7))
        st = random_spin_state(rng, two_s)
        rv = rng.standard_normal(3)
        rot = rotation_matrix(rv)
        expect = [rot @ point_to_vector(p) for p in
                  polynomial_roots(majorana_polynomial(st), tols).expanded()]
        got = [point_to_vector(p) for p in
               polynomial_roots(majorana_polynomial(rotate_state(st, rv)), tols).expanded()]
        pool = list(got)
        for v in expect:
            d = [np.linalg.norm(v - w) for w in pool]
            j = int(np.argmin(d))
            worst = max(worst, d[j])
            pool.pop(j)
    return worst < 1e-8, f"max multiset distance {_fmt(worst)}"


def check_duality(rng, tols):
    worst = 0.0
    for two_s in (1, 2, 3, 4):
        for _ in range(25):
            dirs = [Direction.from_vector(v) for v in rng.standard_normal((two_s + 1, 3))]
            try:
                basis = sc_basis(dirs, two_s, tols)
            except Exception:
                continue
            dual = dual_basis(basis, tols)
            g = np.array(
                [[np.vdot(d.coeffs, c.coeffs) for c in basis.states] for d in dual.states]
            )
            worst = max(worst, float(np.abs(g - np.eye(two_s + 1)).max()))
            res = sum(np.outer(d.coeffs, c.coeffs.conj())
                      for d, c in zip(dual.states, basis.states))
            worst = max(worst, float(np.abs(res - np.eye(two_s + 1)).max()))
    return worst < 1e-9, f"max duality deviation {_fmt(worst)}"


def check_expansion_routes(rng, tols):
    worst = 0.0
    for _ in range(25):
        two_s = int(rng.integers(1, 5))
        st = random_spin_state(rng, two_s)
        dirs = [Direction.from_vector(v) for v in rng.standard_normal((two_s + 1, 3))]
        try:
            basis = sc_basis(dirs, two_s, tols)
        except Exception:
            continue
        a1 = expand_in_sc_basis(st, basis, tols).alphas
        a2 = expand_via_dual(st, basis, tols)
        worst = max(worst, float(np.abs(a1 - a2).max()))
    return worst < 1e-8, f"max route disagreement {_fmt(worst)}"


def check_time_reversal(rng, tols):
    worst = 0.0
    for two_s in (3, 5):
        for _ in range(100):
            st = random_spin_state(rng, two_s)
            worst = max(worst, abs(np.vdot(st.coeffs, time_reversal(st).coeffs)))
    return worst < 1e-12, f"max |(psi, T psi)| {_fmt(worst)}"


def check_critical_points(rng, tols):
    ok = True
    detail = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(4):
            two_s = int(rng.integers(2, 6))
            st = random_spin_state(rng, two_s)
            cps = critical_points(st, tols)
            counts = {}
            for c in cps:
                counts[c.kind] = counts.get(c.kind, 0) + 1
            morse = (
                counts.get(LOCAL_MAX, 0)
                - counts.get(SADDLE, 0)
                + counts.get(GLOBAL_MIN, 0)
            )
            residual_ok = all(
                c.residual < 1e-9 for c in cps if c.kind != GLOBAL_MIN
            )
            ok = ok and morse == 2 and residual_ok
            detail.append(f"2s={two_s}:morse={morse}")
    return ok, " ".join(detail)


def check_closest_sc_rotation_invariance(rng, tols):
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(3):
            st = random_spin_state(rng, 4)
            _, r1, _ = closest_sc(st, tols)
            _, r2, _ = closest_sc(rotate_state(st, rng.standard_normal(3)), tols)
            worst = max(worst, abs(r1 - r2))
    return worst < 1e-9, f"max |r_c - r_c'| {_fmt(worst)}"


def check_metric(rng, tols):
    worst = -1.0
    for _ in range(5000):
        a, b, c = (random_spin_state(rng, 2) for _ in range(3))
        slack = fs_distance(a, c) + fs_distance(c, b) - fs_distance(a, b)
        worst = max(worst, -slack)
    return worst < 1e-12, f"max triangle violation {_fmt(max(worst, 0.0))}"


def check_geodesics(rng, tols):
    worst = 0.0
    h = 1e-5
    for _ in range(5):
        a, b = random_spin_state(rng, 3), random_spin_state(rng, 3)
        w = fs_distance(a, b)
        if w >= math.pi / 2 - 1e-3:
            continue
        worst = max(worst, 1 - fidelity(geodesic(a, b, w, tols), b))
        for t in np.linspace(0.1, w - 0.1, 4):
            dp = density(geodesic(a, b, t + h, tols)) - density(geodesic(a, b, t - h, tols))
            worst = max(worst, abs(fs_norm(dp / (2 * h)) - 1))
    return worst < 1e-6, f"max speed/endpoint error {_fmt(worst)}"


def check_log_map(rng, tols):
    worst = 0.0
    for _ in range(20):
        a, b = random_spin_state(rng, 3), random_spin_state(rng, 3)
        w = fs_distance(a, b)
        if w >= math.pi / 2 - 1e-3:
            continue
        worst = max(worst, abs(fs_norm(log_map(a, b, tols)) - w))
    return worst < 1e-10, f"max norm error {_fmt(worst)}"


def check_angle_formula(rng, tols):
    worst = 0.0
    count = 0
    while count < 100:
        base, a, b = (random_spin_state(rng, 2) for _ in range(3))
        try:
            th = tangent_angle(base, a, b, tols)
        except Exception:
            continue
        va, vb = log_map(base, a, tols), log_map(base, b, tols)
        cos_direct = np.trace(va @ vb).real / 2 / (fs_norm(va) * fs_norm(vb))
        worst = max(worst, abs(math.cos(th) - cos_direct))
        count += 1
    return worst < 1e-9, f"max cos mismatch {_fmt(worst)}"


def check_mason(rng, tols):
    from .errors import ZeroCombination
    from .stellar import StereoPoint, cluster_points

    violations = 0
    for _ in range(300):
        two_s = int(rng.integers(1, 11))
        pts1 = [StereoPoint(complex(*rng.standard_normal(2))) for _ in range(two_s)]
        pts2 = [StereoPoint(complex(*rng.standard_normal(2))) for _ in range(two_s)]
        if rng.random() < 0.4:
            pts2[0] = pts1[0]
        s1 = state_from_constellation(cluster_points(pts1, 1e-12), tols)
        s2 = state_from_constellation(cluster_points(pts2, 1e-12), tols)
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        try:
            superpose(a, s1, b, s2, tols)
        except ZeroCombination:
            continue
        except Exception:
            violations += 1
    return violations == 0, f"{violations} violations in 300 draws"


def check_trajectory(rng, tols):
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 7))
        g1, g2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        om = float(rng.uniform(0, 2 * math.pi))
        ts = np.linspace(0.05, math.pi - 0.05, 40)
        traj = two_sc_trajectory(g1, g2, om, ts, tols, two_s=n)
        for k in range(n):
            zs = traj.roots[:, k]
            zs = zs[np.isfinite(zs)]
            m = (zs - g1) / (zs - g2)
            ang = np.angle(m) - (om + 2 * math.pi * k / n)
            worst = max(worst, float(np.abs(np.sin(ang)).max()))
    return worst < 1e-10, f"max ray deviation {_fmt(worst)}"


def check_bargmann(rng, tols):
    worst = 0.0
    for _ in range(50):
        a, b, c = (random_spin_state(rng, 3) for _ in range(3))
        try:
            om1 = bargmann_phase(a, b, c, tols)
        except Exception:
            continue
        chi = rng.uniform(0, 2 * math.pi, 3)
        from .stellar import SpinState

        a2 = SpinState(3, a.coeffs * np.exp(1j * chi[0]))
        b2 = SpinState(3, b.coeffs * np.exp(1j * chi[1]))
        c2 = SpinState(3, c.coeffs * np.exp(1j * chi[2]))
        worst = max(worst, abs(om1 - bargmann_phase(a2, b2, c2, tols)))
    return worst < 1e-12, f"max rephasing drift {_fmt(worst)}"


CHECKS = [
    ("round-trip", check_round_trip),
    ("transition-identity", check_transition_identity),
    ("rotation-equivariance", check_rotation_equivariance),
    ("sc-basis-duality", check_duality),
    ("expansion-routes", check_expansion_routes),
    ("time-reversal", check_time_reversal),
    ("critical-points", check_critical_points),
    ("closest-sc-invariance", check_closest_sc_rotation_invariance),
    ("fs-metric", check_metric),
    ("geodesics", check_geodesics),
    ("log-map", check_log_map),
    ("angle-formula", check_angle_formula),
    ("mason-bound", check_mason),
    ("trajectory-rays", check_trajectory),
    ("bargmann-phase", check_bargmann),
]


def run_verify(seed: int = 0, tols: Tolerances = DEFAULT_TOLS) -> tuple[str, bool]:
    """Run every check with a per-check seeded generator; report a table."""
    lines = []
    all_ok = True
    width = max(len(name) for name, _ in CHECKS)
    for i, (name, fn) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        ok, detail = fn(rng, tols)
        all_ok = all_ok and ok
        lines.append(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    lines.append(f"overall: {'PASS' if all_ok else 'FAIL'}")
    return "\n".join(lines) + "\n", all_ok
