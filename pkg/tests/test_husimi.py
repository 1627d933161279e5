import math
import warnings

import numpy as np
import pytest

from scsphere.errors import DegenerateStar, NotCritical
from scsphere.husimi import (
    GLOBAL_MIN,
    LOCAL_MAX,
    SADDLE,
    classify_critical,
    closest_sc,
    cone_coefficient,
    critical_points,
    husimi,
    rotated_expansion,
)
from scsphere.scbasis import sc_state
from scsphere.stellar import (
    Direction,
    StereoPoint,
    antipode,
    cluster_points,
    coherent_overlap,
    constellation_from_directions,
    direction,
    majorana_polynomial,
    point_to_vector,
    polynomial_roots,
    random_spin_state,
    rotate_state,
    spin_state,
    state_from_constellation,
    wigner_d_matrix,
)


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def kinds(points):
    out = {}
    for c in points:
        out[c.kind] = out.get(c.kind, 0) + 1
    return out


def local_direction(n0, theta_step, phi_azimuth):
    """Direction at angular distance theta_step from n0, azimuth measured
    in the z-y-z rotated frame used by classify_critical."""
    from scsphere.stellar import rotation_matrix

    r = rotation_matrix(np.array([0.0, 0.0, n0.phi])) @ rotation_matrix(
        np.array([0.0, n0.theta, 0.0])
    )
    ex, ey, ez = r[:, 0], r[:, 1], r[:, 2]
    v = (
        math.cos(theta_step) * ez
        + math.sin(theta_step) * (math.cos(phi_azimuth) * ex + math.sin(phi_azimuth) * ey)
    )
    return Direction.from_vector(v)


class TestHusimiValue:
    def test_coherent_at_own_direction(self):
        assert husimi(spin_state([1, 0, 0]), direction(0, 0)) == pytest.approx(1.0)

    def test_zero_at_star_antipodes(self):
        rng = np.random.default_rng(1)
        st = random_spin_state(rng, 4)
        con = polynomial_roots(majorana_polynomial(st))
        for d in con.directions:
            assert husimi(st, antipode(d)) < 1e-18

    def test_grid_matches_overlap_square(self):
        rng = np.random.default_rng(2)
        st = random_spin_state(rng, 3)
        for theta in np.linspace(0.1, math.pi - 0.1, 8):
            for phi in np.linspace(0, 2 * math.pi, 8, endpoint=False):
                n = direction(theta, phi)
                assert husimi(st, n) == pytest.approx(
                    abs(coherent_overlap(st, n)) ** 2, abs=1e-12
                )


class TestClassify:
    def test_star_antipode_is_global_min(self):
        rng = np.random.default_rng(3)
        st = random_spin_state(rng, 4)
        con = polynomial_roots(majorana_polynomial(st))
        cp = classify_critical(st, antipode(con.directions[0]))
        assert cp.kind == GLOBAL_MIN

    def test_coherent_north_is_max(self):
        st = spin_state([1, 0, 0, 0, 0])
        cp = classify_critical(st, direction(0, 0))
        assert cp.kind == LOCAL_MAX
        assert cp.rho[0] == pytest.approx(1.0)
        assert cp.rho[2] == pytest.approx(0.0, abs=1e-15)

    def test_noncritical_direction_raises(self):
        rng = np.random.default_rng(4)
        st = random_spin_state(rng, 4)
        with pytest.raises(NotCritical):
            classify_critical(st, direction(0.7, 0.7))

    def test_saddle_direction_matches_finite_difference_hessian(self):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 5:
            st = random_spin_state(rng, 4)
            saddles = [c for c in critical_points(st) if c.kind == SADDLE]
            for c in saddles[:2]:
                # Hessian of H in the rotated-frame chart by central differences
                h = 1e-4

                def val(dt, dp):
                    return husimi(st, local_direction(c.direction, abs(dt + 0j) and 0 or 0, 0))

                # H rises along the saddle's minimum direction, so that azimuth
                # maximizes the second difference
                best_phi, best_val = None, None
                for phi in np.linspace(0, math.pi, 720, endpoint=False):
                    plus = husimi(st, local_direction(c.direction, h, phi))
                    minus = husimi(st, local_direction(c.direction, h, phi + math.pi))
                    curv = plus + minus - 2 * c.value
                    if best_val is None or curv > best_val:
                        best_val, best_phi = curv, phi
                err = abs((best_phi - c.saddle_phi + math.pi / 2) % math.pi - math.pi / 2)
                assert err < 1e-2
                checked += 1


class TestCriticalPoints:
    def test_coherent_state_structure(self):
        st = sc_state(direction(0.0, 0.0), 4)
        cps = critical_points(st)
        assert kinds(cps) == {LOCAL_MAX: 1, GLOBAL_MIN: 1}
        assert cps[0].direction.theta == pytest.approx(0.0, abs=1e-9)
        assert cps[1].direction.theta == pytest.approx(math.pi, abs=1e-12)

    def test_every_max_and_saddle_satisfies_criticality(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            st = random_spin_state(rng, 5)
            for c in critical_points(st):
                if c.kind != GLOBAL_MIN:
                    assert c.residual < 1e-9

    def test_morse_count_random_states(self):
        rng = np.random.default_rng(7)
        for _ in range(12):
            two_s = int(rng.integers(2, 7))
            st = random_spin_state(rng, two_s)
            k = kinds(critical_points(st))
            morse = k.get(LOCAL_MAX, 0) - k.get(SADDLE, 0) + k.get(GLOBAL_MIN, 0)
            assert morse == 2

    def test_seed_offset_invariance(self):
        rng = np.random.default_rng(8)
        st = random_spin_state(rng, 5)
        a = critical_points(st, seed_offset=0.5)
        b = critical_points(st, seed_offset=0.25)
        assert len(a) == len(b)
        for ca, cb in zip(a, b):
            assert ca.kind == cb.kind
            gap = np.linalg.norm(ca.direction.unit_vector - cb.direction.unit_vector)
            assert gap < 1e-6

    def test_minima_sit_at_star_antipodes(self):
        rng = np.random.default_rng(9)
        st = random_spin_state(rng, 4)
        con = polynomial_roots(majorana_polynomial(st))
        minima = [c for c in critical_points(st) if c.kind == GLOBAL_MIN]
        assert len(minima) == 4
        anti = [point_to_vector(p) * -1 for p in con.expanded()]
        for c in minima:
            assert min(np.linalg.norm(c.direction.unit_vector - a) for a in anti) < 1e-9

    def test_zeros_only_at_star_antipodes(self):
        rng = np.random.default_rng(10)
        st = random_spin_state(rng, 3)
        con = polynomial_roots(majorana_polynomial(st))
        anti = [-point_to_vector(p) for p in con.expanded()]
        floor = 1.0
        for theta in np.linspace(0.05, math.pi - 0.05, 40):
            for phi in np.linspace(0, 2 * math.pi, 40, endpoint=False):
                n = direction(theta, phi)
                if min(np.linalg.norm(n.unit_vector - a) for a in anti) > 0.3:
                    floor = min(floor, husimi(st, n))
        assert floor > 1e-6


class TestClosestSC:
    def test_coherent_state_distance_zero(self):
        st = sc_state(direction(1.0, 2.0), 3)
        d, r_c, ties = closest_sc(st)
        assert r_c < 1e-7
        assert np.linalg.norm(d.unit_vector - direction(1.0, 2.0).unit_vector) < 1e-6

    def test_rotation_invariance_of_distance(self):
        rng = np.random.default_rng(11)
        st = random_spin_state(rng, 4)
        _, r1, _ = closest_sc(st)
        _, r2, _ = closest_sc(rotate_state(st, rng.standard_normal(3)))
        assert abs(r1 - r2) < 1e-9

    def test_spin32_two_tied_states_have_mirror_symmetric_constellation(self):
        # two tied closest SC states force a constellation symmetric under
        # reflection through the perpendicular bisector plane of the pair
        theta, gamma = 1.1, 0.8
        lam = 1.0
        a = lam * (1 + 3 * math.cos(theta)) * math.cos(gamma / 2)
        b = (
            2
            * lam
            * math.sqrt(3)
            * math.sin(gamma / 2)
            * math.cos(theta / 2) ** 2
            / math.tan(theta / 2)
        )
        c = -math.sqrt(3) * lam * math.cos(gamma / 2) * (1 + math.cos(theta))
        d = (
            -lam
            * (1 - 3 * math.cos(theta))
            * math.sin(gamma / 2)
            / math.tan(theta / 2) ** 3
        )
        st = spin_state([a, b, c, d])
        _, _, ties = closest_sc(st)
        assert len(ties) == 2
        # tied pair at phi = pi/2, 3pi/2: bisector plane is x-z
        for t in ties:
            assert abs(math.sin(t.phi)) == pytest.approx(1.0, abs=1e-6)
        con = polynomial_roots(majorana_polynomial(st))
        vecs = [point_to_vector(p) for p in con.expanded()]
        mirrored = [v * np.array([1.0, -1.0, 1.0]) for v in vecs]
        pool = list(vecs)
        for v in mirrored:
            dists = [np.linalg.norm(v - w) for w in pool]
            j = int(np.argmin(dists))
            assert dists[j] < 1e-8
            pool.pop(j)


class TestConeCoefficient:
    def test_coherent_state_cone_vanishes(self):
        # for s >= 1 the zero at the antipode has order N, so the quadratic
        # coefficient (s/2) rho_{s-1}^2 vanishes; the N-fold star itself is
        # degenerate, so the check goes through the rotated expansion
        st = sc_state(direction(0.0, 0.0), 4)
        exp = rotated_expansion(st, direction(math.pi, 0.0))
        assert 2.0 / 2 * exp.rho[1] ** 2 < 1e-20

    def test_spin_half_cone_coefficient(self):
        st = sc_state(direction(0.0, 0.0), 1)
        assert cone_coefficient(st, direction(0.0, 0.0)) == pytest.approx(0.25, abs=1e-12)

    def test_azimuth_independence(self):
        rng = np.random.default_rng(12)
        st = random_spin_state(rng, 4)
        con = polynomial_roots(majorana_polynomial(st))
        star = con.directions[0]
        coef = cone_coefficient(st, star)
        apex = antipode(star)
        for theta_step in (1e-3, 2e-3):
            fitted = []
            for phi in np.linspace(0, 2 * math.pi, 8, endpoint=False):
                n = local_direction(apex, theta_step, phi)
                fitted.append(husimi(st, n) / theta_step**2)
            fitted = np.array(fitted)
            assert np.abs(fitted - coef).max() / coef < 1e-2

    def test_matches_quadratic_fit(self):
        rng = np.random.default_rng(13)
        st = random_spin_state(rng, 4)
        con = polynomial_roots(majorana_polynomial(st))
        star = con.directions[1]
        coef = cone_coefficient(st, star)
        apex = antipode(star)
        # Richardson: c(h) = H/h^2 = c + a h + ...; 2c(h/2) - c(h) kills a h
        h = 1e-3
        vals = []
        for hh in (h, h / 2):
            ring = [
                husimi(st, local_direction(apex, hh, phi)) / hh**2
                for phi in np.linspace(0, 2 * math.pi, 16, endpoint=False)
            ]
            vals.append(np.mean(ring))
        extrap = 2 * vals[1] - vals[0]
        assert abs(extrap - coef) < 1e-4

    def test_degenerate_star_rejected(self):
        con = constellation_from_directions(
            [direction(0.5, 0.5), direction(2.0, 2.0)], [2, 1]
        )
        st = state_from_constellation(con)
        with pytest.raises(DegenerateStar):
            cone_coefficient(st, direction(0.5, 0.5))


class TestRotatedExpansion:
    def test_moduli_sum_to_one(self):
        rng = np.random.default_rng(14)
        st = random_spin_state(rng, 5)
        exp = rotated_expansion(st, direction(1.1, 0.3))
        assert np.sum(exp.rho**2) == pytest.approx(1.0, abs=1e-12)
