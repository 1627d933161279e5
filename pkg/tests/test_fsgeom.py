import math

import numpy as np
import pytest

from scsphere.errors import (
    AntipodalTarget,
    CutLocus,
    DegenerateTriangle,
    UndefinedPhase,
)
from scsphere.fsgeom import (
    bargmann_phase,
    direction_cloud,
    density,
    equatorial_pair_frame,
    equatorial_pair_state,
    fs_distance,
    fs_norm,
    frame_components,
    geodesic,
    log_map,
    overlap,
    sc_log_cloud,
    tangent_angle,
    tangent_frame,
)
from scsphere.scbasis import sc_state
from scsphere.stellar import (
    SpinState,
    antipode,
    direction,
    fidelity,
    random_spin_state,
    spin_state,
)


def rephased(state, chi):
    return SpinState(state.two_s, state.coeffs * np.exp(1j * chi))


def closed_form_components(alpha, thetas, phis):
    b = math.sqrt(3 + math.cos(2 * alpha))
    ca2, sa2 = math.cos(alpha / 2) ** 2, math.sin(alpha / 2) ** 2
    ct2, st2 = np.cos(thetas / 2) ** 2, np.sin(thetas / 2) ** 2
    e2ip = np.exp(2j * phis)
    chi = ca2 * ct2 - e2ip * sa2 * st2
    xi = ca2 * st2 + e2ip * sa2 * ct2
    cosw = np.minimum(2 * np.abs(chi) / b, 1.0)
    w = np.arccos(cosw)
    sinw = np.sin(w)
    v12 = np.sqrt(2) * np.exp(-1j * phis) * w * chi * np.sin(thetas) / (b * sinw * cosw)
    v34 = 4 * np.exp(-2j * phis) * w * chi * xi / (b**2 * cosw * sinw)
    return w, v12, v34


class TestDistance:
    def test_coincident(self):
        # arccos near 1 resolves to ~sqrt(eps)
        st = random_spin_state(np.random.default_rng(0), 3)
        assert fs_distance(st, st) < 1e-7

    def test_orthogonal(self):
        a = spin_state([1, 0, 0])
        b = spin_state([0, 0, 1])
        assert fs_distance(a, b) == pytest.approx(math.pi / 2)

    def test_spin_half_half_angle(self):
        for theta in (0.3, 1.0, 2.5):
            a = sc_state(direction(0, 0), 1)
            b = sc_state(direction(theta, 0.7), 1)
            assert fs_distance(a, b) == pytest.approx(theta / 2, abs=1e-13)

    def test_metric_properties(self):
        rng = np.random.default_rng(1)
        for _ in range(10_000):
            a, b, c = (random_spin_state(rng, 2) for _ in range(3))
            ab, ba = fs_distance(a, b), fs_distance(b, a)
            assert ab == ba
            assert ab <= fs_distance(a, c) + fs_distance(c, b) + 1e-12


class TestGeodesic:
    def test_endpoints(self):
        rng = np.random.default_rng(2)
        a, b = random_spin_state(rng, 4), random_spin_state(rng, 4)
        w = fs_distance(a, b)
        assert fidelity(geodesic(a, b, 0.0), a) > 1 - 1e-12
        assert fidelity(geodesic(a, b, w), b) > 1 - 1e-12

    def test_unit_speed(self):
        rng = np.random.default_rng(3)
        a, b = random_spin_state(rng, 3), random_spin_state(rng, 3)
        w = fs_distance(a, b)
        h = 1e-5
        for t in np.linspace(0.05, w - 0.05, 10):
            dp = density(geodesic(a, b, t + h)) - density(geodesic(a, b, t - h))
            assert fs_norm(dp / (2 * h)) == pytest.approx(1.0, abs=1e-6)

    def test_midpoint_equidistant(self):
        rng = np.random.default_rng(4)
        a, b = random_spin_state(rng, 2), random_spin_state(rng, 2)
        w = fs_distance(a, b)
        mid = geodesic(a, b, w / 2)
        assert abs(fs_distance(mid, a) - fs_distance(mid, b)) < 1e-9

    def test_antipodal_target_rejected(self):
        a = spin_state([1, 0, 0])
        b = spin_state([0, 1, 0])
        with pytest.raises(AntipodalTarget):
            geodesic(a, b, 0.1)


class TestLogMap:
    def test_zero_at_base(self):
        st = random_spin_state(np.random.default_rng(5), 3)
        assert np.abs(log_map(st, st)).max() < 1e-7

    def test_norm_is_distance(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a, b = random_spin_state(rng, 3), random_spin_state(rng, 3)
            if fs_distance(a, b) >= math.pi / 2 - 1e-3:
                continue
            assert fs_norm(log_map(a, b)) == pytest.approx(fs_distance(a, b), abs=1e-10)

    def test_tangency_and_hermiticity(self):
        rng = np.random.default_rng(7)
        a, b = random_spin_state(rng, 4), random_spin_state(rng, 4)
        v = log_map(a, b)
        assert np.abs(v - v.conj().T).max() < 1e-12
        assert abs(np.trace(v @ density(a))) < 1e-12

    def test_exp_log_round_trip(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            a, b = random_spin_state(rng, 3), random_spin_state(rng, 3)
            w = fs_distance(a, b)
            if w >= math.pi / 2 - 1e-3:
                continue
            # geodesic evaluated at t = w must reproduce b; its initial
            # velocity times w must be the log map
            h = 1e-6
            v_fd = (density(geodesic(a, b, h)) - density(geodesic(a, b, 0))) / h * w
            assert np.abs(v_fd - log_map(a, b)).max() < 1e-4
            assert fidelity(geodesic(a, b, w), b) > 1 - 1e-10

    def test_cut_locus_raises(self):
        a = spin_state([1, 0, 0, 0])
        b = spin_state([0, 0, 0, 1])
        with pytest.raises(CutLocus):
            log_map(a, b)


class TestTangentFrame:
    def test_orthonormal(self):
        rng = np.random.default_rng(9)
        for two_s in (1, 2, 3, 4):
            frame = tangent_frame(random_spin_state(rng, two_s))
            g = np.einsum("aij,bji->ab", frame.mats, frame.mats).real / 2
            assert np.abs(g - np.eye(2 * two_s)).max() < 1e-12
            assert len(frame.mats) == 2 * two_s

    def test_log_map_reconstruction_from_components(self):
        rng = np.random.default_rng(10)
        base = random_spin_state(rng, 3)
        frame = tangent_frame(base)
        target = random_spin_state(rng, 3)
        if fs_distance(base, target) < math.pi / 2 - 1e-3:
            v = log_map(base, target)
            comps = frame_components(v, frame)
            v_rec = np.tensordot(comps, frame.mats, axes=1)
            assert np.abs(v_rec - v).max() < 1e-10

    def test_paper_frame_matrices(self):
        alpha = 0.9
        frame = equatorial_pair_frame(alpha)
        b = math.sqrt(3 + math.cos(2 * alpha))
        h1 = frame.mats[0] + 1j * frame.mats[1]
        expect = np.zeros((3, 3), dtype=complex)
        expect[1, 0] = 2 / b * (math.cos(alpha) + 1)
        expect[1, 2] = 2 / b * (math.cos(alpha) - 1)
        assert np.abs(h1 - expect).max() < 1e-14
        g = np.einsum("aij,bji->ab", frame.mats, frame.mats).real / 2
        assert np.abs(g - np.eye(4)).max() < 1e-12


class TestLogCloud:
    def test_closed_form_agreement(self):
        alpha = math.pi / 3
        cloud = sc_log_cloud(
            equatorial_pair_state(alpha), resolution=40, frame=equatorial_pair_frame(alpha)
        )
        ok = cloud.flags == "ok"
        w, v12, v34 = closed_form_components(alpha, cloud.thetas[ok], cloud.phis[ok])
        got12 = cloud.components[ok, 0] + 1j * cloud.components[ok, 1]
        got34 = cloud.components[ok, 2] + 1j * cloud.components[ok, 3]
        assert np.abs(got12 - v12).max() < 1e-9
        assert np.abs(got34 - v34).max() < 1e-9
        assert np.abs(cloud.omegas[ok] - w).max() < 1e-9

    def test_star_antipodes_flagged(self):
        alpha = math.pi / 3
        base = equatorial_pair_state(alpha)
        stars = [direction(alpha, 0.0), direction(alpha, math.pi)]
        cloud = sc_log_cloud(base, directions=[antipode(d) for d in stars])
        assert list(cloud.flags) == ["cutlocus", "cutlocus"]
        assert np.isnan(cloud.components).all()

    def test_norm_equals_omega(self):
        rng = np.random.default_rng(11)
        cloud = sc_log_cloud(random_spin_state(rng, 3), resolution=24)
        ok = cloud.flags == "ok"
        norms = np.sqrt((cloud.components[ok] ** 2).sum(axis=1))
        assert np.abs(norms - cloud.omegas[ok]).max() < 1e-10

    def test_rephasing_invariance(self):
        rng = np.random.default_rng(12)
        base = random_spin_state(rng, 2)
        c1 = sc_log_cloud(base, resolution=16)
        c2 = sc_log_cloud(rephased(base, 0.7), resolution=16)
        ok = c1.flags == "ok"
        assert np.allclose(c1.components[ok], c2.components[ok], atol=1e-12)

    def test_full_rank_spread(self):
        # the cloud explores all 4s tangent directions
        rng = np.random.default_rng(13)
        for _ in range(3):
            base = random_spin_state(rng, 3)
            cloud = sc_log_cloud(base, resolution=24)
            rows = cloud.components[cloud.flags == "ok"]
            centered = rows - rows.mean(axis=0)
            sv = np.linalg.svd(centered, compute_uv=False)
            assert sv[-1] > 1e-6 * sv[0]


class TestDirectionCloud:
    def test_unit_norms(self):
        cloud = direction_cloud(equatorial_pair_state(math.pi / 3), resolution=20)
        ok = cloud.flags == "ok"
        norms = np.sqrt((cloud.components[ok] ** 2).sum(axis=1))
        assert np.abs(norms - 1).max() < 1e-10

    def test_circles_disjoint_and_closed(self):
        cloud = direction_cloud(equatorial_pair_state(math.pi / 3), resolution=12)
        assert len(cloud.circle_components) == 2
        c0, c1 = cloud.circle_components
        assert np.abs(c0[0] - c0[-1]).max() < 1e-12  # eta = 0 and 2 pi coincide
        gap = min(
            np.linalg.norm(p - q) for p in c0[:64] for q in c1[:64]
        )
        assert gap > 0.1

    def test_projection_consistent_with_log_cloud(self):
        base = equatorial_pair_state(math.pi / 3)
        frame = equatorial_pair_frame(math.pi / 3)
        lc = sc_log_cloud(base, resolution=16, frame=frame)
        dc = direction_cloud(base, resolution=16, frame=frame)
        ok = lc.flags == "ok"
        unit = lc.components[ok] / lc.omegas[ok, None]
        assert np.abs(unit - dc.components[ok]).max() < 1e-10


class TestAngles:
    def test_same_target_zero_angle(self):
        rng = np.random.default_rng(14)
        base, a = random_spin_state(rng, 2), random_spin_state(rng, 2)
        assert tangent_angle(base, a, a) < 1e-6

    def test_real_triple_reduces_to_spherical_cosine_rule(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            vecs = [np.abs(rng.standard_normal(4)) + 0.1 for _ in range(3)]
            base, a, b = (spin_state(v) for v in vecs)
            assert abs(bargmann_phase(a, b, base)) < 1e-12
            th = tangent_angle(base, a, b)
            w_a, w_b, w_ab = (
                fs_distance(base, a),
                fs_distance(base, b),
                fs_distance(a, b),
            )
            lhs = math.cos(w_ab)
            rhs = math.cos(w_a) * math.cos(w_b) + math.sin(w_a) * math.sin(w_b) * math.cos(th)
            assert abs(lhs - rhs) < 1e-12

    def test_matches_log_vector_inner_product(self):
        rng = np.random.default_rng(16)
        count = 0
        while count < 50:
            base, a, b = (random_spin_state(rng, 2) for _ in range(3))
            try:
                th = tangent_angle(base, a, b)
            except (DegenerateTriangle, UndefinedPhase):
                continue
            va, vb = log_map(base, a), log_map(base, b)
            cos_direct = np.trace(va @ vb).real / 2 / (fs_norm(va) * fs_norm(vb))
            assert abs(math.cos(th) - cos_direct) < 1e-9
            count += 1

    def test_degenerate_triangle_raises(self):
        rng = np.random.default_rng(17)
        base = random_spin_state(rng, 2)
        with pytest.raises(DegenerateTriangle):
            tangent_angle(base, base, random_spin_state(rng, 2))


class TestBargmann:
    def test_repeated_state_gives_zero(self):
        rng = np.random.default_rng(18)
        a, c = random_spin_state(rng, 3), random_spin_state(rng, 3)
        assert abs(bargmann_phase(a, a, c)) < 1e-14

    def test_rephasing_invariance(self):
        rng = np.random.default_rng(19)
        a, b, c = (random_spin_state(rng, 2) for _ in range(3))
        om1 = bargmann_phase(a, b, c)
        om2 = bargmann_phase(rephased(a, 0.3), rephased(b, 1.1), rephased(c, -2.0))
        assert abs(om1 - om2) < 1e-12

    def test_orthogonal_pair_rejected(self):
        a = spin_state([1, 0, 0])
        b = spin_state([0, 0, 1])
        with pytest.raises(UndefinedPhase):
            bargmann_phase(a, b, spin_state([0, 1, 0]))

    def test_real_embedding_angle_identity(self):
        # cos s = Re<a|b> = cos(omega) cos(eta) on the unit sphere of the
        # realified Hilbert space
        rng = np.random.default_rng(20)
        for _ in range(20):
            a, b = random_spin_state(rng, 3), random_spin_state(rng, 3)
            z = overlap(a, b)
            w, eta = math.acos(min(1, abs(z))), math.atan2(z.imag, z.real)
            assert z.real == pytest.approx(math.cos(w) * math.cos(eta), abs=1e-12)
