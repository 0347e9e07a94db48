import numpy as np
import pytest
from scipy import integrate

from tetrademag.geometry import RightTriangleParams
from tetrademag.oracle import QuadratureSpec, field_quadrature
from tetrademag.tensor_core import (
    GUARD_RTOL,
    fn_F,
    fn_G,
    fn_K,
    fn_L,
    fn_P,
    fn_Q,
    guard_z,
    local_tensor,
    n_xz_k,
    n_xz_k_explicit,
    n_xz_l,
    n_yz_k,
    n_yz_l,
    n_zz_k,
    n_zz_l,
)


def random_local(rng, n, spread=2.0):
    hkl = rng.uniform(0.1, 3.0, size=(n, 3))
    p = rng.uniform(-spread, spread, size=(n, 3)) * hkl.max(1, keepdims=True)
    return p, hkl


def local_face(h, k, l):
    return np.array([l, 0.0, 0.0]), np.array([0.0, h, 0.0]), np.array([-k, 0.0, 0.0])


# -- literal atanh forms of the kernels --------------------------------------


def F_atanh(x, y, z, yp, h, l):
    s = np.hypot(h, l)
    xp = l * (1 - yp / h)
    f_n = l * l - l * x + h * y - h * yp * (1 + (l / h) ** 2)
    f_d = s * np.sqrt((x - xp) ** 2 + (y - yp) ** 2 + z * z)
    return h / s * np.arctanh(f_n / f_d)


def K_atanh(x, y, z, xp, h, l):
    s = np.hypot(h, l)
    yp = h * (1 - xp / l)
    k_n = h * h - h * y + l * x - l * xp * (1 + (h / l) ** 2)
    k_d = s * np.sqrt((x - xp) ** 2 + (y - yp) ** 2 + z * z)
    return l / s * np.arctanh(k_n / k_d)


class TestKernels:
    def test_asinh_forms_match_atanh(self, rng):
        p, hkl = random_local(rng, 2000, spread=1.5)
        x, y, z = p.T
        h, l = hkl[:, 0], hkl[:, 2]
        for bound in (0.0, 0.3, 1.0):
            np.testing.assert_allclose(fn_F(x, y, z, bound * h, h, l), F_atanh(x, y, z, bound * h, h, l), rtol=1e-9, atol=1e-12)
            np.testing.assert_allclose(fn_K(x, y, z, bound * l, h, l), K_atanh(x, y, z, bound * l, h, l), rtol=1e-9, atol=1e-12)
        yp = rng.uniform(-1, 1, len(x))
        np.testing.assert_allclose(
            fn_G(x, y, z, yp), np.arctanh((y - yp) / np.sqrt(x**2 + (y - yp) ** 2 + z**2)), rtol=1e-9, atol=1e-12
        )
        np.testing.assert_allclose(
            fn_L(x, y, z, yp), np.arctanh((x - yp) / np.sqrt((x - yp) ** 2 + y**2 + z**2)), rtol=1e-9, atol=1e-12
        )

    def test_zero_at_coincident_bound(self):
        assert fn_G(0.4, 0.7, 0.2, 0.7) == 0.0
        assert fn_L(0.4, 0.7, 0.2, 0.4) == 0.0

    @pytest.mark.parametrize("side", [1.0, -1.0])
    def test_p_saturates_on_plane(self, side):
        z = side * 1e-300
        # p_n = -1 here, so the limit is -pi/2 above the plane and +pi/2 below
        assert fn_P(-0.5, -0.5, z, 0.0, 1.0, 1.0) == pytest.approx(-side * np.pi / 2)

    def test_f_antiderives_edge_integrand(self):
        # dF/dy' = -1/R, R the distance to the hypotenuse point at height y'
        step = 1e-5
        for x, y, z, h, l in [(0.0, 0.0, 1.0, 1.0, 1.0), (0.3, -0.2, 0.5, 0.7, 1.9)]:
            for yp in (0.2, 0.5, 0.8):
                dF = (fn_F(x, y, z, yp + step, h, l) - fn_F(x, y, z, yp - step, h, l)) / (2 * step)
                R = np.sqrt((x - l * (1 - yp / h)) ** 2 + (y - yp) ** 2 + z * z)
                assert dF == pytest.approx(-1.0 / R, rel=1e-8)
        total = integrate.quad(lambda t: 1.0 / np.sqrt((1 - t) ** 2 + t**2 + 1), 0, 1, epsabs=1e-14)[0]
        assert fn_F(0, 0, 1, 0, 1, 1) - fn_F(0, 0, 1, 1, 1, 1) == pytest.approx(total, rel=1e-12)

    def test_q_sign(self):
        assert fn_Q(1.0, 1.0, 1.0, 0.0) < 0


class TestRightTriangle:
    def test_nonpositive_params_rejected(self):
        with pytest.raises(ValueError):
            n_xz_l([0, 0, 1], 0.0, 1.0)
        with pytest.raises(ValueError):
            n_zz_k([0, 0, 1], 1.0, -1.0)

    def test_dblquad_l_triangle(self):
        h, l = 0.7, 1.3
        p = np.array([0.4, -0.2, 0.35])

        def comp(i):
            def f(yp, xp):
                d = p - np.array([xp, yp, 0.0])
                return d[i] / np.linalg.norm(d) ** 3

            val, _ = integrate.dblquad(f, 0, l, 0, lambda xp: h * (1 - xp / l), epsabs=1e-13, epsrel=1e-12)
            return val / (4 * np.pi)

        got = [n_xz_l(p, h, l), n_yz_l(p, h, l), n_zz_l(p, h, l)]
        # H = N m with the charge on the z = 0 sheet: N column = -grad of the potential integral
        np.testing.assert_allclose(got, [comp(0), comp(1), comp(2)], rtol=1e-9, atol=1e-13)

    def test_mirror_identity(self, rng):
        p, hkl = random_local(rng, 1000)
        h, k = hkl[:, 0], hkl[:, 1]
        q = p * [-1, 1, 1]
        np.testing.assert_allclose(n_xz_k(p, h, k), -n_xz_l(q, h, k), rtol=0, atol=0)
        np.testing.assert_allclose(n_yz_k(p, h, k), n_yz_l(q, h, k), rtol=0, atol=0)
        np.testing.assert_allclose(n_zz_k(p, h, k), n_zz_l(q, h, k), rtol=0, atol=0)

    def test_explicit_k_formula(self, rng):
        p, hkl = random_local(rng, 1000)
        h, k = hkl[:, 0], hkl[:, 1]
        np.testing.assert_allclose(n_xz_k_explicit(p, h, k), n_xz_k(p, h, k), rtol=1e-12, atol=1e-15)

    def test_z_parity(self, rng):
        p, hkl = random_local(rng, 1000)
        h, l = hkl[:, 0], hkl[:, 2]
        flipped = p * [1, 1, -1]
        np.testing.assert_allclose(n_xz_l(flipped, h, l), n_xz_l(p, h, l), rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(n_yz_l(flipped, h, l), n_yz_l(p, h, l), rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(n_zz_l(flipped, h, l), -n_zz_l(p, h, l), rtol=1e-12, atol=1e-15)

    def test_n_zz_l_zero_in_plane(self, rng):
        p, hkl = random_local(rng, 500)
        p[:, 2] = 0.0
        assert np.all(n_zz_l(p, hkl[:, 0], hkl[:, 2]) == 0.0)

    def test_point_source_far_field(self, rng):
        for _ in range(20):
            h, l = rng.uniform(0.2, 2.0, 2)
            u = rng.normal(size=3)
            r = 100 * max(h, l) * u / np.linalg.norm(u)
            c = np.array([l / 3, h / 3, 0.0])
            d = r - c
            # -(1/4 pi) * area * grad(1/|r - c|) = (area / 4 pi) d / |d|^3
            ref = h * l / 2 / (4 * np.pi) * d / np.linalg.norm(d) ** 3
            got = np.array([n_xz_l(r, h, l), n_yz_l(r, h, l), n_zz_l(r, h, l)])
            np.testing.assert_allclose(got, ref, rtol=0.02, atol=0.02 * np.abs(ref).max())


class TestLocalTensor:
    def test_sums_right_triangles(self, rng):
        p, hkl = random_local(rng, 2000)
        h, k, l = hkl.T
        p[:, 2] = np.where(np.abs(p[:, 2]) < 1e-3, 1e-3, p[:, 2])
        got = local_tensor(p, RightTriangleParams(h, k, l)).as_array()
        want = np.stack(
            [n_xz_l(p, h, l) + n_xz_k(p, h, k), n_yz_l(p, h, l) + n_yz_k(p, h, k), n_zz_l(p, h, l) + n_zz_k(p, h, k)],
            axis=-1,
        )
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-13)

    def test_isosceles_axis_has_no_x_component(self):
        t = local_tensor(np.array([[0.0, 0.3, 0.4], [0.0, -2.0, -1.0]]), RightTriangleParams(1.5, 0.8, 0.8))
        np.testing.assert_allclose(t.n_xz, 0.0, atol=1e-16)

    def test_scale_invariance(self, rng):
        p, hkl = random_local(rng, 2000)
        base = local_tensor(p, RightTriangleParams(*hkl.T)).as_array()
        for s in (1e-3, 7.0, 1e4):
            scaled = local_tensor(s * p, RightTriangleParams(*(s * hkl).T)).as_array()
            np.testing.assert_allclose(scaled, base, rtol=1e-12, atol=1e-14)

    def test_guard(self):
        z = guard_z(np.array([0.0, -0.0, 3e-10, -3e-10, 0.5]), 1.0)
        np.testing.assert_array_equal(z, [GUARD_RTOL, GUARD_RTOL, GUARD_RTOL, -GUARD_RTOL, 0.5])

    def test_in_plane_is_one_sided_limit(self):
        params = RightTriangleParams(1.0, 0.6, 1.2)
        on = local_tensor([0.1, 0.2, 0.0], params).as_array()
        above = local_tensor([0.1, 0.2, 1e-11], params).as_array()
        np.testing.assert_allclose(on, above, atol=1e-12)

    @pytest.mark.parametrize("xy", [(0.1, 0.2), (-0.3, 0.4), (0.5, 0.1), (1.0, 1.0), (-2.0, 0.5)])
    def test_continuity_under_guard(self, xy):
        params = RightTriangleParams(1.0, 0.7, 1.3)
        vals = [local_tensor([xy[0], xy[1], d], params).as_array() for d in (1e-5, 1e-7, 1e-8, 2e-8)]
        steps = [np.abs(a - b).max() for a, b in zip(vals, vals[1:])]
        assert steps[-1] < 1e-7
        assert steps[1] < 1e-6

    def test_sheet_jump_inside(self, rng):
        params = RightTriangleParams(1.0, 0.7, 1.3)
        for _ in range(50):
            w = rng.dirichlet([1, 1, 1])
            x, y = w @ np.array([[1.3, 0.0], [0.0, 1.0], [-0.7, 0.0]])
            up = local_tensor([x, y, 1e-9], params)
            down = local_tensor([x, y, -1e-9], params)
            # above the sheet H_z = +1/2, below -1/2 (unit charge density)
            assert up.n_zz - down.n_zz == pytest.approx(1.0, abs=1e-6)
            assert up.n_zz == pytest.approx(0.5, abs=1e-6)
            assert up.n_xz == pytest.approx(down.n_xz, abs=1e-6)

    def test_jump_vanishes_outside(self):
        params = RightTriangleParams(1.0, 0.7, 1.3)
        up = local_tensor([2.0, 1.0, 1e-9], params)
        down = local_tensor([2.0, 1.0, -1e-9], params)
        assert up.n_zz - down.n_zz == pytest.approx(0.0, abs=1e-6)


def test_quadrature_equivalence(rng):
    """Local tensor against the surface-quadrature oracle, |z| > 1e-3 * scale."""
    spec = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12)
    n = 10_000
    p, hkl = random_local(rng, n)
    scale = hkl.max(1)
    # a quarter of the points close to the sheet
    near = rng.random(n) < 0.25
    p[near, 2] = np.sign(p[near, 2]) * scale[near] * 10 ** rng.uniform(-3, -1, near.sum())
    small = np.abs(p[:, 2]) <= 1e-3 * scale
    p[small, 2] = np.where(p[small, 2] < 0, -1.01e-3, 1.01e-3) * scale[small]
    got = local_tensor(p, RightTriangleParams(*hkl.T)).as_array()
    worst = 0.0
    for i in range(n):
        q = field_quadrature(local_face(*hkl[i]), [0, 0, 1.0], p[i], spec)
        worst = max(worst, float((np.abs(got[i] - q) / np.maximum(1e-8, 1e-6 * np.abs(q))).max()))
    assert worst <= 1.0
