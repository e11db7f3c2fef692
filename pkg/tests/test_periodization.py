import numpy as np
import pytest
from hypothesis import given, strategies as st

from goodlattice.lattice import GeneratingVector, generate_points
from goodlattice.periodization import (
    AxisTransform,
    TransformChain,
    circle_embed,
    dirichlet_mask,
    ic_blend,
    polynomial_transform,
    time_fold,
)


class TestTimeFold:
    def test_endpoints_bitwise(self):
        assert time_fold(0.0) == 0.0
        assert time_fold(0.5) == 1.0
        assert time_fold(1.0) == 0.0

    def test_fold_symmetry(self):
        assert time_fold(0.25) == 0.5
        assert time_fold(0.75) == 0.5

    @given(st.floats(0, 0.5))
    def test_mirror(self, t):
        # up to the rounding of 1 - t itself
        assert time_fold(t) == pytest.approx(time_fold(1.0 - t), abs=1e-15)

    def test_uniform_grid_covers_twice(self):
        ts = np.arange(10) / 10
        folded = time_fold(ts)
        values, counts = np.unique(np.round(folded, 12), return_counts=True)
        interior = values[(values > 0) & (values < 1)]
        assert np.all(counts[(values > 0) & (values < 1)] == 2)
        assert interior.size > 0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            time_fold(1.2)
        with pytest.raises(ValueError):
            time_fold(-0.1)


class TestCircleEmbed:
    def test_cardinal_points(self):
        assert circle_embed(0.0) == (1.0, 0.0)
        c, s = circle_embed(0.25)
        assert abs(c) <= 1e-12 and s == pytest.approx(1.0, abs=1e-12)
        c, s = circle_embed(0.5)
        assert c == pytest.approx(-1.0, abs=1e-12) and abs(s) <= 1e-12

    def test_periodic_bitwise(self):
        assert circle_embed(1.0) == circle_embed(0.0)

    @given(st.floats(-5, 5))
    def test_unit_circle(self, x):
        c, s = circle_embed(x)
        assert c * c + s * s == pytest.approx(1.0, abs=1e-12)


class TestIcBlend:
    def test_exact_at_time_zero(self):
        u0 = np.array([1.25, -3.5])
        net = np.array([9.0, 9.0])
        assert np.array_equal(ic_blend(0.0, u0, net), u0)

    def test_unit_time_value(self):
        assert ic_blend(1.0, np.array([1.0]), np.array([0.0]))[0] == pytest.approx(
            np.exp(-1.0), rel=1e-15)

    @given(st.floats(5, 60), st.floats(-10, 10), st.floats(-10, 10))
    def test_large_time_limit(self, t, u0, net):
        out = ic_blend(t, np.array([u0]), np.array([net]))[0]
        assert abs(out - net) <= np.exp(-t) * abs(u0 - net) + 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            ic_blend(-1.0, np.zeros(2), np.zeros(2))
        with pytest.raises(ValueError):
            ic_blend(0.5, np.zeros(2), np.zeros(3))


class TestDirichletMask:
    def test_boundary_zero_bitwise(self):
        assert dirichlet_mask(np.array([0.0, 0.7])) == 0.0
        assert dirichlet_mask(np.array([0.3, 1.0])) == 0.0

    def test_center_values(self):
        assert dirichlet_mask(np.array([0.5, 0.5])) == pytest.approx(1 / 16, abs=1e-17)
        assert dirichlet_mask(np.array([0.5])) == 0.25

    def test_axis_subset(self):
        x = np.array([0.0, 0.5])
        assert dirichlet_mask(x, masked_axes=[1]) == 0.25
        assert dirichlet_mask(x, masked_axes=[0]) == 0.0

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=4))
    def test_max_bound(self, coords):
        x = np.array(coords)
        assert 0.0 <= dirichlet_mask(x) <= 0.25 ** len(coords)

    def test_validation(self):
        with pytest.raises(ValueError):
            dirichlet_mask(np.array([1.5]))
        with pytest.raises(ValueError):
            dirichlet_mask(np.array([0.5, 0.5]), masked_axes=[3])


class TestPolynomialTransform:
    def test_degree3_midpoint(self):
        y, dy = polynomial_transform(0.5, 3)
        assert (y, dy) == (0.5, 1.5)

    def test_degree5_endpoint(self):
        y, dy = polynomial_transform(0.0, 5)
        assert (y, dy) == (0.0, 0.0)
        y1, dy1 = polynomial_transform(1.0, 5)
        assert (y1, dy1) == (1.0, 0.0)

    @pytest.mark.parametrize("degree", [3, 5])
    def test_endpoint_to_endpoint(self, degree):
        y0, _ = polynomial_transform(0.0, degree)
        y1, _ = polynomial_transform(1.0, degree)
        assert (y0, y1) == (0.0, 1.0)  # hence the jacobian integrates to 1

    @pytest.mark.parametrize("degree", [3, 5])
    def test_monotone_with_vanishing_end_derivative(self, degree):
        z = np.linspace(0, 1, 1001)
        y, dy = polynomial_transform(z, degree)
        assert np.all(np.diff(y) > 0)
        assert dy[0] == 0.0 and dy[-1] == 0.0
        assert np.all(dy >= 0.0)

    def test_degree5_second_derivative_vanishes_at_ends(self):
        # d2y/dz2 = 60 z (1-z) (1-2z)
        for z in (0.0, 1.0):
            assert 60.0 * z * (1.0 - z) * (1.0 - 2.0 * z) == 0.0
        h = 1e-5
        for z0 in (0.0, 1.0):
            zs = np.clip([z0, z0 + h, z0 + 2 * h] if z0 == 0 else [z0 - 2 * h, z0 - h, z0], 0, 1)
            y, _ = polynomial_transform(np.asarray(zs), 5)
            d2 = (y[2] - 2 * y[1] + y[0]) / h**2
            assert abs(d2) < 1e-3

    def test_unsupported_degree(self):
        with pytest.raises(ValueError):
            polynomial_transform(0.5, 4)


class TestTransformChain:
    def test_parse_and_dims(self):
        chain = TransformChain.parse("fold,circle")
        assert chain.s == 2 and chain.output_dim == 3
        assert str(chain) == "fold,circle"
        chain2 = TransformChain.parse("mask,poly5,id")
        assert chain2.output_dim == 3
        assert chain2.axes[1].degree == 5

    def test_single_fold_axis_only(self):
        with pytest.raises(ValueError):
            TransformChain.parse("fold,fold")

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            TransformChain.parse("spiral")
        with pytest.raises(ValueError):
            AxisTransform(tag="fold", degree=3)

    @pytest.mark.parametrize("spec", ["fold,circle", "mask,mask", "poly3,poly5",
                                      "fold,mask", "circle,poly3"])
    def test_loss_periodicity_across_faces(self, spec):
        # a smooth non-periodic stand-in for a squared PDE residual,
        # composed with the chain; compare the 0 and 1 faces of every axis
        chain = TransformChain.parse(spec)

        def loss_shape(y):
            return np.exp(np.sum(y, axis=1)) + np.sum(y**2, axis=1)

        rng = np.random.default_rng(0)
        interior = rng.random((10**4, chain.s))
        for axis in range(chain.s):
            lo = interior.copy()
            hi = interior.copy()
            lo[:, axis] = 0.0
            hi[:, axis] = 1.0
            ylo, wlo = chain.apply(lo)
            yhi, whi = chain.apply(hi)
            vlo = wlo * loss_shape(ylo)
            vhi = whi * loss_shape(yhi)
            assert np.max(np.abs(vlo - vhi)) <= 1e-12

    def test_jacobian_weighted_quadrature_converges(self):
        # equal-weight lattice sum of f(y(z)) dy(z) approaches the plain
        # integral of f for a smooth non-periodic f
        chain = TransformChain.parse("poly3,poly3")

        def f(y):
            return np.prod(y, axis=1)

        errors = {}
        for n, z2 in ((55, 34), (233, 144), (987, 610)):
            pts = generate_points(GeneratingVector(n, (1, z2))).points
            y, w = chain.apply(pts)
            errors[n] = abs(float(np.mean(f(y) * w)) - 0.25)
        assert errors[987] < errors[55]
        assert errors[987] < 1e-4

    def test_apply_shape_validation(self):
        chain = TransformChain.parse("id,id")
        with pytest.raises(ValueError):
            chain.apply(np.zeros((5, 3)))
