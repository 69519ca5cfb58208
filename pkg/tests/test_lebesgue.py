import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mnbesov.errors import IncompatibleExponentsError, InvalidExponentError, PreconditionError, ShapeError
from mnbesov.grid import Grid, RealField
from mnbesov.lebesgue import (
    circular_convolution,
    conjugate_exponent,
    format_exponent,
    hausdorff_young_check,
    holder_product_check,
    mixed_norm,
    parse_exponent,
    young_convolution_check,
)

INF = math.inf
G = Grid((16, 8), (3.0, 5.0))
exponents = st.sampled_from([1.0, 4.0 / 3.0, 2.0, 3.0, 4.0, 7.5, INF])


def iterated_norm(a, p, h):
    """Reference mixed norm written as explicit loops, x_1 innermost."""
    def one(vals, pi, hi):
        vals = np.abs(vals)
        return vals.max() if math.isinf(pi) else (np.sum(vals**pi) * hi) ** (1 / pi)
    inner = np.array([one(a[:, j], p[0], h[0]) for j in range(a.shape[1])])
    return one(inner, p[1], h[1])


def random_field(seed, grid=G, c=1):
    return RealField(grid, np.random.default_rng(seed).standard_normal((c,) + grid.n))


def test_parse_and_format():
    assert parse_exponent("2, inf,4") == (2.0, INF, 4.0)
    assert format_exponent((2.0, INF, 4.0 / 3.0)) == "2,inf,1.33333"
    with pytest.raises(InvalidExponentError):
        parse_exponent("0.5,2")
    with pytest.raises(InvalidExponentError):
        parse_exponent("2,2", 3)


def test_zero_field_has_zero_norm():
    assert mixed_norm(RealField.zeros(G), (1.0, INF)) == 0.0


@pytest.mark.parametrize("p", [1.0, 4.0 / 3.0, 2.0, 3.0, 4.0, INF])
def test_equal_exponents_match_single_pass(p):
    f = random_field(1)
    a = np.abs(f.data[0])
    ref = a.max() if math.isinf(p) else (np.sum(a**p) * G.cell_volume) ** (1 / p)
    assert mixed_norm(f, (p, p)) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("p", [(1.0, INF), (INF, 1.0), (2.0, 4.0), (4.0, 4.0 / 3.0), (3.0, 1.0)])
def test_iterated_order_matches_loops(p):
    f = random_field(2)
    ref = iterated_norm(f.data[0], p, G.spacing)
    assert mixed_norm(f, p) == pytest.approx(ref, rel=1e-12)


def test_axis_order_matters():
    f = random_field(3)
    assert abs(mixed_norm(f, (1.0, INF)) - mixed_norm(f, (INF, 1.0))) > 1e-3


def test_gaussian_closed_form():
    g = Grid.cube(2, 256, 20.0)
    x, y = g.centered_coords()
    f = RealField(g, np.exp(-x**2 - y**2))
    assert mixed_norm(f, (1.0, INF)) == pytest.approx(math.sqrt(math.pi), abs=1e-6)


def test_vector_field_uses_pointwise_magnitude():
    f = random_field(4, c=2)
    mag = RealField(G, np.sqrt(np.sum(f.data**2, axis=0)))
    assert mixed_norm(f, (2.0, 3.0)) == pytest.approx(mixed_norm(mag, (2.0, 3.0)), rel=1e-14)


@pytest.mark.parametrize("p,expected", [((2.0, 2.0), (2.0, 2.0)), ((1.0, INF), (INF, 1.0)),
                                        ((4.0, 4.0 / 3.0), (4.0 / 3.0, 4.0))])
def test_conjugate_exponent(p, expected):
    assert conjugate_exponent(p) == pytest.approx(expected, rel=1e-15)


def test_holder_saturated_by_constants():
    f = random_field(5)
    one = RealField(G, np.ones(G.n))
    c = holder_product_check(f, one, (3.0, 2.0), (INF, INF))
    assert c.lhs == c.rhs


def test_holder_examples():
    f, g = random_field(6), random_field(7)
    c = holder_product_check(f, g, (2.0, 2.0), (2.0, 2.0))
    # discrete Cauchy-Schwarz oracle
    cs = np.sum(np.abs(f.data * g.data)) * G.cell_volume
    assert c.lhs == pytest.approx(cs, rel=1e-13)
    assert c.holds
    c4 = holder_product_check(f, f, (4.0, 4.0), (4.0, 4.0))
    assert c4.lhs == pytest.approx(mixed_norm(f * f, (2.0, 2.0)), rel=1e-13)
    assert c4.lhs <= mixed_norm(f, (4.0, 4.0)) ** 2 * (1 + 1e-12)


def test_holder_rejects_incompatible():
    f = random_field(8)
    with pytest.raises(IncompatibleExponentsError):
        holder_product_check(f, f, (1.0, 2.0), (2.0, 2.0))


def test_young_approximate_identity():
    g = random_field(9)
    delta = np.zeros(G.n)
    delta[0, 0] = 1.0 / G.cell_volume
    phi = RealField(G, delta)
    np.testing.assert_allclose(circular_convolution(phi, g).data, g.data, atol=1e-12)
    c = young_convolution_check(phi, g, (2.0, INF))
    assert c.lhs == pytest.approx(c.rhs, rel=1e-12)


def test_young_equality_for_nonnegative_l1():
    rng = np.random.default_rng(10)
    phi = RealField(G, rng.random(G.n))
    g = RealField(G, rng.random(G.n))
    c = young_convolution_check(phi, g, (1.0, 1.0))
    assert c.lhs == pytest.approx(c.rhs, rel=1e-12)


def test_young_signed_mixed():
    c = young_convolution_check(random_field(11), random_field(12), (2.0, INF))
    assert c.holds and c.lhs < c.rhs


def test_young_grid_mismatch():
    with pytest.raises(ShapeError):
        young_convolution_check(random_field(1), random_field(2, grid=Grid.cube(2, 8)), (2.0, 2.0))


def test_hausdorff_young_examples():
    f = random_field(13)
    c = hausdorff_young_check(f, (2.0, 2.0))
    assert c.lhs == pytest.approx(c.rhs, rel=1e-12)
    c1 = hausdorff_young_check(f, (1.0, 1.0))
    assert c1.holds
    # sup |f^| <= (2 pi)^{-d/2} ||f||_1 on this normalization
    assert c1.lhs <= c1.rhs * (2 * math.pi) ** -1 * (1 + 1e-12)
    assert hausdorff_young_check(f, (2.0, 1.0)).holds
    with pytest.raises(PreconditionError):
        hausdorff_young_check(f, (1.0, 2.0))
    with pytest.raises(PreconditionError):
        hausdorff_young_check(f, (3.0, 2.0))


@given(st.integers(0, 2**31), st.floats(-1e3, 1e3), exponents, exponents)
def test_homogeneity(seed, alpha, p1, p2):
    f = random_field(seed)
    lhs = mixed_norm(alpha * f, (p1, p2))
    assert lhs == pytest.approx(abs(alpha) * mixed_norm(f, (p1, p2)), rel=1e-13, abs=1e-300)


@given(st.integers(0, 2**31), exponents, exponents)
def test_triangle_inequality(seed, p1, p2):
    f, g = random_field(seed), random_field(seed + 1)
    assert mixed_norm(f + g, (p1, p2)) <= (mixed_norm(f, (p1, p2)) + mixed_norm(g, (p1, p2))) * (1 + 1e-12)


@given(st.integers(0, 2**31), exponents, exponents, exponents, exponents)
def test_holder_never_violated(seed, a1, a2, b1, b2):
    if 1 / a1 + 1 / b1 > 1 or 1 / a2 + 1 / b2 > 1:
        return
    assert holder_product_check(random_field(seed), random_field(seed + 7), (a1, a2), (b1, b2)).holds
