import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomva.errors import AliasingError, PoleError, RegionError, WindowViolation
from geomva.laurent import (
    AnnulusRegion,
    MultiLaurent,
    PoleClearingPoly,
    eval_at,
    expand_inverse_g,
    filtration_weight,
    laurent_coefficients,
    mul,
    poly_mul,
)
from geomva.models import fock_basis

basis = fock_basis()
VAC = basis.vector(())


def series2(max_terms=4):
    exps = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
    coeffs = st.integers(-4, 4).map(Fraction)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: MultiLaurent(2, d))


def test_poly_mul_by_one_is_identity():
    s = MultiLaurent(2, {(1, -2): 3, (0, 0): VAC})
    assert poly_mul(s, PoleClearingPoly(2, {(0, 1): 0})) == s


def test_poly_mul_distributes_over_difference():
    s = MultiLaurent(2, {(0, 0): 2, (-1, 1): -1})
    p = PoleClearingPoly(2, {(0, 1): 1})
    # (2 - x1^-1 x2)(x1 - x2) = 2x1 - 2x2 - x2 + x1^-1 x2^2
    assert poly_mul(s, p).terms == {(1, 0): 2, (0, 1): -3, (-1, 2): 1}


def test_poly_mul_window_overflow_names_exponent():
    s = MultiLaurent(2, {(2, 0): 1})
    with pytest.raises(WindowViolation, match=r"\(3, 0\)"):
        poly_mul(s, PoleClearingPoly(2, {(0, 1): 1}), window=[(0, 2), (0, 2)])


def test_two_point_degree_zero_part_is_cleared(G_fb, b):
    g, P = G_fb.polynomial([b, b], 0)
    assert g.orders == {(0, 1): 2}
    assert P.terms == {(0, 0): VAC}


def test_inverse_of_difference_both_regions():
    p = PoleClearingPoly(2, {(0, 1): 1})
    order = 5
    outer = expand_inverse_g(p, AnnulusRegion.standard(2), order)
    assert outer.terms == {(-n - 1, n): 1 for n in range(order + 1)}
    inner = expand_inverse_g(p, AnnulusRegion((1, 0)), order)
    assert inner.terms == {(n, -n - 1): -1 for n in range(order + 1)}


@pytest.mark.parametrize("order", [0, 1, 3, 6])
def test_inverse_times_g_is_one_up_to_truncation(order):
    g = PoleClearingPoly(3, {(0, 1): 1, (0, 2): 1, (1, 2): 1})
    region = AnnulusRegion.standard(3)
    prod = mul(expand_inverse_g(g, region, order), g.as_series())
    assert prod[(0, 0, 0)] == 1
    for alpha in prod.terms:
        if alpha != (0, 0, 0):
            assert filtration_weight(alpha, region) > order


def test_region_locality_shadow():
    # the two expansions of (x1-x2)^-N differ by a series killed by (x1-x2)^N
    for N in (1, 2, 3):
        p = PoleClearingPoly(2, {(0, 1): N})
        order = 12
        d = expand_inverse_g(p, AnnulusRegion.standard(2), order) - expand_inverse_g(p, AnnulusRegion((1, 0)), order)
        killed = poly_mul(d, p)
        # only truncation debris survives, at exponents with |alpha| beyond the order
        assert all(max(abs(a) for a in alpha) > order - N for alpha in killed.terms)


def test_bad_regions():
    with pytest.raises(RegionError):
        AnnulusRegion((0, 0))
    with pytest.raises(RegionError):
        AnnulusRegion((0, 1), radii=[(1, 2), (1.5, 3)])
    with pytest.raises(RegionError):
        expand_inverse_g(PoleClearingPoly(2, {(0, 1): 1}), AnnulusRegion.standard(3), 2)


def test_eval_at_examples(G_fb, b):
    v = basis.vector((2, 1), 3)
    const = MultiLaurent.constant(v, 2)
    assert eval_at(const, (5, Fraction(1, 3))).to_vector() == v
    s = MultiLaurent(1, {(-2,): VAC})
    assert eval_at(s, (2,)).to_vector() == VAC * Fraction(1, 4)
    with pytest.raises(PoleError):
        eval_at(s, (0,))
    g, P = G_fb.polynomial([b, b], 0)
    for z in [(2, 1), (1j, -3), (0.5 + 2j, 0)]:
        assert complex(eval_at(P, z).component(0).coeffs[()]) == 1


def test_laurent_coefficient_examples(G_fb, b):
    c = laurent_coefficients(lambda z: z * z, range(-4, 5))
    for k, v in c.items():
        assert abs(v - (1 if k == 2 else 0)) < 1e-12
    assert abs(laurent_coefficients(lambda z: 1 / z, [-1], nodes=16)[-1] - 1) < 1e-12

    def h(z):
        return G_fb.dense_values([b, b], [(z, 0)], 0)[0]

    c = laurent_coefficients(h, range(-4, 3), radius=1.0, nodes=16)
    assert abs(c[-2][0] - 1) < 1e-12
    assert all(abs(c[k][0]) < 1e-12 for k in c if k != -2)


def test_aliasing_is_reported():
    with pytest.raises(AliasingError):
        laurent_coefficients(lambda z: z, [5], nodes=6)
    with pytest.raises(AliasingError):
        laurent_coefficients(lambda z: z ** 9, [0], nodes=5, support=(0, 9))


@given(series2(), series2(), series2(), st.integers(-3, 3))
@settings(max_examples=60)
def test_mul_bilinear_associative(s, t, u, c):
    assert mul(s + t, u) == mul(s, u) + mul(t, u)
    assert mul(s.scale(c), u) == mul(s, u).scale(c)
    assert mul(mul(s, t), u) == mul(s, mul(t, u))
    assert mul(s, t) == mul(t, s)


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_inverse_expansion_matches_reciprocal(n01, n02, n12):
    g = PoleClearingPoly(3, {(0, 1): n01, (0, 2): n02, (1, 2): n12})
    z = (2.0 * cmath.exp(0.3j), 0.4 * cmath.exp(1.1j), 0.07 * cmath.exp(-2j))
    inv = expand_inverse_g(g, AnnulusRegion.standard(3), 30)
    approx = eval_at(inv, z)
    exact = 1 / complex(g(z))
    assert abs(approx - exact) <= 1e-9 * abs(exact)


def test_trapezoid_exact_on_laurent_polynomials():
    rng = np.random.default_rng(3)
    coeffs = {k: complex(*rng.normal(size=2)) for k in range(-3, 4)}
    c = laurent_coefficients(lambda z: sum(v * z ** k for k, v in coeffs.items()), range(-3, 4), radius=0.7)
    assert max(abs(c[k] - coeffs[k]) for k in coeffs) < 1e-12
