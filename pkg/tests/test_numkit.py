import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painlevekit import numkit
from painlevekit.errors import DomainError, QuadratureFailedError

ctx = numkit.context(256)
TOL = ctx.mpf(10) ** -70


def test_context_is_cached_and_sized():
    assert numkit.context(200) is numkit.context(200)
    assert numkit.context(200).prec == 200


def test_bits_digits_roundtrip():
    assert numkit.bits_to_digits(numkit.digits_to_bits(30)) >= 30


def test_exact_keeps_rationals():
    from fractions import Fraction

    assert numkit.exact("1/3") == Fraction(1, 3)
    assert numkit.exact(2) == 2


def test_bessel_half_integer_closed_forms():
    assert abs(numkit.bessel_j("1/2", ctx.pi / 2) - 2 / ctx.pi) < TOL
    assert abs(numkit.bessel_j("-1/2", ctx.pi) + ctx.sqrt(2) / ctx.pi) < TOL


@pytest.mark.parametrize("nu,x", [(0, "0.7"), ("2.5", "3.1"), ("1.25", "12.0"), ("0.5", "40")])
def test_bessel_matches_mpmath(nu, x):
    with mpmath.workprec(300):
        expected = mpmath.besselj(mpmath.mpf(nu) if isinstance(nu, str) else nu, mpmath.mpf(x))
    assert abs(numkit.bessel_j(nu, x) - expected) < TOL


def test_bessel_scaled_at_zero():
    # J_nu(x) / (x/2)^nu -> 1 / Gamma(nu + 1)
    assert abs(numkit.bessel_j_scaled("1.5", 0) - 1 / ctx.gamma(ctx.mpf("2.5"))) < TOL


def test_barnes_g_integers():
    assert numkit.barnes_g(1) == 1
    assert numkit.barnes_g(2) == 1
    assert numkit.barnes_g(3) == 1
    assert numkit.barnes_g(5) == 12


def test_barnes_g_half():
    with mpmath.workprec(300):
        expected = mpmath.barnesg(mpmath.mpf(3) / 2)
    assert abs(numkit.barnes_g("1.5") - expected) < TOL
    assert abs(numkit.log_barnes_g("4.25") - ctx.log(numkit.barnes_g("4.25"))) < TOL


def test_barnes_g_rejects_nonpositive():
    with pytest.raises(DomainError):
        numkit.barnes_g(0)


def test_quad_examples():
    assert abs(numkit.quad(lambda x: x, 0, 1) - ctx.mpf(1) / 2) < TOL
    assert abs(numkit.quad(lambda x: ctx.sqrt(1 - x * x), -1, 1, scheme="endpoint-singular") - ctx.pi / 2) < TOL
    assert abs(numkit.quad(lambda x: 1 / ctx.sqrt(x), 0, 1, scheme="endpoint-singular") - 2) < ctx.mpf(10) ** -60


def test_quad_infinite_range():
    assert abs(numkit.quad(lambda x: ctx.exp(-x * x), -ctx.inf, ctx.inf) - ctx.sqrt(ctx.pi)) < ctx.mpf(10) ** -60


def test_quad_reports_failure():
    with pytest.raises(QuadratureFailedError):
        numkit.quad(lambda x: ctx.sin(1 / x), 0, 1, target_digits=60, bits=256, max_degree=4)


def test_quad_unknown_scheme():
    with pytest.raises(DomainError):
        numkit.quad(lambda x: x, 0, 1, scheme="simpson")


def test_exp_series_and_inverse():
    e = numkit.exp_series(2, 6)
    assert abs(e[3] - ctx.mpf(8) / 6) < TOL
    prod = (numkit.exp_series(2, 10) * numkit.exp_series(-2, 10)).truncate(10)
    assert abs(prod[0] - 1) < TOL
    assert max(abs(prod[k]) for k in range(1, 11)) < TOL


def test_binomial_series():
    b = numkit.binomial_series("1/2", 4)
    assert abs(b[2] + ctx.mpf(1) / 8) < TOL
    sq = (b * b).truncate(4)
    assert abs(sq[1] - 1) < TOL and max(abs(sq[k]) for k in (2, 3, 4)) < TOL


def test_polyseries_reciprocal_and_sqrt():
    p = numkit.PolySeries([ctx.mpf(4), 1, 3], 8)
    r = p.reciprocal(8)
    one = (p * r).truncate(8)
    assert abs(one[0] - 1) < TOL and max(abs(one[k]) for k in range(1, 9)) < TOL
    s = p.sqrt(2, 8)
    back = (s * s).truncate(8)
    assert max(abs(back[k] - p[k]) for k in range(9)) < TOL


small = st.integers(min_value=-20, max_value=20)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=1, max_size=5), st.lists(small, min_size=1, max_size=5), st.integers(-5, 5))
def test_polyseries_product_evaluates_pointwise(a, b, z):
    pa, pb = numkit.PolySeries(a), numkit.PolySeries(b)
    assert (pa * pb)(z) == pa(z) * pb(z)
    assert (pa + pb)(z) == pa(z) + pb(z)
    assert pa.derivative()(z) == sum(k * c * z ** (k - 1) for k, c in enumerate(a) if k)


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=1, max_size=5), st.integers(-3, 3), st.integers(1, 3))
def test_polyseries_compose_affine(a, z, m):
    p = numkit.PolySeries(a)
    assert p.compose_affine(1, m)(z) == p(1 + m * z)


def test_fourier_coefficients():
    c = numkit.fourier_coefficients(lambda th: ctx.exp(ctx.cos(th)), 3, 128)
    ref = numkit.context(128)
    for k in range(-3, 4):
        assert abs(c[k] - ref.besseli(abs(k), 1)) < ref.mpf(10) ** -30


def test_chebyshev_panel_integral():
    p = numkit.ChebyshevPanel(lambda x: ctx.exp(x), 0, 1, 40, ctx)
    assert abs(p.total() - (ctx.e - 1)) < ctx.mpf(10) ** -50
    assert abs(p("0.3") - ctx.exp(ctx.mpf("0.3"))) < ctx.mpf(10) ** -50
    assert p.tail_coefficient() < ctx.mpf(10) ** -50


def test_tanh_sinh_vector():
    vals, err = numkit.tanh_sinh_vector(lambda x: [ctx.sqrt(x), ctx.log(x)], 0, 1, ctx, ctx.mpf(10) ** -60, 12)
    assert abs(vals[0] - ctx.mpf(2) / 3) < ctx.mpf(10) ** -55
    assert abs(vals[1] + 1) < ctx.mpf(10) ** -55
