from fractions import Fraction

import pytest

from painlevekit import asymptotics, equilibrium, numkit, oracle, painleve
from painlevekit.errors import DomainError, UnsupportedError

ctx = numkit.context(128)
TOL = ctx.mpf(10) ** -30
G = equilibrium.PotentialSpec.gaussian()


@pytest.mark.parametrize("alpha,s", [(1, "0.5"), (1, "6"), (2, "3.5"), (2, "-2.5j")])
def test_sigma_integral_closed_vs_quadrature(alpha, s):
    s = ctx.mpmathify(s)
    family = "minus" if ctx.im(s) == 0 else "plus"
    sol = painleve.sigma_solution(alpha, family, 128, provenance="recursion")
    assert abs(asymptotics.sigma_integral(sol, s) - asymptotics.sigma_integral_closed(alpha, s, 128)) < ctx.mpf(10) ** -25


def test_sigma_integral_small_s_limit():
    # sigma_1(x) - 1 ~ -x/2 near 0
    assert abs(asymptotics.sigma_integral_closed(1, "1e-8", 128) + ctx.mpf("0.5e-8")) < 1e-16


def test_emerging_alpha1_finite_n_correction():
    n, t = 8, ctx.mpf("0.1")
    gap = asymptotics.toeplitz_expansion(1, "emerging", {}, n, t, 128) - oracle.toeplitz_det(1, {}, t, n, bits=128)
    # the Toeplitz determinant is sinh((n+1)t)/sinh(t) exactly
    assert abs(gap - (t - ctx.log(ctx.sinh((n + 1) * t) / ctx.sinh(n * t)))) < TOL


def test_emerging_alpha2_with_potential_is_close():
    Vk = {1: "0.1", -1: "0.1"}
    gap = asymptotics.toeplitz_expansion(2, "emerging", Vk, 40, "0.1", 128) - oracle.toeplitz_det(2, Vk, "0.1", 40, bits=128)
    assert abs(gap) < 0.01


def test_toeplitz_expansion_alpha0_is_szego():
    val = asymptotics.toeplitz_expansion(0, "merging", {0: "0.3", 1: "0.1", -1: "0.1"}, 24, "0.2", 128)
    assert abs(val - (24 * ctx.mpf("0.3") + ctx.mpf("0.01"))) < TOL


def test_toeplitz_expansion_errors():
    with pytest.raises(UnsupportedError):
        asymptotics.toeplitz_expansion(1, "merging", {}, 10, "0.1")
    with pytest.raises(DomainError):
        asymptotics.toeplitz_expansion(1, "emerging", {}, 10, 0)
    with pytest.raises(DomainError):
        asymptotics.toeplitz_expansion(1, "sideways", {}, 10, "0.1")


def test_krasovsky():
    assert asymptotics.log_krasovsky_F(10, [("0.3", 0)], 128) == 0
    one = asymptotics.log_krasovsky_F(10, [("0.3", "1/2")], 128)
    two = asymptotics.log_krasovsky_F(10, [("0.3", "1/2"), ("-0.4", "1/2")], 128)
    other = asymptotics.log_krasovsky_F(10, [("-0.4", "1/2")], 128)
    # pair factor |2 (u1 - u2)|^(-2 a1 a2)
    assert abs(two - one - other + ctx.log(2 * ctx.mpf("0.7")) / 2) < TOL
    with pytest.raises(DomainError):
        asymptotics.log_krasovsky_F(10, [("0.3", 1), ("0.3", 1)])
    with pytest.raises(DomainError):
        asymptotics.log_krasovsky_F(10, [("1.2", 1)])


def test_connection_constant_values():
    assert abs(asymptotics.connection_constant(2, 128) - ctx.log(12)) < TOL
    assert asymptotics.connection_constant(0, 128) == 0


def test_connection_lhs_approaches_constant():
    L = asymptotics.connection_constant(2, 96)
    g1 = abs(asymptotics.connection_lhs(2, 30, bits=96) - L)
    g2 = abs(asymptotics.connection_lhs(2, 120, bits=96) - L)
    assert g1 < 0.01 and g2 < g1 / 2


def test_c3_routes_agree():
    a = asymptotics.c3_integrand(2, "1.3", "closed", 96)
    b = asymptotics.c3_integrand(2, "1.3", "recursion", 96)
    assert abs(a - b) < ctx.mpf(10) ** -20
    assert asymptotics.c3_integrand(2, 0) == 1


def test_c3_v_integral_needs_large_alpha():
    with pytest.raises(DomainError):
        asymptotics.c3_v_integral(1)


def test_c2_closed_integral():
    th = ctx.mpf(1) / 2
    r = asymptotics.corollary_constants(ctx.sqrt(2), th, bits=64)
    c = numkit.context(64)
    pref = 2 * c.exp(4 * numkit.log_barnes_g(1 + 1 / c.sqrt(2), 64) - 2 * numkit.log_barnes_g(1 + c.sqrt(2), 64))
    assert abs(r.C2 - pref * (th * c.sqrt(1 - th * th) + c.asin(th))) < 1e-15
    assert r.C1 is None and r.C3 is None


def test_c1_reflection_symmetry():
    r1 = asymptotics.corollary_constants(1, "1/2", rho=lambda u: 1 + u, bits=64)
    r2 = asymptotics.corollary_constants(1, "1/2", rho=lambda u: 1 - u, bits=64)
    assert abs(r1.C1 - r2.C1) < 1e-12 and r1.C1 > 0


def test_predict_trivial_cases():
    assert asymptotics.predict_delta_logZ(0, G, 10, "1/100").predicted_value == 0
    assert asymptotics.predict_delta_logZ(1, G, 10, 0).predicted_value == 0


def test_predict_report():
    rep = asymptotics.predict_delta_logZ(1, G, 20, Fraction(-1, 6400), bits=128)
    assert rep.closed_form_gap == 0
    js = rep.to_json(10)
    assert set(js) >= {"predicted_value", "components", "error_budget", "scaling"}


def test_predict_errors():
    with pytest.raises(DomainError):
        asymptotics.predict_delta_logZ("-1/2", G, 10, "-1/100")
    with pytest.raises(UnsupportedError):
        asymptotics.predict_delta_logZ("-1/4", G, 10, "1/100")
