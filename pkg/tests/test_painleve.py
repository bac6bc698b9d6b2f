import pytest

from painlevekit import numkit, painleve
from painlevekit.errors import DomainError, UnsupportedError

ctx = numkit.context(128)


def test_sigma1_closed_value():
    sig, d1, _ = painleve.sigma_closed(1, "minus", 1, 128)
    assert abs(sig - 1 / (ctx.e - 1)) < ctx.mpf(10) ** -35
    # derivative of s / (e^s - 1) at s = 1
    assert abs(d1 - (1 / (ctx.e - 1) - ctx.e / (ctx.e - 1) ** 2)) < ctx.mpf(10) ** -35


def test_sigma2_reference_value():
    assert abs(painleve.sigma_closed(2, "minus", 1, 128)[0] - ctx.mpf("3.06682014773393616383856807601549")) < 1e-30


def test_sigma_alpha0_vanishes():
    assert painleve.sigma_closed(0, "minus", 3) == (0, 0, 0)


@pytest.mark.parametrize("alpha,family,s", [(1, "minus", "0.3"), (2, "minus", "4"), (2, "plus", "-3j"), (2, "plus", "-0.2j")])
def test_recursion_matches_closed_form(alpha, family, s):
    s = ctx.mpmathify(s)
    a = painleve.sigma_closed(alpha, family, s, 128)
    b = painleve.sigma_recursive(alpha, family, s, 128)
    for x, y in zip(a, b):
        assert abs(x - y) < ctx.mpf(10) ** -30 * max(1, abs(x))


@pytest.mark.parametrize("alpha,s", [(1, "2"), (3, "2.5"), (4, "0.8")])
def test_sigma_form_residual_minus(alpha, s):
    sol = painleve.sigma_solution(alpha, "minus", 128)
    assert painleve.sigma_form_residual(sol, s) < ctx.mpf(10) ** -30


def test_sigma_form_residual_plus():
    sol = painleve.sigma_solution(4, "plus", 128)
    assert painleve.sigma_form_residual(sol, ctx.mpc(0, -2)) < ctx.mpf(10) ** -30


def test_ode_from_large_s_matches_closed_form():
    sol = painleve.integrate_sigma(1, "minus", 40, 1, bits=128)
    assert abs(sol(1)[0] - 1 / (ctx.e - 1)) < 1e-10
    assert sol.provenance == "ode"


def test_ode_noninteger_alpha_tends_to_alpha_squared():
    sol = painleve.integrate_sigma("1/2", "minus", 40, "0.001", bits=96)
    assert abs(sol("0.001")[0] - ctx.mpf(1) / 4) < 0.01


@pytest.mark.parametrize("alpha,s", [(1, "1.5"), (2, "0.6"), (3, "2")])
def test_frame_identities_at_zero(alpha, s):
    assert painleve.frame_identity_check(alpha, s, 128) < ctx.mpf(10) ** -30


@pytest.mark.parametrize("alpha,family,s", [(2, "minus", "2"), (1, "minus", "0.7"), (2, "plus", "-2j")])
def test_lax_residuals(alpha, family, s):
    ld = painleve.lax_data(alpha, family, 128)
    assert max(painleve.lax_residuals(ld, ctx.mpmathify(s))) < ctx.mpf(10) ** -30


def test_sigma_prime_is_minus_v():
    ld = painleve.lax_data(2, "minus", 128)
    _, v = ld.uv(2)
    assert abs(painleve.sigma_closed(2, "minus", 2, 128)[1] + v) < ctx.mpf(10) ** -30


def test_large_s_seed_is_exponentially_small_for_minus():
    y0, y1 = painleve.large_s_seed(1, "minus", 60, 128)
    assert abs(y0) < 1e-20 and abs(y1) < 1e-20


def test_errors():
    with pytest.raises(UnsupportedError):
        painleve.sigma_closed(3, "minus", 1)
    with pytest.raises(UnsupportedError):
        painleve.sigma_closed(1, "plus", ctx.mpc(0, -1))
    with pytest.raises(DomainError):
        painleve.sigma_closed(1, "minus", -1)
    with pytest.raises(DomainError):
        painleve.sigma_closed(2, "plus", 1)
    with pytest.raises(UnsupportedError):
        painleve.sigma_solution("1/2", "minus")
    with pytest.raises(UnsupportedError):
        painleve.lax_data(0)
    with pytest.raises(DomainError):
        painleve.integrate_sigma("-1/2", "minus", 10, 1)
