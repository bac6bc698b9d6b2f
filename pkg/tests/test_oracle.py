from fractions import Fraction

import mpmath
import pytest

from painlevekit import equilibrium, kernels, numkit, oracle
from painlevekit.errors import DomainError

G = equilibrium.PotentialSpec.gaussian()

# reference values from mpmath.quad moments and mpmath.det at 60 digits
LOGZ_HALF_ALPHA = "-8.869089159479615096418668051252274368401"  # V=2x^2, alpha=1/2, t=1/10, n=3
LOGZ_QUARTIC = "-0.5440024122753255845647270016141178496366"  # V=x^4/4+x^2/2, alpha=1, t=-1/5, n=2


def test_gaussian_m0():
    ctx = numkit.context(256)
    for n in (1, 3, 10):
        m = oracle.moments(oracle.WeightSpec(G, 0, 0, n), 2)
        assert abs(m[0] - ctx.sqrt(ctx.pi / (2 * n))) < ctx.mpf(10) ** -70


def test_odd_moments_are_exact_zero():
    m = oracle.moments(oracle.WeightSpec(G, Fraction(1, 2), Fraction(1, 10), 3), 5, bits=128)
    assert m[1] == 0 and m[3] == 0 and m[5] == 0


def test_alpha2_t0_shifts_gaussian_moments():
    ctx = numkit.context(256)
    m = oracle.moments(oracle.WeightSpec(G, 2, 0, 4), 6)
    mu = oracle.moments(oracle.WeightSpec(G, 0, 0, 4), 10)
    for k in range(7):
        assert abs(m[k] - mu[k + 4]) < ctx.mpf(10) ** -70


@pytest.mark.parametrize("alpha,t", [(2, Fraction(1, 10)), (1, Fraction(-1, 10)), (2, 0)])
def test_quadrature_route_matches_exact_route(alpha, t):
    ctx = numkit.context(256)
    w = oracle.WeightSpec(G, alpha, t, 4)
    ex = oracle._moments_exact(w, 8, ctx)
    qd = oracle._moments_quadrature(w, 8, ctx)
    assert max(abs(a - b) for a, b in zip(ex, qd)) < ctx.mpf(10) ** -60


def test_log_partition_small_sizes():
    ctx = numkit.context(256)
    w = oracle.WeightSpec(G, 1, Fraction(-1, 20), 5)
    m = oracle.moments(w, 4)
    z1, _ = oracle.log_partition(w, 1, bits=256)
    z2, _ = oracle.log_partition(w, 2, bits=256)
    assert abs(z1 - ctx.log(m[0])) < ctx.mpf(10) ** -70
    assert abs(z2 - (ctx.log(2) + ctx.log(m[0] * m[2] - m[1] ** 2))) < ctx.mpf(10) ** -70


def test_log_partition_frozen_quadrature_values():
    z, _ = oracle.log_partition(oracle.WeightSpec(G, Fraction(1, 2), Fraction(1, 10), 3), target_digits=30)
    assert abs(z - numkit.context(256).mpf(LOGZ_HALF_ALPHA)) < 1e-35
    quartic = equilibrium.PotentialSpec.parse("0,0,1/2,0,1/4")
    z, _ = oracle.log_partition(oracle.WeightSpec(quartic, 1, Fraction(-1, 5), 2), target_digits=30)
    assert abs(z - numkit.context(256).mpf(LOGZ_QUARTIC)) < 1e-35


def test_alpha0_is_bitwise_t_independent():
    vals = [oracle.log_partition(oracle.WeightSpec(G, 0, t, 6))[0] for t in (Fraction(-1, 100), 0, Fraction(1, 100))]
    assert vals[0] == vals[1] == vals[2]
    assert len({repr(v) for v in vals}) == 1


def test_escalation_agrees_across_precisions():
    w = oracle.WeightSpec(G, 2, Fraction(1, 200), 10)
    lo, _ = oracle.log_partition(w, bits=800)
    hi, _ = oracle.log_partition(w, bits=1200)
    assert abs(lo - hi) < 1e-100


def test_weight_spec_rejects_nonintegrable_alpha():
    with pytest.raises(DomainError):
        oracle.WeightSpec(G, Fraction(-1, 2), 0, 3)


@pytest.fixture(scope="module")
def system():
    return oracle.build_moment_system(oracle.WeightSpec(G, 2, Fraction(1, 50), 6))


def test_kappa_two_routes(system):
    assert system.kappa_crosscheck() < 1e-80


def test_cd_kernel_symmetric_and_matches_sum(system):
    k1 = oracle.cd_kernel(system, "0.3", "0.5")
    assert abs(k1 - oracle.cd_kernel(system, "0.5", "0.3")) < 1e-80
    assert abs(k1 - oracle.cd_kernel_sum(system, "0.3", "0.5")) < 1e-80
    assert abs(oracle.cd_kernel(system, "0.3", "0.3") - oracle.cd_kernel_sum(system, "0.3", "0.3")) < 1e-80


def test_cd_kernel_diagonal_nonnegative(system):
    for j in range(-12, 13):
        assert oracle.cd_kernel(system, mpmath.mpf(j) / 10, mpmath.mpf(j) / 10) >= 0


def test_trace_and_reproducing_property():
    sys = oracle.build_moment_system(oracle.WeightSpec(G, 2, Fraction(1, 50), 4), bits=256)
    ctx = sys.ctx
    r = ctx.sqrt(ctx.mpf(1) / 50)
    cuts = [-6, -r, 0, r, 6]
    tr = numkit.quad(lambda x: oracle.cd_kernel(sys, x, x), cuts, bits=256)
    assert abs(tr - 4) < 1e-40
    x, y = ctx.mpf("0.2"), ctx.mpf("-0.4")
    rep = numkit.quad(lambda z: oracle.cd_kernel(sys, x, z) * oracle.cd_kernel(sys, z, y), cuts, bits=256)
    assert abs(rep - oracle.cd_kernel(sys, x, y)) < 1e-40


def test_scaled_kernel_alpha0_near_sine():
    meas = equilibrium.solve_one_cut(G, 128)
    sk = oracle.scaled_kernel_system(oracle.WeightSpec(G, 0, 0, 24), meas=meas)
    assert abs(sk("0.3", "0.7") - kernels.sine_kernel("0.3", "0.7", 64)) < 0.05
    assert abs(sk("0.4", "0.4") - oracle.scaled_kernel(sk.system, "0.4", "0.4", meas.psi0)) == 0


def test_toeplitz_identity_symbol():
    assert abs(oracle.toeplitz_det(0, {}, 0, 6)) < 1e-30


def test_toeplitz_emerging_alpha1_exact():
    ctx = numkit.context(128)
    t = ctx.mpf("0.2")
    d = oracle.toeplitz_det(1, {}, "0.2", 12)
    assert abs(d - ctx.log(ctx.sinh(13 * t) / ctx.sinh(t))) < 1e-30


def test_toeplitz_strong_szego():
    ctx = numkit.context(128)
    d = oracle.toeplitz_det(0, {1: "0.1", -1: "0.1", 0: "0.3"}, 0, 24)
    assert abs(d - (24 * ctx.mpf("0.3") + ctx.mpf("0.01"))) < 1e-25


def test_toeplitz_merging_split_route_matches_trapezoid_for_even_alpha():
    ctx = numkit.context(128)
    f = oracle.toeplitz_symbol(2, {}, "0.4", "merging", ctx)
    split = oracle._fourier_split(f, 4, ctx.mpf("0.4"), ctx)
    trap = numkit.fourier_coefficients(f, 4, 128)
    assert max(abs(split[k] - trap[k]) for k in range(-4, 5)) < 1e-25


def test_toeplitz_rejects_bad_t():
    with pytest.raises(DomainError):
        oracle.toeplitz_det(1, {}, 0, 4)
