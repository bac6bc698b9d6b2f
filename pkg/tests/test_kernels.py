import pytest

from painlevekit import kernels, numkit
from painlevekit.errors import DomainError, UnsupportedError

ctx = numkit.context(128)
TOL = ctx.mpf(10) ** -30


def test_sine_kernel_values():
    assert abs(kernels.sine_kernel("0.5", 0, 128) - 2 / ctx.pi) < TOL
    assert kernels.sine_kernel("0.3", "0.3") == 1


def test_bessel_alpha0_is_sine():
    assert abs(kernels.bessel_kernel(0, "0.3", "0.8", 128) - kernels.sine_kernel("0.3", "0.8", 128)) < TOL


@pytest.mark.parametrize("tau", [-4, 4])
def test_pv_alpha0_is_sine(tau):
    assert abs(kernels.pv_kernel(0, tau, "0.3", "0.8", 128) - kernels.sine_kernel("0.3", "0.8", 128)) < TOL


def test_phi_pair_alpha0():
    # Phi for alpha = 0 is e^{iu - s/4} with s = sqrt(-tau)
    p1, _ = kernels.phi_pair(0, -4, "0.7", 128)
    assert abs(p1 - ctx.exp(ctx.mpc(0, "0.7") - ctx.mpf(2) / 4)) < TOL


@pytest.mark.parametrize("alpha,tau", [(1, -2), (2, -3), (2, 3)])
def test_pv_kernel_symmetric(alpha, tau):
    k1 = kernels.pv_kernel(alpha, tau, "0.4", "-0.9", 128)
    k2 = kernels.pv_kernel(alpha, tau, "-0.9", "0.4", 128)
    assert abs(k1 - k2) < TOL


def test_pv_kernel_diagonal_is_continuous():
    on = kernels.pv_kernel(1, -2, "0.4", "0.4", 128)
    near = kernels.pv_kernel(1, -2, "0.4", ctx.mpf("0.4") + ctx.mpf(10) ** -25, 128)
    assert abs(on - near) < ctx.mpf(10) ** -20


def test_bessel_diagonal_is_continuous():
    on = kernels.bessel_kernel("1.5", "0.7", "0.7", 128)
    near = kernels.bessel_kernel("1.5", "0.7", ctx.mpf("0.7") + ctx.mpf(10) ** -25, 128)
    assert abs(on - near) < ctx.mpf(10) ** -20


def test_bessel_opposite_signs_use_abs_product():
    a = kernels.bessel_kernel("1/2", "-0.6", "1", 128)
    b = kernels.bessel_kernel("1/2", "0.6", "-1", 128)
    assert abs(a - b) < TOL
    assert ctx.im(ctx.convert(a)) == 0


def test_pv_small_tau_approaches_bessel():
    pv = kernels.pv_kernel(1, "-1e-6", "-0.6", "1", 128)
    assert abs(pv - kernels.bessel_kernel(1, "-0.6", "1", 128)) < 1e-7


def test_singular_points_for_positive_tau():
    pp = kernels.PhiPair.create(2, 100, 64)
    assert [float(x) for x in pp.singular_points()] == [-2.5, 2.5]
    assert kernels.PhiPair.create(2, -100, 64).singular_points() == ()
    with pytest.raises(DomainError):
        pp("2.5")


def test_kernel_factory():
    k = kernels.kernel("bessel", 1, bits=64)
    assert abs(k("0.3", "0.5") - kernels.bessel_kernel(1, "0.3", "0.5", 64)) == 0
    with pytest.raises(DomainError):
        kernels.kernel("airy")


def test_kernel_errors():
    with pytest.raises(UnsupportedError):
        kernels.kernel("pv", 1, 4)
    with pytest.raises(UnsupportedError):
        kernels.pv_kernel("1/2", -1, "0.1", "0.2")
    with pytest.raises(DomainError):
        kernels.bessel_kernel(1, 0, "0.2")
    with pytest.raises(DomainError):
        kernels.bessel_kernel("-1/2", "0.1", "0.2")
