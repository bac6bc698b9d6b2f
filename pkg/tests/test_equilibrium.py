import pytest

from painlevekit import equilibrium, numkit
from painlevekit.errors import DomainError, NotOneCutError, UnsupportedError

ctx = numkit.context(128)
TOL = ctx.mpf(10) ** -30


def test_gaussian_semicircle():
    m = equilibrium.solve_one_cut(equilibrium.PotentialSpec.gaussian(), 128)
    assert abs(m.a + 1) < TOL and abs(m.b - 1) < TOL
    assert abs(m.psi0 - 2 / ctx.pi) < TOL
    assert abs(m.psi("0.5") - 2 / ctx.pi * ctx.sqrt(ctx.mpf("0.75"))) < TOL
    assert abs(m.mass() - 1) < TOL
    assert abs(m.ell - (1 + 2 * ctx.log(2))) < TOL


def test_shifted_gaussian():
    m = equilibrium.solve_one_cut(equilibrium.PotentialSpec.shifted_gaussian("1/4"), 128)
    assert abs(m.a + ctx.mpf(5) / 4) < TOL and abs(m.b - ctx.mpf(3) / 4) < TOL
    assert abs(m.psi0 - 2 / ctx.pi * ctx.sqrt(1 - ctx.mpf(1) / 16)) < TOL


def test_quartic_mass_and_variational_conditions():
    m = equilibrium.solve_one_cut(equilibrium.PotentialSpec.parse("0,0,1/2,0,1/4"), 128)
    assert abs(m.mass() - 1) < TOL
    for x in ("-1.2", "0", "0.3", "1.1"):
        assert equilibrium.el_residual(m, x) < TOL
    for x in ("1.5", "-3", "5"):
        assert equilibrium.el_residual(m, x) == 0


@pytest.mark.parametrize("coeffs", ["0,0,-2,0,1", "0,0,-3,0,1"])
def test_double_well_rejected(coeffs):
    with pytest.raises(NotOneCutError):
        equilibrium.solve_one_cut(equilibrium.PotentialSpec.parse(coeffs), 128)


def test_support_must_contain_origin():
    with pytest.raises(UnsupportedError):
        equilibrium.solve_one_cut(equilibrium.PotentialSpec.shifted_gaussian(2), 128)


@pytest.mark.parametrize("coeffs", ["-1/4", "0,0,0,1", "0,0,-1", "a,b"])
def test_bad_potentials(coeffs):
    with pytest.raises(DomainError):
        equilibrium.PotentialSpec.parse(coeffs)


def test_scaling_gaussian():
    m = equilibrium.solve_one_cut(equilibrium.PotentialSpec.gaussian(), 128)
    sc = equilibrium.scaling(m, 10, "-1/100", 128)
    # tau = 16 pi^2 psi0^2 n^2 t = 64 n^2 t, s_hat = 4 pi n z0 psi0 = 8 n sqrt(-t)
    assert abs(sc.tau_nt + 64) < TOL
    assert abs(sc.s_hat_nt - 8) < TOL
    # s = 8 n int_0^{sqrt(-t)} sqrt(1 + x^2) dx
    z = ctx.mpf(1) / 10
    exact = 4 * 10 * (z * ctx.sqrt(1 + z * z) + ctx.asinh(z))
    assert abs(sc.s_nt - exact) < TOL
    plus = equilibrium.scaling(m, 10, "1/100", 128)
    assert ctx.re(plus.s_nt) == 0 and ctx.im(plus.s_nt) < 0
    assert abs(plus.s_hat_nt - ctx.mpc(0, -8)) < TOL


def test_scaling_t0_and_out_of_range():
    m = equilibrium.solve_one_cut(equilibrium.PotentialSpec.gaussian(), 128)
    assert equilibrium.scaling(m, 5, 0).s_nt == 0
    with pytest.raises(DomainError):
        equilibrium.scaling(m, 5, 2)
