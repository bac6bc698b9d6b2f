import pytest

from painlevekit import numkit, schlesinger
from painlevekit.errors import BranchAmbiguousError, DomainError, UnsupportedError

ctx = numkit.context(256)
TOL = ctx.mpf(10) ** -60


def test_x0_is_diagonal_exponential():
    x = schlesinger.x0(2)
    X = schlesinger.evaluate(x, 2)
    assert abs(X[0][0] - ctx.exp(-2)) < TOL
    assert abs(X[1][1] - ctx.exp(2)) < TOL
    assert X[0][1] == 0 and X[1][0] == 0


def test_q_alpha1_closed_value():
    x = schlesinger.build(1, 1)
    q = schlesinger.infinity_data(x).q
    assert abs(q - (1 / (ctx.e - 1) + ctx.mpf(1) / 2)) < TOL


def test_q_alpha2_closed_value():
    e = ctx.e
    x = schlesinger.build(2, 1)
    q = schlesinger.infinity_data(x).q
    assert abs(q - (-1 + e * (-2 + e)) / (1 - 3 * e + e * e)) < TOL


@pytest.mark.parametrize("alpha,s", [(1, "0.5"), (2, "3"), (3, "1.5"), (4, "7"), (2, "-2.5j"), (4, "-0.7j")])
def test_det_and_symmetry_identities(alpha, s):
    x = schlesinger.build(alpha, ctx.mpmathify(s))
    assert schlesinger.det_defect(x) < TOL * 10 ** 10
    assert schlesinger.symmetry_defect(x) < TOL * 10 ** 10


@pytest.mark.parametrize("alpha", [1, 2])
@pytest.mark.parametrize("z", ["2.5", "-0.7", "0.4+0.3j", "0.5-2j"])
def test_recursion_matches_closed_forms(alpha, z):
    z = ctx.mpmathify(z)
    x = schlesinger.build(alpha, 3)
    X = schlesinger.evaluate(x, z)
    C = schlesinger.closed_form(alpha, z, 3)
    assert max(abs(X[i][j] - C[i][j]) for i in range(2) for j in range(2)) < TOL


def test_boundary_values_need_a_side():
    x = schlesinger.build(2, 1)
    with pytest.raises(BranchAmbiguousError):
        schlesinger.evaluate(x, "0.3")
    up = schlesinger.evaluate(x, "0.3", side="+")
    down = schlesinger.evaluate(x, "0.3", side="-")
    # even alpha: the prefactor has no jump, X is continuous across (0, 1)
    assert max(abs(up[i][j] - down[i][j]) for i in range(2) for j in range(2)) < TOL


def test_singular_points_rejected():
    x = schlesinger.build(1, 1)
    with pytest.raises(DomainError):
        schlesinger.evaluate(x, 1)


def test_parameter_errors():
    with pytest.raises(DomainError):
        schlesinger.build(1, 0)
    with pytest.raises(UnsupportedError):
        schlesinger.build("1/2", 1)
    with pytest.raises(UnsupportedError):
        schlesinger.build(1, ctx.mpc(0, -1))
    with pytest.raises(DomainError):
        schlesinger.build(2, ctx.mpc(1, 1))


def test_to_json_shape():
    x = schlesinger.build(2, 1, bits=64)
    js = schlesinger.to_json(x, digits=10)
    assert js["alpha"] == 2 and js["family"] == "minus"
    assert len(js["M"]) == 2 and set(js["M"][0][0][0]) == {"re", "im"}


@pytest.mark.parametrize("alpha", [1, 3])
def test_jump_on_unit_interval_odd_alpha(alpha):
    x = schlesinger.build(alpha, "1.5")
    up = schlesinger.evaluate(x, "0.3", side="+")
    down = schlesinger.evaluate(x, "0.3", side="-")
    # X_+ = (-1)^alpha X_- on (0, 1)
    assert max(abs(up[i][j] + down[i][j]) for i in range(2) for j in range(2)) < TOL
