import json

import pytest

from painlevekit import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_sigma_json(capsys):
    code, out, _ = run(capsys, "sigma", "--alpha", "1", "--family", "minus", "--s", "1,2", "--digits", "15")
    assert code == 0
    body = json.loads(out)
    assert body["header"]["digits"] == 15
    assert body["provenance"] == "closed-form"
    assert body["rows"][0]["sigma"] == "0.581976706869326"
    assert float(body["rows"][0]["residual"]) < 1e-60


def test_sigma_plus_positive_magnitude_means_negative_imaginary(capsys):
    code, out, _ = run(capsys, "sigma", "--alpha", "2", "--family", "plus", "--s", "3", "--digits", "10")
    assert code == 0
    body = json.loads(out)
    # a single point is reported flat, without a "rows" list
    assert body["s"] == {"re": "0.0", "im": "-3.0"}
    assert body["sigma"]["im"] == "3.0"


def test_kernel_pv_alpha0_csv(capsys):
    code, out, _ = run(capsys, "kernel", "--kind", "pv", "--alpha", "0", "--tau", "-4", "--grid", "0:1:3", "--format", "csv", "--digits", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# command: painlevekit kernel")
    rows = [ln for ln in lines if not ln.startswith("#")]
    assert rows[0] == "u,v,K"
    assert "0.0,0.5,0.6366197724" in rows


def test_negative_values_without_equals(capsys):
    code, out, _ = run(capsys, "predict", "--alpha", "1", "--n", "20", "--t", "-1/6400", "--digits", "12")
    assert code == 0
    body = json.loads(out)
    assert body["scaling"]["tau_nt"] == "-4.0"
    assert body["predicted_value"].startswith("0.1551975134")


def test_output_is_reproducible(capsys):
    argv = ["equilibrium", "--potential", "0,0,1/2,0,1/4", "--digits", "20"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_out_file(tmp_path, capsys):
    target = tmp_path / "k.json"
    code, out, _ = run(capsys, "kernel", "--kind", "sine", "--grid", "0:1:2", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["header"]["precision_bits"] == 256


def test_oracle_toeplitz(capsys):
    code, out, _ = run(capsys, "oracle", "toeplitz", "--alpha", "1", "--n", "8", "--t", "0.1", "--digits", "8")
    assert code == 0
    assert json.loads(out)["gap"] == "0.044835445"


def test_bad_flag_exits_2_with_clean_stdout(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sigma", "--bogus"])
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""


def test_domain_error_exit_code(capsys):
    code, out, err = run(capsys, "sigma", "--alpha", "1", "--family", "plus", "--s", "1")
    assert code == 2 and out == ""
    assert "UnsupportedError" in err


def test_verify_unit_suite(capsys):
    code, out, err = run(capsys, "verify", "--suite", "unit", "--filter", "kernels")
    assert code == 0
    assert "check kernels.symmetry: PASS" in err
    assert json.loads(out)["failed"] == []


@pytest.mark.parametrize(
    "text,expected",
    [("0.5", (0.5, 0.0)), ("-2j", (0.0, -2.0)), ("1-0.5j", (1.0, -0.5)), ("1e-3+2e-2j", (0.001, 0.02))],
)
def test_parse_number(text, expected):
    from painlevekit import numkit

    ctx = numkit.context(64)
    v = ctx.mpmathify(cli.parse_number(text, ctx))
    assert (float(ctx.re(v)), float(ctx.im(v))) == expected


def test_parse_grid_and_fourier():
    from painlevekit import numkit

    ctx = numkit.context(64)
    assert [float(x) for x in cli.parse_grid("0:1:5", ctx)] == [0, 0.25, 0.5, 0.75, 1]
    f = cli.parse_fourier("0:0.3,1:0.1,-1:0.1")
    assert set(f) == {0, 1, -1}
