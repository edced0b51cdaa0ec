import math

import pytest

from auvmpc.params import VehicleParams, load_params, params_from_mapping


def test_default_values(params):
    assert params.W == 200.116
    assert params.B == 201.586
    assert params.m == 20.42
    assert params.I_xx == 0.1205
    assert params.z_g == 0.0018
    assert params.l_1 == 0.1694
    assert params.l_2 == 0.2794
    assert params.R == 0.025
    assert params.X_du == -2.042
    assert params.Y_dv == params.Z_dw == -32.2013
    assert params.X_uu == 48.17
    assert params.N_rr == 4.11
    assert params.rho == 1025.0


def test_power_ratio_identity(params):
    assert params.C_p == math.sqrt(1.0 / (2.0 * math.pi * params.rho)) / params.R
    assert params.C_p == pytest.approx(0.49843, rel=1e-4)


def test_net_buoyancy(params):
    assert params.net_buoyancy == pytest.approx(1.47)


def test_rejects_negative_buoyancy():
    with pytest.raises(ValueError):
        VehicleParams(B=199.0)


def test_neutral_buoyancy_allowed():
    p = VehicleParams(B=200.116)
    assert p.net_buoyancy == 0.0


def test_rejects_zero_coefficients():
    with pytest.raises(ValueError):
        VehicleParams(X_uu=0.0)
    with pytest.raises(ValueError):
        VehicleParams(X_du=0.0)


def test_load_params_file(tmp_path):
    path = tmp_path / "vehicle.txt"
    path.write_text(
        "# test vehicle\n"
        "W = 200.116\n"
        "B = 210.0\n"
        "X_uu = 50.0\n"
        "\n")
    p = load_params(path)
    assert p.B == 210.0
    assert p.X_uu == 50.0
    assert p.m == 20.42  # untouched default


def test_load_params_rejects_unknown_key(tmp_path):
    path = tmp_path / "vehicle.txt"
    path.write_text("drag = 1.0\n")
    with pytest.raises(ValueError, match="unknown parameter"):
        load_params(path)


def test_load_params_rejects_duplicates(tmp_path):
    path = tmp_path / "vehicle.txt"
    path.write_text("W = 200.116\nW = 200.2\n")
    with pytest.raises(ValueError, match="duplicate"):
        load_params(path)


def test_load_params_rejects_garbage(tmp_path):
    path = tmp_path / "vehicle.txt"
    path.write_text("W 200\n")
    with pytest.raises(ValueError, match="expected"):
        load_params(path)


def test_params_from_mapping_rejects_unknown():
    with pytest.raises(ValueError, match="unknown"):
        params_from_mapping({"W": 200.116, "bogus": 1.0})
