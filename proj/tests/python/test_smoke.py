"""Smoke tests for the nlapsolve python module."""

import json
import math

import nlapsolve as nl


def test_constants():
    assert abs(nl.alpha_n(2) - 4 * math.pi) < 1e-12
    assert abs(nl.alpha_n(3) - 3 * math.sqrt(4 * math.pi)) < 1e-12
    assert abs(nl.sphere_surface_measure(2) - 2 * math.pi) < 1e-12


def test_mesh_counts():
    assert nl.mesh_counts("unit_square", 1) == (9, 8, 1)
    assert nl.mesh_counts("unit_square", 0) == (4, 2, 0)
    assert nl.mesh_counts("unit_cube", 1) == (27, 48, 1)


def test_xi_norm_single_hat():
    assert abs(nl.xi_norm("unit_square", 1, [1.0]) - 2.0) < 1e-13


def test_fk_eval():
    # f(t) = t (as power p=1 on t >= 0), k = 2: interior branch s + 1/(2k)
    vals = nl.fk_eval("power", 2, 1.0, 1.0, 1.0, 3.0, 2, [0.0, 1.0])
    assert vals[0] == 0.0
    assert abs(vals[1] - 1.25) < 1e-12


BASE_CONFIG = {
    "problem": {
        "N": 2,
        "domain": "unit_square",
        "lambda": 0.01,
        "a1": 1.0,
        "a2": 0.0,
        "r1": 0.5,
        "r2": 0.5,
    },
    "nonlinearity": {"kind": "exp_critical", "a3": 1.0, "alpha": 1.0, "r3": 3.0},
    "discretization": {"max_level": 2},
    "seed": 0,
}


def test_constants_report():
    rep = json.loads(nl.constants_report(json.dumps(BASE_CONFIG)))
    assert abs(rep["alpha_N"] - 4 * math.pi) < 1e-12
    assert rep["lambda_star"] > 0.01
    assert rep["n_star"] >= 1


def test_solve_zero_data():
    cfg = json.loads(json.dumps(BASE_CONFIG))
    cfg["problem"]["lambda"] = 0.0
    cfg["nonlinearity"]["kind"] = "zero"
    rep = json.loads(nl.solve(json.dumps(cfg)))
    assert rep["status"] == "ok"
    assert rep["final_xi_norm"] <= 1e-6
    assert rep["negative_part"]["pass"]


def test_bad_config_raises():
    cfg = json.loads(json.dumps(BASE_CONFIG))
    del cfg["nonlinearity"]["r3"]
    try:
        nl.constants_report(json.dumps(cfg))
    except nl.ConfigError as e:
        assert "r3" in str(e)
    else:
        raise AssertionError("expected ConfigError")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"ok   {name}")
            except Exception as exc:  # noqa: BLE001
                failures += 1
                print(f"FAIL {name}: {exc}")
    raise SystemExit(1 if failures else 0)
