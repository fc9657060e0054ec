import math

import numpy as np
import pytest

import hjbrec

SQRT_PI = math.sqrt(math.pi)
RICCATI = (1 + math.sqrt(2)) / 8


def test_c_table_single_nonzero():
    out = hjbrec.fill_table("c", 15)
    c = out["values"]
    assert c.shape == (15,)
    assert abs(c[1] - SQRT_PI) < 1e-10
    assert np.max(np.abs(np.delete(c, 1))) <= 1e-10
    assert out["counts"]["fallback"] == 0


def test_fill_matches_quadrature():
    fill = hjbrec.fill_table("a", 8)["values"]
    ref = hjbrec.quadrature_table("a", 8)
    assert fill.shape == (8, 8, 8)
    big = np.abs(ref) > 1e-9 * np.abs(ref).max()
    assert np.max(np.abs(fill[big] - ref[big]) / np.abs(ref[big])) < 1e-6
    assert np.allclose(fill, fill.transpose(1, 0, 2), rtol=1e-12, atol=0)


def test_seed_closed_forms():
    assert abs(hjbrec.seed_integral("a", [2, 1, 1]) - 32 * SQRT_PI) < 1e-9
    assert abs(hjbrec.seed_integral("b", [1, 1]) - 2 * SQRT_PI * math.exp(-0.25)) < 1e-9
    with pytest.raises(ValueError):
        hjbrec.seed_integral("a", [0, 1, 1])


def test_mellin_pair():
    s = hjbrec.inverse_mellin("S_i", ["i"], ["s"])
    assert s == hjbrec.inverse_mellin(hjbrec.mellin("s", ["s"], ["i"]), ["i"], ["s"])
    assert hjbrec.mellin(s, ["s"], ["i"]) == hjbrec.mellin("s", ["s"], ["i"])
    e = hjbrec.mellin("s^2 - 2*x*s - 2*s*D_s", ["s"], ["i"], ["x"])
    assert hjbrec.inverse_mellin(e, ["i"], ["s"], ["x"]) == hjbrec.inverse_mellin(
        "S_i^2 - 2*x*S_i + 2*(i+1)", ["i"], ["s"], ["x"])
    with pytest.raises(ValueError):
        hjbrec.inverse_mellin("S_i^-1", ["i"], ["s"])


def test_verify_default_operators():
    report = hjbrec.verify(8)
    assert {r["id"] for r in report} >= {"Ga1", "Gb1", "Gc1"}
    assert all(r["passed"] for r in report)


def test_lqr_and_simulation():
    r = hjbrec.sga(2, problem="linear-system")
    assert r["converged"]
    assert np.allclose(r["v_star"], [0.0, RICCATI], atol=1e-9)
    tr = hjbrec.simulate(r["v_star"], problem="linear-system", x0=1.0, t_end=2.0, dt=1e-3)
    assert np.max(np.abs(tr["x"] - np.exp(-math.sqrt(2) * tr["t"]))) < 1e-6
    assert abs(hjbrec.hjb_residual(r["v_star"], 0.7, problem="linear-system")) < 1e-10


def test_sin_system_n14():
    r = hjbrec.sga(14)
    assert r["converged"]
    tr = hjbrec.simulate(r["v_star"])
    assert abs(tr["x"][-1]) < 0.05


def test_cli_exit_codes(tmp_path):
    code, out, _ = hjbrec.run_cli(["verify", "--n", "8"])
    assert code == 0
    assert "FAIL" not in out
    code, _, _ = hjbrec.run_cli(["fill", "--problem", "nope"])
    assert code == 2
    code, out, _ = hjbrec.run_cli(["simulate", "--n", "4", "--out", str(tmp_path)])
    assert code == 5
