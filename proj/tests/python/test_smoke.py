import math

import pytest

gracecbf = pytest.importorskip("gracecbf")


def test_filter_scalar():
    r = gracecbf.filter_scalar(-2.0, 3.0)
    assert r["u_star"] == 3.0 and r["active"]
    tie = gracecbf.filter_scalar(-5.0, -5.0)
    assert tie["u_star"] == -5.0 and not tie["active"]


def test_filter_projection():
    u, active = gracecbf.filter_projection([0.0, 0.0], [1.0, 0.0], 2.0)
    assert u == [2.0, 0.0] and active
    with pytest.raises(gracecbf.Error) as info:
        gracecbf.filter_projection([0.0, 0.0], [0.0, 0.0], 1.0)
    assert info.value.code == "ZeroNormal"


def test_analysis():
    assert gracecbf.lyapunov_v1(-0.5) == pytest.approx(0.193147, abs=1e-6)
    assert gracecbf.lyapunov_v2(-0.5, -1.0, 2.0) == pytest.approx(1.272589, abs=1e-6)
    assert gracecbf.implicit_bound_time(-0.5, -0.25, 3.0) == pytest.approx(0.147716, abs=1e-6)
    t = gracecbf.implicit_bound_time(-0.5, -0.25, 3.0)
    assert gracecbf.bound_trajectory(-0.5, [0.0, t], 3.0)[1] == pytest.approx(-0.25, abs=1e-9)
    g1, g2 = gracecbf.characteristic_roots(2.0, 2.0)
    assert g1 + g2 == pytest.approx(8.0, abs=1e-12)
    assert g1 * g2 == pytest.approx(4.0, abs=1e-12)
    assert gracecbf.layer_transform(2.0, 1.0, 3.0) == -0.5
    assert gracecbf.classify_region(-0.5) == "Danger"
    with pytest.raises(gracecbf.Error) as info:
        gracecbf.lyapunov_v1(-1.0)
    assert info.value.code == "DomainError"


def test_run_and_verify(tmp_path):
    assert "ex2-exponential" in gracecbf.scenarios()
    runs = gracecbf.run("ex2-exponential")
    assert [r["summary"]["collided"] for r in runs] == [True, True, False, False]
    assert runs[0]["events"][-1] == "Collision"
    assert abs(runs[0]["x"][-1][0] - 1.0) < 1e-6

    ex1 = gracecbf.run("ex1-zeroing", x0=[10.0], out=tmp_path)
    x = [s[0] for s in ex1[0]["x"]]
    assert len(x) == 8001
    assert x[-1] == pytest.approx(3.0, abs=1e-6)
    assert (tmp_path / "ex1-zeroing_x0_10.csv").exists()

    checks = gracecbf.verify("sc1-graceful1")
    assert checks and all(passed for _, passed, _ in checks)

    with pytest.raises(gracecbf.Error) as info:
        gracecbf.run("missing")
    assert info.value.code == "UnknownScenario"


def test_graceful_runs_stay_off_the_wall():
    for sid in ("sc1-graceful1", "sc2-graceful2-over", "sc2-graceful2-under"):
        for r in gracecbf.run(sid):
            s = r["summary"]
            assert not s["collided"] and not s["catastrophe"]
            assert s["min_h_g"] > -1.0 + 1e-6
            assert all(math.isfinite(u) for u in r["u"])
