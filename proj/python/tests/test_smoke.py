import math
import os
import pathlib

import numpy as np
import pytest

import contkern as ck

DATA = pathlib.Path(os.environ.get("CONTKERN_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def exact_k(xi, y):
    return 35.0 * y * (y - 1.0) * math.exp(35.0 * xi / math.pi**2)


def test_count_unknowns():
    assert sum(ck.count_unknowns(20, 20)) == 2002
    assert sum(ck.count_unknowns(20, 2)) == 862


def test_closed_form_example1():
    kern = ck.closed_form(ck.builtin.example1())
    assert abs(kern.c_x) < 1e-10
    assert kern.k(1.0, 0.3, 0.4) == pytest.approx(exact_k(0.3, 0.4))
    assert kern.kbar(0.5, 0.2) == pytest.approx(35.0 / (2.0 * math.pi**2))


def test_closed_form_not_applicable():
    with pytest.raises(ck.NotApplicable):
        ck.closed_form(ck.builtin.example2_continuum())


def test_power_series_example1():
    sol = ck.solve(ck.builtin.example1(), order=12, order_y=2)
    assert sol.num_unknowns == 326
    assert sol.num_equations == 862
    assert sol.residual < 2 * 1.93
    g = sol.kernel.gains(11)
    assert g.k.shape == (11, 11)
    assert isinstance(g.k, np.ndarray)


def test_fit_q_matches_numpy():
    y = np.arange(1, 11) / 10.0
    q = ck.load_problem(str(DATA / "example2.json")).to_large_scale().q
    coeffs, rms = ck.fit_q(list(y), q, 2)
    ref = np.polynomial.polynomial.polyfit(y, q, 2)
    assert np.allclose(coeffs, ref, atol=1e-10)
    assert rms > 0


def test_config_errors():
    with pytest.raises(ck.ConfigError):
        ck.parse_problem('{"params": {"mu": 1}}')


def test_simulation_open_and_closed_loop():
    ls = ck.builtin.example2_large_scale(10)
    open_loop = ck.simulate(ls, m_x=64, t_final=0.5)
    assert all(u == 0.0 for u in open_loop["U"])
    gains = ck.fd_gains(ls, 63)
    closed = ck.simulate(ls, gains, m_x=64, t_final=0.5)
    assert len(closed["t"]) == len(open_loop["t"])
    assert closed["t"][-1] == pytest.approx(0.5)
    assert not closed["diverged"]
