"""End-to-end smoke checks of the python bindings."""

import math

import pytest

import lpplfit


TRUTH = dict(tc=2008.3, m=0.5, omega=8.0, phi=1.0, A=10.0, B=-3.0, C=0.3)
FAST = dict(taboo_evals_per_region=200, taboo_regions=1, n_candidates=2, lm_max_iters=80)


@pytest.fixture(scope="module")
def series():
    return lpplfit.generate(start=2006.0, end=2008.2, **TRUTH)


def test_version():
    assert lpplfit.__version__


def test_date_round_trip():
    t = lpplfit.to_decimal_years("2008-02-13")
    assert t == pytest.approx(2008.1174863387978, abs=1e-12)
    assert lpplfit.from_decimal_years(t) == "2008-02-13"


def test_series_and_model_values(series):
    assert len(series) == 115
    nl = lpplfit.NonlinearParams(**{k: TRUTH[k] for k in ("tc", "m", "omega", "phi")})
    lin = lpplfit.LinearParams(TRUTH["A"], TRUTH["B"], TRUTH["C"])
    assert series.values[0] == pytest.approx(
        lpplfit.lppl_value(nl, lin, series.times[0]), abs=1e-12
    )
    assert lpplfit.objective(nl, series) < 1e-16

    slaved = lpplfit.slave_linear(nl, series)
    assert slaved.A == pytest.approx(TRUTH["A"], abs=1e-8)
    assert slaved.B == pytest.approx(TRUTH["B"], abs=1e-8)
    assert slaved.C == pytest.approx(TRUTH["C"], abs=1e-8)


def test_csv_round_trip():
    text = "date,value\n2008-01-01,1.5\n2008-01-08,2.5\n"
    s = lpplfit.parse_csv(text)
    assert len(s) == 2
    assert s.values == [1.5, 2.5]
    smoothed = lpplfit.moving_average(s, window_len=2)
    assert smoothed.values == [2.0]


def test_fit_window_recovers_and_is_deterministic(series):
    a = lpplfit.fit_window(series, 2007.0, 2008.2, seed=4, **FAST)
    b = lpplfit.fit_window(series, 2007.0, 2008.2, seed=4, **FAST)
    assert a.nl.tc == b.nl.tc and a.ssr == b.ssr
    assert abs(a.nl.tc - TRUTH["tc"]) < 14 / 365.25
    assert a.lin.B < 0
    d = a.to_dict()
    assert set(d) >= {"t1", "t2", "tc", "m", "omega", "ssr", "converged", "seed"}


def test_run_ensemble_summary(series):
    out = lpplfit.run_ensemble(
        series, 2008.0, span_min_months=4, span_max_months=6, t1_step_days=14, **FAST
    )
    assert out["n_windows"] == 5
    assert out["n_fits"] + out["n_failed"] + out["n_filtered"] == out["n_windows"]
    q = out["tc_quantiles"]
    assert list(q) == ["0.05", "0.2", "0.5", "0.8", "0.95"]
    values = [q[k] for k in q]
    assert values == sorted(values)
    assert all(v >= 2008.0 for v in values)  # box lower edge is t2 itself
    assert len(out["density"]) == 201
    assert out["extrapolation"][0]["t"] == pytest.approx(2008.0)


def test_quantiles_match_numpy_convention():
    qs = lpplfit.tc_quantiles([1.0, 2.0, 3.0, 4.0], [0.5, 1.0])
    assert qs[0.5] == pytest.approx(2.5)
    assert qs[1.0] == pytest.approx(4.0)


def test_exceptions_map_to_python_types(series):
    with pytest.raises(ValueError):
        lpplfit.TimeSeries([2.0, 1.0], [0.0, 0.0])  # unsorted times
    with pytest.raises(RuntimeError):
        lpplfit.to_decimal_years("not-a-date")
    with pytest.raises(ValueError):
        lpplfit.generate(start=2009.0, end=2008.0, **TRUTH)
    nl_bad = lpplfit.NonlinearParams(tc=2007.0, m=0.5, omega=8.0, phi=1.0)
    with pytest.raises(RuntimeError):
        lpplfit.objective(nl_bad, series)  # tc inside the window


def test_literal_cos_changes_the_fit(series):
    nl = lpplfit.NonlinearParams(**{k: TRUTH[k] for k in ("tc", "m", "omega", "phi")})
    assert lpplfit.objective(nl, series) < 1e-16
    assert lpplfit.objective(nl, series, literal_cos=True) > 1e-6
