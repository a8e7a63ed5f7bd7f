from __future__ import annotations

import json
import math

import mpmath as mp
import numpy as np
import pytest

from zetagaps.zeta import (
    FIRST_ZERO,
    HEIGHT_CEILING,
    CriticalZero,
    UncertifiedRangeError,
    ZeroTable,
    ZeroTableFormatError,
    ZetaEngineError,
    count_zeros,
    export_zero_table,
    find_zeros,
    gram_point,
    hardy_z,
    hardy_z_derivative,
    hardy_z_derivative_richardson,
    import_zero_table,
    rotated_zeta,
    smooth_count,
    theta,
)


def mp_z(t):
    with mp.workdps(30):
        return float(mp.siegelz(t))


# -- Z(t) -------------------------------------------------------------------


def test_z_at_zero_matches_zeta_half():
    with mp.workdps(30):
        ref = float(mp.zeta(0.5))
    assert abs(hardy_z(0.0) - ref) < 1e-12
    assert abs(hardy_z(0.0) + 1.4603545088095868) < 1e-12


def test_z_vanishes_at_first_zero():
    assert abs(hardy_z(FIRST_ZERO)) < 1e-8


def test_sign_change_between_14_and_15():
    assert np.sign(hardy_z(14.0)) != np.sign(hardy_z(15.0))


@pytest.mark.parametrize("t", [0.5, 7.0, 33.3, 150.0, 399.9, 400.1, 1234.5, 9999.0, 45678.9, 99999.0])
def test_z_matches_mpmath_siegelz(t):
    assert abs(hardy_z(t) - mp_z(t)) < 1e-8


def test_z_vectorised_matches_scalar():
    ts = np.array([3.0, 50.0, 500.0, 5000.0])
    vec = hardy_z(ts)
    assert isinstance(vec, np.ndarray)
    assert np.allclose(vec, [hardy_z(t) for t in ts], rtol=0, atol=1e-12)


def test_abs_z_equals_abs_zeta():
    for t in (20.0, 250.0):
        with mp.workdps(25):
            ref = abs(complex(mp.zeta(0.5 + 1j * t)))
        assert abs(abs(hardy_z(t)) - ref) < 1e-9


def test_rejects_heights_outside_budget():
    with pytest.raises(ZetaEngineError):
        hardy_z(HEIGHT_CEILING * 1.01)
    with pytest.raises(ZetaEngineError):
        hardy_z(-1.0)


def test_functional_equation_reality():
    rng = np.random.default_rng(7)
    ts = rng.uniform(10, 1e4, 100)
    vals = rotated_zeta(ts)
    assert np.max(np.abs(np.imag(vals))) < 1e-8


def test_theta_matches_mpmath():
    for t in (1.0, 100.0, 1e4):
        with mp.workdps(30):
            ref = float(mp.siegeltheta(t))
        assert abs(theta(t) - ref) < 1e-9


# -- Z'(t) ------------------------------------------------------------------


def test_derivative_at_first_zero():
    d = hardy_z_derivative(FIRST_ZERO)
    assert abs(d - 0.7931) < 1e-3
    with mp.workdps(30):
        ref = float(mp.siegelz(mp.zetazero(1).imag, derivative=1))
    assert abs(d - ref) / abs(ref) < 1e-6


def test_derivative_sign_matches_crossing_direction():
    direction = hardy_z(FIRST_ZERO + 0.1) - hardy_z(FIRST_ZERO - 0.1)
    assert np.sign(hardy_z_derivative(FIRST_ZERO)) == np.sign(direction)


def test_derivative_central_difference_is_second_order():
    t = 20.0
    exact = hardy_z_derivative_richardson(t)
    errs = [abs(hardy_z_derivative(t, h) - exact) for h in (1e-3, 1e-4)]
    # O(h^2): a tenfold step reduction cuts the error by about 100
    assert errs[1] < errs[0] / 50


def test_derivative_relative_error_at_zeros(oracle_zeros_100):
    gs = oracle_zeros_100[::10]
    ours = hardy_z_derivative(gs)
    with mp.workdps(30):
        ref = np.array([float(mp.siegelz(mp.zetazero(n + 1).imag, derivative=1)) for n in range(0, 100, 10)])
    assert np.max(np.abs(ours - ref) / np.abs(ref)) < 1e-6


# -- zero finding -----------------------------------------------------------


def test_first_hundred_zeros_match_oracle(oracle_zeros_100):
    table = find_zeros(0.0, 237.0)
    assert len(table) == 100
    assert np.max(np.abs(table.ordinates - oracle_zeros_100)) < 1e-6


def test_find_zeros_10_to_50():
    table = find_zeros(10.0, 50.0)
    assert len(table) == 10
    assert abs(table.ordinates[0] - 14.134725) < 1e-6


def test_find_zeros_below_100_counts_29():
    assert find_zeros(0.0, 100.0).total_count == 29


def test_find_zeros_empty_window():
    table = find_zeros(14.2, 14.3)
    assert len(table) == 0 and table.certified


def test_find_zeros_rejects_bad_ranges():
    with pytest.raises(ZetaEngineError):
        find_zeros(50.0, 10.0)
    with pytest.raises(ZetaEngineError):
        find_zeros(0.0, HEIGHT_CEILING * 2)


def test_zeros_to_1100_match_oracle(zeros_1e4, oracle_zeros_1100):
    ours = zeros_1e4.ordinates[: oracle_zeros_1100.size]
    assert np.max(np.abs(ours - oracle_zeros_1100)) < 1e-6


@pytest.mark.parametrize("big_t, expected", [(1000.0, 649), (2000.0, 1517), (5000.0, 4520), (1e4, 10142)])
def test_known_counts(zeros_1e4, big_t, expected):
    assert count_zeros(big_t, zeros_1e4).big_n == expected


def test_count_matches_sign_changes(zeros_600):
    # independent recount on a grid fine enough to separate every pair below 600
    t = np.linspace(1.0, 600.0, 600_000)
    z = hardy_z(t)
    changes = int(np.count_nonzero(np.sign(z[1:]) != np.sign(z[:-1])))
    assert changes == count_zeros(600.0, zeros_600).big_n == 341


def test_zeros_strictly_increasing_and_simple(zeros_1e4):
    assert np.all(np.diff(zeros_1e4.ordinates) > 0)
    assert np.all(zeros_1e4.multiplicities == 1)


def test_s_of_t_bounded(zeros_1e4):
    ts = np.linspace(20.0, 1e4, 400)
    vals = [count_zeros(t, zeros_1e4).s_of_t for t in ts]
    assert max(abs(v) for v in vals) < 3


def test_gram_points_solve_theta():
    n = np.arange(0, 50)
    g = gram_point(n)
    assert np.max(np.abs(theta(g) - math.pi * n)) < 1e-9


# -- counting ---------------------------------------------------------------


def test_count_below_first_zero(zeros_1e4):
    val = count_zeros(14.0, zeros_1e4)
    assert val.big_n == 0
    assert val.s_of_t == -val.smooth_main


def test_count_synthetic_multiplicity():
    table = ZeroTable.synthetic([10.0], [3])
    assert count_zeros(20.0, table).big_n == 3


def test_smooth_count_formula():
    t = 1000.0
    expected = t / (2 * math.pi) * math.log(t / (2 * math.pi)) - t / (2 * math.pi) + 7 / 8
    assert abs(smooth_count(t) - expected) < 1e-12


def test_count_outside_range_raises(zeros_600):
    with pytest.raises(UncertifiedRangeError):
        count_zeros(700.0, zeros_600)


def test_critical_zero_invariants():
    with pytest.raises(ZetaEngineError):
        CriticalZero(-1.0)
    with pytest.raises(ZetaEngineError):
        CriticalZero(10.0, 0)


def test_only_synthetic_tables_carry_multiplicity():
    with pytest.raises(ZetaEngineError):
        ZeroTable(np.array([10.0]), np.array([2]), (0, 20), "computed")
    with pytest.raises(ZetaEngineError):
        ZeroTable.synthetic([11.0, 10.0])


def test_uncertified_window_blocks_use():
    table = ZeroTable(np.array([14.13]), np.array([1]), (0.0, 100.0), "computed", [(50.0, 60.0)])
    assert not table.covers(0.0, 100.0)
    assert table.covers(0.0, 40.0)
    with pytest.raises(UncertifiedRangeError):
        count_zeros(80.0, table)


# -- file formats -----------------------------------------------------------


def test_import_three_zeros(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("14.134725\n21.022040\n25.010858\n")
    table = import_zero_table(p)
    assert len(table) == 3 and table.source == "imported"
    assert table.height_range == (14.134725, 25.010858)
    assert np.all(table.multiplicities == 1)


def test_import_empty_file(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("")
    table = import_zero_table(p)
    assert len(table) == 0 and table.height_range is None
    with pytest.raises(UncertifiedRangeError):
        count_zeros(10.0, table)


def test_import_reports_monotonicity_line(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("21.0\n14.1\n")
    with pytest.raises(ZeroTableFormatError) as err:
        import_zero_table(p)
    assert err.value.line == 2


def test_import_reports_parse_line(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("14.1\n\nabc\n")
    with pytest.raises(ZeroTableFormatError) as err:
        import_zero_table(p)
    assert err.value.line == 3


def test_export_round_trip(tmp_path):
    table = find_zeros(0.0, 100.0)
    path = tmp_path / "z.txt"
    sidecar = export_zero_table(table, path)
    meta = json.loads(sidecar.read_text())
    assert meta == {"source": "computed", "height_range": [0.0, 100.0], "count": 29}
    back = import_zero_table(path)
    assert np.max(np.abs(back.ordinates - table.ordinates)) <= 5e-7
