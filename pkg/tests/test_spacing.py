from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetagaps.admissible import c_functional, scale
from zetagaps.spacing import (
    ALPHA_GRID,
    SpacingError,
    convolution_check,
    distribution_curve,
    distribution_d,
    form_factor,
    form_factor_complex,
    form_factor_grid,
    gap_histogram,
    gap_statistics,
    moment_integral,
    moment_sum,
    montgomery_shape,
    n_of_t,
    pair_weight,
    proposition1_balance,
    write_xy_csv,
)
from zetagaps.zeta import UncertifiedRangeError, ZeroTable

T = 1000.0
UNIT = 2 * math.pi / math.log(T)


def synth(ords, mult=None, hi=None):
    t = ZeroTable.synthetic(ords, mult)
    if hi is not None:
        t = ZeroTable(t.ordinates, t.multiplicities, (0.0, hi), "synthetic")
    return t


@pytest.fixture(scope="module")
def zeros_1100(zeros_1e4):
    return zeros_1e4


# -- gaps and D ---------------------------------------------------------


def test_single_average_gap():
    stats = gap_statistics(synth([10.0, 10.0 + UNIT], hi=T), T)
    assert stats.normalized_gaps.size == 1
    assert abs(stats.normalized_gaps[0] - 1.0) < 1e-12


def test_multiple_zero_gives_zero_spacing():
    stats = gap_statistics(synth([10.0, 11.0], [2, 1], hi=T), T)
    assert stats.min_normalized_gap == 0.0
    assert abs(stats.min_distinct_gap - math.log(T) / (2 * math.pi)) < 1e-12


def test_real_gaps_below_1000_match_oracle(zeros_1e4, oracle_stats):
    stats = gap_statistics(zeros_1e4, T)
    assert abs(stats.min_normalized_gap - oracle_stats["min_normalized_gap"]) < 1e-6
    assert stats.min_normalized_gap == stats.min_distinct_gap
    assert np.all(stats.normalized_gaps >= 0)


def test_log_gamma_normalisation_is_smaller_at_low_heights(zeros_1e4):
    a = gap_statistics(zeros_1e4, T)
    b = gap_statistics(zeros_1e4, T, log_gamma=True)
    assert b.normalization != a.normalization
    assert np.all(b.normalized_gaps <= a.normalized_gaps + 1e-15)


def test_gap_statistics_needs_coverage(zeros_600):
    with pytest.raises(UncertifiedRangeError):
        gap_statistics(zeros_600, 1000.0)


def test_distribution_examples():
    simple = synth([10.0, 12.0, 20.0], hi=T)
    assert distribution_d(0.0, T, simple) == 0.0
    assert distribution_d(1e6, T, simple) == pytest.approx(2 / 3)
    mult = synth([10.0, 11.0], [2, 1], hi=T)
    assert distribution_d(0.0, T, mult) == pytest.approx(1 / 3)
    assert distribution_d(0.0, T, mult, distinct=True) == 0.0
    with pytest.raises(SpacingError):
        distribution_d(-0.1, T, simple)


def test_distribution_matches_oracle(zeros_1e4, oracle_stats):
    for lam, ref in oracle_stats["D"].items():
        assert distribution_d(float(lam), T, zeros_1e4) == pytest.approx(ref, abs=1e-15)


def test_distribution_curve_monotone(zeros_1e4):
    lams = np.linspace(0, 3, 301)
    d = distribution_curve(lams, T, zeros_1e4)
    dd = distribution_curve(lams, T, zeros_1e4, distinct=True)
    assert np.all(np.diff(d) >= 0)
    assert np.all(dd <= d + 1e-15)
    assert d[100] == distribution_d(lams[100], T, zeros_1e4)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(15, 900), st.integers(1, 3)), min_size=2, max_size=30, unique_by=lambda p: round(p[0], 6)))
def test_distinct_never_exceeds_all(points):
    points = sorted(points)
    table = synth([p for p, _ in points], [m for _, m in points], hi=T)
    for lam in (0.0, 0.5, 1.0, 5.0):
        assert distribution_d(lam, T, table, distinct=True) <= distribution_d(lam, T, table) + 1e-15


# -- form factor -------------------------------------------------------


def test_single_zero_form_factor():
    table = synth([100.0], hi=T)
    assert np.allclose(form_factor_grid([0.0, 0.3, 1.2], T, table).values, 1.0)


def test_two_zero_form_factor():
    g1, g2 = 100.0, 101.7
    table = synth([g1, g2], hi=T)
    d = g1 - g2
    for a in (0.0, 0.4, 1.1):
        expected = (2 + 2 * math.cos(a * math.log(T) * d) * 4 / (4 + d * d)) / 2
        assert abs(form_factor(a, T, table) - expected) < 1e-14


def test_form_factor_matches_oracle(zeros_1e4, oracle_stats):
    for a, ref in oracle_stats["form_factor"].items():
        assert abs(form_factor(float(a), T, zeros_1e4) - ref) < 1e-9


def test_form_factor_even_and_real(zeros_1e4):
    alphas = np.array([0.13, 0.5, 0.91])
    pos = form_factor_grid(alphas, T, zeros_1e4).values
    neg = form_factor_grid(-alphas, T, zeros_1e4).values
    assert np.array_equal(pos, neg)
    for a in alphas:
        z = form_factor_complex(a, T, zeros_1e4)
        assert abs(z.imag) < 1e-8
        assert abs(z.real - form_factor(a, T, zeros_1e4)) < 1e-9


def test_form_factor_window_matches_full_sum(zeros_1e4):
    full = form_factor_grid([0.2, 0.7], 2000.0, zeros_1e4, window=None).values
    win = form_factor_grid([0.2, 0.7], 2000.0, zeros_1e4).values
    assert np.max(np.abs(full - win)) < 1e-10


def test_default_grid():
    assert ALPHA_GRID[0] == 0 and ALPHA_GRID[-1] == 1.5 and ALPHA_GRID.size == 151


def test_montgomery_shape():
    assert montgomery_shape(0.0, T) == pytest.approx(math.log(T))
    assert montgomery_shape(-0.5, T) == pytest.approx(0.5 + math.log(T) / T)


def test_pair_weight():
    assert pair_weight(0.0) == 1.0 and pair_weight(2.0) == 0.5


def test_grid_csv(tmp_path, zeros_1e4):
    grid = form_factor_grid([0.0, 0.5], T, zeros_1e4)
    grid.to_csv(tmp_path / "ff.csv")
    lines = (tmp_path / "ff.csv").read_text().splitlines()
    assert lines[0].startswith("# statistic=form_factor") and lines[1] == "x,value"
    assert len(lines) == 4


# -- convolution ------------------------------------------------------


def test_convolution_single_zero():
    res = convolution_check(scale(1.0), T, synth([100.0], hi=T))
    assert res.lhs == 1.0
    assert abs(res.rhs - 1.0) < 1e-12


def test_convolution_two_zeros():
    table = synth([100.0, 100.8], hi=T)
    r = scale(0.7)
    d = 0.8
    direct = 2 + 2 * r.value(d * math.log(T) / (2 * math.pi)) * pair_weight(d)
    res = convolution_check(r, T, table)
    assert abs(res.lhs - direct) < 1e-14
    assert res.relative_residual < 1e-6


def test_convolution_refines(zeros_1e4):
    coarse = convolution_check(scale(1.0), T, zeros_1e4, panels=8)
    fine = convolution_check(scale(1.0), T, zeros_1e4, panels=32)
    assert fine.relative_residual < coarse.relative_residual
    assert fine.relative_residual < 1e-4


def test_convolution_needs_compact_transform():
    from zetagaps.admissible import TestFunction

    f = TestFunction(lambda u: np.zeros_like(np.asarray(u, dtype=float)), lambda a: a, 1.0, None)
    with pytest.raises(SpacingError):
        convolution_check(f, T, synth([100.0], hi=T))


# -- windows and moments --------------------------------------------


def test_n_of_t_examples(zeros_1e4):
    g = zeros_1e4.ordinates
    # strictly between two consecutive zeros
    mid = 0.5 * (g[10] + g[11])
    assert n_of_t(mid, 0.01 * (g[11] - g[10]) / UNIT, T, zeros_1e4).count == 0
    assert n_of_t(g[100] - 1e-6, 1.0, T, zeros_1e4).count >= 1
    mult = synth([50.0], [2], hi=T)
    assert n_of_t(49.9, 1.0, T, mult).count == 2


def test_moment_single_zero():
    table = synth([100.0], hi=T + 50)
    assert moment_sum(1, T, table).value == 0.0
    for k in (1, 3):
        res = moment_integral(k, T, table)
        assert abs(res.value - k * UNIT) < 1e-12


def test_moment_empty_table():
    table = ZeroTable(np.zeros(0), np.zeros(0, dtype=int), (0.0, T + 50), "synthetic")
    assert moment_integral(2, T, table).value == 0.0


def test_moment_lattice():
    big_t = 5000.0
    unit = 2 * math.pi / math.log(big_t)
    # spacing just under one unit keeps the neighbour clear of the window edge
    ords = 20.0 + 0.999 * unit * np.arange(200)
    table = synth(list(ords), hi=big_t + 50)
    res = moment_sum(1, big_t, table)
    # every zero but the last sees exactly its neighbour
    assert res.value == 199


def test_moments_match_oracle(zeros_1e4, oracle_stats):
    for k in (1, 2):
        s = moment_sum(k, T, zeros_1e4)
        i = moment_integral(k, T, zeros_1e4)
        assert s.value == oracle_stats["moment_sum"][str(k)]
        assert abs(i.value - oracle_stats["moment_integral"][str(k)]) < 1e-6
        assert s.within_bound and i.within_bound
        assert s.bound == (10 * k) ** (2 * k)


def test_moment_integral_translation_covariance():
    big_t = 3000.0
    rng = np.random.default_rng(5)
    ords = np.sort(rng.uniform(500, 1500, 300))
    shift = 37.25
    a = moment_integral(2, big_t, synth(list(ords), hi=big_t + 50))
    b = moment_integral(2, big_t, synth(list(ords + shift), hi=big_t + 50))
    # all windows lie well inside (0, T], so only the boundary could differ
    assert abs(a.value - b.value) < 1e-8


def test_moment_k_validated(zeros_1e4):
    with pytest.raises(SpacingError):
        moment_sum(5, T, zeros_1e4)
    with pytest.raises(SpacingError):
        moment_integral(0, T, zeros_1e4)
    # the forward window of the last zero must be covered too
    with pytest.raises(UncertifiedRangeError):
        moment_sum(1, T, synth([100.0], hi=T))


# -- balance ---------------------------------------------------------


def test_balance_multiplicity_terms():
    assert proposition1_balance(0.8, scale(0.8), T, synth([50.0, 60.0], hi=T)).multiplicity_term == 0
    assert proposition1_balance(0.8, scale(0.8), T, synth([50.0], [3], hi=T)).multiplicity_term == 6


def test_balance_at_5000(zeros_1e4):
    res = proposition1_balance(0.8, scale(0.8), 5000.0, zeros_1e4)
    assert res.n_t == 4520
    assert res.c_value == pytest.approx(c_functional(0.8, scale(0.8)))
    assert res.holds and res.margin > 0


def test_balance_counts_ordered_pairs():
    big_t = 1000.0
    table = synth([100.0, 100.1, 100.2, 400.0], hi=big_t)
    res = proposition1_balance(1.0, scale(1.0), big_t, table)
    assert res.close_pair_term == 6.0


# -- csv -------------------------------------------------------------


def test_histogram_and_csv(tmp_path, zeros_1e4):
    stats = gap_statistics(zeros_1e4, T)
    centres, dens = gap_histogram(stats, 0.1)
    assert abs(np.sum(dens) * 0.1 - 1.0) < 1e-12
    path = write_xy_csv(tmp_path / "h.csv", "gap_histogram", T, centres, dens)
    lines = path.read_text().splitlines()
    assert lines[0] == "# statistic=gap_histogram,T=1000" and lines[1] == "x,value"
