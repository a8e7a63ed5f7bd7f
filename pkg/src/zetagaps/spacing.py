"""Pair statistics of zero tables: gaps, distribution functions, the form
factor F(alpha, T), the convolution identity, short-window counts n(t, lambda)
and their moments.

Throughout, sums over gamma run over zeros counted with multiplicity, so a
zero of multiplicity m contributes m copies of its ordinate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .admissible import TestFunction, c_functional
from .zeta import ZeroTable

TWO_PI = 2.0 * math.pi

PAIR_WINDOW = 1.0e4
ALPHA_GRID = np.round(np.arange(0.0, 1.5 + 1e-9, 0.01), 10)
DESK_C = 10.0
BALANCE_SLACK = 0.2
TAIL_TARGET = 1e-10
_PAIR_CHUNK = 2_000_000


class SpacingError(ValueError):
    pass


def pair_weight(u):
    """w(u) = 4 / (4 + u^2)."""
    u = np.asarray(u, dtype=float)
    return 4.0 / (4.0 + u * u)


def _mean_spacing(big_t: float) -> float:
    if big_t <= TWO_PI:
        raise SpacingError("T must exceed 2 pi for the log T / 2 pi normalisation")
    return TWO_PI / math.log(big_t)


def _below(table: ZeroTable, big_t: float) -> ZeroTable:
    table.require(0.0, big_t)
    return table.restrict(big_t)


# ---------------------------------------------------------------------------
# Gaps and distribution functions
# ---------------------------------------------------------------------------


@dataclass
class GapStatistics:
    normalized_gaps: np.ndarray
    min_normalized_gap: float
    min_distinct_gap: float
    big_t: float
    normalization: str = "log T"

    def to_json(self) -> dict:
        return {
            "T": self.big_t,
            "normalization": self.normalization,
            "gap_count": int(self.normalized_gaps.size),
            "min_normalized_gap": self.min_normalized_gap,
            "min_distinct_gap": self.min_distinct_gap,
        }


def gap_statistics(table: ZeroTable, big_t: float, log_gamma: bool = False) -> GapStatistics:
    """Consecutive gaps gamma^+ - gamma of zeros up to T, normalised.

    The default scale is log T / 2 pi; ``log_gamma`` uses log gamma / 2 pi of
    the lower ordinate instead.  Distinct gaps skip the zero-length spacings
    that a multiple zero produces.
    """
    sub = _below(table, big_t)
    seq = sub.expanded()
    if sub.ordinates.size < 2:
        raise SpacingError("need at least two distinct ordinates below T")
    gaps = np.diff(seq)
    dgaps = np.diff(sub.ordinates)
    if log_gamma:
        scale = np.log(seq[:-1]) / TWO_PI
        dscale = np.log(sub.ordinates[:-1]) / TWO_PI
    else:
        scale = dscale = math.log(big_t) / TWO_PI
    norm = gaps * scale
    dnorm = dgaps * dscale
    return GapStatistics(
        norm, float(norm.min()), float(dnorm.min()), float(big_t),
        "log gamma" if log_gamma else "log T",
    )


def distribution_d(lam: float, big_t: float, table: ZeroTable, distinct: bool = False) -> float:
    """D(lambda, T), or D_d(lambda, T) with ``distinct``.

    Counts consecutive pairs (of all zeros, or of distinct ordinates) whose
    gap is at most 2 pi lambda / log T, divided by N(T).
    """
    if lam < 0:
        raise SpacingError("lambda must be nonnegative")
    sub = _below(table, big_t)
    n_t = sub.total_count
    if n_t == 0:
        return 0.0
    seq = sub.ordinates if distinct else sub.expanded()
    gaps = np.diff(seq)
    return float(np.count_nonzero(gaps <= lam * _mean_spacing(big_t)) / n_t)


def distribution_curve(lams: Sequence[float], big_t: float, table: ZeroTable, distinct: bool = False):
    """D (or D_d) on a grid of lambda values, sharing one sort of the gaps."""
    sub = _below(table, big_t)
    n_t = sub.total_count
    seq = sub.ordinates if distinct else sub.expanded()
    gaps = np.sort(np.diff(seq))
    lams = np.asarray(lams, dtype=float)
    if np.any(lams < 0):
        raise SpacingError("lambda must be nonnegative")
    counts = np.searchsorted(gaps, lams * _mean_spacing(big_t), side="right")
    return counts / n_t if n_t else np.zeros_like(lams)


# ---------------------------------------------------------------------------
# Pair sums
# ---------------------------------------------------------------------------


def _pair_blocks(ords: np.ndarray, mult: np.ndarray, window: float | None) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (differences, weights) over pairs i < j, weight m_i m_j.

    Pairs are enumerated by lag so each block is a pair of array slices.
    With ``window`` only differences <= window are kept.
    """
    n = ords.size
    buf_d, buf_w, size = [], [], 0
    for lag in range(1, n):
        d = ords[lag:] - ords[:-lag]
        w = (mult[lag:] * mult[:-lag]).astype(float)
        if window is not None:
            keep = d <= window
            if not keep.any():
                break
            d, w = d[keep], w[keep]
        buf_d.append(d)
        buf_w.append(w)
        size += d.size
        if size >= _PAIR_CHUNK:
            yield np.concatenate(buf_d), np.concatenate(buf_w)
            buf_d, buf_w, size = [], [], 0
    if buf_d:
        yield np.concatenate(buf_d), np.concatenate(buf_w)


def _window_or_full(sub: ZeroTable, window: float | None) -> float | None:
    """Keep the truncation only when the dropped w-mass is provably tiny.

    Each dropped pair has w <= w(U); the number of dropped ordered pairs is
    below N^2, so the F error is at most N w(U).  Otherwise sum all pairs.
    """
    if window is None:
        return None
    n_t = sub.total_count
    span = sub.ordinates[-1] - sub.ordinates[0] if sub.ordinates.size else 0.0
    if span <= window:
        return None
    if n_t * float(pair_weight(window)) < TAIL_TARGET:
        return window
    return None


@dataclass
class FormFactorGrid:
    alphas: np.ndarray
    values: np.ndarray
    big_t: float
    imaginary_max: float = 0.0
    weight: str = "4/(4+u^2)"

    def to_csv(self, path: str | Path) -> None:
        write_xy_csv(path, "form_factor", self.big_t, self.alphas, self.values)


def form_factor_grid(
    alphas: Sequence[float], big_t: float, table: ZeroTable, window: float | None = PAIR_WINDOW
) -> FormFactorGrid:
    """F(alpha, T) = N(T)^-1 sum_{gamma, gamma'} T^{i alpha (gamma - gamma')} w(gamma - gamma').

    Ordered pairs (gamma, gamma') and (gamma', gamma) are combined, which
    turns the sum into sum m^2 + 2 sum_{i<j} m_i m_j cos(alpha log T d_ij) w(d_ij):
    the imaginary parts cancel pair by pair and F(-alpha) = F(alpha) exactly
    because only |alpha| enters.  ``window`` = None forces the full sum.
    """
    sub = _below(table, big_t)
    alphas = np.asarray(alphas, dtype=float)
    n_t = sub.total_count
    if n_t == 0:
        raise SpacingError("no zeros below T")
    freq = np.abs(alphas) * math.log(big_t)
    acc = np.full(alphas.shape, float(np.sum(sub.multiplicities.astype(float) ** 2)))
    win = _window_or_full(sub, window)
    for d, w in _pair_blocks(sub.ordinates, sub.multiplicities, win):
        ww = 2.0 * w * pair_weight(d)
        for i, f in enumerate(freq):
            acc[i] += np.dot(ww, np.cos(f * d))
    return FormFactorGrid(alphas, acc / n_t, float(big_t))


def form_factor(alpha: float, big_t: float, table: ZeroTable, window: float | None = PAIR_WINDOW) -> float:
    return float(form_factor_grid([alpha], big_t, table, window).values[0])


def form_factor_complex(alpha: float, big_t: float, table: ZeroTable) -> complex:
    """Direct complex double sum over ordered pairs (small tables only).

    Used as a cross-check on the paired real formula; the imaginary part is
    reported so callers can confirm it vanishes.
    """
    sub = _below(table, big_t)
    g = sub.expanded()
    if g.size > 4000:
        raise SpacingError("direct complex sum is limited to 4000 zeros")
    d = g[:, None] - g[None, :]
    vals = np.exp(1j * alpha * math.log(big_t) * d) * pair_weight(d)
    return complex(vals.sum() / g.size)


def montgomery_shape(alpha, big_t: float):
    """|alpha| + T^{-2|alpha|} log T, the Montgomery asymptotic for |alpha| <= 1."""
    a = np.abs(np.asarray(alpha, dtype=float))
    return a + big_t ** (-2 * a) * math.log(big_t)


# ---------------------------------------------------------------------------
# Convolution identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvolutionResult:
    lhs: float
    rhs: float
    relative_residual: float
    nodes: int


def _pair_sum_r(r: TestFunction, big_t: float, sub: ZeroTable) -> float:
    scale = math.log(big_t) / TWO_PI
    total = float(np.sum(sub.multiplicities.astype(float) ** 2)) * float(r.value(0.0))
    for d, w in _pair_blocks(sub.ordinates, sub.multiplicities, None):
        total += 2.0 * float(np.dot(w * pair_weight(d), r.value(d * scale)))
    return total


def _gauss_panels(a: float, b: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def convolution_check(
    r: TestFunction, big_t: float, table: ZeroTable, panels: int = 64, order: int = 8
) -> ConvolutionResult:
    """Both sides of sum r((g - g') log T / 2pi) w(g - g') = N(T) int r_hat F.

    The right side integrates r_hat F over [0, supp r_hat] (twice, by
    evenness) with composite Gauss-Legendre on ``panels`` panels of
    ``order`` nodes, F evaluated at the nodes.
    """
    if r.transform_support is None:
        raise SpacingError("r_hat must have computable compact support")
    sub = _below(table, big_t)
    lhs = _pair_sum_r(r, big_t, sub)
    nodes, weights = _gauss_panels(0.0, r.transform_support, panels, order)
    grid = form_factor_grid(nodes, big_t, sub, window=None)
    rhs = sub.total_count * 2.0 * float(np.dot(weights, grid.values * r.transform(nodes)))
    return ConvolutionResult(lhs, rhs, abs(lhs - rhs) / abs(lhs), nodes.size)


# ---------------------------------------------------------------------------
# Short windows and moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpacingCount:
    t: float
    lam: float
    count: int


def n_of_t(t: float, lam: float, big_t: float, table: ZeroTable) -> SpacingCount:
    """n(t, lambda) = N(t + 2 pi lambda / log T) - N(t)."""
    hi = t + lam * _mean_spacing(big_t)
    table.require(min(t, hi), max(t, hi))
    return SpacingCount(float(t), float(lam), int(table.count_upto(hi)) - int(table.count_upto(t)))


@dataclass(frozen=True)
class MomentResult:
    k: int
    big_t: float
    value: float
    ratio: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.ratio <= self.bound

    def to_json(self) -> dict:
        return {"k": self.k, "T": self.big_t, "value": self.value, "ratio": self.ratio,
                "desk_bound": self.bound, "within_bound": self.within_bound}


def _check_k(k: int) -> None:
    if int(k) != k or k < 1 or k > 4:
        raise SpacingError("k must be an integer in 1..4")


def moment_sum(k: int, big_t: float, table: ZeroTable, desk_c: float = DESK_C) -> MomentResult:
    """sum_{0 < gamma <= T} n(gamma, k)^{2k}; ratio is the sum over T log T."""
    _check_k(k)
    delta = k * _mean_spacing(big_t)
    table.require(0.0, big_t + delta)
    sub = table.restrict(big_t)
    g = sub.ordinates
    n_vals = table.count_upto(g + delta) - table.count_upto(g)
    total = float(np.dot(sub.multiplicities, n_vals.astype(float) ** (2 * k)))
    return MomentResult(k, float(big_t), total, total / (big_t * math.log(big_t)), (desk_c * k) ** (2 * k))


def moment_integral(k: int, big_t: float, table: ZeroTable, desk_c: float = DESK_C) -> MomentResult:
    """int_0^T n(t, k)^{2k} dt by an exact event sweep; ratio is the integral over T.

    n(t, k) only changes where t or t + delta crosses an ordinate, so the
    integral is a finite sum over the intervals between those breakpoints.
    """
    _check_k(k)
    delta = k * _mean_spacing(big_t)
    table.require(0.0, big_t + delta)
    g = table.ordinates[table.ordinates <= big_t + delta]
    cuts = np.concatenate([[0.0, big_t], g, g - delta])
    cuts = np.unique(np.clip(cuts, 0.0, big_t))
    if cuts.size < 2:
        return MomentResult(k, float(big_t), 0.0, 0.0, (desk_c * k) ** (2 * k))
    mid = 0.5 * (cuts[1:] + cuts[:-1])
    n_vals = table.count_upto(mid + delta) - table.count_upto(mid)
    total = float(np.dot(np.diff(cuts), n_vals.astype(float) ** (2 * k)))
    return MomentResult(k, float(big_t), total, total / big_t, (desk_c * k) ** (2 * k))


# ---------------------------------------------------------------------------
# Close-pair balance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BalanceResult:
    multiplicity_term: float
    close_pair_term: float
    rhs: float
    slack: float
    c_value: float
    n_t: int

    @property
    def lhs(self) -> float:
        return self.multiplicity_term + self.close_pair_term

    @property
    def margin(self) -> float:
        return self.lhs - (self.rhs - self.slack)

    @property
    def holds(self) -> bool:
        return self.margin >= 0

    def to_json(self) -> dict:
        return {
            "multiplicity_term": self.multiplicity_term,
            "close_pair_term": self.close_pair_term,
            "rhs": self.rhs,
            "slack": self.slack,
            "c_lambda": self.c_value,
            "N": self.n_t,
            "margin": self.margin,
            "holds": self.holds,
        }


def proposition1_balance(
    lam: float, r: TestFunction, big_t: float, table: ZeroTable, slack: float = BALANCE_SLACK
) -> BalanceResult:
    """sum m(m - 1) + #{ordered pairs with 0 < |g - g'| <= 2 pi lam / log T}
    against c(lam; r) N(T), with the asymptotic error replaced by
    ``slack`` N(T)."""
    sub = _below(table, big_t)
    m = sub.multiplicities.astype(float)
    mult_term = float(np.sum(m * (m - 1)))
    reach = lam * _mean_spacing(big_t)
    close = 0.0
    for d, w in _pair_blocks(sub.ordinates, sub.multiplicities, reach):
        close += 2.0 * float(w.sum())
    n_t = sub.total_count
    c_val = c_functional(lam, r)
    return BalanceResult(mult_term, close, c_val * n_t, slack * n_t, c_val, n_t)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def write_xy_csv(path: str | Path, statistic: str, big_t: float, xs, values) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"# statistic={statistic}", f"T={big_t:g}"])
        w.writerow(["x", "value"])
        for x, v in zip(xs, values):
            w.writerow([repr(float(x)), repr(float(v))])
    return path


def gap_histogram(stats: GapStatistics, bin_width: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Bin centres and normalised counts of the normalised gaps."""
    hi = max(float(stats.normalized_gaps.max()), bin_width)
    edges = np.arange(0.0, hi + bin_width, bin_width)
    counts, edges = np.histogram(stats.normalized_gaps, bins=edges, density=True)
    return 0.5 * (edges[1:] + edges[:-1]), counts

