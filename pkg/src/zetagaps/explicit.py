"""The Fejer-kernel explicit formula for zeros near a height tau.

    sum_gamma K((gamma - tau) log x / 2) = log(tau / 2pi) / log x - prime sum + error

with K(z) = (sin z / z)^2, the sum running over all ordinates (the negative
ones included), and an error of size 1/(tau log x) + x^{1/2}/(tau log x)^2
whose implied constant is not known explicitly.  Here that constant is fixed
once by a calibration sweep and frozen as ``CALIBRATED_A``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import integrate

from .arithmetic import ArithmeticTables, prime_sum_lemma1
from .zeta import ZeroTable, ZetaEngineError

TWO_PI = 2.0 * math.pi

# 2 x max |residual| / shape over tau in {50, 100, 200, 500}, x in {10, 30, 100}
# with zeros to 600 (tests/oracles/calibrate_explicit.py gave 0.49079); frozen,
# never refitted at run time.
CALIBRATED_A = 0.4908
WINDOW_SPACINGS = 50
MIN_WINDOW_SPACINGS = 10


class CoverageError(ZetaEngineError):
    pass


def fejer_kernel(z):
    """(sin z / z)^2 with value 1 at z = 0."""
    z = np.asarray(z, dtype=float)
    return np.sinc(z / math.pi) ** 2


@dataclass(frozen=True)
class FejerSum:
    value: float
    table_part: float
    density_part: float
    tail_bound: float
    covered_to: float

    @property
    def interval(self) -> tuple[float, float]:
        """Certified-style bracket: the kernel is nonnegative, so the missing
        zeros add something in [0, tail_bound]."""
        return (self.table_part, self.table_part + self.tail_bound)


def _density(t):
    return np.log(np.asarray(t, dtype=float) / TWO_PI) / TWO_PI


def _density_tail(tau: float, lx: float, start: float) -> float:
    """int_start^inf rho(t) [K((t - tau) L/2) + K((t + tau) L/2)] dt, L = log x.

    K(z) = (1 - cos 2z) / (2 z^2), so each piece splits into a smooth part and
    a cosine-weighted part handled by QAWF.
    """
    half = lx / 2.0
    total = 0.0
    for sgn in (-1.0, 1.0):
        # u = t + sgn tau is the kernel argument scale; t = u - sgn tau
        a = start + sgn * tau
        if a <= 0:
            raise CoverageError("density tail must start beyond tau")
        rho = lambda u, s=sgn: float(_density(u - s * tau)) if u - s * tau > TWO_PI else 0.0
        smooth = lambda u: rho(u) / (2.0 * (half * u) ** 2)
        osc = lambda u: -rho(u) / (2.0 * (half * u) ** 2)
        total += integrate.quad(smooth, a, np.inf, limit=200)[0]
        total += integrate.quad(osc, a, np.inf, weight="cos", wvar=lx, limlst=200)[0]
    return total


def _tail_bound(tau: float, lx: float, start: float) -> float:
    """Closed-form bound of the uncovered part using K(z) <= 1/z^2.

    int_a^inf log((tau + u)/2pi) / u^2 du = log((tau + a)/2pi)/a + log((a + tau)/a)/tau
    for the near side (a = start - tau), and (log(b/2pi) + 1)/b for the
    mirror side (b = start + tau).
    """
    c = 4.0 / (TWO_PI * lx * lx)
    a = start - tau
    b = start + tau
    near = math.log((tau + a) / TWO_PI) / a + math.log((a + tau) / a) / tau
    mirror = (math.log(b / TWO_PI) + 1.0) / b
    return c * (near + max(mirror, 0.0))


def fejer_zero_sum(
    tau: float, x: float, table: ZeroTable, spacings: int = WINDOW_SPACINGS, detail: bool = False
):
    """sum over all ordinates +-gamma of K((gamma - tau) log x / 2).

    The table must be complete up to at least tau + 10 kernel spacings
    (2 pi / log x each).  Every table zero and its mirror -gamma enters; if
    the table stops before tau + ``spacings`` spacings, the rest of the
    window and everything beyond is replaced by the zero density
    log(t/2pi)/2pi integrated against the kernel, and ``tail_bound`` bounds
    what that replacement stands for.
    """
    if tau < 2:
        raise ValueError("tau must be >= 2")
    if x < 2:
        raise ValueError("x must be >= 2")
    lx = math.log(x)
    step = TWO_PI / lx
    if table.height_range is None:
        raise CoverageError("empty table")
    hi = table.height_range[1]
    need = tau + MIN_WINDOW_SPACINGS * step
    if not table.covers(0.0, need):
        raise CoverageError(
            f"table must be complete on (0, {need:.6g}] (tau + {MIN_WINDOW_SPACINGS} kernel spacings); "
            f"range is {table.height_range}"
        )
    want = tau + spacings * step
    stop = min(hi, want) if math.isfinite(hi) else want
    g = table.ordinates[table.ordinates <= stop]
    m = table.multiplicities[: g.size].astype(float)
    part = float(np.dot(m, fejer_kernel((g - tau) * lx / 2) + fejer_kernel((g + tau) * lx / 2)))
    dens = _density_tail(tau, lx, stop)
    bound = _tail_bound(tau, lx, stop)
    res = FejerSum(part + dens, part, dens, bound, float(stop))
    return res if detail else res.value


def lemma1_rhs(tau: float, x: float, tables: ArithmeticTables) -> float:
    """log(tau/2pi)/log x minus the weighted prime sum."""
    if tau < 2:
        raise ValueError("tau must be >= 2")
    lx = math.log(x)
    return math.log(tau / TWO_PI) / lx - prime_sum_lemma1(tau, x, tables)


def budget_shape(tau: float, x: float) -> float:
    tl = tau * math.log(x)
    return 1.0 / tl + math.sqrt(x) / (tl * tl)


@dataclass(frozen=True)
class Lemma1Evaluation:
    tau: float
    x: float
    zero_side: float
    prime_side: float
    residual: float
    budget: float

    @property
    def within_budget(self) -> bool:
        return abs(self.residual) <= self.budget

    def row(self) -> list:
        return [self.tau, self.x, self.zero_side, self.prime_side, self.residual, self.budget]


def lemma1_evaluate(tau: float, x: float, table: ZeroTable, tables: ArithmeticTables, a_const: float | None = None) -> Lemma1Evaluation:
    a_const = CALIBRATED_A if a_const is None else a_const
    zs = fejer_zero_sum(tau, x, table)
    ps = lemma1_rhs(tau, x, tables)
    return Lemma1Evaluation(float(tau), float(x), zs, ps, zs - ps, a_const * budget_shape(tau, x))


def lemma1_residual_sweep(
    tau_list: Iterable[float], x_list: Iterable[float], table: ZeroTable, tables: ArithmeticTables,
    a_const: float | None = None,
) -> list[Lemma1Evaluation]:
    xs = list(x_list)
    return [lemma1_evaluate(t, x, table, tables, a_const) for t in tau_list for x in xs]


def sweep_to_csv(rows: list[Lemma1Evaluation], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "x", "zero_side", "prime_side", "residual", "budget"])
        for r in rows:
            w.writerow([repr(v) for v in r.row()])
    return path
