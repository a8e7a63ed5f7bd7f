"""Direct-from-zeros counterparts of the twisted sum: the empirical Sigma,
counts of negative products Z'(gamma) Z(gamma + 2 pi kappa / log T), and the
Landau-Gonek mean value of a Dirichlet polynomial over zero ordinates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .arithmetic import (
    ArithmeticTables,
    dirichlet_polynomial,
    mollifier_coefficients,
    von_mangoldt_convolution,
)
from .cgg import SigmaParams
from .zeta import ZeroTable, count_zeros, hardy_z, hardy_z_derivative

TWO_PI = 2.0 * math.pi
LG_EPSILON = 0.1


class EmpiricalError(ValueError):
    pass


@dataclass
class EmpiricalSigmaResult:
    big_t: float
    params: SigmaParams
    raw_sum: float
    normalized: float
    zero_count_used: int
    rows: np.ndarray | None = None

    def to_json(self) -> dict:
        out = self.params.to_json()
        out.update({"T": self.big_t, "raw_sum": self.raw_sum, "normalized": self.normalized,
                    "zero_count_used": self.zero_count_used})
        return out

    def rows_to_csv(self, path: str | Path) -> Path:
        if self.rows is None:
            raise EmpiricalError("per-zero rows were not kept (pass keep_rows=True)")
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "z_prime", "z_shifted", "mollifier_sq", "product"])
            for row in self.rows:
                w.writerow([repr(float(v)) for v in row])
        return path


def _window_zeros(table: ZeroTable, big_t: float, reach: float) -> np.ndarray:
    table.require(big_t, 2 * big_t + reach)
    g = table.ordinates
    keep = (g > big_t) & (g <= 2 * big_t)
    return np.repeat(g[keep], table.multiplicities[keep])


def sigma_empirical(
    p: SigmaParams, big_t: float, table: ZeroTable, tables: ArithmeticTables, keep_rows: bool = False
) -> EmpiricalSigmaResult:
    """sum_{T < gamma <= 2T} Z'(gamma) Z(gamma + 2 pi kappa / log T) |M(1/2 + i gamma + 2 pi i eta / log T)|^2.

    ``normalized`` divides by T log^2 T / 2 pi, the scale of the asymptotic
    coefficient c_Sigma.
    """
    lt = math.log(big_t)
    shift = TWO_PI * p.kappa / lt
    g = _window_zeros(table, big_t, shift)
    norm = big_t * lt * lt / TWO_PI
    if g.size == 0:
        return EmpiricalSigmaResult(float(big_t), p, 0.0, 0.0, 0, np.zeros((0, 5)) if keep_rows else None)
    y = big_t**p.theta
    coeffs = mollifier_coefficients(y, p.polynomial, tables)
    s = 0.5 + 1j * (g + TWO_PI * p.eta / lt)
    msq = np.abs(dirichlet_polynomial(coeffs, s, tables)) ** 2
    zp = np.asarray(hardy_z_derivative(g), dtype=float)
    zs = np.asarray(hardy_z(g + shift), dtype=float)
    prod = zp * zs * msq
    total = float(np.sum(prod))
    rows = np.column_stack([g, zp, zs, msq, prod]) if keep_rows else None
    return EmpiricalSigmaResult(float(big_t), p, total, total / norm, int(g.size), rows)


@dataclass
class NegativeProductCount:
    kappa: float
    big_t: float
    count: int
    verified: int
    window: float
    events: list[float] = field(default_factory=list)

    @property
    def verification_rate(self) -> float:
        return self.verified / self.count if self.count else 1.0

    def to_json(self) -> dict:
        return {"kappa": self.kappa, "T": self.big_t, "count": self.count, "verified": self.verified,
                "verification_rate": self.verification_rate, "window": self.window}


def negative_product_events(kappa: float, big_t: float, table: ZeroTable) -> NegativeProductCount:
    """Zeros gamma in (T, 2T] with Z'(gamma) Z(gamma + 2 pi kappa / log T) < 0.

    Each event is checked twice: Z just to the right of gamma has the sign of
    Z'(gamma) while Z(gamma + delta) has the other sign, so Z changes sign
    inside the window, and the table holds an ordinate in
    (gamma, gamma + delta].
    """
    if kappa <= 0:
        raise EmpiricalError("kappa must be positive")
    delta = TWO_PI * kappa / math.log(big_t)
    table.require(big_t, 2 * big_t + delta)
    ords = table.ordinates
    keep = (ords > big_t) & (ords <= 2 * big_t)
    g = ords[keep]
    if g.size == 0:
        return NegativeProductCount(float(kappa), float(big_t), 0, 0, delta)
    zp = np.asarray(hardy_z_derivative(g), dtype=float)
    zs = np.asarray(hardy_z(g + delta), dtype=float)
    neg = zp * zs < 0
    events = g[neg]
    mult = table.multiplicities[keep][neg]
    if events.size == 0:
        return NegativeProductCount(float(kappa), float(big_t), 0, 0, delta)
    # ordinate check against the table
    idx = np.searchsorted(ords, events, side="right")
    nxt = np.where(idx < ords.size, ords[np.minimum(idx, ords.size - 1)], np.inf)
    has_zero = nxt <= events + delta
    # sign-change check: probe well inside the gap to the next ordinate
    probe = events + np.minimum(delta, nxt - events) * 1e-3
    near = np.asarray(hardy_z(probe), dtype=float)
    sign_change = (np.sign(near) == np.sign(zp[neg])) & (np.sign(near) != np.sign(zs[neg]))
    ok = has_zero & sign_change
    return NegativeProductCount(
        float(kappa), float(big_t), int(mult.sum()), int(mult[ok].sum()), delta, events.tolist()
    )


def count_negative_products(kappa: float, big_t: float, table: ZeroTable) -> int:
    return negative_product_events(kappa, big_t, table).count


# ---------------------------------------------------------------------------
# Landau-Gonek
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LandauGonekResult:
    lhs: float
    rhs: float
    relative_error: float
    diagonal: float
    off_diagonal: float

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "relative_error": self.relative_error,
                "diagonal": self.diagonal, "off_diagonal": self.off_diagonal}


def _as_coefficient_array(coeffs) -> np.ndarray:
    if isinstance(coeffs, Mapping):
        if not coeffs:
            raise EmpiricalError("empty coefficient map")
        if min(coeffs) < 1:
            raise EmpiricalError("coefficients are indexed from n = 1")
        out = np.zeros(max(coeffs), dtype=complex)
        for n, v in coeffs.items():
            out[int(n) - 1] = v
        return out
    return np.asarray(coeffs, dtype=complex)


def landau_gonek_check(
    coeffs, x: float, big_t: float, table: ZeroTable, tables: ArithmeticTables,
    epsilon: float = LG_EPSILON,
) -> LandauGonekResult:
    """sum_{0 < gamma <= T} |sum_{n <= x} a(n) n^{-1/2 - i gamma}|^2 against
    N(T) sum |a(n)|^2 / n - (T / pi) Re sum (Lambda * a)(n) conj(a(n)) / n.

    ``coeffs`` is a map n -> a(n) or an array with a[n-1] = a(n); entries
    beyond x are dropped.
    """
    if x > big_t ** (1 - epsilon):
        raise EmpiricalError(f"x = {x:g} exceeds T^(1 - eps) = {big_t ** (1 - epsilon):.6g}")
    a = _as_coefficient_array(coeffs)[: int(math.floor(x))]
    tables.require(a.size)
    n_t = count_zeros(big_t, table).big_n
    g = table.restrict(big_t).expanded()
    n = np.arange(1, a.size + 1)
    weighted = a / np.sqrt(n)
    if g.size:
        vals = dirichlet_polynomial(weighted, 1j * g, tables)
        lhs = float(np.sum(np.abs(vals) ** 2))
    else:
        lhs = 0.0
    diag = n_t * float(np.sum(np.abs(a) ** 2 / n))
    conv = von_mangoldt_convolution(a, tables)
    off = -(big_t / math.pi) * float(np.real(np.sum(conv * np.conj(a) / n)))
    rhs = diag + off
    rel = abs(lhs - rhs) / abs(rhs) if rhs else (0.0 if lhs == 0 else math.inf)
    return LandauGonekResult(lhs, rhs, rel, diag, off)


def mollifier_coefficient_map(y: float, shape_p, tables: ArithmeticTables) -> np.ndarray:
    """a(n) = mu(n) P(log(y/n)/log y) for n <= y."""
    return mollifier_coefficients(y, shape_p, tables)
