"""Mobius and von Mangoldt tables, the mollifier M(s, P) and prime sums."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_LIMIT = 50_000_000
DEFAULT_LIMIT = 1_000_000


class ArithmeticTableError(ValueError):
    """Table too short for the requested sum, or invalid parameters."""


@dataclass(frozen=True)
class ArithmeticTables:
    """Sieved tables on [0, limit]; index 0 is unused.

    ``prime_base[n]`` is p when n = p^k (else 0) and ``prime_power[n]`` is k,
    so Lambda(n) and log n = k log p are rebuilt from the prime itself.
    """

    limit: int
    mobius: np.ndarray
    prime_base: np.ndarray
    prime_power: np.ndarray

    @property
    def von_mangoldt(self) -> np.ndarray:
        out = np.zeros(self.limit + 1)
        mask = self.prime_base > 0
        out[mask] = np.log(self.prime_base[mask])
        return out

    def log_n(self, n: np.ndarray) -> np.ndarray:
        """log n, computed as k log p on prime powers."""
        n = np.asarray(n)
        out = np.log(n.astype(float))
        pp = self.prime_base[n] > 0
        out[pp] = self.prime_power[n[pp]] * np.log(self.prime_base[n[pp]].astype(float))
        return out

    def require(self, n: float) -> None:
        if math.floor(n) > self.limit:
            raise ArithmeticTableError(f"tables reach {self.limit}, need {math.floor(n)}")

    def to_csv(self, path: str | Path) -> None:
        lam = self.von_mangoldt
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "mobius", "von_mangoldt"])
            for n in range(1, self.limit + 1):
                w.writerow([n, int(self.mobius[n]), repr(float(lam[n]))])


def build_tables(limit: int = DEFAULT_LIMIT) -> ArithmeticTables:
    if limit < 1:
        raise ArithmeticTableError("limit must be >= 1")
    if limit > MAX_LIMIT:
        raise ArithmeticTableError(f"limit {limit} exceeds memory budget {MAX_LIMIT}")
    n = limit + 1
    is_prime = np.ones(n, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    primes = np.flatnonzero(is_prime)

    mobius = np.ones(n, dtype=np.int8)
    mobius[0] = 0
    base = np.zeros(n, dtype=np.int64)
    power = np.zeros(n, dtype=np.int8)
    for p in primes:
        p = int(p)
        mobius[p::p] *= -1
        sq = p * p
        if sq <= limit:
            mobius[sq::sq] = 0
        q, k = p, 1
        while q <= limit:
            base[q] = p
            power[q] = k
            q *= p
            k += 1
    return ArithmeticTables(limit, mobius, base, power)


# ---------------------------------------------------------------------------
# Mollifier
# ---------------------------------------------------------------------------


def as_polynomial(p) -> np.polynomial.Polynomial:
    """Coerce coefficients (lowest degree first) or a Polynomial."""
    if isinstance(p, np.polynomial.Polynomial):
        return p
    return np.polynomial.Polynomial(np.asarray(p, dtype=float))


@dataclass(frozen=True)
class Mollifier:
    """M(s, P) = sum_{n <= y} mu(n) P(log(y/n) / log y) n^{-s} with y = T^theta."""

    big_t: float
    theta: float
    shape_p: np.polynomial.Polynomial

    def __post_init__(self):
        object.__setattr__(self, "shape_p", as_polynomial(self.shape_p))
        if not 0 < self.theta < 0.5:
            raise ArithmeticTableError("theta must lie in (0, 1/2)")
        if abs(self.shape_p(0.0)) > 1e-14:
            raise ArithmeticTableError("mollifier shape must satisfy P(0) = 0")

    @property
    def length_y(self) -> float:
        return self.big_t**self.theta


def mollifier_coefficients(y: float, shape_p, tables: ArithmeticTables) -> np.ndarray:
    """Coefficients a(n), n = 1..floor(y), of the mollifier of length y.

    For y < 2 only n = 1 survives and its weight is P(1).
    """
    p = as_polynomial(shape_p)
    tables.require(y)
    n_max = max(int(math.floor(y)), 1)
    n = np.arange(1, n_max + 1)
    if y <= 1.0:
        x = np.ones(1)
    else:
        x = np.log(y / n) / math.log(y)
    return tables.mobius[n].astype(float) * p(x)


def dirichlet_polynomial(coeffs: np.ndarray, s, tables: ArithmeticTables | None = None):
    """sum_n coeffs[n-1] n^{-s}, vectorised over s."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    n = np.arange(1, len(coeffs) + 1)
    logn = tables.log_n(n) if tables is not None else np.log(n)
    nz = coeffs != 0
    vals = np.exp(-np.outer(s_arr, logn[nz])) @ coeffs[nz]
    return vals if np.ndim(s) else complex(vals[0])


def mollifier_value(s, m: Mollifier, tables: ArithmeticTables):
    coeffs = mollifier_coefficients(m.length_y, m.shape_p, tables)
    return dirichlet_polynomial(coeffs, s, tables)


# ---------------------------------------------------------------------------
# Prime sums
# ---------------------------------------------------------------------------


def prime_sum_lemma1(tau: float, x: float, tables: ArithmeticTables) -> float:
    """(2/log x) sum_{n<=x} Lambda(n) n^{-1/2} (1 - log n/log x) cos(tau log n)."""
    if x < 2:
        raise ArithmeticTableError("x must be >= 2")
    tables.require(x)
    n = np.arange(2, int(math.floor(x)) + 1)
    n = n[tables.prime_base[n] > 0]
    if n.size == 0:
        return 0.0
    logp = np.log(tables.prime_base[n].astype(float))
    logn = tables.prime_power[n] * logp
    lx = math.log(x)
    terms = logp * np.exp(-0.5 * logn) * (1.0 - logn / lx) * np.cos(tau * logn)
    return float(2.0 / lx * terms.sum())


def von_mangoldt_convolution(a: np.ndarray, tables: ArithmeticTables) -> np.ndarray:
    """(Lambda * a)(n) = sum_{d | n} Lambda(d) a(n/d) for n = 1..len(a).

    ``a[k-1]`` holds a(k).  Exact divisor loop over prime powers d.
    """
    size = len(a)
    tables.require(size)
    out = np.zeros(size, dtype=np.result_type(a, float))
    lam = tables.von_mangoldt
    for d in range(2, size + 1):
        if tables.prime_base[d] == 0:
            continue
        # n = d * k, contribution Lambda(d) a(k)
        k = np.arange(1, size // d + 1)
        out[d * k - 1] += lam[d] * a[k - 1]
    return out
