"""Hardy Z-function, critical-line zeros and the zero counting function.

Z(t) is evaluated by Euler-Maclaurin summation of zeta(1/2 + it) below
``RS_CROSSOVER`` and by the Riemann-Siegel formula with four correction
terms above it.  Both routes stay inside a 1e-8 absolute error budget up to
``HEIGHT_CEILING``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import elementwise
from scipy.special import bernoulli, loggamma

PI = math.pi
TWO_PI = 2.0 * math.pi

HEIGHT_CEILING = 1.0e5
RS_CROSSOVER = 400.0
# Ordinate of the first nontrivial zero; no zero lies in (0, FIRST_ZERO).
FIRST_ZERO = 14.134725141734693

_EM_BERNOULLI_TERMS = 20
_CHUNK = 20000


class ZetaEngineError(ValueError):
    """Raised on out-of-range heights or inconsistent zero tables."""


class UncertifiedRangeError(ZetaEngineError):
    pass


class ZeroTableFormatError(ZetaEngineError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Riemann-Siegel theta and Z
# ---------------------------------------------------------------------------


def theta(t):
    """Riemann-Siegel theta function, exact through log-gamma."""
    t = np.asarray(t, dtype=float)
    out = np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(PI)
    return out if out.ndim else float(out)


def theta_prime(t):
    t = np.asarray(t, dtype=float)
    from scipy.special import digamma

    out = 0.5 * np.real(digamma(0.25 + 0.5j * t)) - 0.5 * math.log(PI)
    return out if out.ndim else float(out)


def _psi_taylor(degree: int = 90, radius: float = 1.5, nodes: int = 256) -> np.ndarray:
    # Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) is entire and even about
    # p = 1/2; its Taylor coefficients come from a Cauchy integral on a circle.
    z = radius * np.exp(2j * PI * np.arange(nodes) / nodes)
    p = 0.5 + z
    vals = np.cos(2 * PI * (p * p - p - 1.0 / 16)) / np.cos(2 * PI * p)
    coeffs = (np.fft.fft(vals) / nodes).real / radius ** np.arange(nodes)
    coeffs = coeffs[: degree + 1].copy()
    coeffs[1::2] = 0.0
    return coeffs


def _rs_correction_polys() -> list[np.polynomial.Polynomial]:
    psi = np.polynomial.Polynomial(_psi_taylor())

    def d(k: int) -> np.polynomial.Polynomial:
        return psi.deriv(k) if k else psi

    pi2, pi4, pi6, pi8 = PI**2, PI**4, PI**6, PI**8
    return [
        d(0),
        -d(3) / (96 * pi2),
        d(2) / (64 * pi2) + d(6) / (18432 * pi4),
        -d(1) / (64 * pi2) - d(5) / (3840 * pi4) - d(9) / (5308416 * pi6),
        d(0) / (128 * pi2)
        + 19 * d(4) / (24576 * pi4)
        + 11 * d(8) / (5898240 * pi6)
        + d(12) / (2038431744 * pi8),
    ]


_RS_POLYS = _rs_correction_polys()
_BERNOULLI = bernoulli(2 * _EM_BERNOULLI_TERMS)


def _zeta_half_em(t: np.ndarray) -> np.ndarray:
    """zeta(1/2 + it) by Euler-Maclaurin summation (vectorised over t)."""
    s = 0.5 + 1j * t
    big_n = (t / PI).astype(int) + 20
    n_max = int(big_n.max())
    n = np.arange(1, n_max, dtype=float)
    mask = n[None, :] < big_n[:, None]
    terms = np.exp(-s[:, None] * np.log(n)[None, :])
    acc = np.where(mask, terms, 0.0).sum(axis=1)
    bn = big_n.astype(float)
    acc += bn ** (1 - s) / (s - 1) + 0.5 * bn ** (-s)
    term = s * bn ** (-s - 1)
    for k in range(1, _EM_BERNOULLI_TERMS + 1):
        acc += _BERNOULLI[2 * k] / math.factorial(2 * k) * term
        term = term * (s + 2 * k - 1) * (s + 2 * k) / bn**2
    return acc


def _z_riemann_siegel(t: np.ndarray) -> np.ndarray:
    a = np.sqrt(t / TWO_PI)
    big_n = np.floor(a).astype(int)
    frac = a - big_n
    n = np.arange(1, int(big_n.max()) + 1, dtype=float)
    phase = theta(t)[:, None] - t[:, None] * np.log(n)[None, :]
    main = np.where(n[None, :] <= big_n[:, None], np.cos(phase) / np.sqrt(n)[None, :], 0.0)
    total = 2.0 * main.sum(axis=1)
    x = frac - 0.5
    corr = np.zeros_like(t)
    for k, poly in enumerate(_RS_POLYS):
        corr += poly(x) * a ** (-k)
    sign = np.where(big_n % 2 == 1, 1.0, -1.0)
    return total + sign * a**-0.5 * corr


def _check_heights(t: np.ndarray) -> None:
    if np.any(t < 0):
        raise ZetaEngineError("hardy_z is defined here for t >= 0")
    if np.any(t > HEIGHT_CEILING):
        raise ZetaEngineError(
            f"t = {float(t.max()):g} exceeds the height ceiling {HEIGHT_CEILING:g}"
        )


def rotated_zeta(t):
    """exp(i theta(t)) zeta(1/2 + it) as a complex number.

    Real up to rounding; the imaginary part is a check on the functional
    equation.  Always uses Euler-Maclaurin, so cost grows linearly in t.
    """
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    _check_heights(arr)
    out = np.exp(1j * theta(arr)) * _zeta_half_em(arr)
    return out if np.ndim(t) else complex(out[0])


def hardy_z(t):
    """Hardy's Z(t), real, with |Z(t)| = |zeta(1/2 + it)|."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    _check_heights(arr)
    out = np.empty_like(arr)
    low = arr < RS_CROSSOVER
    if low.any():
        tl = arr[low]
        out[low] = np.real(np.exp(1j * theta(tl)) * _zeta_half_em(tl))
    high = np.flatnonzero(~low)
    for start in range(0, high.size, _CHUNK):
        idx = high[start : start + _CHUNK]
        out[idx] = _z_riemann_siegel(arr[idx])
    return out if np.ndim(t) else float(out[0])


def hardy_z_derivative(t, h: float = 1e-5):
    """Z'(t) by central differences with a fixed step."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    _check_heights(arr + h)
    lo = np.maximum(arr - h, 0.0)
    out = (hardy_z(arr + h) - hardy_z(lo)) / (arr + h - lo)
    return out if np.ndim(t) else float(out[0])


def hardy_z_derivative_richardson(t, h: float = 1e-3):
    """Z'(t) by Richardson-extrapolated central differences (cross-check)."""
    d1 = (hardy_z(np.asarray(t) + h) - hardy_z(np.asarray(t) - h)) / (2 * h)
    h2 = h / 2
    d2 = (hardy_z(np.asarray(t) + h2) - hardy_z(np.asarray(t) - h2)) / (2 * h2)
    return (4 * d2 - d1) / 3


def gram_point(n):
    """Gram point g_n, the solution of theta(g_n) = n pi (n >= -1)."""
    n = np.asarray(n, dtype=float)
    # Asymptotic starting guess, then Newton on theta.
    g = TWO_PI * np.exp(1 + _lambert_w((8 * n + 1) / (8 * math.e)))
    for _ in range(50):
        step = (theta(g) - n * PI) / theta_prime(g)
        g = g - step
        if np.all(np.abs(step) < 1e-12 * np.maximum(1.0, g)):
            break
    return g if g.ndim else float(g)


def _lambert_w(x):
    from scipy.special import lambertw

    return np.real(lambertw(x))


def smooth_count(t):
    """Main term (T/2pi) log(T/2pi) - T/2pi + 7/8 of the zero counting function."""
    t = np.asarray(t, dtype=float)
    x = t / TWO_PI
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(t > 0, x * np.log(np.where(t > 0, x, 1.0)) - x + 0.875, 0.875)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Zero tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalZero:
    ordinate: float
    multiplicity: int = 1

    def __post_init__(self):
        if not self.ordinate > 0:
            raise ZetaEngineError("zero ordinate must be positive")
        if self.multiplicity < 1:
            raise ZetaEngineError("multiplicity must be >= 1")


@dataclass(frozen=True)
class CountingFunctionValue:
    big_n: int
    smooth_main: float
    s_of_t: float


@dataclass
class ZeroTable:
    """Strictly increasing zero ordinates with multiplicities.

    ``height_range`` is the interval on which the table is complete.  It is
    ``None`` for an empty imported table.  ``uncertified`` lists windows where
    the zero count could not be certified.
    """

    ordinates: np.ndarray
    multiplicities: np.ndarray
    height_range: tuple[float, float] | None
    source: str = "computed"
    uncertified: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.ordinates = np.asarray(self.ordinates, dtype=float)
        self.multiplicities = np.asarray(self.multiplicities, dtype=int)
        if self.source not in ("computed", "imported", "synthetic"):
            raise ZetaEngineError(f"unknown source {self.source!r}")
        if self.ordinates.shape != self.multiplicities.shape:
            raise ZetaEngineError("ordinates and multiplicities differ in length")
        if self.ordinates.size and np.any(np.diff(self.ordinates) <= 0):
            raise ZetaEngineError("ordinates must be strictly increasing")
        if self.ordinates.size and self.ordinates[0] <= 0:
            raise ZetaEngineError("ordinates must be positive")
        if np.any(self.multiplicities < 1):
            raise ZetaEngineError("multiplicities must be >= 1")
        if self.source != "synthetic" and np.any(self.multiplicities != 1):
            raise ZetaEngineError("only synthetic tables may carry multiplicity > 1")

    @classmethod
    def synthetic(
        cls,
        ordinates: Sequence[float],
        multiplicities: Sequence[int] | None = None,
        height_range: tuple[float, float] = (0.0, math.inf),
    ) -> ZeroTable:
        ords = np.asarray(ordinates, dtype=float)
        mult = np.ones(ords.size, dtype=int) if multiplicities is None else multiplicities
        return cls(ords, np.asarray(mult, dtype=int), height_range, "synthetic")

    def __len__(self) -> int:
        return int(self.ordinates.size)

    @property
    def zeros(self) -> list[CriticalZero]:
        return [CriticalZero(float(g), int(m)) for g, m in zip(self.ordinates, self.multiplicities)]

    def __iter__(self) -> Iterator[CriticalZero]:
        return iter(self.zeros)

    @property
    def certified(self) -> bool:
        return not self.uncertified

    @property
    def total_count(self) -> int:
        return int(self.multiplicities.sum())

    def covers(self, lo: float, hi: float) -> bool:
        """True if the table is complete (and certified) on [lo, hi].

        A table whose lower end lies at or below the first zero covers the
        whole of (0, hi].
        """
        if self.height_range is None or self.uncertified_overlap(lo, hi):
            return False
        a, b = self.height_range
        lo_ok = a <= lo or a <= FIRST_ZERO
        return lo_ok and hi <= b

    def uncertified_overlap(self, lo: float, hi: float) -> bool:
        return any(a < hi and b > lo for a, b in self.uncertified)

    def require(self, lo: float, hi: float) -> None:
        if not self.covers(lo, hi):
            raise UncertifiedRangeError(
                f"table (range {self.height_range}, source {self.source}) is not "
                f"certified on [{lo:g}, {hi:g}]"
            )

    def count_upto(self, t) -> np.ndarray | int:
        """Sum of multiplicities over ordinates <= t (vectorised, no range check)."""
        cum = np.concatenate([[0], np.cumsum(self.multiplicities)])
        idx = np.searchsorted(self.ordinates, np.asarray(t, dtype=float), side="right")
        out = cum[idx]
        return out if np.ndim(out) else int(out)

    def restrict(self, hi: float, lo: float = 0.0) -> ZeroTable:
        keep = (self.ordinates > lo) & (self.ordinates <= hi)
        return ZeroTable(
            self.ordinates[keep], self.multiplicities[keep], self.height_range, self.source,
            list(self.uncertified),
        )

    def expanded(self) -> np.ndarray:
        """Ordinates repeated according to multiplicity (the sequence {gamma})."""
        return np.repeat(self.ordinates, self.multiplicities)


def count_zeros(big_t: float, table: ZeroTable) -> CountingFunctionValue:
    if table.height_range is None:
        raise UncertifiedRangeError("empty table has no certified range")
    # N(T) depends on every ordinate below T, not just the neighbourhood of T
    if not table.covers(0.0, big_t):
        raise UncertifiedRangeError(f"table is not certified on (0, {big_t:g}]; range {table.height_range}")
    big_n = int(table.count_upto(big_t))
    main = float(smooth_count(big_t))
    return CountingFunctionValue(big_n, main, big_n - main)


# ---------------------------------------------------------------------------
# Zero finding
# ---------------------------------------------------------------------------


def turing_bound(t2: float) -> float:
    # |int_{t1}^{t2} S(t) dt| <= 2.30 + 0.128 log(t2 / 2pi)  (Turing's constants,
    # padded for heights below 168 pi where they are not proved).
    return 2.30 + 0.128 * math.log(max(t2, TWO_PI) / TWO_PI) + 0.5


def _theta_integral(t1: float, t2: float) -> float:
    return integrate.quad(theta, t1, t2, limit=200)[0]


def _integral_s(ordinates: np.ndarray, n_before: int, t1: float, t2: float) -> float:
    """int_{t1}^{t2} S(t) dt with S(t) = N(t) - theta(t)/pi - 1."""
    inside = ordinates[(ordinates > t1) & (ordinates <= t2)]
    int_n = n_before * (t2 - t1) + float(np.sum(t2 - inside))
    return int_n - _theta_integral(t1, t2) / PI - (t2 - t1)


def _scan(lo: float, hi: float, per_gram: int) -> np.ndarray:
    """Sign-change brackets refined to zeros of Z on [lo, hi]."""
    # Below t = 10 theta is not monotone; use a plain grid there, then points
    # equally spaced in theta (``per_gram`` per Gram interval).
    pieces = []
    if lo < 10.0:
        pieces.append(np.arange(lo, min(hi, 10.0), 0.25))
    start = max(lo, 10.0)
    if hi > start:
        k0 = theta(start) / PI
        k1 = theta(hi) / PI
        fracs = np.arange(math.ceil(k0 * per_gram), math.floor(k1 * per_gram) + 1) / per_gram
        pieces.append(np.atleast_1d(gram_point(fracs)))
    pieces.append([start, hi])
    grid = np.unique(np.concatenate(pieces))
    grid = grid[(grid >= lo) & (grid <= hi)]
    vals = hardy_z(grid)
    brackets = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    exact = grid[vals == 0.0]
    if brackets.size == 0:
        return np.sort(exact)
    a, b = grid[brackets], grid[brackets + 1]
    res = elementwise.find_root(hardy_z, (a, b), tolerances=dict(xatol=1e-10, xrtol=0.0))
    roots = np.asarray(res.x)
    return np.unique(np.concatenate([roots, exact]))


def _certify(roots: np.ndarray, n_before: int, lo: float, hi: float) -> bool:
    if roots.size and roots[0] < FIRST_ZERO - 1e-6:
        return False
    # Gram-point consistency: at good Gram points zeta > 0 means S(g_n) is even;
    # a parity mismatch between found count and n+1 means zeros were missed.
    if hi > 20:
        n_lo = int(math.ceil(theta(max(lo, 18.0)) / PI))
        n_hi = int(math.floor(theta(hi) / PI))
        if n_hi >= n_lo:
            idx = np.arange(n_lo, n_hi + 1)
            g = np.atleast_1d(gram_point(idx))
            inside = (g >= lo) & (g <= hi)
            g, idx = g[inside], idx[inside]
            if g.size:
                found = n_before + np.searchsorted(roots, g, side="right")
                zs = np.atleast_1d(hardy_z(g))
                parity = np.where((-1.0) ** idx * zs > 0, 0, 1)
                if np.any((found - idx - 1 - parity) % 2 != 0):
                    return False
    # Turing-style integral check on the mean of S over sub-windows.
    span = hi - lo
    if span <= 0:
        return True
    width = max(30.0, span / 50)
    edges = np.arange(lo, hi, width)
    edges = np.append(edges, hi)
    for t1, t2 in zip(edges[:-1], edges[1:]):
        nb = n_before + int(np.searchsorted(roots, t1, side="right"))
        if abs(_integral_s(roots, nb, t1, t2)) > turing_bound(t2) + 0.0:
            return False
    return True


def find_zeros(
    t_min: float, t_max: float, per_gram: int = 8, window: float = 2000.0
) -> ZeroTable:
    """All zeros of Z in [t_min, t_max], certified by count checks.

    The range is split into independent windows.  Each window is scanned with
    ``per_gram`` points per Gram interval, extended by a margin on both sides
    so that missed pairs near the edges still perturb the integral of S(t).
    Windows failing certification are rescanned at 4x density, twice, and
    reported in ``uncertified`` if they still fail.
    """
    if not 0 <= t_min < t_max:
        raise ZetaEngineError("need 0 <= t_min < t_max")
    if t_max > HEIGHT_CEILING:
        raise ZetaEngineError(f"t_max exceeds the height ceiling {HEIGHT_CEILING:g}")

    all_roots: list[np.ndarray] = []
    uncertified: list[tuple[float, float]] = []
    start = t_min
    while start < t_max:
        stop = min(start + window, t_max)
        margin = 40.0
        lo = max(start - margin, 0.0)
        hi = min(stop + margin, HEIGHT_CEILING)
        if lo < FIRST_ZERO - 1.0:
            lo = 0.0
        ok = False
        for density in (per_gram, 4 * per_gram, 16 * per_gram):
            roots = _scan(max(lo, 1.0), hi, density)
            n_before = 0 if lo == 0.0 else _offset_at(lo, roots)
            if n_before is not None and _certify(roots, n_before, lo, hi):
                ok = True
                break
        if not ok:
            uncertified.append((start, stop))
        keep = roots[(roots >= start) & (roots <= stop)]
        if all_roots and keep.size and all_roots[-1].size:
            keep = keep[keep > all_roots[-1][-1] + 1e-7]
        all_roots.append(keep)
        start = stop

    ords = np.concatenate(all_roots) if all_roots else np.empty(0)
    return ZeroTable(ords, np.ones(ords.size, dtype=int), (t_min, t_max), "computed", uncertified)


def _offset_at(lo: float, roots: np.ndarray, votes: int = 7) -> int | None:
    """N(lo) inferred from good Gram points above lo.

    Each good Gram point g_k (zeta(1/2 + i g_k) > 0) gives the estimate
    k + 1 - #{found zeros in (lo, g_k]}, exact when S(g_k) = 0; the most
    common estimate wins.
    """
    n = int(math.ceil(theta(lo) / PI))
    ks = np.arange(n, n + 60)
    g = np.atleast_1d(gram_point(ks))
    good = (-1.0) ** ks * hardy_z(g) > 0
    estimates = ks[good] + 1 - np.searchsorted(roots, g[good], side="right")
    if estimates.size == 0:
        return None
    values, counts = np.unique(estimates[:votes], return_counts=True)
    return int(values[np.argmax(counts)])


# ---------------------------------------------------------------------------
# Import / export
# ---------------------------------------------------------------------------


def import_zero_table(path: str | Path, format: str = "plain-ordinates") -> ZeroTable:
    if format != "plain-ordinates":
        raise ZeroTableFormatError(f"unsupported format {format!r}")
    ords: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                value = float(line)
            except ValueError:
                raise ZeroTableFormatError(f"cannot parse {line!r}", lineno) from None
            if not math.isfinite(value) or value <= 0:
                raise ZeroTableFormatError(f"ordinate {line!r} is not positive", lineno)
            if ords and value <= ords[-1]:
                raise ZeroTableFormatError("ordinates not strictly increasing", lineno)
            ords.append(value)
    height = (ords[0], ords[-1]) if ords else None
    return ZeroTable(np.asarray(ords), np.ones(len(ords), dtype=int), height, "imported")


def export_zero_table(table: ZeroTable, path: str | Path, decimals: int = 6) -> Path:
    """Write one ordinate per line plus a ``.json`` sidecar."""
    path = Path(path)
    fmt = f"{{:.{decimals}f}}\n"
    with open(path, "w", encoding="utf-8") as fh:
        for g in table.ordinates:
            fh.write(fmt.format(g))
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = {
        "source": table.source,
        "height_range": list(table.height_range) if table.height_range else None,
        "count": table.total_count,
    }
    sidecar.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return sidecar
