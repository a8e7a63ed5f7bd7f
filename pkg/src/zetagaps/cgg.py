"""Exponential polynomials, the mollified main term I(a, b, g1, g2, Q1, Q2) and
the coefficient of the twisted sum Sigma(kappa; eta, P).

The main term is the mixed derivative d^2/du dv at u = v = 0 of A*B + C,
where

    A = (1/theta) int g1(x+u) g2(x+v) + int g1(x+u) int g2(x+v)
    B = int TaQ1 TbQ2 - int TaQ1 int TbQ2
    C = int g1(x+u) int g2(x+v) (Q1(0) - int TaQ1) (Q2(0) - int TbQ2)

with TaQ1 = exp(-a(x + theta u)) Q1(x + theta u), TbQ2 likewise in v, and
all integrals over [0, 1].  Two evaluation routes are kept: an exact one in
the ring of exponential polynomials truncated at u^2 = v^2 = 0, and a
numeric one by central differences over high-precision quadrature.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath as mp
import numpy as np

PI = math.pi

DUAL_PATH_TOLERANCE = 1e-8
IMAGINARY_TOLERANCE = 1e-10
DEFAULT_THETA = 0.4999

_SMALL_RATE = 1e-8
_MP_DPS = 40


class MainTermError(ValueError):
    pass


class DualPathMismatch(MainTermError):
    """The exact and finite-difference evaluations disagree."""


class SigmaRealityError(MainTermError):
    pass


# ---------------------------------------------------------------------------
# Exponential polynomials
# ---------------------------------------------------------------------------


def _key_rate(beta: complex) -> complex:
    beta = complex(beta)
    # merge rates that differ only by rounding noise in the last bits
    return complex(round(beta.real, 14), round(beta.imag, 14))


def _integral_x_m_exp(m: int, beta: complex) -> mp.mpc:
    """int_0^1 x^m e^{beta x} dx at mpmath precision."""
    b = mp.mpc(beta)
    if abs(beta) < _SMALL_RATE:
        # polynomial branch, first-order correction in beta
        return mp.mpf(1) / (m + 1) + b / (m + 2)
    if abs(beta) <= m + 1:
        # series sum_k beta^k / (k! (m + k + 1)), no cancellation at this size
        total, term, k = mp.mpc(0), mp.mpc(1), 0
        while True:
            add = term / (m + k + 1)
            total += add
            if abs(add) < mp.mpf(10) ** (-_MP_DPS) * (1 + abs(total)):
                return total
            k += 1
            term *= b / k
    # forward recurrence I_m = e^b / b - (m / b) I_{m-1}, stable for |b| > m
    eb = mp.exp(b)
    val = (eb - 1) / b
    for j in range(1, m + 1):
        val = eb / b - j / b * val
    return val


@dataclass
class ExpPolynomial:
    """sum c x^m e^{beta x}, stored as {(m, beta): c}."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (m, beta), c in dict(self.terms).items():
            if int(m) < 0:
                raise MainTermError("powers must be nonnegative")
            key = (int(m), _key_rate(beta))
            clean[key] = clean.get(key, 0j) + complex(c)
        self.terms = {k: c for k, c in clean.items() if c != 0}

    # construction -------------------------------------------------------

    @classmethod
    def term(cls, coeff: complex, power: int = 0, rate: complex = 0.0) -> ExpPolynomial:
        return cls({(power, rate): coeff})

    @classmethod
    def from_terms(cls, triples: Iterable[tuple[complex, int, complex]]) -> ExpPolynomial:
        out = cls()
        for c, m, beta in triples:
            out = out + cls.term(c, m, beta)
        return out

    @classmethod
    def from_polynomial(cls, coeffs, rate: complex = 0.0) -> ExpPolynomial:
        """Polynomial (coefficients lowest degree first) times e^{rate x}."""
        if isinstance(coeffs, np.polynomial.Polynomial):
            coeffs = coeffs.coef
        return cls({(m, rate): c for m, c in enumerate(coeffs)})

    @classmethod
    def zero(cls) -> ExpPolynomial:
        return cls()

    def as_triples(self) -> list[tuple[complex, int, complex]]:
        return [(c, m, beta) for (m, beta), c in sorted(self.terms.items(), key=_sort_key)]

    # algebra ------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExpPolynomial):
            other = ExpPolynomial.term(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return ExpPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpPolynomial):
            c = complex(other)
            return ExpPolynomial({k: c * v for k, v in self.terms.items()})
        out: dict = {}
        for (m1, b1), c1 in self.terms.items():
            for (m2, b2), c2 in other.terms.items():
                key = (m1 + m2, _key_rate(b1 + b2))
                out[key] = out.get(key, 0j) + c1 * c2
        return ExpPolynomial(out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self) -> ExpPolynomial:
        out: dict = {}
        for (m, b), c in self.terms.items():
            if b != 0:
                out[(m, b)] = out.get((m, b), 0j) + c * b
            if m > 0:
                out[(m - 1, b)] = out.get((m - 1, b), 0j) + c * m
        return ExpPolynomial(out)

    def shift(self, h: complex) -> ExpPolynomial:
        """x -> x + h, expanded binomially."""
        out: dict = {}
        for (m, b), c in self.terms.items():
            scale = c * cmath.exp(b * h)
            for j in range(m + 1):
                key = (j, b)
                out[key] = out.get(key, 0j) + scale * math.comb(m, j) * h ** (m - j)
        return ExpPolynomial(out)

    # evaluation ---------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for (m, b), c in self.terms.items():
            out = out + c * x**m * np.exp(b * x)
        return out if out.ndim else complex(out)

    def mp_eval(self, x) -> mp.mpc:
        total = mp.mpc(0)
        for (m, b), c in self.terms.items():
            total += mp.mpc(c) * x**m * mp.exp(mp.mpc(b) * x)
        return total

    def integrate(self) -> complex:
        """Exact int_0^1 of the expression."""
        with mp.workdps(_MP_DPS):
            total = mp.mpc(0)
            for (m, b), c in self.terms.items():
                total += mp.mpc(c) * _integral_x_m_exp(m, b)
            return complex(total)

    @property
    def max_power(self) -> int:
        return max((m for m, _ in self.terms), default=0)

    @property
    def max_rate(self) -> float:
        return max((abs(b) for _, b in self.terms), default=0.0)


def _sort_key(item):
    (m, b), _ = item
    return (b.real, b.imag, m)


def as_exppoly(obj) -> ExpPolynomial:
    if isinstance(obj, ExpPolynomial):
        return obj
    return ExpPolynomial.from_polynomial(np.asarray(obj, dtype=complex))


# ---------------------------------------------------------------------------
# Truncated jets in (u, v) with u^2 = v^2 = 0
# ---------------------------------------------------------------------------


@dataclass
class _Jet:
    """c0 + cu u + cv v + cuv u v; coefficients are numbers or ExpPolynomials."""

    c0: object
    cu: object
    cv: object
    cuv: object

    def __add__(self, o):
        if not isinstance(o, _Jet):
            return _Jet(self.c0 + o, self.cu, self.cv, self.cuv)
        return _Jet(self.c0 + o.c0, self.cu + o.cu, self.cv + o.cv, self.cuv + o.cuv)

    __radd__ = __add__

    def __neg__(self):
        return _Jet(-self.c0, -self.cu, -self.cv, -self.cuv)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, _Jet):
            return _Jet(self.c0 * o, self.cu * o, self.cv * o, self.cuv * o)
        return _Jet(
            self.c0 * o.c0,
            self.c0 * o.cu + self.cu * o.c0,
            self.c0 * o.cv + self.cv * o.c0,
            self.c0 * o.cuv + self.cu * o.cv + self.cv * o.cu + self.cuv * o.c0,
        )

    __rmul__ = __mul__

    def integrate(self) -> _Jet:
        return _Jet(*(c.integrate() for c in (self.c0, self.cu, self.cv, self.cuv)))


def _shift_u(f: ExpPolynomial, scale: float = 1.0) -> _Jet:
    z = ExpPolynomial()
    return _Jet(f, scale * f.derivative(), z, z)


def _shift_v(f: ExpPolynomial, scale: float = 1.0) -> _Jet:
    z = ExpPolynomial()
    return _Jet(f, z, scale * f.derivative(), z)


# ---------------------------------------------------------------------------
# Main term
# ---------------------------------------------------------------------------


@dataclass
class MainTermInput:
    a: complex
    b: complex
    g1: ExpPolynomial
    g2: ExpPolynomial
    q1: np.polynomial.Polynomial
    q2: np.polynomial.Polynomial
    theta: float = DEFAULT_THETA

    def __post_init__(self):
        self.g1 = as_exppoly(self.g1)
        self.g2 = as_exppoly(self.g2)
        self.q1 = _real_poly(self.q1)
        self.q2 = _real_poly(self.q2)
        if not 0 < self.theta < 0.5:
            raise MainTermError("theta must lie in (0, 1/2)")
        for name, g in (("g1", self.g1), ("g2", self.g2)):
            if abs(g(0.0)) > 1e-12:
                raise MainTermError(f"{name}(0) must vanish, got {g(0.0)}")

    def _blocks(self):
        f1 = ExpPolynomial.from_polynomial(self.q1.coef, -self.a)
        f2 = ExpPolynomial.from_polynomial(self.q2.coef, -self.b)
        return f1, f2


def _real_poly(p) -> np.polynomial.Polynomial:
    if isinstance(p, np.polynomial.Polynomial):
        coef = p.coef
    else:
        coef = np.atleast_1d(np.asarray(p))
    if np.iscomplexobj(coef) and np.any(np.imag(coef) != 0):
        raise MainTermError("Q1, Q2 must be real polynomials")
    return np.polynomial.Polynomial(np.real(coef).astype(float))


def main_term_symbolic(inp: MainTermInput) -> complex:
    """uv-coefficient of A*B + C computed exactly in the jet ring."""
    th = inp.theta
    f1, f2 = inp._blocks()
    G1 = _shift_u(inp.g1)
    G2 = _shift_v(inp.g2)
    TA = _shift_u(f1, th)
    TB = _shift_v(f2, th)

    iG1, iG2 = G1.integrate(), G2.integrate()
    iTA, iTB = TA.integrate(), TB.integrate()
    A = (G1 * G2).integrate() * (1.0 / th) + iG1 * iG2
    B = (TA * TB).integrate() - iTA * iTB
    C = iG1 * iG2 * (float(inp.q1(0.0)) - iTA) * (float(inp.q2(0.0)) - iTB)
    return complex((A * B + C).cuv)


class _GaussLegendre:
    _cache: dict = {}

    def __new__(cls, n: int):
        if n not in cls._cache:
            obj = super().__new__(cls)
            obj._build(n)
            cls._cache[n] = obj
        return cls._cache[n]

    def _build(self, n: int):
        # double-precision nodes polished by Newton steps on P_n at mp precision
        guess, _ = np.polynomial.legendre.leggauss(n)
        with mp.workdps(_MP_DPS):
            xs, ws = [], []
            for t0 in guess:
                t = mp.mpf(float(t0))
                for _ in range(4):
                    p, dp = _legendre_with_derivative(n, t)
                    t -= p / dp
                p, dp = _legendre_with_derivative(n, t)
                xs.append((t + 1) / 2)
                ws.append(1 / ((1 - t * t) * dp * dp))
            self.x, self.w = xs, ws

    def _exp_nodes(self, rate: complex) -> list:
        cache = self.__dict__.setdefault("_exp", {})
        if rate not in cache:
            b = mp.mpc(rate)
            cache[rate] = [mp.exp(b * x) for x in self.x]
        return cache[rate]

    def values(self, f: ExpPolynomial, shift) -> list:
        """f(x + shift) at the nodes, using e^{b(x+s)} = e^{bs} e^{bx}."""
        out = [mp.mpc(0)] * len(self.x)
        xs = [x + shift for x in self.x]
        for (m, b), c in f.terms.items():
            scale = mp.mpc(c) * mp.exp(mp.mpc(b) * shift)
            ex = self._exp_nodes(b)
            out = [o + scale * e * x**m for o, e, x in zip(out, ex, xs)]
        return out

    def integral(self, vals) -> mp.mpc:
        return mp.fsum(w * v for w, v in zip(self.w, vals))


def _legendre_with_derivative(n: int, t):
    p0, p1 = mp.mpf(1), t
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * t * p1 - (k - 1) * p0) / k
    return p1, n * (t * p1 - p0) / (t * t - 1)


def _fd_block_value(inp: MainTermInput, gl: _GaussLegendre, u, v):
    th = inp.theta
    f1, f2 = inp._blocks()
    G1 = gl.values(inp.g1, u)
    G2 = gl.values(inp.g2, v)
    TA = gl.values(f1, th * u)
    TB = gl.values(f2, th * v)
    iG1, iG2 = gl.integral(G1), gl.integral(G2)
    iTA, iTB = gl.integral(TA), gl.integral(TB)
    A = gl.integral([p * q for p, q in zip(G1, G2)]) / th + iG1 * iG2
    B = gl.integral([p * q for p, q in zip(TA, TB)]) - iTA * iTB
    C = iG1 * iG2 * (mp.mpf(float(inp.q1(0.0))) - iTA) * (mp.mpf(float(inp.q2(0.0))) - iTB)
    return A * B + C


def _quadrature_order(inp: MainTermInput) -> int:
    f1, f2 = inp._blocks()
    rate = max(inp.g1.max_rate + inp.g2.max_rate, f1.max_rate + f2.max_rate) + 1.0
    power = max(inp.g1.max_power + inp.g2.max_power, f1.max_power + f2.max_power) + 2
    need = 20 + power + 1.5 * rate
    n = 32
    while n < need:
        n *= 2
    return n


def main_term_numeric(inp: MainTermInput, h: float = 1e-4) -> complex:
    """Mixed central difference of A*B + C over Gauss-Legendre quadrature.

    The quadrature order is doubled until the undifferentiated value is
    stable to 1e-25; the difference quotient at h and h/2 is combined by one
    Richardson step.
    """
    with mp.workdps(_MP_DPS):
        n = _quadrature_order(inp)
        gl = _GaussLegendre(n)
        prev = _fd_block_value(inp, gl, 0, 0)
        while True:
            gl2 = _GaussLegendre(2 * n)
            cur = _fd_block_value(inp, gl2, 0, 0)
            if abs(cur - prev) <= mp.mpf("1e-25") * (1 + abs(cur)) or n > 400:
                break
            n, gl, prev = 2 * n, gl2, cur

        def mixed(step):
            s = mp.mpf(step)
            f = lambda du, dv: _fd_block_value(inp, gl, du, dv)
            return (f(s, s) - f(s, -s) - f(-s, s) + f(-s, -s)) / (4 * s * s)

        d1, d2 = mixed(h), mixed(h / 2)
        return complex((4 * d2 - d1) / 3)


@dataclass(frozen=True)
class MainTermValue:
    value: complex
    symbolic: complex
    numeric: complex | None
    agreement: float | None


def _agreement(x: complex, y: complex) -> float:
    return abs(x - y) / max(abs(x), abs(y), 1e-300) if (x or y) else 0.0


def main_term_i(inp: MainTermInput, check: bool = True, tol: float = DUAL_PATH_TOLERANCE) -> complex:
    """The bracketed factor of the main term (I divided by T log T / 2 pi).

    With ``check`` both routes run and a relative disagreement above ``tol``
    raises DualPathMismatch.  Agreement is judged against an absolute floor
    of 1e-14 so that identically vanishing cases compare cleanly.
    """
    return evaluate_main_term(inp, check, tol).value


def evaluate_main_term(inp: MainTermInput, check: bool = True, tol: float = DUAL_PATH_TOLERANCE) -> MainTermValue:
    sym = main_term_symbolic(inp)
    if not check:
        return MainTermValue(sym, sym, None, None)
    num = main_term_numeric(inp)
    gap = abs(sym - num)
    rel = gap / max(abs(sym), abs(num), 1e-14) if gap else 0.0
    if rel > tol:
        raise DualPathMismatch(
            f"symbolic {sym!r} and finite-difference {num!r} differ by {rel:.3g} (relative)"
        )
    return MainTermValue(sym, sym, num, rel)


# ---------------------------------------------------------------------------
# Sigma coefficient
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaParams:
    theta: float
    kappa: float
    eta: float
    shape_p: tuple = (0.0, 1.0)

    def __post_init__(self):
        coef = tuple(float(c) for c in np.atleast_1d(_coef_of(self.shape_p)))
        object.__setattr__(self, "shape_p", coef)
        if not 0 < self.theta < 0.5:
            raise MainTermError("theta must lie in (0, 1/2)")
        if not 0 < self.eta < self.kappa:
            raise MainTermError("need 0 < eta < kappa")
        if abs(coef[0]) > 1e-14:
            raise MainTermError("P(0) must vanish")

    @property
    def polynomial(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial(self.shape_p)

    def to_json(self) -> dict:
        return {"theta": self.theta, "kappa": self.kappa, "eta": self.eta, "P_coeffs": list(self.shape_p)}


def _coef_of(p):
    if isinstance(p, np.polynomial.Polynomial):
        return p.coef
    return np.asarray(p, dtype=float)


def sigma_input(p: SigmaParams) -> MainTermInput:
    rot = 2j * PI * p.theta * p.eta
    # g1 = P(x) e^{-rot (1 - x)}, g2 = P(x) e^{rot (1 - x)}
    g1 = ExpPolynomial.from_polynomial(np.asarray(p.shape_p) * cmath.exp(-rot), rot)
    g2 = ExpPolynomial.from_polynomial(np.asarray(p.shape_p) * cmath.exp(rot), -rot)
    return MainTermInput(2j * PI * p.kappa, 0.0, g1, g2, [1.0], [0.0, -1.0], p.theta)


@dataclass(frozen=True)
class SigmaCoefficient:
    params: SigmaParams
    c_sigma: float
    imaginary: float
    method_agreement: float | None

    def to_json(self) -> dict:
        out = self.params.to_json()
        out.update({"c_sigma": self.c_sigma, "imaginary_part": self.imaginary,
                    "method_agreement": self.method_agreement})
        return out


def sigma_coefficient_full(p: SigmaParams, check: bool = True) -> SigmaCoefficient:
    mt = evaluate_main_term(sigma_input(p), check=check)
    z = -1j * cmath.exp(1j * PI * p.kappa) * mt.value
    if abs(z.imag) >= IMAGINARY_TOLERANCE:
        raise SigmaRealityError(f"assembled coefficient has imaginary part {z.imag:.3g}")
    return SigmaCoefficient(p, z.real, z.imag, mt.agreement)


def sigma_coefficient(p: SigmaParams, check: bool = True) -> float:
    """c_Sigma = Re[-i e^{pi i kappa} I(2 pi i kappa, 0, g1, g2, 1, -x)].

    Sigma(kappa; eta, P) ~ c_Sigma T log^2 T / 2 pi.
    """
    return sigma_coefficient_full(p, check).c_sigma


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------


@dataclass
class KappaScan:
    rows: list[tuple[float, float]]
    kappa_min: float | None
    crossing: tuple[float, float] | None

    def to_json(self) -> dict:
        return {
            "rows": [{"kappa": k, "c_sigma": c} for k, c in self.rows],
            "kappa_min": self.kappa_min,
            "crossing_bracket": list(self.crossing) if self.crossing else None,
        }


def _sigma_at(theta, eta, shape_p, kappa) -> float:
    return sigma_coefficient(SigmaParams(theta, kappa, eta, shape_p), check=False)


def scan_kappa(
    theta: float, eta: float, shape_p, kappa_grid: Sequence[float], xtol: float = 1e-6
) -> KappaScan:
    """Evaluate c_Sigma on a kappa grid and refine the last sign change.

    ``kappa_min`` is the bisected crossing of the largest positive-to-negative
    sign change, or the smallest grid kappa with c_Sigma < 0 when no crossing
    is bracketed.  Grid points with kappa <= eta are skipped.
    """
    grid = sorted(float(k) for k in kappa_grid if k > eta)
    rows = [(k, _sigma_at(theta, eta, shape_p, k)) for k in grid]
    crossing = None
    for (k0, c0), (k1, c1) in zip(rows, rows[1:]):
        if c0 >= 0 > c1:
            crossing = (k0, k1)
    if crossing is not None:
        lo, hi = crossing
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            if _sigma_at(theta, eta, shape_p, mid) < 0:
                hi = mid
            else:
                lo = mid
        return KappaScan(rows, hi, (lo, hi))
    neg = [k for k, c in rows if c < 0]
    return KappaScan(rows, neg[0] if neg else None, None)


def kappa_crossing(theta: float, eta: float, shape_p, lo: float, hi: float, xtol: float = 1e-6):
    """Smallest kappa in [lo, hi] past which c_Sigma stays negative, by bisection.

    Returns None if c_Sigma(hi) >= 0; returns lo if c_Sigma(lo) < 0 already.
    """
    lo = max(lo, eta + 1e-9)
    if _sigma_at(theta, eta, shape_p, hi) >= 0:
        return None
    if _sigma_at(theta, eta, shape_p, lo) < 0:
        return lo
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if _sigma_at(theta, eta, shape_p, mid) < 0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class OptimizationResult:
    params: SigmaParams
    c_sigma: float
    kappa_min: float
    evaluations: int

    def to_json(self) -> dict:
        out = self.params.to_json()
        out.update({"c_sigma": self.c_sigma, "kappa_min": self.kappa_min, "evaluations": self.evaluations})
        return out


def optimize_parameters(
    p_degree: int = 1,
    theta_bounds: tuple[float, float] = (0.45, DEFAULT_THETA),
    eta_bounds: tuple[float, float] = (0.4, 0.8),
    eta_grid: int = 9,
    theta_grid: int = 3,
    coeff_step: float = 0.5,
    sweeps: int = 3,
    kappa_bracket: tuple[float, float] = (0.85, 1.2),
    seed_point: SigmaParams | None = None,
) -> OptimizationResult:
    """Grid search over (theta, eta) then coordinate descent over the higher
    coefficients of P = x + c2 x^2 + ..., minimising the zero crossing of
    c_Sigma in kappa.  Deterministic; the winner is re-certified by a checked
    sigma_coefficient call at a kappa just past its crossing.
    """
    if not 1 <= p_degree <= 4:
        raise MainTermError("P degree must be between 1 and 4")
    t_lo, t_hi = theta_bounds
    e_lo, e_hi = eta_bounds
    if not (0 < t_lo <= t_hi < 0.5) or not (0 < e_lo <= e_hi) or eta_grid < 1 or theta_grid < 1:
        raise MainTermError("infeasible search bounds")
    evals = 0

    def crossing(th, eta, coef):
        nonlocal evals
        evals += 1
        k = kappa_crossing(th, eta, coef, *kappa_bracket, xtol=1e-5)
        return math.inf if k is None else k

    thetas = np.linspace(t_lo, t_hi, theta_grid) if theta_grid > 1 else np.array([t_hi])
    etas = np.linspace(e_lo, e_hi, eta_grid) if eta_grid > 1 else np.array([e_lo])
    coef = [0.0, 1.0] + [0.0] * (p_degree - 1)
    best = (math.inf, t_hi, e_lo, list(coef))
    candidates = [(float(th), float(et)) for th in thetas for et in etas]
    if seed_point is not None:
        candidates.insert(0, (seed_point.theta, seed_point.eta))
        coef = list(seed_point.shape_p) + [0.0] * (p_degree + 1 - len(seed_point.shape_p))
        best = (math.inf, seed_point.theta, seed_point.eta, coef)
    for th, et in candidates:
        k = crossing(th, et, coef)
        if k < best[0]:
            best = (k, th, et, list(coef))

    k_best, th, et, coef = best
    step = coeff_step
    for _ in range(sweeps):
        for j in range(2, p_degree + 1):
            for sgn in (1.0, -1.0):
                trial = list(coef)
                trial[j] += sgn * step
                k = crossing(th, et, trial)
                if k < k_best:
                    k_best, coef = k, trial
        step /= 2
    if not math.isfinite(k_best):
        raise MainTermError("no negative c_Sigma found inside the kappa bracket")
    kappa = min(k_best + 1e-5, kappa_bracket[1])
    params = SigmaParams(th, kappa, et, tuple(coef))
    cert = sigma_coefficient_full(params, check=True)
    return OptimizationResult(params, cert.c_sigma, k_best, evals)


def parse_polynomial(text: str) -> tuple[float, ...]:
    """Parse 'x', 'x - 0.5*x^2', '2x+x**3' or comma-separated coefficients."""
    s = text.replace(" ", "").replace("**", "^")
    if "x" not in s:
        return tuple(float(c) for c in s.split(","))
    if s[0] not in "+-":
        s = "+" + s
    coef: dict[int, float] = {}
    i = 0
    for m in re.finditer(r"([+-])([0-9.eE]*)\*?(x(?:\^(\d+))?)?", s):
        if m.group(0) == "":
            continue
        if m.start() != i:
            raise MainTermError(f"cannot parse polynomial {text!r}")
        i = m.end()
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = m.group(2)
        if m.group(3) is None:
            power = 0
            if not num:
                raise MainTermError(f"cannot parse polynomial {text!r}")
        else:
            power = int(m.group(4)) if m.group(4) else 1
        val = float(num) if num else 1.0
        coef[power] = coef.get(power, 0.0) + sign * val
    if i != len(s):
        raise MainTermError(f"cannot parse polynomial {text!r}")
    deg = max(coef)
    return tuple(coef.get(j, 0.0) for j in range(deg + 1))
