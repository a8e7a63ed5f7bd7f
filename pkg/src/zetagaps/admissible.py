"""Admissible test functions, the Selberg minorant and the functional c(lambda; r).

A function r belongs to the class A(lambda) when it is even and continuous,
r(0) = 1, r(u) <= 0 for |u| > lambda and its Fourier transform is
nonnegative.  Positivity of

    c(lambda; r) = r_hat(0) - 1 + 2 int_0^1 alpha r_hat(alpha) d alpha

forces close pairs of zeros; the thresholds below are the smallest lambda
for which the Selberg family reaches a given c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

PI = math.pi

# n* <= 1.3208 is the best known bound for the normalised multiplicity moment.
N_STAR_BOUND = 1.3208
N_STAR_PRESETS = {"best-known": 1.3208, "mu-dd-below-one": 1.2826}

_POLE_WINDOW = 0.5


class AdmissibilityError(ValueError):
    pass


def selberg_r(x):
    """Selberg minorant R(x) = (sin pi x / pi x)^2 / (1 - x^2).

    R(0) = 1 and R(+-1) = 0.  For 1/2 < |x| < 3/2 the value is computed from
    eps = 1 - |x| (exact there) as sinc(eps)^2 eps / ((1 - eps)^2 (2 - eps)),
    the same function without the cancellation in sin(pi x) and 1 - x^2.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    near = np.abs(ax - 1.0) < _POLE_WINDOW
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = np.sinc(x) ** 2 / (1.0 - x * x)
    eps = 1.0 - ax
    with np.errstate(divide="ignore", invalid="ignore"):
        pole = np.sinc(eps) ** 2 * eps / ((1.0 - eps) ** 2 * (2.0 - eps))
    out = np.where(near, pole, regular)
    return out if out.ndim else float(out)


def selberg_r_hat(t):
    """Fourier transform of R: 1 - |t| + sin(2 pi |t|) / 2 pi on [-1, 1], else 0."""
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    out = np.where(at <= 1.0, 1.0 - at + np.sin(2 * PI * at) / (2 * PI), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TestFunction:
    """An even pair (r, r_hat) with the lambda of its admissible class.

    ``transform_support`` is the half-width of supp r_hat, or ``None`` when
    the transform is not compactly supported.
    """

    value: Callable
    transform: Callable
    support_lambda: float
    transform_support: float | None
    family: str = "custom"

    __test__ = False  # not a pytest class


def scale(lam: float) -> TestFunction:
    """The Selberg family member r(u) = R(u / lambda) in A(lambda)."""
    if not lam > 0:
        raise AdmissibilityError("lambda must be positive")
    return TestFunction(
        value=lambda u: selberg_r(np.asarray(u, dtype=float) / lam),
        transform=lambda a: lam * selberg_r_hat(lam * np.asarray(a, dtype=float)),
        support_lambda=lam,
        transform_support=1.0 / lam,
        family="selberg",
    )


def c_functional(lam: float, r: TestFunction) -> float:
    """r_hat(0) - 1 + 2 int_0^1 alpha r_hat(alpha) d alpha by adaptive quadrature."""
    pts = None
    if r.transform_support is not None and r.transform_support < 1.0:
        pts = [r.transform_support]
    val, err = integrate.quad(
        lambda a: a * float(r.transform(a)), 0.0, 1.0, points=pts, epsabs=1e-14, epsrel=1e-14,
        limit=200,
    )
    return float(r.transform(0.0)) - 1.0 + 2.0 * val


def _alpha_sin_integral(k: float, m: float) -> float:
    # int_0^m alpha sin(k alpha) d alpha = m^2 (sin z - z cos z) / z^2, z = k m
    z = k * m
    if abs(z) < 1e-2:
        # (sin z - z cos z)/z^2 = sum_j (-1)^{j+1} 2j z^{2j-1} / (2j+1)!
        s = sum((-1) ** (j + 1) * 2 * j * z ** (2 * j - 1) / math.factorial(2 * j + 1) for j in range(1, 8))
        return m * m * s
    return m * m * (math.sin(z) - z * math.cos(z)) / (z * z)


def c_selberg_closed_form(lam: float) -> float:
    """c(lambda; R(./lambda)) in closed form."""
    if not lam > 0:
        raise AdmissibilityError("lambda must be positive")
    m = min(1.0, 1.0 / lam)
    k = 2 * PI * lam
    inner = m * m / 2 - lam * m**3 / 3 + _alpha_sin_integral(k, m) / (2 * PI)
    return lam - 1.0 + 2.0 * lam * inner


# ---------------------------------------------------------------------------
# Thresholds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdQuery:
    """Solve c(lambda) = target.

    target 0 gives the spacing bound; target n* - 1 the distinct-gap bound.
    """

    target: float
    n_star_bound: float = N_STAR_BOUND

    def __post_init__(self):
        if self.n_star_bound < 1:
            raise AdmissibilityError("n* is at least 1")

    @classmethod
    def spacing(cls) -> ThresholdQuery:
        return cls(0.0)

    @classmethod
    def distinct(cls, n_star_bound: float = N_STAR_BOUND) -> ThresholdQuery:
        return cls(n_star_bound - 1.0, n_star_bound)


@dataclass(frozen=True)
class ThresholdResult:
    family: str
    lambda_root: float
    target: float
    c_at_root: float

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "lambda_root": self.lambda_root,
            "target": self.target,
            "c_at_root": self.c_at_root,
        }


def solve_threshold(
    q: ThresholdQuery,
    bracket: tuple[float, float],
    c: Callable[[float], float] = c_selberg_closed_form,
    family: str = "selberg",
) -> ThresholdResult:
    lo, hi = bracket
    f_lo, f_hi = c(lo) - q.target, c(hi) - q.target
    if f_lo * f_hi > 0:
        raise AdmissibilityError(
            f"no sign change of c - {q.target} on [{lo}, {hi}] ({f_lo:.3g}, {f_hi:.3g})"
        )
    samples = np.array([c(x) for x in np.linspace(lo, hi, 65)])
    if not (np.all(np.diff(samples) > 0) or np.all(np.diff(samples) < 0)):
        raise AdmissibilityError("c is not monotone on the bracket")
    root = optimize.brentq(lambda x: c(x) - q.target, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    return ThresholdResult(family, float(root), q.target, float(c(root)))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    passed: bool
    r_at_zero: float
    worst_sign_violation: float
    worst_transform_violation: float
    worst_evenness: float
    failures: list[str] = field(default_factory=list)


def validate_admissible(r: TestFunction, grid_step: float = 1e-3, range: float = 10.0) -> AdmissibilityReport:
    """Check the A(lambda) conditions on a grid.

    Sign condition r(u) <= 1e-12 on (lambda, range]; transform condition
    r_hat >= -1e-12 on the transform support (or on [0, range] if unbounded);
    evenness of both by sampling.
    """
    lam = r.support_lambda
    failures = []
    r0 = float(r.value(0.0))
    if r0 != 1.0:
        failures.append(f"r(0) = {r0!r} != 1")

    u = np.arange(lam + grid_step, range + grid_step / 2, grid_step)
    ru = np.asarray(r.value(u), dtype=float)
    sign_viol = float(max(ru.max(initial=-np.inf), 0.0)) if u.size else 0.0
    if sign_viol > 1e-12:
        failures.append(f"r(u) > 0 beyond lambda (max {sign_viol:.3g})")

    a_hi = r.transform_support if r.transform_support is not None else range
    a = np.arange(0.0, a_hi + grid_step / 2, grid_step)
    ra = np.asarray(r.transform(a), dtype=float)
    tr_viol = float(max(-ra.min(), 0.0))
    if tr_viol > 1e-12:
        failures.append(f"r_hat < 0 somewhere (min {-tr_viol:.3g})")

    probe = np.linspace(0.0, range, 997)
    even = max(
        float(np.max(np.abs(r.value(probe) - r.value(-probe)))),
        float(np.max(np.abs(r.transform(probe) - r.transform(-probe)))),
    )
    if even > 1e-12:
        failures.append(f"not even (worst {even:.3g})")
    return AdmissibilityReport(not failures, r0, sign_viol, tr_viol, even, failures)


def numerical_transform(
    r: TestFunction, alpha: float, half_width: float | None = None, tail: bool = True
) -> float:
    """Fourier transform of an even r by quadrature.

    Integrates over [-W, W] (W = 5 lambda by default).  R decays like u^-4, so
    the part beyond W is about 2.7e-4 lambda at alpha = 0; with ``tail`` the
    semi-infinite remainder is added as well.
    """
    w = 5.0 * r.support_lambda if half_width is None else half_width
    omega = 2 * PI * abs(alpha)
    f = lambda u: float(r.value(u))
    if omega == 0.0:
        core = integrate.quad(f, 0.0, w, limit=400, epsabs=1e-13)[0]
    else:
        core = integrate.quad(f, 0.0, w, weight="cos", wvar=omega, limit=400, epsabs=1e-13)[0]
    rest = _tail(r, w, omega) if tail else 0.0
    return 2.0 * (core + rest)


def _cos_tail(g, w: float, omega: float) -> float:
    if omega < 1e-8:
        return integrate.quad(g, w, np.inf, epsabs=1e-15)[0]
    return integrate.quad(g, w, np.inf, weight="cos", wvar=omega, limlst=200, epsabs=1e-15)[0]


def _tail(r: TestFunction, w: float, omega: float) -> float:
    """int_w^inf r(u) cos(omega u) du."""
    lam = r.support_lambda
    if r.family != "selberg" or w <= lam:
        return _cos_tail(lambda u: float(r.value(u)), w, omega)
    # R(u/lam) = g(u) sin^2(pi u/lam) with g smooth; expand
    # sin^2 cos = cos/2 - (cos(omega + nu) + cos(omega - nu))/4, nu = 2 pi/lam.
    nu = 2 * PI / lam
    g = lambda u: 1.0 / (PI**2 * (u / lam) ** 2 * (1.0 - (u / lam) ** 2))
    return (
        0.5 * _cos_tail(g, w, omega)
        - 0.25 * _cos_tail(g, w, omega + nu)
        - 0.25 * _cos_tail(g, w, abs(omega - nu))
    )
