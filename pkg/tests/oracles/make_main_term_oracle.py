"""Main-term values from the defining three-block expression.

Each block is an mp.quad integral of the shifted functions and the mixed
u, v derivative comes from mp.diff, so nothing here shares code with the
package's jet-ring or Gauss-Legendre paths.  Writes
tests/data/oracle_main_term.json.

    python tests/oracles/make_main_term_oracle.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
DATA = Path(__file__).resolve().parent.parent / "data"


def expfun(triples):
    """x -> sum c x^m e^{beta x} from (c, m, beta) triples."""
    tr = [(mp.mpc(*c), m, mp.mpc(*b)) for c, m, b in triples]
    return lambda x: mp.fsum(c * x**m * mp.exp(b * x) for c, m, b in tr)


def polyfun(coef):
    return lambda x: mp.fsum(mp.mpf(c) * x**k for k, c in enumerate(coef))


def main_term(case):
    a, b = mp.mpc(*case["a"]), mp.mpc(*case["b"])
    th = mp.mpf(case["theta"])
    g1, g2 = expfun(case["g1"]), expfun(case["g2"])
    q1, q2 = polyfun(case["q1"]), polyfun(case["q2"])

    def F(u, v):
        ta = lambda x: mp.exp(-a * (x + th * u)) * q1(x + th * u)
        tb = lambda x: mp.exp(-b * (x + th * v)) * q2(x + th * v)
        i1 = mp.quad(lambda x: g1(x + u), [0, 1])
        i2 = mp.quad(lambda x: g2(x + v), [0, 1])
        ita = mp.quad(ta, [0, 1])
        itb = mp.quad(tb, [0, 1])
        blk_a = mp.quad(lambda x: g1(x + u) * g2(x + v), [0, 1]) / th + i1 * i2
        blk_b = mp.quad(lambda x: ta(x) * tb(x), [0, 1]) - ita * itb
        blk_c = i1 * i2 * (q1(0) - ita) * (q2(0) - itb)
        return blk_a * blk_b + blk_c

    return mp.diff(F, (0, 0), (1, 1))


def pair(z):
    z = complex(z)
    return [z.real, z.imag]


def random_case(rng):
    def rc(scale):
        return [rng.uniform(-scale, scale), rng.uniform(-scale, scale)]

    def rg():
        # sum of terms with powers >= 1 so that g(0) = 0
        return [[rc(1.0), rng.randint(1, 3), rc(3.0)] for _ in range(rng.randint(1, 3))]

    return {
        "a": rc(7.0),
        "b": rc(7.0),
        "g1": rg(),
        "g2": rg(),
        "q1": [rng.uniform(-1, 1) for _ in range(rng.randint(1, 3))],
        "q2": [rng.uniform(-1, 1) for _ in range(rng.randint(1, 3))],
        "theta": rng.uniform(0.05, 0.49),
    }


def sigma_case(kappa, eta=0.6, theta=0.4999):
    rot = 2j * mp.pi * theta * eta
    c1, c2 = complex(mp.exp(-rot)), complex(mp.exp(rot))
    return {
        "a": [0.0, float(2 * mp.pi * kappa)],
        "b": [0.0, 0.0],
        "g1": [[pair(c1), 1, pair(complex(rot))]],
        "g2": [[pair(c2), 1, pair(complex(-rot))]],
        "q1": [1.0],
        "q2": [0.0, -1.0],
        "theta": theta,
        "kappa": kappa,
    }


def main():
    rng = random.Random(20240601)
    cases = [random_case(rng) for _ in range(6)] + [sigma_case(0.991), sigma_case(0.995)]
    for c in cases:
        val = main_term(c)
        c["value"] = pair(val)
        if "kappa" in c:
            z = -1j * mp.exp(1j * mp.pi * c["kappa"]) * val
            c["c_sigma"] = float(z.real)
            c["c_sigma_imag"] = float(z.imag)
    (DATA / "oracle_main_term.json").write_text(json.dumps(cases, indent=1) + "\n")


if __name__ == "__main__":
    main()
