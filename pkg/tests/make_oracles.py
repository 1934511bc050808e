"""Regenerate the reference values frozen in the test modules.

Run with ``python3 tests/make_oracles.py``. Uses mpmath at 40 digits and
routes that share no code with the package:

* ``g`` from its definition,
* additive-noise photon laws from the radial displacement integral
  ``int_0^inf exp(-x/n)/n * |<l|D(beta)|m>|^2 dx`` with ``x = |beta|^2`` and the
  associated-Laguerre matrix elements,
* thermal-noise laws as binomial mixtures of those integrals.
"""

import mpmath as mp

mp.mp.dps = 40


def g(x):
    x = mp.mpf(x)
    return (x + 1) * mp.log(x + 1, 2) - (x * mp.log(x, 2) if x > 0 else 0)


def disp_element_sq(l, m, x):
    lo, hi = min(l, m), max(l, m)
    return mp.factorial(lo) / mp.factorial(hi) * x ** (hi - lo) * mp.e ** (-x) * mp.laguerre(lo, hi - lo, x) ** 2


def additive_law(l, m, n_bar):
    n_bar = mp.mpf(n_bar)
    return mp.quad(lambda x: mp.e ** (-x / n_bar) / n_bar * disp_element_sq(l, m, x), [0, 10, 50, mp.inf])


def thermal_law(l, k, eta, n_b):
    eta, n_b = mp.mpf(eta), mp.mpf(n_b)
    noise = (1 - eta) * n_b
    return mp.fsum(
        mp.binomial(k, m) * eta**m * (1 - eta) ** (k - m) * additive_law(l, m, noise) for m in range(k + 1)
    )


if __name__ == "__main__":
    for x in ("1", "0.5", "1/3", "3", "2"):
        print("g", x, mp.nstr(g(mp.mpmathify(eval(x, {}, {})) if "/" in x else x), 17))
    print("g(1)-g(0.5)", mp.nstr(g(1) - g(0.5), 17))
    print("g(2)-log2(3)", mp.nstr(g(2) - mp.log(3, 2), 17))
    print("g(1)-1", mp.nstr(g(1) - 1, 17))
    for l, m, n in ((0, 0, 1), (3, 1, 0.7), (0, 4, 2.5), (5, 5, 0.3), (2, 6, 4)):
        print("additive", l, m, n, mp.nstr(additive_law(l, m, n), 17))
    for l, k, eta, nb in ((0, 0, 0.5, 1), (2, 3, 0.6, 0.8), (7, 4, 0.25, 2)):
        print("thermal", l, k, eta, nb, mp.nstr(thermal_law(l, k, eta, nb), 17))
    # renyi-2 of the thermal vacuum output (geometric, mean N): log2(2N + 1)
    print("renyi3 N=0.5", mp.nstr(mp.log((mp.mpf(1.5)) ** 3 - mp.mpf(0.5) ** 3, 2) / 2, 17))
