"""Independent reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/oracles.py
Uses sympy for symbolic derivatives and mpmath for high-precision quadrature.
None of this code shares an evaluation path with the C++ library.
"""
from math import gcd, isqrt

import mpmath as mp
import sympy as sp

mp.mp.dps = 40


def sphere_hessian_det():
    x, y = sp.symbols("x y", real=True)
    f = sp.sqrt(1 - x**2 - y**2)
    h = sp.hessian(f, (x, y))
    det = sp.simplify(h.det().subs({x: sp.Rational(3, 10), y: sp.Rational(2, 5)}))
    print("sphere n=3 det Hess at (0.3,0.4):", det, sp.N(det, 20))


def fermat_second_derivative():
    x = sp.symbols("x", positive=True)
    f = (1 - x**4) ** sp.Rational(1, 4)
    f2 = sp.diff(f, x, 2)
    for v in ["0.01", "0.05", "0.5", "0.99"]:
        print("fermat4 f''(%s) =" % v, sp.N(f2.subs(x, sp.Rational(v)), 20))


def rs_hessian_window():
    x, y = sp.symbols("x y", positive=True)
    a = sp.Rational(3, 2)
    f = (x**a + y**a - 1) ** (1 / a)
    det = sp.lambdify((x, y), sp.hessian(f, (x, y)).det(), "mpmath")
    vals = []
    n = 41
    for i in range(n):
        for j in range(n):
            xv = mp.mpf("1.1") + mp.mpf("0.8") * i / (n - 1)
            yv = mp.mpf("1.1") + mp.mpf("0.8") * j / (n - 1)
            vals.append(abs(det(xv, yv)))
    print("RS(3/2) |det Hess| on 41x41 grid of [1.1,1.9]^2: min", mp.nstr(min(vals), 15),
          "max", mp.nstr(max(vals), 15))


def parabola_counts():
    total = 0
    coprime = 0
    for q in range(1, 11):
        for a in range(0, q + 1):
            if (a * a) % q == 0:
                total += 1
                b = a * a // q
                if gcd(gcd(a, b), q) == 1:
                    coprime += 1
    print("parabola [0,1] Q=10 exact count:", total, "coprime:", coprime)


def circle_count(Q=25):
    total = 0
    for q in range(1, Q + 1):
        for a in range(0, q + 1):
            b2 = q * q - a * a
            b = isqrt(b2)
            if b * b == b2:
                total += 1
    print("circle x in [0,1], Q=%d exact count:" % Q, total)


def bump(u):
    return mp.e ** (-1 / (1 - u * u)) if abs(u) < 1 else mp.mpf(0)


def bump_integrals():
    i1 = mp.quad(lambda u: bump(u), [-1, 0, 1])
    i2 = 2 * mp.pi * mp.quad(lambda u: u * bump(u), [0, 1])
    print("unit bump integral d=1:", mp.nstr(i1, 25))
    print("unit bump integral d=2:", mp.nstr(i2, 25))
    r = mp.mpf("0.3")
    print("bump R=0.3 d=1:", mp.nstr(r * i1, 25), " d=2:", mp.nstr(r * r * i2, 25))
    # main term, weighted paraboloid n=3, Q=100, delta=0.05, bump radius 0.3
    print("main term n=3 Q=100 delta=0.05 R=0.3:", mp.nstr(2 * r * r * i2 / 3 * mp.mpf("0.05") * 100**3, 20))


def oscillatory_parabola():
    # I(j=2,k=1;q=100) for f=x^2, w = bump((x-0.5)/0.3)
    c, r = mp.mpf("0.5"), mp.mpf("0.3")
    q, j, k = 100, 2, 1

    def integrand(x):
        return bump((x - c) / r) * mp.expj(2 * mp.pi * q * (j * x * x - k * x))

    pts = mp.linspace(c - r, c + r, 801)
    val = mp.quad(integrand, pts)
    print("I(2,1;100) parabola:", mp.nstr(val.real, 20), mp.nstr(val.imag, 20))


def dual_parabola_phase():
    # critical point of 2*x^2*... : jf(x)-kx with f=x^2 -> x*=k/(2j); phase phi = f(x*)-k/j x* = -(k/j)^2/4
    j, k = 3, 2
    xs = sp.Rational(k, 2 * j)
    print("parabola phase at critical point j=3,k=2:", xs**2 - sp.Rational(k, j) * xs)


if __name__ == "__main__":
    sphere_hessian_det()
    fermat_second_derivative()
    rs_hessian_window()
    parabola_counts()
    circle_count()
    bump_integrals()
    oscillatory_parabola()
    dual_parabola_phase()
