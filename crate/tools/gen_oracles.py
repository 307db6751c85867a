#!/usr/bin/env python3
"""Generate frozen reference values for the special-function tests.

Requires mpmath. Output is meant to be pasted into Rust test tables; every
value is printed with 17 significant digits so the decimal round-trips to
the nearest f64.
"""

import mpmath as mp

mp.mp.dps = 40


def fmt(x):
    return mp.nstr(x, 17, strip_zeros=False)


def ln_gamma_table():
    print("== ln_gamma: (x, ln|Gamma(x)|, sign) ==")
    xs = [
        "0.1", "0.5", "1.0", "1.5", "2.0", "3.7", "10.0", "42.5",
        "137.3", "200.0", "-0.5", "-1.5", "-2.3", "-6.7", "0.001",
    ]
    for xs_ in xs:
        x = mp.mpf(xs_)
        g = mp.gamma(x)
        print(f"({xs_}, {fmt(mp.log(abs(g)))}, {1.0 if g > 0 else -1.0}),")


def digamma_table():
    print("== digamma: (x, psi(x)) ==")
    xs = ["0.1", "0.5", "1.0", "2.0", "4.2", "11.0", "150.0", "-0.3", "-1.7", "-5.2"]
    for xs_ in xs:
        x = mp.mpf(xs_)
        print(f"({xs_}, {fmt(mp.digamma(x))}),")


def hyp_reg(a, b, c, z):
    """Regularized 2F1 = 2F1/Gamma(c), via limit when c is a nonpositive int."""
    a, b, c, z = mp.mpf(a), mp.mpf(b), mp.mpf(c), mp.mpf(z)
    if c == mp.floor(c) and c <= 0:
        eps = mp.mpf(10) ** (-25)
        return (mp.hyp2f1(a, b, c + eps, z) / mp.gamma(c + eps) +
                mp.hyp2f1(a, b, c - eps, z) / mp.gamma(c - eps)) / 2
    return mp.hyp2f1(a, b, c, z) / mp.gamma(c)


def hyp_table():
    print("== hyp2f1_reg: (a, b, c, z, value) ==")
    cases = [
        # Maclaurin / small |z| region (Pfaff w <= 1/2)
        ("1.0", "1.0", "2.0", "-1.0"),       # ln 2
        ("0.5", "1.25", "1.5", "-0.7"),
        ("2.0", "1.5", "0.5", "-0.9"),
        ("1.0", "1.0", "2.0", "-0.5"),
        # a = 0 degenerate
        ("0.0", "5.5", "3.0", "-7.0"),
        # z = 0
        ("1.3", "2.2", "1.7", "0.0"),
        # connection region, generic (c-a-b nonintegral after Pfaff)
        ("1.0", "0.75", "0.5", "-30.0"),
        ("0.75", "0.95", "0.5", "-1.0e4"),
        ("1.25", "0.85", "1.0", "-1.0e8"),
        ("1.75", "1.35", "1.5", "-4.0e2"),
        # logarithmic connection cases (b - a integral in family terms)
        ("1.0", "1.5", "0.5", "-1.0e4"),     # d=1, alpha=1, kappa=1 family row
        ("1.0", "1.0", "1.0", "-1.0e4"),     # kappa = mu/2 log row, d=2, alpha=1
        ("2.0", "1.5", "1.5", "-1.0e6"),     # d=3, alpha=1, kappa=1
        ("1.5", "2.5", "1.0", "-50.0"),
        # regularized at nonpositive c
        ("0.35", "0.65", "0.0", "-2.0"),
        ("0.35", "0.65", "-1.0", "-2.0"),
        ("1.2", "3.4", "-2.0", "-0.4"),
        # large kappa-ish parameters
        ("2.45", "2.9", "2.5", "-1.0e6"),
    ]
    for a, b, c, z in cases:
        v = hyp_reg(a, b, c, z)
        print(f"({a}, {b}, {c}, {z}, {fmt(v)}),")


def potential_table():
    """V_{kappa,alpha} spot values for the eigenpair tests.

    V(x) = -(2^alpha Gamma((mu+alpha)/2) Gamma(alpha/2+kappa) / Gamma(kappa))
           * (1+|x|^2)^kappa * F_reg((mu+alpha)/2, alpha/2+kappa; mu/2; -|x|^2)
    with mu = d + 2 l.
    """
    print("== potential_value: (d, alpha, l, kappa, r, V) ==")
    cases = [
        (1, "1.0", 0, "1.0", "0.0"),
        (1, "1.0", 0, "1.0", "2.0"),
        (1, "1.0", 0, "0.6", "10.0"),
        (1, "0.5", 0, "0.2", "3.0"),
        (2, "1.0", 0, "0.75", "5.0"),
        (2, "1.0", 0, "1.0", "1.0e4"),
        (3, "1.0", 0, "1.0", "20.0"),
        (3, "1.5", 1, "2.1", "7.0"),
        (1, "1.0", 1, "1.8", "2.5"),
    ]
    for d, alpha, l, kappa, r in cases:
        alpha_, kappa_, r_ = mp.mpf(alpha), mp.mpf(kappa), mp.mpf(r)
        mu = d + 2 * l
        a = (mu + alpha_) / 2
        b = alpha_ / 2 + kappa_
        c = mp.mpf(mu) / 2
        pref = -(2 ** alpha_) * mp.gamma(a) * mp.gamma(b) / mp.gamma(kappa_)
        v = pref * (1 + r_ ** 2) ** kappa_ * hyp_reg(a, b, c, -(r_ ** 2))
        print(f"({d}, {alpha}, {l}, {kappa}, {r}, {fmt(v)}),")


if __name__ == "__main__":
    ln_gamma_table()
    print()
    digamma_table()
    print()
    hyp_table()
    print()
    potential_table()
