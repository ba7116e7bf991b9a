"""High-precision reference values frozen into the C++ unit tests.

Every value here is computed from the defining integrals with mpmath
quadrature at 50 digits, never from the closed forms used in the library.
Run: python3 tests/oracles/freeze_values.py
"""
import mpmath as mp

mp.mp.dps = 50


def f_int(A, B, s, n=0):
    """n-th derivative in s of f(s) = int_0^inf exp(-A t^2 - B s t) dt."""
    return (-B) ** n * mp.quad(lambda t: t ** n * mp.exp(-A * t * t - B * s * t), [0, 1 / mp.sqrt(A), mp.inf])


def erfcx(x):
    return mp.exp(x * x) * mp.erfc(x)


def level_consts(twice_j, lam, g2):
    w = 8 * mp.pi * lam ** 3 * (twice_j + 1)
    return w, 64 * w / (3 * g2), 2 * w / g2


def log_norm(twice_j, lam, g2):
    w, A, B = level_consts(twice_j, lam, g2)
    return 2 * sum(mp.log(mp.factorial(k)) for k in range(1, twice_j + 1)) - twice_j * (twice_j + 1) * mp.log(B)


def confluent_log_z(twice_j, omegas, lam=1, g2=1):
    n = twice_j + 1
    w, A, B = level_consts(twice_j, lam, g2)
    groups = []
    for o in sorted(omegas):
        if groups and groups[-1][0] == o:
            groups[-1][1] += 1
        else:
            groups.append([mp.mpf(o), 1])
    rows = [(c, i) for c, k in groups for i in range(k)]
    F = mp.matrix(n, n)
    for a, (c1, i1) in enumerate(rows):
        for b, (c2, i2) in enumerate(rows):
            F[a, b] = f_int(A, B, c1 + c2, i1 + i2) / mp.factorial(i1) / mp.factorial(i2)
    lv = 0
    for g in range(len(groups)):
        for h in range(g + 1, len(groups)):
            lv += groups[g][1] * groups[h][1] * mp.log(groups[h][0] - groups[g][0])
    return log_norm(twice_j, lam, g2) + mp.log(mp.factorial(n)) + mp.log(mp.det(F)) - 2 * lv


def p(name, v):
    print(f"{name:40s} {mp.nstr(v, 20)}")


for x in ["0", "0.25", "0.5", "1", "2", "3.5", "5", "10", "26", "27", "50", "300"]:
    p(f"erfcx({x})", erfcx(mp.mpf(x)))
p("f A=64/3 B=2 w=1", f_int(mp.mpf(64) / 3, 2, 1))
for n in range(4):
    p(f"f^({n}) A=3 B=5 s=0.7", f_int(3, 5, mp.mpf("0.7"), n))
    p(f"f^({n}) A=1072.33 B=100.53 s=4.8", f_int(*level_consts(1, 1, 1)[1:], mp.mpf("4.8"), n))
p("lnZ j=1/2 {1,2}", confluent_log_z(1, [1, 2]))
p("lnZ j=1/2 {29/12,29/12}", confluent_log_z(1, [mp.mpf(29) / 12] * 2))
p("lnZ j=1 {1,2,3}", confluent_log_z(2, [1, 2, 3]))
p("lnZ j=1 phys {3,17/3,17/3}", confluent_log_z(2, [3, mp.mpf(17) / 3, mp.mpf(17) / 3]))
p("lnZ j=0 {1}", confluent_log_z(0, [1]))
p("lnN j=3/2 lam=0.8 g2=1.3", log_norm(3, mp.mpf("0.8"), mp.mpf("1.3")))
