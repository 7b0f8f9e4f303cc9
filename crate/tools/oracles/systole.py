"""Independent systole oracle for the orbit of the truncated cubic pair.

Point: x = 2^(1/3), y = 2^(2/3) truncated to 40 decimals, z = 0, weight
(1/2, 1/2). Lattice g_t u^{-1} Z^3 on the grid t = 15 i / 150. Float LLL
(mpmath, 60 digits) followed by a brute-force coefficient box.
"""
from fractions import Fraction
from itertools import product

import mpmath as mp

mp.mp.dps = 60


def trunc(v, digits=40):
    return Fraction(int(mp.floor(v * mp.mpf(10) ** digits)), 10 ** digits)


X = trunc(mp.cbrt(2))
Y = trunc(mp.cbrt(4))
Z = Fraction(0)


def basis(t):
    el, em, et = mp.e ** (t / 2), mp.e ** (t / 2), mp.e ** (-t)
    inv = [[1, -Z, Z * Y - X], [0, 1, -Y], [0, 0, 1]]
    diag = [el, em, et]
    # columns of g_t u^{-1}
    return [[diag[i] * mp.mpf(inv[i][j].numerator) / inv[i][j].denominator if isinstance(inv[i][j], Fraction)
             else diag[i] * inv[i][j] for i in range(3)] for j in range(3)]


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def lll(b, delta=mp.mpf(3) / 4):
    b = [list(v) for v in b]
    n = len(b)

    def gso():
        bs, mu = [], [[mp.mpf(0)] * n for _ in range(n)]
        for i in range(n):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    k = 1
    while k < n:
        bs, mu = gso()
        for j in range(k - 1, -1, -1):
            r = mp.nint(mu[k][j])
            if r:
                b[k] = [x - r * y for x, y in zip(b[k], b[j])]
                bs, mu = gso()
        if dot(bs[k], bs[k]) >= (delta - mu[k][k - 1] ** 2) * dot(bs[k - 1], bs[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            k = max(k - 1, 1)
    return b


def systole(t, box=3):
    b = lll(basis(t))
    best = None
    for c in product(range(-box, box + 1), repeat=3):
        if c == (0, 0, 0):
            continue
        v = [sum(ci * bi[k] for ci, bi in zip(c, b)) for k in range(3)]
        n = mp.sqrt(dot(v, v))
        if best is None or n < best:
            best = n
    return best


if __name__ == "__main__":
    vals = [(i, systole(mp.mpf(15) * i / 150)) for i in range(151)]
    i, m = min(vals, key=lambda p: p[1])
    print("x =", X)
    print("y =", Y)
    print("min systole", mp.nstr(m, 20), "at t =", mp.nstr(mp.mpf(15) * i / 150, 5))
    print("systole(0) =", mp.nstr(vals[0][1], 20), " systole(15) =", mp.nstr(vals[-1][1], 20))
