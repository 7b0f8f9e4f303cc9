"""Independent evaluation of the strategy constants with exact fractions."""
from fractions import Fraction as F
from mpmath import mp, mpf, power, ceil

mp.dps = 80


def least_r(d, beta, gamma, kappa):
    r1 = -(-4 // beta) if isinstance(beta, int) else int(ceil(mpf(4) / mpf(beta.numerator) * beta.denominator))
    r2 = int(ceil(mpf(10**4 * d**6) * mpf(kappa.numerator) ** 4 / mpf(kappa.denominator) ** 4))
    g = mpf(gamma.numerator) / gamma.denominator
    b = mpf(beta.numerator) / beta.denominator
    r3 = int(ceil(power(1 + power(3 / b**2, g), 1 / g)))
    return max(r1, r2, r3), (r1, r2, r3)


def eps(d, kappa, R, rho0):
    return F(1, 100) / d**6 / kappa**2 * F(1, R ** (20 * d * d)) * rho0


if __name__ == "__main__":
    d, beta, gamma, rho0 = 2, F(1, 3), F(1), F(1, 4)
    kappa = rho0 + 1
    R, parts = least_r(d, beta, gamma, kappa)
    e = eps(d, kappa, R, rho0)
    print("kappa", kappa, "R", R, parts)
    print("eps * R^80 =", e * R**80)
    H1 = 2 * d * d * e * kappa / rho0 * R**2
    print("2H1 < 1:", 2 * H1 < 1)
    for beta, gamma in [(F(9, 10), F(1, 10)), (F(9, 10), F(1, 100))]:
        print(beta, gamma, least_r(d, beta, gamma, kappa))
