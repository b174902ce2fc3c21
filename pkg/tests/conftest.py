"""Shared test helpers: slow-but-obviously-correct oracles.

The fast implementations are checked against these. Keep everything here
independent of the package internals — plain loops, Fraction arithmetic,
trial division — so a bug in the package cannot hide in its own oracle.
"""

from fractions import Fraction

from lgpk.matfield import FieldMatrix


def slow_mat_mul(a, b, p):
    """Triple-loop integer matrix product over plain lists, reduced mod p."""
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s += a[i][k] * b[k][j]
            out[i][j] = s % p
    return out


def rational_exp(rows, index, p):
    """Truncated exponential over the rationals, reduced mod p at the very end.

    Uses exact Fraction entries and genuine division by m!, so it shares no
    code path with the field implementation.
    """
    n = len(rows)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    acc = [row[:] for row in ident]
    power = [row[:] for row in ident]
    frac = [[Fraction(e) for e in row] for row in rows]
    fact = 1
    for m in range(1, index):
        power = [
            [sum(power[i][k] * frac[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
        fact *= m
        for i in range(n):
            for j in range(n):
                acc[i][j] += power[i][j] / fact
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            q = acc[i][j]
            out[i][j] = q.numerator * pow(q.denominator, -1, p) % p
    return out


def slow_det(rows, p):
    """Cofactor-expansion determinant; fine for the tiny n used in tests."""
    n = len(rows)
    if n == 1:
        return rows[0][0] % p
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        sign = -1 if j % 2 else 1
        total += sign * rows[0][j] * slow_det(minor, p)
    return total % p


def trial_division_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def mat(rows, p):
    return FieldMatrix.from_rows(rows, p)
