"""Random curvature tuples for the classification tests."""
import random

import gmpy2

from rank2dist.classify import alphas, is_exceptional, wilczynski_values

q = gmpy2.mpq


def rational(rng, lo=-9, hi=9, den=3):
    return q(rng.randint(lo, hi), rng.randint(1, den))


def exceptional_tuple(rng, m):
    s2 = rational(rng, 0, 9)
    return [a * s2 ** i for i, a in enumerate(alphas(m), start=1)]


def generic_tuple(rng, m):
    while True:
        t = [rational(rng) for _ in range(m)]
        if not is_exceptional(t):
            return t


def normalizable_tuple(rng, m):
    """Non-exceptional tuple whose compatible scale is rational.

    A_2 is affine in r_2, so r_2 is chosen to make A_2 = +-k^4 with k rational,
    which puts i0 = 1 and c^2 = 1/k^2.
    """
    while True:
        t = [rational(rng) for _ in range(m)]
        t[1] = q(0)
        a0 = wilczynski_values(t)[1]
        t[1] = q(1)
        slope = wilczynski_values(t)[1] - a0
        k = q(rng.randint(1, 5), rng.randint(1, 3))
        t[1] = (rng.choice([1, -1]) * k ** 4 - a0) / slope
        if not is_exceptional(t):
            return t
