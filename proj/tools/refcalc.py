#!/usr/bin/env python3
"""Reference calculations for values frozen into the test suite.

Everything here is computed by brute force or closed forms that are
independent of the library code, so the numbers below can be pasted into
tests as trusted constants. Run: python3 tools/refcalc.py
"""
import itertools
import math
from fractions import Fraction


def fib(k):
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def dual_shortest_fibonacci(k, box=60):
    """Brute-force shortest nonzero dual vector of the Fibonacci(k) lattice.

    Dual lattice: integer vectors h with h1 + F_{k-1} h2 = 0 mod F_k.
    """
    n, g = fib(k), fib(k - 1)
    best = None
    for h1 in range(-box, box + 1):
        for h2 in range(-box, box + 1):
            if (h1, h2) == (0, 0):
                continue
            if (h1 + g * h2) % n != 0:
                continue
            q = h1 * h1 + h2 * h2
            if best is None or q < best[0]:
                best = (q, [(h1, h2)])
            elif q == best[0]:
                best[1].append((h1, h2))
    return best


def fibonacci_level_histogram(k):
    """Counts of Fibonacci(k) points per dual-hyperplane level for h."""
    n, g = fib(k), fib(k - 1)
    (q, mins) = dual_shortest_fibonacci(k)
    # sign-canonical representative: first nonzero component positive
    def canon(h):
        for c in h:
            if c != 0:
                return h if c > 0 else tuple(-x for x in h)
        return h
    reps = sorted({canon(h) for h in mins})
    h = reps[0]
    hist = {}
    for i in range(n):
        x = (Fraction(i, n), Fraction((i * g) % n, n))
        lvl = h[0] * x[0] + h[1] * x[1]
        assert lvl.denominator == 1, (h, x, lvl)
        hist[int(lvl)] = hist.get(int(lvl), 0) + 1
    return h, q, hist, max(hist.values())


def lll(basis, delta=0.75):
    """Textbook LLL on a list of column vectors (floats)."""
    import copy
    b = [list(map(float, v)) for v in copy.deepcopy(basis)]
    d = len(b)

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gso():
        bs, mu = [], [[0.0] * d for _ in range(d)]
        for i in range(d):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = dot(b[i], bs[j]) / dot(bs[j], bs[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    kk = 1
    while kk < d:
        bs, mu = gso()
        for j in range(kk - 1, -1, -1):
            if abs(mu[kk][j]) > 0.5:
                r = round(mu[kk][j])
                b[kk] = [x - r * y for x, y in zip(b[kk], b[j])]
                bs, mu = gso()
        bs, mu = gso()
        if dot(bs[kk], bs[kk]) >= (delta - mu[kk][kk - 1] ** 2) * dot(bs[kk - 1], bs[kk - 1]):
            kk += 1
        else:
            b[kk], b[kk - 1] = b[kk - 1], b[kk]
            kk = max(kk - 1, 1)
    return b


def parallelepiped_diameter(cols):
    d = len(cols)
    best = 0.0
    for eps in itertools.product((-1, 1), repeat=d):
        v = [sum(e * cols[j][i] for j, e in enumerate(eps)) for i in range(d)]
        best = max(best, math.sqrt(sum(x * x for x in v)))
    return best


def halfspace_cube_volume_mc(a, b, n=400000, seed=7):
    import random
    rng = random.Random(seed)
    d = len(a)
    hit = sum(
        1
        for _ in range(n)
        if sum(ai * rng.random() for ai in a) <= b
    )
    return hit / n


def halfspace_cube_volume(a, b):
    a = list(a)
    # drop zero components (dimension reduction), reflect negatives
    a2 = [x for x in a if x != 0.0]
    b2 = b - sum(x for x in a2 if x < 0)
    a2 = [abs(x) for x in a2]
    d = len(a2)
    if d == 0:
        raise ValueError("zero normal")
    total = 0.0
    for mask in range(1 << d):
        s = sum(a2[i] for i in range(d) if mask >> i & 1)
        sgn = -1 if bin(mask).count("1") % 2 else 1
        total += sgn * max(b2 - s, 0.0) ** d
    total /= math.factorial(d) * math.prod(a2)
    return min(1.0, max(0.0, total))


def kappa_sum(d):
    return sum(
        math.comb(d, j) * math.pi ** (j / 2) / math.gamma(1 + j / 2)
        for j in range(1, d + 1)
    )


def main():
    print("== Fibonacci lattice ==")
    for k in (8,):
        h, q, hist, mx = fibonacci_level_histogram(k)
        n = fib(k)
        print(f"F_{k} = {n}, dual shortest h = {h}, |h| = sqrt({q}) = {math.sqrt(q):.12f}")
        print(f"spectral test = {1/math.sqrt(q):.12f}")
        print(f"level histogram: {dict(sorted(hist.items()))}")
        print(f"max count = {mx} -> fraction {mx}/{n} = {mx/n:.12f}")
        sd = 1 / math.sqrt(q)
        print(f"pigeonhole bound sigma/(sqrt(2)+sigma) = {sd/(math.sqrt(2)+sd):.12f}")
        cols = [[1 / n, fib(k - 1) / n], [0.0, 1.0]]
        red = lll(cols)
        print(f"LLL-reduced basis columns: {red}")
        diam = parallelepiped_diameter(red)
        print(f"fundamental domain diameter = {diam:.12f}")
        print(f"bound d*2^(d-1)*sigma = {2 * 2 * sd:.12f}")

    print("\n== LLL hand example ==")
    red = lll([[2.0, 0.0], [1.0, 1.0]])
    print(f"LLL of columns (2,0),(1,1): {red}")

    print("\n== closed forms ==")
    print(f"minkowski d=1: (sqrt(pi)/2)*Gamma(3/2)^(-1) = {(math.sqrt(math.pi)/2)/math.gamma(1.5):.12f}")
    mk = (math.sqrt(math.pi) / 2) * math.gamma(2.0) ** (-1 / 2) * 21 ** (-1 / 2)
    print(f"minkowski d=2,n=21 = {mk:.12f}")
    print(f"planted hole radius 1024^(-1/4) = {1024 ** -0.25:.12f}")
    print(f"distortion pt half, gamma=2: sqrt(1/12) = {math.sqrt(1.0/12.0):.12f}")
    print(f"covering 4 cell centers d=2: sqrt(2)/4 = {math.sqrt(2)/4:.12f}")
    print(f"kappa_sum(1) = {kappa_sum(1):.12f}")
    print(f"kappa_sum(2) = {kappa_sum(2):.12f}  (4+pi = {4+math.pi:.12f})")
    for d in (10, 50, 200):
        ls = math.log(kappa_sum(d))
        main_term = 1.5 * (2 * math.pi) ** (1 / 3) * d ** (2 / 3)
        print(f"d={d}: log kappa_sum = {ls:.6f}, main = {main_term:.6f}, gap/d^(1/3) = {(ls-main_term)/d**(1/3):.6f}")
    print(f"annulus area pi*(0.30^2-0.25^2) = {math.pi*(0.30**2-0.25**2):.12f}")
    print(f"lorentz (1,1),p=2,q=1 = {1 + 2 ** -0.5:.12f}")
    print(f"a_1 = sqrt(2/pi) = {math.sqrt(2/math.pi):.12f}")
    print(f"a_2 = sqrt(pi/2) = {math.sqrt(math.pi/2):.12f}")
    print(f"Fibonacci(8) equal-weight mean of x1 = 10/21 = {10/21:.12f}")
    print(f"cohort limit d=2 gamma=2: Gamma(2)/pi = {1/math.pi:.12f}")

    print("\n== halfspace volume exact vs MC ==")
    cases = [
        ((1.0,), 0.3),
        ((1.0, 1.0), 1.0),
        ((1.0, 1.0), 0.5),
        ((2.0, -1.0), 0.4),
        ((1.0, 0.0, 2.0), 1.1),
        ((0.5, 0.25, -0.75, 1.0), 0.2),
    ]
    for a, b in cases:
        ex = halfspace_cube_volume(a, b)
        mc = halfspace_cube_volume_mc(a, b)
        print(f"a={a} b={b}: exact={ex:.9f} mc={mc:.6f} |diff|={abs(ex-mc):.6f}")

    print("\n== gelfand examples ==")
    print("p=q, sigma=(1,1/2,1/3,1/4), n=3 -> 1/3")
    print(f"p=inf,q=2, sigma=(1,1,1), n=2 -> sqrt(2) = {math.sqrt(2):.12f}")

    print("\n== HKN shape sum for sigma_j=j^-1, m=400 ==")
    for n in (20, 60, 100):
        s = sum(j ** -2.0 for j in range(max(1, n // 4), 401))
        print(f"n={n}: n^(-1/2)*sqrt(sum_{{j>=n/4}} j^-2) = {math.sqrt(s/n):.9f}")


if __name__ == "__main__":
    main()
