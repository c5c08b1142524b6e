"""Integer helpers shared across the engine.

Everything here is exact: no floats.  The factoring routine is trial
division backed by deterministic Miller-Rabin and Pollard rho, which is
plenty for the discriminants and resultants that show up at desk scale.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "extgcd",
    "is_square",
    "nth_root_floor",
    "fraction_root_floor",
    "is_prime",
    "factorize",
    "prime_divisors",
    "divisor_count",
    "valuation",
    "squarefree_part",
    "primes_up_to",
    "sign",
]


def sign(n) -> int:
    return (n > 0) - (n < 0)


def extgcd(x: int, y: int) -> tuple[int, int]:
    """(s, t) with s*x + t*y = gcd(x, y) >= 0."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def nth_root_floor(n: int, k: int) -> int:
    """Largest r >= 0 with r**k <= n, for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("nth_root_floor needs n >= 0, k >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    # float seed, then exact correction
    r = int(round(n ** (1.0 / k)))
    if r < 1:
        r = 1
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def fraction_root_floor(x: Fraction, k: int) -> int:
    """Largest integer r >= 0 with r**k <= x (x >= 0 rational, k >= 1).

    Decided exactly by integer cross multiplication: r**k * den <= num.
    """
    if x < 0:
        raise ValueError("fraction_root_floor needs x >= 0")
    num, den = x.numerator, x.denominator
    r = nth_root_floor(num // den, k)
    # num//den <= x, so r is a lower start; bump while the next power fits
    while (r + 1) ** k * den <= num:
        r += 1
    return r


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # n odd composite, not a prime power of a tiny prime
    if n % 2 == 0:
        return 2
    for c in range(1, 40):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed on {n}")  # pragma: no cover


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| as {p: exponent}; 0 and +-1 give {}."""
    n = abs(n)
    out: dict[int, int] = {}
    if n < 2:
        return out
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 17
    while f * f <= n and f < 100000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_prime(m):
                out[m] = out.get(m, 0) + 1
                continue
            d = _pollard_rho(m)
            stack.append(d)
            stack.append(m // d)
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def divisor_count(n: int) -> int:
    if n == 0:
        raise ValueError("divisor_count(0)")
    out = 1
    for e in factorize(n).values():
        out *= e + 1
    return out


def valuation(n: int, p: int) -> int:
    """Exponent of p in n (n != 0)."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def squarefree_part(n: int) -> int:
    """Squarefree integer m with n = m * (square), preserving sign."""
    if n == 0:
        return 0
    m = sign(n)
    for p, e in factorize(n).items():
        if e % 2:
            m *= p
    return m


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, b in enumerate(sieve) if b]
