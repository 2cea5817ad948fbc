"""Small prime utilities (sieves, n-th prime, factor data)."""

from __future__ import annotations

from typing import List


def primes_up_to(n: int) -> List[int]:
    """All primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            start = p * p
            sieve[start : n + 1 : p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def first_n_primes(n: int) -> List[int]:
    if n <= 0:
        return []
    # p_n < n(log n + log log n) for n >= 6; generous cap below that
    bound = 16
    while True:
        ps = primes_up_to(bound)
        if len(ps) >= n:
            return ps[:n]
        bound *= 2


def nth_prime(n: int) -> int:
    """The n-th prime, 1-indexed (nth_prime(1) == 2)."""
    if n < 1:
        raise ValueError("prime index must be >= 1")
    return first_n_primes(n)[-1]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def greatest_prime_factors(n_max: int) -> List[int]:
    """gpf[m] = largest prime factor of m for 2 <= m <= n_max (gpf[0] = gpf[1] = 1)."""
    gpf = [1] * (n_max + 1)
    for p in range(2, n_max + 1):
        if gpf[p] == 1:  # p prime; later primes overwrite, so the last write wins
            for m in range(p, n_max + 1, p):
                gpf[m] = p
    return gpf
