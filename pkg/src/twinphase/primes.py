"""Prime tables and the arithmetic functions Lambda, mu, phi, tau_k, Omega."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetError, DomainError

MAX_LIMIT = 1 << 40
# 2**18 odd candidates per segment: a 256 KiB byte mask, comfortably L2 sized.
SEGMENT_ODDS = 1 << 18
MAX_SPF_LIMIT = (1 << 31) - 1


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by a plain (unsegmented) sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if mask[p]:
            mask[p * p::2 * p] = False
    return np.flatnonzero(mask).astype(np.int64)


def _odd_segment(lo_index: int, hi_index: int, base: np.ndarray) -> np.ndarray:
    """Primality mask for the odd numbers 2i+1, lo_index <= i < hi_index."""
    mask = np.ones(hi_index - lo_index, dtype=bool)
    lo_n = 2 * lo_index + 1
    hi_n = 2 * hi_index - 1
    for p in base:
        p = int(p)
        if p == 2:
            continue
        if p * p > hi_n:
            break
        start = max(p * p, -(-lo_n // p) * p)
        if start % 2 == 0:
            start += p
        mask[(start - 1) // 2 - lo_index::p] = False
    if lo_index == 0:
        mask[0] = False  # 1 is not prime
    return mask


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primality of every n <= limit.

    ``bits`` packs the odd numbers: bit i (big-endian within each byte)
    is set iff 2i+1 is prime.  ``spf`` is the smallest-prime-factor array,
    present when the table was built with ``with_spf=True``.
    """

    limit: int
    bits: np.ndarray
    spf: np.ndarray | None = None

    def is_prime(self, n: int) -> bool:
        n = int(n)
        if n < 0 or n > self.limit:
            raise DomainError(f"{n} outside table range [0, {self.limit}]")
        if n == 2:
            return True
        if n < 2 or n % 2 == 0:
            return False
        i = n // 2
        return bool((self.bits[i >> 3] >> (7 - (i & 7))) & 1)

    def odd_mask(self) -> np.ndarray:
        return np.unpackbits(self.bits)[: (self.limit + 1) // 2].astype(bool)

    def primes(self, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """Primes p with lo <= p <= hi (hi defaults to the limit)."""
        hi = self.limit if hi is None else min(int(hi), self.limit)
        idx = np.flatnonzero(self.odd_mask())
        odd = 2 * idx + 1
        out = odd if self.limit < 2 else np.concatenate(([2], odd))
        out = out.astype(np.int64)
        a, b = np.searchsorted(out, [lo, hi + 1])
        return out[a:b]

    def pi(self, n: int | None = None) -> int:
        n = self.limit if n is None else int(n)
        return int(self.primes(0, n).size)

    def big_omega(self, n: int) -> int:
        if self.spf is None or n > self.limit:
            return factor(n).omega_big
        count = 0
        while n > 1:
            n //= int(self.spf[n])
            count += 1
        return count


def sieve_primes(limit: int, with_spf: bool = False, threads: int = 1) -> PrimeTable:
    """Segmented odd-only sieve of Eratosthenes up to ``limit``.

    Segments are independent, so they may be sieved on a thread pool; the
    packed result is assembled in segment order and does not depend on the
    thread count.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError("sieve_primes needs limit >= 2")
    if limit > MAX_LIMIT:
        raise BudgetError(f"limit {limit} exceeds the 2**40 memory guard")
    base = simple_sieve(math.isqrt(limit) + 1)
    n_odd = (limit + 1) // 2
    # keep segment boundaries on byte boundaries so packbits can be concatenated
    bounds = list(range(0, n_odd, SEGMENT_ODDS)) + [n_odd]
    spans = list(zip(bounds[:-1], bounds[1:]))

    def work(span):
        return np.packbits(_odd_segment(span[0], span[1], base))

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    bits = np.concatenate(parts)
    spf = spf_array(limit) if with_spf else None
    return PrimeTable(limit, bits, spf)


def spf_array(n: int) -> np.ndarray:
    """Smallest prime factor of every k <= n (spf[0] = spf[1] = 0)."""
    if n > MAX_SPF_LIMIT:
        raise BudgetError("smallest-prime-factor array limited to 2**31 - 1")
    dtype = np.int32
    spf = np.zeros(n + 1, dtype=dtype)
    for p in simple_sieve(math.isqrt(n)):
        p = int(p)
        seg = spf[p * p::p]
        seg[seg == 0] = p
    ks = np.arange(n + 1, dtype=dtype)
    unset = spf == 0
    spf[unset] = ks[unset]
    spf[:2] = 0
    return spf


@dataclass(frozen=True)
class FactorCount:
    n: int
    omega_big: int
    omega_small: int
    mu: int
    phi: int
    factors: tuple[tuple[int, int], ...] = ()


def _factorize(n: int, table: PrimeTable | None = None) -> list[tuple[int, int]]:
    out = []
    if table is not None and table.spf is not None and n <= table.limit:
        while n > 1:
            p = int(table.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
    root = math.isqrt(n)
    if table is not None and table.limit >= root:
        candidates = table.primes(2, root)
    else:
        candidates = simple_sieve(root)
    for p in candidates:
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return out


def factor(n: int, table: PrimeTable | None = None) -> FactorCount:
    n = int(n)
    if n < 1:
        raise DomainError("factor needs n >= 1")
    fs = _factorize(n, table)
    omega_big = sum(e for _, e in fs)
    omega_small = len(fs)
    mu = 0 if omega_big > omega_small else (-1) ** omega_small
    phi = 1
    for p, e in fs:
        phi *= (p - 1) * p ** (e - 1)
    return FactorCount(n, omega_big, omega_small, mu, phi, tuple(fs))


def is_almost_prime(n: int, r: int, table: PrimeTable | None = None) -> bool:
    """True iff n has at most r prime factors counted with multiplicity."""
    if n < 1:
        raise DomainError("is_almost_prime needs n >= 1")
    if table is not None and table.spf is not None and n <= table.limit:
        return table.big_omega(n) <= r
    return factor(n, table).omega_big <= r


def von_mangoldt(n: int) -> float:
    if n < 1:
        raise DomainError("von_mangoldt needs n >= 1")
    fs = _factorize(int(n))
    return math.log(fs[0][0]) if len(fs) == 1 else 0.0


def tau_k(n: int, k: int) -> int:
    """Number of ordered k-tuples of positive integers with product n."""
    if n < 1 or k < 2:
        raise DomainError("tau_k needs n >= 1 and k >= 2")
    out = 1
    for _, e in _factorize(int(n)):
        out *= math.comb(e + k - 1, k - 1)
        if out >= 1 << 63:
            raise OverflowError(f"tau_{k}({n}) exceeds 63 bits")
    return out


def tau_k_array(n: int, k: int) -> np.ndarray:
    """tau_k(m) for 0 <= m <= n (entry 0 unused) by repeated convolution with 1."""
    if k < 1:
        raise DomainError("tau_k_array needs k >= 1")
    t = np.ones(n + 1, dtype=np.int64)
    t[0] = 0
    for _ in range(k - 1):
        new = np.zeros_like(t)
        for d in range(1, n + 1):
            new[d::d] += t[d]
        t = new
    return t


def divisor_moment_check(X: int, k: int, l: int, budget: int = 10**8) -> tuple[int, float]:
    """Sum of tau_k(n)**l over n <= X and its ratio to X (log X)**(k**l - 1)."""
    if X < 2 or k < 2 or l < 1:
        raise DomainError("divisor_moment_check needs X >= 2, k >= 2, l >= 1")
    if X * k ** l > budget:
        raise BudgetError(f"X * k**l = {X * k ** l} exceeds budget {budget}")
    t = tau_k_array(X, k)[1:]
    if t.max() > 0 and l * math.log2(float(t.max())) + math.log2(X) >= 62:
        total = sum(int(v) ** l for v in t)
    else:
        total = int(np.sum(t ** l))
    return total, total / (X * math.log(X) ** (k ** l - 1))


def mobius_array(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    for p in simple_sieve(n):
        p = int(p)
        mu[::p] *= -1
        if p * p <= n:
            mu[::p * p] = 0
    return mu


def mangoldt_array(n: int) -> np.ndarray:
    lam = np.zeros(n + 1, dtype=np.float64)
    for p in simple_sieve(n):
        p = int(p)
        lp = math.log(p)
        pk = p
        while pk <= n:
            lam[pk] = lp
            pk *= p
    return lam


def euler_phi_array(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in simple_sieve(n):
        p = int(p)
        phi[::p] -= phi[::p] // p
    return phi


def big_omega_array(n: int) -> np.ndarray:
    om = np.zeros(n + 1, dtype=np.int16)
    for p in simple_sieve(n):
        p = int(p)
        pk = p
        while pk <= n:
            om[::pk] += 1
            pk *= p
    om[0] = 0
    return om


def big_omega_range(lo: int, hi: int) -> np.ndarray:
    """Omega(n) for lo <= n < hi, by sieving with primes up to sqrt(hi).

    Memory is proportional to hi - lo only, so this works for windows far
    beyond any smallest-prime-factor table.
    """
    if lo < 1 or hi <= lo:
        raise DomainError("big_omega_range needs 1 <= lo < hi")
    ns = np.arange(lo, hi, dtype=np.int64)
    rem = ns.copy()
    om = np.zeros(hi - lo, dtype=np.int16)
    for p in simple_sieve(math.isqrt(hi - 1)):
        p = int(p)
        pk = p
        while pk < hi:
            start = (-lo) % pk
            om[start::pk] += 1
            rem[start::pk] //= p
            pk *= p
    om += (rem > 1).astype(np.int16)
    return om


@lru_cache(maxsize=8)
def cached_table(limit: int, with_spf: bool = False) -> PrimeTable:
    return sieve_primes(limit, with_spf=with_spf)


def prime_powers_in(lo: int, hi: int, table: PrimeTable | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Prime powers n with lo <= n < hi and their Lambda(n), sorted by n."""
    lo, hi = max(int(lo), 2), int(hi)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    if table is None or table.limit < hi - 1:
        table = sieve_primes(max(hi - 1, 2))
    ps = table.primes(lo, hi - 1)
    ns = [ps]
    lam = [np.log(ps.astype(np.float64))]
    for p in table.primes(2, math.isqrt(hi - 1)):
        p = int(p)
        pk = p * p
        extra = []
        while pk < hi:
            if pk >= lo:
                extra.append(pk)
            pk *= p
        if extra:
            ns.append(np.array(extra, dtype=np.int64))
            lam.append(np.full(len(extra), math.log(p)))
    n_all = np.concatenate(ns)
    l_all = np.concatenate(lam)
    order = np.argsort(n_all, kind="stable")
    return n_all[order], l_all[order]
