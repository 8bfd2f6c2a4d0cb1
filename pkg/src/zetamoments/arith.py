"""Multiplicative number theory on flat numpy tables.

Sieves for Lambda, mu, phi and largest prime factor; the generalised divisor
function d_k; the Dirichlet coefficients alpha_k(n) of P_X(s)^k; the Euler
product a_k; and the local factor delta(n) of the twisted fourth moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError, NonconvergenceError
from .special_fn import exp_integral_e1

MAX_TABLE_LIMIT = 10**7
DEFAULT_TABLE_LIMIT = 10**6


def primes_up_to(n: int) -> np.ndarray:
    """Sieve of Eratosthenes; primes <= n as int64."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial division; [(p, a), ...] with p ascending."""
    n = int(n)
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


@dataclass(frozen=True)
class ArithTables:
    """Sieved arithmetic functions on 0..limit (index 0 is padding).

    ``pp_base[n]``/``pp_exp[n]`` tag prime powers n = p^a; elsewhere both are
    zero and Lambda(n) = 0.
    """

    limit: int
    smooth_bound: float
    primes: np.ndarray = field(repr=False)
    spf: np.ndarray = field(repr=False)
    lpf: np.ndarray = field(repr=False)
    pp_base: np.ndarray = field(repr=False)
    pp_exp: np.ndarray = field(repr=False)
    moebius: np.ndarray = field(repr=False)
    totient: np.ndarray = field(repr=False)

    @property
    def von_mangoldt(self) -> np.ndarray:
        out = np.zeros(self.limit + 1)
        tagged = self.pp_base > 0
        out[tagged] = np.log(self.pp_base[tagged])
        return out

    @property
    def is_smooth(self) -> np.ndarray:
        flags = self.lpf <= self.smooth_bound
        flags[0] = False
        return flags

    def factor(self, n: int) -> list[tuple[int, int]]:
        if not 1 <= n <= self.limit:
            raise CapacityError(f"{n} outside table range 1..{self.limit}")
        out = []
        while n > 1:
            p = int(self.spf[n])
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        return out


def build_tables(limit: int = DEFAULT_TABLE_LIMIT, smooth_bound: float = 2.0) -> ArithTables:
    if limit > MAX_TABLE_LIMIT:
        raise CapacityError(f"table limit {limit} exceeds {MAX_TABLE_LIMIT}")
    limit = max(int(limit), 2)
    primes = primes_up_to(limit)
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes[primes <= math.isqrt(limit)]:
        block = spf[p * p :: p]
        block[block == 0] = p
    spf[1] = 1
    unset = spf == 0
    spf[unset] = np.arange(limit + 1)[unset]

    lpf = np.ones(limit + 1, dtype=np.int64)
    mu = np.ones(limit + 1, dtype=np.int8)
    phi = np.arange(limit + 1, dtype=np.int64)
    pp_base = np.zeros(limit + 1, dtype=np.int64)
    pp_exp = np.zeros(limit + 1, dtype=np.int8)
    for p in primes:
        p = int(p)
        lpf[p::p] = p
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
        phi[p::p] -= phi[p::p] // p
        q, a = p, 1
        while q <= limit:
            pp_base[q] = p
            pp_exp[q] = a
            q *= p
            a += 1
    mu[0] = 0
    lpf[0] = 0
    return ArithTables(limit, float(smooth_bound), primes, spf, lpf, pp_base, pp_exp, mu, phi)


# ---------------------------------------------------------------- d_k


def d_k_prime_power(k: float, a: int) -> float:
    """binom(k + a - 1, a) as the rising product prod_{j<a} (k + j)/(j + 1)."""
    out = 1.0
    for j in range(a):
        out *= (k + j) / (j + 1)
    return out


def d_k(k: float, n: int) -> float:
    """Generalised divisor function: zeta(s)^k = sum d_k(n) n^-s."""
    if n < 1:
        raise DomainError("d_k needs n >= 1")
    out = 1.0
    for _, a in factorize(n):
        out *= d_k_prime_power(k, a)
    return out


# ---------------------------------------------------------------- alpha_k


def alpha_prime_power_coeffs(k: float, levels: int, a_max: int) -> list[float]:
    """c_0..c_{a_max} of exp(k sum_{l=1}^{levels} x^l / l).

    Obtained from the recursion a c_a = k sum_{l=1}^{min(a, levels)} c_{a-l}.
    """
    c = [1.0]
    for a in range(1, a_max + 1):
        c.append(k * math.fsum(c[a - l] for l in range(1, min(a, levels) + 1)) / a)
    return c


@dataclass(frozen=True)
class AlphaCoefficients:
    """alpha_k(n) for n <= cutoff, stored densely (values[0] unused)."""

    k: float
    X: float
    cutoff: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.cutoff:
            raise CapacityError(f"alpha_k({n}) outside 1..{self.cutoff}")
        return float(self.values[n])

    def support(self) -> np.ndarray:
        """Indices n with alpha_k(n) != 0."""
        return np.flatnonzero(self.values)


def _ensure_tables(cutoff: int, X: float, tables: ArithTables | None) -> ArithTables:
    if tables is None:
        if cutoff > MAX_TABLE_LIMIT:
            raise CapacityError(f"cutoff {cutoff} exceeds {MAX_TABLE_LIMIT}")
        return build_tables(cutoff, X)
    if cutoff > tables.limit:
        raise CapacityError(f"cutoff {cutoff} exceeds table limit {tables.limit}")
    return tables


def _max_power(p: int, bound: float) -> int:
    a, q = 0, p
    while q <= bound:
        a += 1
        q *= p
    return a


def build_alpha(k: float, X: float, cutoff: int, tables: ArithTables | None = None) -> AlphaCoefficients:
    """Dirichlet coefficients of P_X(s)^k up to ``cutoff``.

    Per prime p <= X with L_p = max{l : p^l <= X} the prime-power values
    follow the exponential recursion; other n are filled multiplicatively
    and non-smooth n stay zero.
    """
    if X < 2:
        raise DomainError("build_alpha needs X >= 2")
    if cutoff < 1:
        raise DomainError("build_alpha needs cutoff >= 1")
    tables = _ensure_tables(cutoff, X, tables)
    vals = np.zeros(cutoff + 1)
    vals[1:] = (tables.lpf[1 : cutoff + 1] <= X).astype(float)
    for p in tables.primes[tables.primes <= min(X, cutoff)]:
        p = int(p)
        levels = _max_power(p, X)
        a_max = _max_power(p, cutoff)
        coeffs = alpha_prime_power_coeffs(k, levels, a_max)
        for a in range(1, a_max + 1):
            q = p**a
            idx = np.arange(q, cutoff + 1, q)
            exact = idx[(idx // q) % p != 0]
            vals[exact] *= coeffs[a]
    return AlphaCoefficients(float(k), float(X), int(cutoff), vals)


# ---------------------------------------------------------------- a_k


@dataclass(frozen=True)
class ArithmeticFactor:
    k: float
    value: float
    tail_bound: float
    prime_cutoff: int
    n_primes: int


def a_k(k: float, prime_cutoff: int = 10**6, term_tol: float = 1e-14, max_terms: int = 10**4) -> ArithmeticFactor:
    """a_k = prod_p (1 - 1/p)^{k^2} sum_m d_k(p^m)^2 p^-m, truncated at p <= prime_cutoff.

    Each local series stops once a term drops below ``term_tol`` times the
    partial sum. The omitted primes contribute exp(C_k sum_{p>P} p^-2 + ...)
    with C_k = -k^2 (k-1)^2 / 4; the reported tail bound is
    2 |a| |C_k| E1(log P) (E1(log P) = int_P^inf dt/(t^2 log t)) plus a
    cubic-order allowance.
    """
    if prime_cutoff < 2:
        raise DomainError("a_k needs prime_cutoff >= 2")
    if term_tol <= 0:
        raise DomainError("term_tol must be positive")
    primes = primes_up_to(int(prime_cutoff)).astype(float)
    inv_p = 1.0 / primes
    power = np.ones_like(primes)
    partial = np.zeros_like(primes)  # sum_{m>=1}
    active = np.ones(primes.shape, dtype=bool)
    c = 1.0  # d_k(p^m) does not depend on p
    for m in range(1, max_terms + 1):
        c *= (m - 1 + k) / m
        power = power * inv_p
        term = c * c * power
        partial = np.where(active, partial + term, partial)
        active &= ~(np.abs(term) < term_tol * (1.0 + partial))
        if not active.any():
            break
    else:
        raise NonconvergenceError("a_k local series failed to converge")
    logs = k * k * np.log1p(-inv_p) + np.log1p(partial)
    value = math.exp(math.fsum(logs))
    P = float(prime_cutoff)
    c_k = k * k * (k - 1.0) ** 2 / 4.0
    tail = abs(value) * (2.0 * c_k * exp_integral_e1(math.log(P)).real + (1.0 + abs(k)) ** 6 / (P * P * math.log(P)))
    return ArithmeticFactor(float(k), value, tail, int(prime_cutoff), int(primes.size))


# ---------------------------------------------------------------- delta


def delta_multiplicative(n: int) -> float:
    """prod_{p^a || n} (1 + a (1 - 1/p)/(1 + 1/p))."""
    out = 1.0
    for p, a in factorize(n):
        out *= 1.0 + a * (1.0 - 1.0 / p) / (1.0 + 1.0 / p)
    return out


# ------------------------------------------------------- convolutions


def _as_coeff_array(a, limit: int) -> np.ndarray:
    if isinstance(a, Mapping):
        out = np.zeros(limit + 1)
        for n, v in a.items():
            if 1 <= n <= limit:
                out[n] = v
        return out
    arr = np.asarray(a, dtype=float)
    if arr.shape[0] < limit + 1:
        raise CapacityError(f"coefficient array shorter than limit {limit}")
    out = arr[: limit + 1].copy()
    out[0] = 0.0
    return out


def dirichlet_convolve(a: Sequence[float] | Mapping[int, float], b, limit: int) -> np.ndarray:
    """(a*b)(n) = sum_{d|n} a(d) b(n/d) for n <= limit; index 0 unused."""
    a = _as_coeff_array(a, limit)
    b = _as_coeff_array(b, limit)
    out = np.zeros(limit + 1)
    for d in np.flatnonzero(a):
        m = limit // d
        out[d :: d][:m] += a[d] * b[1 : m + 1]
    return out


def divisors(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def split_convolution(alpha1, alpha2, l: int, m: int) -> float:
    """sum over l = l1 l2, m = m1 m2 with (m2, l1) = 1 of alpha1(l1 m1) alpha2(l2 m2).

    Equals (alpha1 * alpha2)(l m); ``alpha1``/``alpha2`` are indexable by n.
    """
    terms = []
    for l1 in divisors(l):
        l2 = l // l1
        for m1 in divisors(m):
            m2 = m // m1
            if math.gcd(m2, l1) == 1:
                terms.append(alpha1[l1 * m1] * alpha2[l2 * m2])
    return math.fsum(terms)


def sum_over_multiples(w: np.ndarray, primes) -> np.ndarray:
    """g(d) = sum_{j>=1} w(j d) for w supported on numbers built from ``primes``.

    Applies the per-prime transform g(i) += g(i p) from the top index down,
    one numpy slice per power range.
    """
    g = np.asarray(w, dtype=float).copy()
    limit = g.shape[0] - 1
    for p in primes:
        p = int(p)
        if p > limit:
            break
        hi = limit // p
        while hi >= 1:
            lo = hi // p  # indices in (lo, hi] read from (lo p, hi p]
            g[lo + 1 : hi + 1] += g[(lo + 1) * p : hi * p + 1 : p]
            hi = lo
    return g


def gcd_weighted_euler_product(k: float, X: float, tol: float = 1e-18) -> float:
    """Untruncated sum_{m,n in S(X)} alpha_k(m) alpha_k(n) gcd(m,n)/(m n).

    The summand is multiplicative in (m, n), so the sum is
    prod_{p<=X} sum_{a,b} c_a c_b p^{min(a,b) - a - b}.
    """
    logs = []
    for p in primes_up_to(int(math.floor(X))):
        p = int(p)
        a_max = int(math.ceil(-math.log(tol) / math.log(p))) + 8
        c = np.array(alpha_prime_power_coeffs(k, _max_power(p, X), a_max))
        a = np.arange(a_max + 1)
        expo = np.minimum.outer(a, a) - a[:, None] - a[None, :]
        local = np.outer(c, c) * np.power(float(p), expo.astype(float))
        logs.append(math.log(math.fsum(local.ravel())))
    return math.exp(math.fsum(logs))


def gcd_weighted_double_sum(k: float, X: float, cutoff: int | None, tables: ArithTables | None = None,
                            alpha: AlphaCoefficients | None = None) -> float:
    """sum_{m,n <= cutoff} alpha_k(m) alpha_k(n) gcd(m,n) / (m n).

    Uses gcd(m, n) = sum_{d | m, d | n} phi(d), so the double sum collapses
    to sum_d phi(d) (sum_{d|m} alpha_k(m)/m)^2. ``cutoff=None`` gives the
    complete sum over S(X) as an Euler product.
    """
    if cutoff is None:
        return gcd_weighted_euler_product(k, X)
    tables = _ensure_tables(cutoff, X, tables)
    if alpha is None:
        alpha = build_alpha(k, X, cutoff, tables)
    w = np.zeros(cutoff + 1)
    w[1:] = alpha.values[1 : cutoff + 1] / np.arange(1, cutoff + 1)
    g = sum_over_multiples(w, tables.primes[tables.primes <= X])
    return math.fsum(tables.totient[1 : cutoff + 1] * g[1:] ** 2)
