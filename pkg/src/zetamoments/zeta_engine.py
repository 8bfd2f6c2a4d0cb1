"""zeta(s) and zeta'(s) by Euler-Maclaurin, Hardy's Z, and zero location.

Zeros are found by Gram-block scanning of Z(t) (Rosser's rule), with the
argument principle as arbiter whenever a block cannot be reconciled. Under
RH every zero is stored by its ordinate alone.
"""

from __future__ import annotations

import math
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import AccuracyError, MissedZeroError, PoleError, ValidationError
from .special_fn import bernoulli_numbers, log_gamma

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class ZetaConfig:
    """Truncation and resource settings for the Euler-Maclaurin backend.

    The main sum uses N(t) = base_terms + terms_per_t * |t| terms, rounded up
    to a multiple of ``bucket`` so that identical N always yields identical
    floating-point results whatever the batching.
    """

    base_terms: int = 10
    terms_per_t: float = 2.0
    bernoulli_terms: int = 8
    t_ceiling: float = 1e5
    bucket: int = 32
    max_batch_elements: int = 2_000_000
    workers: int = 1


DEFAULT_CONFIG = ZetaConfig()


def _n_terms(t_abs: np.ndarray, cfg: ZetaConfig) -> np.ndarray:
    raw = cfg.base_terms + np.ceil(cfg.terms_per_t * t_abs)
    return (np.ceil(raw / cfg.bucket) * cfg.bucket).astype(np.int64)


def _em_fixed_n(s: np.ndarray, N: int, m: int, derivative: bool):
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    terms = np.exp(-s[:, None] * logn[None, :])
    z = terms.sum(axis=1)
    dz = -(terms * logn).sum(axis=1) if derivative else None

    logN = math.log(N)
    NmS = np.exp(-s * logN)  # N^-s
    z = z + N * NmS / (s - 1.0) + 0.5 * NmS
    if derivative:
        dz = dz - logN * N * NmS / (s - 1.0) - N * NmS / (s - 1.0) ** 2 - 0.5 * logN * NmS

    b = bernoulli_numbers(2 * m)
    # T_j = B_2j/(2j)! * P_j(s) * N^(1-s-2j), P_j(s) = s(s+1)...(s+2j-2)
    poly = s.copy()
    dpoly = np.ones_like(s)
    power = NmS * N
    for j in range(1, m + 1):
        power = power / (N * N)
        if j > 1:
            for shift in (2 * j - 3, 2 * j - 2):
                dpoly = dpoly * (s + shift) + poly
                poly = poly * (s + shift)
        coef = float(b[2 * j]) / math.factorial(2 * j)
        z = z + coef * poly * power
        if derivative:
            dz = dz + coef * power * (dpoly - logN * poly)
    return z, dz


def _em(s: np.ndarray, cfg: ZetaConfig, derivative: bool):
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    if np.any(flat == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    t_abs = np.abs(flat.imag)
    if np.any(t_abs > cfg.t_ceiling):
        raise AccuracyError(f"|Im s| = {t_abs.max():g} exceeds the accuracy ceiling {cfg.t_ceiling:g}")
    Ns = _n_terms(t_abs, cfg)
    z = np.empty_like(flat)
    dz = np.empty_like(flat) if derivative else None
    for N in np.unique(Ns):
        idx = np.flatnonzero(Ns == N)
        rows = max(1, cfg.max_batch_elements // int(N))
        for start in range(0, idx.size, rows):
            sel = idx[start : start + rows]
            zz, dd = _em_fixed_n(flat[sel], int(N), cfg.bernoulli_terms, derivative)
            z[sel] = zz
            if derivative:
                dz[sel] = dd
    z = z.reshape(s.shape)
    if derivative:
        dz = dz.reshape(s.shape)
    return z, dz


def _scalar_or_array(x, like):
    return complex(x) if np.ndim(like) == 0 else x


def zeta(s, config: ZetaConfig = DEFAULT_CONFIG):
    """Riemann zeta(s) by Euler-Maclaurin summation."""
    z, _ = _em(np.asarray(s, dtype=complex), config, False)
    return _scalar_or_array(z, s)


def zeta_prime(s, config: ZetaConfig = DEFAULT_CONFIG):
    """zeta'(s), differentiating every Euler-Maclaurin term analytically."""
    _, dz = _em(np.asarray(s, dtype=complex), config, True)
    return _scalar_or_array(dz, s)


def zeta_and_prime(s, config: ZetaConfig = DEFAULT_CONFIG):
    z, dz = _em(np.asarray(s, dtype=complex), config, True)
    return _scalar_or_array(z, s), _scalar_or_array(dz, s)


# ---------------------------------------------------------------- theta / Z


def theta(t):
    """Riemann-Siegel theta: Im log Gamma(1/4 + it/2) - (t/2) log pi.

    Stirling's asymptotic series for t >= 20, the log-Gamma routine below.
    """
    t_arr = np.asarray(t, dtype=float)
    out = np.empty_like(t_arr)
    big = t_arr >= 20.0
    if np.any(big):
        tb = t_arr[big]
        inv = 1.0 / tb
        inv2 = inv * inv
        series = inv * (1.0 / 48 + inv2 * (7.0 / 5760 + inv2 * (31.0 / 80640 + inv2 * (127.0 / 430080 + inv2 * 511.0 / 1216512))))
        out[big] = 0.5 * tb * np.log(tb / (2 * math.pi)) - 0.5 * tb - math.pi / 8 + series
    if np.any(~big):
        ts = t_arr[~big]
        out[~big] = np.imag(log_gamma(0.25 + 0.5j * ts)) - 0.5 * ts * _LOG_PI
    return float(out) if t_arr.ndim == 0 else out


def hardy_z(t, config: ZetaConfig = DEFAULT_CONFIG, return_imag: bool = False):
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t.

    With ``return_imag`` also returns the imaginary residue of the product,
    a direct accuracy diagnostic.
    """
    t_arr = np.asarray(t, dtype=float)
    prod = np.exp(1j * theta(t_arr)) * zeta(0.5 + 1j * t_arr, config)
    re, im = np.real(prod), np.imag(prod)
    if t_arr.ndim == 0:
        re, im = float(re), float(im)
    return (re, im) if return_imag else re


def riemann_von_mangoldt(T):
    """Smooth zero count (T/2pi) log(T/2pi) - T/2pi + 7/8."""
    T = np.asarray(T, dtype=float)
    x = T / (2 * math.pi)
    out = x * np.log(x) - x + 7.0 / 8.0
    return float(out) if out.ndim == 0 else out


def argument_principle_count(T: float, config: ZetaConfig = DEFAULT_CONFIG, sigma_max: float = 3.0) -> int:
    """N(T) = theta(T)/pi + 1 + arg zeta(1/2 + iT)/pi.

    The argument is continued from sigma_max (where |zeta - 1| < 1/4) along
    the horizontal segment to sigma = 1/2, refining the sigma grid until
    consecutive phase steps stay below pi/4.
    """
    n = 64
    while True:
        sig = np.linspace(sigma_max, 0.5, n)
        vals = zeta(sig + 1j * T, config)
        steps = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(steps)) < math.pi / 4:
            break
        if n >= 16384:
            raise MissedZeroError(f"argument of zeta(s) at height {T} could not be tracked")
        n *= 4
    arg = np.angle(vals[0]) + math.fsum(steps)
    count = theta(T) / math.pi + 1.0 + arg / math.pi
    nearest = round(count)
    if abs(count - nearest) > 0.25:
        raise MissedZeroError(f"argument-principle count {count:.3f} at T={T} is not near an integer")
    return int(nearest)


# ---------------------------------------------------------------- zero table


@dataclass(frozen=True, eq=False)
class ZeroTable:
    """Ordinates 0 < gamma_1 < gamma_2 < ... <= t_max of zeros 1/2 + i gamma."""

    ordinates: np.ndarray
    t_max: float
    source: str = "computed"
    claimed_accuracy: float = 1e-9

    def __post_init__(self):
        arr = np.array(self.ordinates, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "ordinates", arr)

    def __len__(self) -> int:
        return int(self.ordinates.size)

    def count(self, T: float) -> int:
        """Number of ordinates <= T."""
        return int(np.searchsorted(self.ordinates, T, side="right"))

    def upto(self, T: float) -> np.ndarray:
        return self.ordinates[: self.count(T)]

    def between(self, lo: float, hi: float) -> np.ndarray:
        a = np.searchsorted(self.ordinates, lo, side="left")
        b = np.searchsorted(self.ordinates, hi, side="right")
        return self.ordinates[a:b]

    def prefix(self, T: float) -> "ZeroTable":
        return ZeroTable(self.upto(T), min(T, self.t_max), self.source, self.claimed_accuracy)

    def validate(self) -> None:
        """Raise ValidationError if a structural invariant fails."""
        g = self.ordinates
        if g.size == 0:
            return
        if not np.all(np.isfinite(g)):
            raise ValidationError("ordinates must be finite")
        if np.any(np.diff(g) <= 0):
            bad = int(np.flatnonzero(np.diff(g) <= 0)[0]) + 2
            raise ValidationError(f"ordinates not strictly increasing at entry {bad}")
        if not 14.0 < g[0] < 15.0:
            raise ValidationError(f"first ordinate {g[0]!r} is not in (14, 15)")
        if g[-1] > self.t_max:
            raise ValidationError("ordinate beyond t_max")
        # at gamma_j the count jumps from j-1 to j; test both sides
        j = np.arange(1, g.size + 1)
        rvm = riemann_von_mangoldt(g)
        slack = 3.0 * np.log(np.maximum(g, math.e))
        if np.any(np.abs(j - 0.5 - rvm) > slack + 0.5):
            bad = int(np.flatnonzero(np.abs(j - 0.5 - rvm) > slack + 0.5)[0]) + 1
            raise ValidationError(f"zero count at entry {bad} deviates from Riemann-von Mangoldt by more than 3 log T")


# ---------------------------------------------------------------- Gram points


def gram_points(n_lo: int, n_hi: int) -> np.ndarray:
    """g_n for n_lo <= n <= n_hi (n >= -1), solving theta(g_n) = n pi."""
    if n_lo < -1:
        raise ValueError("Gram points are indexed from -1")
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    target = n * math.pi
    # t/2 (log(t/2pi) - 1) = pi (n + 1/8)  =>  t = 2 pi e exp(W(y)), y = (n + 1/8)/e
    y = np.maximum((n + 0.125) / math.e, 0.5)
    w = np.log(y)
    for _ in range(40):  # W(y) by Newton on w e^w = y, started from log y
        ew = np.exp(w)
        w = w - (w * ew - y) / (ew * (w + 1.0))
    g = 2 * math.pi * math.e * np.exp(w)
    g = np.maximum(g, 9.7)
    for _ in range(60):
        deriv = 0.5 * np.log(g / (2 * math.pi))
        deriv = np.maximum(deriv, 0.05)
        step = (theta(g) - target) / deriv
        g = g - step
        if np.max(np.abs(step)) < 1e-13 * np.max(g):
            break
    return g


# ---------------------------------------------------------------- zero finder


def _count_sign_changes(values: np.ndarray) -> int:
    s = np.sign(values)
    return int(np.count_nonzero(s[1:] * s[:-1] < 0))


def _brackets(ts: np.ndarray, zs: np.ndarray) -> list[tuple[float, float, float, float]]:
    s = np.sign(zs)
    idx = np.flatnonzero(s[1:] * s[:-1] < 0)
    return [(ts[i], ts[i + 1], zs[i], zs[i + 1]) for i in idx]


def _block_brackets(g: np.ndarray, zg: np.ndarray, expected: int, cfg: ZetaConfig, max_depth: int):
    """Sign-change brackets in [g[0], g[-1]] until ``expected`` are found."""
    ts, zs = g, zg
    for depth in range(max_depth + 1):
        if _count_sign_changes(zs) >= expected:
            return _brackets(ts, zs), True
        pieces = 2 ** (depth + 1)
        frac = np.arange(pieces) / pieces
        ts = (g[:-1, None] + np.diff(g)[:, None] * frac[None, :]).ravel()
        ts = np.append(ts, g[-1])
        zs = hardy_z(ts, cfg)
    return _brackets(ts, zs), False


def _refine(brackets: list[tuple[float, float, float, float]], cfg: ZetaConfig) -> np.ndarray:
    """Bisection to width 1e-6, then three safeguarded secant steps."""
    if not brackets:
        return np.zeros(0)
    a = np.array([b[0] for b in brackets])
    b = np.array([b[1] for b in brackets])
    za = np.array([b[2] for b in brackets])
    zb = np.array([b[3] for b in brackets])
    while True:
        wide = (b - a) > 1e-6
        if not wide.any():
            break
        mid = 0.5 * (a[wide] + b[wide])
        zm = hardy_z(mid, cfg)
        left = np.sign(zm) == np.sign(za[wide])
        aw, bw, zaw, zbw = a[wide], b[wide], za[wide], zb[wide]
        aw = np.where(left, mid, aw)
        zaw = np.where(left, zm, zaw)
        bw = np.where(left, bw, mid)
        zbw = np.where(left, zbw, zm)
        a[wide], b[wide], za[wide], zb[wide] = aw, bw, zaw, zbw
    x0, x1, f0, f1 = a.copy(), b.copy(), za.copy(), zb.copy()
    lo, hi, flo = a.copy(), b.copy(), za.copy()
    # once |Z| hits the noise floor the secant quotient is garbage, so keep the best point seen
    best = np.where(np.abs(za) <= np.abs(zb), a, b)
    fbest = np.minimum(np.abs(za), np.abs(zb))
    for _ in range(3):
        with np.errstate(divide="ignore", invalid="ignore"):
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        settled = (f1 == 0) | (f1 == f0)
        x2 = np.where(settled, x1, x2)
        outside = ~np.isfinite(x2) | (x2 < lo) | (x2 > hi)
        x2 = np.where(outside, 0.5 * (lo + hi), x2)
        f2 = hardy_z(x2, cfg)
        same = np.sign(f2) == np.sign(flo)
        lo = np.where(same, x2, lo)
        flo = np.where(same, f2, flo)
        hi = np.where(same, hi, x2)
        better = np.abs(f2) < fbest
        best = np.where(better, x2, best)
        fbest = np.where(better, np.abs(f2), fbest)
        x0, f0, x1, f1 = x1, f1, x2, f2
    return best


def _find_in_range(n_lo: int, n_hi: int, g: np.ndarray, zg: np.ndarray, cfg: ZetaConfig, max_depth: int):
    """Zeros between good Gram points g_{n_lo} and g_{n_hi}."""
    sign = np.where((np.arange(n_lo, n_hi + 1) % 2) == 0, 1.0, -1.0)
    good = np.flatnonzero(sign * zg > 0)
    brackets = []
    for i0, i1 in zip(good[:-1], good[1:]):
        expected = int(i1 - i0)
        found, ok = _block_brackets(g[i0 : i1 + 1], zg[i0 : i1 + 1], expected, cfg, max_depth)
        if not ok:
            lo_n = argument_principle_count(g[i0], cfg)
            hi_n = argument_principle_count(g[i1], cfg)
            if hi_n - lo_n != len(found):
                raise MissedZeroError(
                    f"Gram block [{g[i0]:.6f}, {g[i1]:.6f}] has {hi_n - lo_n} zeros by the argument "
                    f"principle but only {len(found)} sign changes were found")
        brackets.extend(found)
    return _refine(brackets, cfg)


def find_zeros(t_max: float, config: ZetaConfig = DEFAULT_CONFIG, max_depth: int = 12) -> ZeroTable:
    """All zeros 0 < gamma <= t_max, each refined to about 1e-9 or better.

    Scans Gram blocks from g_{-1} to the first good Gram point beyond t_max
    and cross-checks the final count with the argument principle.
    """
    if t_max > config.t_ceiling:
        raise AccuracyError(f"t_max {t_max} exceeds the configured ceiling {config.t_ceiling}")
    if t_max < 14.0:
        return ZeroTable(np.zeros(0), float(t_max))
    n_hi = int(math.ceil(riemann_von_mangoldt(t_max))) + 10
    g = gram_points(-1, n_hi)
    zg = hardy_z(g, config)
    n_index = np.arange(-1, n_hi + 1)
    good = (np.where(n_index % 2 == 0, 1.0, -1.0) * zg) > 0
    while not np.any(good & (g > t_max)):
        extra_n = np.arange(n_index[-1] + 1, n_index[-1] + 21)
        g_extra = gram_points(int(extra_n[0]), int(extra_n[-1]))
        z_extra = hardy_z(g_extra, config)
        g, zg, n_index = np.append(g, g_extra), np.append(zg, z_extra), np.append(n_index, extra_n)
        good = (np.where(n_index % 2 == 0, 1.0, -1.0) * zg) > 0
    if not good[0]:
        raise MissedZeroError("g_{-1} is not a good Gram point")
    last = int(np.flatnonzero(good & (g > t_max))[0])
    g, zg, n_index = g[: last + 1], zg[: last + 1], n_index[: last + 1]

    good_idx = np.flatnonzero(good[: last + 1])
    chunks = _split_chunks(good_idx, max(1, config.workers) * 4)
    jobs = [(int(n_index[a]), int(n_index[b]), g[a : b + 1], zg[a : b + 1]) for a, b in chunks]
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            parts = list(pool.map(lambda j: _find_in_range(*j, config, max_depth), jobs))
    else:
        parts = [_find_in_range(*j, config, max_depth) for j in jobs]
    zeros = np.sort(np.concatenate(parts)) if parts else np.zeros(0)

    expected_total = int(n_index[-1]) + 1  # N(g_n) = n + 1 at a good Gram point
    if zeros.size != expected_total:
        raise MissedZeroError(f"found {zeros.size} zeros below g_{n_index[-1]}, Gram count gives {expected_total}")
    check = argument_principle_count(float(g[-1]), config)
    if check != zeros.size:
        raise MissedZeroError(f"argument principle gives N={check} at g_{n_index[-1]}, found {zeros.size}")
    return ZeroTable(zeros[zeros <= t_max], float(t_max), "computed", 1e-9)


def _split_chunks(good_idx: np.ndarray, n_chunks: int) -> list[tuple[int, int]]:
    """Partition consecutive good Gram indices into contiguous ranges."""
    if good_idx.size < 2:
        return []
    cuts = np.unique(np.linspace(0, good_idx.size - 1, n_chunks + 1).round().astype(int))
    return [(int(good_idx[a]), int(good_idx[b])) for a, b in zip(cuts[:-1], cuts[1:])]


# ---------------------------------------------------------------- zeta'(rho)


@dataclass(frozen=True)
class CriticalPointValue:
    gamma: float
    zeta_prime: complex


_ZP_CACHE: "weakref.WeakKeyDictionary[ZeroTable, np.ndarray]" = weakref.WeakKeyDictionary()


def zeta_prime_values(zeros: ZeroTable, config: ZetaConfig = DEFAULT_CONFIG, count: int | None = None) -> np.ndarray:
    """zeta'(1/2 + i gamma) for the first ``count`` ordinates (all by default), cached per table."""
    n = len(zeros) if count is None else int(count)
    cached = _ZP_CACHE.get(zeros)
    if cached is not None and cached.size >= n:
        return cached[:n]
    done = 0 if cached is None else cached.size
    g = zeros.ordinates[done:n]
    if config.workers > 1 and g.size > 1:
        pieces = np.array_split(g, config.workers * 4)
        with ThreadPoolExecutor(config.workers) as pool:
            new = np.concatenate(list(pool.map(lambda p: np.atleast_1d(zeta_prime(0.5 + 1j * p, config)), pieces)))
    else:
        new = np.atleast_1d(zeta_prime(0.5 + 1j * g, config))
    vals = np.asarray(new, dtype=complex) if cached is None else np.concatenate([cached, new])
    vals.setflags(write=False)
    _ZP_CACHE[zeros] = vals
    return vals[:n]


def zeta_prime_at_zeros(zeros: ZeroTable, config: ZetaConfig = DEFAULT_CONFIG) -> list[CriticalPointValue]:
    vals = zeta_prime_values(zeros, config)
    return [CriticalPointValue(float(g), complex(v)) for g, v in zip(zeros.ordinates, vals)]


# ---------------------------------------------------------------- Landau-Gonek


def von_mangoldt_real(x: float) -> float:
    """Lambda(x) for real x; zero unless x is an integer prime power."""
    if x != math.floor(x) or x < 2:
        return 0.0
    n = int(x)
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return math.log(p) if n == 1 else 0.0
    return math.log(n)


def _is_prime_power(n: int) -> bool:
    return n >= 2 and von_mangoldt_real(float(n)) > 0


def nearest_prime_power_distance(x: float) -> float:
    """Distance from x to the nearest prime power other than x itself."""
    best = math.inf
    lo = math.floor(x)
    hi = math.ceil(x)
    if hi == x:
        hi += 1
    if lo == x:
        lo -= 1
    while lo >= 2 and not _is_prime_power(lo):
        lo -= 1
    if lo >= 2:
        best = x - lo
    while not _is_prime_power(hi):
        hi += 1
    return min(best, hi - x)


@dataclass(frozen=True)
class LandauGonekResult:
    x: float
    T: float
    lhs: complex
    main_term: float
    bound: float

    @property
    def deviation(self) -> float:
        return abs(self.lhs - self.main_term)

    @property
    def passed(self) -> bool:
        return self.deviation <= self.bound


def landau_gonek_check(x: float, zeros: ZeroTable, T: float, constant: float = 10.0) -> LandauGonekResult:
    """Compare sum_{0<gamma<=T} x^rho with -(T/2pi) Lambda(x).

    The bound is the three error terms of the explicit formula, each with
    the same explicit ``constant`` (the formula leaves them unspecified).
    """
    if not x > 1:
        raise ValueError("landau_gonek_check needs x > 1")
    if T > zeros.t_max:
        raise ValueError(f"T={T} exceeds zero table coverage {zeros.t_max}")
    g = zeros.upto(T)
    phase = g * math.log(x)
    amp = math.sqrt(x)
    lhs = complex(amp * math.fsum(np.cos(phase)), amp * math.fsum(np.sin(phase)))
    lam = von_mangoldt_real(x)
    main = -T / (2 * math.pi) * lam
    lx = math.log(x)
    dist = nearest_prime_power_distance(x)
    bound = constant * (
        x * math.log(2 * x * T) * math.log(math.log(3 * x))
        + lx * min(T, x / dist)
        + math.log(2 * T) * min(T, 1.0 / lx)
    )
    return LandauGonekResult(float(x), float(T), lhs, main, bound)


def zeros_from_ordinates(ordinates: Iterable[float], t_max: float | None = None, source: str = "ingested",
                         claimed_accuracy: float = 1e-9) -> ZeroTable:
    arr = np.asarray(list(ordinates), dtype=float)
    tm = float(arr[-1]) if t_max is None and arr.size else float(t_max or 0.0)
    return ZeroTable(arr, tm, source, claimed_accuracy)
