"""Hybrid Euler-Hadamard product zeta(s) ~ P_X(s) Z_X(s).

P_X is the exponentiated prime-power sum over n <= X; Z_X is the smoothed
product over zeros near s, evaluated through U(z).  Z_X'(rho) is available
two ways: as zeta'(rho)/P_X(rho) and directly from the zero sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arith
from .errors import CapacityError, DomainError, WindowError, ZeroNotFoundError
from .special_fn import SmoothingKernel, default_kernel, small_z_constant, u_kernel
from .zeta_engine import DEFAULT_CONFIG, ZeroTable, ZetaConfig, zeta, zeta_prime

DEFAULT_ZERO_WINDOW = 40.0
MIN_ZERO_WINDOW = 20.0


def default_zero_window(X: float) -> float:
    """Window half-width (units of 1/log X) used when none is given.

    U((s - rho) log X) decays only like f-hat(y/X)/y along the imaginary
    axis, so the window has to grow with X to keep the truncated zero sum
    stable under doubling.  48 X keeps the relative change of log Z_X
    under doubling below about 1e-4 for 20 <= X <= 30.
    """
    return max(DEFAULT_ZERO_WINDOW, 48.0 * X)


def _prime_power_terms(X: float) -> tuple[np.ndarray, np.ndarray]:
    """(n, Lambda(n)/log n) for prime powers n <= X."""
    ns, ws = [], []
    for p in arith.primes_up_to(int(math.floor(X))):
        p = int(p)
        q, l = p, 1
        while q <= X:
            ns.append(q)
            ws.append(1.0 / l)
            q *= p
            l += 1
    order = np.argsort(ns, kind="stable")
    return np.asarray(ns, dtype=float)[order], np.asarray(ws)[order]


@dataclass(frozen=True, eq=False)
class HybridContext:
    """Fixed X, kernel and zero table for hybrid-product evaluations.

    ``zero_window`` is the half-width of the zero sum in units of 1/log X;
    ``None`` picks :func:`default_zero_window`.
    """

    X: float
    zeros: ZeroTable
    f: SmoothingKernel = field(default_factory=default_kernel)
    zero_window: float | None = None
    config: ZetaConfig = DEFAULT_CONFIG
    alpha: dict = field(default_factory=dict, repr=False)
    _pp_n: np.ndarray = field(init=False, repr=False)
    _pp_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.X < 2:
            raise DomainError("HybridContext needs X >= 2")
        w = default_zero_window(self.X) if self.zero_window is None else float(self.zero_window)
        if w < MIN_ZERO_WINDOW:
            raise DomainError(f"zero_window {w} below the minimum {MIN_ZERO_WINDOW}")
        object.__setattr__(self, "zero_window", w)
        n, wt = _prime_power_terms(self.X)
        object.__setattr__(self, "_pp_n", n)
        object.__setattr__(self, "_pp_w", wt)

    @property
    def log_x(self) -> float:
        return math.log(self.X)

    @property
    def half_width(self) -> float:
        """Window half-width in t."""
        return self.zero_window / self.log_x

    @property
    def small_z_constant(self) -> float:
        return small_z_constant(self.X, self.f)

    def with_window(self, zero_window: float) -> "HybridContext":
        return HybridContext(self.X, self.zeros, self.f, zero_window, self.config, self.alpha)

    def alpha_for(self, k: float, cutoff: int) -> arith.AlphaCoefficients:
        """Coefficients of P_X^k up to ``cutoff``, built once per (k, cutoff)."""
        key = (float(k), int(cutoff))
        if key not in self.alpha:
            self.alpha[key] = arith.build_alpha(k, self.X, cutoff)
        return self.alpha[key]


def _as_complex(s):
    arr = np.asarray(s, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return complex(arr) if scalar else arr


def log_p_x(s, ctx: HybridContext):
    """sum_{n <= X} Lambda(n) / (n^s log n)."""
    s, scalar = _as_complex(s)
    if np.any(s.real < 0):
        raise DomainError("P_X is evaluated for Re s >= 0 only")
    flat = s.reshape(-1)
    expo = np.exp(-np.outer(flat, np.log(ctx._pp_n))) @ ctx._pp_w
    return _out(expo.reshape(s.shape), scalar)


def p_x(s, ctx: HybridContext):
    """P_X(s) = exp(sum_{n <= X} Lambda(n) / (n^s log n))."""
    s, scalar = _as_complex(s)
    return _out(np.exp(np.asarray(log_p_x(s, ctx))), scalar)


def p_x_pow_k_poly(s, k: float, cutoff: int, ctx: HybridContext):
    """sum_{n <= cutoff} alpha_k(n) n^{-s}, the truncated Dirichlet series of P_X^k."""
    if cutoff < 1:
        raise CapacityError("cutoff must be >= 1")
    s, scalar = _as_complex(s)
    if k == 0:
        return _out(np.ones_like(s), scalar)
    alpha = ctx.alpha_for(k, cutoff)
    n = alpha.support()
    coef = alpha.values[n]
    logn = np.log(n.astype(float))
    flat = s.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    # chunk to keep the (points x support) matrix modest
    step = max(1, 2_000_000 // max(1, n.size))
    for i in range(0, flat.size, step):
        out[i : i + step] = np.exp(-np.outer(flat[i : i + step], logn)) @ coef
    return _out(out.reshape(s.shape), scalar)


def _window_ordinates(t: float, ctx: HybridContext, exclude: float | None = None) -> np.ndarray:
    """Signed ordinates +-gamma within the window around t."""
    h = ctx.half_width
    if abs(t) + h > ctx.zeros.t_max:
        raise WindowError(
            f"window [{t - h:.3f}, {t + h:.3f}] exceeds zero table coverage t_max={ctx.zeros.t_max}")
    pos = ctx.zeros.between(t - h, t + h)
    neg = -ctx.zeros.between(-t - h, -t + h)[::-1]
    g = np.concatenate([neg, pos])
    if exclude is not None:
        g = g[g != exclude]
    return g


def _zero_sum(s: complex, ordinates: np.ndarray, ctx: HybridContext) -> complex:
    if ordinates.size == 0:
        return 0j
    z = (s - (0.5 + 1j * ordinates)) * ctx.log_x
    return complex(np.sum(u_kernel(z, ctx.X, ctx.f)))


def log_z_x(s, ctx: HybridContext):
    """-sum_rho U((s - rho) log X) over zeros in the window (both signs of gamma)."""
    s, scalar = _as_complex(s)
    flat = s.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    for i, si in enumerate(flat):
        g = _window_ordinates(si.imag, ctx)
        if si.real == 0.5 and np.any(g == si.imag):
            raise DomainError(f"s = {si} is a zero; use z_x_prime_at_zero")
        out[i] = -_zero_sum(complex(si), g, ctx)
    return _out(out.reshape(s.shape), scalar)


def z_x(s, ctx: HybridContext):
    """Z_X(s) = exp(-sum_rho U((s - rho) log X)), truncated to the zero window."""
    s, scalar = _as_complex(s)
    return _out(np.exp(np.asarray(log_z_x(s, ctx))), scalar)


def _locate(gamma: float, ctx: HybridContext) -> float:
    g = ctx.zeros.ordinates
    i = int(np.searchsorted(g, gamma))
    for j in (i - 1, i):
        if 0 <= j < g.size and abs(g[j] - gamma) <= 1e-9 * max(1.0, abs(gamma)):
            return float(g[j])
    raise ZeroNotFoundError(f"{gamma!r} is not an ordinate of the zero table")


def z_x_prime_at_zero(gamma, ctx: HybridContext, method: str = "ratio"):
    """Z_X'(1/2 + i gamma) for ordinates in the table.

    ``ratio`` gives zeta'(rho)/P_X(rho).  ``direct`` gives
    C log X exp(-sum_{rho' != rho} U((rho - rho') log X)), using that
    exp(-U(z)) ~ C z near z = 0.
    """
    g_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    exact = np.array([_locate(float(g), ctx) for g in g_arr])
    rho = 0.5 + 1j * exact
    if method == "ratio":
        out = np.asarray(zeta_prime(rho, ctx.config)) / np.asarray(p_x(rho, ctx))
    elif method == "direct":
        pref = ctx.small_z_constant * ctx.log_x
        out = np.array([pref * np.exp(-_zero_sum(r, _window_ordinates(g, ctx, exclude=g), ctx))
                        for g, r in zip(exact, rho)])
    else:
        raise ValueError(f"unknown method {method!r}; use 'ratio' or 'direct'")
    return complex(out[0]) if np.ndim(gamma) == 0 else out


def hybrid_residual(s, ctx: HybridContext):
    """|zeta(s) / (P_X(s) Z_X(s)) - 1|."""
    s, scalar = _as_complex(s)
    ratio = np.asarray(zeta(s, ctx.config)) / np.exp(np.asarray(log_p_x(s, ctx)) + np.asarray(log_z_x(s, ctx)))
    res = np.abs(ratio - 1.0)
    return float(res) if scalar else res
