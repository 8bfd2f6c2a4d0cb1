"""Complex special functions: log-Gamma, digamma, Barnes G, E1, the smoothed
kernel U(z) and the functional-equation factor chi(s).

Everything here works in IEEE double precision. Functions accept Python
scalars or numpy arrays; scalar in gives scalar out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, NonconvergenceError, PoleError

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)
# zeta'(-1) = 1/12 - log(Glaisher's constant)
ZETA_PRIME_MINUS_ONE = -0.16542114370045092921

_STIRLING_SHIFT = 15.0
_E1_SERIES_RADIUS = 4.0
_E1_MAX_ITER = 5000


@lru_cache(maxsize=None)
def bernoulli_numbers(n_max: int) -> tuple[Fraction, ...]:
    """Exact B_0..B_{n_max} (convention B_1 = -1/2)."""
    b = [Fraction(0)] * (n_max + 1)
    b[0] = Fraction(1)
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * b[j]
        b[m] = -acc / (m + 1)
    return tuple(b)


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    if scalar:
        return complex(arr.reshape(()))
    return arr


def _check_gamma_poles(z: np.ndarray) -> None:
    on_axis = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(on_axis):
        bad = z[on_axis].ravel()[0]
        raise PoleError(f"Gamma has a pole at {bad.real:g}")


def _shifted(z: np.ndarray, correction: Callable[[np.ndarray], np.ndarray]):
    """Shift z up by integers until Re z >= _STIRLING_SHIFT.

    Returns the shifted argument and the accumulated correction
    sum_j correction(z + j) over the shifts.
    """
    m = np.maximum(0, np.ceil(_STIRLING_SHIFT - z.real)).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for j in range(int(m.max()) if m.size else 0):
        active = m > j
        acc[active] += correction(w[active])
        w[active] += 1.0
    return w, acc


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Upward recurrence to Re z >= 15, then the Stirling series. Summing
    principal logs of z + j keeps the result on the principal branch with
    the cut along the negative real axis.
    """
    z, scalar = _as_complex_array(z)
    _check_gamma_poles(z)
    w, logs = _shifted(z, np.log)
    b = bernoulli_numbers(22)
    series = np.zeros_like(w)
    inv_w = 1.0 / w
    inv_w2 = inv_w * inv_w
    power = inv_w
    for k in range(1, 11):
        series += float(b[2 * k]) / (2 * k * (2 * k - 1)) * power
        power = power * inv_w2
    out = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - logs
    return _ret(out, scalar)


def gamma(z):
    return np.exp(log_gamma(z))


def digamma(z):
    """psi(z) = Gamma'(z)/Gamma(z)."""
    z, scalar = _as_complex_array(z)
    _check_gamma_poles(z)
    w, recips = _shifted(z, lambda v: 1.0 / v)
    b = bernoulli_numbers(22)
    inv_w2 = 1.0 / (w * w)
    power = inv_w2
    series = np.zeros_like(w)
    for k in range(1, 11):
        series += float(b[2 * k]) / (2 * k) * power
        power = power * inv_w2
    out = np.log(w) - 0.5 / w - series - recips
    return _ret(out, scalar)


def _zeta_integer(k: int) -> float:
    """zeta(k) for integer k >= 2 (Euler-Maclaurin with N = 10)."""
    n = 10
    total = math.fsum(j ** -float(k) for j in range(1, n))
    total += n ** (1.0 - k) / (k - 1) + 0.5 * n ** -float(k)
    b = bernoulli_numbers(20)
    rising = float(k)
    for j in range(1, 9):
        total += float(b[2 * j]) / math.factorial(2 * j) * rising * n ** (-k - 2 * j + 1.0)
        rising *= (k + 2 * j - 1) * (k + 2 * j)
    return total


@lru_cache(maxsize=1)
def _barnes_taylor_coeffs() -> tuple[float, ...]:
    # coefficient of z^(k+1) in log G(1+z), k >= 2
    return tuple((-1) ** k * _zeta_integer(k) / (k + 1) for k in range(2, 70))


def _log_barnes_near_one(z: float) -> float:
    """log G(1+z) for |z| <= 1/2 from its Taylor series."""
    head = 0.5 * z * LOG_2PI - 0.5 * (z + (1.0 + EULER_GAMMA) * z * z)
    terms = []
    power = z * z * z
    for c in _barnes_taylor_coeffs():
        terms.append(c * power)
        power *= z
    return head + math.fsum(terms)


def _log_barnes_asymptotic(x: float) -> float:
    z = x - 1.0
    b = bernoulli_numbers(20)
    lz = math.log(z)
    terms = [0.5 * z * z * lz, -0.75 * z * z, 0.5 * z * LOG_2PI, -lz / 12.0, ZETA_PRIME_MINUS_ONE]
    inv_z2 = 1.0 / (z * z)
    power = inv_z2
    for k in range(1, 9):
        terms.append(float(b[2 * k + 2]) / (4 * k * (k + 1)) * power)
        power *= inv_z2
    return math.fsum(terms)


def barnes_g_log(x: float) -> float:
    """log G(x) for real x > 0, where G(1) = 1 and G(x+1) = Gamma(x) G(x)."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"barnes_g_log needs x > 0, got {x!r}")
    if x >= 20.0:
        return _log_barnes_asymptotic(x)
    if x < 0.5:
        return barnes_g_log(x + 1.0) - math.lgamma(x)
    n = int(math.floor(x - 0.5))
    y = x - n
    parts = [_log_barnes_near_one(y - 1.0)]
    parts.extend(math.lgamma(y + j) for j in range(n))
    return math.fsum(parts)


def barnes_g(x: float) -> float:
    return math.exp(barnes_g_log(x))


def barnes_ratio(k: float) -> float:
    """G(k+2)^2 / G(2k+3), the random-matrix leading coefficient."""
    if k <= -1.5:
        raise DomainError("G^2(k+2)/G(2k+3) needs k > -3/2")
    return math.exp(2.0 * barnes_g_log(k + 2.0) - barnes_g_log(2.0 * k + 3.0))


# ---------------------------------------------------------------- E1


def _e1_series(z: np.ndarray) -> np.ndarray:
    """-gamma - log z - sum_{k>=1} (-z)^k / (k k!)."""
    total = np.zeros_like(z)
    term = np.ones_like(z)
    mag = np.abs(z)
    n_terms = int(max(40, 3.0 * float(mag.max(initial=0.0)) + 40))
    for k in range(1, n_terms + 1):
        term = term * (-z) / k
        total += term / k
    return -EULER_GAMMA - np.log(z) - total


def _e1_continued_fraction(z: np.ndarray) -> np.ndarray:
    """E1(z) = exp(-z) / (z+1 - 1/(z+3 - 4/(z+5 - ...))), modified Lentz."""
    tiny = 1e-300
    b = z + 1.0
    f = np.where(b == 0, tiny, b)
    c = f.copy()
    d = np.zeros_like(z)
    done = np.zeros(z.shape, dtype=bool)
    for n in range(1, _E1_MAX_ITER + 1):
        a = -float(n * n)
        b = b + 2.0
        d = b + a * d
        d = np.where(d == 0, tiny, d)
        c = b + a / c
        c = np.where(c == 0, tiny, c)
        d = 1.0 / d
        delta = c * d
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < 4e-16
        if done.all():
            break
    else:
        raise NonconvergenceError("E1 continued fraction did not converge")
    return np.exp(-z) / f


def exp_integral_e1(z):
    """Principal-branch E1(z) = int_z^inf e^-u / u du, cut on (-inf, 0]."""
    z, scalar = _as_complex_array(z)
    if np.any(z == 0):
        raise DomainError("E1 has a logarithmic singularity at z = 0")
    if np.any((z.imag == 0) & (z.real < 0)):
        raise DomainError("E1 is not defined on its branch cut (negative real axis)")
    # evaluate in the closed upper half plane; Schwarz reflection for the rest
    lower = z.imag < 0
    w = np.where(lower, np.conj(z), z)
    mag = np.abs(w)
    # series where |z| is small, or where Re z < 0 keeps cancellation mild
    use_series = (mag <= _E1_SERIES_RADIUS) | (mag + w.real <= 8.0)
    out = np.empty_like(w)
    if np.any(use_series):
        out[use_series] = _e1_series(w[use_series])
    if np.any(~use_series):
        out[~use_series] = _e1_continued_fraction(w[~use_series])
    out = np.where(lower, np.conj(out), out)
    return _ret(out, scalar)


# ------------------------------------------------------- smoothing kernel


def bump(u):
    """exp(-1/(u(1-u))) on (0,1), zero elsewhere."""
    u = np.asarray(u, dtype=float)
    inside = (u > 0) & (u < 1)
    out = np.zeros_like(u)
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (ui * (1.0 - ui)))
    return out


@dataclass(frozen=True)
class SmoothingKernel:
    """Non-negative C-infinity weight f on [0, 1] with a fixed quadrature rule.

    ``evaluator`` maps u to the unnormalised shape; ``scale`` multiplies it so
    the rule integrates f to one.
    """

    evaluator: Callable[[np.ndarray], np.ndarray] = bump
    n_nodes: int = 64
    scale: float = 1.0
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    values: np.ndarray = field(init=False, repr=False, compare=False)
    mass: float = field(init=False, compare=False)

    def __post_init__(self):
        x, w = np.polynomial.legendre.leggauss(self.n_nodes)
        nodes = 0.5 * (x + 1.0)
        weights = 0.5 * w
        raw = np.asarray(self.evaluator(nodes), dtype=float)
        if np.any(raw < 0):
            raise DomainError("smoothing kernel must be non-negative")
        values = self.scale * raw
        for arr in (nodes, weights, values):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mass", math.fsum(weights * values))

    def __call__(self, u):
        return self.scale * np.asarray(self.evaluator(u), dtype=float)

    def normalized(self) -> "SmoothingKernel":
        return SmoothingKernel(self.evaluator, self.n_nodes, self.scale / self.mass)

    def integrate(self, g: Callable[[np.ndarray], np.ndarray]) -> float:
        """int_0^1 f(u) g(u) du with the kernel's rule."""
        return math.fsum(self.weights * self.values * np.asarray(g(self.nodes)))


def default_kernel(n_nodes: int = 64) -> SmoothingKernel:
    return SmoothingKernel(bump, n_nodes).normalized()


def u_kernel(z, X: float, f: SmoothingKernel):
    """U(z) = int_0^1 f(u) E1(z (u + X - 1)/X) du."""
    if X < 2:
        raise DomainError("U(z) needs X >= 2")
    z, scalar = _as_complex_array(z)
    scale = (f.nodes + X - 1.0) / X
    args = z[..., None] * scale
    vals = exp_integral_e1(args)
    out = vals @ (f.weights * f.values)
    return _ret(out, scalar)


def small_z_constant(X: float, f: SmoothingKernel) -> float:
    """C with exp(-U(z)) ~ C z as z -> 0.

    From E1(w) = -gamma - log w + O(w): C = e^gamma exp(int f log((u+X-1)/X)).
    """
    return math.exp(EULER_GAMMA + f.integrate(lambda u: np.log((u + X - 1.0) / X)))


# ---------------------------------------------------------------- chi


def _chi_pole_check(s: np.ndarray) -> None:
    # Gamma((1-s)/2) has poles at s = 1, 3, 5, ...
    odd = (s.imag == 0) & (s.real >= 1) & (s.real == np.round(s.real)) & (np.round(s.real) % 2 == 1)
    if np.any(odd):
        raise PoleError(f"chi has a pole at s = {s[odd].ravel()[0].real:g}")


def log_chi(s):
    """log chi(s) with chi(s) = pi^(s-1/2) Gamma((1-s)/2) / Gamma(s/2).

    Equal to 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) but free of overflow for
    large |Im s|. The imaginary part is only defined modulo 2 pi.
    """
    s, scalar = _as_complex_array(s)
    _chi_pole_check(s)
    zero = (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real)) & (np.round(s.real) % 2 == 0)
    if np.any(zero):
        raise DomainError("chi vanishes at s = 0, -2, -4, ...; log is undefined")
    out = (s - 0.5) * math.log(math.pi) + log_gamma((1.0 - s) / 2.0) - log_gamma(s / 2.0)
    return _ret(out, scalar)


def chi(s):
    """chi(s) from zeta(s) = chi(s) zeta(1 - s)."""
    s, scalar = _as_complex_array(s)
    zero = (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real)) & (np.round(s.real) % 2 == 0)
    out = np.zeros_like(s)
    if np.any(~zero):
        out[~zero] = np.exp(log_chi(s[~zero]))
    return _ret(out, scalar)


def chi_logderiv(s):
    """chi'(s)/chi(s) = log pi - psi((1-s)/2)/2 - psi(s/2)/2."""
    s, scalar = _as_complex_array(s)
    out = math.log(math.pi) - 0.5 * digamma((1.0 - s) / 2.0) - 0.5 * digamma(s / 2.0)
    return _ret(out, scalar)


def chi_logderiv_half(t):
    """chi'/chi(1/2 + it) = -log(t/2pi) + O(1/t^2); real on the critical line."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 1):
        raise DomainError("chi_logderiv_half needs t >= 1")
    out = math.log(math.pi) - np.real(digamma(0.25 + 0.5j * t_arr))
    return float(out) if t_arr.ndim == 0 else out
