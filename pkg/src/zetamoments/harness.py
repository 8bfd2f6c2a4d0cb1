"""Discrete moments over zeros, their closed-form predictions, and ratios.

Every empirical mean is a compensated sum taken in zero-index order, so a
report does not depend on how the per-zero work was split across threads.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import arith
from .errors import AccuracyError, DomainError, ValidationError
from .hybrid import HybridContext, p_x
from .special_fn import EULER_GAMMA, barnes_ratio
from .zeta_engine import DEFAULT_CONFIG, ZeroTable, ZetaConfig, zeta_prime_values

MIN_ZETA_PRIME = 1e-8
ZETA_2 = math.pi**2 / 6.0


def log_height(T: float) -> float:
    """L = log(T / 2 pi), the mean spacing scale of zeros at height T."""
    if T <= 2 * math.pi:
        raise DomainError("T must exceed 2 pi")
    return math.log(T / (2.0 * math.pi))


@lru_cache(maxsize=64)
def arithmetic_factor(k: float, prime_cutoff: int = 10**6) -> float:
    return arith.a_k(k, prime_cutoff).value


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid of (T, X, k) plus numerical knobs.

    X is ``x_fixed`` when set, otherwise (log T)^x_exponent.
    """

    t_grid: tuple[float, ...] = (1000.0, 2000.0, 5000.0)
    x_fixed: float | None = 20.0
    x_exponent: float | None = None
    k_list: tuple[float, ...] = (1.0,)
    cutoff: int = 10**4
    prime_cutoff: int = 10**6
    seed: int = 0
    deterministic: bool = True
    threads: int = 1

    def __post_init__(self):
        if (self.x_fixed is None) == (self.x_exponent is None):
            raise ValidationError("set exactly one of x_fixed and x_exponent")
        if self.x_exponent is not None and not 0 < self.x_exponent < 2:
            raise ValidationError("x_exponent must lie in (0, 2)")
        if self.x_fixed is not None and self.x_fixed < 2:
            raise ValidationError("X must be >= 2")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        object.__setattr__(self, "k_list", tuple(float(k) for k in self.k_list))

    def x_for(self, T: float) -> float:
        if self.x_fixed is not None:
            return float(self.x_fixed)
        return max(2.0, math.log(T) ** self.x_exponent)

    def check_coverage(self, zeros: ZeroTable) -> None:
        if max(self.t_grid) > zeros.t_max:
            raise ValidationError(f"T={max(self.t_grid)} exceeds zero table coverage {zeros.t_max}")

    @property
    def zeta_config(self) -> ZetaConfig:
        return dataclasses.replace(DEFAULT_CONFIG, workers=self.threads)


@dataclass(frozen=True)
class MomentReport:
    T: float
    X: float
    k: float
    quantity: str
    empirical: float
    predicted: float
    n_zeros: int
    ratio: float = field(init=False)

    def __post_init__(self):
        r = self.empirical / self.predicted if self.predicted != 0 else math.nan
        object.__setattr__(self, "ratio", r)


def _mean(values: np.ndarray) -> float:
    return math.fsum(values) / values.size


def _guarded_abs_zeta_prime(zeros: ZeroTable, T: float, config: ZetaConfig, k: float) -> np.ndarray:
    n = zeros.count(T)
    if n == 0:
        raise ValidationError(f"no zeros up to T={T}")
    vals = np.abs(zeta_prime_values(zeros, config, n))
    if k < 0:
        bad = np.flatnonzero(vals < MIN_ZETA_PRIME)
        if bad.size:
            listed = ", ".join(f"{zeros.ordinates[i]:.9f}" for i in bad[:10])
            raise AccuracyError(f"|zeta'(rho)| < {MIN_ZETA_PRIME} at gamma = {listed}")
    return vals


def _abs_p_x(zeros: ZeroTable, T: float, ctx: HybridContext) -> np.ndarray:
    g = zeros.upto(T)
    return np.abs(p_x(0.5 + 1j * g, ctx))


def compute_jk(k: float, T: float, zeros: ZeroTable, config: ZetaConfig = DEFAULT_CONFIG) -> float:
    """J_k(T) = (1/N(T)) sum_{0 < gamma <= T} |zeta'(rho)|^{2k}, N(T) the table count."""
    if not k > -1.5:
        raise DomainError("J_k needs k > -3/2")
    if T > zeros.t_max:
        raise ValidationError(f"T={T} exceeds zero table coverage {zeros.t_max}")
    if k == 0:
        return 1.0
    d = _guarded_abs_zeta_prime(zeros, T, config, k)
    return _mean(d ** (2 * k))


def predict_hko(k: float, T: float, ak_value: float | None = None) -> float:
    """a_k G^2(k+2)/G(2k+3) L^{k(k+2)}."""
    if not k > -1.5:
        raise DomainError("prediction needs k > -3/2")
    if k == 0:
        return 1.0
    a = arithmetic_factor(float(k)) if ak_value is None else ak_value
    return a * barnes_ratio(k) * log_height(T) ** (k * (k + 2))


def predict_p_x_moment(k: float, X: float, ak_value: float | None = None) -> float:
    """a_k (e^gamma log X)^{k^2}."""
    if k == 0:
        return 1.0
    a = arithmetic_factor(float(k)) if ak_value is None else ak_value
    return a * (math.exp(EULER_GAMMA) * math.log(X)) ** (k * k)


def predict_conj3(k: float, T: float, X: float) -> float:
    """G^2(k+2)/G(2k+3) (e^gamma log X)^{2k} (L/(e^gamma log X))^{k(k+2)}."""
    if not k > -1.5:
        raise DomainError("prediction needs k > -3/2")
    if k == 0:
        return 1.0
    ex = math.exp(EULER_GAMMA) * math.log(X)
    return barnes_ratio(k) * ex ** (2 * k) * (log_height(T) / ex) ** (k * (k + 2))


def predict_twisted_i4(m: int, n: int, T: float) -> float:
    """Leading term (T L/2 pi) L^8/(8640 zeta(2)) delta(m) delta(n)/sqrt(mn)."""
    if m < 1 or n < 1:
        raise DomainError("m and n must be positive")
    if math.gcd(m, n) != 1:
        raise DomainError(f"m={m} and n={n} are not coprime")
    L = log_height(T)
    return (T * L / (2 * math.pi)) * L**8 / (8640.0 * ZETA_2) * (
        arith.delta_multiplicative(m) * arith.delta_multiplicative(n) / math.sqrt(m * n))


def moment_p_x(k: float, T: float, ctx: HybridContext, ak_value: float | None = None) -> MomentReport:
    """Mean of |P_X(rho)|^{2k} over gamma <= T against a_k (e^gamma log X)^{k^2}."""
    n = ctx.zeros.count(T)
    if k == 0:
        return MomentReport(T, ctx.X, 0.0, "px", 1.0, 1.0, n)
    emp = _mean(_abs_p_x(ctx.zeros, T, ctx) ** (2 * k))
    return MomentReport(T, ctx.X, k, "px", emp, predict_p_x_moment(k, ctx.X, ak_value), n)


def _ratio_moment(k: float, T: float, ctx: HybridContext) -> float:
    d = _guarded_abs_zeta_prime(ctx.zeros, T, ctx.config, k)
    return _mean((d / _abs_p_x(ctx.zeros, T, ctx)) ** (2 * k))


def moment_ratio(k: float, T: float, ctx: HybridContext) -> MomentReport:
    """Mean of |zeta'(rho)/P_X(rho)|^{2k} against G^2(k+2)/G(2k+3) (e^gamma log X)^{2k} (L / (e^gamma log X))^{k(k+2)}."""
    n = ctx.zeros.count(T)
    if k == 0:
        return MomentReport(T, ctx.X, 0.0, "ratio0", 1.0, 1.0, n)
    tag = {1.0: "ratio2", 2.0: "ratio4"}.get(float(k), f"ratio{2 * k:g}")
    return MomentReport(T, ctx.X, k, tag, _ratio_moment(k, T, ctx), predict_conj3(k, T, ctx.X), n)


def moment_ratio2(T: float, ctx: HybridContext) -> MomentReport:
    """Mean of |zeta'/P_X|^2 against L^3/(12 e^gamma log X)."""
    return moment_ratio(1.0, T, ctx)


def moment_ratio4(T: float, ctx: HybridContext) -> MomentReport:
    """Mean of |zeta'/P_X|^4 against L^8/(8640 (e^gamma log X)^4)."""
    return moment_ratio(2.0, T, ctx)


def splitting_check(k: float, T: float, ctx: HybridContext) -> MomentReport:
    """J_k(T) against (mean |P_X|^{2k}) (mean |Z_X'|^{2k}), Z_X' by the ratio method.

    The report's ratio is empirical/predicted, i.e. how far the moment of
    zeta' is from splitting into the product of the two factor moments.
    """
    n = ctx.zeros.count(T)
    if k == 0:
        return MomentReport(T, ctx.X, 0.0, "split", 1.0, 1.0, n)
    d = _guarded_abs_zeta_prime(ctx.zeros, T, ctx.config, k)
    p = _abs_p_x(ctx.zeros, T, ctx)
    emp = _mean(d ** (2 * k))
    pred = _mean(p ** (2 * k)) * _mean((d / p) ** (2 * k))
    return MomentReport(T, ctx.X, k, "split", emp, pred, n)


QUANTITIES = ("jk", "px", "ratio2", "ratio4", "split")


def run_grid(quantity: str, config: ExperimentConfig, zeros: ZeroTable) -> list[MomentReport]:
    """One report per (T, k) in the grid (k ignored by ratio2/ratio4)."""
    if quantity not in QUANTITIES:
        raise ValidationError(f"unknown quantity {quantity!r}")
    config.check_coverage(zeros)
    zcfg = config.zeta_config
    out = []
    ks = (1.0,) if quantity in ("ratio2", "ratio4") else config.k_list
    for T in config.t_grid:
        X = config.x_for(T)
        ctx = HybridContext(X, zeros, config=zcfg)
        for k in ks:
            if quantity == "jk":
                emp = compute_jk(k, T, zeros, zcfg)
                out.append(MomentReport(T, X, k, "jk", emp, predict_hko(k, T), zeros.count(T)))
            elif quantity == "px":
                ak = arithmetic_factor(k, config.prime_cutoff) if k != 0 else 1.0
                out.append(moment_p_x(k, T, ctx, ak))
            elif quantity == "ratio2":
                out.append(moment_ratio2(T, ctx))
            elif quantity == "ratio4":
                out.append(moment_ratio4(T, ctx))
            else:
                out.append(splitting_check(k, T, ctx))
    return out
