"""CUE side: exact moments of |Z'(theta_n)| and Haar-unitary Monte Carlo.

Z(theta) = det(I - U e^{-i theta}) for U Haar-distributed in U(N).  At an
eigenangle only one factor of the product vanishes, so
|Z'(theta_n)| = prod_{l != n} 2 |sin((theta_l - theta_n)/2)|.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateSampleError, DomainError
from .special_fn import barnes_g_log

MAX_N = 128
UNITARITY_TOL = 1e-12
DEGENERATE_GAP = 1e-13
CHUNK_SAMPLES = 1000  # fixed per-stream chunk so results do not depend on threads


@dataclass(frozen=True)
class CueSample:
    """Eigenangles in [0, 2 pi) of one Haar unitary of size n."""

    n: int
    angles: np.ndarray
    unitarity_residual: float = 0.0

    def __post_init__(self):
        a = np.array(self.angles, dtype=float)
        if a.shape != (self.n,):
            raise DomainError(f"expected {self.n} angles, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)


def cue_moment_exact(N: int, k: float) -> float:
    """(1/N) E sum_n |Z'(theta_n)|^{2k} over U(N).

    Equal to G^2(k+2)/G(2k+3) * G(N) G(N+2k+2) / (N G^2(N+k+1)).
    """
    if N < 1 or int(N) != N:
        raise DomainError("N must be a positive integer")
    if not k > -1.5:
        raise DomainError("the CUE moment is finite only for k > -3/2")
    if k == 0:
        return 1.0  # the Barnes factors cancel identically
    N = int(N)
    log_val = (2.0 * barnes_g_log(k + 2) - barnes_g_log(2 * k + 3)
               + barnes_g_log(N) + barnes_g_log(N + 2 * k + 2)
               - math.log(N) - 2.0 * barnes_g_log(N + k + 1))
    return math.exp(log_val)


def _haar_batch(N: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """``count`` Haar unitaries of size N and their worst unitarity residual."""
    z = (rng.standard_normal((count, N, N)) + 1j * rng.standard_normal((count, N, N))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    # without this phase fix QR output is not Haar distributed
    q = q * (d / np.abs(d))[:, None, :]
    eye = np.eye(N)
    resid = float(np.max(np.abs(np.conj(np.swapaxes(q, -1, -2)) @ q - eye))) if count else 0.0
    return q, resid


def _angles(u: np.ndarray) -> np.ndarray:
    try:
        ev = np.linalg.eigvals(u)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    return np.sort(np.mod(np.angle(ev), 2.0 * math.pi), axis=-1)


def _sample_angles(N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    u, resid = _haar_batch(N, count, rng)
    if resid > UNITARITY_TOL:
        raise ConvergenceError(f"unitarity residual {resid:.3e} exceeds {UNITARITY_TOL}")
    return _angles(u)


def sample_haar_unitary(N: int, rng: np.random.Generator | int | None = None) -> CueSample:
    """One Haar draw from U(N) reduced to its eigenangles."""
    if not 1 <= N <= MAX_N:
        raise DomainError(f"N must lie in 1..{MAX_N}")
    gen = np.random.default_rng(rng)
    u, resid = _haar_batch(N, 1, gen)
    if resid > UNITARITY_TOL:
        raise ConvergenceError(f"unitarity residual {resid:.3e} exceeds {UNITARITY_TOL}")
    return CueSample(N, _angles(u)[0], resid)


def _log_abs_zprime(angles: np.ndarray) -> np.ndarray:
    """log |Z'(theta_n)| for a batch of angle vectors (shape (..., N))."""
    diff = angles[..., None, :] - angles[..., :, None]
    s = np.abs(2.0 * np.sin(0.5 * diff))
    N = angles.shape[-1]
    idx = np.arange(N)
    s[..., idx, idx] = 1.0
    if N > 1 and np.min(s) < DEGENERATE_GAP:
        raise DegenerateSampleError("two eigenangles coincide to within 1e-13")
    return np.sum(np.log(s), axis=-1)


def _moments(angles: np.ndarray, k: float) -> np.ndarray:
    """(1/N) sum_n |Z'(theta_n)|^{2k} per sample."""
    return np.mean(np.exp(2.0 * k * _log_abs_zprime(angles)), axis=-1)


def charpoly_deriv_moment(sample: CueSample, k: float) -> float:
    """(1/N) sum_n |Z'(theta_n)|^{2k} for one sample."""
    if k == 0:
        return 1.0
    return float(_moments(sample.angles[None, :], k)[0])


@dataclass(frozen=True)
class MonteCarloMoment:
    mean: float
    std_error: float
    samples: int

    def __iter__(self):
        return iter((self.mean, self.std_error))


def cue_moment_mc(N: int, k: float, samples: int, seed: int = 0, threads: int = 1) -> MonteCarloMoment:
    """Monte Carlo estimate of the CUE moment with its standard error.

    Samples are drawn in fixed chunks, each from its own spawned stream, and
    reduced in chunk order, so the result is the same for any ``threads``.
    """
    if samples < 100:
        raise DomainError("cue_moment_mc needs at least 100 samples")
    if not 1 <= N <= MAX_N:
        raise DomainError(f"N must lie in 1..{MAX_N}")
    if k == 0:
        return MonteCarloMoment(1.0, 0.0, samples)
    n_chunks = -(-samples // CHUNK_SAMPLES)
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK_SAMPLES, samples - i * CHUNK_SAMPLES) for i in range(n_chunks)]

    def run(i):
        return _moments(_sample_angles(N, sizes[i], np.random.default_rng(seeds[i])), k)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(i) for i in range(n_chunks)]
    vals = np.concatenate(parts)
    mean = math.fsum(vals) / samples
    var = math.fsum((vals - mean) ** 2) / (samples - 1)
    return MonteCarloMoment(mean, math.sqrt(var / samples), samples)
