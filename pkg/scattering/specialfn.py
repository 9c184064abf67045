"""Integer-order Bessel and Hankel functions of real positive argument.

J_n comes from the power series below x = 2 and from the Hankel asymptotic expansion once
x > max(40, n^2/2 + 25), where its terms shrink from the first one on. Everything in between
uses Miller's normalised downward recurrence. Y_0 and Y_1 are seeded from the integer-order
limit series, from the Neumann series over the Miller values up to x = 40 and from the
asymptotic expansion above that, then carried to higher orders by upward recurrence, which is
the stable direction for Y.

Every function accepts a scalar or an array for ``x`` and returns the same shape; sequence
functions prepend an order axis.
"""

from __future__ import annotations

import cmath
import math
from typing import Tuple

import numpy as np

from .exceptions import DomainError

MAX_ORDER = 64
SERIES_CUTOFF = 2.0
ASYMPTOTIC_CUTOFF = 40.0

_EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 30
_ASYMPTOTIC_TERMS = 80
_MILLER_SEED = 1e-30
_RESCALE_LIMIT = 1e250


def _check_order(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"Bessel order must be an integer, got {n!r}")
    if n < 0 or n > MAX_ORDER:
        raise DomainError(f"Bessel order {n} outside supported range [0, {MAX_ORDER}]")
    return int(n)


def _check_argument(x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    if xa.size and (not np.all(np.isfinite(xa)) or np.any(xa <= 0.0)):
        raise DomainError("Bessel argument must be finite and strictly positive")
    return xa


def _j_series(n: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    quarter_sq = -(half * half)
    term = half**n / math.factorial(n)
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * quarter_sq / (k * (n + k))
        total += term
    return total


def _y01_series(x: np.ndarray, j0: np.ndarray, j1: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Integer-order limit series for Y_0 and Y_1."""
    half = 0.5 * x
    q = half * half
    log_half = np.log(half)

    # Y_0: (2/pi)(ln(x/2)+gamma) J_0 + (2/pi) sum (-1)^(k+1) H_k q^k / (k!)^2
    y0_sum = np.zeros_like(x)
    term = np.ones_like(x)
    harmonic = 0.0
    for k in range(1, _SERIES_TERMS):
        term = term * (-q) / (k * k)
        harmonic += 1.0 / k
        y0_sum -= harmonic * term
    y0 = (2.0 / math.pi) * ((log_half + _EULER_GAMMA) * j0 + y0_sum)

    # Y_1: -2/(pi x) + (2/pi) ln(x/2) J_1 - (1/pi) sum (-1)^k (psi(k+1)+psi(k+2)) (x/2)^(2k+1) / (k!(k+1)!)
    term = half.copy()
    harmonic = 0.0
    y1_sum = (2.0 * -_EULER_GAMMA + 1.0) * term
    for k in range(1, _SERIES_TERMS):
        term = term * (-q) / (k * (k + 1))
        harmonic += 1.0 / k
        psi_sum = (harmonic - _EULER_GAMMA) + (harmonic + 1.0 / (k + 1) - _EULER_GAMMA)
        y1_sum += psi_sum * term
    y1 = -2.0 / (math.pi * x) + (2.0 / math.pi) * log_half * j1 - y1_sum / math.pi
    return y0, y1


def _miller(n_max: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalised downward recurrence.

    Returns J_0..J_n_max together with the Neumann sums
    S0 = sum_k (-1)^k J_2k / k and S1 = sum_k (-1)^k (J_2k-1 - J_2k+1) / k.
    Each argument starts from its own even order, so a value does not depend on the others
    evaluated alongside it.
    """
    base = np.maximum(n_max, np.ceil(x)).astype(int)
    starts = base + 30 + (4.0 * np.sqrt(base)).astype(int)
    starts += starts % 2

    out = np.zeros((n_max + 1,) + x.shape)
    total = np.zeros_like(x)
    s0 = np.zeros_like(x)
    s1 = np.zeros_like(x)
    j_above = np.zeros_like(x)
    j_here = np.zeros_like(x)

    order = int(starts.max())
    while True:
        j_here = np.where(starts == order, _MILLER_SEED, j_here)
        if order <= n_max:
            out[order] = j_here
        if order % 2 == 0:
            total += j_here if order == 0 else 2.0 * j_here
            if order >= 2:
                k = order // 2
                s0 += (-1.0) ** k * j_here / k
        else:
            k = (order + 1) // 2
            s1 += (-1.0) ** k * j_here / k
            k = (order - 1) // 2
            if k >= 1:
                s1 -= (-1.0) ** k * j_here / k
        if order == 0:
            break

        j_below = (2.0 * order / x) * j_here - j_above
        j_above, j_here = j_here, j_below
        order -= 1

        big = np.abs(j_here) > _RESCALE_LIMIT
        if big.any():
            scale = np.where(big, 1.0 / _RESCALE_LIMIT, 1.0)
            j_here = j_here * scale
            j_above = j_above * scale
            total *= scale
            s0 *= scale
            s1 *= scale
            out[order + 1 :] *= scale

    return out / total, s0 / total, s1 / total


def _y01_neumann(x, j0, j1, s0, s1) -> Tuple[np.ndarray, np.ndarray]:
    log_term = np.log(0.5 * x) + _EULER_GAMMA
    y0 = (2.0 / math.pi) * log_term * j0 - (4.0 / math.pi) * s0
    y1 = (2.0 / math.pi) * log_term * j1 - 2.0 * j0 / (math.pi * x) + (2.0 / math.pi) * s1
    return y0, y1


def _hankel_asymptotic(n: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * n * n
    term = np.ones(x.shape, dtype=complex)
    total = term.copy()
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        # each element stops on its own so array and scalar calls agree bit for bit
        term = np.where(active, term * (1j * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)), 0.0)
        total += term
        active &= np.abs(term) >= 1e-17 * np.abs(total)
        if not active.any():
            break
    # shift applied after e^{ix} so the argument reduction stays exact
    shift = cmath.exp(-1j * (0.5 * n + 0.25) * math.pi)
    return np.sqrt(2.0 / (math.pi * x)) * np.exp(1j * x) * shift * total


def asymptotic_start(n: int) -> float:
    """Smallest argument at which J_n is taken from the asymptotic expansion."""
    return max(ASYMPTOTIC_CUTOFF, 0.5 * n * n + 25.0)


def _bessel_jy(n_max: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """J_0..J_n_max and Y_0..Y_n_max for a flat array of arguments."""
    top = max(n_max, 1)
    j = np.empty((top + 1, x.size))
    y = np.empty((top + 1, x.size))
    if x.size == 0:
        return j[: n_max + 1], y[: n_max + 1]

    small = x < SERIES_CUTOFF
    large = x > ASYMPTOTIC_CUTOFF
    asymptotic = x > asymptotic_start(top)
    middle = ~small & ~large
    miller = ~small & ~asymptotic

    if small.any():
        idx = np.flatnonzero(small)
        xs = x[idx]
        for n in range(top + 1):
            j[n, idx] = _j_series(n, xs)
        y[0, idx], y[1, idx] = _y01_series(xs, j[0, idx], j[1, idx])

    if miller.any():
        idx = np.flatnonzero(miller)
        xm = x[idx]
        jm, s0, s1 = _miller(top, xm)
        j[:, idx] = jm
        in_middle = middle[idx]
        if in_middle.any():
            y0, y1 = _y01_neumann(xm, jm[0], jm[1], s0, s1)
            y[0, idx[in_middle]] = y0[in_middle]
            y[1, idx[in_middle]] = y1[in_middle]

    if large.any():
        idx = np.flatnonzero(large)
        xl = x[idx]
        h0 = _hankel_asymptotic(0, xl)
        h1 = _hankel_asymptotic(1, xl)
        y[0, idx], y[1, idx] = h0.imag, h1.imag
        direct = asymptotic[idx]
        if direct.any():
            j[0, idx[direct]] = h0.real[direct]
            j[1, idx[direct]] = h1.real[direct]
            for n in range(2, top + 1):
                j[n, idx[direct]] = _hankel_asymptotic(n, xl[direct]).real

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, top):
            y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1]

    return j[: n_max + 1], y[: n_max + 1]


def _jy(n_max: int, x) -> Tuple[np.ndarray, np.ndarray, tuple]:
    xa = _check_argument(x)
    j, y = _bessel_jy(n_max, xa.ravel())
    shape = (n_max + 1,) + xa.shape
    return j.reshape(shape), y.reshape(shape), xa.shape


def _unwrap(value: np.ndarray, shape: tuple):
    return value.item() if shape == () else value


def bessel_j(n: int, x):
    """Bessel function of the first kind J_n(x)."""
    n = _check_order(n)
    j, _, shape = _jy(n, x)
    return _unwrap(j[n], shape)


def bessel_y(n: int, x):
    """Bessel function of the second kind Y_n(x)."""
    n = _check_order(n)
    _, y, shape = _jy(n, x)
    return _unwrap(y[n], shape)


def hankel1(n: int, x):
    """Hankel function of the first kind H_n^(1)(x) = J_n(x) + i Y_n(x)."""
    n = _check_order(n)
    j, y, shape = _jy(n, x)
    return _unwrap(j[n] + 1j * y[n], shape)


def hankel1_seq(n_max: int, x) -> np.ndarray:
    """H_0^(1)(x) .. H_n_max^(1)(x) stacked along a leading order axis."""
    n_max = _check_order(n_max)
    j, y, _ = _jy(n_max, x)
    return j + 1j * y
