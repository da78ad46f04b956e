"""Goldbach sums: psi_2, the sharp averages G_q and the smoothed averages F_q.

Everything smoothed is evaluated at r = exp(-1/N), truncating the series at
T(N) = ceil(N (2 log N + 60)); the omitted tail is bounded and recorded.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arith import Character, LambdaTable, character_table, euler_phi, factorize
from .storage import read_container, write_container

DIRECT_CAP = 2**14
PSI2_MAGIC = b"PSI2"
_PSI2_TRAILER = struct.Struct("<Qd")  # method code, per-entry error bound
_METHODS = ("direct", "fft")
FFT_ERROR_CONSTANT = 4.0


class PathError(ValueError):
    """A smoothed-sum path was requested for a modulus it does not support."""


class InsufficientTable(ValueError):
    """The von Mangoldt or psi_2 table does not reach the needed truncation."""


def require_scale(N: float) -> None:
    if not N >= 4:
        raise ValueError(f"N must be >= 4, got {N}")


def truncation(N: float) -> int:
    """Series truncation point T(N) = ceil(N (2 log N + 60))."""
    require_scale(N)
    return math.ceil(N * (2 * math.log(N) + 60))


def series_tail_bound(N: float, T: int, power: int) -> float:
    """Bound for sum_{n > T} n^a (log n)^b e^{-n/N}.

    ``power`` selects the majorant: 1 for log n (Lambda weights), 2 for
    n (log n)^2 (the psi_2 ceiling).  Uses a geometric series with the
    worst term ratio beyond T.
    """
    def f(n):
        return (n * math.log(n) ** 2 if power == 2 else math.log(n)) * math.exp(-n / N)

    ratio = f(T + 2) / f(T + 1)
    if ratio >= 1:
        return math.inf
    return f(T + 1) / (1 - ratio)


# ---------------------------------------------------------------------------
# psi_2


@dataclass(frozen=True)
class Psi2Array:
    """psi_2(n) on 0..limit (``values[n]``); ``error_bound`` is per entry."""

    limit: int
    values: np.ndarray = field(repr=False)
    method: str
    error_bound: float

    def __post_init__(self):
        self.values.setflags(write=False)

    def save(self, path: Path | str) -> None:
        trailer = _PSI2_TRAILER.pack(_METHODS.index(self.method), self.error_bound)
        write_container(path, PSI2_MAGIC, self.values[1:], trailer)

    @classmethod
    def load(cls, path: Path | str) -> "Psi2Array":
        payload, trailer = read_container(path, PSI2_MAGIC, _PSI2_TRAILER.size)
        code, bound = _PSI2_TRAILER.unpack(trailer)
        if code >= len(_METHODS):
            from .storage import CacheCorruption
            raise CacheCorruption(path, 16 + 8 * payload.size, f"unknown method code {code}")
        return cls(payload.size, np.concatenate(([0.0], payload)), _METHODS[code], bound)


def psi2(lam: LambdaTable, T: int, method: str = "fft") -> Psi2Array:
    """psi_2(n) = sum_{m + m' = n} Lambda(m) Lambda(m') for n <= T.

    ``direct`` is the quadratic convolution (capped at T <= 2^14);
    ``fft`` squares a real FFT of the Lambda array and records a rounding
    bound ~ log2(size) * eps * ||Lambda||_2^2.
    """
    T = int(T)
    if T < 1:
        raise ValueError("T must be positive")
    if lam.limit < T - 2:
        raise InsufficientTable(f"psi_2 up to {T} needs Lambda up to {T - 2}, table has {lam.limit}")
    a = np.zeros(T + 1)
    top = min(T, lam.limit)
    a[: top + 1] = lam.values[: top + 1]
    if method == "direct":
        if T > DIRECT_CAP:
            raise ValueError(f"direct psi_2 is capped at T <= {DIRECT_CAP} (quadratic cost); use fft")
        vals = np.convolve(a, a)[: T + 1]
        bound = (T + 1) * np.finfo(float).eps * float(np.max(a) ** 2) * 2
    elif method == "fft":
        size = 1 << (2 * (T + 1) - 1).bit_length()
        freq = np.fft.rfft(a, size)
        freq *= freq
        vals = np.fft.irfft(freq, size)[: T + 1]
        del freq
        bound = FFT_ERROR_CONSTANT * math.log2(size) * np.finfo(float).eps * float(a @ a)
    else:
        raise ValueError(f"unknown method {method!r}")
    vals[: min(4, T + 1)] = 0.0
    return Psi2Array(T, vals, method, float(bound))


def partial_sum_G(p2: Psi2Array, N: int, q: int = 1) -> float:
    """G_q(N) = sum of psi_2(n) over n <= N with q | n (exact finite sum)."""
    if N > p2.limit:
        raise InsufficientTable(f"G({N}) needs psi_2 up to {N}, array has {p2.limit}")
    if q < 1:
        raise ValueError("q must be >= 1")
    if q > N:
        return 0.0
    return math.fsum(p2.values[q: int(N) + 1: q])


# ---------------------------------------------------------------------------
# weighted prime sums at r = exp(-1/N)


@dataclass(frozen=True)
class SmoothedPoint:
    """One smoothed evaluation: ``value`` plus the truncation that produced it."""

    N: float
    q: int
    value: float | complex
    truncation: int
    tail_bound: float
    path: str = "direct"


def _weights(lam: LambdaTable, N: float, T: int) -> np.ndarray:
    if lam.limit < T:
        raise InsufficientTable(f"N={N} needs Lambda up to {T}, table has {lam.limit}")
    n = np.arange(T + 1, dtype=np.float64)
    return lam.values[: T + 1] * np.exp(-n / N)


def residue_sums(lam: LambdaTable, N: float, q: int, T: int | None = None) -> np.ndarray:
    """A[c] = sum_{n <= T, n = c mod q} Lambda(n) exp(-n/N), c = 0..q-1."""
    T = truncation(N) if T is None else T
    w = _weights(lam, N, T)
    pad = (-w.size) % q
    w = np.concatenate((w, np.zeros(pad)))
    return np.ascontiguousarray(w.reshape(-1, q).T).sum(axis=1)


def psi_weighted(lam: LambdaTable, N: float, chi: Character | None = None,
                 T: int | None = None) -> SmoothedPoint:
    """Psi(r, chi) = sum chi(n) Lambda(n) r^n with r = exp(-1/N).

    Without ``chi`` this is Psi(r).  The value is real unless chi is complex.
    """
    require_scale(N)
    T = truncation(N) if T is None else T
    tail = series_tail_bound(N, T, 1)
    if chi is None:
        value = float(np.sum(_weights(lam, N, T)))
        return SmoothedPoint(N, 1, value, T, tail, "psi")
    A = residue_sums(lam, N, chi.modulus, T)
    value = complex(chi.values @ A)
    if chi.is_real:
        value = value.real
    return SmoothedPoint(N, chi.modulus, value, T, tail, "psi")


@dataclass(frozen=True)
class S2Term:
    """sum over (m, q) > 1 of Lambda(m) r^m, its square, and log N log q."""

    q: int
    N: float
    value: float
    square: float
    bound: float
    ratio: float
    truncation: int


def s2_term(lam: LambdaTable, q: int, N: float, T: int | None = None) -> S2Term:
    """Exact prime-power sum over primes dividing q, compared with log N log q."""
    if q < 2:
        raise ValueError("s2_term needs q >= 2")
    require_scale(N)
    T = truncation(N) if T is None else T
    terms = []
    for p, _ in factorize(q):
        pk = p
        while pk <= T:
            terms.append(math.log(p) * math.exp(-pk / N))
            pk *= p
    value = math.fsum(terms)
    bound = math.log(N) * math.log(q)
    return S2Term(q, N, value, value * value, bound, value / bound, T)


def s2_exact(lam: LambdaTable, N: float, q: int, T: int | None = None) -> float:
    """The S_2 part of F_q(r): pairs with (m, q) > 1 and m + m' = 0 mod q."""
    A = residue_sums(lam, N, q, T)
    c = np.arange(q)
    bad = np.array([math.gcd(int(x), q) > 1 for x in c])
    return float(np.sum(A[c[bad]] * A[(-c[bad]) % q]))


def character_s1(lam: LambdaTable, N: float, q: int, T: int | None = None) -> complex:
    """(1/phi(q)) sum_chi chi(-1) Psi(r, chi) Psi(r, conj chi)."""
    A = residue_sums(lam, N, q, T)
    table = character_table(q)
    total = 0j
    for chi in table:
        psi = chi.values @ A
        psi_bar = chi.values.conj() @ A
        total += (1 - 2 * chi.parity) * psi * psi_bar
    return total / table.order


def smoothed_F(lam: LambdaTable, p2: Psi2Array | None, N: float, q: int = 1,
               path: str = "direct") -> SmoothedPoint:
    """F_q(N) = sum over q | n of psi_2(n) exp(-n/N), by one of three paths.

    direct     from the psi_2 array (any q)
    square     Psi(r)^2 (q = 1 only)
    character  character decomposition plus the exact S_2 term (q >= 2)
    """
    require_scale(N)
    T = truncation(N)
    if path == "direct":
        if p2 is None or p2.limit < T:
            have = None if p2 is None else p2.limit
            raise InsufficientTable(f"direct F needs psi_2 up to {T}, have {have}")
        if q > T:
            value = 0.0
        else:
            n = np.arange(q, T + 1, q, dtype=np.float64)
            value = float(np.sum(p2.values[q: T + 1: q] * np.exp(-n / N)))
        tail = series_tail_bound(N, T, 2) + p2.error_bound * N
        return SmoothedPoint(N, q, value, T, tail, path)
    if path == "square":
        if q != 1:
            raise PathError("the square path is only valid for q = 1")
        psi = psi_weighted(lam, N, T=T)
        tail = 2 * psi.value * psi.tail_bound + psi.tail_bound**2
        return SmoothedPoint(N, 1, psi.value**2, T, tail, path)
    if path == "character":
        if q < 2:
            raise PathError("the character path needs q >= 2")
        s1 = character_s1(lam, N, q, T)
        value = s1.real + s2_exact(lam, N, q, T)
        psi_tail = series_tail_bound(N, T, 1)
        tail = 2 * (N + 1) * psi_tail + psi_tail**2
        return SmoothedPoint(N, q, value, T, tail, path)
    raise ValueError(f"unknown path {path!r}")


# ---------------------------------------------------------------------------
# the circle integral against I_N(1/z)


def kernel_I(z, N: int):
    """I_N(z) = z + z^2 + ... + z^N."""
    z = np.asarray(z, dtype=np.complex128)
    one = np.isclose(z, 1.0, rtol=0, atol=1e-15)
    safe = np.where(one, 0.5, z)
    out = np.where(one, float(N), safe * (1 - safe**N) / (1 - safe))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelCheck:
    N: int
    q: int
    M: int
    quadrature: float
    direct: float
    residual: float


def kernel_integral_check(lam: LambdaTable, N: int, q: int, M: int,
                          p2: Psi2Array | None = None) -> KernelCheck:
    """Compare the M-point circle mean of F_q(z) I_N(1/z) with G_q(N).

    On |z| = r the product is a trigonometric polynomial, so the uniform
    mean recovers its constant term exactly once M > T + N.
    """
    require_scale(N)
    T = truncation(N)
    if M <= T + N:
        raise ValueError(f"grid size M={M} must exceed T + N = {T + N}")
    if p2 is None or p2.limit < T:
        p2 = psi2(lam, T, "direct" if T <= DIRECT_CAP else "fft")
    r = math.exp(-1.0 / N)
    n = np.arange(T + 1)
    coef = np.where(n % q == 0, p2.values[: T + 1] * r**n, 0.0)
    coef[0] = 0.0
    # F_q(r e(j/M)) = sum_n coef_n e(nj/M)
    F_vals = np.fft.ifft(coef, M) * M
    j = np.arange(M)
    z = r * np.exp(2j * np.pi * j / M)
    I_vals = kernel_I(1.0 / z, N)
    quad = float(np.mean(F_vals * I_vals).real)
    direct = partial_sum_G(p2, N, q)
    return KernelCheck(N, q, M, quad, direct, abs(quad - direct))


# ---------------------------------------------------------------------------
# mean values of chi-twisted prime sums


@dataclass(frozen=True)
class MeanValue:
    which: int
    N: float
    h: float
    q: int
    value: float
    value_imprimitive: float
    bound_shape: float
    ratio: float
    ratio_imprimitive: float


def _twisted_prefix(lam: LambdaTable, chi: Character, top: int) -> np.ndarray:
    if lam.limit < top:
        raise InsufficientTable(f"mean value needs Lambda up to {top}, table has {lam.limit}")
    n = np.arange(top + 1)
    return np.cumsum(chi.at(n) * lam.values[: top + 1])


def _J1(S: np.ndarray, h: float) -> float:
    k = math.floor(h)
    sq = np.abs(S[:k]) ** 2
    return float(np.sum(sq) + (h - k) * abs(S[k]) ** 2)


def _J2(S: np.ndarray, N: float, h: float) -> float:
    ints = np.arange(0, math.floor(N) + 1, dtype=np.float64)
    shifted = np.arange(math.ceil(h), math.floor(N + h) + 1, dtype=np.float64) - h
    pts = np.unique(np.concatenate(([0.0, N], ints, shifted)))
    pts = pts[(pts >= 0) & (pts <= N)]
    mid = 0.5 * (pts[:-1] + pts[1:])
    diff = S[np.floor(mid + h).astype(np.int64)] - S[np.floor(mid).astype(np.int64)]
    return float(np.sum(np.abs(diff) ** 2 * np.diff(pts)))


def mean_value_J(lam: LambdaTable, chi: Character, N: float, h: float, which: int) -> MeanValue:
    """J_1(h) or J_2(N, h) computed exactly (the integrand is a step function).

    The main value uses the primitive character inducing chi; the value
    with chi itself is reported alongside.  Ratios are taken against
    h^2 log^2 q (J_1) and h N log^2(3qN/h) (J_2).
    """
    if not 1 <= h <= N:
        raise ValueError(f"need 1 <= h <= N, got h={h}, N={N}")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    q = chi.modulus
    top = math.floor(h) if which == 1 else math.floor(N + h)
    values = []
    for c in (chi.primitive(), chi):
        S = _twisted_prefix(lam, c, top)
        values.append(_J1(S, h) if which == 1 else _J2(S, N, h))
    if which == 1:
        shape = h * h * math.log(q) ** 2
    else:
        shape = h * N * math.log(3 * q * N / h) ** 2
    if shape <= 0:
        raise ValueError("bound shape vanishes (q = 1 with J_1)")
    return MeanValue(which, N, h, q, values[0], values[1], shape,
                     values[0] / shape, values[1] / shape)


def phi(q: int) -> int:
    return euler_phi(q)
