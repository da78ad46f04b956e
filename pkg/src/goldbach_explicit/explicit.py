"""Zero sums, their tail bounds, and residual records for each identity.

Every record stores ``residual = direct - main_term`` and the residual
divided by the error-term shape of the identity at (N, q).  The constants
hidden in the O-terms are unknown, so acceptance thresholds on the
normalized values are observational.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .arith import Character, LambdaTable, character_table, euler_phi
from .goldbach import Psi2Array, partial_sum_G, psi_weighted, require_scale, smoothed_F
from .specfun import log_gamma
from .zeros import ZeroSet

KINDS = ("gamma_pow", "gamma_pow_plus1", "fujii_kernel")
GAMMA_HEIGHT = 50.0
FUJII_HEIGHT = 1e4
LOG_2PI = math.log(2 * math.pi)
TAIL_FRACTION = 0.1


class MissingInput(ValueError):
    """An identity was evaluated without the tables or zeros it needs."""


class TruncationError(RuntimeError):
    """The recorded tail exceeds 10% of the identity's error-term shape."""


# ---------------------------------------------------------------------------
# zero sums


def _rho_terms(g: np.ndarray, N: float, kind: str) -> np.ndarray:
    rho = 0.5 + 1j * g
    logN = math.log(N)
    if kind == "gamma_pow":
        return np.exp(log_gamma(rho) + rho * logN)
    if kind == "gamma_pow_plus1":
        return np.exp(log_gamma(rho) + (rho + 1) * logN)
    if kind == "fujii_kernel":
        return np.exp((rho + 1) * logN) / (rho * (rho + 1))
    raise ValueError(f"unknown zero-sum kind {kind!r}")


def zero_sum(zeros: ZeroSet, N: float, kind: str, chi: Character | None = None):
    """Sum over the zeros rho = 1/2 + i gamma of one of three weights.

    gamma_pow        Gamma(rho) N^rho
    gamma_pow_plus1  Gamma(rho) N^(rho + 1)
    fujii_kernel     N^(rho + 1) / (rho (rho + 1))

    Symmetric sets are mirrored and the (real) sum returned; otherwise the
    complex sum is returned.
    """
    require_scale(N)
    if chi is not None and zeros.symmetric and not chi.is_real:
        raise ValueError("a complex character's zeros cannot be summed as a symmetric set")
    g = zeros.all_ordinates()
    if g.size == 0:
        return 0.0 if zeros.symmetric else 0j
    terms = _rho_terms(g, N, kind)
    re = math.fsum(terms.real)
    im = math.fsum(terms.imag)
    if zeros.symmetric:
        scale = math.fsum(np.abs(terms))
        if abs(im) > 1e-9 * max(scale, 1e-300):
            raise ArithmeticError(f"imaginary residue {im:.3g} in a conjugate-closed zero sum")
        return re
    return complex(re, im)


def _density(t, q: int):
    """Average zero density per unit height at t (one sign of gamma)."""
    return np.maximum(0.0, np.log(q * (np.asarray(t) + 1) / (2 * math.pi)) / (2 * math.pi))


def _count_error(t, q: int):
    """Uniform bound for |N(t) - smooth count|, one sign of gamma."""
    return 0.25 * np.log(q * (np.asarray(t) + 1)) + 7.0


def tail_bound(kind: str, N: float, T: float, q: int = 1) -> float:
    """Upper bound for the part of the zero sum with |gamma| > T.

    The zero-counting function is split into its smooth part plus an error
    bounded by 0.25 log(q(t+1)) + 7; partial summation against the
    decreasing weight then gives one integral and two boundary pieces.
    Both signs of gamma are included.
    """
    if T < 10:
        raise ValueError("tail_bound needs T >= 10")
    require_scale(N)
    if kind == "fujii_kernel":
        # weight N^(3/2) / t^2 since |rho (rho + 1)| >= gamma^2
        amp = N**1.5
        c = q * (1 + 1 / T) / (2 * math.pi)
        smooth = (math.log(c * T) + 1) / (2 * math.pi * T)
        c2 = q * (1 + 1 / T)
        boundary = float(_count_error(T, q)) / T**2 + (0.25 * (math.log(c2 * T) + 0.5) + 7) / T**2
        return 2 * amp * (smooth + boundary)
    if kind not in KINDS:
        raise ValueError(f"unknown zero-sum kind {kind!r}")
    shift = 1.0 if kind == "gamma_pow_plus1" else 0.0
    amp = N ** (0.5 + shift)
    # |Gamma(1/2 + it)| = sqrt(pi / cosh(pi t)), written to avoid overflow
    t = T + np.arange(0, 400, dtype=np.float64)
    w = amp * np.sqrt(2 * math.pi) * np.exp(-math.pi * t / 2) / np.sqrt(1 + np.exp(-2 * math.pi * t))
    smooth = np.sum(w[:-1] * _density(t[1:], q))
    boundary = w[0] * _count_error(T, q) + np.sum(_count_error(t[1:], q) * (w[:-1] - w[1:]))
    return float(2 * (smooth + boundary))


# ---------------------------------------------------------------------------
# residual records


@dataclass(frozen=True)
class Identity:
    tag: str
    normalizer: str
    assumptions: tuple[str, ...]
    kind: str | None  # zero-sum kind, None when no zeros are involved


IDENTITIES = {
    "fujii_1_2": Identity("fujii_1_2", "N^(4/3) log^(4/3) N", ("RH",), "fujii_kernel"),
    "lz_1_3": Identity("lz_1_3", "N log^3 N", ("RH",), "fujii_kernel"),
    "granville_1_5": Identity("granville_1_5", "N log^3 N", ("GRH(q)",), None),
    "thm_fq_1_8": Identity("thm_fq_1_8", "N log N log q", ("GRH(q)",), None),
    "thm_f_1_9": Identity("thm_f_1_9", "N", ("RH",), "gamma_pow_plus1"),
    "psi_chi_2_4": Identity("psi_chi_2_4", "log(qN) log q", ("GRH(q)",), "gamma_pow"),
    "psi_chi0_2_5": Identity("psi_chi0_2_5", "log N log q", (), None),
    "psi_r_2_7": Identity("psi_r_2_7", "1/N", ("RH",), "gamma_pow"),
}


def normalizer(identity: str, N: float, q: int) -> float:
    """The identity's error-term shape at (N, q).

    ``log q`` is read as log max(q, 2) so that q = 1 keeps a positive scale.
    """
    L = math.log(N)
    lq = math.log(max(q, 2))
    return {
        "fujii_1_2": N ** (4 / 3) * L ** (4 / 3),
        "lz_1_3": N * L**3,
        "granville_1_5": N * L**3,
        "thm_fq_1_8": N * L * lq,
        "thm_f_1_9": N,
        "psi_chi_2_4": math.log(q * N) * lq,
        "psi_chi0_2_5": L * lq,
        "psi_r_2_7": 1.0 / N,
    }[identity]


@dataclass(frozen=True)
class ResidualRecord:
    identity: str
    N: float
    q: int
    chi_index: int | None
    direct: float | complex
    main_term: float | complex
    residual: float | complex
    normalizer: float
    normalized: float | complex
    zero_height: float | None
    tail: float
    assumptions: tuple[str, ...]

    def as_dict(self) -> dict:
        return asdict(self)


def _need(value, what: str, identity: str):
    if value is None:
        raise MissingInput(f"{identity} needs {what}")
    return value


def _zeros_at(zeros: ZeroSet | None, height: float | None, default: float, identity: str) -> ZeroSet:
    zeros = _need(zeros, "a zero set", identity)
    h = default if height is None else height
    if zeros.height < h:
        raise TruncationError(f"{identity}: zero set reaches {zeros.height}, {h} requested")
    return zeros.truncated(h)


def residual(identity: str, N: float, q: int = 1, chi: int | None = None, *,
             lam: LambdaTable | None = None, psi2: Psi2Array | None = None,
             zeros: ZeroSet | None = None, zero_height: float | None = None) -> ResidualRecord:
    """Evaluate one identity at (N, q[, chi]) and return its residual record.

    ``zeros`` is the zeta zero set for the zeta identities and the zero set
    of the primitive character inducing chi for psi_chi_2_4.

    Raises:
        MissingInput: a required table or zero set was not supplied.
        TruncationError: the tail bound exceeds 10% of the normalizer.
    """
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}")
    ident = IDENTITIES[identity]
    require_scale(N)
    norm = normalizer(identity, N, q)
    height = None
    tail = 0.0

    if identity in ("fujii_1_2", "lz_1_3"):
        if N != int(N):
            raise ValueError("G(N) needs an integer N")
        p2 = _need(psi2, "the psi_2 array", identity)
        zs = _zeros_at(zeros, zero_height, FUJII_HEIGHT, identity)
        height = zs.height
        direct = partial_sum_G(p2, int(N))
        main = N * N / 2 - 2 * zero_sum(zs, N, "fujii_kernel")
        tail = 2 * tail_bound("fujii_kernel", N, height) + p2.error_bound * N
    elif identity == "granville_1_5":
        if N != int(N):
            raise ValueError("G_q(N) needs an integer N")
        if q < 2:
            raise ValueError("granville_1_5 needs q >= 2")
        p2 = _need(psi2, "the psi_2 array", identity)
        direct = partial_sum_G(p2, int(N), q)
        main = partial_sum_G(p2, int(N)) / euler_phi(q)
        tail = 2 * p2.error_bound * N
    elif identity == "thm_fq_1_8":
        lam = _need(lam, "the Lambda table", identity)
        p2 = _need(psi2, "the psi_2 array", identity)
        Fq = smoothed_F(lam, p2, N, q, "direct")
        F = Fq if q == 1 else smoothed_F(lam, p2, N, 1, "direct")
        direct = Fq.value
        main = F.value / euler_phi(q)
        tail = Fq.tail_bound + F.tail_bound
    elif identity == "thm_f_1_9":
        lam = _need(lam, "the Lambda table", identity)
        zs = _zeros_at(zeros, zero_height, GAMMA_HEIGHT, identity)
        height = zs.height
        F = smoothed_F(lam, None, N, 1, "square")
        direct = F.value
        main = N * N - 2 * zero_sum(zs, N, "gamma_pow_plus1")
        tail = F.tail_bound + 2 * tail_bound("gamma_pow_plus1", N, height)
    elif identity == "psi_r_2_7":
        lam = _need(lam, "the Lambda table", identity)
        zs = _zeros_at(zeros, zero_height, GAMMA_HEIGHT, identity)
        height = zs.height
        psi = psi_weighted(lam, N)
        direct = psi.value
        main = N - zero_sum(zs, N, "gamma_pow") - LOG_2PI
        tail = psi.tail_bound + tail_bound("gamma_pow", N, height)
    elif identity == "psi_chi0_2_5":
        if q < 2:
            raise ValueError("psi_chi0_2_5 needs q >= 2")
        lam = _need(lam, "the Lambda table", identity)
        chi0 = character_table(q)[0]
        a = psi_weighted(lam, N, chi0)
        b = psi_weighted(lam, N)
        direct, main = a.value, b.value
        tail = a.tail_bound + b.tail_bound
    else:  # psi_chi_2_4
        lam = _need(lam, "the Lambda table", identity)
        index = _need(chi, "a character index", identity)
        character = character_table(q)[index]
        if character.is_principal:
            raise ValueError("psi_chi_2_4 is stated for non-principal characters")
        prim = character.primitive()
        zs = _zeros_at(zeros, zero_height, GAMMA_HEIGHT, identity)
        if zs.modulus != prim.modulus or zs.character != prim.index:
            raise MissingInput(f"psi_chi_2_4 needs the zeros of the primitive character "
                               f"mod {prim.modulus} #{prim.index}")
        height = zs.height
        psi = psi_weighted(lam, N, character)
        direct = psi.value
        main = -zero_sum(zs, N, "gamma_pow", prim)
        tail = psi.tail_bound + tail_bound("gamma_pow", N, height, prim.modulus)

    if tail > TAIL_FRACTION * norm:
        raise TruncationError(f"{identity} at N={N}, q={q}: tail {tail:.3g} exceeds "
                              f"{TAIL_FRACTION:.0%} of the normalizer {norm:.3g}")
    res = direct - main
    return ResidualRecord(identity, N, q, chi, direct, main, res, norm, res / norm,
                          height, tail, ident.assumptions)


def growth_flags(records: list[ResidualRecord], limit: float = 1.25) -> list[tuple]:
    """Series (identity, q, chi) whose |normalized| grows monotonically by more than ``limit``.

    A bounded-normalized-residual claim predicts no such trend across an N-grid.
    """
    series: dict[tuple, list[ResidualRecord]] = {}
    for rec in records:
        series.setdefault((rec.identity, rec.q, rec.chi_index), []).append(rec)
    flagged = []
    for key, recs in series.items():
        recs = sorted(recs, key=lambda r: r.N)
        mags = [abs(r.normalized) for r in recs]
        if len(mags) < 2 or mags[0] == 0:
            continue
        increasing = all(b > a for a, b in zip(mags, mags[1:]))
        if increasing and mags[-1] / mags[0] > limit:
            flagged.append((*key, mags[-1] / mags[0]))
    return flagged
