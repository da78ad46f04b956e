import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbach_explicit.arith import character_table
from goldbach_explicit.explicit import (IDENTITIES, LOG_2PI, MissingInput, TruncationError,
                                        growth_flags, normalizer, residual, tail_bound, zero_sum)
from goldbach_explicit.goldbach import smoothed_F
from goldbach_explicit.specfun import complex_gamma
from goldbach_explicit.zeros import ZeroSet, l_zeros

GRID = [2.0**k for k in range(13, 18)]


def test_empty_zero_sum():
    empty = ZeroSet(1, None, np.array([]), 50, 1e-9)
    for kind in ("gamma_pow", "gamma_pow_plus1", "fujii_kernel"):
        assert zero_sum(empty, 1e3, kind) == 0


def test_single_pair():
    g = 14.134725141734695
    zs = ZeroSet(1, None, np.array([g]), 20, 1e-9)
    rho = 0.5 + 1j * g
    expected = 2 * (complex_gamma(rho) * 100**rho).real
    assert zero_sum(zs, 100, "gamma_pow") == pytest.approx(expected, rel=1e-11)
    fujii = 2 * (100 ** (rho + 1) / (rho * (rho + 1))).real
    assert zero_sum(zs, 100, "fujii_kernel") == pytest.approx(fujii, rel=1e-12)


def test_gamma_pow_is_tiny(zeta100):
    assert abs(zero_sum(zeta100.truncated(50), 1e4, "gamma_pow")) <= 1e-7 * math.sqrt(1e4)


@settings(max_examples=30, deadline=None)
@given(st.floats(4, 1e6), st.sampled_from(["gamma_pow", "gamma_pow_plus1", "fujii_kernel"]))
def test_symmetric_sum_equals_mirrored_complex_sum(zeta100, N, kind):
    # the real answer equals the full complex sum over +-gamma computed without the shortcut
    g = zeta100.ordinates
    asym = ZeroSet(1, None, np.concatenate((-g[::-1], g)), 100, 1e-9, symmetric=False)
    full = zero_sum(asym, N, kind)
    assert abs(full.imag) <= 1e-9 * max(abs(full), 1e-300) + 1e-300
    assert zero_sum(zeta100, N, kind) == pytest.approx(full.real, rel=1e-12, abs=1e-300)


def test_symmetry_misuse_rejected():
    table = character_table(5)
    chi = next(c for c in table if not c.is_real)
    zs = ZeroSet(5, chi.index, np.array([3.0, 5.0]), 10, 1e-8, symmetric=True)
    with pytest.raises(ValueError):
        zero_sum(zs, 100, "gamma_pow", chi)


def test_tail_bound_examples():
    for kind in ("gamma_pow", "gamma_pow_plus1", "fujii_kernel"):
        assert tail_bound(kind, 1e4, 50, 1) < tail_bound(kind, 1e4, 30, 1)
    assert tail_bound("gamma_pow", 1e4, 50, 1) <= 1e-20
    assert tail_bound("fujii_kernel", 1e4, 1e4, 1) <= 0.5 * 1e4
    with pytest.raises(ValueError):
        tail_bound("gamma_pow", 1e4, 5)


def test_fujii_tail_covers_actual_tail(zeta10k):
    # the omitted part between heights 1000 and 10^4 is below the bound at 1000
    N = 2.0**15
    part = abs(zero_sum(zeta10k, N, "fujii_kernel") - zero_sum(zeta10k.truncated(1000), N, "fujii_kernel"))
    assert part <= tail_bound("fujii_kernel", N, 1000)


def test_normalizers_positive():
    for tag in IDENTITIES:
        for q in (1, 2, 12):
            assert normalizer(tag, 1e4, q) > 0


def test_thm_fq_q1_is_exactly_zero(lam_small, psi2_small):
    rec = residual("thm_fq_1_8", 1e4, 1, lam=lam_small, psi2=psi2_small)
    assert rec.residual == 0.0 and rec.normalized == 0.0
    assert rec.assumptions == ("GRH(q)",)


def test_thm_f_residual(lam_small, zeta100):
    rec = residual("thm_f_1_9", 1e4, lam=lam_small, zeros=zeta100)
    assert abs(rec.normalized + 2 * LOG_2PI) <= 0.05
    assert rec.direct == smoothed_F(lam_small, None, 1e4, 1, "square").value
    assert rec.residual == rec.direct - rec.main_term
    assert rec.assumptions == ("RH",) and rec.zero_height == 50


def test_lz_residual(psi2_big, zeta10k):
    rec = residual("lz_1_3", 2**16, psi2=psi2_big, zeros=zeta10k)
    assert abs(rec.normalized) <= 0.05
    assert rec.tail < 0.1 * rec.normalizer


def test_truncation_stability(lam_small, psi2_big, zeta10k, zeta100):
    low = residual("psi_r_2_7", 1e4, lam=lam_small, zeros=zeta100, zero_height=25)
    high = residual("psi_r_2_7", 1e4, lam=lam_small, zeros=zeta100, zero_height=50)
    assert abs(low.residual - high.residual) <= low.tail
    low = residual("lz_1_3", 2**14, psi2=psi2_big, zeros=zeta10k, zero_height=2500)
    high = residual("lz_1_3", 2**14, psi2=psi2_big, zeros=zeta10k, zero_height=5000)
    assert abs(low.residual - high.residual) <= low.tail


def test_truncation_too_low_raises(lam_small, psi2_big, zeta100):
    # Gamma decay at height 10 leaves ~e^-16 sqrt(N), far above 10% of 1/N
    with pytest.raises(TruncationError):
        residual("psi_r_2_7", 1e4, lam=lam_small, zeros=zeta100, zero_height=10)
    with pytest.raises(TruncationError):
        residual("lz_1_3", 2**16, psi2=psi2_big, zeros=zeta100)  # set only reaches 100


def test_missing_inputs(lam_small):
    with pytest.raises(MissingInput):
        residual("thm_f_1_9", 1e4, lam=lam_small)
    with pytest.raises(MissingInput):
        residual("granville_1_5", 1e4, 3)
    with pytest.raises(MissingInput):
        residual("psi_chi_2_4", 1e4, 5, lam=lam_small)
    with pytest.raises(ValueError):
        residual("no_such_identity", 1e4)


def test_psi_chi_uses_inducing_zeros(lam_small):
    table = character_table(12)
    chi = next(c for c in table if c.conductor == 4)
    prim = chi.primitive()
    zs = l_zeros(prim, 50)
    rec = residual("psi_chi_2_4", 1e4, 12, chi.index, lam=lam_small, zeros=zs)
    assert abs(rec.normalized) <= 5
    wrong = l_zeros(character_table(3)[1], 50)
    with pytest.raises(MissingInput):
        residual("psi_chi_2_4", 1e4, 12, chi.index, lam=lam_small, zeros=wrong)
    with pytest.raises(ValueError):
        residual("psi_chi_2_4", 1e4, 12, 0, lam=lam_small, zeros=zs)


def test_complex_character_record_is_complex(lam_small):
    table = character_table(5)
    chi = next(c for c in table if not c.is_real)
    rec = residual("psi_chi_2_4", 1e4, 5, chi.index, lam=lam_small, zeros=l_zeros(chi, 50))
    assert isinstance(rec.residual, complex)
    assert abs(rec.normalized) <= 5


def test_psi_chi0_and_granville(lam_small, psi2_small):
    rec = residual("psi_chi0_2_5", 1e4, 6, lam=lam_small)
    assert rec.assumptions == () and abs(rec.normalized) <= 2
    g = residual("granville_1_5", 10_000, 3, psi2=psi2_small)
    assert abs(g.normalized) <= 0.5


def test_growth_proxy(psi2_big, lam_big):
    records = []
    for q in range(2, 13):
        for N in GRID:
            records.append(residual("granville_1_5", N, q, psi2=psi2_big))
    for q in range(1, 13):
        for N in GRID[:-1]:  # T(2^17) lies beyond the shared table
            records.append(residual("thm_fq_1_8", N, q, lam=lam_big, psi2=psi2_big))
    assert growth_flags(records) == []


def test_growth_flags_detects_trend():
    from goldbach_explicit.explicit import ResidualRecord
    recs = [ResidualRecord("granville_1_5", N, 3, None, 0.0, 0.0, v, 1.0, v, None, 0.0, ())
            for N, v in ((1e3, 0.1), (1e4, 0.2), (1e5, 0.3))]
    assert growth_flags(recs) and growth_flags(recs[::-1])
