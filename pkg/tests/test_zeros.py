import math
import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbach_explicit.arith import character_table
from goldbach_explicit.zeros import (ZeroFormatError, _block_drift, ZeroSet, export_zeros, hardy_Z, hardy_Z_chi,
                                     import_zeros, l_zeros, riemann_siegel_Z, riemann_siegel_theta,
                                     riemann_von_mangoldt_count, root_number, zeta_critical,
                                     zeta_zeros)


def test_rs_sign_change_near_first_zero():
    assert np.sign(riemann_siegel_Z(14.0)) != np.sign(riemann_siegel_Z(14.2))
    assert riemann_siegel_Z(17.8) * riemann_siegel_Z(18.0) > 0


def test_rs_modulus_matches_zeta():
    z = riemann_siegel_Z(30.0)
    assert abs(z**2 - abs(zeta_critical(30.0)) ** 2) <= 1e-5


def test_rs_range_error():
    with pytest.raises(ValueError):
        riemann_siegel_Z(5.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(30, 5000))
def test_rs_against_mpmath(t):
    assert abs(riemann_siegel_Z(t) - float(mpmath.siegelz(t))) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 200))
def test_hardy_Z_against_mpmath(t):
    assert abs(hardy_Z(t) - float(mpmath.siegelz(t))) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(1, 1e4))
def test_theta_against_mpmath(t):
    assert abs(riemann_siegel_theta(t) - float(mpmath.siegeltheta(t))) <= 1e-9 * max(1, t)


def test_zeta_zeros_to_100(zeta100):
    g = zeta100.ordinates
    assert len(g) == 29
    assert 14.13 < g[0] < 14.14
    ref = np.array([float(mpmath.zetazero(k).imag) for k in range(1, 30)])
    assert np.max(np.abs(g - ref)) <= 1e-8
    assert np.max(np.abs(hardy_Z(g))) <= 1e-6
    assert zeta100.symmetric and zeta100.character is None


def test_zeta_zeros_below_ten_empty():
    assert len(zeta_zeros(10.0)) == 0


@pytest.mark.parametrize("T", [50, 100, 500])
def test_count_matches_mpmath(T):
    found = len(zeta_zeros(T))
    assert found == mpmath.nzeros(T)
    # S(T) = found - theta/pi - 1 stays inside (-1, 1) at these heights
    assert abs(found - float(riemann_siegel_theta(T)) / math.pi - 1) < 1


@pytest.mark.parametrize("T", [100, 500])
def test_riemann_von_mangoldt_floor_count(T):
    assert len(zeta_zeros(T)) == riemann_von_mangoldt_count(T)


def test_density_ceiling_for_zeta(zeta100):
    assert zeta100.density_violations() == []


def test_block_drift_detects_a_missing_zero():
    zs = zeta_zeros(3000)
    smooth = lambda m: riemann_siegel_theta(m) / math.pi + 1
    assert _block_drift(zs.ordinates, smooth, 50) < 0.5
    dropped = np.delete(zs.ordinates, 400)
    assert _block_drift(dropped, smooth, 50) > 0.5


def test_chi4_zero():
    chi4 = character_table(4)[1]
    zs = l_zeros(chi4, 10.0)
    assert len(zs) == 1 and 6.0 < zs.ordinates[0] < 6.1
    assert abs(hardy_Z_chi(zs.ordinates[0], chi4)) <= 1e-5
    assert np.sign(hardy_Z_chi(6.0, chi4)) != np.sign(hardy_Z_chi(6.1, chi4))


def test_chi4_realness():
    _, im = hardy_Z_chi(7.5, character_table(4)[1], with_imag=True)
    assert abs(im) <= 1e-8


def test_hardy_Z_chi_rejects_imprimitive():
    with pytest.raises(ValueError):
        hardy_Z_chi(5.0, character_table(8)[0])
    with pytest.raises(ValueError):
        hardy_Z_chi(5.0, character_table(9)[3])  # induced from mod 3


def test_complex_character_conjugate_symmetry():
    table = character_table(5)
    chi = next(c for c in table if not c.is_real)
    bar = table[chi.conjugate_index]
    z = l_zeros(chi, 30.0)
    zbar = l_zeros(bar, 30.0)
    assert not z.symmetric
    assert np.max(np.abs(z.ordinates + zbar.ordinates[::-1])) <= 1e-7
    # |Z(-t, chi)| equals |Z(t, conj chi)|
    assert abs(abs(hardy_Z_chi(-3.0, chi)) - abs(hardy_Z_chi(3.0, bar))) <= 1e-10


def test_chi3_density_to_100():
    chi3 = character_table(3)[1]
    zs = l_zeros(chi3, 100.0)
    assert zs.density_violations() == []
    assert abs(np.sum(zs.ordinates > 0) - zs.diagnostics["positive_estimate"]) <= 2
    assert np.max(np.abs(hardy_Z_chi(zs.ordinates, chi3))) <= 1e-5


@pytest.mark.parametrize("q", [5, 7, 8, 11, 12])
def test_l_zeros_match_mpmath_L(q):
    for chi in character_table(q):
        if not chi.is_primitive or chi.is_principal:
            continue
        zs = l_zeros(chi, 20.0)
        chars = [chi(n) for n in range(q)]
        for g in zs.ordinates[:4]:
            assert abs(complex(mpmath.dirichlet(0.5 + 1j * g, chars))) <= 1e-6


def test_root_number_unit_modulus():
    for q in (3, 5, 7, 8, 12):
        for chi in character_table(q):
            if chi.is_primitive and q > 2:
                assert abs(abs(root_number(chi)) - 1) <= 1e-13


def test_zero_file_round_trip(tmp_path, zeta100):
    path = tmp_path / "z.txt"
    export_zeros(zeta100, path)
    back = import_zeros(path)
    assert np.array_equal(back.ordinates, zeta100.ordinates)
    assert back.height == zeta100.height and back.provenance == "imported"


def test_imported_table_matches_computed(data_dir, zeta100):
    table = import_zeros(data_dir / "zeta_zeros_100.txt", modulus=1)
    assert np.max(np.abs(table.ordinates - zeta100.ordinates)) <= 1e-6


def test_non_monotone_file_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# modulus=1\n# character=zeta\n# height=30\n# tolerance=1e-9\n"
                    "# provenance=imported\n21.02\n14.13\n")
    with pytest.raises(ZeroFormatError):
        import_zeros(path)


def test_mismatch_and_malformed_rejected(tmp_path, zeta100):
    path = tmp_path / "z.txt"
    export_zeros(zeta100, path)
    with pytest.raises(ZeroFormatError):
        import_zeros(path, modulus=5)
    path.write_text("# modulus=1\n14.13\n")
    with pytest.raises(ZeroFormatError):
        import_zeros(path)


def test_zeroset_invariants():
    with pytest.raises(ZeroFormatError):
        ZeroSet(1, None, np.array([14.0, 0.0]), 20, 1e-9)
    with pytest.raises(ZeroFormatError):
        ZeroSet(1, None, np.array([14.0, 30.0]), 20, 1e-9)
    with pytest.raises(ZeroFormatError):
        ZeroSet(3, 1, np.array([-5.0, 8.0]), 20, 1e-9, symmetric=True)
    empty = ZeroSet(1, None, np.array([]), 20, 1e-9)
    assert len(empty) == 0 and empty.all_ordinates().size == 0
