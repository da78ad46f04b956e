import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbach_explicit.arith import (CharacterTable, character_table, euler_phi, factorize,
                                     gauss_sum, sieve_lambda)
from goldbach_explicit.storage import CacheCorruption

from conftest import trial_division_lambda


def test_lambda_small_values():
    lam = sieve_lambda(100)
    assert lam[1] == 0.0
    assert lam[2] == pytest.approx(math.log(2))
    assert lam[9] == pytest.approx(math.log(3))
    assert lam[12] == 0.0


def test_lambda_matches_trial_division():
    T = 100_000
    lam = sieve_lambda(T)
    oracle = np.array([trial_division_lambda(n) for n in range(T + 1)])
    assert np.max(np.abs(lam.values - oracle)) == 0.0


def test_chebyshev_sum():
    lam = sieve_lambda(10_000)
    psi = math.fsum(trial_division_lambda(n) for n in range(1, 10_001))
    assert abs(math.fsum(lam.values) - psi) <= 1e-9
    for T in (100, 1000, 10_000):
        assert math.fsum(lam.values[: T + 1]) <= 1.04 * T


def test_positive_exactly_on_prime_powers():
    lam = sieve_lambda(5000)
    for n in range(1, 5001):
        is_pp = n > 1 and len(factorize(n)) == 1
        assert (lam[n] > 0) == is_pp


@pytest.mark.parametrize("T", [0, 1, 10**9])
def test_sieve_rejects_out_of_range(T):
    with pytest.raises(ValueError):
        sieve_lambda(T)


def test_lambda_save_load_and_corruption(tmp_path):
    lam = sieve_lambda(1000)
    path = tmp_path / "lam.bin"
    lam.save(path)
    back = type(lam).load(path)
    assert back.limit == 1000 and np.array_equal(back.values, lam.values)
    raw = bytearray(path.read_bytes())
    raw[0:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(CacheCorruption) as err:
        type(lam).load(path)
    assert err.value.offset == 0


@pytest.mark.parametrize("q,phi", [(1, 1), (9, 6), (12, 4), (97, 96), (100, 40)])
def test_euler_phi(q, phi):
    assert euler_phi(q) == phi


@given(st.integers(1, 3000))
def test_euler_phi_counts_units(q):
    assert euler_phi(q) == sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)


def test_mod4_table():
    table = character_table(4)
    assert len(table) == 2
    assert table[1](3) == -1
    assert table[1](2) == 0


def test_mod5_generator_value_is_primitive_fourth_root():
    table = character_table(5)
    assert len(table) == 4
    values = {complex(chi(2)) for chi in table}
    assert any(abs(v - 1j) < 1e-15 or abs(v + 1j) < 1e-15 for v in values)


def test_mod12_orthogonality_example():
    table = character_table(12)
    total = sum(chi(1) * chi(7).conjugate() for chi in table) / 4
    assert abs(total) < 1e-15


@pytest.mark.parametrize("q", range(1, 51))
def test_principal_and_orthogonality(q):
    table = character_table(q)
    chi0 = table[0]
    for n in range(q):
        assert chi0(n) == (1 if math.gcd(n, q) == 1 else 0)
    M = table.orthogonality_matrix()
    units = np.array([math.gcd(a, q) == 1 for a in range(q)])
    expected = np.where(units[:, None] & np.eye(q, dtype=bool), 1.0, 0.0)
    assert np.max(np.abs(M - expected)) <= 1e-12


@pytest.mark.parametrize("q", [3, 8, 15, 16, 24, 45, 48])
def test_multiplicative_and_roots_of_unity(q):
    table = character_table(q)
    units = [a for a in range(1, q) if math.gcd(a, q) == 1]
    for chi in table:
        for a in units:
            for b in units[:6]:
                assert abs(chi(a * b) - chi(a) * chi(b)) < 1e-12
            assert abs(chi(a) ** table.order - 1) < 1e-12


@pytest.mark.parametrize("q", [5, 7, 12, 16, 21])
def test_conjugation_closure(q):
    table = character_table(q)
    for chi in table:
        bar = table[chi.conjugate_index]
        assert np.max(np.abs(bar.values - chi.values.conj())) < 1e-15


@pytest.mark.parametrize("q", [8, 9, 12, 15, 20, 36])
def test_conductor_and_inducing_character(q):
    for chi in character_table(q):
        prim = chi.primitive()
        assert prim.is_primitive and q % prim.modulus == 0
        for n in range(1, 3 * q):
            if math.gcd(n, q) == 1:
                assert abs(chi(n) - prim(n)) < 1e-12


def test_primitive_counts():
    # number of primitive characters mod q is multiplicative: mod p it is p - 2
    for p in (3, 5, 7, 11):
        assert sum(c.is_primitive for c in character_table(p)) == p - 2
    assert sum(c.is_primitive for c in character_table(4)) == 1
    assert sum(c.is_primitive for c in character_table(8)) == 2


def test_character_cap():
    with pytest.raises(ValueError):
        character_table(10_001)


def test_gauss_sums():
    chi4 = character_table(4)[1]
    assert abs(gauss_sum(chi4) - 2j) < 1e-14
    for chi in character_table(5):
        if chi.is_primitive:
            assert abs(abs(gauss_sum(chi)) - math.sqrt(5)) < 1e-13
    assert gauss_sum(character_table(1)[0]) == pytest.approx(1)
    with pytest.raises(ValueError):
        gauss_sum(character_table(5)[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 60))
def test_gauss_sum_modulus_for_primitive(q):
    for chi in character_table(q):
        if chi.is_primitive:
            assert abs(abs(gauss_sum(chi)) - math.sqrt(q)) < 1e-11


def test_table_indices_stable():
    a = CharacterTable(24)
    b = CharacterTable(24)
    for i in range(len(a)):
        assert np.array_equal(a[i].exponents, b[i].exponents)
