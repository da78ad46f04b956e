"""Sieves, Euler's totient and the group of Dirichlet characters mod q.

Characters are stored exactly: every value is ``e(k / E)`` for an integer
exponent ``k`` and the exponent ``E`` of the unit group, with ``k = -1``
marking residues that share a factor with the modulus.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .storage import read_container, write_container

MAX_SIEVE = 200_000_000
MAX_CHARACTER_MODULUS = 10_000
LAMBDA_MAGIC = b"LAMB"


# ---------------------------------------------------------------------------
# von Mangoldt sieve


@dataclass(frozen=True)
class LambdaTable:
    """Values of the von Mangoldt function on 0..limit.

    ``values[n]`` is Lambda(n); slot 0 is unused and holds 0.
    """

    limit: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, n):
        return self.values[n]

    def save(self, path: Path | str) -> None:
        write_container(path, LAMBDA_MAGIC, self.values[1:])

    @classmethod
    def load(cls, path: Path | str) -> "LambdaTable":
        payload, _ = read_container(path, LAMBDA_MAGIC)
        values = np.concatenate(([0.0], payload))
        return cls(limit=payload.size, values=values)


def prime_sieve(limit: int) -> np.ndarray:
    """Boolean primality mask of length ``limit + 1``."""
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return is_prime


def sieve_lambda(T: int, max_limit: int = MAX_SIEVE) -> LambdaTable:
    """Sieve Lambda(n) for 1 <= n <= T.

    Raises:
        ValueError: if T < 2 or T exceeds ``max_limit``.
    """
    T = int(T)
    if T < 2:
        raise ValueError(f"sieve limit must be at least 2, got {T}")
    if T > max_limit:
        raise ValueError(f"sieve limit {T} exceeds the memory cap {max_limit}")
    is_prime = prime_sieve(T)
    primes = np.flatnonzero(is_prime)
    values = np.zeros(T + 1, dtype=np.float64)
    values[primes] = np.log(primes)
    for p in primes[: np.searchsorted(primes, math.isqrt(T), side="right")]:
        p = int(p)
        logp = math.log(p)
        pk = p * p
        while pk <= T:
            values[pk] = logp
            pk *= p
    return LambdaTable(limit=T, values=values)


# ---------------------------------------------------------------------------
# elementary number theory


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation by trial division, ascending primes."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    """Euler's totient function."""
    if q < 1:
        raise ValueError("euler_phi expects q >= 1")
    result = q
    for p, _ in factorize(q):
        result -= result // p
    return result


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo an odd prime p."""
    phi = p - 1
    factors = [f for f, _ in factorize(phi)]
    for g in range(2, p):
        if all(pow(g, phi // f, p) != 1 for f in factors):
            return g
    raise ValueError(f"no primitive root mod {p}")


# ---------------------------------------------------------------------------
# Dirichlet characters


@dataclass(frozen=True)
class _Component:
    """Cyclic factor of (Z/qZ)^*: generated by ``generator`` (a residue mod q)."""

    prime: int
    modulus: int  # the prime power this factor lives in
    generator: int
    order: int
    log: np.ndarray  # discrete log of each residue mod q in this factor, -1 if not a unit


def _components(q: int) -> list[_Component]:
    """CRT decomposition of the unit group into cyclic factors."""
    comps = []
    for p, e in factorize(q):
        pe = p**e
        cofactor = q // pe
        # lift a residue mod p^e to q: x = 1 on the other CRT factors
        lift = (cofactor * pow(cofactor, -1, pe)) % q if cofactor > 1 else 1

        def to_q(x, pe=pe, lift=lift):
            return (1 + (x - 1) * lift) % q if q > 1 else 0

        residues = np.arange(q)
        local = residues % pe
        if p == 2:
            if e == 1:
                continue
            # -1 factor
            log_m1 = np.full(q, -1, dtype=np.int64)
            log_5 = np.full(q, -1, dtype=np.int64)
            odd = local % 2 == 1
            sign = np.where(local % 4 == 1, 0, 1)
            log_m1[odd] = sign[odd]
            comps.append(_Component(2, pe, to_q(pe - 1), 2, log_m1))
            if e >= 3:
                order5 = 2 ** (e - 2)
                table = {}
                x = 1
                for k in range(order5):
                    table[x] = k
                    x = x * 5 % pe
                for r in np.flatnonzero(odd):
                    u = int(local[r])
                    if sign[r]:
                        u = (-u) % pe
                    log_5[r] = table[u]
                comps.append(_Component(2, pe, to_q(5), order5, log_5))
        else:
            g = primitive_root(p)
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            order = pe - pe // p
            dlog = np.full(pe, -1, dtype=np.int64)
            x = 1
            for k in range(order):
                dlog[x] = k
                x = x * g % pe
            comps.append(_Component(p, pe, to_q(g), order, dlog[local]))
    return comps


@dataclass(frozen=True, eq=False)
class Character:
    """One Dirichlet character mod ``modulus``.

    ``exponents[n % q]`` is k with chi(n) = e(k / root_order), or -1 when
    gcd(n, q) > 1.
    """

    modulus: int
    index: int
    label: tuple[int, ...]
    root_order: int
    exponents: np.ndarray = field(repr=False)
    conjugate_index: int
    parity: int
    conductor: int
    primitive_index: int  # index in character_table(conductor)

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_real(self) -> bool:
        return self.conjugate_index == self.index

    @cached_property
    def values(self) -> np.ndarray:
        """Complex values on residues 0..q-1."""
        k = self.exponents
        E = self.root_order
        kk = np.where(k >= 0, k, 0)
        out = np.exp(2j * np.pi * kk / E)
        quarter = (4 * kk) % E == 0
        out[quarter] = np.array([1, 1j, -1, -1j])[(4 * kk[quarter]) // E]
        out[k < 0] = 0.0
        out.setflags(write=False)
        return out

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def at(self, n: np.ndarray) -> np.ndarray:
        return self.values[np.asarray(n) % self.modulus]

    def principal_indicator(self) -> int:
        """E_0(chi): 1 for the principal character, else 0."""
        return 1 if self.is_principal else 0

    def primitive(self) -> "Character":
        """The primitive character inducing this one."""
        return character_table(self.conductor)[self.primitive_index]


class CharacterTable:
    """All phi(q) Dirichlet characters mod q.

    Index order: characters are labelled by a tuple ``(j_1, ..., j_r)`` with
    ``j_i`` in ``Z / n_i`` over the cyclic factors of (Z/qZ)^* (odd primes
    ascending; for 2^e the factor <-1> precedes <5>), enumerated
    lexicographically.  Index 0 is the principal character.
    """

    def __init__(self, q: int):
        self.modulus = q
        self.order = euler_phi(q)
        self._comps = _components(q)
        self.root_order = math.lcm(*(c.order for c in self._comps)) if self._comps else 1
        self.labels = list(itertools.product(*(range(c.order) for c in self._comps)))
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        self._cache: dict[int, Character] = {}
        units = np.array([math.gcd(n, q) == 1 for n in range(q)]) if q > 1 else np.array([True])
        self._units = units

    def __len__(self) -> int:
        return self.order

    def __iter__(self):
        return (self[i] for i in range(self.order))

    def __getitem__(self, j: int) -> Character:
        if not 0 <= j < self.order:
            raise IndexError(j)
        if j not in self._cache:
            self._cache[j] = self._build(j)
        return self._cache[j]

    def exponents_of(self, label: tuple[int, ...]) -> np.ndarray:
        E = self.root_order
        k = np.zeros(self.modulus, dtype=np.int64)
        for comp, j in zip(self._comps, label):
            k = k + comp.log * (j * (E // comp.order))
        k %= E
        k[~self._units] = -1
        return k

    def _build(self, j: int) -> Character:
        label = self.labels[j]
        k = self.exponents_of(label)
        conj_label = tuple((-x) % c.order for x, c in zip(label, self._comps))
        q = self.modulus
        km1 = k[(q - 1) % q] if q > 1 else 0
        parity = 0 if km1 == 0 else 1
        conductor = self._conductor(k)
        prim = self._inducing_index(k, conductor) if conductor != q else j
        k.setflags(write=False)
        return Character(q, j, label, self.root_order, k, self._label_index[conj_label],
                         parity, conductor, prim)

    def _conductor(self, k: np.ndarray) -> int:
        q = self.modulus
        units = np.flatnonzero(self._units)
        for d in divisors(q):
            one_mod_d = units[units % d == 1 % d]
            if np.all(k[one_mod_d] == 0):
                return d
        return q

    def _inducing_index(self, k: np.ndarray, d: int) -> int:
        """Index in character_table(d) of the character agreeing with k on units mod q."""
        q = self.modulus
        E = self.root_order
        sub = character_table(d)
        label = []
        for comp in sub._comps:
            # a unit mod q congruent to the sub-generator mod d
            g = comp.generator
            n = next(n for n in range(g, g + d * q + 1, d) if math.gcd(n, q) == 1)
            frac = (int(k[n % q]) * comp.order) / E
            label.append(int(round(frac)) % comp.order)
        return sub._label_index[tuple(label)]

    def orthogonality_matrix(self) -> np.ndarray:
        """(1/phi(q)) sum_chi chi(a) conj(chi(n)) for all residues a, n."""
        vals = np.array([chi.values for chi in self])
        return vals.T @ vals.conj() / self.order


@lru_cache(maxsize=256)
def character_table(q: int, max_modulus: int = MAX_CHARACTER_MODULUS) -> CharacterTable:
    """Build (and memoise) the character group mod q."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q > max_modulus:
        raise ValueError(f"modulus {q} exceeds the character-table cap {max_modulus}")
    return CharacterTable(q)


def gauss_sum(chi: Character) -> complex:
    """tau(chi) = sum_{a=1}^{q} chi(a) e(a/q) for primitive chi."""
    if not chi.is_primitive:
        raise ValueError(f"gauss_sum needs a primitive character (conductor {chi.conductor} "
                         f"!= modulus {chi.modulus})")
    q, E = chi.modulus, chi.root_order
    total = 0j
    for a in range(1, q + 1):
        k = int(chi.exponents[a % q])
        if k < 0:
            continue
        num = (k * q + a * E) % (E * q)
        total += cmath.exp(2j * math.pi * num / (E * q))
    return total
