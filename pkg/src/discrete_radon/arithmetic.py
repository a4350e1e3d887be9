"""Ionescu-Wainger denominator sets, rational sets, partition families and the O property."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
import sympy

from .core import MultiIndexSet
from .expsums import RationalPoint, TorusPoint, as_fraction
from .kernels import smooth_step
from .seeding import generator, spawn

N0_GUARD = 60
MATERIALIZE_BUDGET = 10**6


def _legendre(n: int, p: int) -> int:
    """Exponent of p in n!."""
    e, m = 0, n
    while m:
        m //= p
        e += m
    return e


def _prime_powers_products(primes: Sequence[int], D: int) -> list[int]:
    """Products of 1..D distinct primes from ``primes`` at exponents 1..D."""
    out = []
    for k in range(1, min(D, len(primes)) + 1):
        for combo in itertools.combinations(primes, k):
            for exps in itertools.product(range(1, D + 1), repeat=k):
                out.append(math.prod(p**e for p, e in zip(combo, exps)))
    return sorted(out)


@dataclass(frozen=True)
class DenominatorSet:
    """P_N = {Q w : Q | Q0, w in Pi(primes in (N0, N]) or w = 1}."""

    N: int
    rho: float

    def __post_init__(self):
        if self.N < 1 or not self.rho > 0:
            raise ValueError("need N >= 1 and rho > 0")
        if self.N0 > N0_GUARD:
            raise ValueError(f"N0 = {self.N0} exceeds the guard {N0_GUARD}")

    @property
    def N0(self) -> int:
        return math.floor(self.N ** (self.rho / 2)) + 1

    @property
    def D(self) -> int:
        return math.floor(2 / self.rho) + 1

    @property
    def Q0(self) -> int:
        return math.factorial(self.N0) ** self.D

    @cached_property
    def small_primes(self) -> list[int]:
        return list(sympy.primerange(2, self.N0 + 1))

    @cached_property
    def primes_window(self) -> list[int]:
        return list(sympy.primerange(self.N0 + 1, self.N + 1))

    @property
    def q0_exponents(self) -> dict[int, int]:
        return {p: self.D * _legendre(self.N0, p) for p in self.small_primes}

    def q0_divisors(self) -> Iterator[int]:
        exps = self.q0_exponents
        primes = list(exps)
        for e in itertools.product(*(range(exps[p] + 1) for p in primes)):
            yield math.prod(p**v for p, v in zip(primes, e))

    @property
    def pi_size(self) -> int:
        m, D = len(self.primes_window), self.D
        return sum(math.comb(m, k) * D**k for k in range(1, min(D, m) + 1))

    def pi(self) -> list[int]:
        if self.pi_size > MATERIALIZE_BUDGET:
            raise MemoryError(f"Pi has {self.pi_size} elements, above the budget")
        return _prime_powers_products(self.primes_window, self.D)

    @property
    def size(self) -> int:
        return math.prod(e + 1 for e in self.q0_exponents.values()) * (self.pi_size + 1)

    def members(self) -> Iterator[int]:
        """Lazy iteration over P_N, grouped by w (w = 1 first)."""
        for w in [1] + self.pi():
            for Q in self.q0_divisors():
                yield Q * w

    def split(self, q: int) -> tuple[int, int]:
        """Split q into its part over primes <= N0 and the rest."""
        if q < 1:
            raise ValueError("q must be positive")
        Q, rest = 1, q
        for p in self.small_primes:
            while rest % p == 0:
                rest //= p
                Q *= p
        return Q, rest

    def _in_pi_or_one(self, w: int) -> bool:
        if w == 1:
            return True
        used = 0
        for p in self.primes_window:
            e = 0
            while w % p == 0:
                w //= p
                e += 1
            if e > self.D:
                return False
            used += e > 0
            if w == 1:
                break
        return w == 1 and used <= self.D

    def contains(self, q: int) -> bool:
        Q, w = self.split(q)
        return self.Q0 % Q == 0 and self._in_pi_or_one(w)

    def __contains__(self, q: int) -> bool:
        return self.contains(q)


def build_denominator_set(N: int, rho: float) -> DenominatorSet:
    return DenominatorSet(int(N), float(rho))


def unique_factorization(q: int, S: DenominatorSet) -> tuple[int, int]:
    """(Q, w) with Q | Q0 and w in Pi or 1, q = Q w."""
    if not S.contains(q):
        raise ValueError(f"{q} is not in P_N for N={S.N}, rho={S.rho}")
    return S.split(q)


def factorizations_exhaustive(q: int, S: DenominatorSet) -> list[tuple[int, int]]:
    """All pairs (Q, w) with Q | Q0, Q | q and q / Q in Pi or 1, by scanning divisors of Q0."""
    out = []
    for Q in S.q0_divisors():
        if q % Q == 0 and S._in_pi_or_one(q // Q):
            out.append((Q, q // Q))
    return out


# ---------------------------------------------------------------------------
# rational sets


@dataclass(frozen=True)
class RationalSet:
    d: int
    points: tuple[RationalPoint, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_set(self) -> set[tuple[Fraction, ...]]:
        return {tuple(p.fractions()) for p in self.points}

    def to_array(self) -> np.ndarray:
        return np.array([[float(f) for f in p.fractions()] for p in self.points]).reshape(-1, self.d)


def build_rational_set(denoms: Iterable[int], gamma: MultiIndexSet | int, budget: int = MATERIALIZE_BUDGET) -> RationalSet:
    """R(S) = {a/q : a in A_q, q in S}."""
    d = gamma if isinstance(gamma, int) else gamma.d
    qs = sorted(set(int(q) for q in denoms))
    if any(q < 1 for q in qs):
        raise ValueError("denominators must be >= 1")
    if qs and len(qs) * max(qs) ** d > budget:
        raise MemoryError("rational set exceeds the enumeration budget")
    pts = []
    for q in qs:
        for a in itertools.product(range(1, q + 1), repeat=d):
            if math.gcd(q, *a) == 1:
                pts.append(RationalPoint(a, q))
    return RationalSet(d, tuple(pts))


def ionescu_wainger_set(N: int, rho: float, d: int, budget: int = MATERIALIZE_BUDGET) -> RationalSet:
    S = build_denominator_set(N, rho)
    return build_rational_set(list(S.members()), d, budget)


# ---------------------------------------------------------------------------
# partition families


def partition_bound(N: int, k: int) -> int:
    """r = ceil(k^(k+1)/k! * ln(eN/k)) + 1."""
    return math.ceil(k ** (k + 1) / math.factorial(k) * math.log(math.e * N / k)) + 1


@dataclass(frozen=True)
class PartitionFamily:
    N: int
    k: int
    labels: tuple[tuple[int, ...], ...]  # each a surjection N_N -> {0..k-1}
    attempts: int = 1

    def __len__(self):
        return len(self.labels)

    def parts(self, i: int) -> list[list[int]]:
        """Parts of member i as lists of 1-based ground elements."""
        out = [[] for _ in range(self.k)]
        for x, lab in enumerate(self.labels[i]):
            out[lab].append(x + 1)
        return out


def _subsets(N: int, k: int) -> np.ndarray:
    if math.comb(N, k) > MATERIALIZE_BUDGET:
        raise MemoryError(f"C({N},{k}) exceeds the verification budget")
    return np.array(list(itertools.combinations(range(N), k)), dtype=np.int64).reshape(-1, k)


def _splits(labels: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    """Boolean (members, subsets): member labels subset E with k distinct labels."""
    out = np.empty((len(labels), len(subsets)), dtype=bool)
    for i, lab in enumerate(labels):
        vals = np.sort(lab[subsets], axis=1)
        out[i] = np.all(np.diff(vals, axis=1) != 0, axis=1)
    return out


def verify_covering(family: PartitionFamily) -> bool:
    """Every k-subset of the ground set meets all k parts of some member."""
    if family.k == 0 or not family.labels:
        return family.k == 0
    labels = np.array(family.labels, dtype=np.int64)
    if any(len(set(lab)) != family.k for lab in family.labels):
        return False
    return bool(_splits(labels, _subsets(family.N, family.k)).any(axis=0).all())


def _random_surjection(rng: np.random.Generator, N: int, k: int) -> np.ndarray:
    while True:
        lab = rng.integers(0, k, size=N)
        if len(np.unique(lab)) == k:
            return lab


def partition_family(N: int, k: int, seed: int = 0, max_attempts: int = 50) -> PartitionFamily:
    """Covering family of surjections N_N -> N_k with at most r members.

    Draws r uniform random surjections, keeps them when every k-subset is split
    by one of them, then greedily drops redundant members.
    """
    if k < 1 or N < k:
        raise ValueError("need 1 <= k <= N")
    if k == 1:
        return PartitionFamily(N, 1, (tuple([0] * N),))
    if k == N:
        return PartitionFamily(N, k, (tuple(range(N)),))
    r = partition_bound(N, k)
    subsets = _subsets(N, k)
    for attempt, child in enumerate(spawn(seed, max_attempts), start=1):
        rng = generator(child)
        labels = np.array([_random_surjection(rng, N, k) for _ in range(r)])
        cover = _splits(labels, subsets)
        if not cover.any(axis=0).all():
            continue
        chosen, uncovered = [], np.ones(len(subsets), dtype=bool)
        while uncovered.any():
            gains = (cover & uncovered).sum(axis=1)
            best = int(np.argmax(gains))
            chosen.append(best)
            uncovered &= ~cover[best]
        fam = PartitionFamily(N, k, tuple(tuple(int(v) for v in labels[i]) for i in sorted(chosen)), attempt)
        assert len(fam) <= r and verify_covering(fam)
        return fam
    p_one = math.factorial(k) / k**k
    miss = math.comb(N, k) * (1 - p_one) ** r
    raise RuntimeError(
        f"no covering family after {max_attempts} attempts "
        f"(per-subset split probability {p_one:.4f}, union bound on failure {miss:.3g})"
    )


# ---------------------------------------------------------------------------
# O property


@dataclass(frozen=True)
class OPropertyFamily:
    k: int
    slots: tuple[tuple[int, ...], ...]  # prime powers p^gamma_j in slot j
    exponents: tuple[int, ...]
    members: tuple[int, ...]


@dataclass(frozen=True)
class OPropertyResult:
    ok: bool
    certificate: Optional[OPropertyFamily] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _factor_checked(w: int, D: int) -> dict[int, int]:
    fac = {int(p): int(e) for p, e in sympy.factorint(w).items()}
    if len(fac) > D or any(e > D for e in fac.values()):
        raise ValueError(f"{w} does not factor within {D} distinct primes at exponents <= {D}")
    return fac


def o_property_check(Lambda: Iterable[int], D: int) -> OPropertyResult:
    """Search for slots S_1..S_k of prime powers certifying the O property."""
    members = sorted(set(int(w) for w in Lambda))
    if not members:
        raise ValueError("Lambda must be non-empty")
    if members == [1]:
        return OPropertyResult(True, OPropertyFamily(0, (), (), (1,)))
    if 1 in members:
        return OPropertyResult(False, reason="1 cannot be a product of k >= 1 prime powers")
    facs = [_factor_checked(w, D) for w in members]
    ks = {len(f) for f in facs}
    if len(ks) != 1:
        return OPropertyResult(False, reason=f"members have differing numbers of prime factors {sorted(ks)}")
    k = ks.pop()
    exp_of: dict[int, int] = {}
    for f in facs:
        for p, e in f.items():
            if exp_of.setdefault(p, e) != e:
                return OPropertyResult(False, reason=f"prime {p} occurs at two exponents")
    primes = sorted(exp_of)
    neighbours = {p: set() for p in primes}
    for f in facs:
        for p, p2 in itertools.combinations(f, 2):
            neighbours[p].add(p2)
            neighbours[p2].add(p)
    slot_of: dict[int, int] = {}
    slot_exp: list[Optional[int]] = [None] * k

    def place(i: int, used: int) -> bool:
        if i == len(primes):
            return True
        p = primes[i]
        for s in range(min(used + 1, k)):
            if slot_exp[s] is not None and slot_exp[s] != exp_of[p]:
                continue
            if any(slot_of.get(n) == s for n in neighbours[p]):
                continue
            prev = slot_exp[s]
            slot_of[p], slot_exp[s] = s, exp_of[p]
            if place(i + 1, max(used, s + 1)):
                return True
            del slot_of[p]
            slot_exp[s] = prev
        return False

    if not place(0, 0):
        return OPropertyResult(False, reason="no assignment of primes to slots separates every member")
    # slots left empty by the search (possible only if fewer primes than k) cannot occur,
    # since every member already has k primes in k distinct slots
    slots = tuple(tuple(sorted(p ** exp_of[p] for p in primes if slot_of[p] == s)) for s in range(k))
    cert = OPropertyFamily(k, slots, tuple(slot_exp), tuple(members))
    assert _certificate_valid(cert)
    return OPropertyResult(True, cert)


def _certificate_valid(cert: OPropertyFamily) -> bool:
    listed = [q for s in cert.slots for q in s]
    if any(math.gcd(a, b) != 1 for a, b in itertools.combinations(listed, 2)):
        return False
    for w in cert.members:
        reps = [c for c in itertools.product(*cert.slots) if math.prod(c) == w]
        if len(reps) != 1:
            return False
    return True


@dataclass(frozen=True)
class ODecomposition:
    V: tuple[int, ...]
    D: int
    sets: tuple[OPropertyFamily, ...]
    bound: int

    @property
    def union(self) -> set[int]:
        return {w for s in self.sets for w in s.members}


def decompose_o_property(V: Iterable[int], D: int, N: Optional[int] = None, seed: int = 0) -> ODecomposition:
    """Cover Pi(V) by product sets Pi_{k,i}^gamma(V), one per partition and exponent pattern."""
    V = tuple(sorted(set(int(p) for p in V)))
    if not V or any(not sympy.isprime(p) for p in V):
        raise ValueError("V must be a non-empty set of primes")
    if D < 1:
        raise ValueError("D must be >= 1")
    out = []
    kmax = min(D, len(V))
    for k, child in zip(range(1, kmax + 1), spawn(seed, kmax)):
        fam = partition_family(len(V), k, int(child.generate_state(1)[0]))
        for gamma in itertools.product(range(1, D + 1), repeat=k):
            for i in range(len(fam)):
                parts = [[V[x - 1] for x in part] for part in fam.parts(i)]
                slots = tuple(tuple(sorted(p**g for p in part)) for part, g in zip(parts, gamma))
                members = tuple(sorted(math.prod(c) for c in itertools.product(*slots)))
                out.append(OPropertyFamily(k, slots, tuple(gamma), members))
    bound = D * D**D * max(partition_bound(len(V), k) for k in range(1, kmax + 1))
    if len(out) > bound:
        raise AssertionError(f"emitted {len(out)} sets, above the bound {bound}")
    return ODecomposition(V, D, tuple(out), bound)


# ---------------------------------------------------------------------------
# projection multiplier


def bump_1d(t, d: int) -> np.ndarray:
    """1 for |t| <= 1/(16d), 0 for |t| >= 1/(8d), smooth in between."""
    a = 1.0 / (16 * d)
    return 1.0 - smooth_step((np.abs(np.asarray(t, dtype=float)) - a) / a)


def bump(x: np.ndarray, d: int) -> np.ndarray:
    """Tensor-product cutoff eta over the last axis."""
    return np.prod(bump_1d(x, d), axis=-1)


def _centered(x: np.ndarray) -> np.ndarray:
    return x - np.floor(x + 0.5)


def supports_disjoint(rationals: RationalSet, eps: Sequence[float]) -> bool:
    """Whether the bumps around distinct points of the set never overlap."""
    pts = rationals.to_array()
    reach = 2 * np.asarray(eps, dtype=float) / (8 * rationals.d)
    for i in range(len(pts)):
        gap = np.abs(_centered(pts[i + 1 :] - pts[i]))
        if np.any(np.all(gap < reach, axis=1)):
            return False
    return True


def projection_multiplier(
    xi, rationals: RationalSet, eps: Sequence[float], check: bool = True
) -> float:
    """Xi(xi) = sum over a/q of eta(E^-1 (xi - a/q)), periodised on the torus."""
    d = rationals.d
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (d,) or np.any(eps <= 0):
        raise ValueError("need one positive epsilon per coordinate")
    if check and not supports_disjoint(rationals, eps):
        warnings.warn("bump supports overlap; the projection may exceed 1", RuntimeWarning, stacklevel=2)
    x = np.array([float(c) for c in (xi.coords if isinstance(xi, TorusPoint) else xi)])
    diff = _centered(x[None, :] - rationals.to_array())
    return math.fsum(bump(diff / eps, d))
