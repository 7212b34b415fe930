"""Cyclotomic polynomials and the finite fields Z_p[x]/<Phi_n>.

Pipeline: build Phi_n exactly, compute its discriminant, reject square
discriminants (no prime can make Phi_n irreducible), then search primes with
Rabin's irreducibility test. ``FieldContext`` provides the arithmetic,
including inversion, used as the query-processing plaintext space.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _accel, kernels
from .errors import SearchExhausted, SquareDiscriminant, ZeroInverse


# ------------------------------------------------------------------ integers

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
PRIMALITY_METHOD = "trial division by primes < 40, then Miller-Rabin with the first 12 prime bases"


def is_prime(n: int) -> bool:
    """Miller-Rabin with fixed bases; deterministic below 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_between(lo: int, hi: int):
    """Primes p with lo <= p < hi, ascending."""
    for n in range(max(lo, 2), hi):
        if is_prime(n):
            yield n


def prev_prime(n: int) -> int:
    """Largest prime strictly below n."""
    n -= 1
    while n >= 2 and not is_prime(n):
        n -= 1
    if n < 2:
        raise ValueError("no prime below 2")
    return n


def prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def is_square(z: int) -> bool:
    """True iff ``z`` is the square of an integer."""
    if z < 0:
        return False
    r = math.isqrt(z)
    return r * r == z


# ----------------------------------------------------------- integer polys


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with arbitrary-precision integer coefficients, little-endian."""

    coeffs: tuple

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: IntPoly) -> IntPoly:
        if not self.coeffs or not other.coeffs:
            return IntPoly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    def __sub__(self, other: IntPoly) -> IntPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x - y for x, y in zip(a, b))

    def derivative(self) -> IntPoly:
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod_monic(self, divisor: IntPoly):
        """Quotient and remainder by a monic divisor, exactly over Z."""
        if divisor.lc != 1:
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dd = divisor.degree
        quot = [0] * max(len(rem) - dd, 0)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c:
                quot[k - dd] = c
                for j, b in enumerate(divisor.coeffs):
                    rem[k - dd + j] -= c * b
        return IntPoly(quot), IntPoly(rem[:dd])

    def __str__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c:
                mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                coef = str(c) if (c not in (1, -1) or i == 0) else ("-" if c < 0 else "")
                terms.append(f"{coef}{mon}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> IntPoly:
    """Phi_n as exact integer coefficients: (x^n - 1) / prod_{d | n, d < n} Phi_d."""
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    poly = IntPoly((-1,) + (0,) * (n - 1) + (1,))
    for d in range(1, n):
        if n % d == 0:
            poly, rem = poly.divmod_monic(cyclotomic_poly(d))
            assert not rem.coeffs, "cyclotomic division must be exact"
    return poly


# ----------------------------------------------------------- discriminant


def _crt_primes(need_bits: float, avoid: int):
    """Primes below the kernel limit, descending, skipping divisors of ``avoid``."""
    got, bits, p = [], 0.0, kernels.MAX_PRIME
    while bits < need_bits:
        p = prev_prime(p)
        if avoid % p:
            got.append(p)
            bits += math.log2(p)
    return got


def resultant(a: IntPoly, b: IntPoly) -> int:
    """Exact Res(a, b) over Z by multi-modular evaluation and CRT.

    Each residue comes from the Euclidean resultant recursion over Z_p; the
    number of primes is fixed by the Hadamard bound on the Sylvester matrix.
    """
    if a.degree < 0 or b.degree < 0:
        return 0
    if a.degree == 0:
        return a.lc ** b.degree
    if b.degree == 0:
        return b.lc ** a.degree
    norm_a = math.log2(sum(c * c for c in a.coeffs)) / 2
    norm_b = math.log2(sum(c * c for c in b.coeffs)) / 2
    bound_bits = b.degree * norm_a + a.degree * norm_b
    primes = _crt_primes(bound_bits + 3, abs(a.lc * b.lc))
    value, modulus = 0, 1
    for p in primes:
        r = kernels.resultant(kernels.as_residues(a.coeffs, p), kernels.as_residues(b.coeffs, p), p)
        # incremental CRT
        t = (r - value) * pow(modulus, -1, p) % p
        value += modulus * t
        modulus *= p
    if value > modulus // 2:
        value -= modulus
    return value


def discriminant(f: IntPoly) -> int:
    """disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f)."""
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    res = resultant(f, f.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    q, r = divmod(sign * res, f.lc)
    assert r == 0
    return q


# ------------------------------------------------------------ irreducibility


def _monic_residues(f: IntPoly, p: int) -> np.ndarray:
    c = [x % p for x in f.coeffs]
    while c and c[-1] == 0:
        c.pop()
    if not c:
        return np.zeros(0, dtype=np.int64)
    inv = pow(c[-1], -1, p)
    return np.asarray([x * inv % p for x in c], dtype=np.int64)


def rabin_irreducible(f: IntPoly, p: int, use_numba=None) -> bool:
    """Rabin's test: is ``f mod p`` irreducible over Z_p?

    f (degree d after reduction) is irreducible iff x^(p^d) = x mod f and
    gcd(x^(p^(d/r)) - x, f) = 1 for every prime r dividing d.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    fm = _monic_residues(f, p)
    d = fm.shape[0] - 1
    if d < 1:
        raise ValueError("polynomial is constant modulo p")
    if d == 1:
        return True
    ring = kernels.PolyModRing(fm, p, use_numba=use_numba)
    x = ring.x()
    checkpoints = {d // r for r in prime_factors(d)}
    h = x
    for k in range(1, d + 1):
        h = ring.frobenius(h)
        if k in checkpoints:
            g = ring.gcd_with_modulus((h - x) % p)
            if g.shape[0] != 1:
                return False
    return bool(np.array_equal(h, x))


@dataclass
class FieldSearchReport:
    n: int
    degree: int
    disc_is_square: bool
    primes_tested: list
    chosen_p: int | None
    elapsed_ms: float
    irreducible_primes: list = field(default_factory=list)
    primality_check: str = PRIMALITY_METHOD
    kernel_backend: str = field(default_factory=_accel.backend_name)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "disc_is_square": self.disc_is_square,
            "primes_tested": list(self.primes_tested),
            "chosen_p": self.chosen_p,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "irreducible_primes": list(self.irreducible_primes),
            "primality_check": self.primality_check,
            "kernel_backend": self.kernel_backend,
        }


def search_field_primes(n: int, below: int | None = None, lower_bound: int = 0,
                        max_tests: int = 10_000, stop_at_first: bool = True) -> FieldSearchReport:
    """Scan primes ascending for ones where Phi_n stays irreducible.

    With ``stop_at_first`` the scan ends at the first hit above
    ``lower_bound``; otherwise every prime in ``(lower_bound, below)`` is
    tested and all hits are recorded.
    """
    start = time.perf_counter()
    f = cyclotomic_poly(n)
    square = is_square(discriminant(f))
    report = FieldSearchReport(n=n, degree=f.degree, disc_is_square=square,
                               primes_tested=[], chosen_p=None, elapsed_ms=0.0)
    if square:
        report.elapsed_ms = (time.perf_counter() - start) * 1e3
        return report
    hi = below if below is not None else kernels.MAX_PRIME
    for p in primes_between(lower_bound + 1, hi):
        if len(report.primes_tested) >= max_tests:
            break
        report.primes_tested.append(p)
        if rabin_irreducible(f, p):
            report.irreducible_primes.append(p)
            if report.chosen_p is None:
                report.chosen_p = p
            if stop_at_first:
                break
    report.elapsed_ms = (time.perf_counter() - start) * 1e3
    return report


def find_field_prime(n: int, below: int | None = None, lower_bound: int = 0,
                     max_tests: int = 10_000) -> int:
    """Smallest prime p > lower_bound with Phi_n irreducible mod p."""
    report = search_field_primes(n, below=below, lower_bound=lower_bound, max_tests=max_tests)
    if report.disc_is_square:
        raise SquareDiscriminant(f"disc(Phi_{n}) is a square; Phi_{n} is reducible modulo every prime")
    if report.chosen_p is None:
        raise SearchExhausted(f"no prime in ({lower_bound}, {below}) makes Phi_{n} irreducible "
                              f"({len(report.primes_tested)} tested)")
    return report.chosen_p


# ------------------------------------------------------------------ fields


class FieldContext:
    """The field Z_p[x]/<Phi_n>; requires Phi_n irreducible mod p."""

    def __init__(self, n: int, p: int, check: bool = True):
        self.n = n
        self.p = p
        self.modulus = cyclotomic_poly(n)
        self.degree = self.modulus.degree
        if check and not rabin_irreducible(self.modulus, p):
            raise ValueError(f"Phi_{n} is reducible mod {p}; Z_{p}[x]/<Phi_{n}> is not a field")
        self._ring = kernels.PolyModRing(kernels.as_residues(self.modulus.coeffs, p), p)

    def __repr__(self):
        return f"FieldContext(n={self.n}, p={self.p}, degree={self.degree})"

    def __eq__(self, other):
        return isinstance(other, FieldContext) and (self.n, self.p) == (other.n, other.p)

    def __hash__(self):
        return hash((self.n, self.p))

    def element(self, coeffs) -> FieldElement:
        coeffs = list(coeffs)
        if len(coeffs) > self.degree:
            # reduce longer inputs modulo Phi_n first
            _, rem = IntPoly(coeffs).divmod_monic(self.modulus)
            coeffs = list(rem.coeffs)
        c = [int(x) % self.p for x in coeffs] + [0] * (self.degree - len(coeffs))
        return FieldElement(tuple(c), self)

    def constant(self, j: int) -> FieldElement:
        return self.element([j])

    def zero(self) -> FieldElement:
        return self.constant(0)

    def one(self) -> FieldElement:
        return self.constant(1)

    def random(self, rng) -> FieldElement:
        return self.element([rng.randrange(self.p) for _ in range(self.degree)])


@dataclass(frozen=True, eq=False)
class FieldElement:
    coeffs: tuple
    ctx: FieldContext

    def _arr(self):
        return np.asarray(self.coeffs, dtype=np.int64)

    def _wrap(self, arr) -> FieldElement:
        return FieldElement(tuple(int(x) for x in arr), self.ctx)

    def _check(self, other):
        if other.ctx != self.ctx:
            raise ValueError("field elements from different contexts")

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ctx.constant(other)
        return isinstance(other, FieldElement) and other.ctx == self.ctx and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.ctx))

    def __add__(self, other):
        self._check(other)
        p = self.ctx.p
        return FieldElement(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.ctx)

    def __sub__(self, other):
        self._check(other)
        p = self.ctx.p
        return FieldElement(tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)), self.ctx)

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(tuple((-a) % p for a in self.coeffs), self.ctx)

    def __mul__(self, other):
        self._check(other)
        return self._wrap(self.ctx._ring.mul(self._arr(), other._arr()))

    def inverse(self) -> FieldElement:
        if not any(self.coeffs):
            raise ZeroInverse("zero has no inverse")
        ok, inv = self.ctx._ring.inverse(self._arr())
        if not ok:
            raise ZeroInverse("element shares a factor with the modulus; context is not a field")
        return self._wrap(inv)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_constant(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self):
        return f"FieldElement({list(self.coeffs)}, p={self.ctx.p})"


def fadd(a, b):
    return a + b


def fsub(a, b):
    return a - b


def fmul(a, b):
    return a * b


def fneg(a):
    return -a


def finv(a):
    return a.inverse()
