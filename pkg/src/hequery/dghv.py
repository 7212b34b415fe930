"""DGHV somewhat-homomorphic encryption of bits over the integers.

A ciphertext is ``m + 2r + p*q``. Addition and multiplication of ciphertexts
act as XOR and AND on the plaintext bits as long as the noise ``m + 2r`` stays
below ``p/2`` in absolute value. Every ciphertext carries a conservative
``noise_bound`` that is propagated without the secret key.
"""
from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass

from .errors import EmptyPublicKey, InvalidParams, NoiseOverflowWarning


def as_rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


@dataclass(frozen=True)
class DghvParams:
    """Bit lengths: N of the fresh noise, P of the secret, Q of the multiplier."""

    noise_bits: int
    secret_bits: int
    rand_bits: int
    pubkey_size: int = 8
    lam: int | None = None

    def __post_init__(self):
        N, P, Q = self.noise_bits, self.secret_bits, self.rand_bits
        if min(N, P, Q) < 1:
            raise InvalidParams("bit lengths must be >= 1")
        if not N < P < Q:
            raise InvalidParams(f"need N < P < Q, got N={N}, P={P}, Q={Q}")
        if self.pubkey_size < 1:
            raise InvalidParams("pubkey_size must be >= 1")

    @classmethod
    def from_lambda(cls, lam: int, pubkey_size: int = 8, **overrides) -> DghvParams:
        """N = lam, P = lam^2, Q = lam^5, each overridable."""
        kw = dict(noise_bits=lam, secret_bits=lam ** 2, rand_bits=lam ** 5)
        kw.update(overrides)
        return cls(pubkey_size=pubkey_size, lam=lam, **kw)

    @property
    def zero_noise_bound(self) -> int:
        """Public bound on the noise 2r of one public-key element."""
        return 2 * ((1 << self.noise_bits) - 1)

    @property
    def safe_bound(self) -> int:
        """Largest noise guaranteed below p/2 using only p >= 2^(P-1)."""
        return (1 << (self.secret_bits - 2)) - 1


@dataclass(frozen=True)
class DghvSecretKey:
    p: int


@dataclass(frozen=True)
class DghvPublicKey:
    zeros: tuple


@dataclass(frozen=True)
class BitCiphertext:
    value: int
    noise_bound: int


def _check_bound(c: BitCiphertext, params: DghvParams | None) -> BitCiphertext:
    if params is not None and c.noise_bound > params.safe_bound:
        warnings.warn(
            f"noise bound of {c.noise_bound.bit_length()} bits exceeds the "
            f"{params.secret_bits - 2}-bit safe limit",
            NoiseOverflowWarning,
            stacklevel=3,
        )
    return c


def keygen(params: DghvParams, rng=None):
    """Odd P-bit secret p and ``pubkey_size`` encryptions of zero ``2r + p*q``."""
    rng = as_rng(rng)
    P = params.secret_bits
    p = rng.getrandbits(P - 1) | (1 << (P - 1)) | 1 if P > 1 else 1
    zeros = []
    for _ in range(params.pubkey_size):
        r = rng.getrandbits(params.noise_bits)
        q = rng.getrandbits(params.rand_bits - 1) | (1 << (params.rand_bits - 1))
        zeros.append(2 * r + p * q)
    return DghvSecretKey(p), DghvPublicKey(tuple(zeros))


def encrypt_sym(m: int, sk: DghvSecretKey, params: DghvParams, rng=None, r=None, q=None) -> BitCiphertext:
    if m not in (0, 1):
        raise ValueError("plaintext must be a bit")
    rng = as_rng(rng)
    if r is None:
        r = rng.getrandbits(params.noise_bits)
    if q is None:
        q = rng.getrandbits(params.rand_bits - 1) | (1 << (params.rand_bits - 1))
    return BitCiphertext(m + 2 * r + sk.p * q, 2 * r + 1)


def encrypt_pub(m: int, pk: DghvPublicKey, params: DghvParams, rng=None, subset=None) -> BitCiphertext:
    """``m`` plus a uniformly random nonempty subset sum of the public zeros."""
    if m not in (0, 1):
        raise ValueError("plaintext must be a bit")
    if not pk.zeros:
        raise EmptyPublicKey("public key holds no encryptions of zero")
    rng = as_rng(rng)
    if subset is None:
        subset = []
        while not subset:
            subset = [i for i in range(len(pk.zeros)) if rng.getrandbits(1)]
    value = m + sum(pk.zeros[i] for i in subset)
    return BitCiphertext(value, len(subset) * params.zero_noise_bound + 1)


def centered_residue(value: int, p: int) -> int:
    r = value % p
    if 2 * r > p:
        r -= p
    return r


def decrypt(c: BitCiphertext, sk: DghvSecretKey) -> int:
    # Python's % already returns the nonnegative parity of a negative residue
    return centered_residue(c.value, sk.p) % 2


def hom_add(c1: BitCiphertext, c2: BitCiphertext, params: DghvParams | None = None) -> BitCiphertext:
    return _check_bound(BitCiphertext(c1.value + c2.value, c1.noise_bound + c2.noise_bound), params)


def hom_mul(c1: BitCiphertext, c2: BitCiphertext, params: DghvParams | None = None) -> BitCiphertext:
    return _check_bound(BitCiphertext(c1.value * c2.value, c1.noise_bound * c2.noise_bound), params)


def add_plain(c: BitCiphertext, b: int, params: DghvParams | None = None) -> BitCiphertext:
    return _check_bound(BitCiphertext(c.value + b, c.noise_bound + abs(b)), params)


def mul_plain(c: BitCiphertext, b: int, params: DghvParams | None = None) -> BitCiphertext:
    return _check_bound(BitCiphertext(c.value * b, c.noise_bound * abs(b)), params)


def noise_budget(c: BitCiphertext, key) -> float:
    """Bits of headroom: log2(p/2) - log2(noise_bound).

    ``key`` is either the secret key (exact p) or the params (uses the
    public lower bound p >= 2^(P-1)). Negative means decryption is no
    longer guaranteed by the tracked bound.
    """
    if isinstance(key, DghvSecretKey):
        half = math.log2(key.p) - 1
    else:
        half = key.secret_bits - 2
    if c.noise_bound <= 1:
        return half
    return half - math.log2(c.noise_bound)


def hom_binary_add(a, b, params: DghvParams | None = None, width: int | None = None, ops=None):
    """Ripple-carry sum of two little-endian encrypted bit vectors.

    Returns ``max(len(a), len(b)) + 1`` bits, or ``width`` bits when given
    (high bits are dropped; callers use this when the sum is known to fit).
    ``ops`` may supply ``add``/``mul`` callables so a metered backend sees
    every gate.
    """
    add = ops.add if ops is not None else (lambda x, y: hom_add(x, y, params))
    mul = ops.mul if ops is not None else (lambda x, y: hom_mul(x, y, params))
    if len(a) < len(b):
        a, b = b, a
    full = len(a) + 1
    width = full if width is None else min(width, full)
    out = []
    carry = None
    for i in range(min(len(a), width)):
        x = a[i]
        y = b[i] if i < len(b) else None
        last = i == width - 1
        if y is None and carry is None:
            out.append(x)
            continue
        if y is None:
            out.append(add(x, carry))
            carry = None if last else mul(x, carry)
        elif carry is None:
            out.append(add(x, y))
            carry = None if last else mul(x, y)
        else:
            xy = add(x, y)
            out.append(add(xy, carry))
            # majority(x, y, c) = xy + c(x + y); the two terms are never both 1
            carry = None if last else add(mul(x, y), mul(carry, xy))
    if len(out) < width:
        # only reachable with an empty operand: the top bit is a known zero
        out.append(carry if carry is not None else BitCiphertext(0, 0))
    return out


def min_secret_bits(max_bound: int) -> int:
    """Smallest P whose public safe limit 2^(P-2) exceeds ``max_bound``."""
    return max_bound.bit_length() + 2
