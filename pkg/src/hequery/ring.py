"""Single-key ring scheme over R = Z[x]/<Phi_n> (YASHE-style).

Keys: ``f = [t f' + 1]_q`` (secret) and ``h = [t g f^-1]_q`` (public).
Encrypt: ``c = [floor(q/t) [m]_t + e + h s]_q``.
Decrypt: ``m = [round(t/q [f c]_q)]_t``.
Multiply: scale-round the product by t/q, then key-switch with a base-w
evaluation key ``evk_i = [w^i f + e_i + h s_i]_q`` so the result decrypts
under ``f`` again.

All arithmetic is exact: Python integers and integer rounding, no floats
except for sampling the Gaussian error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cyclotomic import cyclotomic_poly, euler_phi, prev_prime
from .dghv import as_rng
from .errors import IntegerOverflow, InvalidParams, NonInvertibleExhausted

MAX_KEYGEN_TRIES = 100


def round_div(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0), ties to even."""
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q & 1):
        q += 1
    return q


def center(x: int, q: int) -> int:
    """Representative of x mod q in (-q/2, q/2]."""
    x %= q
    return x - q if 2 * x > q else x


@dataclass(frozen=True)
class RingParams:
    n: int
    q: int
    t: int
    err_stddev: float = 3.2
    key_bound: int = 1
    w: int = 1 << 16
    f_mod: tuple = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParams("cyclotomic index must be positive")
        object.__setattr__(self, "f_mod", cyclotomic_poly(self.n).coeffs)
        if not 1 < self.t < self.q:
            raise InvalidParams(f"need 1 < t < q, got t={self.t}, q={self.q}")
        if self.w < 2:
            raise InvalidParams("decomposition base must be >= 2")
        if self.key_bound < 1:
            raise InvalidParams("key_bound must be >= 1")

    @classmethod
    def with_q_bits(cls, n: int, q_bits: int, t: int, **kw) -> RingParams:
        """Params with q the largest prime below 2^q_bits."""
        return cls(n=n, q=prev_prime(1 << q_bits), t=t, **kw)

    @property
    def d(self) -> int:
        return len(self.f_mod) - 1

    @property
    def delta(self) -> int:
        return self.q // self.t

    @property
    def ell(self) -> int:
        """Number of base-w digits needed for residues mod q."""
        k, power = 1, self.w
        while power < self.q:
            power *= self.w
            k += 1
        return k


@dataclass(frozen=True)
class PlainPoly:
    coeffs: tuple

    @classmethod
    def make(cls, coeffs, params: RingParams) -> PlainPoly:
        c = list(coeffs)
        if len(c) > params.d:
            c = _reduce_cyclo(c, params.f_mod)
        return cls(tuple(int(x) % params.t for x in c) + (0,) * (params.d - len(c)))

    @classmethod
    def constant(cls, j: int, params: RingParams) -> PlainPoly:
        return cls.make([j], params)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class RingCiphertext:
    coeffs: tuple


@dataclass(frozen=True)
class RingPublicKey:
    h: tuple
    evk: tuple


@dataclass(frozen=True)
class RingKeys:
    f: tuple
    h: tuple
    evk: tuple

    @property
    def public(self) -> RingPublicKey:
        return RingPublicKey(self.h, self.evk)


# ------------------------------------------------------------ poly plumbing


def _mul_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _reduce_cyclo(c, f_mod):
    """Exact reduction of an integer polynomial modulo the monic Phi_n."""
    c = list(c)
    d = len(f_mod) - 1
    for k in range(len(c) - 1, d - 1, -1):
        top = c[k]
        if top:
            for j in range(d + 1):
                c[k - d + j] -= top * f_mod[j]
    c = c[:d]
    return c + [0] * (d - len(c))


def ring_mul_int(a, b, params: RingParams):
    """a*b in Z[x]/<Phi_n>, no coefficient reduction."""
    return _reduce_cyclo(_mul_int(a, b), params.f_mod)


def ring_mul(a, b, params: RingParams):
    q = params.q
    return tuple(x % q for x in ring_mul_int(a, b, params))


def ring_add(a, b, q):
    return tuple((x + y) % q for x, y in zip(a, b))


def ring_sub(a, b, q):
    return tuple((x - y) % q for x, y in zip(a, b))


def _inverse_mod_q(a, params: RingParams):
    """Inverse of ``a`` in Z_q[x]/<Phi_n> by extended Euclid (q prime), or None."""
    q, d = params.q, params.d

    def trim(p):
        p = [x % q for x in p]
        while p and p[-1] == 0:
            p.pop()
        return p

    r0, r1 = trim(params.f_mod), trim(a)
    s0, s1 = [], [1]
    while r1 and len(r1) > 1:
        inv = pow(r1[-1], -1, q)
        quot = [0] * (len(r0) - len(r1) + 1)
        rem = list(r0)
        for k in range(len(rem) - 1, len(r1) - 2, -1):
            c = rem[k] * inv % q
            if c:
                quot[k - len(r1) + 1] = c
                for j, y in enumerate(r1):
                    rem[k - len(r1) + 1 + j] = (rem[k - len(r1) + 1 + j] - c * y) % q
        prod = _mul_int(quot, s1) if s1 else []
        size = max(len(s0), len(prod))
        ns = [((s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)) % q
              for i in range(size)]
        r0, r1 = r1, trim(rem)
        s0, s1 = s1, trim(ns)
    if not r1:
        return None
    inv = pow(r1[0], -1, q)
    s = [x * inv % q for x in s1]
    s = _reduce_cyclo(s, params.f_mod) if len(s) > d else s + [0] * (d - len(s))
    return tuple(x % q for x in s)


def _sample_key(params: RingParams, rng):
    b = params.key_bound
    return [rng.randint(-b, b) for _ in range(params.d)]


def _sample_err(params: RingParams, rng):
    return [round(rng.gauss(0.0, params.err_stddev)) for _ in range(params.d)]


# ------------------------------------------------------------------- scheme


def keygen(params: RingParams, rng=None) -> RingKeys:
    """Sample f', g from the key distribution until f = t f' + 1 is invertible mod q."""
    rng = as_rng(rng)
    q, t = params.q, params.t
    for _ in range(MAX_KEYGEN_TRIES):
        fp = _sample_key(params, rng)
        f = tuple((t * x + (1 if i == 0 else 0)) % q for i, x in enumerate(fp))
        f_inv = _inverse_mod_q(f, params)
        if f_inv is not None:
            break
    else:
        raise NonInvertibleExhausted(f"no invertible f after {MAX_KEYGEN_TRIES} samples")
    g = _sample_key(params, rng)
    h = ring_mul([t * x for x in g], f_inv, params)
    evk = []
    power = 1
    for _ in range(params.ell):
        s = _sample_err(params, rng)
        e = _sample_err(params, rng)
        hs = ring_mul(h, s, params)
        evk.append(tuple((power * fi + ei + hsi) % q for fi, ei, hsi in zip(f, e, hs)))
        power *= params.w
    return RingKeys(f=f, h=h, evk=tuple(evk))


def encrypt(m: PlainPoly, pk, params: RingParams, rng=None, s=None, e=None) -> RingCiphertext:
    """``pk`` may be a RingKeys or RingPublicKey (only ``h`` is used)."""
    rng = as_rng(rng)
    if s is None:
        s = _sample_err(params, rng)
    if e is None:
        e = _sample_err(params, rng)
    q, delta = params.q, params.delta
    hs = ring_mul(pk.h, s, params)
    return RingCiphertext(tuple((delta * (mi % params.t) + ei + x) % q
                                for mi, ei, x in zip(m.coeffs, e, hs)))


def _f_times_c(c: RingCiphertext, keys: RingKeys, params: RingParams):
    return [center(x, params.q) for x in ring_mul(keys.f, c.coeffs, params)]


def decrypt(c: RingCiphertext, keys: RingKeys, params: RingParams) -> PlainPoly:
    q, t = params.q, params.t
    v = _f_times_c(c, keys, params)
    return PlainPoly(tuple(round_div(t * x, q) % t for x in v))


def hom_add(c1: RingCiphertext, c2: RingCiphertext, params: RingParams) -> RingCiphertext:
    return RingCiphertext(ring_add(c1.coeffs, c2.coeffs, params.q))


def hom_sub(c1: RingCiphertext, c2: RingCiphertext, params: RingParams) -> RingCiphertext:
    return RingCiphertext(ring_sub(c1.coeffs, c2.coeffs, params.q))


def add_plain(c: RingCiphertext, m: PlainPoly, params: RingParams) -> RingCiphertext:
    """Add a known plaintext: c + floor(q/t) m."""
    q, delta = params.q, params.delta
    return RingCiphertext(tuple((x + delta * mi) % q for x, mi in zip(c.coeffs, m.coeffs)))


def sub_plain(c: RingCiphertext, m: PlainPoly, params: RingParams) -> RingCiphertext:
    return add_plain(c, PlainPoly(tuple((-x) % params.t for x in m.coeffs)), params)


def mul_plain(c: RingCiphertext, m: PlainPoly, params: RingParams) -> RingCiphertext:
    """Multiply by a known plaintext, lifted with coefficients centered mod t."""
    lifted = [center(x, params.t) for x in m.coeffs]
    return RingCiphertext(ring_mul(c.coeffs, lifted, params))


def scale_round(c1: RingCiphertext, c2: RingCiphertext, params: RingParams) -> RingCiphertext:
    """[round(t/q * c1 c2)]_q with c1 c2 formed in Z[x]/<Phi_n> from centered lifts."""
    q, t = params.q, params.t
    a = [center(x, q) for x in c1.coeffs]
    b = [center(x, q) for x in c2.coeffs]
    prod = ring_mul_int(a, b, params)
    return RingCiphertext(tuple(round_div(t * x, q) % q for x in prod))


def decompose(c: RingCiphertext, params: RingParams):
    """Base-w digit polynomials D_i with sum_i w^i D_i = c (canonical coefficients)."""
    w = params.w
    digits = []
    rest = list(c.coeffs)
    for _ in range(params.ell):
        digits.append(tuple(x % w for x in rest))
        rest = [x // w for x in rest]
    return digits


def key_switch(c_tilde: RingCiphertext, evk, params: RingParams) -> RingCiphertext:
    q = params.q
    acc = [0] * params.d
    for digit, key in zip(decompose(c_tilde, params), evk):
        if any(digit):
            for i, x in enumerate(ring_mul_int(digit, key, params)):
                acc[i] += x
    return RingCiphertext(tuple(x % q for x in acc))


def hom_mul(c1: RingCiphertext, c2: RingCiphertext, evk, params: RingParams) -> RingCiphertext:
    """``evk`` is the evaluation key tuple (``keys.evk`` or ``public.evk``)."""
    return key_switch(scale_round(c1, c2, params), evk, params)


def encode_integer(z: int, params: RingParams) -> PlainPoly:
    """Bits of |z| become coefficients of X^i; a negative z negates them all."""
    mag = abs(z)
    if mag.bit_length() > params.d:
        raise IntegerOverflow(f"|{z}| needs {mag.bit_length()} bits, ring degree is {params.d}")
    sign = -1 if z < 0 else 1
    return PlainPoly.make([sign * ((mag >> i) & 1) for i in range(params.d)], params)


def decode_integer(m: PlainPoly, params: RingParams) -> int:
    """Center coefficients mod t and evaluate at X = 2."""
    acc = 0
    for c in reversed(m.coeffs):
        acc = 2 * acc + center(c, params.t)
    return acc


def noise_estimate(c: RingCiphertext, keys: RingKeys, params: RingParams, expected: PlainPoly | None = None) -> float:
    """Remaining noise budget in bits, measured with the secret key.

    For each coefficient v of [f c]_q, the error is |t v - q m| for the lift
    m of the plaintext closest to t v / q. Decryption is correct iff every
    error is below q/2, so the budget is log2(q/2) - log2(max error). With
    ``expected`` the plaintext being checked is fixed; without it the
    decrypted value is used, which measures distance to a rounding boundary.
    """
    q, t = params.q, params.t
    v = _f_times_c(c, keys, params)
    worst = 0
    for i, x in enumerate(v):
        if expected is None:
            m = round_div(t * x, q)
        else:
            target = expected.coeffs[i] % t
            m = target + t * round_div(t * x - q * target, q * t)
        worst = max(worst, abs(t * x - q * m))
    return math.log2(q) - 1 - math.log2(max(worst, 1))


def ring_degree(n: int) -> int:
    return euler_phi(n)
