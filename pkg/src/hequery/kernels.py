"""Dense polynomial kernels over Z_p for small primes.

Every kernel exists twice: a loop version compiled by numba and a
vectorised numpy version. ``_accel.USE_NUMBA`` picks which one the public
wrappers call; both are importable so they can be cross-checked and timed.

Coefficient arrays are int64, little-endian by degree. Residues must be in
``[0, p)`` with ``p < MAX_PRIME`` so that a length-1024 dot product of
residues cannot overflow int64.
"""
import numpy as np

from . import _accel
from ._accel import njit

MAX_PRIME = 1 << 26


def check_prime_range(p):
    if not 2 <= p < MAX_PRIME:
        raise ValueError(f"kernel modulus must lie in [2, {MAX_PRIME}), got {p}")


# --------------------------------------------------------------- numba loops


@njit
def _modpow_nb(a, e, p):
    r = 1
    a = a % p
    while e > 0:
        if e & 1:
            r = r * a % p
        a = a * a % p
        e >>= 1
    return r


@njit
def _degree_nb(a):
    d = a.shape[0] - 1
    while d >= 0 and a[d] == 0:
        d -= 1
    return d


@njit
def _mulmod_nb(a, b, f, p):
    d = f.shape[0] - 1
    prod = np.zeros(2 * d, dtype=np.int64)
    for i in range(d):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(d):
            prod[i + j] = (prod[i + j] + ai * b[j]) % p
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k]
        if c == 0:
            continue
        for j in range(d):
            prod[k - d + j] = (prod[k - d + j] - c * f[j]) % p
    return prod[:d].copy()


@njit
def _frob_apply_nb(h, frob, p):
    d = h.shape[0]
    out = np.zeros(d, dtype=np.int64)
    for i in range(d):
        hi = h[i]
        if hi == 0:
            continue
        for j in range(d):
            out[j] = (out[j] + hi * frob[i, j]) % p
    return out


@njit
def _rem_inplace_nb(r, dr, b, db, p):
    # r <- r mod b; returns the new degree of r (-1 for zero)
    if dr < db:
        return dr
    inv = _modpow_nb(b[db], p - 2, p)
    for k in range(dr, db - 1, -1):
        c = r[k] * inv % p
        if c == 0:
            continue
        for j in range(db + 1):
            r[k - db + j] = (r[k - db + j] - c * b[j]) % p
    dr = db - 1
    while dr >= 0 and r[dr] == 0:
        dr -= 1
    return dr


@njit
def _gcd_nb(a, b, p):
    a = a.copy()
    b = b.copy()
    da = _degree_nb(a)
    db = _degree_nb(b)
    while db >= 0:
        da = _rem_inplace_nb(a, da, b, db, p)
        a, b = b, a
        da, db = db, da
    if da < 0:
        return np.zeros(0, dtype=np.int64)
    inv = _modpow_nb(a[da], p - 2, p)
    out = np.empty(da + 1, dtype=np.int64)
    for i in range(da + 1):
        out[i] = a[i] * inv % p
    return out


@njit
def _resultant_nb(a, b, p):
    a = a.copy()
    b = b.copy()
    da = _degree_nb(a)
    db = _degree_nb(b)
    if da < 0 or db < 0:
        return 0
    res = 1
    while db > 0:
        lc = b[db]
        dr = _rem_inplace_nb(a, da, b, db, p)
        if dr < 0:
            return 0
        if (da * db) % 2 == 1:
            res = (p - res) % p
        res = res * _modpow_nb(lc, da - dr, p) % p
        a, b = b, a
        da, db = db, dr
    return res * _modpow_nb(b[0], da, p) % p


@njit
def _inverse_nb(a, f, p):
    # extended Euclid on (f, a) tracking only the cofactor of a
    d = f.shape[0] - 1
    r0 = f.copy()
    r1 = np.zeros(d + 1, dtype=np.int64)
    r1[:d] = a
    s0 = np.zeros(d + 1, dtype=np.int64)
    s1 = np.zeros(d + 1, dtype=np.int64)
    s1[0] = 1
    d0 = d
    d1 = _degree_nb(r1)
    ok = True
    if d1 < 0:
        ok = False
    while ok and d1 > 0:
        inv = _modpow_nb(r1[d1], p - 2, p)
        # one full division step r0 = qt*r1 + rem, s0 -= qt*s1
        qt = np.zeros(d + 1, dtype=np.int64)
        for k in range(d0, d1 - 1, -1):
            c = r0[k] * inv % p
            if c == 0:
                continue
            qt[k - d1] = c
            for j in range(d1 + 1):
                r0[k - d1 + j] = (r0[k - d1 + j] - c * r1[j]) % p
        for i in range(d + 1):
            qi = qt[i]
            if qi == 0:
                continue
            for j in range(d + 1 - i):
                s0[i + j] = (s0[i + j] - qi * s1[j]) % p
        nd = d1 - 1
        while nd >= 0 and r0[nd] == 0:
            nd -= 1
        r0, r1 = r1, r0
        s0, s1 = s1, s0
        d0, d1 = d1, nd
        if d1 < 0:
            ok = False
    out = np.zeros(d, dtype=np.int64)
    if not ok:
        return False, out
    inv = _modpow_nb(r1[0], p - 2, p)
    for i in range(d):
        out[i] = s1[i] * inv % p
    return True, out


# ---------------------------------------------------------------- numpy path


def _degree_np(a):
    nz = np.flatnonzero(a)
    return int(nz[-1]) if nz.size else -1


def reduction_matrix(f, p):
    """Rows ``x^(d+i) mod f`` for ``i < d - 1``; used by the numpy multiply."""
    d = f.shape[0] - 1
    rows = np.zeros((max(d - 1, 0), d), dtype=np.int64)
    cur = np.zeros(d, dtype=np.int64)
    if d == 0:
        return rows
    # x^d = -f[:d]
    cur[:] = (-f[:d]) % p
    for i in range(d - 1):
        rows[i] = cur
        top = cur[d - 1]
        cur = np.roll(cur, 1)
        cur[0] = 0
        cur = (cur - top * f[:d]) % p
    return rows


def _mulmod_np(a, b, f, p, red):
    d = f.shape[0] - 1
    prod = np.convolve(a, b) % p
    low = prod[:d]
    high = prod[d:]
    if high.size:
        low = low + high @ red
    return low % p


def _frob_apply_np(h, frob, p):
    return (h @ frob) % p


def _rem_np(r, b, p):
    db = _degree_np(b)
    inv = pow(int(b[db]), p - 2, p)
    r = r.copy()
    for k in range(_degree_np(r), db - 1, -1):
        c = int(r[k]) * inv % p
        if c:
            r[k - db:k + 1] = (r[k - db:k + 1] - c * b[:db + 1]) % p
    return r


def _gcd_np(a, b, p):
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    while _degree_np(b) >= 0:
        a, b = b, _rem_np(a, b, p)
    da = _degree_np(a)
    if da < 0:
        return np.zeros(0, dtype=np.int64)
    return a[:da + 1] * pow(int(a[da]), p - 2, p) % p


def _resultant_np(a, b, p):
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    da, db = _degree_np(a), _degree_np(b)
    if da < 0 or db < 0:
        return 0
    res = 1
    while db > 0:
        r = _rem_np(a, b, p)
        dr = _degree_np(r)
        if dr < 0:
            return 0
        if (da * db) % 2:
            res = (-res) % p
        res = res * pow(int(b[db]), da - dr, p) % p
        a, b, da, db = b, r, db, dr
    return res * pow(int(b[0]), da, p) % p


def _inverse_np(a, f, p):
    d = f.shape[0] - 1
    r0, r1 = f.astype(np.int64), np.concatenate([np.asarray(a, dtype=np.int64) % p, [0]])
    s0, s1 = np.zeros(d + 1, dtype=np.int64), np.zeros(d + 1, dtype=np.int64)
    s1[0] = 1
    while True:
        d1 = _degree_np(r1)
        if d1 < 0:
            return False, np.zeros(d, dtype=np.int64)
        if d1 == 0:
            inv = pow(int(r1[0]), p - 2, p)
            return True, s1[:d] * inv % p
        inv = pow(int(r1[d1]), p - 2, p)
        qt = np.zeros(d + 1, dtype=np.int64)
        r0 = r0.copy()
        for k in range(_degree_np(r0), d1 - 1, -1):
            c = int(r0[k]) * inv % p
            if c:
                qt[k - d1] = c
                r0[k - d1:k + 1] = (r0[k - d1:k + 1] - c * r1[:d1 + 1]) % p
        s0 = (s0 - np.convolve(qt, s1)[:d + 1]) % p
        r0, r1 = r1, r0
        s0, s1 = s1, s0


# ------------------------------------------------------------ public wrappers


def as_residues(coeffs, p, length=None):
    arr = np.asarray([int(c) % p for c in coeffs], dtype=np.int64)
    if length is not None and arr.size < length:
        arr = np.concatenate([arr, np.zeros(length - arr.size, dtype=np.int64)])
    return arr


def gcd(a, b, p):
    """Monic gcd of two residue arrays (empty array for gcd(0, 0))."""
    check_prime_range(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _gcd_nb(a, b, p)
    return _gcd_np(a, b, p)


def resultant(a, b, p):
    """Res(a, b) mod p for residue arrays, via the Euclidean recursion."""
    check_prime_range(p)
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if _accel.USE_NUMBA:
        return int(_resultant_nb(a, b, p))
    return int(_resultant_np(a, b, p))


class PolyModRing:
    """Arithmetic in Z_p[x]/<f> for a monic ``f``.

    Elements are length-``d`` int64 residue arrays. Holds the cached
    reduction and Frobenius matrices for the modulus.
    """

    def __init__(self, f, p, use_numba=None):
        check_prime_range(p)
        f = np.asarray(f, dtype=np.int64) % p
        if _degree_np(f) != f.shape[0] - 1 or f[-1] != 1:
            raise ValueError("modulus must be monic with a nonzero leading coefficient")
        if f.shape[0] < 2:
            raise ValueError("modulus must have degree >= 1")
        self.f = f
        self.p = p
        self.d = f.shape[0] - 1
        self.use_numba = _accel.USE_NUMBA if use_numba is None else (use_numba and _accel.HAVE_NUMBA)
        self._red = None
        self._frob = None

    @property
    def red(self):
        if self._red is None:
            self._red = reduction_matrix(self.f, self.p)
        return self._red

    def zero(self):
        return np.zeros(self.d, dtype=np.int64)

    def one(self):
        e = self.zero()
        e[0] = 1
        return e

    def x(self):
        e = self.zero()
        if self.d == 1:
            e[0] = (-self.f[0]) % self.p
        else:
            e[1] = 1
        return e

    def mul(self, a, b):
        if self.use_numba:
            return _mulmod_nb(a, b, self.f, self.p)
        return _mulmod_np(a, b, self.f, self.p, self.red)

    def pow(self, a, e):
        result = self.one()
        base = a
        while e > 0:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius_matrix(self):
        """Row ``i`` is ``x^(p*i) mod f``; ``h^p = h @ Q`` over Z_p."""
        if self._frob is None:
            xp = self.pow(self.x(), self.p)
            rows = np.zeros((self.d, self.d), dtype=np.int64)
            cur = self.one()
            for i in range(self.d):
                rows[i] = cur
                cur = self.mul(cur, xp)
            self._frob = rows
        return self._frob

    def frobenius(self, h):
        frob = self.frobenius_matrix()
        if self.use_numba:
            return _frob_apply_nb(h, frob, self.p)
        return _frob_apply_np(h, frob, self.p)

    def gcd_with_modulus(self, a):
        b = np.concatenate([a, [0]]).astype(np.int64)
        if self.use_numba:
            return _gcd_nb(self.f, b, self.p)
        return _gcd_np(self.f, b, self.p)

    def inverse(self, a):
        """Return ``(ok, a^-1)``; ``ok`` is False when ``a`` shares a factor with ``f``."""
        a = np.asarray(a, dtype=np.int64)
        if self.use_numba:
            ok, inv = _inverse_nb(a, self.f, self.p)
        else:
            ok, inv = _inverse_np(a, self.f, self.p)
        return bool(ok), inv
