"""Blind equality search over bitwise DGHV encryption.

Server-side steps for a query ``v`` (encrypted bit by bit) and a plaintext
database:

* match indicator ``I_t = prod_i (1 + c_i + v_i)``: Enc(1) iff record t equals v;
* partial sums ``S_r = sum_{t<=r} I_t`` as encrypted binary numbers, built
  with a ripple-carry adder because a plain ciphertext sum only keeps parity;
* position indicators ``I'_{r,j} = I_r prod_i (1 + j_i + S_{r,i})`` for j <= r;
* result ``R' = sum_k R_k (I'_k)`` with zero padding, plus the match count
  ``n = sum_r I_r`` that the user decrypts so the server can truncate R'.

By default server-known values (record bits, the counter j) enter as
plaintext constants; ``strict=True`` encrypts them under the user's key.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import dghv
from .circuits import tree_product
from .codec import Database, EncryptedSequence, PlainRecord, pad_add
from .dghv import BitCiphertext, DghvParams, as_rng
from .errors import WidthOverflow
from .metering import OpCounter, phase_of


def key_fingerprint(pk: dghv.DghvPublicKey) -> str:
    h = hashlib.sha256()
    for z in pk.zeros:
        h.update(format(z, "x").encode() + b",")
    return h.hexdigest()[:16]


class DghvBackend:
    """Evaluation context holding only public material (params + public key).

    Every primitive is reported to ``counter`` when one is attached.
    """

    def __init__(self, params: DghvParams, pk: dghv.DghvPublicKey, rng=None,
                 counter: OpCounter | None = None):
        self.params = params
        self.pk = pk
        self.rng = as_rng(rng)
        self.counter = counter
        self.context = key_fingerprint(pk)

    def _tick(self, op):
        if self.counter is not None:
            self.counter.record(op)

    def phase(self, name):
        return phase_of(self.counter, name)

    def encrypt(self, bit: int) -> BitCiphertext:
        self._tick("enc")
        return dghv.encrypt_pub(bit, self.pk, self.params, self.rng)

    def zero(self) -> BitCiphertext:
        return self.encrypt(0)

    def add(self, a, b):
        self._tick("add")
        return dghv.hom_add(a, b, self.params)

    def mul(self, a, b):
        self._tick("mul")
        return dghv.hom_mul(a, b, self.params)

    def add_plain(self, a, b: int):
        self._tick("plain_add")
        return dghv.add_plain(a, b, self.params)

    def mul_plain(self, a, b: int):
        self._tick("plain_mul")
        return dghv.mul_plain(a, b, self.params)


class BoundOnlyBackend(DghvBackend):
    """Propagates worst-case noise bounds without any key.

    Ciphertexts carry the plaintext as ``value`` and the bound of a fresh
    public encryption with the whole public set, so running a protocol on
    this backend yields the largest bound the real run could track.
    """

    def __init__(self, params: DghvParams, counter: OpCounter | None = None):
        self.params = params
        self.pk = None
        self.rng = None
        self.counter = counter
        self.context = "noise-sim"
        self.max_bound = 0

    def _seen(self, c):
        self.max_bound = max(self.max_bound, c.noise_bound)
        return c

    def encrypt(self, bit):
        self._tick("enc")
        return self._seen(BitCiphertext(bit, self.params.pubkey_size * self.params.zero_noise_bound + 1))

    def add(self, a, b):
        self._tick("add")
        return self._seen(dghv.hom_add(a, b))

    def mul(self, a, b):
        self._tick("mul")
        return self._seen(dghv.hom_mul(a, b))

    def add_plain(self, a, b):
        self._tick("plain_add")
        return self._seen(dghv.add_plain(a, b))

    def mul_plain(self, a, b):
        self._tick("plain_mul")
        # worst case over bits: scaling by 0 would only shrink the bound
        return self._seen(BitCiphertext(a.value * b, a.noise_bound * max(abs(b), 1)))


class GahiClient:
    """The user side: owns the secret key, encrypts queries, decrypts results."""

    def __init__(self, params: DghvParams, rng=None, keys=None):
        self.params = params
        self.rng = as_rng(rng)
        self.sk, self.pk = keys if keys is not None else dghv.keygen(params, self.rng)

    def backend(self, counter: OpCounter | None = None, rng=None) -> DghvBackend:
        return DghvBackend(self.params, self.pk, rng if rng is not None else self.rng, counter)

    def encrypt_bits(self, bits) -> list:
        return [dghv.encrypt_pub(b, self.pk, self.params, self.rng) for b in bits]

    def encrypt_record(self, record: PlainRecord) -> list:
        return self.encrypt_bits(record.bits)

    def decrypt_bits(self, cts) -> list:
        return [dghv.decrypt(c, self.sk) for c in cts]

    def decrypt_number(self, cts) -> int:
        return sum(b << i for i, b in enumerate(self.decrypt_bits(cts)))

    def decrypt_sequence(self, seq: EncryptedSequence) -> list:
        return [PlainRecord(tuple(self.decrypt_bits(e))) for e in seq.entries]

    def budget(self, c: BitCiphertext) -> float:
        return dghv.noise_budget(c, self.sk)


@dataclass
class GahiTrace:
    I: list
    S: list
    Iprime: list
    count: list
    result: EncryptedSequence | None = None
    extra: dict = field(default_factory=dict)

    def ciphertexts(self):
        """Every ciphertext the session produced (for noise audits)."""
        yield from self.I
        for s in self.S:
            yield from s
        for seq in self.Iprime:
            yield from seq
        yield from self.count
        if self.result is not None:
            for e in self.result.entries:
                yield from e


def _check_width(query, db: Database):
    if len(query) != db.n_bits:
        raise WidthOverflow(f"query has {len(query)} bits, records have {db.n_bits}")


def match_indicator(query, record: PlainRecord, be: DghvBackend, strict: bool = False) -> BitCiphertext:
    """I_t = prod_i (1 + c_i + v_i); decrypts to 1 iff every bit agrees."""
    if len(query) != record.n_bits:
        raise WidthOverflow("query and record widths differ")
    factors = []
    for v, c in zip(query, record.bits):
        if strict:
            factors.append(be.add_plain(be.add(v, be.encrypt(c)), 1))
        else:
            factors.append(be.add_plain(v, 1 + c))
    return tree_product(factors, be.mul)


def indicators(db: Database, query, be: DghvBackend, strict: bool = False) -> list:
    _check_width(query, db)
    with be.phase("indicators"):
        return [match_indicator(query, r, be, strict) for r in db]


def counter_width(m: int) -> int:
    """Bits needed to hold any count 0..m."""
    return max(m.bit_length(), 1)


def partial_sums(I, be: DghvBackend) -> list:
    """S_r as little-endian encrypted bit vectors.

    S_r has ``min(r, counter_width(m))`` bits: a sum of r indicator bits
    never needs more.
    """
    if not I:
        raise ValueError("no indicators")
    width = counter_width(len(I))
    with be.phase("partial_sums"):
        S = [[I[0]]]
        for r in range(1, len(I)):
            S.append(dghv.hom_binary_add(S[-1], [I[r]], width=width, ops=be))
    return S


def position_indicators(I_r, S_r, r: int, be: DghvBackend, strict: bool = False) -> list:
    """I'_{r,j} for j = 1..r: Enc(1) exactly when I_r = 1 and S_r = j."""
    out = []
    for j in range(1, r + 1):
        factors = [I_r]
        for i, s in enumerate(S_r):
            bit = (j >> i) & 1
            if strict:
                factors.append(be.add_plain(be.add(s, be.encrypt(bit)), 1))
            else:
                factors.append(be.add_plain(s, 1 + bit))
        if j >> len(S_r):
            raise ValueError(f"counter {j} does not fit in {len(S_r)} bits")
        out.append(tree_product(factors, be.mul))
    return out


def all_position_indicators(I, S, be: DghvBackend, strict: bool = False) -> list:
    with be.phase("position_indicators"):
        return [position_indicators(I[r], S[r], r + 1, be, strict) for r in range(len(I))]


def gather(db: Database, Iprime, be: DghvBackend, strict: bool = False) -> EncryptedSequence:
    """R' = sum_k R_k (I'_k), padding shorter sequences with fresh Enc(0) records."""
    with be.phase("gather"):
        seqs = []
        for rec, seq in zip(db, Iprime):
            if strict:
                enc_bits = [be.encrypt(b) for b in rec.bits]
                entries = [[be.mul(ind, eb) for eb in enc_bits] for ind in seq]
            else:
                entries = [[be.mul_plain(ind, b) for b in rec.bits] for ind in seq]
            seqs.append(EncryptedSequence(entries, be.context))
        return pad_add(seqs,
                       add=lambda x, y: [be.add(a, b) for a, b in zip(x, y)],
                       make_zero=lambda: [be.zero() for _ in range(db.n_bits)])


def match_count(I, be: DghvBackend) -> list:
    """n = sum_r I_r as an encrypted binary number."""
    width = counter_width(len(I))
    with be.phase("count"):
        acc = [I[0]]
        for c in I[1:]:
            acc = dghv.hom_binary_add(acc, [c], width=width, ops=be)
    return acc


def evaluate(db: Database, query, be: DghvBackend, strict: bool = False) -> GahiTrace:
    """Run every server step and return the full trace (untruncated R')."""
    if len(db) == 0:
        return GahiTrace(I=[], S=[], Iprime=[], count=[], result=EncryptedSequence([], be.context))
    I = indicators(db, query, be, strict)
    S = partial_sums(I, be)
    Iprime = all_position_indicators(I, S, be, strict)
    result = gather(db, Iprime, be, strict)
    count = match_count(I, be)
    return GahiTrace(I=I, S=S, Iprime=Iprime, count=count, result=result)


def run_select(db: Database, query, be: DghvBackend, reveal_count, strict: bool = False):
    """Two-round session: the server evaluates, the user reveals the count, the server truncates.

    ``reveal_count`` receives the encrypted count (a bit vector) and
    returns the integer the user decrypted.
    """
    trace = evaluate(db, query, be, strict)
    n = int(reveal_count(trace.count))
    trace.extra["revealed_count"] = n
    return trace.result.truncated(n), trace


def update(db: Database, I, new_record, be: DghvBackend) -> list:
    """R_new = (1 + I_r) R + I_r U per record, bitwise; ``new_record`` is encrypted."""
    if len(new_record) != db.n_bits:
        raise WidthOverflow("replacement record has the wrong width")
    out = []
    with be.phase("update"):
        for rec, ind in zip(db, I):
            keep = be.add_plain(ind, 1)
            out.append([be.add(be.mul_plain(keep, b), be.mul(ind, u))
                        for b, u in zip(rec.bits, new_record)])
    return out


def delete(db: Database, I, be: DghvBackend) -> list:
    """R_new = (1 + I_r) R per record, bitwise."""
    out = []
    with be.phase("update"):
        for rec, ind in zip(db, I):
            keep = be.add_plain(ind, 1)
            out.append([be.mul_plain(keep, b) for b in rec.bits])
    return out


def plaintext_select(db: Database, query_bits) -> list:
    """Reference: matching records in database order."""
    q = tuple(query_bits)
    return [r for r in db if r.bits == q]


def advise_params(m: int, n_bits: int, lam: int = 4, pubkey_size: int = 8,
                  strict: bool = False, margin_bits: int = 4) -> DghvParams:
    """Smallest secret size P that keeps every tracked bound of a full session safe.

    Runs select, count and update on a worst-case database with the
    bound-only backend, then sizes P from the largest bound seen.
    """
    probe = DghvParams(noise_bits=lam, secret_bits=lam + 1, rand_bits=lam + 2, pubkey_size=pubkey_size)
    be = BoundOnlyBackend(probe)
    db = Database.from_values([(1 << n_bits) - 1] * m, n_bits)
    query = [be.encrypt(1) for _ in range(n_bits)]
    trace = evaluate(db, query, be, strict)
    update(db, trace.I, [be.encrypt(1) for _ in range(n_bits)], be)
    delete(db, trace.I, be)
    P = max(dghv.min_secret_bits(be.max_bound) + margin_bits, lam ** 2)
    Q = max(lam ** 5, P + lam)
    return DghvParams(noise_bits=lam, secret_bits=P, rand_bits=Q, pubkey_size=pubkey_size, lam=lam)


def transcript(trace: GahiTrace, client: GahiClient | None = None, returned=None) -> dict:
    """JSON-ready session record; decrypted columns only when a client key is given."""
    out = {"scheme": "gahi", "records": len(trace.I),
           "revealed_count": trace.extra.get("revealed_count")}
    if client is not None:
        out["I"] = client.decrypt_bits(trace.I)
        out["S"] = [client.decrypt_number(s) for s in trace.S]
        out["Iprime"] = [client.decrypt_bits(seq) for seq in trace.Iprime]
        out["count"] = client.decrypt_number(trace.count)
        if returned is not None:
            out["result"] = [r.display() for r in client.decrypt_sequence(returned)]
        out["min_noise_budget"] = round(min(client.budget(c) for c in trace.ciphertexts()), 3)
    return out
