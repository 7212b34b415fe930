"""Record encodings for both plaintext spaces, and padded sequence addition.

Bits are stored little-endian everywhere. The paper-style tuple display
``(1,1,0,0)`` and the CSV/JSON ingestion format are big-endian; conversion
happens only in ``PlainRecord.from_display`` / ``display``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import CounterOverflow, EncodingError, KeyContextMismatch, WidthOverflow


@dataclass(frozen=True)
class PlainRecord:
    bits: tuple
    id: int = 0

    @classmethod
    def from_display(cls, shown, id: int = 0) -> PlainRecord:
        """Build from a big-endian bit string or tuple such as ``"1100"``."""
        if isinstance(shown, str):
            shown = shown.strip()
            if not shown or set(shown) - {"0", "1"}:
                raise EncodingError(f"not a bit string: {shown!r}")
            shown = [int(ch) for ch in shown]
        bits = tuple(int(b) for b in reversed(list(shown)))
        if any(b not in (0, 1) for b in bits):
            raise EncodingError("record bits must be 0 or 1")
        return cls(bits, id)

    @classmethod
    def from_int(cls, value: int, n_bits: int, id: int = 0) -> PlainRecord:
        if value < 0 or value >> n_bits:
            raise WidthOverflow(f"{value} does not fit in {n_bits} bits")
        return cls(tuple((value >> i) & 1 for i in range(n_bits)), id)

    @property
    def n_bits(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def display(self) -> str:
        return "".join(str(b) for b in reversed(self.bits))


@dataclass(frozen=True)
class Database:
    records: tuple
    n_bits: int

    def __post_init__(self):
        for i, r in enumerate(self.records, start=1):
            if r.n_bits != self.n_bits:
                raise WidthOverflow(f"record {r.id} has width {r.n_bits}, expected {self.n_bits}")
            if r.id != i:
                raise EncodingError(f"record ids must be 1..m in order; got {r.id} at position {i}")

    @classmethod
    def from_bitstrings(cls, rows) -> Database:
        rows = list(rows)
        if not rows:
            raise EncodingError("database is empty")
        recs = tuple(PlainRecord.from_display(r, id=i) for i, r in enumerate(rows, start=1))
        widths = {r.n_bits for r in recs}
        if len(widths) != 1:
            raise WidthOverflow(f"mixed record widths {sorted(widths)}")
        return cls(recs, widths.pop())

    @classmethod
    def from_values(cls, values, n_bits: int) -> Database:
        recs = tuple(PlainRecord.from_int(v, n_bits, id=i) for i, v in enumerate(values, start=1))
        return cls(recs, n_bits)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def values(self) -> list:
        return [r.value for r in self.records]


def load_database(path) -> Database:
    """Read a CSV (header ``id,bits``) or a JSON array of bit strings."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("["):
        rows = json.loads(text)
        if not isinstance(rows, list) or not all(isinstance(r, str) for r in rows):
            raise EncodingError("JSON database must be an array of bit strings")
        return Database.from_bitstrings(rows)
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["id", "bits"]:
        raise EncodingError("CSV database needs the header 'id,bits'")
    rows = sorted(((int(r["id"]), r["bits"].strip()) for r in reader), key=lambda x: x[0])
    if [i for i, _ in rows] != list(range(1, len(rows) + 1)):
        raise EncodingError("CSV ids must be exactly 1..m")
    return Database.from_bitstrings(b for _, b in rows)


def encode_bits(r: PlainRecord) -> list:
    return list(r.bits)


def encode_field(r: PlainRecord, ctx):
    """Bit i of the record becomes the coefficient of X^i."""
    if r.n_bits >= ctx.degree:
        raise WidthOverflow(f"{r.n_bits}-bit records need field degree > {r.n_bits}, have {ctx.degree}")
    return ctx.element(r.bits)


def decode_field(elem, n_bits: int, id: int = 0) -> PlainRecord:
    """Read a record back from a field element; raises if it is not one."""
    c = elem.coeffs
    if any(x not in (0, 1) for x in c) or any(c[n_bits:]):
        raise EncodingError("field element is not a record encoding")
    return PlainRecord(tuple(c[:n_bits]), id)


def encode_counter(j: int, ctx):
    """Counters live in the field as constant polynomials."""
    if j < 0 or j >= ctx.p:
        raise CounterOverflow(f"counter {j} outside [0, {ctx.p})")
    return ctx.constant(j)


@dataclass
class EncryptedSequence:
    entries: list
    context: str

    def __len__(self):
        return len(self.entries)

    def truncated(self, n: int) -> EncryptedSequence:
        return EncryptedSequence(self.entries[:n], self.context)


def pad_add(seqs, add, make_zero) -> EncryptedSequence:
    """Right-pad every sequence with fresh zero encryptions, then add entrywise.

    ``add(x, y)`` combines two entries; ``make_zero()`` returns a fresh
    encryption of a zero entry.
    """
    seqs = list(seqs)
    if not seqs:
        raise ValueError("nothing to add")
    ctx = seqs[0].context
    if any(s.context != ctx for s in seqs):
        raise KeyContextMismatch("sequences were encrypted under different keys")
    if len(seqs) == 1:
        return EncryptedSequence(list(seqs[0].entries), ctx)
    length = max(len(s) for s in seqs)
    padded = [list(s.entries) + [make_zero() for _ in range(length - len(s))] for s in seqs]
    out = padded[0]
    for other in padded[1:]:
        out = [add(x, y) for x, y in zip(out, other)]
    return EncryptedSequence(out, ctx)
