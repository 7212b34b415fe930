"""Encrypted equality queries over a plaintext database.

Two protocols are provided: a bitwise one over DGHV integer encryption
(:mod:`hequery.gahi`) and a Lagrange-indicator one over a ring scheme with
a finite-field plaintext (:mod:`hequery.hqp`).
"""
from .codec import Database, EncryptedSequence, PlainRecord, load_database
from .cyclotomic import FieldContext, cyclotomic_poly, discriminant, find_field_prime, search_field_primes
from .dghv import DghvParams
from .errors import *  # noqa: F401,F403
from .metering import OpCounter
from .ring import RingParams

__version__ = "0.1.0"
