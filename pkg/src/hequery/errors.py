"""Exception and warning types shared across the package."""


class HeQueryError(Exception):
    """Base class for all package errors."""


class InvalidParams(HeQueryError, ValueError):
    pass


class EmptyPublicKey(HeQueryError):
    pass


class NoiseOverflowWarning(UserWarning):
    """Tracked noise may have crossed the decryption threshold.

    The ciphertext is still produced; decryption is no longer guaranteed.
    """


class NonInvertibleExhausted(HeQueryError):
    pass


class ZeroInverse(HeQueryError, ZeroDivisionError):
    pass


class SquareDiscriminant(HeQueryError):
    pass


class SearchExhausted(HeQueryError):
    pass


class EncodingError(HeQueryError, ValueError):
    """Base for record / counter / integer encoding failures."""


class WidthOverflow(EncodingError):
    pass


class CounterOverflow(EncodingError):
    pass


class IntegerOverflow(EncodingError):
    pass


class KeyContextMismatch(HeQueryError):
    pass


class FieldTooSmall(HeQueryError):
    pass


class DegreeTooSmall(HeQueryError):
    pass


class NotFound(HeQueryError):
    """The membership pre-check reported that the query is absent."""


class UnsupportedOperation(HeQueryError):
    pass
