"""Exact dyadic numbers, dyadic boxes and the bit-level wire encodings.

Bit strings are plain ``str`` objects over the characters ``"0"`` and ``"1"``.
The dyadic code interleaves payload bits with marker bits: every payload bit
except the last one of each block is followed by ``1``, the integer block is
closed by a ``0`` (the comma) and arbitrary trailing zeros are ignored.
See ``docs/encoding.md`` for the full grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

BitString = str
Rational = Union[int, Fraction, "Dyadic"]

__all__ = [
    "BitString",
    "Box",
    "Dyadic",
    "EncodingError",
    "as_fraction",
    "ceil_log2",
    "decode_dyadic",
    "decode_int",
    "decode_nat",
    "decode_vector",
    "dyadic_arith",
    "encode_dyadic",
    "encode_int",
    "encode_nat",
    "encode_vector",
    "encoded_dyadic_length",
    "format_literal",
    "pair",
    "pair_length",
    "parse_literal",
    "unary",
    "unpair",
]


class EncodingError(ValueError):
    """Raised when a bit string is outside the range of a decoder."""


class Dyadic:
    """The number ``numerator / 2**exponent`` kept in canonical form.

    Canonical means the numerator is odd or the exponent is zero, so equal
    values have equal fields.
    """

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0) -> None:
        numerator = int(numerator)
        exponent = int(exponent)
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        elif exponent:
            shift = min((numerator & -numerator).bit_length() - 1, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def coerce(cls, value: Rational) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not dyadic")
            return cls(value.numerator, den.bit_length() - 1)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def round(cls, value: Rational, precision: int) -> "Dyadic":
        """Nearest multiple of ``2**-precision`` (ties away from zero)."""
        q = as_fraction(value) * (Fraction(2) ** precision)
        sign = -1 if q < 0 else 1
        q = abs(q)
        whole, rest = divmod(q.numerator, q.denominator)
        if 2 * rest >= q.denominator:
            whole += 1
        return cls(sign * whole, precision)

    @classmethod
    def floor(cls, value: Rational, precision: int) -> "Dyadic":
        q = as_fraction(value) * (Fraction(2) ** precision)
        return cls(q.numerator // q.denominator, precision)

    @classmethod
    def ceil(cls, value: Rational, precision: int) -> "Dyadic":
        q = as_fraction(value) * (Fraction(2) ** precision)
        return cls(-((-q.numerator) // q.denominator), precision)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __bool__(self) -> bool:
        return self.numerator != 0

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __repr__(self) -> str:
        return f"Dyadic({format_literal(self)})"

    def __str__(self) -> str:
        return format_literal(self)

    def _binary(self, other, op):
        if isinstance(other, Dyadic):
            return op(self, other)
        if isinstance(other, int):
            return op(self, Dyadic(other))
        if isinstance(other, Fraction):
            return NotImplemented
        return NotImplemented

    def __add__(self, other):
        def op(a, b):
            e = max(a.exponent, b.exponent)
            return Dyadic((a.numerator << (e - a.exponent)) + (b.numerator << (e - b.exponent)), e)

        if isinstance(other, Fraction):
            return self.to_fraction() + other
        return self._binary(other, op)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.numerator, self.exponent)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.numerator), self.exponent)

    def __sub__(self, other):
        if isinstance(other, Fraction):
            return self.to_fraction() - other
        if isinstance(other, (Dyadic, int)):
            return self + (-Dyadic.coerce(other))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Fraction):
            return other - self.to_fraction()
        if isinstance(other, int):
            return Dyadic(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Fraction):
            return self.to_fraction() * other
        return self._binary(
            other, lambda a, b: Dyadic(a.numerator * b.numerator, a.exponent + b.exponent)
        )

    __rmul__ = __mul__

    def scale(self, power: int) -> "Dyadic":
        """Multiply by ``2**power``."""
        return Dyadic(self.numerator, self.exponent - power)

    def _cmp_key(self, other) -> tuple[Fraction, Fraction]:
        return self.to_fraction(), as_fraction(other)

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.numerator == other.numerator and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a >= b


def as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Dyadic):
        return value.to_fraction()
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def ceil_log2(value: Rational) -> int:
    """Least integer ``k`` with ``2**k >= value`` for ``value > 0``."""
    x = as_fraction(value)
    if x <= 0:
        raise ValueError("ceil_log2 needs a positive argument")
    k = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** k < x:
        k += 1
    while Fraction(2) ** (k - 1) >= x:
        k -= 1
    return k


@dataclass(frozen=True)
class Box:
    """Axis-parallel box ``[lower, upper]`` with dyadic corners."""

    lower: tuple[Dyadic, ...]
    upper: tuple[Dyadic, ...]

    def __post_init__(self) -> None:
        lower = tuple(Dyadic.coerce(v) for v in self.lower)
        upper = tuple(Dyadic.coerce(v) for v in self.upper)
        if len(lower) != len(upper):
            raise ValueError("corner dimensions differ")
        if any(a > b for a, b in zip(lower, upper)):
            raise ValueError("lower corner exceeds upper corner")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_corners(cls, a: Sequence[Rational], b: Sequence[Rational]) -> "Box":
        """Smallest box containing both corners, in any order."""
        a = [Dyadic.coerce(v) for v in a]
        b = [Dyadic.coerce(v) for v in b]
        return cls(tuple(min(x, y) for x, y in zip(a, b)), tuple(max(x, y) for x, y in zip(a, b)))

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def volume(self) -> Dyadic:
        vol = Dyadic(1)
        for a, b in zip(self.lower, self.upper):
            vol = vol * (b - a)
        return vol

    def intervals(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return tuple((a.to_fraction(), b.to_fraction()) for a, b in zip(self.lower, self.upper))

    def diameter(self) -> Dyadic:
        """Side length in the supremum norm."""
        return max((b - a for a, b in zip(self.lower, self.upper)), default=Dyadic(0))


# -- natural numbers and integers -------------------------------------------------


def _check_bits(a: BitString) -> None:
    if any(ch not in "01" for ch in a):
        raise EncodingError(f"not a bit string: {a!r}")


def encode_nat(n: int) -> BitString:
    if n < 1:
        raise ValueError("encode_nat needs a positive integer")
    return format(n, "b")


def decode_nat(a: BitString) -> int:
    _check_bits(a)
    stripped = a.lstrip("0")
    if not stripped:
        raise EncodingError("no positive value")
    return int(stripped, 2)


def encode_int(z: int) -> BitString:
    """Sign bit (1 positive, 0 negative) followed by the binary magnitude.

    Zero is encoded by the lone sign bit ``"0"``.
    """
    if z == 0:
        return "0"
    return ("1" if z > 0 else "0") + format(abs(z), "b")


def decode_int(a: BitString) -> int:
    _check_bits(a)
    if not a:
        raise EncodingError("empty integer code")
    magnitude = a[1:].lstrip("0")
    if not magnitude:
        return 0
    value = int(magnitude, 2)
    return value if a[0] == "1" else -value


# -- dyadic numbers ---------------------------------------------------------------


def _interleave(bits: str) -> str:
    """Follow every bit but the last with a continuation marker."""
    return "1".join(bits)


def encode_dyadic(x: Rational) -> BitString:
    x = Dyadic.coerce(x)
    if x.numerator == 0:
        return "00"
    e = x.exponent
    digits = format(abs(x.numerator), "b").rjust(e, "0")
    payload = ("1" if x.numerator > 0 else "0") + digits
    integer, fraction = payload[: len(payload) - e], payload[len(payload) - e :]
    return _interleave(integer) + "0" + _interleave(fraction)


def encoded_dyadic_length(x: Rational) -> int:
    """``len(encode_dyadic(x))`` without building the string."""
    x = Dyadic.coerce(x)
    if x.numerator == 0:
        return 2
    e = x.exponent
    width = 1 + max(abs(x.numerator).bit_length(), e)
    integer = width - e
    return 2 * integer + (2 * e - 1 if e else 0)


def decode_dyadic(c: BitString) -> Dyadic:
    _check_bits(c)
    if "1" not in c:
        return Dyadic(0)
    pos, size = 0, len(c)
    integer: list[str] = []
    while True:
        if pos + 1 >= size:
            raise EncodingError(f"missing comma in dyadic code {c!r}")
        integer.append(c[pos])
        marker = c[pos + 1]
        pos += 2
        if marker == "0":
            break
    fraction: list[str] = []
    if pos < size:
        while True:
            fraction.append(c[pos])
            pos += 1
            if pos < size and c[pos] == "1":
                pos += 1
                if pos >= size:
                    raise EncodingError(f"dangling continuation marker in {c!r}")
                continue
            break
    if "1" in c[pos:]:
        raise EncodingError(f"non-zero padding in dyadic code {c!r}")
    payload = "".join(integer) + "".join(fraction)
    magnitude = payload[1:].lstrip("0")
    value = int(magnitude, 2) if magnitude else 0
    if payload[0] == "0":
        value = -value
    return Dyadic(value, len(fraction))


# -- pairing ----------------------------------------------------------------------


def pair(a: BitString, b: BitString) -> BitString:
    """Doubled bits of ``a``, the separator ``01``, then doubled bits of ``b``."""
    _check_bits(a)
    _check_bits(b)
    return "".join(ch + ch for ch in a) + "01" + "".join(ch + ch for ch in b)


def pair_length(len_a: int, len_b: int) -> int:
    return 2 * len_a + 2 + 2 * len_b


def unpair(c: BitString) -> tuple[BitString, BitString]:
    _check_bits(c)
    if len(c) % 2:
        raise EncodingError("paired strings have even length")
    left: list[str] = []
    right: list[str] = []
    target = left
    separated = False
    for i in range(0, len(c), 2):
        chunk = c[i : i + 2]
        if chunk == "01" and not separated:
            separated = True
            target = right
        elif chunk in ("00", "11"):
            target.append(chunk[0])
        else:
            raise EncodingError(f"{c!r} is not in the range of pair")
    if not separated:
        raise EncodingError(f"{c!r} has no pair separator")
    return "".join(left), "".join(right)


def unary(n: int) -> BitString:
    return "1" * n


def encode_vector(xs: Sequence[Rational]) -> BitString:
    """Right-nested pairing of the coordinate codes; a single coordinate is not wrapped."""
    codes = [encode_dyadic(x) for x in xs]
    if not codes:
        raise ValueError("empty vector")
    out = codes[-1]
    for code in reversed(codes[:-1]):
        out = pair(code, out)
    return out


def encoded_vector_length(xs: Sequence[Rational]) -> int:
    lengths = [encoded_dyadic_length(x) for x in xs]
    out = lengths[-1]
    for length in reversed(lengths[:-1]):
        out = pair_length(length, out)
    return out


def decode_vector(c: BitString, d: int) -> tuple[Dyadic, ...]:
    coords: list[Dyadic] = []
    for _ in range(d - 1):
        head, c = unpair(c)
        coords.append(decode_dyadic(head))
    coords.append(decode_dyadic(c))
    return tuple(coords)


# -- literals and plumbing --------------------------------------------------------

_LITERAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(?:2\s*\^\s*(\d+)|(\d+)))?\s*$")


def parse_literal(text: str) -> Dyadic:
    """Parse ``"m/2^k"``, ``"m/D"`` with ``D`` a power of two, or ``"m"``."""
    match = _LITERAL.match(str(text))
    if not match:
        raise ValueError(f"bad dyadic literal {text!r}")
    numerator = int(match.group(1))
    if match.group(2) is not None:
        return Dyadic(numerator, int(match.group(2)))
    if match.group(3) is not None:
        den = int(match.group(3))
        if den < 1 or den & (den - 1):
            raise ValueError(f"denominator of {text!r} is not a power of two")
        return Dyadic(numerator, den.bit_length() - 1)
    return Dyadic(numerator)


def format_literal(x: Rational) -> str:
    x = Dyadic.coerce(x)
    return f"{x.numerator}/2^{x.exponent}"


def dyadic_arith(op: str, x: Rational, y: Rational):
    """Exact binary operation on dyadics; ``compare`` returns -1, 0 or 1."""
    a, b = Dyadic.coerce(x), Dyadic.coerce(y)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "min":
        return a if a <= b else b
    if op == "max":
        return a if a >= b else b
    if op == "compare":
        return (a > b) - (a < b)
    raise ValueError(f"unknown operation {op!r}")


def iter_bitstrings(max_length: int) -> Iterable[BitString]:
    """All bit strings of length 0..max_length in length-lexicographic order."""
    yield ""
    for length in range(1, max_length + 1):
        for value in range(1 << length):
            yield format(value, f"0{length}b")
