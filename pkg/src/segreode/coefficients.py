"""Exact Gaussian-rational coefficients and the two scalar backends.

Every series in this package is either *exact* (coefficients in Q(i),
represented by :class:`QI`) or *float* (coefficients are Python complex).
The exact backend never rounds: all arithmetic stays in lowest terms with
positive denominators.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

_COEFF_RE = re.compile(
    r"^\s*(-?\d+(?:/\d+)?)(?:([+-])(\d+(?:/\d+)?))?(i)?\s*$"
)


class QI:
    """A Gaussian rational (a + b*i)/d with integers a, b and d > 0.

    Instances are normalized on construction: gcd(a, b, d) == 1 and d > 0.
    Values are immutable; arithmetic returns new instances.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: int, b: int = 0, d: int = 1):
        if d == 0:
            raise ZeroDivisionError("zero denominator in Gaussian rational")
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(a, b, d)
        if g > 1:
            a, b, d = a // g, b // g, d // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("QI values are immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def of(value) -> "QI":
        """Coerce an int, Fraction, or QI into a QI."""
        if isinstance(value, QI):
            return value
        if isinstance(value, int):
            return QI(value)
        if isinstance(value, Fraction):
            return QI(value.numerator, 0, value.denominator)
        raise TypeError(f"cannot coerce {type(value).__name__} to QI")

    @staticmethod
    def from_parts(re_part, im_part) -> "QI":
        fr = Fraction(re_part)
        fi = Fraction(im_part)
        den = fr.denominator * fi.denominator // math.gcd(
            fr.denominator, fi.denominator
        )
        return QI(
            fr.numerator * (den // fr.denominator),
            fi.numerator * (den // fi.denominator),
            den,
        )

    # -- queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_real(self) -> bool:
        return self.b == 0

    @property
    def real(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.b, self.d)

    def conj(self) -> "QI":
        return QI(self.a, -self.b, self.d)

    def to_complex(self) -> complex:
        return complex(float(Fraction(self.a, self.d)), float(Fraction(self.b, self.d)))

    def log_abs(self) -> float:
        """log|value|, computed from the integer parts (no float overflow)."""
        if self.is_zero:
            raise ValueError("log of zero coefficient")
        return 0.5 * (math.log(self.a * self.a + self.b * self.b)) - math.log(self.d)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QI(self.a * o.d + o.a * self.d, self.b * o.d + o.b * self.d, self.d * o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QI(self.a * o.d - o.a * self.d, self.b * o.d - o.b * self.d, self.d * o.d)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QI(
            self.a * o.a - self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.d * o.d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.a * o.a + o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QI(
            (self.a * o.a + self.b * o.b) * o.d,
            (self.b * o.a - self.a * o.b) * o.d,
            self.d * n,
        )

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __neg__(self):
        return QI(-self.a, -self.b, self.d)

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return not self.is_zero

    def __str__(self):
        return coeff_str(self)

    def __repr__(self):
        return f"QI({coeff_str(self)!r})"


def _coerce(value):
    if isinstance(value, QI):
        return value
    if isinstance(value, int):
        return QI(value)
    if isinstance(value, Fraction):
        return QI(value.numerator, 0, value.denominator)
    return NotImplemented


ZERO = QI(0)
ONE = QI(1)
I = QI(0, 1)
TWO_I = QI(0, 2)


def _rat_str(num: int, den: int) -> str:
    return str(num) if den == 1 else f"{num}/{den}"


def coeff_str(c: QI) -> str:
    """Render per the grammar COEFF := RAT | RAT SIGN RAT 'i' | RAT 'i'."""
    re_f = Fraction(c.a, c.d)
    im_f = Fraction(c.b, c.d)
    if im_f == 0:
        return _rat_str(re_f.numerator, re_f.denominator)
    im_str = _rat_str(abs(im_f.numerator), im_f.denominator) + "i"
    if re_f == 0:
        return ("-" if im_f < 0 else "") + im_str
    sign = "+" if im_f > 0 else "-"
    return _rat_str(re_f.numerator, re_f.denominator) + sign + im_str


def parse_coeff(text: str) -> QI:
    """Parse the COEFF grammar (e.g. '3/2', '-1i', '1-1/2i')."""
    m = _COEFF_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse coefficient {text!r}")
    first, sign, second, imag = m.groups()
    if sign is not None:
        if imag is None:
            raise ValueError(f"cannot parse coefficient {text!r}")
        re_f = Fraction(first)
        im_f = Fraction(second)
        if sign == "-":
            im_f = -im_f
        return QI.from_parts(re_f, im_f)
    if imag is not None:
        return QI.from_parts(0, Fraction(first))
    return QI.from_parts(Fraction(first), 0)


def coeff_to_json(c, backend: str):
    if backend == EXACT:
        return coeff_str(c)
    return [c.real, c.imag]


def coeff_from_json(obj):
    """Returns (coefficient, backend) from a JSON cell."""
    if isinstance(obj, str):
        return parse_coeff(obj), EXACT
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1])), FLOAT
    raise ValueError(f"bad coefficient JSON: {obj!r}")
