"""Exact scalars: rationals and Gaussian rationals, plus float fallbacks.

Structural identities are checked with ``int``/``Fraction``/``GaussianRational``
coefficients; evaluation at arbitrary complex points drops to ``complex``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class GaussianRational:
    """A number ``re + im*i`` with rational ``re`` and ``im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, Rational):
            return GaussianRational(other, 0)
        return None

    def simplify(self):
        """Return a plain ``Fraction`` (or ``int``) when the imaginary part vanishes."""
        if self.im == 0:
            return self.re.numerator if self.re.denominator == 1 else self.re
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return GaussianRational(self.re + o.re, self.im + o.im).simplify()

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return GaussianRational(self.re - o.re, self.im - o.im).simplify()

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        ).simplify()

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        ).simplify()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return 1 / (self ** (-n))
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = GaussianRational._coerce(result * base)
            base = GaussianRational._coerce(base * base)
            n >>= 1
        return result.simplify()

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussianRational(0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (Rational, GaussianRational))


def exact(x):
    """Convert an exactly representable number to an exact scalar.

    Floats and complex floats are converted through ``Fraction`` so that
    binary-exact inputs such as ``0.5`` or ``2+1j`` stay exact.
    """
    if isinstance(x, GaussianRational):
        return x.simplify()
    if isinstance(x, Rational):
        return x
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, complex):
        return GaussianRational(Fraction(x.real), Fraction(x.imag)).simplify()
    raise TypeError(f"cannot convert {x!r} to an exact scalar")


def numeric(x) -> complex:
    return complex(x)


def binomial(n: int, k: int):
    """Generalized binomial coefficient ``n(n-1)...(n-k+1)/k!`` for integer ``n``."""
    if k < 0:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= n - i
        den *= i + 1
    return num // den
