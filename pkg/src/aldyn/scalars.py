"""Exact coefficient arithmetic: Gaussian rationals and theta-graded scalars.

A ``GaussRational`` is an element of Q(i): a complex number with rational
real and imaginary parts.  A ``Scalar`` is a polynomial in the central
deformation symbol ``theta`` with GaussRational coefficients, i.e. an
element of Q(i)[theta].  Both are immutable; all arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

RationalLike = Union[int, Fraction]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def fraction_to_str(x: Fraction) -> str:
    """Serialize a Fraction as "p" or "p/q"."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fraction_from_str(s: str) -> Fraction:
    """Parse "p" or "p/q" (also accepts plain ints for convenience)."""
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


@dataclass(frozen=True)
class GaussRational:
    """An exact complex rational a + b*i with a, b in Q."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _as_fraction(self.re))
        object.__setattr__(self, "im", _as_fraction(self.im))

    # -- constructors ------------------------------------------------

    @staticmethod
    def of(re: RationalLike, im: RationalLike = 0) -> "GaussRational":
        return GaussRational(_as_fraction(re), _as_fraction(im))

    @staticmethod
    def from_complex(z: complex) -> "GaussRational":
        """Exact embedding of a float complex (floats are dyadic rationals)."""
        return GaussRational(Fraction(float(z.real)), Fraction(float(z.imag)))

    # -- arithmetic --------------------------------------------------

    def __add__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussRational") -> "GaussRational":
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussRational")
        return GaussRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def scale(self, r: RationalLike) -> "GaussRational":
        r = _as_fraction(r)
        return GaussRational(self.re * r, self.im * r)

    def __pow__(self, k: int) -> "GaussRational":
        if k < 0:
            return GR_ONE / (self ** (-k))
        out = GR_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return fraction_to_str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{fraction_to_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({fraction_to_str(self.re)}{sign}{fraction_to_str(abs(self.im))}*i)"

    # -- json --------------------------------------------------------

    def to_json(self) -> dict:
        return {"re": fraction_to_str(self.re), "im": fraction_to_str(self.im)}

    @staticmethod
    def from_json(data: Mapping) -> "GaussRational":
        return GaussRational(fraction_from_str(data["re"]), fraction_from_str(data["im"]))


GR_ZERO = GaussRational()
GR_ONE = GaussRational(Fraction(1))
GR_I = GaussRational(Fraction(0), Fraction(1))


class Scalar:
    """Element of Q(i)[theta]: a map theta-exponent -> GaussRational.

    Zero coefficients are never stored; theta-exponents are non-negative.
    Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, GaussRational] | None = None):
        cleaned = {}
        if terms:
            for k, c in terms.items():
                if k < 0:
                    raise ValueError("theta-exponent must be non-negative")
                if not c.is_zero():
                    cleaned[int(k)] = c
        self.terms: dict[int, GaussRational] = cleaned

    # -- constructors ------------------------------------------------

    @staticmethod
    def of(re: RationalLike, im: RationalLike = 0, theta_power: int = 0) -> "Scalar":
        return Scalar({theta_power: GaussRational.of(re, im)})

    @staticmethod
    def from_gauss(c: GaussRational, theta_power: int = 0) -> "Scalar":
        return Scalar({theta_power: c})

    @staticmethod
    def zero() -> "Scalar":
        return Scalar()

    @staticmethod
    def one() -> "Scalar":
        return Scalar({0: GR_ONE})

    @staticmethod
    def i() -> "Scalar":
        return Scalar({0: GR_I})

    @staticmethod
    def theta(power: int = 1) -> "Scalar":
        return Scalar({power: GR_ONE})

    # -- arithmetic --------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, GR_ZERO) + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return Scalar(out)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __neg__(self) -> "Scalar":
        return Scalar({k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "Scalar") -> "Scalar":
        out: dict[int, GaussRational] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 + k2
                s = out.get(k, GR_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return Scalar(out)

    def scale(self, c: GaussRational) -> "Scalar":
        return Scalar({k: v * c for k, v in self.terms.items()})

    def divide_theta(self, power: int = 1) -> "Scalar":
        """Exact division by theta**power; raises if not divisible."""
        out = {}
        for k, c in self.terms.items():
            if k < power:
                raise ValueError("scalar is not divisible by theta**%d" % power)
            out[k - power] = c
        return Scalar(out)

    # -- queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def theta_coefficient(self, power: int) -> GaussRational:
        return self.terms.get(power, GR_ZERO)

    def theta_free_part(self) -> "Scalar":
        """The theta**0 term only (the theta -> 0 limit)."""
        c = self.terms.get(0)
        return Scalar({0: c}) if c is not None else Scalar()

    def max_theta_power(self) -> int:
        return max(self.terms) if self.terms else 0

    def is_theta_free(self) -> bool:
        return all(k == 0 for k in self.terms)

    def constant(self) -> GaussRational:
        """The theta**0 coefficient; raises if other powers are present."""
        if not self.is_theta_free():
            raise ValueError("scalar has theta-dependence")
        return self.terms.get(0, GR_ZERO)

    def evaluate(self, theta_value: complex) -> complex:
        return sum(
            (c.to_complex() * theta_value**k for k, c in self.terms.items()),
            start=complex(0),
        )

    def substitute_theta(self, value: Fraction) -> "Scalar":
        """Exact substitution theta -> rational value; result is theta-free."""
        total = GaussRational()
        for k, c in self.terms.items():
            total = total + c.scale(value**k)
        return Scalar({0: total})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            c = str(self.terms[k])
            if k == 0:
                parts.append(c)
                continue
            power = "theta" if k == 1 else f"theta^{k}"
            if c == "1":
                parts.append(power)
            elif c == "-1":
                parts.append(f"-{power}")
            else:
                parts.append(f"{c}*{power}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Scalar({self})"

    # -- json --------------------------------------------------------

    def to_json(self) -> list:
        return [
            {"theta": k, **self.terms[k].to_json()}
            for k in sorted(self.terms)
        ]

    @staticmethod
    def from_json(data) -> "Scalar":
        terms = {}
        for entry in data:
            c = GaussRational.from_json(entry)
            k = int(entry.get("theta", 0))
            if not c.is_zero():
                terms[k] = terms.get(k, GR_ZERO) + c
        return Scalar(terms)
