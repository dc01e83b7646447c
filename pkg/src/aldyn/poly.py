"""Sparse multivariate polynomials over Q(i)[theta].

Terms are stored as a dict from exponent tuples to ``Scalar`` coefficients,
one slot per generator.  Exponents are non-negative except for angle-phase
generators (u = e^{i theta} style), which carry Laurent exponents so that
C[u, u^-1] is representable.  Values are immutable after construction and
all operations are pure.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .scalars import GaussRational, RationalLike, Scalar

GENERATOR_KINDS = ("plain", "position", "momentum", "angle-phase")


class GeneratorMismatch(ValueError):
    """Operands live over different generator sets."""


class GeneratorSet:
    """An ordered set of named generators with per-generator kinds."""

    __slots__ = ("names", "kinds", "_index")

    def __init__(self, names: Sequence[str], kinds: Sequence[str] | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        if kinds is None:
            kinds = ("plain",) * len(names)
        kinds = tuple(kinds)
        if len(kinds) != len(names):
            raise ValueError("one kind per generator required")
        for k in kinds:
            if k not in GENERATOR_KINDS:
                raise ValueError(f"unknown generator kind {k!r}")
        self.names = names
        self.kinds = kinds
        self._index = {n: i for i, n in enumerate(names)}

    @staticmethod
    def plain(names: Sequence[str]) -> "GeneratorSet":
        return GeneratorSet(names)

    @staticmethod
    def phase_space(n_pairs: int) -> "GeneratorSet":
        """Canonical (q1..qN, p1..pN) set; for N = 1 the names are q, p."""
        if n_pairs == 1:
            return GeneratorSet(("q", "p"), ("position", "momentum"))
        names = tuple(f"q{a+1}" for a in range(n_pairs)) + tuple(
            f"p{a+1}" for a in range(n_pairs)
        )
        kinds = ("position",) * n_pairs + ("momentum",) * n_pairs
        return GeneratorSet(names, kinds)

    @staticmethod
    def action_angle(n_pairs: int) -> "GeneratorSet":
        """Angle-phase generators u1..uN with action variables I1..IN."""
        if n_pairs == 1:
            return GeneratorSet(("u", "I"), ("angle-phase", "plain"))
        names = tuple(f"u{a+1}" for a in range(n_pairs)) + tuple(
            f"I{a+1}" for a in range(n_pairs)
        )
        kinds = ("angle-phase",) * n_pairs + ("plain",) * n_pairs
        return GeneratorSet(names, kinds)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def kind(self, name: str) -> str:
        return self.kinds[self.index(name)]

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratorSet):
            return NotImplemented
        return self.names == other.names and self.kinds == other.kinds

    def __hash__(self) -> int:
        return hash((self.names, self.kinds))

    def __repr__(self) -> str:
        return f"GeneratorSet({list(self.names)})"

    def extended(self, name: str, kind: str = "plain") -> "GeneratorSet":
        """A new set with one extra generator appended (used for flow time)."""
        if name in self:
            raise ValueError(f"generator {name!r} already present")
        return GeneratorSet(self.names + (name,), self.kinds + (kind,))

    def to_json(self) -> list:
        return [{"name": n, "kind": k} for n, k in zip(self.names, self.kinds)]

    @staticmethod
    def from_json(data) -> "GeneratorSet":
        names, kinds = [], []
        for entry in data:
            if isinstance(entry, str):
                names.append(entry)
                kinds.append("plain")
            else:
                names.append(entry["name"])
                kinds.append(entry.get("kind", "plain"))
        return GeneratorSet(names, kinds)


def _check_same_gens(a: "Poly", b: "Poly"):
    if a.gens != b.gens:
        raise GeneratorMismatch(
            f"generator sets differ: {a.gens.names} vs {b.gens.names}"
        )


def _grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


class Poly:
    """Sparse polynomial with Scalar coefficients over a GeneratorSet."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms: Mapping[tuple, Scalar] | None = None):
        self.gens = gens
        cleaned: dict[tuple, Scalar] = {}
        n = len(gens)
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != n:
                    raise ValueError("exponent vector length mismatch")
                for e, kind in zip(exps, gens.kinds):
                    if e < 0 and kind != "angle-phase":
                        raise ValueError(
                            "negative exponents allowed only for angle-phase generators"
                        )
                if not coeff.is_zero():
                    cleaned[exps] = coeff
        self.terms = cleaned

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(gens: GeneratorSet) -> "Poly":
        return Poly(gens)

    @staticmethod
    def constant(gens: GeneratorSet, c: Scalar | GaussRational | RationalLike) -> "Poly":
        if isinstance(c, (int, Fraction)):
            c = Scalar.of(c)
        elif isinstance(c, GaussRational):
            c = Scalar.from_gauss(c)
        return Poly(gens, {(0,) * len(gens): c})

    @staticmethod
    def one(gens: GeneratorSet) -> "Poly":
        return Poly.constant(gens, Scalar.one())

    @staticmethod
    def generator(gens: GeneratorSet, name: str, power: int = 1) -> "Poly":
        i = gens.index(name)
        if power < 0 and gens.kinds[i] != "angle-phase":
            raise ValueError("negative powers need an angle-phase generator")
        exps = tuple(power if j == i else 0 for j in range(len(gens)))
        return Poly(gens, {exps: Scalar.one()})

    @staticmethod
    def monomial(
        gens: GeneratorSet, powers: Mapping[str, int], coeff: Scalar | None = None
    ) -> "Poly":
        exps = [0] * len(gens)
        for name, e in powers.items():
            exps[gens.index(name)] = e
        return Poly(gens, {tuple(exps): coeff if coeff is not None else Scalar.one()})

    # -- ring operations ---------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        _check_same_gens(self, other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = s
        return Poly(self.gens, out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.gens, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        _check_same_gens(self, other)
        out: dict[tuple, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = out.get(e)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.gens, out)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative polynomial powers are not defined")
        out = Poly.one(self.gens)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c: Scalar | GaussRational | RationalLike) -> "Poly":
        if isinstance(c, (int, Fraction)):
            c = Scalar.of(c)
        elif isinstance(c, GaussRational):
            c = Scalar.from_gauss(c)
        return Poly(self.gens, {e: v * c for e, v in self.terms.items()})

    # -- calculus -----------------------------------------------------

    def partial(self, name: str) -> "Poly":
        """Formal partial derivative.

        For an angle-phase generator u the derivative is taken with respect
        to the underlying angle, u = e^{i theta}: d/dtheta (u^k) = i*k*u^k.
        """
        i = self.gens.index(name)
        angle = self.gens.kinds[i] == "angle-phase"
        out: dict[tuple, Scalar] = {}
        for exps, c in self.terms.items():
            k = exps[i]
            if k == 0:
                continue
            if angle:
                new_exps = exps
                new_c = c * Scalar.of(0, k)
            else:
                new_exps = exps[:i] + (k - 1,) + exps[i + 1 :]
                new_c = c * Scalar.of(k)
            s = out.get(new_exps)
            s = new_c if s is None else s + new_c
            if s.is_zero():
                out.pop(new_exps, None)
            else:
                out[new_exps] = s
        return Poly(self.gens, out)

    def theta_limit(self) -> "Poly":
        """Keep only the theta**0 part of every coefficient."""
        out = {}
        for exps, c in self.terms.items():
            c0 = c.theta_free_part()
            if not c0.is_zero():
                out[exps] = c0
        return Poly(self.gens, out)

    def divide_theta(self, power: int = 1) -> "Poly":
        """Exact division of every coefficient by theta**power."""
        return Poly(
            self.gens, {e: c.divide_theta(power) for e, c in self.terms.items()}
        )

    def substitute_theta(self, value: Fraction) -> "Poly":
        """Exact substitution of a rational value for theta."""
        return Poly(
            self.gens, {e: c.substitute_theta(value) for e, c in self.terms.items()}
        )

    # -- substitution and evaluation ----------------------------------

    def substitute(self, images: Mapping[str, "Poly"]) -> "Poly":
        """Compose: replace each generator by the given polynomial.

        Every generator must be mapped; all images must share one generator
        set, which becomes the result's.  Not available when the polynomial
        has negative (Laurent) exponents.
        """
        if not images:
            raise ValueError("empty substitution")
        target = next(iter(images.values())).gens
        for name in self.gens.names:
            if name not in images:
                raise ValueError(f"substitution misses generator {name!r}")
            if images[name].gens != target:
                raise GeneratorMismatch("substitution images over mixed generator sets")
        out = Poly.zero(target)
        for exps, c in self.terms.items():
            term = Poly.constant(target, c)
            for name, e in zip(self.gens.names, exps):
                if e < 0:
                    raise ValueError("cannot substitute into Laurent exponents")
                if e:
                    term = term * images[name] ** e
            out = out + term
        return out

    def evaluate_exact(self, point: Mapping[str, GaussRational]) -> GaussRational:
        """Exact evaluation at a Q(i) point; theta must not appear."""
        total = GaussRational.of(0)
        for exps, c in self.terms.items():
            v = c.constant()
            for name, e in zip(self.gens.names, exps):
                if e:
                    v = v * (point[name] ** e)
            total = total + v
        return total

    def evaluate_numeric(
        self, point: Mapping[str, complex], theta_value: complex = 0.0
    ) -> complex:
        total = complex(0)
        for exps, c in self.terms.items():
            v = c.evaluate(theta_value)
            for name, e in zip(self.gens.names, exps):
                if e:
                    v *= complex(point[name]) ** e
            total += v
        return total

    # -- queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, powers: Mapping[str, int]) -> Scalar:
        exps = [0] * len(self.gens)
        for name, e in powers.items():
            exps[self.gens.index(name)] = e
        return self.terms.get(tuple(exps), Scalar.zero())

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * len(self.gens), Scalar.zero())

    def total_degree(self) -> int:
        """Max term degree (sum of exponents); 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_theta_free(self) -> bool:
        return all(c.is_theta_free() for c in self.terms.values())

    def degree_in(self, name: str) -> int:
        i = self.gens.index(name)
        if not self.terms:
            return 0
        return max(e[i] for e in self.terms)

    def sorted_terms(self) -> list[tuple[tuple, Scalar]]:
        """Terms in graded-lexicographic order (canonical)."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def max_theta_power(self) -> int:
        return max((c.max_theta_power() for c in self.terms.values()), default=0)

    def theta_graded_part(self, k: int) -> "Poly":
        """The polynomial of theta**k coefficients (theta stripped)."""
        out = {}
        for exps, c in self.terms.items():
            g = c.theta_coefficient(k)
            if not g.is_zero():
                out[exps] = Scalar.from_gauss(g)
        return Poly(self.gens, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(
            (self.gens, tuple((e, c) for e, c in self.sorted_terms()))
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = []
            for name, e in zip(self.gens.names, exps):
                if e == 0:
                    continue
                factors.append(name if e == 1 else f"{name}^{e}")
            coeff = str(c)
            if factors and coeff == "1":
                parts.append("*".join(factors))
            elif factors:
                if "+" in coeff or coeff.count("*") > 1:
                    coeff = f"({coeff})"
                parts.append(f"{coeff}*" + "*".join(factors))
            else:
                parts.append(coeff)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"

    # -- json --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "generators": self.gens.to_json(),
            "terms": [
                {"exps": list(exps), "coeff": c.to_json()}
                for exps, c in self.sorted_terms()
            ],
        }

    @staticmethod
    def from_json(data: Mapping) -> "Poly":
        gens = GeneratorSet.from_json(data["generators"])
        terms: dict[tuple, Scalar] = {}
        for entry in data["terms"]:
            exps = tuple(int(e) for e in entry["exps"])
            c = Scalar.from_json(entry["coeff"])
            prev = terms.get(exps)
            terms[exps] = c if prev is None else prev + c
        return Poly(gens, terms)


# Shared operation-style entry points (thin wrappers over the methods, so the
# functional names used elsewhere in the package read like the math).

def poly_add(a: Poly, b: Poly) -> Poly:
    return a + b


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def partial_derivative(f: Poly, gen: str) -> Poly:
    return f.partial(gen)


def theta_limit(f: Poly) -> Poly:
    return f.theta_limit()
