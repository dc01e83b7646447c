"""Shared helpers: seeded random algebra elements and hypothesis strategies."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from aldyn.matrices import Mat
from aldyn.poly import GeneratorSet, Poly
from aldyn.scalars import GaussRational, Scalar


def random_gauss(rng: random.Random, span: int = 4) -> GaussRational:
    return GaussRational.of(
        Fraction(rng.randint(-span, span), rng.randint(1, 3)),
        Fraction(rng.randint(-span, span), rng.randint(1, 3)),
    )


def random_poly(
    gens: GeneratorSet,
    rng: random.Random,
    degree: int = 3,
    terms: int = 4,
    theta_max: int = 0,
) -> Poly:
    out = Poly.zero(gens)
    for _ in range(terms):
        exps = [0] * len(gens)
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(len(gens))] += 1
        coeff = Scalar.from_gauss(random_gauss(rng), rng.randint(0, theta_max))
        out = out + Poly(gens, {tuple(exps): coeff})
    return out


def random_mat(rng: random.Random, n: int, span: int = 3) -> Mat:
    return Mat(
        [[random_gauss(rng, span) for _ in range(n)] for _ in range(n)]
    )


def random_hermitian(rng: random.Random, n: int, span: int = 3) -> Mat:
    m = random_mat(rng, n, span)
    return m + m.conjugate_transpose()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


# -- hypothesis strategies -------------------------------------------------

small_fractions = st.fractions(
    min_value=Fraction(-4), max_value=Fraction(4), max_denominator=3
)


def gauss_rationals():
    return st.builds(GaussRational.of, small_fractions, small_fractions)


def scalars(theta_max: int = 2):
    return st.builds(
        lambda items: Scalar(
            {k: c for k, c in items}
        ),
        st.lists(
            st.tuples(st.integers(min_value=0, max_value=theta_max), gauss_rationals()),
            max_size=3,
        ),
    )


def polys(gens: GeneratorSet, degree: int = 3, max_terms: int = 4, theta_max: int = 1):
    exp_strategy = st.lists(
        st.integers(min_value=0, max_value=degree),
        min_size=len(gens),
        max_size=len(gens),
    ).filter(lambda e: sum(e) <= degree)

    def build(items):
        out = Poly.zero(gens)
        for exps, coeff in items:
            out = out + Poly(gens, {tuple(exps): coeff})
        return out

    return st.builds(
        build,
        st.lists(st.tuples(exp_strategy, scalars(theta_max)), max_size=max_terms),
    )
