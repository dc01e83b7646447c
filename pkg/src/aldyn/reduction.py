"""Reduction of a polynomial dynamics along a distribution of vector fields.

The pieces: the invariant subalgebra annihilated by the spanning fields,
normalizer membership of a dynamics (with pointwise certificates for
rejection), reduction along a polynomial map, polynomial connections dual
to the spanning fields, and the split delta = delta^D + delta' with the
commuting-decomposition verdict.

Every existence question is answered by an exact linear solve over
bounded-degree polynomial coefficients; when the ansatz fails without a
pointwise certificate the honest answer is "inconclusive", never a guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .derivations import PolyDerivation, apply, commutator_der
from .poly import GeneratorMismatch, GeneratorSet, Poly
from .scalars import GR_ONE, GR_ZERO, GaussRational, Scalar

DEFAULT_ANSATZ_CAP = 4


def _require_theta_free(*polys: Poly):
    for p in polys:
        if not p.is_theta_free():
            raise ValueError("reduction solvers require theta-free polynomials")


def _monomials(gens: GeneratorSet, cap: int) -> list[tuple]:
    n = len(gens)
    out: list[tuple] = []

    def rec(prefix, remaining, pos):
        if pos == n:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, pos + 1)

    rec([], cap, 0)
    out.sort(key=lambda e: (sum(e), e))
    return out


class Distribution:
    """A list of spanning derivations Y_j (the candidate vertical directions)."""

    __slots__ = ("gens", "fields")

    def __init__(self, fields: Sequence[PolyDerivation]):
        fields = list(fields)
        if not fields:
            raise ValueError("distribution needs at least one field")
        gens = fields[0].gens
        for f in fields:
            if f.gens != gens:
                raise GeneratorMismatch("fields over different generator sets")
            _require_theta_free(*f.images.values())
        self.gens = gens
        self.fields = fields

    @property
    def rank(self) -> int:
        return len(self.fields)

    def involutivity_report(self, ansatz_cap: int = DEFAULT_ANSATZ_CAP) -> dict:
        """Is each [Y_i, Y_j] a polynomial combination of the Y_k (up to cap)?"""
        failures = []
        for i in range(len(self.fields)):
            for j in range(i + 1, len(self.fields)):
                c = commutator_der(self.fields[i], self.fields[j])
                if express_in_fields(c, self.fields, ansatz_cap) is None:
                    failures.append((i, j))
        return {"involutive": not failures, "failures": failures}

    def to_json(self) -> list:
        return [f.to_json() for f in self.fields]

    @staticmethod
    def from_json(data) -> "Distribution":
        return Distribution([PolyDerivation.from_json(d) for d in data])


def invariant_subalgebra(
    dist: Distribution, degree_cap: int
) -> list[Poly]:
    """Basis of {f : Y_j(f) = 0 for all j} within degree <= cap.

    Exact kernel computation on the monomial coefficient space; basis
    vectors are normalized with leading coefficient one.
    """
    if degree_cap < 0:
        raise ValueError("degree cap must be >= 0")
    gens = dist.gens
    monos = _monomials(gens, degree_cap)
    rows: dict[tuple[int, tuple], list[GaussRational]] = {}

    def row_for(j_field: int, exps: tuple) -> list[GaussRational]:
        key = (j_field, exps)
        if key not in rows:
            rows[key] = [GR_ZERO] * len(monos)
        return rows[key]

    for jm, m in enumerate(monos):
        mono = Poly(gens, {m: Scalar.one()})
        for jf, y in enumerate(dist.fields):
            img = apply(y, mono)
            for exps, c in img.terms.items():
                r = row_for(jf, exps)
                r[jm] = r[jm] + c.constant()
    matrix = [rows[k] for k in sorted(rows)]
    kernel = linalg.nullspace(matrix, ncols=len(monos))
    basis = []
    for vec in kernel:
        terms = {}
        for j, c in enumerate(vec):
            if not c.is_zero():
                terms[monos[j]] = Scalar.from_gauss(c)
        basis.append(Poly(gens, terms))
    basis.sort(key=lambda p: (p.total_degree(), sorted(p.terms)))
    return basis


def express_in_fields(
    target: PolyDerivation,
    fields: Sequence[PolyDerivation],
    ansatz_cap: int,
) -> list[Poly] | None:
    """Polynomial coefficients h^k (degree <= cap) with target = h^k Y_k."""
    gens = target.gens
    _require_theta_free(*target.images.values())
    monos = _monomials(gens, ansatz_cap)
    ncols = len(fields) * len(monos)
    rows: dict[tuple[int, tuple], list[GaussRational]] = {}

    def row_for(a: int, exps: tuple) -> list[GaussRational]:
        key = (a, exps)
        if key not in rows:
            rows[key] = [GR_ZERO] * ncols
        return rows[key]

    for k, y in enumerate(fields):
        for jm, m in enumerate(monos):
            colid = k * len(monos) + jm
            for a, name in enumerate(gens.names):
                comp = y.images[name]
                if comp.is_zero():
                    continue
                prod = Poly(gens, {m: Scalar.one()}) * comp
                for exps, c in prod.terms.items():
                    r = row_for(a, exps)
                    r[colid] = r[colid] + c.constant()
    rhs_map = {}
    for a, name in enumerate(gens.names):
        for exps, c in target.images[name].terms.items():
            rhs_map[(a, exps)] = c.constant()
            row_for(a, exps)
    keys = sorted(rows)
    matrix = [rows[k] for k in keys]
    rhs = [rhs_map.get(k, GR_ZERO) for k in keys]
    sol = linalg.solve(matrix, rhs)
    if sol is None:
        return None
    out = []
    for k in range(len(fields)):
        terms = {}
        for jm, m in enumerate(monos):
            c = sol[k * len(monos) + jm]
            if not c.is_zero():
                terms[m] = Scalar.from_gauss(c)
        out.append(Poly(gens, terms))
    return out


_SAMPLE_SEEDS = (
    (1, 1, 1, 1, 1, 1, 1, 1),
    (1, 2, 3, 4, 5, 6, 7, 8),
    (2, -1, 3, -2, 5, -3, 7, -4),
    (-3, 5, -7, 11, -13, 17, -19, 23),
    (1, 0, 2, 0, 3, 0, 4, 0),
)


def _sample_points(gens: GeneratorSet) -> list[dict[str, GaussRational]]:
    points = []
    for seed in _SAMPLE_SEEDS:
        pt = {}
        for i, name in enumerate(gens.names):
            v = seed[i % len(seed)]
            if gens.kinds[i] == "angle-phase" and v == 0:
                v = 1  # Laurent exponents need invertible values
            pt[name] = GaussRational.of(Fraction(v))
        points.append(pt)
    return points


def _value_vector(delta: PolyDerivation, point: Mapping[str, GaussRational]):
    return [delta.images[n].evaluate_exact(point) for n in delta.gens.names]


@dataclass
class NormalizerReport:
    status: str  # "member" | "non-member" | "inconclusive"
    coefficients: list[list[Poly]] | None = None  # h_j^k per field j
    witness: dict | None = None

    @property
    def is_member(self) -> bool:
        return self.status == "member"


def normalizer_check(
    delta: PolyDerivation,
    dist: Distribution,
    ansatz_cap: int = DEFAULT_ANSATZ_CAP,
) -> NormalizerReport:
    """Is [delta, Y_j] in the distribution for every j?

    Membership is certified by polynomial coefficients within the ansatz
    cap; non-membership by a sample point where [delta, Y_j] leaves the
    pointwise span of the Y_k.  Anything else is inconclusive.
    """
    if delta.gens != dist.gens:
        raise GeneratorMismatch("dynamics over a different generator set")
    coeffs = []
    for j, y in enumerate(dist.fields):
        b = commutator_der(delta, y)
        sol = express_in_fields(b, dist.fields, ansatz_cap)
        if sol is not None:
            coeffs.append(sol)
            continue
        # Ansatz failed: look for a pointwise certificate.
        for point in _sample_points(dist.gens):
            span = [_value_vector(f, point) for f in dist.fields]
            target = _value_vector(b, point)
            if not linalg.in_span(span, target):
                return NormalizerReport(
                    "non-member",
                    witness={
                        "field_index": j,
                        "point": {k: str(v) for k, v in point.items()},
                    },
                )
        return NormalizerReport("inconclusive")
    return NormalizerReport("member", coefficients=coeffs)


@dataclass
class PolyMap:
    """Polynomial map F: M -> M', one component per target coordinate."""

    components: list[Poly]

    def __post_init__(self):
        if not self.components:
            raise ValueError("map needs at least one component")
        gens = self.components[0].gens
        for c in self.components:
            if c.gens != gens:
                raise GeneratorMismatch("components over different generator sets")
        _require_theta_free(*self.components)

    @property
    def gens(self) -> GeneratorSet:
        return self.components[0].gens

    def target_gens(self) -> GeneratorSet:
        return GeneratorSet.plain([f"x{i+1}" for i in range(len(self.components))])


def f_related_reduce(
    delta: PolyDerivation,
    f_map: PolyMap,
    ansatz_cap: int = DEFAULT_ANSATZ_CAP,
) -> PolyDerivation | None:
    """The pushed-forward dynamics on the image coordinates, if it exists.

    Solves delta(F^i) = g_i(F^1, ..., F^k) exactly for polynomials g_i of
    degree <= cap; returns the derivation x'^i -> g_i or None when some
    component is not expressible within the cap.
    """
    gens = delta.gens
    if f_map.gens != gens:
        raise GeneratorMismatch("map over a different generator set")
    target = f_map.target_gens()
    monos = _monomials(target, ansatz_cap)
    # Composed basis: each target monomial m' becomes prod_j (F^j)^{m'_j}.
    composed = []
    for m in monos:
        p = Poly.one(gens)
        for j, e in enumerate(m):
            if e:
                p = p * f_map.components[j] ** e
        composed.append(p)
    images = {}
    for i, fc in enumerate(f_map.components):
        g_target = apply(delta, fc)
        rows: dict[tuple, list[GaussRational]] = {}

        def row_for(exps: tuple) -> list[GaussRational]:
            if exps not in rows:
                rows[exps] = [GR_ZERO] * len(monos)
            return rows[exps]

        for jm, comp in enumerate(composed):
            for exps, c in comp.terms.items():
                r = row_for(exps)
                r[jm] = r[jm] + c.constant()
        rhs_map = {}
        for exps, c in g_target.terms.items():
            rhs_map[exps] = c.constant()
            row_for(exps)
        keys = sorted(rows)
        matrix = [rows[k] for k in keys]
        rhs = [rhs_map.get(k, GR_ZERO) for k in keys]
        sol = linalg.solve(matrix, rhs)
        if sol is None:
            return None
        terms = {}
        for jm, m in enumerate(monos):
            if not sol[jm].is_zero():
                terms[m] = Scalar.from_gauss(sol[jm])
        images[target.names[i]] = Poly(target, terms)
    return PolyDerivation(target, images)


class ConnectionP:
    """P = Y_j (x) alpha^j with the duality i_{Y_j} alpha^k = delta^k_j."""

    __slots__ = ("dist", "forms")

    def __init__(self, dist: Distribution, forms: Sequence[Mapping[str, Poly]]):
        if len(forms) != dist.rank:
            raise ValueError("one dual 1-form per spanning field required")
        gens = dist.gens
        normalized = []
        for form in forms:
            comp = {}
            for name in gens.names:
                p = form.get(name, Poly.zero(gens))
                if p.gens != gens:
                    raise GeneratorMismatch("form component over a different generator set")
                comp[name] = p
            normalized.append(comp)
        self.dist = dist
        self.forms = normalized
        for j, y in enumerate(dist.fields):
            for k in range(dist.rank):
                pairing = self._contract_with(y, k)
                expected = Poly.one(gens) if j == k else Poly.zero(gens)
                if pairing != expected:
                    raise ValueError(
                        f"duality violated: i_Y[{j}] alpha^{k} != delta"
                    )

    def _contract_with(self, x: PolyDerivation, k: int) -> Poly:
        gens = self.dist.gens
        out = Poly.zero(gens)
        for name in gens.names:
            a = self.forms[k][name]
            if a.is_zero():
                continue
            comp = x.images[name]
            if not comp.is_zero():
                out = out + a * comp
        return out

    def to_json(self) -> list:
        return [
            {name: poly.to_json() for name, poly in form.items() if not poly.is_zero()}
            for form in self.forms
        ]


def find_connection(
    dist: Distribution, degree_cap: int = DEFAULT_ANSATZ_CAP
) -> ConnectionP | None:
    """Polynomial 1-forms dual to the spanning fields, or None.

    Solves i_{Y_j} alpha^k = delta^k_j with polynomial components of
    degree <= cap, one exact linear system per form.
    """
    gens = dist.gens
    monos = _monomials(gens, degree_cap)
    forms = []
    for k in range(dist.rank):
        ncols = len(gens) * len(monos)
        rows: dict[tuple[int, tuple], list[GaussRational]] = {}

        def row_for(j_field: int, exps: tuple) -> list[GaussRational]:
            key = (j_field, exps)
            if key not in rows:
                rows[key] = [GR_ZERO] * ncols
            return rows[key]

        for a, name in enumerate(gens.names):
            for jm, m in enumerate(monos):
                colid = a * len(monos) + jm
                for jf, y in enumerate(dist.fields):
                    comp = y.images[name]
                    if comp.is_zero():
                        continue
                    prod = Poly(gens, {m: Scalar.one()}) * comp
                    for exps, c in prod.terms.items():
                        r = row_for(jf, exps)
                        r[colid] = r[colid] + c.constant()
        rhs_map = {}
        zero_exps = (0,) * len(gens)
        for jf in range(dist.rank):
            if jf == k:
                rhs_map[(jf, zero_exps)] = GR_ONE
            row_for(jf, zero_exps)
        keys = sorted(rows)
        matrix = [rows[key] for key in keys]
        rhs = [rhs_map.get(key, GR_ZERO) for key in keys]
        sol = linalg.solve(matrix, rhs)
        if sol is None:
            return None
        form = {}
        for a, name in enumerate(gens.names):
            terms = {}
            for jm, m in enumerate(monos):
                c = sol[a * len(monos) + jm]
                if not c.is_zero():
                    terms[m] = Scalar.from_gauss(c)
            form[name] = Poly(gens, terms)
        forms.append(form)
    return ConnectionP(dist, forms)


def connection_apply(conn: ConnectionP, x: PolyDerivation) -> PolyDerivation:
    """P(X) = (i_X alpha^j) Y_j; idempotent, fixes every Y_j."""
    gens = conn.dist.gens
    if x.gens != gens:
        raise GeneratorMismatch("field over a different generator set")
    images = {name: Poly.zero(gens) for name in gens.names}
    for j, y in enumerate(conn.dist.fields):
        coeff = conn._contract_with(x, j)
        if coeff.is_zero():
            continue
        for name in gens.names:
            comp = y.images[name]
            if not comp.is_zero():
                images[name] = images[name] + coeff * comp
    return PolyDerivation(gens, images)


@dataclass
class SplitResult:
    status: str  # "ok" | "inconclusive"
    delta_d: PolyDerivation | None = None
    delta_prime: PolyDerivation | None = None
    commuting: bool | None = None
    case: str | None = None  # "constants-of-motion" | "independent-motions" | "coupled"
    note: str = ""


def split_dynamics(
    delta: PolyDerivation,
    dist: Distribution,
    connection: ConnectionP | None = None,
    ansatz_cap: int = DEFAULT_ANSATZ_CAP,
) -> SplitResult:
    """delta = delta^D + delta' via a connection, with the commuting verdict.

    Requires delta in the normalizer of the distribution.  When delta is
    itself a polynomial combination of the spanning fields, P(delta) =
    delta for every admissible connection and no explicit one is needed;
    otherwise a connection is taken from the caller or searched for, and
    its absence within the cap is reported as inconclusive.
    """
    report = normalizer_check(delta, dist, ansatz_cap)
    if report.status == "non-member":
        raise ValueError("dynamics is not in the normalizer of the distribution")
    if report.status == "inconclusive":
        return SplitResult(
            status="inconclusive",
            note="normalizer membership not certified within the ansatz cap",
        )
    if connection is None:
        membership = express_in_fields(delta, dist.fields, ansatz_cap)
        if membership is not None:
            zero = PolyDerivation(delta.gens, {})
            return SplitResult(
                status="ok",
                delta_d=delta,
                delta_prime=zero,
                commuting=True,
                case="constants-of-motion",
                note="dynamics lies in the distribution; P(delta) = delta "
                "for every admissible connection",
            )
        connection = find_connection(dist, ansatz_cap)
        if connection is None:
            return SplitResult(
                status="inconclusive",
                note="no polynomial connection within the degree cap",
            )
    elif connection.dist.gens != delta.gens:
        raise GeneratorMismatch("connection over a different generator set")
    delta_d = connection_apply(connection, delta)
    delta_prime = delta - delta_d
    commuting = commutator_der(delta_d, delta_prime).is_zero()
    if delta_prime.is_zero():
        case = "constants-of-motion"
    elif commuting:
        case = "independent-motions"
    else:
        case = "coupled"
    return SplitResult(
        status="ok",
        delta_d=delta_d,
        delta_prime=delta_prime,
        commuting=commuting,
        case=case,
    )


@dataclass
class InvarianceReport:
    ok: bool
    witness: Poly | None = None


def invariance_of_subalgebra(
    delta: PolyDerivation,
    basis: Sequence[Poly],
    dist: Distribution,
) -> InvarianceReport:
    """Is delta(f) still annihilated by every Y_j, for each basis f?"""
    for f in basis:
        g = apply(delta, f)
        for y in dist.fields:
            if not apply(y, g).is_zero():
                return InvarianceReport(False, f)
    return InvarianceReport(True)
