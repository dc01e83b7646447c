"""Command-line front end: every operation behind a subcommand with JSON I/O.

Exit codes: 0 for ok, 1 for a mathematical failure (a check that did not
hold), 2 for malformed input, 3 for an inconclusive ansatz.  With --json
the payload is canonical (sorted keys, fixed separators) and runs are
byte-for-byte reproducible; wall time is only ever printed in text mode.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import linalg
from .demos import DEMOS
from .derivations import (
    PolyDerivation,
    apply,
    flow_linear,
    flow_nilpotent,
    nilpotency_order,
)
from .diffcalc import KForm, contract, exterior_d, lie_derivative, wedge
from .matrices import Mat
from .moyal import StarAlgebraContext, star, star_commutator
from .parsing import ParseError, parse_poly
from .poisson import (
    LieAlgebra3d,
    PoissonTensor,
    bracket,
    casimir_check,
    hamiltonian_field,
    jacobi_check,
    lie_poisson,
)
from .poly import GeneratorSet, Poly
from .quantum import (
    MatrixSubspace,
    biderivation_solver,
    block_split,
    commutant,
    commutator,
    commutator_bracket_vector,
    evolve,
    heisenberg_derivative,
    invariance_check,
)
from .reduction import (
    ConnectionP,
    Distribution,
    PolyMap,
    connection_apply,
    f_related_reduce,
    find_connection,
    invariant_subalgebra,
    invariance_of_subalgebra,
    normalizer_check,
    split_dynamics,
)
from .scalars import GaussRational, Scalar

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BAD_INPUT = 2
EXIT_INCONCLUSIVE = 3


class InputError(ValueError):
    """Malformed input (bad JSON, schema violation, parse error)."""


def _load_json_arg(text: str, path: str):
    raw = text
    if text.startswith("@"):
        try:
            with open(text[1:], "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as e:
            raise InputError(f"{path}: cannot read file: {e}") from e
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from e


def _decode(path: str, fn, *args):
    try:
        return fn(*args)
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"{path}: {e}") from e


TENSOR_PRESETS = {
    "canonical2": lambda: PoissonTensor.canonical(1),
    "canonical4": lambda: PoissonTensor.canonical(2),
    "canonical6": lambda: PoissonTensor.canonical(3),
    "su2": lambda: lie_poisson(LieAlgebra3d.su2()),
    "heisenberg": lambda: lie_poisson(LieAlgebra3d.heisenberg()),
    "abelian": lambda: lie_poisson(LieAlgebra3d.abelian()),
}


def _load_tensor(spec: str) -> PoissonTensor:
    if spec in TENSOR_PRESETS:
        return TENSOR_PRESETS[spec]()
    data = _load_json_arg(spec, "/tensor")
    if "c" in data:
        return _decode("/tensor", lambda d: lie_poisson(LieAlgebra3d.from_json(d)), data)
    return _decode("/tensor", PoissonTensor.from_json, data)


def _phase_space_derivation(images: dict[str, str]) -> PolyDerivation:
    gens = GeneratorSet.phase_space(1)
    return PolyDerivation(
        gens, {k: parse_poly(v, gens) for k, v in images.items()}
    )


DERIVATION_PRESETS = {
    "free": lambda: _phase_space_derivation({"q": "p"}),
    "oscillator": lambda: _phase_space_derivation({"q": "p", "p": "-q"}),
    "euler": lambda: _phase_space_derivation({"q": "q", "p": "p"}),
    "rotation": lambda: _phase_space_derivation({"q": "-p", "p": "q"}),
}


def _load_derivation(spec: str, path: str = "/derivation") -> PolyDerivation:
    if spec in DERIVATION_PRESETS:
        return DERIVATION_PRESETS[spec]()
    data = _load_json_arg(spec, path)
    return _decode(path, PolyDerivation.from_json, data)


def _parse_expr(text: str, gens: GeneratorSet, path: str) -> Poly:
    try:
        return parse_poly(text, gens)
    except ParseError as e:
        raise InputError(f"{path}: {e}") from e


def _poly_float_json(p: Poly, theta: float = 0.0) -> dict:
    terms = []
    for exps, c in p.sorted_terms():
        z = c.evaluate(theta)
        terms.append({"exps": list(exps), "re": z.real, "im": z.imag})
    return {"generators": list(p.gens.names), "terms": terms}


def _matrix_float_json(arr: np.ndarray) -> dict:
    return {
        "n": int(arr.shape[0]),
        "entries": [
            [{"re": float(z.real), "im": float(z.imag)} for z in row] for row in arr
        ],
    }


class Report:
    def __init__(self, status: str, result: dict, verification=None, lines=None):
        self.status = status
        self.result = result
        self.verification = list(verification or [])
        self.lines = list(lines or [])

    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[
            self.status
        ]


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def cmd_bracket(args) -> Report:
    tensor = _load_tensor(args.tensor)
    f = _parse_expr(args.f, tensor.gens, "/f")
    g = _parse_expr(args.g, tensor.gens, "/g")
    r = bracket(tensor, f, g)
    anti = bracket(tensor, g, f) == -r
    result = {"poly": r.to_json(), "text": str(r)}
    if args.theta is not None:
        result["theta_substituted"] = r.substitute_theta(
            Fraction(args.theta)
        ).to_json()
    return Report(
        "ok" if anti else "fail",
        result,
        [f"antisymmetry re-check: {'pass' if anti else 'fail'}"],
        [f"{{f, g}} = {r}"],
    )


def cmd_jacobi(args) -> Report:
    tensor = _load_tensor(args.tensor)
    rep = jacobi_check(tensor)
    if rep.ok:
        return Report("ok", {"jacobi": True}, ["cyclic sum vanished on all triples"],
                      ["Jacobi identity holds"])
    return Report(
        "fail",
        {
            "jacobi": False,
            "witness": list(rep.witness),
            "residual": rep.residual.to_json(),
        },
        [f"witness triple {rep.witness}, residual {rep.residual}"],
        [f"Jacobi fails on triple {rep.witness}: residual {rep.residual}"],
    )


def cmd_hamfield(args) -> Report:
    tensor = _load_tensor(args.tensor)
    h = _parse_expr(args.h, tensor.gens, "/h")
    d = hamiltonian_field(tensor, h)
    probe = Poly.one(tensor.gens)
    for name in tensor.gens.names:
        probe = probe * (Poly.generator(tensor.gens, name) + Poly.one(tensor.gens))
    ok = apply(d, probe) == bracket(tensor, probe, h)
    return Report(
        "ok" if ok else "fail",
        {"derivation": d.to_json()},
        [f"apply(result, f) = {{f, H}} on a probe: {'pass' if ok else 'fail'}"],
        [f"Hamiltonian field: {d}"],
    )


def cmd_star(args) -> Report:
    ctx = StarAlgebraContext.canonical(args.pairs)
    f = _parse_expr(args.f, ctx.gens, "/f")
    g = _parse_expr(args.g, ctx.gens, "/g")
    r = star(ctx, f, g)
    limit_ok = r.theta_limit() == (f * g).theta_limit()
    result = {"poly": r.to_json(), "text": str(r)}
    if args.theta is not None:
        result["theta_substituted"] = r.substitute_theta(Fraction(args.theta)).to_json()
    return Report(
        "ok" if limit_ok else "fail",
        result,
        [f"theta -> 0 limit equals the pointwise product: {'pass' if limit_ok else 'fail'}"],
        [f"f * g = {r}"],
    )


def cmd_starcomm(args) -> Report:
    ctx = StarAlgebraContext.canonical(args.pairs)
    f = _parse_expr(args.f, ctx.gens, "/f")
    g = _parse_expr(args.g, ctx.gens, "/g")
    r = star_commutator(ctx, f, g)
    anti = star_commutator(ctx, g, f) == -r
    leading_ok = True
    if f.is_theta_free() and g.is_theta_free():
        pb = bracket(ctx.poisson_tensor(), f, g)
        leading_ok = r.theta_graded_part(1) == pb.scale(Scalar.i()).theta_graded_part(0)
    result = {"poly": r.to_json(), "text": str(r)}
    if args.theta is not None:
        result["theta_substituted"] = r.substitute_theta(Fraction(args.theta)).to_json()
    ok = anti and leading_ok
    return Report(
        "ok" if ok else "fail",
        result,
        [
            f"antisymmetry re-check: {'pass' if anti else 'fail'}",
            f"theta^1 coefficient is i{{f,g}}: {'pass' if leading_ok else 'fail'}",
        ],
        [f"[f, g]_theta = {r}"],
    )


def cmd_flow(args) -> Report:
    d = _load_derivation(args.derivation)
    f = _parse_expr(args.f, d.gens, "/f")
    mode = args.mode
    if mode == "auto":
        mode = "nilpotent" if nilpotency_order(d) is not None and all(
            img.total_degree() <= 1 for img in d.images.values()
        ) else "linear"
    if mode == "nilpotent":
        flow = flow_nilpotent(d, f)
        if args.t is not None:
            images = {n: Poly.generator(d.gens, n) for n in d.gens.names}
            images["t"] = Poly.constant(d.gens, Scalar.of(Fraction(args.t)))
            flow = flow.substitute(images)
        at_zero_ok = True
        if args.t is None:
            images0 = {n: Poly.generator(d.gens, n) for n in d.gens.names}
            images0["t"] = Poly.zero(d.gens)
            at_zero_ok = flow.substitute(images0) == f
        return Report(
            "ok" if at_zero_ok else "fail",
            {"mode": "nilpotent", "poly": flow.to_json(), "text": str(flow)},
            [f"flow at t = 0 returns the observable: {'pass' if at_zero_ok else 'fail'}"],
            [f"e^(t d) f = {flow}"],
        )
    if args.t is None:
        raise InputError("/t: linear flow needs a numeric --t")
    t = float(Fraction(args.t))
    flow = flow_linear(d, t, f)
    return Report(
        "ok",
        {"mode": "linear", "t": t, "poly_float": _poly_float_json(flow)},
        ["matrix exponential evaluated by eigendecomposition"],
        [f"e^(t d) f has {len(flow.terms)} terms at t = {t}"],
    )


def cmd_nilpotency(args) -> Report:
    d = _load_derivation(args.derivation)
    order = nilpotency_order(d, args.cutoff)
    payload = {
        "cutoff": args.cutoff,
        "order": order if order is not None else f"not nilpotent within {args.cutoff}",
    }
    line = (
        f"nilpotent of order {order}"
        if order is not None
        else f"not nilpotent within cutoff {args.cutoff}"
    )
    return Report("ok", payload, [], [line])


def cmd_evolve(args) -> Report:
    h = _decode("/h", Mat.from_json, _load_json_arg(args.h, "/h"))
    a = _decode("/a", Mat.from_json, _load_json_arg(args.a, "/a"))
    t = args.t
    result = evolve(a, h, t)
    # finite-difference check of the Heisenberg equation at t = 0
    dt = 1e-6
    fd = (evolve(a, h, dt) - evolve(a, h, -dt)) / (2 * dt)
    expected = heisenberg_derivative(a, h).to_numpy()
    fd_err = float(np.max(np.abs(fd - expected)))
    norm_err = abs(
        float(np.linalg.norm(result)) - float(np.linalg.norm(a.to_numpy()))
    )
    ok = fd_err < 1e-8 and norm_err < args.tol
    return Report(
        "ok" if ok else "fail",
        {"matrix": _matrix_float_json(result), "t": t},
        [
            f"finite-difference Heisenberg derivative error {fd_err:.2e} (< 1e-8)",
            f"Frobenius norm drift {norm_err:.2e} (< tol)",
        ],
        [f"evolved {a.n}x{a.n} observable to t = {t}"],
    )


def cmd_commutant(args) -> Report:
    space = _decode(
        "/subspace", MatrixSubspace.from_json, _load_json_arg(args.subspace, "/subspace")
    )
    result = commutant(space)
    closed = result.is_product_closed() and result.is_commutator_closed()
    return Report(
        "ok" if closed else "fail",
        {"dimension": result.dimension(), "basis": result.to_json()},
        [f"commutant closed under product and commutator: {'pass' if closed else 'fail'}"],
        [f"commutant dimension: {result.dimension()}"],
    )


def cmd_invariance(args) -> Report:
    h = _decode("/h", Mat.from_json, _load_json_arg(args.h, "/h"))
    space = _decode(
        "/subspace", MatrixSubspace.from_json, _load_json_arg(args.subspace, "/subspace")
    )
    rep = invariance_check(h, space)
    if rep.ok:
        return Report("ok", {"invariant": True}, [], ["ad_H preserves the subspace"])
    return Report(
        "fail",
        {"invariant": False, "witness": rep.witness.to_json()},
        ["witness basis element leaves the span under ad_H"],
        ["ad_H does not preserve the subspace"],
    )


def cmd_blocksplit(args) -> Report:
    h = _decode("/h", Mat.from_json, _load_json_arg(args.h, "/h"))
    du, df = block_split(h, args.k)
    probe = Mat.from_rows(
        [
            [Fraction((i * 5 + j * 7) % 4 - 1) for j in range(h.n)]
            for i in range(h.n)
        ]
    )
    resummed = (du(probe) + df(probe)) == commutator(probe, h)
    commuting = du.commutes_with(df)
    ok = resummed and commuting
    return Report(
        "ok" if ok else "fail",
        {
            "generator_top": du.x.to_json(),
            "generator_bottom": df.x.to_json(),
            "resums": resummed,
            "commute": commuting,
        },
        [
            f"split re-sums to ad_H on a probe: {'pass' if resummed else 'fail'}",
            f"parts commute exactly: {'pass' if commuting else 'fail'}",
        ],
        ["split ad_H into commuting block derivations"],
    )


def cmd_biderivation(args) -> Report:
    sols = biderivation_solver(args.n)
    cvec = commutator_bracket_vector(args.n)
    in_span = False
    if len(sols) == 1:
        keys = sorted(set(sols[0]) | set(cvec))
        from .scalars import GR_ZERO

        rows = [[sols[0].get(k, GR_ZERO), cvec.get(k, GR_ZERO)] for k in keys]
        in_span = linalg.rank(rows) == 1
    return Report(
        "ok",
        {"n": args.n, "dimension": len(sols), "spanned_by_commutator": in_span},
        [f"solution space dimension {len(sols)}"],
        [
            f"bilinear Leibniz brackets on Mat_{args.n}: dimension {len(sols)}, "
            + ("spanned by the commutator" if in_span else "see payload"),
        ],
    )


def cmd_reduce(args) -> Report:
    data = _load_json_arg(args.input, "/input")
    if "dynamics" not in data or "distribution" not in data:
        raise InputError("/input: needs 'dynamics' and 'distribution'")
    delta = _decode("/input/dynamics", PolyDerivation.from_json, data["dynamics"])
    fields = [
        _decode(f"/input/distribution/{i}", PolyDerivation.from_json, d)
        for i, d in enumerate(data["distribution"])
    ]
    dist = _decode("/input/distribution", Distribution, fields)
    cap = int(data.get("degree_cap", args.degree_cap))
    connection = None
    if data.get("connection"):
        forms = []
        for j, form in enumerate(data["connection"]):
            forms.append(
                {
                    name: _decode(f"/input/connection/{j}/{name}", Poly.from_json, pj)
                    for name, pj in form.items()
                }
            )
        connection = _decode("/input/connection", ConnectionP, dist, forms)
    basis = invariant_subalgebra(dist, cap)
    norm = normalizer_check(delta, dist, args.ansatz_cap)
    payload = {
        "invariant_basis": [b.to_json() for b in basis],
        "invariant_basis_text": [str(b) for b in basis],
        "normalizer": norm.status,
    }
    lines = [
        f"invariant subalgebra basis (degree <= {cap}): "
        + ", ".join(str(b) for b in basis),
        f"normalizer membership: {norm.status}",
    ]
    notes = []
    if norm.status == "non-member":
        payload["witness"] = norm.witness
        return Report("fail", payload, notes, lines)
    if norm.status == "inconclusive":
        return Report("inconclusive", payload, notes, lines)
    split = split_dynamics(delta, dist, connection, args.ansatz_cap)
    if split.status != "ok":
        payload["split"] = {"status": split.status, "note": split.note}
        lines.append(f"split: {split.note}")
        return Report("inconclusive", payload, notes, lines)
    inv = invariance_of_subalgebra(delta, basis, dist)
    resum = (split.delta_d + split.delta_prime) == delta
    payload["split"] = {
        "status": "ok",
        "case": split.case,
        "delta_d": split.delta_d.to_json(),
        "delta_prime": split.delta_prime.to_json(),
        "commuting": split.commuting,
    }
    payload["subalgebra_invariant_under_dynamics"] = inv.ok
    notes.extend(
        [
            f"split re-sums exactly: {'pass' if resum else 'fail'}",
            f"invariant subalgebra preserved by the dynamics: {'pass' if inv.ok else 'fail'}",
        ]
    )
    lines.append(
        f"split: delta_D = {split.delta_d}; delta' = {split.delta_prime}; "
        f"case: {split.case}"
    )
    return Report("ok" if resum and inv.ok else "fail", payload, notes, lines)


def cmd_frelate(args) -> Report:
    delta = _load_derivation(args.dynamics, "/dynamics")
    comps = [
        _parse_expr(c.strip(), delta.gens, f"/map/{i}")
        for i, c in enumerate(args.map.split(";"))
    ]
    fmap = PolyMap(comps)
    reduced = f_related_reduce(delta, fmap, args.ansatz_cap)
    if reduced is None:
        return Report(
            "inconclusive",
            {"reducible": False},
            [f"no polynomial push-forward within degree cap {args.ansatz_cap}"],
            ["not reducible within the ansatz cap"],
        )
    return Report(
        "ok",
        {"reducible": True, "reduced": reduced.to_json()},
        ["delta(F^i) expressed through the map components exactly"],
        [f"reduced dynamics: {reduced}"],
    )


def cmd_connection(args) -> Report:
    fields = [
        _decode(f"/distribution/{i}", PolyDerivation.from_json, d)
        for i, d in enumerate(_load_json_arg(args.distribution, "/distribution"))
    ]
    dist = _decode("/distribution", Distribution, fields)
    conn = find_connection(dist, args.degree_cap)
    if conn is None:
        return Report(
            "inconclusive",
            {"found": False},
            [f"no polynomial connection within degree cap {args.degree_cap}"],
            ["no polynomial connection within the degree cap"],
        )
    x_probe = dist.fields[0]
    idem = connection_apply(conn, connection_apply(conn, x_probe)) == connection_apply(
        conn, x_probe
    )
    return Report(
        "ok" if idem else "fail",
        {"found": True, "forms": conn.to_json()},
        [f"idempotence on a probe field: {'pass' if idem else 'fail'}"],
        ["found a dual family of polynomial 1-forms"],
    )


def _load_form(spec: str, path: str) -> KForm:
    return _decode(path, KForm.from_json, _load_json_arg(spec, path))


def cmd_dform(args) -> Report:
    w = _load_form(args.form, "/form")
    dw = exterior_d(w)
    dd_zero = exterior_d(dw).is_zero()
    return Report(
        "ok" if dd_zero else "fail",
        {"form": dw.to_json()},
        [f"d(d form) = 0: {'pass' if dd_zero else 'fail'}"],
        [f"exterior derivative has degree {dw.degree}"],
    )


def cmd_wedge(args) -> Report:
    w1 = _load_form(args.form1, "/form1")
    w2 = _load_form(args.form2, "/form2")
    if w1.basis.n != w2.basis.n:
        raise InputError("/form2: forms over different algebras")
    w = wedge(w1, KForm.from_json(w2.to_json(), w1.basis))
    return Report("ok", {"form": w.to_json()}, [], [f"wedge has degree {w.degree}"])


def _parse_coeff_vector(text: str, dim: int, path: str) -> list[GaussRational]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != dim:
        raise InputError(f"{path}: expected {dim} coefficients, got {len(parts)}")
    try:
        return [GaussRational.of(Fraction(p)) for p in parts]
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def cmd_contract(args) -> Report:
    w = _load_form(args.form, "/form")
    x = _parse_coeff_vector(args.x, w.basis.dim, "/x")
    r = contract(x, w)
    return Report("ok", {"form": r.to_json()}, [], [f"contraction has degree {r.degree}"])


def cmd_lieder(args) -> Report:
    w = _load_form(args.form, "/form")
    x = _parse_coeff_vector(args.x, w.basis.dim, "/x")
    r = lie_derivative(x, w)
    notes = []
    if w.degree == 0:
        # L_X A = [A, sum_j x_j X_j]
        gen = Mat.zero(w.basis.n)
        for j, c in enumerate(x):
            if not c.is_zero():
                gen = gen + w.basis.generators[j].scale(c)
        ok = r.as_matrix() == commutator(w.as_matrix(), gen)
        notes.append(f"degree-0 Lie derivative equals [A, X]: {'pass' if ok else 'fail'}")
        if not ok:
            return Report("fail", {"form": r.to_json()}, notes, [])
    return Report("ok", {"form": r.to_json()}, notes, [f"Lie derivative has degree {r.degree}"])


def cmd_casimir(args) -> Report:
    tensor = _load_tensor(args.tensor)
    c = _parse_expr(args.c, tensor.gens, "/c")
    rep = casimir_check(tensor, c)
    if rep.ok:
        return Report("ok", {"casimir": True}, [], ["brackets with all generators vanish"])
    return Report(
        "fail",
        {"casimir": False, "witness": rep.witness, "residual": rep.residual.to_json()},
        [f"witness generator {rep.witness}: bracket = {rep.residual}"],
        [f"not a Casimir: {{{rep.witness}, C}} = {rep.residual}"],
    )


def cmd_demo(args) -> Report:
    if args.name not in DEMOS:
        raise InputError(f"/name: unknown demo {args.name!r}; choose from {sorted(DEMOS)}")
    kwargs = {}
    if args.name == "free":
        kwargs = {"t": args.t, "observable": args.observable}
    elif args.name == "oscillator":
        kwargs = {"tol": args.tol}
        if args.t is not None:
            kwargs["t"] = float(Fraction(args.t))
    elif args.name == "action-angle":
        kwargs = {"action": args.action, "angle": args.theta0}
        if args.t is not None:
            kwargs["t"] = float(Fraction(args.t))
    elif args.name == "block-reduction":
        kwargs = {"tol": args.tol}
    elif args.name == "maurer-cartan":
        kwargs = {"n": args.n}
    result = DEMOS[args.name](**kwargs)
    return Report(result.status, result.payload, result.verification, result.lines)


# ---------------------------------------------------------------------------
# parser and main
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    default_cap = int(os.environ.get("ALDYN_DEGREE_CAP", "4"))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree-cap", type=int, default=default_cap)
    common.add_argument("--ansatz-cap", type=int, default=default_cap)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--theta", default=None, help="rational value substituted for theta")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="as_json", action="store_true")
    fmt.add_argument("--text", dest="as_json", action="store_false")
    common.set_defaults(as_json=False)

    parser = argparse.ArgumentParser(
        prog="aldyn",
        description="exact-arithmetic engine for algebraic dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bracket", parents=[common])
    p.add_argument("--tensor", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(fn=cmd_bracket)

    p = sub.add_parser("jacobi", parents=[common])
    p.add_argument("--tensor", required=True)
    p.set_defaults(fn=cmd_jacobi)

    p = sub.add_parser("hamfield", parents=[common])
    p.add_argument("--tensor", required=True)
    p.add_argument("--h", required=True)
    p.set_defaults(fn=cmd_hamfield)

    p = sub.add_parser("star", parents=[common])
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--pairs", type=int, default=1)
    p.set_defaults(fn=cmd_star)

    p = sub.add_parser("starcomm", parents=[common])
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--pairs", type=int, default=1)
    p.set_defaults(fn=cmd_starcomm)

    p = sub.add_parser("flow", parents=[common])
    p.add_argument("--derivation", required=True, help="preset name or derivation JSON")
    p.add_argument("--f", required=True)
    p.add_argument("--t", default=None)
    p.add_argument("--mode", choices=("auto", "nilpotent", "linear"), default="auto")
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("nilpotency", parents=[common])
    p.add_argument("--derivation", required=True)
    p.add_argument("--cutoff", type=int, default=16)
    p.set_defaults(fn=cmd_nilpotency)

    p = sub.add_parser("evolve", parents=[common])
    p.add_argument("--h", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("commutant", parents=[common])
    p.add_argument("--subspace", required=True)
    p.set_defaults(fn=cmd_commutant)

    p = sub.add_parser("invariance", parents=[common])
    p.add_argument("--h", required=True)
    p.add_argument("--subspace", required=True)
    p.set_defaults(fn=cmd_invariance)

    p = sub.add_parser("blocksplit", parents=[common])
    p.add_argument("--h", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_blocksplit)

    p = sub.add_parser("biderivation", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_biderivation)

    p = sub.add_parser("reduce", parents=[common])
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("frelate", parents=[common])
    p.add_argument("--dynamics", required=True)
    p.add_argument("--map", required=True, help="semicolon-separated component expressions")
    p.set_defaults(fn=cmd_frelate)

    p = sub.add_parser("connection", parents=[common])
    p.add_argument("--distribution", required=True)
    p.set_defaults(fn=cmd_connection)

    p = sub.add_parser("dform", parents=[common])
    p.add_argument("--form", required=True)
    p.set_defaults(fn=cmd_dform)

    p = sub.add_parser("wedge", parents=[common])
    p.add_argument("--form1", required=True)
    p.add_argument("--form2", required=True)
    p.set_defaults(fn=cmd_wedge)

    p = sub.add_parser("contract", parents=[common])
    p.add_argument("--x", required=True, help="comma-separated basis coefficients")
    p.add_argument("--form", required=True)
    p.set_defaults(fn=cmd_contract)

    p = sub.add_parser("lieder", parents=[common])
    p.add_argument("--x", required=True)
    p.add_argument("--form", required=True)
    p.set_defaults(fn=cmd_lieder)

    p = sub.add_parser("casimir", parents=[common])
    p.add_argument("--tensor", required=True)
    p.add_argument("--c", required=True)
    p.set_defaults(fn=cmd_casimir)

    p = sub.add_parser("demo", parents=[common])
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--t", default=None)
    p.add_argument("--observable", default="q")
    p.add_argument("--action", type=float, default=1.0, help="action value I")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--n", type=int, default=2)
    p.set_defaults(fn=cmd_demo)

    return parser


def _emit(report: Report, command: str, as_json: bool, elapsed_ms: float):
    payload = {
        "command": command,
        "status": report.status,
        "result": report.result,
        "verification": report.verification,
    }
    if as_json:
        sys.stdout.write(
            json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
        )
        return
    for line in report.lines:
        print(line)
    for note in report.verification:
        print(f"  [check] {note}")
    print(f"status: {report.status}  ({elapsed_ms:.1f} ms)")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report = args.fn(args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ParseError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    elapsed_ms = (time.perf_counter() - start) * 1000
    _emit(report, args.command, args.as_json, elapsed_ms)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
