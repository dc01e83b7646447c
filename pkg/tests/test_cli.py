"""CLI: dispatch, exit codes, JSON round trips, determinism."""

import json

import pytest

from aldyn.cli import EXIT_BAD_INPUT, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, main
from aldyn.derivations import PolyDerivation
from aldyn.matrices import Mat
from aldyn.poly import GeneratorSet, Poly


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--json")
    return code, json.loads(out) if out else None, err


GENS = GeneratorSet.phase_space(1)


def derivation_json(images: dict) -> str:
    gens = GENS
    d = PolyDerivation(
        gens, {k: Poly.from_json(v) if isinstance(v, dict) else v for k, v in images.items()}
    )
    return json.dumps(d.to_json())


FREE_JSON = derivation_json({"q": Poly.generator(GENS, "p")})


class TestBracketCommands:
    def test_bracket(self, capsys):
        code, payload, _ = run_json(
            capsys, "bracket", "--tensor", "canonical2", "--f", "q^2", "--g", "p^2"
        )
        assert code == EXIT_OK
        assert payload["status"] == "ok"
        assert payload["result"]["text"] == "4*q*p"

    def test_jacobi_pass(self, capsys):
        code, payload, _ = run_json(capsys, "jacobi", "--tensor", "su2")
        assert code == EXIT_OK and payload["result"]["jacobi"]

    def test_jacobi_fail_exit_code(self, capsys):
        bad = {
            "dim": 3,
            "generators": [{"name": "x"}, {"name": "y"}, {"name": "z"}],
            "components": [
                {
                    "a": 0,
                    "b": 1,
                    "poly": {
                        "generators": [{"name": "x"}, {"name": "y"}, {"name": "z"}],
                        "terms": [
                            {"exps": [0, 0, 1], "coeff": [{"theta": 0, "re": "1", "im": "0"}]}
                        ],
                    },
                },
                {
                    "a": 1,
                    "b": 2,
                    "poly": {
                        "generators": [{"name": "x"}, {"name": "y"}, {"name": "z"}],
                        "terms": [
                            {"exps": [0, 1, 0], "coeff": [{"theta": 0, "re": "1", "im": "0"}]}
                        ],
                    },
                },
            ],
        }
        code, payload, _ = run_json(capsys, "jacobi", "--tensor", json.dumps(bad))
        assert code == EXIT_FAIL
        assert payload["result"]["witness"] == [0, 1, 2]

    def test_hamfield(self, capsys):
        code, payload, _ = run_json(
            capsys, "hamfield", "--tensor", "canonical2", "--h", "1/2*p^2"
        )
        assert code == EXIT_OK
        images = payload["result"]["derivation"]["images"]
        assert images["q"]["terms"] == [
            {"exps": [0, 1], "coeff": [{"theta": 0, "re": "1", "im": "0"}]}
        ]

    def test_casimir(self, capsys):
        code, payload, _ = run_json(
            capsys, "casimir", "--tensor", "su2", "--c", "x^2 + y^2 + z^2"
        )
        assert code == EXIT_OK
        code, payload, _ = run_json(capsys, "casimir", "--tensor", "su2", "--c", "x")
        assert code == EXIT_FAIL
        assert payload["result"]["witness"] == "y"


class TestStarCommands:
    def test_star(self, capsys):
        code, payload, _ = run_json(capsys, "star", "--f", "q", "--g", "p")
        assert code == EXIT_OK
        assert payload["result"]["text"] == "1/2*i*theta + q*p"

    def test_starcomm(self, capsys):
        code, payload, _ = run_json(capsys, "starcomm", "--f", "q", "--g", "p")
        assert code == EXIT_OK
        assert payload["result"]["text"] == "i*theta"

    def test_theta_substitution(self, capsys):
        code, payload, _ = run_json(
            capsys, "star", "--f", "q", "--g", "p", "--theta", "2"
        )
        assert code == EXIT_OK
        subs = payload["result"]["theta_substituted"]
        assert {"exps": [0, 0], "coeff": [{"theta": 0, "re": "0", "im": "1"}]} in subs[
            "terms"
        ]


class TestFlowCommands:
    def test_nilpotent_flow(self, capsys):
        code, payload, _ = run_json(
            capsys, "flow", "--derivation", "free", "--f", "q", "--t", "2"
        )
        assert code == EXIT_OK
        assert payload["result"]["text"] == "2*p + q"

    def test_linear_flow(self, capsys):
        code, payload, _ = run_json(
            capsys,
            "flow",
            "--derivation",
            "oscillator",
            "--f",
            "q",
            "--t",
            "1",
            "--mode",
            "linear",
        )
        assert code == EXIT_OK
        assert payload["result"]["mode"] == "linear"

    def test_linear_needs_t(self, capsys):
        code, _, err = run_cli(
            capsys, "flow", "--derivation", "oscillator", "--f", "q"
        )
        assert code == EXIT_BAD_INPUT
        assert "t" in err

    def test_nilpotency(self, capsys):
        code, payload, _ = run_json(capsys, "nilpotency", "--derivation", "free")
        assert code == EXIT_OK and payload["result"]["order"] == 2
        code, payload, _ = run_json(capsys, "nilpotency", "--derivation", "oscillator")
        assert code == EXIT_OK and payload["result"]["order"] == "not nilpotent within 16"


class TestQuantumCommands:
    def test_evolve(self, capsys):
        h = json.dumps(Mat.from_rows([[0, 1], [1, 0]]).to_json())
        a = json.dumps(Mat.from_rows([[1, 0], [0, -1]]).to_json())
        code, payload, _ = run_json(
            capsys, "evolve", "--h", h, "--a", a, "--t", "0.25"
        )
        assert code == EXIT_OK
        assert payload["result"]["matrix"]["n"] == 2

    def test_commutant(self, capsys):
        space = json.dumps(
            [Mat.basis_elt(2, i, j).to_json() for i in range(2) for j in range(2)]
        )
        code, payload, _ = run_json(capsys, "commutant", "--subspace", space)
        assert code == EXIT_OK
        assert payload["result"]["dimension"] == 1

    def test_invariance_exit_codes(self, capsys):
        block = json.dumps(
            [Mat.basis_elt(4, i, j).to_json() for i in range(2) for j in range(2)]
        )
        good = json.dumps(Mat.diag([1, 2, 3, 4]).to_json())
        code, _, _ = run_json(capsys, "invariance", "--h", good, "--subspace", block)
        assert code == EXIT_OK
        bad = json.dumps((Mat.diag([1, 2, 3, 4]) + Mat.basis_elt(4, 0, 3)).to_json())
        code, payload, _ = run_json(capsys, "invariance", "--h", bad, "--subspace", block)
        assert code == EXIT_FAIL
        assert not payload["result"]["invariant"]

    def test_blocksplit(self, capsys):
        h = json.dumps(Mat.diag([1, 2, 3]).to_json())
        code, payload, _ = run_json(capsys, "blocksplit", "--h", h, "--k", "1")
        assert code == EXIT_OK
        assert payload["result"]["commute"] and payload["result"]["resums"]

    def test_biderivation(self, capsys):
        code, payload, _ = run_json(capsys, "biderivation", "--n", "2")
        assert code == EXIT_OK
        assert payload["result"]["dimension"] == 1
        assert payload["result"]["spanned_by_commutator"]


class TestReductionCommands:
    def test_reduce_free_along_dq(self, capsys):
        gens = GENS
        dq = PolyDerivation(gens, {"q": Poly.one(gens)})
        payload_in = {
            "dynamics": json.loads(FREE_JSON),
            "distribution": [dq.to_json()],
            "degree_cap": 2,
        }
        code, payload, _ = run_json(capsys, "reduce", "--input", json.dumps(payload_in))
        assert code == EXIT_OK
        assert payload["result"]["normalizer"] == "member"
        assert payload["result"]["invariant_basis_text"] == ["1", "p", "p^2"]
        assert payload["result"]["split"]["case"] == "constants-of-motion"

    def test_reduce_non_member_fails(self, capsys):
        dp = PolyDerivation(GENS, {"p": Poly.one(GENS)})
        payload_in = {
            "dynamics": json.loads(FREE_JSON),
            "distribution": [dp.to_json()],
        }
        code, payload, _ = run_json(capsys, "reduce", "--input", json.dumps(payload_in))
        assert code == EXIT_FAIL
        assert payload["result"]["normalizer"] == "non-member"

    def test_frelate(self, capsys):
        code, payload, _ = run_json(
            capsys, "frelate", "--dynamics", "euler", "--map", "q*p"
        )
        assert code == EXIT_OK
        assert payload["result"]["reducible"]

    def test_frelate_inconclusive(self, capsys):
        code, payload, _ = run_json(
            capsys, "frelate", "--dynamics", "free", "--map", "q"
        )
        assert code == EXIT_INCONCLUSIVE

    def test_connection_found_and_missing(self, capsys):
        dq = PolyDerivation(GENS, {"q": Poly.one(GENS)})
        code, payload, _ = run_json(
            capsys, "connection", "--distribution", json.dumps([dq.to_json()])
        )
        assert code == EXIT_OK and payload["result"]["found"]
        qdq = PolyDerivation(GENS, {"q": Poly.generator(GENS, "q")})
        code, payload, _ = run_json(
            capsys, "connection", "--distribution", json.dumps([qdq.to_json()])
        )
        assert code == EXIT_INCONCLUSIVE


class TestFormCommands:
    def form_json(self):
        from aldyn.diffcalc import DerivationBasis, KForm

        basis = DerivationBasis.gell_mann(2)
        return json.dumps(KForm.dual_form(basis, 0).to_json())

    def test_dform(self, capsys):
        code, payload, _ = run_json(capsys, "dform", "--form", self.form_json())
        assert code == EXIT_OK
        assert payload["result"]["form"]["degree"] == 2

    def test_wedge(self, capsys):
        code, payload, _ = run_json(
            capsys, "wedge", "--form1", self.form_json(), "--form2", self.form_json()
        )
        assert code == EXIT_OK

    def test_contract(self, capsys):
        code, payload, _ = run_json(
            capsys, "contract", "--x", "1,0,0", "--form", self.form_json()
        )
        assert code == EXIT_OK
        assert payload["result"]["form"]["degree"] == 0

    def test_lieder(self, capsys):
        code, payload, _ = run_json(
            capsys, "lieder", "--x", "0,1,0", "--form", self.form_json()
        )
        assert code == EXIT_OK


class TestEnvironment:
    def test_degree_cap_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("ALDYN_DEGREE_CAP", "0")
        code, _, _ = run_json(capsys, "frelate", "--dynamics", "euler", "--map", "q*p")
        assert code == EXIT_INCONCLUSIVE  # cap 0 cannot express g(x) = 2x
        monkeypatch.delenv("ALDYN_DEGREE_CAP")
        code, _, _ = run_json(capsys, "frelate", "--dynamics", "euler", "--map", "q*p")
        assert code == EXIT_OK


class TestErrorHandling:
    def test_parse_error_is_bad_input(self, capsys):
        code, _, err = run_cli(
            capsys, "bracket", "--tensor", "canonical2", "--f", "q^", "--g", "p"
        )
        assert code == EXIT_BAD_INPUT
        assert "input error" in err

    def test_malformed_json_is_bad_input(self, capsys):
        code, _, err = run_cli(capsys, "jacobi", "--tensor", "{not json")
        assert code == EXIT_BAD_INPUT
        assert "/tensor" in err

    def test_schema_violation_reports_path(self, capsys):
        code, _, err = run_cli(capsys, "evolve", "--h", '{"n": 2}', "--a", '{"n": 2}', "--t", "1")
        assert code == EXIT_BAD_INPUT
        assert "/h" in err


class TestDeterminism:
    @pytest.mark.parametrize(
        "name",
        ["free", "oscillator", "action-angle", "s-space", "wigner", "maurer-cartan"],
    )
    def test_demo_payloads_are_byte_identical(self, capsys, name):
        code1, out1, _ = run_cli(capsys, "demo", name, "--json")
        code2, out2, _ = run_cli(capsys, "demo", name, "--json")
        assert code1 == code2 == EXIT_OK
        assert out1 == out2

    def test_round_trip_poly_payload(self, capsys):
        _, payload, _ = run_json(
            capsys, "star", "--f", "q^2", "--g", "p^2"
        )
        again = Poly.from_json(payload["result"]["poly"])
        assert again.to_json() == payload["result"]["poly"]
