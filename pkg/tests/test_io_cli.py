import io
import json

import numpy as np
import pytest

from ruo.attractors import build_attractor_space
from ruo.cli import main
from ruo.errors import DocumentError, EnsembleValidationError, StateValidationError
from ruo.io import (
    builtin,
    builtin_from_spec,
    cnot_matrices,
    parse_ensemble,
    parse_state,
    space_from_report,
    state_to_json,
)
from ruo.linalg import max_angle
from ruo.report import dumps, format_float
from ruo.sampling import random_density

from cnot_reference import limit_matrices

IDENTITY_DOC = '{"dim":2,"unitaries":[{"probability":1.0,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}]}'


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), text


def matrix_from(obj):
    return np.array([[complex(*z) for z in row] for row in obj])


class TestParse:
    def test_identity_document(self):
        doc = parse_ensemble(IDENTITY_DOC)
        assert doc.dim == 2
        (p, U), = doc.unitaries
        assert p == 1.0 and np.array_equal(U, np.eye(2))

    def test_shipped_cnot(self):
        from ruo.io import DATA_DIR

        doc = parse_ensemble((DATA_DIR / "cnot_pair.json").read_text())
        C1, C2 = cnot_matrices()
        assert [p for p, _ in doc.unitaries] == [0.5, 0.5]
        assert np.array_equal(doc.unitaries[0][1], C1)
        assert np.array_equal(doc.unitaries[1][1], C2)

    def test_probability_sum_message(self):
        text = ('{"dim":1,"unitaries":[{"probability":0.5,"matrix":[[[1,0]]]},'
                '{"probability":0.6,"matrix":[[[1,0]]]}]}')
        doc = parse_ensemble(text)
        with pytest.raises(EnsembleValidationError, match="probabilities sum to 1.1"):
            doc.to_ensemble()

    @pytest.mark.parametrize("text,where", [
        ('{"dim": 2,', "line 1"),
        ('{"unitaries": []}', "dim"),
        ('{"dim": 2}', "unitaries"),
        ('{"dim": 2, "unitaries": [{"matrix": []}]}', "unitaries[0].probability"),
        ('{"dim": 1, "unitaries": [{"probability": 1, "matrix": [[["1", 0]]]}]}',
         "unitaries[0].matrix[0][0][0]"),
        ('{"dim": 2, "unitaries": [{"probability": 1, "matrix": [[[1,0],[0,0]],[[0,0]]]}]}',
         "unitaries[0].matrix[1]"),
        ('{"dim": 1, "unitaries": [{"probability": 1, "matrix": [["1+0j"]]}]}',
         "unitaries[0].matrix[0][0]"),
        ('{"dim": 1, "unitaries": [{"probability": 1, "matrix": [[[1,0]]]}], "tolerances": {"foo": 1}}',
         "tolerances.foo"),
    ])
    def test_precise_errors(self, text, where):
        with pytest.raises(DocumentError) as err:
            parse_ensemble(text)
        assert err.value.where == where or err.value.where.startswith(where + ",")

    def test_multiline_json_error_location(self):
        with pytest.raises(DocumentError) as err:
            parse_ensemble('{\n  "dim": 2,\n  "unitaries": [\n}')
        assert err.value.where.startswith("line 4")

    def test_tolerances(self):
        doc = parse_ensemble(IDENTITY_DOC[:-1] + ', "tolerances": {"unit_circle": 1e-7}}')
        assert doc.tolerances == {"unit_circle": 1e-7}

    def test_round_trip(self):
        doc = builtin("diag_irrational_phase")
        again = parse_ensemble(doc.to_json())
        assert again.name == doc.name
        assert np.allclose(again.unitaries[0][1], doc.unitaries[0][1], atol=1e-15, rtol=0)
        assert again.digest() == doc.digest()

    def test_state(self, rng):
        rho = random_density(3, rng)
        assert np.allclose(parse_state(state_to_json(rho)), rho, atol=1e-14)
        with pytest.raises(StateValidationError):
            parse_state(state_to_json(2 * rho))
        with pytest.raises(DocumentError):
            parse_state('{"rho": []}')


class TestBuiltins:
    def test_cnot(self):
        doc = builtin("cnot_pair", p1=0.5)
        C1, C2 = cnot_matrices()
        assert np.array_equal(doc.unitaries[0][1], C1)
        assert doc.to_ensemble().m == 2

    def test_identity(self):
        doc = builtin("identity", d=3)
        assert doc.dim == 3 and np.array_equal(doc.unitaries[0][1], np.eye(3))

    def test_irrational_phase(self):
        (_, U), = builtin("diag_irrational_phase").unitaries
        assert U[1, 1] == pytest.approx(np.exp(1j * np.pi * np.sqrt(2)))

    def test_unknown(self):
        with pytest.raises(KeyError):
            builtin("nope")

    def test_spec_strings(self):
        assert builtin_from_spec("cnot_pair:0.9").unitaries[0][0] == 0.9
        assert builtin_from_spec("identity:4").dim == 4


class TestReportFormat:
    def test_float_format(self):
        assert format_float(1.0) == "1.00000000000000e+00"
        assert format_float(-0.0) == "0.00000000000000e+00"
        assert len(format_float(np.pi).split("e")[0].replace(".", "")) == 15

    def test_complex_pairs(self):
        assert json.loads(dumps({"z": 1 + 2j})) == {"z": [1.0, 2.0]}


class TestCommands:
    def test_spectrum(self):
        code, rep, _ = run_cli("spectrum", "cnot_pair.json")
        assert code == 0
        mults = {round(complex(*e["lambda"]).real): e["multiplicity"] for e in rep["spectrum"]["eigenvalues"]}
        assert mults == {1: 5, -1: 1}
        assert rep["subdominant_modulus"] == pytest.approx(0.5)

    def test_attractors_full_round_trip(self, cnot):
        code, rep, _ = run_cli("attractors", "cnot_pair.json", "--full")
        assert code == 0
        rebuilt = space_from_report(rep)
        direct = build_attractor_space(cnot)
        for (l1, b1), (l2, b2) in zip(rebuilt.blocks, direct.blocks):
            assert abs(l1 - l2) <= 1e-12
            for X, Y in zip(b1, b2):
                assert np.max(np.abs(X - Y)) <= 1e-12

    def test_attractors_without_full(self):
        code, rep, _ = run_cli("attractors", "cnot_pair.json")
        assert [b["dimension"] for b in rep["attractors"]["blocks"]] == [5, 1]
        assert "basis" not in rep["attractors"]["blocks"][0]
        with pytest.raises(DocumentError):
            space_from_report(rep)

    def test_evolve_mixed(self):
        code, rep, _ = run_cli("evolve", "cnot_pair.json", "--state", "mixed.json", "--steps", "50")
        assert code == 0
        assert np.allclose(matrix_from(rep["state"]), np.eye(4) / 4, atol=1e-15)
        assert rep["convergence"]["converged"]

    def test_asymptote_odd_even(self):
        _, odd_rep, _ = run_cli("asymptote", "cnot_pair.json", "--state", "random.json", "--steps", "201")
        _, one_rep, _ = run_cli("asymptote", "cnot_pair.json", "--state", "random.json", "--steps", "1")
        _, even_rep, _ = run_cli("asymptote", "cnot_pair.json", "--state", "random.json", "--steps", "200")
        odd, one, even = (matrix_from(r["state"]) for r in (odd_rep, one_rep, even_rep))
        assert np.allclose(odd, one, atol=1e-12)
        from ruo.io import load_state

        rho = load_state("random.json", 4)
        ref_even, ref_odd = limit_matrices(rho)
        assert np.max(np.abs(even - ref_even)) <= 1e-9
        assert np.max(np.abs(odd - ref_odd)) <= 1e-9
        # odd limit is the even one with d and d* exchanged
        assert not np.allclose(odd, even)

    def test_choi_modes(self):
        code, rep, _ = run_cli("choi", "cnot_pair.json")
        assert code == 0 and rep["audit"]["passed"] and rep["source"] == "Phi^1"
        code, rep, _ = run_cli("choi", "cnot_pair.json", "--power", "5")
        assert rep["source"] == "Phi^5" and rep["audit"]["passed"]
        code, rep, _ = run_cli("choi", "cnot_pair.json", "--asymptotic", "-2", "--full")
        assert rep["audit"]["completely_positive"]
        assert len(rep["dynamical_matrix"]) == 16

    @pytest.mark.parametrize("ref", ["cnot_pair.json", "identity", "single_unitary_pauli_x",
                                     "diag_irrational_phase", "cnot_pair:0.9"])
    def test_verify_builtins(self, ref):
        code, rep, _ = run_cli("verify", ref)
        assert code == 0
        assert rep["summary"]["failed"] == 0 and rep["summary"]["skipped"] == 0

    def test_verify_cnot_report(self):
        code, rep, _ = run_cli("verify", "cnot_pair.json")
        assert rep["classification"]["label"] == "PERIODIC(T=2)"
        assert [b["dimension"] for b in rep["attractors"]["blocks"]] == [5, 1]

    def test_deterministic(self):
        a = run_cli("verify", "cnot_pair.json", "--full")[2]
        b = run_cli("verify", "cnot_pair.json", "--full")[2]
        assert a == b

    def test_skip_forces_failure(self):
        # a single step budget cannot reach the convergence threshold
        code, rep, _ = run_cli("verify", "cnot_pair:0.9", "--max-steps", "5")
        assert code == 4
        assert rep["summary"]["skipped"] == 2
        code, _, _ = run_cli("verify", "cnot_pair:0.9", "--max-steps", "5", "--allow-skip")
        assert code == 0

    def test_failed_check_exit(self):
        # reachable step count, but below the roundoff floor of the iteration
        code, rep, _ = run_cli("verify", "cnot_pair.json", "--convergence-threshold", "1e-17")
        assert code == 4
        assert any(c["status"] == "FAIL" for c in rep["checks"])


class TestExitCodes:
    def test_usage(self, capsys):
        assert main([]) == 1
        assert main(["frobnicate", "x"]) == 1
        assert main(["evolve", "cnot_pair.json"]) == 1

    def test_missing_file(self):
        assert run_cli("spectrum", "does_not_exist.json")[0] == 2

    def test_invalid_ensemble(self, tmp_path):
        path = tmp_path / "bad.json"
        C1, C2 = cnot_matrices()
        doc = builtin("cnot_pair")
        doc.unitaries[1] = (0.5, 2 * C2)
        path.write_text(doc.to_json())
        assert run_cli("spectrum", str(path))[0] == 2

    def test_malformed(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": ')
        assert run_cli("attractors", str(path))[0] == 2
        assert "line 1" in capsys.readouterr().err

    def test_state_dimension_mismatch(self):
        assert run_cli("evolve", "identity", "--state", "mixed.json", "--steps", "2")[0] == 2

    def test_numeric_failure(self, tmp_path):
        # an absurd unit-circle tolerance pulls decaying modes into the spectrum,
        # so kernel and commutant solves disagree
        assert run_cli("attractors", "cnot_pair.json", "--circle-tol", "0.9")[0] == 3

    def test_document_tolerances_used(self, tmp_path):
        doc = builtin("cnot_pair")
        doc.tolerances = {"convergence": 0.0}
        path = tmp_path / "t.json"
        path.write_text(doc.to_json())
        assert run_cli("verify", str(path))[0] == 4
