"""Integration tests for the command-line surface."""

import importlib
import json

import numpy as np
import pytest
import yaml

from services.action.corpus import jordan_shift, similar_rotation
from services.cli_io import app

pytestmark = pytest.mark.integration

Z2 = {"kind": "semigroup", "order": 2, "table": [[0, 1], [1, 0]]}
RIGHT_ZERO = {"kind": "mean", "order": 2, "table": [[0, 1], [0, 1]]}


def action(*generators, norm="l2"):
    return {
        "dim": len(generators[0]),
        "norm": norm,
        "generators": [{"name": f"g{i + 1}", "matrix": np.asarray(g).tolist()} for i, g in enumerate(generators)],
    }


SIMILAR_ROTATION = action(similar_rotation())
DIAGONAL_MODEL = {
    "kind": "intertwine",
    "actionA": action([[1.0, 0.0], [0.0, 0.5]]),
    "actionB": action([[1.0]]),
    "subspaceE": {"basis": [[1.0], [0.0]]},
    "t0": [[1.0]],
}


def invoke(runner, command, path, *options):
    return runner.invoke(app, [command, "--input", str(path), *options])


def report(result):
    return json.loads(result.stdout)


class TestSemigroupCommands:
    """Test check-amenable, mean and fixed-point."""

    def test_check_amenable(self, runner, problem_file):
        """Test a group is reported amenable."""
        result = invoke(runner, "check-amenable", problem_file(Z2))
        assert result.exit_code == 0
        payload = report(result)
        assert payload["kind"] == "amenability-report"
        assert payload["amenable"] is True
        assert payload["mean"]["weights"] == pytest.approx([0.5, 0.5], abs=1e-9)

    def test_mean_certificate(self, runner, problem_file):
        """Test the right-zero semigroup returns a certificate."""
        result = invoke(runner, "mean", problem_file(RIGHT_ZERO))
        assert result.exit_code == 0
        payload = report(result)
        assert payload["status"] == "infeasible"
        assert len(payload["certificate"]) == 2

    def test_fixed_point(self, runner, problem_file):
        """Test the mean of the orbit of 0 under x -> 2 - x is 1."""
        problem = {
            **Z2,
            "kind": "fixed-point",
            "dim": 1,
            "maps": [{"linear": [[1.0]], "offset": [0.0]}, {"linear": [[-1.0]], "offset": [2.0]}],
            "start": [0.0],
        }
        result = invoke(runner, "fixed-point", problem_file(problem))
        assert result.exit_code == 0
        payload = report(result)
        assert payload["point"] == pytest.approx([1.0], abs=1e-12)
        assert payload["residual"] <= 1e-12

    def test_action_law_violation(self, runner, problem_file):
        """Test a map that is not idempotent cannot represent the trivial semigroup."""
        problem = {
            "kind": "fixed-point",
            "order": 1,
            "table": [[0]],
            "dim": 1,
            "maps": [{"linear": [[0.5]], "offset": [1.0]}],
            "start": [0.0],
        }
        result = invoke(runner, "fixed-point", problem_file(problem))
        assert result.exit_code == 2
        assert report(result)["error"] == "ActionLawError"


class TestActionCommands:
    """Test bounds and decompose."""

    def test_bounds_of_rotation(self, runner, problem_file):
        """Test a rotation has m = M = 1."""
        rotation = [[0.0, -1.0], [1.0, 0.0]]
        result = invoke(runner, "bounds", problem_file({"kind": "action", **action(rotation), "depth": 4}))
        assert result.exit_code == 0
        payload = report(result)
        assert payload["lower"] == pytest.approx(1.0)
        assert payload["upper"] == pytest.approx(1.0)
        assert payload["stabilized"] is True

    def test_decompose_with_trace(self, runner, problem_file, tmp_path):
        """Test diag(1, 1/2) splits into two lines and writes its trace."""
        trace = tmp_path / "trace.csv"
        problem = {"kind": "decompose", "action": action([[1.0, 0.0], [0.0, 0.5]])}
        result = invoke(runner, "decompose", problem_file(problem), "--trace", str(trace))
        assert result.exit_code == 0
        payload = report(result)
        assert payload["kind"] == "decomposition-report"
        assert payload["dimN"] == 1
        assert payload["dimR"] == 1
        assert payload["pnorm"] == pytest.approx(1.0, abs=1e-8)
        lines = trace.read_bytes().split(b"\n")
        assert lines[0] == b"box,residual"
        assert lines[1].startswith(b"2,")
        assert lines[-1] == b""

    def test_text_output(self, runner, problem_file):
        """Test the text format is readable YAML."""
        problem = {"kind": "decompose", "action": action([[1.0, 0.0], [0.0, 0.5]])}
        result = invoke(runner, "decompose", problem_file(problem), "--output", "text")
        assert result.exit_code == 0
        assert yaml.safe_load(result.stdout)["dimN"] == 1


class TestProjectionCommands:
    """Test commuting-projection and intertwine."""

    def test_nilpotent_range(self, runner, problem_file):
        """Test the shift on its own range violates the restriction hypothesis."""
        problem = {
            "kind": "projection",
            "action": action(jordan_shift(4)),
            "subspace": {"basis": np.eye(4)[:, :3].tolist()},
        }
        result = invoke(runner, "commuting-projection", problem_file(problem))
        assert result.exit_code == 2
        payload = report(result)
        assert payload["kind"] == "error"
        assert "T_s(Y) = Y and the restriction" in payload["hypothesis"]

    def test_unitary_block(self, runner, problem_file):
        """Test U (+) 2I projects onto the unitary block."""
        generator = np.diag([1.0, -1.0, 2.0])
        problem = {
            "kind": "projection",
            "action": action(generator),
            "subspace": {"basis": np.eye(3)[:, :2].tolist()},
        }
        result = invoke(runner, "commuting-projection", problem_file(problem), "--refine")
        assert result.exit_code == 0
        projection = np.array(report(result)["projection"])
        assert np.allclose(projection, np.diag([1.0, 1.0, 0.0]), atol=1e-8)

    def test_diagonal_model(self, runner, problem_file):
        """Test T0 = (1) extends to (1, 0)."""
        result = invoke(runner, "intertwine", problem_file(DIAGONAL_MODEL))
        assert result.exit_code == 0
        payload = report(result)
        assert np.allclose(payload["operator"], [[1.0, 0.0]], atol=1e-8)
        assert payload["restriction_residual"] <= 1e-8
        assert payload["intertwining_residual"] <= 1e-8

    def test_zero_target(self, runner, problem_file):
        """Test a singular B is refused."""
        problem = {**DIAGONAL_MODEL, "actionB": action([[0.0]])}
        result = invoke(runner, "intertwine", problem_file(problem))
        assert result.exit_code == 2
        assert report(result)["error"] == "NonInvertibleError"

    def test_growing_orbit_is_refused(self, runner, problem_file):
        """Test an unbounded averaging orbit exits 2 with its growth."""
        problem = {**DIAGONAL_MODEL, "actionA": action([[1.0, 1.0], [0.0, 2.0]])}
        result = invoke(runner, "intertwine", problem_file(problem))
        assert result.exit_code == 2
        payload = report(result)
        assert payload["error"] == "OrbitGrowthError"
        assert payload["details"]["max_orbit_norm"] > payload["details"]["growth_limit"]

    def test_growing_orbit_exact_fallback(self, runner, problem_file):
        """Test --exact-fallback returns the least-norm extension instead."""
        problem = {**DIAGONAL_MODEL, "actionA": action([[1.0, 1.0], [0.0, 2.0]])}
        result = invoke(runner, "intertwine", problem_file(problem), "--exact-fallback")
        assert result.exit_code == 0
        payload = report(result)
        assert payload["route"] == "exact"
        assert np.allclose(payload["operator"], [[1.0, -1.0]], atol=1e-8)

    def test_scaled_basis(self, runner, problem_file):
        """Test T0 is read in the coordinates of the supplied basis."""
        problem = {**DIAGONAL_MODEL, "subspaceE": {"basis": [[2.0], [0.0]]}, "t0": [[2.0]]}
        result = invoke(runner, "intertwine", problem_file(problem))
        assert result.exit_code == 0
        assert np.allclose(report(result)["operator"], [[1.0, 0.0]], atol=1e-8)


class TestIsometryCommands:
    """Test isometrize, renorm and enlarge-check."""

    def test_isometrize(self, runner, problem_file):
        """Test the similar rotation becomes an isometry."""
        result = invoke(runner, "isometrize", problem_file({"kind": "isometrize", "action": SIMILAR_ROTATION}))
        assert result.exit_code == 0
        payload = report(result)
        assert max(payload["defects"]) <= 1e-7
        assert payload["gram"]["residual"] <= 1e-8

    def test_box_cap_stops_averaging(self, runner, problem_file, tmp_path):
        """Test a single small box cannot reach an invariant Gram."""
        trace = tmp_path / "trace.csv"
        path = problem_file({"kind": "isometrize", "action": SIMILAR_ROTATION})
        result = invoke(runner, "isometrize", path, "--max-box", "2", "--trace", str(trace))
        assert result.exit_code == 3
        assert report(result)["error"] == "ConvergenceError"
        assert trace.read_bytes().startswith(b"box,residual\n2,")

    def test_unital_boxes(self, runner, problem_file):
        """Test --box-offset unital reaches the Gram averaging."""
        path = problem_file({"kind": "isometrize", "action": SIMILAR_ROTATION})
        result = invoke(runner, "isometrize", path, "--box-offset", "unital")
        assert result.exit_code == 0
        payload = report(result)
        assert payload["gram"]["averaging"]["offset"] == "unital"
        assert max(payload["defects"]) <= 1e-7

    def test_plain_dyadic_schedule_is_traced(self, runner, problem_file, tmp_path):
        """Test plain power-of-two boxes on diag(1, 1/2) exhaust the schedule and keep the trace."""
        trace = tmp_path / "trace.csv"
        problem = {"kind": "decompose", "action": action([[1.0, 0.0], [0.0, 0.5]])}
        options = ("--box-offset", "plain", "--schedule", "dyadic", "--trace", str(trace))
        result = invoke(runner, "decompose", problem_file(problem), *options)
        assert result.exit_code == 3
        assert report(result)["error"] == "ConvergenceError"
        rows = trace.read_bytes().split(b"\n")
        assert rows[1].startswith(b"2,")
        assert rows[-2].startswith(b"65536,")
        assert len(rows) == 18

    def test_hilbertian_renorm(self, runner, problem_file):
        """Test the hilbertian invariant norm."""
        problem = {"kind": "renorm", "action": SIMILAR_ROTATION, "norm-kind": "hilbertian", "probes": [[1.0, 0.0]]}
        result = invoke(runner, "renorm", problem_file(problem))
        assert result.exit_code == 0
        payload = report(result)
        assert payload["kind"] == "renorm-report"
        assert payload["norm_kind"] == "hilbertian"
        assert payload["probes"] == 1
        assert payload["defect"] <= 1e-8

    def test_enlarge_violation(self, runner, problem_file):
        """Test diag(2, 2) leaves the enlarged interval through its inverse."""
        problem = {
            "kind": "enlarge",
            "action": action([[2.0, 0.0], [0.0, 2.0]]),
            "inverses": [[[0.5, 0.0], [0.0, 0.5]]],
            "m": 2.0,
            "M": 2.0,
            "depth": 3,
        }
        result = invoke(runner, "enlarge-check", problem_file(problem))
        assert result.exit_code == 2
        payload = report(result)
        assert payload["error"] == "BoundViolationError"
        assert payload["details"]["word"] == [-1]
        assert payload["details"]["ratio"] == pytest.approx(0.5)


class TestCommandErrors:
    """Test parse errors, wrong kinds and determinism."""

    def test_parse_error(self, runner, tmp_path):
        """Test a NaN entry exits with the parse error code."""
        path = tmp_path / "bad.json"
        path.write_text('{"kind": "action", "dim": 1, "generators": [{"matrix": [[NaN]]}]}')
        result = invoke(runner, "bounds", path)
        assert result.exit_code == 4
        payload = report(result)
        assert payload["error"] == "ProblemParseError"
        assert payload["details"]["line"] == 1

    def test_missing_file(self, runner, tmp_path):
        """Test an unreadable input is a parse error."""
        result = invoke(runner, "mean", tmp_path / "missing.json")
        assert result.exit_code == 4

    def test_wrong_kind(self, runner, problem_file):
        """Test a semigroup file is refused by decompose."""
        result = invoke(runner, "decompose", problem_file(Z2))
        assert result.exit_code == 2
        assert report(result)["error"] == "InvalidInputError"

    def test_internal_error(self, runner, problem_file, mocker):
        """Test an unexpected exception exits 1 with an error report."""
        mocker.patch.object(importlib.import_module("services.cli_io.app"), "parse_problem", side_effect=RuntimeError("boom"))
        result = invoke(runner, "mean", problem_file(Z2))
        assert result.exit_code == 1
        payload = report(result)
        assert payload["error"] == "RuntimeError"
        assert payload["message"] == "boom"

    def test_tolerance_override(self, runner, problem_file):
        """Test --tol reaches the configuration used by the run."""
        problem = {"kind": "decompose", "action": action([[1.0, 0.0], [0.0, 0.5]])}
        result = invoke(runner, "decompose", problem_file(problem), "--tol", "1e-6")
        assert result.exit_code == 0
        assert report(result)["dimN"] == 1

    @pytest.mark.parametrize(
        "command,problem",
        [
            ("check-amenable", Z2),
            ("mean", RIGHT_ZERO),
            ("decompose", {"kind": "decompose", "action": action([[1.0, 0.0], [0.0, 0.5]])}),
            ("intertwine", DIAGONAL_MODEL),
            ("isometrize", {"kind": "isometrize", "action": SIMILAR_ROTATION}),
            ("renorm", {"kind": "renorm", "action": SIMILAR_ROTATION, "norm-kind": "hilbertian"}),
        ],
    )
    def test_deterministic(self, runner, problem_file, command, problem):
        """Test two runs give byte-identical reports."""
        path = problem_file(problem)
        first = invoke(runner, command, path)
        second = invoke(runner, command, path)
        assert first.exit_code == 0
        assert first.stdout_bytes == second.stdout_bytes
