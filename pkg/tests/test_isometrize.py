"""Tests for invariant Grams, isometrization, renorming and enlarged bounds."""

import numpy as np
import pytest

from services.action import build_action, count_signed_words
from services.action.corpus import commuting_unitary_similar, periodic_unitary, random_unitary, rotation
from services.isometrize import (
    RenormKind,
    enlarged_bounds_check,
    invariant_gram,
    invariant_norm,
    isometrize,
    sandwich_bounds,
    signed_words,
)
from services.linalg import NormKind
from shared.exceptions import BoundViolationError, InvalidInputError, SandwichError
from shared.utils import make_rng


@pytest.fixture
def commuting_unitaries():
    rng = make_rng(1)
    basis = random_unitary(3, rng)
    return build_action([periodic_unitary(3, rng, basis), periodic_unitary(3, rng, basis)])


class TestInvariantGram:
    """Test averaging of B -> T^* B T."""

    def test_unitary_gives_identity(self):
        """Test a rotation keeps the seed I."""
        result = invariant_gram(build_action([rotation(np.pi / 4)]))
        assert np.allclose(result.gram, np.eye(2), atol=1e-12)

    def test_commuting_unitaries_give_identity(self, commuting_unitaries):
        """Test two commuting unitaries keep the seed I."""
        result = invariant_gram(commuting_unitaries)
        assert np.allclose(result.gram, np.eye(3), atol=1e-10)

    def test_similar_rotation(self, similar_rotation):
        """Test D R D^-1 gives a multiple of D^-* D^-1 = diag(1/4, 1)."""
        result = invariant_gram(build_action([similar_rotation]))
        assert np.allclose(result.gram / result.gram[1, 1], np.diag([0.25, 1.0]), atol=1e-9)
        t = similar_rotation
        assert np.linalg.norm(t.T @ result.gram @ t - result.gram) <= 1e-9
        assert result.residual <= 1e-8
        assert result.fixed_space_distance <= 1e-7
        assert result.fixed_space_dimension == 1

    def test_contraction_has_no_sandwich(self):
        """Test diag(1, 1/2) fails the lower bound."""
        with pytest.raises(SandwichError) as excinfo:
            invariant_gram(build_action([np.diag([1.0, 0.5])]))
        assert excinfo.value.exit_code == 2

    def test_requires_euclidean_norm(self):
        """Test an l1 action is refused."""
        with pytest.raises(InvalidInputError):
            invariant_gram(build_action([np.eye(2)], norm=NormKind.L1))


class TestSandwichBounds:
    """Test the two-sided word bound estimate."""

    def test_similar_rotation(self, similar_rotation):
        """Test D R D^-1 has stabilized bounds around 1."""
        bounds = sandwich_bounds(build_action([similar_rotation]))
        assert 0.5 - 1e-12 <= bounds.lower <= 1.0 <= bounds.upper <= 2.0 + 1e-12

    def test_growing_action(self):
        """Test 2I has no upper bound."""
        with pytest.raises(SandwichError):
            sandwich_bounds(build_action([2.0 * np.eye(2)]))


class TestIsometrize:
    """Test conjugation to isometries."""

    def test_rotation_is_unchanged(self):
        """Test a rotation gives A = I and V = T."""
        t = rotation(np.pi / 4)
        result = isometrize(build_action([t]))
        assert np.allclose(result.root, np.eye(2), atol=1e-10)
        assert np.allclose(result.isometries[0], t, atol=1e-10)

    def test_similar_rotation(self, similar_rotation):
        """Test D R D^-1 becomes a rotation with the spectrum of A inside [m, M]."""
        result = isometrize(build_action([similar_rotation]))
        assert max(result.defects) <= 1e-8
        assert result.spectrum[0] >= result.lower - 1e-6
        assert result.spectrum[-1] <= result.upper + 1e-6
        assert all(check.passed for check in result.checks)
        assert max(result.polar_defects) <= 1e-7
        assert max(result.group_defects) <= 1e-7

    def test_unitary_similar_corpus(self):
        """Test commuting D U_g D^-1 pairs are isometrized."""
        for action, _ in commuting_unitary_similar(count=5):
            result = isometrize(action)
            assert max(result.defects) <= 1e-7
            assert result.gram.residual <= 1e-8
            assert result.homomorphism_residual <= 1e-7
            assert all(check.passed for check in result.checks)

    def test_payload(self, similar_rotation):
        """Test the report payload carries the Gram and the checks."""
        payload = isometrize(build_action([similar_rotation])).to_dict()
        assert payload["gram"]["seed"] == "identity"
        assert {c["name"] for c in payload["checks"]} >= {"isometry", "spectrum_lower", "spectrum_upper"}


class TestInvariantNorm:
    """Test averaged and hilbertian invariant norms."""

    def test_rotation_averaged(self):
        """Test a rotation by 2 pi / 5 keeps |e1|_* = 1."""
        result = invariant_norm(build_action([rotation(2 * np.pi / 5)]), RenormKind.AVERAGED, probes=[[1.0, 0.0]])
        assert result.values[0] == pytest.approx(1.0, abs=1e-9)
        assert result.defect <= 1e-9

    def test_isometry_of_base_norm(self):
        """Test a coordinate swap in l1 reproduces the l1 norm."""
        action = build_action([np.array([[0.0, 1.0], [1.0, 0.0]])], norm=NormKind.L1)
        result = invariant_norm(action, RenormKind.AVERAGED)
        assert np.allclose(result.values, np.abs(result.probes).sum(axis=1), atol=1e-12)

    def test_similar_rotation_hilbertian(self, similar_rotation):
        """Test sqrt<Bx, x> is invariant and matches |D^-1 x| up to a scalar."""
        result = invariant_norm(build_action([similar_rotation]), RenormKind.HILBERTIAN)
        assert result.defect <= 1e-8
        assert result.sandwich_violation <= 1e-6
        assert len(result.values) == 64
        oracle = np.linalg.norm(result.probes @ np.diag([0.5, 1.0]), axis=1)
        ratios = result.values / oracle
        assert np.allclose(ratios, ratios[0], rtol=1e-7)

    def test_similar_rotation_averaged(self, similar_rotation):
        """Test the averaged norm converges and is invariant."""
        result = invariant_norm(build_action([similar_rotation]), RenormKind.AVERAGED)
        assert result.defect <= 1e-6
        assert result.sandwich_violation <= 1e-6
        assert result.side is not None
        with pytest.raises(ValueError):
            result.semi_inner_product(np.ones(2), np.ones(2))

    @pytest.mark.parametrize("kind", [RenormKind.HILBERTIAN, RenormKind.AVERAGED])
    def test_zero_vector_is_skipped(self, similar_rotation, kind):
        """Test a zero row leaves the defect finite and evaluates to 0."""
        probes = np.array([[0.0, 0.0], [1.0, 0.0]])
        result = invariant_norm(build_action([similar_rotation]), kind, probes=probes)
        assert result.values[0] == 0.0
        assert np.isfinite(result.defect)
        assert result.defect <= 1e-6

    def test_evaluate_matches_values(self, similar_rotation):
        """Test evaluate on a probe reproduces the stored value."""
        result = invariant_norm(build_action([similar_rotation]), RenormKind.HILBERTIAN)
        assert result.evaluate(result.probes[3]) == pytest.approx(result.values[3])
        x = result.probes[5]
        assert result.semi_inner_product(x, x).real == pytest.approx(result.values[5] ** 2)


class TestEnlargedBoundsCheck:
    """Test signed word bounds on the generated group."""

    def test_signed_word_order(self):
        """Test words are ordered by length and capped."""
        words, truncated = signed_words(1, 2, 10)
        assert words == [(-1,), (1,), (-2,), (2,)]
        assert not truncated
        assert signed_words(1, 2, 3)[1]

    def test_many_generators_stop_at_the_cap(self):
        """Test six generators at depth 12 stop after max_words without sorting the whole ball."""
        words, truncated = signed_words(6, 12, 100_000)
        assert truncated
        assert len(words) == 100_000
        lengths = [sum(abs(a) for a in w) for w in words]
        assert lengths == sorted(lengths)
        assert count_signed_words(6, 12) > 100_000

    def test_truncated_check(self):
        """Test the group check reports truncation when the word cap binds."""
        identity = np.eye(2)
        action = build_action([identity] * 6)
        config = {"max_words": 500, "mesh_size": 8, "mesh_seed": 8}
        report = enlarged_bounds_check(action, [identity] * 6, 1.0, 1.0, config=config)
        assert report.truncated
        assert report.words == 500
        assert report.max_ratio == pytest.approx(1.0)

    def test_unitary(self):
        """Test a rotation has every word gain equal to 1."""
        t = rotation(np.pi / 4)
        report = enlarged_bounds_check(build_action([t]), [t.T], 1.0, 1.0)
        assert report.words == count_signed_words(1, 12)
        assert report.min_ratio == pytest.approx(1.0)
        assert report.max_ratio == pytest.approx(1.0)

    def test_similar_rotation(self, similar_rotation):
        """Test D R D^-1 stays within [m/M, M/m] on signed words."""
        action = build_action([similar_rotation])
        bounds = sandwich_bounds(action)
        report = enlarged_bounds_check(action, [np.linalg.inv(similar_rotation)], bounds.lower, bounds.upper)
        assert report.min_ratio >= bounds.lower / bounds.upper - 1e-6
        assert report.max_ratio <= bounds.upper / bounds.lower + 1e-6
        assert report.to_dict()["group_hypothesis"].startswith("automatic")

    def test_dilation_violates(self):
        """Test diag(2, 2) with m = M = 2 fails at T^-1."""
        action = build_action([np.diag([2.0, 2.0])])
        with pytest.raises(BoundViolationError) as excinfo:
            enlarged_bounds_check(action, [np.diag([0.5, 0.5])], 2.0, 2.0)
        assert excinfo.value.details["word"] == [-1]
        assert excinfo.value.details["ratio"] == pytest.approx(0.5)
        assert excinfo.value.exit_code == 2

    def test_wrong_inverse(self):
        """Test an inverse that does not invert is refused."""
        with pytest.raises(InvalidInputError):
            enlarged_bounds_check(build_action([np.diag([2.0, 2.0])]), [np.eye(2)], 2.0, 2.0)
