"""Tests for commuting projections onto invariant subspaces."""

import numpy as np
import pytest

from services.action import build_action
from services.action.corpus import isometric_on_subspace, jordan_shift, rotation, unitary_plus_dilation
from services.linalg import NormKind, Subspace, induced_norm
from services.projection import (
    ProjectionProblem,
    check_invariance,
    commuting_projection,
    commuting_projection_family,
    minimal_projection_refine,
    projection_family,
    projection_residuals,
    relative_projection_constant,
    validate_subspace,
)
from shared.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    InvarianceViolationError,
    NoCommutingProjectionError,
    SingularRestrictionError,
)


def first_axes(ambient, count):
    return Subspace(ambient, np.eye(ambient)[:, :count])


class TestCheckInvariance:
    """Test the invariance and restriction check."""

    def test_identity(self):
        """Test the identity restricts to I with condition 1."""
        restriction = check_invariance(build_action([np.eye(3)]), first_axes(3, 2))
        assert np.allclose(restriction.matrices[0], np.eye(2))
        assert restriction.conditions[0] == pytest.approx(1.0)

    def test_nilpotent_range(self):
        """Test the shift maps its range onto a proper subspace of it."""
        with pytest.raises(SingularRestrictionError) as excinfo:
            check_invariance(build_action([jordan_shift(4)]), first_axes(4, 3))
        assert excinfo.value.exit_code == 2
        assert "T_s(Y) = Y" in excinfo.value.hypothesis

    def test_not_invariant(self):
        """Test a rotation moves the first axis."""
        with pytest.raises(InvarianceViolationError) as excinfo:
            check_invariance(build_action([rotation(np.pi / 4)]), first_axes(2, 1))
        assert excinfo.value.details["generator"] == "g1"

    def test_unitary_block(self):
        """Test U (+) 2I restricts to U."""
        action, y = unitary_plus_dilation()
        restriction = check_invariance(action, y)
        assert np.allclose(restriction.matrices[0], action.generators[0][:3, :3])
        assert restriction.conditions[0] == pytest.approx(1.0)


class TestProjectionProblem:
    """Test problem validation."""

    def test_subspace_must_be_proper(self):
        """Test Y = X is refused."""
        with pytest.raises(InvalidInputError):
            ProjectionProblem(build_action([np.eye(2)]), first_axes(2, 2))

    def test_subspace_must_be_nonzero(self):
        """Test Y = 0 is refused."""
        with pytest.raises(InvalidInputError):
            ProjectionProblem(build_action([np.eye(2)]), Subspace.zero(2))


class TestCommutingProjection:
    """Test the averaging and exact routes."""

    def test_trivial_action_keeps_q0(self):
        """Test the identity action returns the orthogonal Q0."""
        result = commuting_projection(ProjectionProblem(build_action([np.eye(3)]), first_axes(3, 1)))
        assert np.allclose(result.projection, np.diag([1.0, 0.0, 0.0]))
        assert result.route == "averaging"

    def test_unitary_plus_dilation(self):
        """Test U (+) 2I gives the block projector with m_Y unbounded."""
        action, y = unitary_plus_dilation()
        result = commuting_projection(ProjectionProblem(action, y))
        assert np.allclose(result.projection, y.projector(), atol=1e-10)
        assert result.pnorm == pytest.approx(1.0)
        assert result.lambda_y == 1.0 and result.lambda_exact
        assert not result.m_y_stabilized
        bound_check = next(c for c in result.checks if c.name == "norm_bound")
        assert bound_check.skipped
        assert result.certified_minimal

    def test_unitary_plus_contraction_bound(self):
        """Test U (+) I/2 satisfies |P| <= m_Y lambda."""
        action, y = unitary_plus_dilation(factor=0.5)
        result = commuting_projection(ProjectionProblem(action, y))
        assert result.m_y_stabilized
        assert result.pnorm <= result.m_y * result.lambda_y + 1e-6
        assert all(c.passed for c in result.checks)
        assert result.commutation_residual <= 1e-8
        assert result.idempotence_residual <= 1e-8
        assert result.range_angle <= 1e-8

    def test_diagonal_exact_solution(self):
        """Test T = diag(1, 1, 1/2) with Y = span{e1} gives diag(1, 0, 0)."""
        action = build_action([np.diag([1.0, 1.0, 0.5])])
        result = commuting_projection(ProjectionProblem(action, first_axes(3, 1)))
        assert np.allclose(result.projection, np.diag([1.0, 0.0, 0.0]), atol=1e-10)
        assert np.allclose(result.exact.particular.reshape(3, 3), np.diag([1.0, 0.0, 0.0]), atol=1e-10)
        assert result.exact.dimension == 1

    def test_growing_orbit_falls_back_to_exact(self):
        """Test a skew Q0 under U (+) 2I abandons averaging."""
        action, y = unitary_plus_dilation()
        q0 = y.projector().copy()
        q0[0, 3] = 1.0
        result = commuting_projection(ProjectionProblem(action, y, q0=q0))
        assert result.route == "exact"
        assert result.averaging.status.value == "diverged"
        assert np.allclose(result.projection, y.projector(), atol=1e-10)

    def test_no_commuting_projection(self):
        """Test the shear has no commuting projection onto its eigenline."""
        action = build_action([np.array([[1.0, 1.0], [0.0, 1.0]])])
        with pytest.raises(NoCommutingProjectionError):
            commuting_projection(ProjectionProblem(action, first_axes(2, 1)))

    def test_orthogonal_projector_commutes_with_norm_one_isometries(self):
        """Test Pi_Y commutes when |T| = 1 and T|Y is unitary."""
        for action, y in isometric_on_subspace():
            t = action.generators[0]
            assert induced_norm(t) <= 1 + 1e-12
            projector = y.projector()
            assert np.linalg.norm(t @ projector - projector @ t, 2) <= 1e-9


class TestMinimalProjectionRefine:
    """Test the descent refinement."""

    def test_single_point_unchanged(self):
        """Test a unique commuting projection is returned as is."""
        action, y = unitary_plus_dilation()
        problem = ProjectionProblem(action, y)
        result = commuting_projection(problem)
        refined = minimal_projection_refine(problem, result)
        assert np.array_equal(refined.projection, result.projection)
        assert refined.certified_minimal

    def test_skew_projection_is_straightened(self):
        """Test diag(1, 0) + t E12 is refined to t = 0."""
        problem = ProjectionProblem(build_action([np.eye(2)]), first_axes(2, 1), q0=[[1.0, 0.7], [0.0, 0.0]])
        result = commuting_projection(problem)
        assert result.pnorm == pytest.approx(np.sqrt(1.49))
        refined = minimal_projection_refine(problem, result)
        assert refined.route == "refined"
        assert refined.pnorm == pytest.approx(1.0, abs=1e-8)
        assert refined.certified_minimal
        assert np.allclose(refined.projection, np.diag([1.0, 0.0]), atol=1e-4)

    def test_refine_never_increases_norm(self):
        """Test the refined norm is at most the starting norm."""
        problem = ProjectionProblem(build_action([np.diag([1.0, 1.0, 0.5])]), first_axes(3, 1))
        result = commuting_projection(problem)
        refined = minimal_projection_refine(problem, result)
        assert refined.pnorm <= result.pnorm + 1e-12


class TestRelativeProjectionConstant:
    """Test lambda(X, Y) estimation."""

    def test_hilbert_space(self):
        """Test l2 gives the orthogonal projector and lambda = 1."""
        y = first_axes(3, 2)
        projector, value, exact = relative_projection_constant(y, NormKind.L2)
        assert np.allclose(projector, np.diag([1.0, 1.0, 0.0]))
        assert value == 1.0 and exact

    def test_coordinate_line_in_l1(self):
        """Test a coordinate axis has a norm-one projection in l1."""
        _, value, exact = relative_projection_constant(first_axes(2, 1), NormKind.L1)
        assert value == pytest.approx(1.0)
        assert exact

    def test_sum_zero_plane_in_linf(self):
        """Test the plane x1 + x2 + x3 = 0 in linf stays at 4/3 and is not certified."""
        basis = np.linalg.qr(np.array([[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]]))[0]
        _, value, exact = relative_projection_constant(Subspace(3, basis), NormKind.LINF)
        assert value == pytest.approx(4.0 / 3.0, abs=1e-6)
        assert not exact


class TestValidateSubspace:
    """Test the ambient and properness checks."""

    def test_wrong_ambient(self):
        """Test a subspace of R^3 is refused for an action on R^2."""
        with pytest.raises(DimensionMismatchError):
            validate_subspace(build_action([np.eye(2)]), first_axes(3, 1))

    def test_whole_space_is_not_proper(self):
        """Test the whole space passes only when properness is not required."""
        action = build_action([np.eye(2)])
        with pytest.raises(InvalidInputError):
            validate_subspace(action, Subspace.full(2))
        validate_subspace(action, Subspace.full(2), proper=False)


class TestProjectionFamilies:
    """Test the exact affine families of projections."""

    def test_projections_onto_a_line(self):
        """Test projections onto span{e1} in R^2 form a line through the orthogonal one."""
        family = projection_family(first_axes(2, 1))
        assert family.dimension == 1
        assert np.allclose(family.point().reshape(2, 2), [[1.0, 0.0], [0.0, 0.0]])
        skew = family.point([1.0]).reshape(2, 2)
        assert np.allclose(skew @ skew, skew)
        assert np.allclose(skew[:, 0], [1.0, 0.0])

    def test_diagonal_action_pins_the_projection(self):
        """Test commuting with diag(1, 2) leaves only the orthogonal projector."""
        family = commuting_projection_family(build_action([np.diag([1.0, 2.0])]), first_axes(2, 1))
        assert family.dimension == 0
        assert np.allclose(family.point().reshape(2, 2), [[1.0, 0.0], [0.0, 0.0]])

    def test_jordan_block_has_no_commuting_projection(self):
        """Test the Jordan block admits no commuting projection onto its eigenline."""
        action = build_action([np.array([[1.0, 1.0], [0.0, 1.0]])])
        assert commuting_projection_family(action, first_axes(2, 1)).is_empty


class TestProjectionResiduals:
    """Test the residuals reported for candidate projections."""

    def test_orthogonal_projector_is_clean(self):
        """Test the orthogonal projector onto an eigenline has zero residuals."""
        residuals = projection_residuals(build_action([np.diag([1.0, 2.0])]), first_axes(2, 1), np.diag([1.0, 0.0]))
        assert residuals["commutation"] == pytest.approx(0.0, abs=1e-12)
        assert residuals["idempotence"] == pytest.approx(0.0, abs=1e-12)
        assert residuals["range_angle"] == pytest.approx(0.0, abs=1e-8)

    def test_skew_projection_does_not_commute(self):
        """Test a skew projection onto the eigenline fails to commute."""
        skew = np.array([[1.0, 1.0], [0.0, 0.0]])
        residuals = projection_residuals(build_action([np.diag([1.0, 2.0])]), first_axes(2, 1), skew)
        assert residuals["commutation"] > 0.1
        assert residuals["idempotence"] == pytest.approx(0.0, abs=1e-12)
