"""Tests for the dense linear algebra kernel."""

import numpy as np
import pytest

from services.linalg import (
    NormKind,
    ScalarField,
    Subspace,
    as_matrix,
    checked_inverse,
    field_of,
    induced_norm,
    lower_norm,
    orthogonal_projector,
    polar_decompose,
    principal_angles,
    psd_sqrt,
    solve_affine_system,
    span,
    subspace_combine,
    subspace_distance,
    subspace_from_matrix,
    vector_norm,
)
from shared.exceptions import DimensionMismatchError, InvalidInputError, SingularMatrixError


def e(i: int, n: int) -> np.ndarray:
    vector = np.zeros((n, 1))
    vector[i, 0] = 1.0
    return vector


class TestInducedNorm:
    """Test exact induced norms."""

    def test_identity_l2(self):
        """Test that the identity has l2 norm 1."""
        assert induced_norm(np.eye(3), NormKind.L2) == pytest.approx(1.0)

    def test_column_sums_l1(self):
        """Test l1 is the maximum column sum."""
        assert induced_norm(np.array([[1.0, -2.0], [3.0, 4.0]]), NormKind.L1) == pytest.approx(6.0)

    def test_row_sums_linf(self):
        """Test linf is the maximum row sum."""
        assert induced_norm(np.array([[1.0, -2.0], [3.0, 4.0]]), NormKind.LINF) == pytest.approx(7.0)

    def test_nilpotent_shift_l2(self):
        """Test the l2 norm of the nilpotent shift."""
        assert induced_norm(np.array([[0.0, 1.0], [0.0, 0.0]]), "l2") == pytest.approx(1.0)

    @pytest.mark.parametrize("kind", list(NormKind))
    def test_brute_force_lower_bound(self, kind):
        """Test the exact norm dominates sampled gains and is nearly attained."""
        rng = np.random.default_rng(7)
        matrix = rng.standard_normal((4, 4))
        corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * 4)).reshape(4, -1).T
        vectors = np.vstack([rng.standard_normal((10_000, 4)), np.eye(4), corners])
        gains = vector_norm(vectors @ matrix.T, kind) / vector_norm(vectors, kind)
        exact = induced_norm(matrix, kind)
        assert gains.max() <= exact + 1e-12
        if kind == NormKind.L2:
            assert gains.max() >= 0.9 * exact
        else:
            # Extreme points of the unit ball are in the sample.
            assert gains.max() >= exact - 1e-6

    def test_lower_norm_singular(self):
        """Test the smallest gain of a singular matrix is zero."""
        assert lower_norm(np.diag([1.0, 0.0]), NormKind.L1) == 0.0

    def test_lower_norm_diagonal(self):
        """Test the smallest gain of a diagonal matrix."""
        for kind in NormKind:
            assert lower_norm(np.diag([2.0, 0.5]), kind) == pytest.approx(0.5)


class TestSubspaceFromMatrix:
    """Test range and kernel extraction."""

    def test_zero_range_is_trivial(self):
        """Test the range of the zero matrix is {0}."""
        assert subspace_from_matrix(np.zeros((2, 2)), "range").dim == 0

    def test_zero_kernel_is_full(self):
        """Test the kernel of the zero matrix is everything."""
        assert subspace_from_matrix(np.zeros((2, 2)), "kernel").dim == 2

    def test_diagonal_kernel(self):
        """Test kernel of diag(1, 0) is span e2."""
        kernel = subspace_from_matrix(np.diag([1.0, 0.0]), "kernel")
        assert subspace_distance(kernel, span(e(1, 2))) < 1e-12

    def test_rank_one_range(self):
        """Test the range of the all-ones matrix."""
        result = subspace_from_matrix(np.ones((2, 2)), "range")
        assert result.dim == 1
        expected = np.array([[1.0], [1.0]]) / np.sqrt(2)
        assert abs(abs((result.basis.T @ expected).item()) - 1.0) < 1e-12

    def test_range_and_adjoint_kernel_complement(self):
        """Test dim ran M + dim ker M* equals the ambient dimension."""
        rng = np.random.default_rng(3)
        matrix = rng.standard_normal((5, 3)) @ rng.standard_normal((3, 5))
        rng_dim = subspace_from_matrix(matrix, "range").dim
        ker_dim = subspace_from_matrix(matrix.conj().T, "kernel").dim
        assert rng_dim + ker_dim == 5
        assert rng_dim == 3

    def test_rejects_bad_mode(self):
        """Test unknown modes raise."""
        with pytest.raises(ValueError):
            subspace_from_matrix(np.eye(2), "image")


class TestSubspaceCombine:
    """Test sums and intersections."""

    def test_sum_of_axes(self):
        """Test span e1 + span e2 in R3."""
        total = subspace_combine(span(e(0, 3)), span(e(1, 3)), "sum")
        assert total.dim == 2
        assert subspace_distance(total, span(np.hstack([e(0, 3), e(1, 3)]))) < 1e-12

    def test_intersection_of_axes(self):
        """Test span e1 and span e2 meet only at zero."""
        assert subspace_combine(span(e(0, 3)), span(e(1, 3)), "intersection").dim == 0

    def test_intersection_of_planes(self):
        """Test span{e1,e2} and span{e2,e3} meet in span e2."""
        first = span(np.hstack([e(0, 3), e(1, 3)]))
        second = span(np.hstack([e(1, 3), e(2, 3)]))
        meet = subspace_combine(first, second, "intersection")
        assert meet.dim == 1
        assert subspace_distance(meet, span(e(1, 3))) < 1e-10

    def test_ambient_mismatch(self):
        """Test mismatched ambient dimensions raise."""
        with pytest.raises(DimensionMismatchError):
            subspace_combine(Subspace.full(2), Subspace.full(3))


class TestPrincipalAngles:
    """Test principal angles."""

    def test_orthogonal_lines(self):
        """Test orthogonal lines meet at pi/2."""
        angles = principal_angles(span(e(0, 3)), span(e(1, 3)))
        assert angles == pytest.approx([np.pi / 2])

    def test_empty_for_zero_subspace(self):
        """Test the zero subspace yields no angles."""
        assert principal_angles(Subspace.zero(3), Subspace.full(3)).size == 0

    def test_small_angle_accuracy(self):
        """Test tiny angles are resolved accurately."""
        eps = 1e-9
        line = span(np.array([[1.0], [eps]]))
        assert principal_angles(line, span(e(0, 2)))[0] == pytest.approx(eps, rel=1e-6)


class TestPolarDecompose:
    """Test polar decomposition."""

    def test_unitary(self):
        """Test a unitary has trivial positive factor."""
        theta = 0.3
        unitary = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        v, p = polar_decompose(unitary)
        assert np.allclose(v, unitary, atol=1e-12)
        assert np.allclose(p, np.eye(2), atol=1e-12)

    def test_positive_diagonal(self):
        """Test a positive diagonal is its own positive factor."""
        v, p = polar_decompose(np.diag([2.0, 3.0]))
        assert np.allclose(v, np.eye(2), atol=1e-12)
        assert np.allclose(p, np.diag([2.0, 3.0]), atol=1e-12)

    def test_hand_example(self):
        """Test [[0,2],[1,0]] = swap @ diag(1,2)."""
        v, p = polar_decompose(np.array([[0.0, 2.0], [1.0, 0.0]]))
        assert np.allclose(v, [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)
        assert np.allclose(p, np.diag([1.0, 2.0]), atol=1e-12)

    def test_reconstruction_complex(self):
        """Test V P reproduces a complex matrix and P is PSD."""
        rng = np.random.default_rng(11)
        matrix = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        v, p = polar_decompose(matrix)
        assert np.linalg.norm(v @ p - matrix, 2) <= 1e-9 * (1 + np.linalg.norm(matrix, 2))
        assert np.abs(p - p.conj().T).max() <= 1e-10
        assert np.linalg.eigvalsh(p).min() >= -1e-10

    def test_real_stays_real(self):
        """Test real input gives real factors."""
        v, p = polar_decompose(np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert field_of(v) == ScalarField.REAL
        assert field_of(p) == ScalarField.REAL


class TestPsdSqrt:
    """Test the positive square root."""

    def test_identity(self):
        """Test sqrt(I) = I."""
        assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        """Test sqrt(diag(4,9)) = diag(2,3)."""
        assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_hand_eigendecomposition(self):
        """Test sqrt of [[2,1],[1,2]] squares back and has eigenvalues 1 and sqrt 3."""
        b = np.array([[2.0, 1.0], [1.0, 2.0]])
        a = psd_sqrt(b)
        assert np.linalg.norm(a @ a - b, 2) <= 1e-9 * (1 + np.linalg.norm(b, 2))
        assert np.linalg.eigvalsh(a) == pytest.approx([1.0, np.sqrt(3.0)])

    def test_rejects_non_hermitian(self):
        """Test non-Hermitian input raises."""
        with pytest.raises(InvalidInputError):
            psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_rejects_negative_eigenvalue(self):
        """Test indefinite input raises."""
        with pytest.raises(InvalidInputError):
            psd_sqrt(np.diag([1.0, -1e-3]))

    def test_clamps_tiny_negative(self):
        """Test eigenvalues slightly below zero are clamped."""
        a = psd_sqrt(np.diag([1.0, -1e-12]))
        assert np.allclose(a, np.diag([1.0, 0.0]))


class TestAffineSystem:
    """Test least-norm affine solves."""

    def test_unique_solution(self):
        """Test a square invertible system."""
        result = solve_affine_system(np.diag([2.0, 4.0]), np.array([2.0, 2.0]))
        assert result.consistent
        assert result.dimension == 0
        assert np.allclose(result.particular, [1.0, 0.5])

    def test_least_norm_particular(self):
        """Test the underdetermined system x + y = 2 returns (1, 1)."""
        result = solve_affine_system(np.array([[1.0, 1.0]]), np.array([2.0]))
        assert np.allclose(result.particular, [1.0, 1.0])
        assert result.dimension == 1

    def test_inconsistent(self):
        """Test x = 0 and x = 1 have no solution."""
        result = solve_affine_system(np.array([[1.0], [1.0]]), np.array([0.0, 1.0]))
        assert result.is_empty
        assert result.distance(np.zeros(1)) == float("inf")

    def test_no_equations(self):
        """Test an empty system is solved by everything."""
        result = solve_affine_system(np.zeros((0, 3)), np.zeros(0))
        assert result.consistent
        assert result.dimension == 3

    def test_distance_to_line(self):
        """Test the distance from the origin to x + y = 2."""
        result = solve_affine_system(np.array([[1.0, 1.0]]), np.array([2.0]))
        assert result.distance(np.zeros(2)) == pytest.approx(np.sqrt(2.0))


class TestMatrixHelpers:
    """Test conversion and inverse helpers."""

    def test_as_matrix_rejects_nan(self):
        """Test non-finite entries are refused."""
        with pytest.raises(InvalidInputError):
            as_matrix([[1.0, float("nan")]])

    def test_as_matrix_rejects_imaginary_for_real(self):
        """Test a real tag refuses imaginary parts."""
        with pytest.raises(InvalidInputError):
            as_matrix(np.array([[1j]]), ScalarField.REAL)

    def test_as_matrix_complex_tag(self):
        """Test a complex tag promotes the dtype."""
        assert field_of(as_matrix([[1.0]], ScalarField.COMPLEX)) == ScalarField.COMPLEX

    def test_projector_idempotent(self):
        """Test the orthogonal projector is idempotent."""
        p = orthogonal_projector(span(np.array([[1.0], [1.0], [0.0]])))
        assert np.allclose(p @ p, p)

    def test_checked_inverse_refuses_singular(self):
        """Test singular input raises."""
        with pytest.raises(SingularMatrixError):
            checked_inverse(np.diag([1.0, 0.0]))

    def test_subspace_requires_orthonormal_basis(self):
        """Test a non-orthonormal basis is refused."""
        with pytest.raises(InvalidInputError):
            Subspace(2, np.array([[2.0], [0.0]]))
