"""Tests for shared utility functions."""

import numpy as np
import pytest

from shared.utils import make_rng, max_or_zero, probe_mesh, scaled_tolerance, to_nested_list


def test_make_rng_is_deterministic():
    """Test seeded generators repeat their draws."""
    assert np.array_equal(make_rng(7).random(4), make_rng(7).random(4))


def test_probe_mesh_starts_with_basis():
    """Test the mesh leads with the standard basis and is unit length."""
    mesh = probe_mesh(3, 10, seed=1)
    assert mesh.shape == (10, 3)
    assert np.allclose(mesh[:3], np.eye(3))
    assert np.allclose(np.linalg.norm(mesh, axis=1), 1.0)


def test_probe_mesh_complex():
    """Test complex meshes carry imaginary parts."""
    mesh = probe_mesh(2, 6, seed=1, complex_valued=True)
    assert mesh.dtype == np.complex128
    assert np.any(mesh[2:].imag)
    assert np.array_equal(mesh, probe_mesh(2, 6, seed=1, complex_valued=True))


def test_probe_mesh_fewer_than_dim():
    """Test a short mesh is a prefix of the basis."""
    assert np.allclose(probe_mesh(4, 2, seed=0), np.eye(4)[:2])


def test_scaled_tolerance():
    """Test the tolerance grows with the magnitudes."""
    assert scaled_tolerance(1e-9) == pytest.approx(1e-9)
    assert scaled_tolerance(1e-9, 2.0, 3.0) == pytest.approx(6e-9)


def test_max_or_zero():
    """Test the empty maximum."""
    assert max_or_zero([]) == 0.0
    assert max_or_zero(iter([1.0, 3.0, 2.0])) == 3.0


def test_to_nested_list_real():
    """Test real arrays become float lists."""
    assert to_nested_list(np.array([[1, 2]])) == [[1.0, 2.0]]


def test_to_nested_list_complex():
    """Test complex entries become pairs unless the imaginary part vanishes."""
    assert to_nested_list(np.array([1 + 2j])) == [[1.0, 2.0]]
    assert to_nested_list(np.array([1 + 0j])) == [1.0]
    assert to_nested_list(np.array([1.0]), complex_pairs=True) == [[1.0, 0.0]]
    assert to_nested_list(np.array([1 + 2j]), complex_pairs=False) == [1.0]
