import numpy as np
import pytest

from weakhyp.spectral import NonRealSpectrum, eigenvalues_at, hyperbolicity_scan
from weakhyp.symbol import SymbolMatrix
from weakhyp.timepoly import DimensionMismatch

T_GRID = np.linspace(0.0, 1.0, 33)
XI_GRID = [(1.0,), (8.0,), (64.0,)]


def test_eigenvalues_sorted_and_real(jt):
    assert np.allclose(eigenvalues_at(jt, 0.5, [2.0]), [-1.0, 1.0])


def test_non_real_spectrum_raises(rotation):
    with pytest.raises(NonRealSpectrum) as e:
        eigenvalues_at(rotation, 0.3, [4.0])
    assert e.value.max_imag == pytest.approx(4.0)
    assert e.value.xi == (4.0,)


def test_frequency_dimension_checked(jt):
    with pytest.raises(DimensionMismatch):
        eigenvalues_at(jt, 0.5, [1.0, 2.0])


def test_strict_constant_system(strict_const):
    report = hyperbolicity_scan(strict_const, T_GRID, XI_GRID)
    assert report.verdict == 'strict'
    assert report.r == 2
    assert report.minor_mismatch == 0


def test_single_coalescence_point_is_weak(jt):
    report = hyperbolicity_scan(jt, T_GRID, XI_GRID)
    assert report.verdict == 'weak(2)'
    assert report.max_imag < 1e-6


def test_double_root_everywhere(double_root):
    report = hyperbolicity_scan(double_root, T_GRID, XI_GRID)
    assert report.verdict == 'weak(1)'
    assert report.r == 1


def test_non_hyperbolic_report(rotation):
    with pytest.raises(NonRealSpectrum):
        hyperbolicity_scan(rotation, T_GRID, XI_GRID)
    report = hyperbolicity_scan(rotation, T_GRID, XI_GRID, strict_errors=False)
    assert report.verdict == 'non-hyperbolic'
    assert report.max_imag == pytest.approx(64.0)
    assert report.to_dict()['grid']['t_points'] == 33


def test_symbol_from_roots():
    A = SymbolMatrix.from_roots([[0, 1], [0, 2]])
    assert np.allclose(eigenvalues_at(A, 0.5, [1.0]), [0.5, 1.0])
    assert hyperbolicity_scan(A, T_GRID, XI_GRID).verdict == 'weak(2)'


@pytest.mark.parametrize('seed', range(5))
def test_trace_and_determinant_invariants(seed):
    rng = np.random.default_rng(seed)
    A = SymbolMatrix.from_roots([rng.uniform(-1.0, 1.0, 3) for _ in range(3)])
    for t in (0.1, 0.6):
        xi = [rng.uniform(0.5, 5.0)]
        lam = eigenvalues_at(A, t, xi, tol_hyp=1e-6)
        M = A.at(t, xi)
        assert np.sum(lam) == pytest.approx(np.real(np.trace(M)), abs=1e-8)
        assert np.prod(lam) == pytest.approx(np.real(np.linalg.det(M)), rel=1e-6, abs=1e-8)


@pytest.mark.parametrize('xi', [0.5, 3.0, 40.0])
def test_eigenvalues_homogeneous_of_degree_one(jt, strict_const, xi):
    for A in (jt, strict_const):
        for t in (0.2, 0.9):
            assert np.allclose(eigenvalues_at(A, t, [2 * xi]), 2 * eigenvalues_at(A, t, [xi]))
            assert np.allclose(eigenvalues_at(A, t, [-xi]), -eigenvalues_at(A, t, [xi])[::-1])
