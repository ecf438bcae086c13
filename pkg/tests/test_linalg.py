import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slantkit.errors import (
    BasePointError,
    DimensionError,
    InvariantError,
    RankError,
    SymmetryError,
)
from slantkit.linalg import (
    AmbientPoint,
    MetricAtPoint,
    SubspaceBasis,
    TangentVector,
    gram_schmidt,
    inner,
    principal_angles,
    projector,
    sym_eigen,
)


def vec(comps, base=None):
    base = base if base is not None else AmbientPoint([0.0] * len(comps))
    return TangentVector(comps, base)


def basis(cols, orthonormal=False):
    p = AmbientPoint([0.0] * len(cols[0]))
    return SubspaceBasis([TangentVector(c, p) for c in cols], orthonormal)


class TestInner:
    def test_orthogonal_canonical(self):
        g = MetricAtPoint.identity(3)
        assert inner(g, vec([1, 0, 0]), vec([0, 1, 0])) == 0.0

    def test_squared_norm(self):
        g = MetricAtPoint.identity(3)
        assert inner(g, vec([1, 2, 2]), vec([1, 2, 2])) == 9.0

    def test_weighted(self):
        # direct bilinear-form expansion: 2*1*1 + 1*1*(-1) = 1
        g = MetricAtPoint(np.diag([2.0, 1.0]))
        p = AmbientPoint([0.0, 0.0])
        assert inner(g, vec([1, 1], p), vec([1, -1], p)) == pytest.approx(1.0)

    def test_symmetry(self):
        g = MetricAtPoint(np.array([[2.0, 0.3], [0.3, 1.0]]))
        p = AmbientPoint([1.0, 2.0])
        u, v = vec([1, 2], p), vec([-3, 0.5], p)
        assert inner(g, u, v) == pytest.approx(inner(g, v, u))

    def test_dimension_mismatch(self):
        g = MetricAtPoint.identity(3)
        with pytest.raises(DimensionError):
            inner(g, vec([1, 0]), vec([0, 1]))

    def test_base_point_mismatch(self):
        g = MetricAtPoint.identity(2)
        u = vec([1, 0], AmbientPoint([0.0, 0.0]))
        v = vec([0, 1], AmbientPoint([1.0, 0.0]))
        with pytest.raises(BasePointError):
            inner(g, u, v)


class TestGramSchmidt:
    def test_axis_scaling(self):
        g = MetricAtPoint.identity(2)
        out = gram_schmidt(g, basis([[2, 0], [0, 3]]))
        assert np.allclose(out.matrix(), np.eye(2))
        assert out.orthonormal

    def test_gram_matrix_identity(self):
        g = MetricAtPoint.identity(2)
        out = gram_schmidt(g, basis([[1, 1], [1, 0]]))
        m = out.matrix()
        assert np.max(np.abs(m.T @ m - np.eye(2))) < 1e-12

    def test_collinear_raises(self):
        with pytest.raises(RankError):
            basis([[1, 0], [2, 0]])

    def test_span_preserved(self):
        g = MetricAtPoint.identity(3)
        raw = basis([[1, 1, 0], [0, 1, 1]])
        out = gram_schmidt(g, raw)
        angles = principal_angles(g, out, gram_schmidt(g, raw))
        assert np.max(angles) < 1e-10

    def test_metric_orthonormality(self):
        g = MetricAtPoint(np.array([[2.0, 0.5], [0.5, 1.0]]))
        out = gram_schmidt(g, basis([[1, 1], [1, 0]]))
        m = out.matrix()
        assert np.max(np.abs(m.T @ g.matrix @ m - np.eye(2))) < 1e-10


class TestProjector:
    def test_axis(self):
        g = MetricAtPoint.identity(2)
        p = projector(g, basis([[1, 0]], orthonormal=True))
        assert np.allclose(p, [[1, 0], [0, 0]])

    def test_diagonal_unit(self):
        g = MetricAtPoint.identity(2)
        s = 1 / math.sqrt(2)
        p = projector(g, basis([[s, s]], orthonormal=True))
        assert np.allclose(p, [[0.5, 0.5], [0.5, 0.5]])

    def test_idempotent(self):
        g = MetricAtPoint.identity(4)
        b = gram_schmidt(g, basis([[1, 2, 0, 1], [0, 1, 1, -1]]))
        p = projector(g, b)
        assert np.max(np.abs(p @ p - p)) < 1e-12
        assert np.trace(p) == pytest.approx(2.0)

    def test_requires_orthonormal(self):
        g = MetricAtPoint.identity(2)
        with pytest.raises(InvariantError):
            projector(g, basis([[2, 0]]))

    def test_g_self_adjoint(self):
        g = MetricAtPoint(np.array([[3.0, 1.0], [1.0, 2.0]]))
        b = gram_schmidt(g, basis([[1, 1]]))
        p = projector(g, b)
        assert np.max(np.abs(g.matrix @ p - p.T @ g.matrix)) < 1e-10


class TestSymEigen:
    def test_repeated_eigenvalue(self):
        w, v = sym_eigen(np.diag([-0.36, -0.36]))
        assert np.allclose(w, [-0.36, -0.36])
        assert np.allclose(v @ v.T, np.eye(2))

    def test_zero_matrix(self):
        w, _ = sym_eigen(np.zeros((2, 2)))
        assert np.allclose(w, [0.0, 0.0])

    def test_offdiag(self):
        w, v = sym_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(w, [-1.0, 1.0])
        for j in range(2):
            assert np.allclose(np.array([[0, 1], [1, 0]]) @ v[:, j], w[j] * v[:, j])

    def test_asymmetric_rejected(self):
        with pytest.raises(SymmetryError):
            sym_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_sign_convention(self):
        _, v = sym_eigen(np.diag([1.0, 2.0]))
        for j in range(2):
            nz = np.flatnonzero(np.abs(v[:, j]) > 1e-12)
            assert v[nz[0], j] > 0


class TestPrincipalAngles:
    def test_same_span(self):
        g = MetricAtPoint.identity(2)
        a = basis([[1, 0]], orthonormal=True)
        assert principal_angles(g, a, a) == pytest.approx([0.0])

    def test_orthogonal(self):
        g = MetricAtPoint.identity(2)
        a = basis([[1, 0]], orthonormal=True)
        b = basis([[0, 1]], orthonormal=True)
        assert principal_angles(g, a, b) == pytest.approx([math.pi / 2])

    def test_quarter(self):
        g = MetricAtPoint.identity(2)
        s = 1 / math.sqrt(2)
        a = basis([[1, 0]], orthonormal=True)
        b = basis([[s, s]], orthonormal=True)
        assert principal_angles(g, a, b) == pytest.approx([math.pi / 4])

    def test_symmetric_in_arguments(self):
        g = MetricAtPoint.identity(3)
        a = gram_schmidt(g, basis([[1, 2, 0], [0, 1, 1]]))
        b = gram_schmidt(g, basis([[1, 0, 1]]))
        assert np.allclose(principal_angles(g, a, b), principal_angles(g, b, a))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(1, 4), st.randoms(use_true_random=False))
def test_gram_schmidt_property(n, r, rnd):
    r = min(r, n)
    rng = np.random.default_rng(rnd.getrandbits(32))
    mat = rng.normal(size=(n, r))
    # resample until decently conditioned (condition <= 1e6 per the contract)
    while np.linalg.cond(mat) > 1e6:
        mat = rng.normal(size=(n, r))
    g = MetricAtPoint.identity(n)
    p = AmbientPoint(np.zeros(n))
    out = gram_schmidt(g, SubspaceBasis.from_matrix(mat, p))
    m = out.matrix()
    assert np.max(np.abs(m.T @ m - np.eye(r))) < 1e-10
    proj = projector(g, out)
    assert np.max(np.abs(proj @ proj - proj)) < 1e-10
    # members of the span are fixed points
    v = mat @ rng.normal(size=r)
    assert np.linalg.norm(proj @ v - v) <= 1e-10 * max(np.linalg.norm(v), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.randoms(use_true_random=False))
def test_sym_eigen_reconstruction(n, rnd):
    rng = np.random.default_rng(rnd.getrandbits(32))
    a = rng.normal(size=(n, n))
    a = 0.5 * (a + a.T)
    w, v = sym_eigen(a)
    assert np.all(np.diff(w) >= -1e-12)
    assert np.linalg.norm(a - v @ np.diag(w) @ v.T) <= 1e-9 * max(np.linalg.norm(a), 1e-30)
    for j in range(n):
        assert np.linalg.norm(a @ v[:, j] - w[j] * v[:, j]) <= 1e-10 * max(np.linalg.norm(a), 1.0)
