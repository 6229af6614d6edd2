"""Generators for the concrete tensors and tensor Sylvester problems.

Includes function samplers on tensor-product grids, the 3D Hilbert tensor
and its displacement equation, the second-order finite-difference Poisson
discretization, and an ultraspherical spectral Poisson discretization with
banded operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from tenzo.bounds import SpectralSet
from tenzo.core import DenseTensor, kmode_product
from tenzo.formats import CPTensor, TTTensor, TuckerTensor
from tenzo.operators import BandedOp, DiagOp, LinearOp
from tenzo.sylvester import SylvesterProblem3D

__all__ = [
    "GridSpec",
    "sample_function",
    "fourier_like",
    "gaussian_bumps",
    "uniform_centers",
    "hilbert_tensor",
    "hilbert_displacement",
    "fd_poisson",
    "spectral_poisson",
    "SpectralPoissonOperators",
    "SpectralPoissonProblem",
    "ultraspherical_mass_matrix",
    "weighted_basis_matrix",
]


@dataclass(frozen=True)
class GridSpec:
    """A tensor-product grid: per-dimension intervals and point counts.

    Equispaced grids include both endpoints; Chebyshev grids place
    ``cos(j pi / (n-1))`` mapped to the interval.
    """

    kind: str
    intervals: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("equispaced", "chebyshev"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if len(self.intervals) != len(self.counts):
            raise ValueError("need one interval per dimension")
        if any(n < 2 for n in self.counts):
            raise ValueError("grids need at least 2 points per dimension")

    @classmethod
    def cube(cls, kind: str, n: int, d: int = 3, lo: float = -1.0, hi: float = 1.0):
        return cls(kind, tuple((lo, hi) for _ in range(d)), tuple(n for _ in range(d)))

    def points(self, dim: int) -> np.ndarray:
        lo, hi = self.intervals[dim]
        n = self.counts[dim]
        if self.kind == "equispaced":
            return np.linspace(lo, hi, n)
        j = np.arange(n)
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(j * np.pi / (n - 1))


def sample_function(f, grid: GridSpec) -> DenseTensor:
    """Sample ``f(x_1, ..., x_d)`` on the grid; entries must be finite."""
    axes = [grid.points(i) for i in range(len(grid.counts))]
    mesh = np.meshgrid(*axes, indexing="ij")
    try:
        vals = np.asarray(f(*mesh))
        if vals.shape != tuple(grid.counts):
            raise ValueError
    except (ValueError, TypeError):
        vals = np.vectorize(f)(*mesh)
    if not np.all(np.isfinite(vals)):
        raise ValueError("sampled function returned a non-finite value")
    return DenseTensor(vals)


def fourier_like(m_param: float, n: int) -> DenseTensor:
    """Sample ``exp(i M pi x y z)`` on an equispaced n^3 grid in [-1,1]^3."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if m_param <= 0:
        raise ValueError("M must be positive")
    x = np.linspace(-1.0, 1.0, n)
    xyz = np.einsum("i,j,k->ijk", x, x, x)
    return DenseTensor(np.exp(1j * m_param * np.pi * xyz))


def uniform_centers(m_bumps: int, seed=None) -> np.ndarray:
    """``m_bumps`` centers drawn uniformly from [-1,1]^3 with a seeded PCG64."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(m_bumps, 3))


def gaussian_bumps(m_bumps: int, gamma: float, n: int, centers=None, seed=None) -> DenseTensor:
    """Sample a sum of Gaussian bumps on an equispaced n^3 grid in [-1,1]^3.

    Each bump is separable, so the tensor is assembled from per-axis factor
    matrices.  When ``centers`` is omitted they are drawn with
    :func:`uniform_centers` from ``seed``.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if centers is None:
        centers = uniform_centers(m_bumps, seed)
    centers = np.asarray(centers, dtype=float)
    if centers.shape != (m_bumps, 3):
        raise ValueError(f"centers must be ({m_bumps}, 3)")
    x = np.linspace(-1.0, 1.0, n)
    fx = np.exp(-gamma * (x[None, :] - centers[:, 0:1]) ** 2)
    fy = np.exp(-gamma * (x[None, :] - centers[:, 1:2]) ** 2)
    fz = np.exp(-gamma * (x[None, :] - centers[:, 2:3]) ** 2)
    return DenseTensor(np.einsum("ja,jb,jc->abc", fx, fy, fz))


# ---------------------------------------------------------------------------
# Hilbert tensor
# ---------------------------------------------------------------------------


def hilbert_tensor(n: int) -> DenseTensor:
    """The n x n x n tensor with entries 1 / (i + j + k - 2), 1-based."""
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(1, n + 1, dtype=float)
    denom = i[:, None, None] + i[None, :, None] + i[None, None, :] - 2.0
    return DenseTensor(1.0 / denom)


def hilbert_displacement(n: int) -> SylvesterProblem3D:
    """Displacement equation of the Hilbert tensor.

    ``H x_1 D + H x_2 D + H x_3 D = S`` with ``D = diag(i - 2/3)`` and S the
    all-ones tensor; the spectra live in [1/3, (3n-2)/3].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = np.arange(1, n + 1, dtype=float) - 2.0 / 3.0
    ones = np.ones((n, 1))
    rhs = CPTensor(np.array([1.0]), (ones, ones, ones))
    spec = SpectralSet.interval(1.0 / 3.0, (3.0 * n - 2.0) / 3.0)
    return SylvesterProblem3D(
        a=(DiagOp(d), DiagOp(d), DiagOp(d)),
        spectra=(spec, spec, spec),
        rhs_cp=rhs,
    )


# ---------------------------------------------------------------------------
# Finite-difference Poisson
# ---------------------------------------------------------------------------


def fd_poisson(n: int, f=None) -> SylvesterProblem3D:
    """Second-order finite-difference Poisson problem on [-1,1]^3.

    The grid has ``n - 1`` interior points per axis with spacing ``h = 2/n``;
    the coefficient matrices are the (positive definite) second-difference
    matrices ``(1/h^2) tridiag(-1, 2, -1)`` whose eigenvalues
    ``4/h^2 sin^2(pi k / (2n))`` lie inside [1, n^2].  ``f`` defaults to the
    constant 1, for which the right-hand side is stored in rank-1 form.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    m = n - 1
    h = 2.0 / n
    main = np.full(m, 2.0 / h**2)
    off = np.full(m - 1, -1.0 / h**2)
    k_op = BandedOp({-1: off, 0: main, 1: off}, m)
    spec = SpectralSet.interval(1.0, float(n) ** 2)

    if f is None:
        ones = np.ones((m, 1))
        rhs_cp = CPTensor(np.array([1.0]), (ones, ones, ones))
        return SylvesterProblem3D(
            a=(k_op, k_op, k_op), spectra=(spec, spec, spec), rhs_cp=rhs_cp
        )
    pts = np.arange(1, n) * h - 1.0
    mesh = np.meshgrid(pts, pts, pts, indexing="ij")
    vals = np.asarray(f(*mesh))
    if not np.all(np.isfinite(vals)):
        raise ValueError("right-hand side function returned a non-finite value")
    return SylvesterProblem3D(
        a=(k_op, k_op, k_op),
        spectra=(spec, spec, spec),
        rhs_dense=DenseTensor(vals),
    )


def fd_poisson_interior_points(n: int) -> np.ndarray:
    return np.arange(1, n) * (2.0 / n) - 1.0


# ---------------------------------------------------------------------------
# Ultraspherical spectral Poisson
# ---------------------------------------------------------------------------

# For the weighted basis phi_j(x) = (1 - x^2) * C~_j(x), with C~_j the
# orthonormalized ultraspherical polynomial of parameter 3/2, the second
# derivative is diagonal:  -phi_j'' = (j+1)(j+2) C~_j.  Multiplication by
# (1 - x^2) in the orthonormal basis is a symmetric pentadiagonal matrix M.


def _gegenbauer_h(j: np.ndarray) -> np.ndarray:
    # squared L^2_w norm of C_j^{(3/2)} with weight (1-x^2)
    return (j + 1.0) * (j + 2.0) / (j + 1.5)


def ultraspherical_mass_matrix(n: int) -> np.ndarray:
    """Multiplication by ``(1 - x^2)`` in the orthonormalized C^(3/2) basis.

    Symmetric pentadiagonal (offsets 0 and +-2 only) with positive spectrum.
    """
    j = np.arange(n, dtype=float)
    a = (j + 1.0) / (2.0 * j + 3.0)  # x C_j  ->  a_j C_{j+1} + b_j C_{j-1}
    b = (j + 2.0) / (2.0 * j + 3.0)
    h = _gegenbauer_h(j)

    diag = np.empty(n)
    diag[0] = 1.0 - a[0] * b[1]
    for q in range(1, n):
        bq1 = b[q + 1] if q + 1 < n else (q + 3.0) / (2.0 * q + 5.0)
        diag[q] = 1.0 - (a[q] * bq1 + b[q] * a[q - 1])
    off2 = np.empty(max(n - 2, 0))
    for q in range(n - 2):
        off2[q] = -a[q] * a[q + 1] * math.sqrt(h[q + 2] / h[q])

    m = np.zeros((n, n))
    np.fill_diagonal(m, diag)
    for q in range(n - 2):
        m[q, q + 2] = off2[q]
        m[q + 2, q] = off2[q]
    return m


def weighted_basis_matrix(pts: np.ndarray, n: int) -> np.ndarray:
    """Rows phi_j(x) = (1-x^2) C~_j(x) evaluated at ``pts`` (len(pts) x n)."""
    pts = np.asarray(pts, dtype=float)
    c = np.empty((len(pts), n))
    c[:, 0] = 1.0
    if n > 1:
        c[:, 1] = 3.0 * pts
    for j in range(1, n - 1):
        # C_{j+1} = ((2j+3) x C_j - (j+2) C_{j-1}) / (j+1)
        c[:, j + 1] = ((2.0 * j + 3.0) * pts * c[:, j] - (j + 2.0) * c[:, j - 1]) / (
            j + 1.0
        )
    h = _gegenbauer_h(np.arange(n, dtype=float))
    return (1.0 - pts[:, None] ** 2) * c / np.sqrt(h)[None, :]


@dataclass(frozen=True)
class SpectralPoissonOperators:
    """The ultraspherical Poisson building blocks.

    ``d_diag`` is the diagonal of D (negative second-derivative eigenvalues
    with the sign convention ``D_jj = -(j+1)(j+2)``), ``m_mat`` the symmetric
    pentadiagonal multiplication matrix, and ``a_mat`` the symmetric
    pentadiagonal matrix similar to ``D^{-1} M`` whose spectrum is verified
    to lie inside ``[-1, -1/(30 n^4)]`` at construction.
    """

    d_diag: np.ndarray
    m_mat: np.ndarray
    a_mat: np.ndarray
    n: int

    @property
    def bandwidth(self) -> int:
        return 2


class SpectralShiftedOp(LinearOp):
    """The positive operator ``P = S M^{-1} S`` with ``S = diag(sqrt((j+1)(j+2)))``.

    ``P`` equals ``-A^{-1}`` for the spectral Poisson matrix A; its spectrum
    lies in [1, 30 n^4].  Shifted solves reduce to one pentadiagonal solve:
    ``(P - q I)^{-1} v = S (L - q M)^{-1} M S^{-1} v``.
    """

    def __init__(self, m_mat: np.ndarray):
        self.n = m_mat.shape[0]
        j = np.arange(self.n, dtype=float)
        self.l_diag = (j + 1.0) * (j + 2.0)
        self.s_diag = np.sqrt(self.l_diag)
        self.m_op = BandedOp.from_dense(m_mat, 2)
        self.is_hermitian = True

    def _solve_banded_shifted(self, shift, rhs):
        # (L - shift*M) x = rhs, pentadiagonal
        ab = -shift * self.m_op._ab
        ab[self.m_op.upper, :] += self.l_diag
        return scipy.linalg.solve_banded((2, 2), ab, rhs)

    def matmat(self, x):
        one_d = x.ndim == 1
        xm = x[:, None] if one_d else x
        y = self.s_diag[:, None] * xm
        z = scipy.linalg.solve_banded((2, 2), self.m_op._ab, y)
        out = self.s_diag[:, None] * z
        return out.ravel() if one_d else out

    def shifted_solve(self, shift, b):
        one_d = b.ndim == 1
        bm = b[:, None] if one_d else b
        rhs = self.m_op.matmat(bm / self.s_diag[:, None])
        w = self._solve_banded_shifted(shift, rhs)
        out = self.s_diag[:, None] * w
        return out.ravel() if one_d else out

    def todense(self):
        minv_s = np.linalg.solve(self.m_op.todense(), np.diag(self.s_diag))
        return self.s_diag[:, None] * minv_s


@dataclass
class SpectralPoissonProblem:
    """The spectral Poisson problem in normalized (all-positive) form.

    ``problem`` holds ``Xh x_k P = Gh`` with ``P = S M^{-1} S`` SPD; the
    physical coefficient tensor is ``X = Xh x_k S^{-1}`` and
    ``u = sum X_pqr phi_p phi_q phi_r`` with the weighted basis phi.
    """

    problem: SylvesterProblem3D
    operators: SpectralPoissonOperators

    @property
    def n(self) -> int:
        return self.operators.n

    def coefficients_from_solution(self, xh) -> DenseTensor:
        """Map a solved tensor back to weighted-basis coefficients X."""
        from tenzo.formats import reconstruct

        sinv = 1.0 / np.sqrt((np.arange(self.n) + 1.0) * (np.arange(self.n) + 2.0))
        if isinstance(xh, TTTensor):
            cores = list(xh.cores)
            cores = [c * sinv[None, :, None] for c in cores]
            return reconstruct(TTTensor(tuple(cores)))
        if isinstance(xh, TuckerTensor):
            # scaled factors lose orthonormality; expand through the core
            dense = reconstruct(xh)
            out = dense
            for k in range(1, 4):
                out = kmode_product(out, np.diag(sinv), k)
            return out
        dense = xh if isinstance(xh, DenseTensor) else DenseTensor(np.asarray(xh))
        out = dense
        for k in range(1, 4):
            out = kmode_product(out, np.diag(sinv), k)
        return out

    def solution_scaled_tt(self, xh: TTTensor) -> TTTensor:
        sinv = 1.0 / np.sqrt((np.arange(self.n) + 1.0) * (np.arange(self.n) + 2.0))
        return TTTensor(tuple(c * sinv[None, :, None] for c in xh.cores))

    def evaluate_u(self, coeffs: DenseTensor, xs, ys, zs) -> np.ndarray:
        """Evaluate u on the lattice ``xs x ys x zs`` from coefficients X."""
        bx = weighted_basis_matrix(np.asarray(xs, dtype=float), self.n)
        by = weighted_basis_matrix(np.asarray(ys, dtype=float), self.n)
        bz = weighted_basis_matrix(np.asarray(zs, dtype=float), self.n)
        out = np.einsum("ap,pqr->aqr", bx, coeffs.data)
        out = np.einsum("bq,aqr->abr", by, out)
        out = np.einsum("cr,abr->abc", bz, out)
        return out


def spectral_poisson(n: int, f_coeffs=None) -> SpectralPoissonProblem:
    """Ultraspherical spectral discretization of ``-lap u = f`` on [-1,1]^3.

    Builds the diagonal D and pentadiagonal M, verifies the spectrum of the
    symmetric pentadiagonal ``A`` (similar to ``D^{-1} M``) lies inside
    ``[-1, -1/(30 n^4)]``, and returns the sign-normalized problem
    ``Xh x_k P = Gh`` with ``P = -A^{-1}`` SPD and spectra in [1, 30 n^4].

    ``f_coeffs`` are coefficients of f in the orthonormalized C^(3/2) basis
    (a :class:`CPTensor` or :class:`DenseTensor`); the default f = 1 has the
    rank-1 coefficient tensor ``(4/3)^{3/2} e_0 o e_0 o e_0``.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    j = np.arange(n, dtype=float)
    l_diag = (j + 1.0) * (j + 2.0)
    s_diag = np.sqrt(l_diag)
    m_mat = ultraspherical_mass_matrix(n)

    # A = -L^{-1/2} M L^{-1/2}: symmetric pentadiagonal, similar to D^{-1} M
    # (divide by the outer product so symmetry is exact in floating point)
    a_mat = -m_mat / np.outer(s_diag, s_diag)
    ops = SpectralPoissonOperators(
        d_diag=-l_diag, m_mat=m_mat, a_mat=a_mat, n=n
    )

    lam = scipy.linalg.eigh(a_mat, eigvals_only=True)
    lo, hi = -1.0, -1.0 / (30.0 * float(n) ** 4)
    if lam.min() < lo - 1e-12 or lam.max() > hi + 1e-15:
        raise ValueError(
            f"spectral enclosure violated: eigenvalues in [{lam.min():.3e}, "
            f"{lam.max():.3e}], expected within [{lo:.3e}, {hi:.3e}]"
        )

    p_op = SpectralShiftedOp(m_mat)
    spec = SpectralSet.interval(1.0, 30.0 * float(n) ** 4)

    def transform_vec(v: np.ndarray) -> np.ndarray:
        # S M^{-1} applied to a coefficient vector
        return s_diag * scipy.linalg.solve(m_mat, v)

    if f_coeffs is None:
        e0 = np.zeros(n)
        e0[0] = 1.0
        g = transform_vec(e0)[:, None]
        rhs = CPTensor(np.array([(4.0 / 3.0) ** 1.5]), (g, g, g))
        problem = SylvesterProblem3D(
            a=(p_op, p_op, p_op), spectra=(spec, spec, spec), rhs_cp=rhs
        )
    elif isinstance(f_coeffs, CPTensor):
        factors = tuple(
            np.column_stack([transform_vec(a[:, t]) for t in range(f_coeffs.rank)])
            for a in f_coeffs.factors
        )
        rhs = CPTensor(f_coeffs.weights.copy(), factors)
        problem = SylvesterProblem3D(
            a=(p_op, p_op, p_op), spectra=(spec, spec, spec), rhs_cp=rhs
        )
    else:
        dense = f_coeffs if isinstance(f_coeffs, DenseTensor) else DenseTensor(np.asarray(f_coeffs))
        tr = s_diag[:, None] * np.linalg.inv(m_mat)
        g = dense
        for k in range(1, 4):
            g = kmode_product(g, tr, k)
        problem = SylvesterProblem3D(
            a=(p_op, p_op, p_op), spectra=(spec, spec, spec), rhs_dense=g
        )
    return SpectralPoissonProblem(problem=problem, operators=ops)
