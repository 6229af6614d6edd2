"""Linear operators with shifted solves, and ADI shift generation.

The Sylvester solvers only touch coefficient matrices through three
operations: ``matmat`` (apply to a block of vectors), ``shifted_solve``
(apply ``(A - shift I)^{-1}``), and ``shifted_solve_adjoint`` (apply
``((A - shift I)^H)^{-1}``).  Implementations exist for dense, diagonal and
banded matrices, for a negated operator, and for the Kronecker-sum
``I (x) A + B (x) I`` whose shifted solves reduce to one banded solve per
eigenvalue of the small factor.

Shift schedules for real-interval ADI come from the classical elliptic
construction: map the two intervals to ``[-alpha, -1] u [1, alpha]`` by a
Moebius transformation and place shifts at scaled Jacobi ``dn`` points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.special

from tenzo.bounds import interval_cross_ratio, zolotarev_interval_bound

__all__ = [
    "LinearOp",
    "DenseOp",
    "DiagOp",
    "BandedOp",
    "NegOp",
    "KronSumOp",
    "as_operator",
    "ShiftSolveError",
    "ShiftSchedule",
    "adi_shifts_interval",
]


class ShiftSolveError(np.linalg.LinAlgError):
    """A shifted linear system was (numerically) singular."""


class LinearOp:
    """Base class: a square operator of size ``n`` supporting shifted solves."""

    n: int
    is_hermitian: bool = False

    def matmat(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def shifted_solve(self, shift, b: np.ndarray) -> np.ndarray:
        """Solve (A - shift*I) y = b for each column of b."""
        raise NotImplementedError

    def shifted_solve_adjoint(self, shift, b: np.ndarray) -> np.ndarray:
        """Solve (A - shift*I)^H y = b; default valid for Hermitian A."""
        if not self.is_hermitian:
            raise NotImplementedError(
                f"{type(self).__name__} is not Hermitian; adjoint solve undefined"
            )
        return self.shifted_solve(np.conj(shift), b)

    def todense(self) -> np.ndarray:
        raise NotImplementedError


def _is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(
        np.allclose(a, a.conj().T, rtol=0.0, atol=tol * max(1.0, np.abs(a).max()))
    )


class DenseOp(LinearOp):
    def __init__(self, a: np.ndarray):
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("DenseOp needs a square matrix")
        self.a = a
        self.n = a.shape[0]
        self.is_hermitian = _is_hermitian(a)

    def matmat(self, x):
        return self.a @ x

    def shifted_solve(self, shift, b):
        m = self.a - shift * np.eye(self.n, dtype=self.a.dtype)
        try:
            return np.linalg.solve(m, b)
        except np.linalg.LinAlgError as exc:
            raise ShiftSolveError(f"singular shifted system at shift={shift}") from exc

    def shifted_solve_adjoint(self, shift, b):
        m = (self.a - shift * np.eye(self.n, dtype=self.a.dtype)).conj().T
        try:
            return np.linalg.solve(m, b)
        except np.linalg.LinAlgError as exc:
            raise ShiftSolveError(f"singular shifted system at shift={shift}") from exc

    def todense(self):
        return np.array(self.a)


class DiagOp(LinearOp):
    def __init__(self, diag: np.ndarray):
        self.d = np.asarray(diag).ravel()
        self.n = self.d.shape[0]
        self.is_hermitian = not np.iscomplexobj(self.d)

    def matmat(self, x):
        return self.d[:, None] * x

    def shifted_solve(self, shift, b):
        denom = self.d - shift
        bad = np.abs(denom) < 1e-300
        if np.any(bad):
            raise ShiftSolveError(f"shift {shift} hits a diagonal entry")
        return b / denom[:, None]

    def shifted_solve_adjoint(self, shift, b):
        denom = np.conj(self.d - shift)
        if np.any(np.abs(denom) < 1e-300):
            raise ShiftSolveError(f"shift {shift} hits a diagonal entry")
        return b / denom[:, None]

    def todense(self):
        return np.diag(self.d)


class BandedOp(LinearOp):
    """A banded matrix stored in the ``solve_banded`` diagonal-row layout.

    ``bands`` maps diagonal offsets (0 = main, +1 = first super, -1 = first
    sub) to their entries.
    """

    def __init__(self, bands: dict[int, np.ndarray], n: int):
        self.n = int(n)
        self.bands = {int(k): np.asarray(v, dtype=float) for k, v in bands.items()}
        for off, v in self.bands.items():
            if v.shape[0] != n - abs(off):
                raise ValueError(f"diagonal {off} has wrong length")
        self.upper = max((k for k in self.bands if k > 0), default=0)
        self.lower = max((-k for k in self.bands if k < 0), default=0)
        self._ab = self._to_ab()
        pos = {k for k in self.bands if k > 0}
        neg = {-k for k in self.bands if k < 0}
        self.is_hermitian = pos == neg and all(
            np.array_equal(self.bands[k], self.bands[-k]) for k in pos
        )
        self._sparse = scipy.sparse.diags(
            [self.bands[k] for k in sorted(self.bands)],
            sorted(self.bands),
            shape=(n, n),
            format="csr",
        )

    @classmethod
    def tridiagonal(cls, sub, main, sup) -> "BandedOp":
        n = len(main)
        return cls({-1: np.asarray(sub), 0: np.asarray(main), 1: np.asarray(sup)}, n)

    @classmethod
    def from_dense(cls, a: np.ndarray, bandwidth: int) -> "BandedOp":
        n = a.shape[0]
        bands = {}
        for off in range(-bandwidth, bandwidth + 1):
            diag = np.diagonal(a, off).copy()
            if np.any(diag != 0.0) or off == 0:
                bands[off] = diag
        return cls(bands, n)

    def _to_ab(self) -> np.ndarray:
        # row u - off holds diagonal `off`, stored with column alignment
        ab = np.zeros((self.upper + self.lower + 1, self.n))
        for off, v in self.bands.items():
            row = self.upper - off
            if off >= 0:
                ab[row, off : self.n] = v
            else:
                ab[row, : self.n + off] = v
        return ab

    @property
    def bandwidth(self) -> int:
        return max(self.upper, self.lower)

    def matmat(self, x):
        return self._sparse @ x

    def shifted_solve(self, shift, b):
        if np.iscomplexobj(np.asarray(shift)) or np.iscomplexobj(b):
            ab = self._ab.astype(complex)
        else:
            ab = self._ab.copy()
        ab[self.upper, :] = ab[self.upper, :] - shift
        b2 = np.atleast_2d(b.T).T if b.ndim == 1 else b
        try:
            out = scipy.linalg.solve_banded((self.lower, self.upper), ab, b2)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise ShiftSolveError(f"singular banded system at shift={shift}") from exc
        return out if b.ndim > 1 else out.ravel()

    def eigenvalues(self) -> np.ndarray:
        if self.is_hermitian:
            a_band = np.zeros((self.upper + 1, self.n))
            for off in range(0, self.upper + 1):
                if off in self.bands:
                    a_band[self.upper - off, off :] = self.bands[off]
            return scipy.linalg.eig_banded(
                a_band, lower=False, eigvals_only=True
            )
        return np.linalg.eigvals(self.todense())

    def todense(self):
        return self._sparse.toarray()


class NegOp(LinearOp):
    """The operator -A for a wrapped operator A."""

    def __init__(self, op: LinearOp):
        self.op = op
        self.n = op.n
        self.is_hermitian = op.is_hermitian

    def matmat(self, x):
        return -self.op.matmat(x)

    def shifted_solve(self, shift, b):
        return -self.op.shifted_solve(-shift, b)

    def shifted_solve_adjoint(self, shift, b):
        return -self.op.shifted_solve_adjoint(-shift, b)

    def todense(self):
        return -self.op.todense()


class KronSumOp(LinearOp):
    """``I (x) A + B (x) I`` on column-major vec of (n_a x n_b) matrices.

    ``a`` is a small dense Hermitian matrix (diagonalized once); ``b`` is any
    Hermitian operator.  A shifted solve costs one ``b`` solve per eigenvalue
    of ``a``.
    """

    def __init__(self, a: np.ndarray, b: LinearOp):
        a = np.asarray(a)
        if not _is_hermitian(a, tol=1e-10):
            raise ValueError("KronSumOp requires a Hermitian small factor")
        if not b.is_hermitian:
            raise ValueError("KronSumOp requires a Hermitian large factor")
        self.a = 0.5 * (a + a.conj().T)
        self.b = b
        self.na = a.shape[0]
        self.nb = b.n
        self.n = self.na * self.nb
        self.is_hermitian = True
        self._w, self._q = np.linalg.eigh(self.a)

    def matmat(self, x):
        one_d = x.ndim == 1
        x3 = np.reshape(x, (self.na, self.nb, -1), order="F")  # (na, nb, m)
        ax = np.tensordot(self.a, x3, axes=(1, 0))
        # Y B^T slice-wise; with a real symmetric B this is (B Y^T)^T
        xt = x3.transpose(1, 0, 2).reshape(self.nb, -1)
        bx = self.b.matmat(xt).reshape(self.nb, self.na, -1).transpose(1, 0, 2)
        out = np.reshape(ax + bx, (self.n, -1), order="F")
        return out.ravel() if one_d else out

    def shifted_solve(self, shift, b):
        one_d = b.ndim == 1
        v3 = np.reshape(b, (self.na, self.nb, -1), order="F")
        h = np.tensordot(self._q.conj().T, v3, axes=(1, 0))  # (na, nb, m)
        g = np.empty_like(h)
        for i, lam in enumerate(self._w):
            g[i] = self.b.shifted_solve(shift - lam, h[i])
        y3 = np.tensordot(self._q, g, axes=(1, 0))
        out = np.reshape(y3, (self.n, -1), order="F")
        return out.ravel() if one_d else out

    def todense(self):
        return np.kron(np.eye(self.nb), self.a) + np.kron(
            self.b.todense(), np.eye(self.na)
        )


def as_operator(a) -> LinearOp:
    if isinstance(a, LinearOp):
        return a
    return DenseOp(np.asarray(a))


# ---------------------------------------------------------------------------
# Optimal ADI shifts for a pair of disjoint real intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftSchedule:
    """k ADI shift pairs: p lie in E (zeros), q lie in F (poles)."""

    p: np.ndarray
    q: np.ndarray
    gamma: float
    predicted_factor: float

    def __post_init__(self):
        if len(self.p) != len(self.q) or len(self.p) < 1:
            raise ValueError("need k >= 1 shift pairs")

    @property
    def k(self) -> int:
        return len(self.p)

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.p.tolist(), self.q.tolist()))


def _mobius_to_standard(z1, z2, z3) -> np.ndarray:
    """Matrix of the Moebius map sending (z1, z2, z3) to (0, 1, inf)."""
    return np.array(
        [
            [z2 - z3, -z1 * (z2 - z3)],
            [z2 - z1, -z3 * (z2 - z1)],
        ],
        dtype=float,
    )


def _mobius_from_three_points(z_pts, w_pts) -> np.ndarray:
    """Coefficients (a, b, c, d) of the Moebius map sending z_pts to w_pts."""
    m1 = _mobius_to_standard(*z_pts)
    m2 = _mobius_to_standard(*w_pts)
    adj2 = np.array([[m2[1, 1], -m2[0, 1]], [-m2[1, 0], m2[0, 0]]])
    t = adj2 @ m1
    return np.array([t[0, 0], t[0, 1], t[1, 0], t[1, 1]])


def _dn_points(alpha: float, k: int) -> np.ndarray:
    """dn((2j-1) K / (2k)) for j=1..k at parameter m = 1 - 1/alpha^2."""
    m1 = 1.0 / (alpha * alpha)
    if m1 < 1e-14:
        # asymptotic evaluation; ellipj loses accuracy this close to m = 1
        big_k = 2.0 * math.log(2.0) + math.log(alpha) + (
            -1.0 + 2.0 * math.log(2.0) + math.log(alpha)
        ) * m1 / 4.0
        u = (np.arange(1, k + 1) - 0.5) * big_k / k
        sech = 1.0 / np.cosh(u)
        dn = sech + 0.25 * m1 * (np.sinh(u) * np.cosh(u) + u) * np.tanh(u) * sech
    else:
        big_k = scipy.special.ellipkm1(m1)
        u = (np.arange(1, k + 1) - 0.5) * big_k / k
        _, _, dn, _ = scipy.special.ellipj(u, 1.0 - m1)
    return dn


def adi_shifts_interval(e: tuple[float, float], f: tuple[float, float], k: int) -> ShiftSchedule:
    """Optimal ADI shifts for spectra in E = [a, b] and F = [-d2, -c2].

    The intervals must be disjoint with E to the right of F.  Transplants the
    elliptic-function optimal configuration for ``[1, alpha]`` versus
    ``[-alpha, -1]`` through the Moebius map matching the cross-ratio; running
    ADI with the returned schedule contracts the error by at most
    ``4 exp(-pi^2 k / log(16 gamma))``.
    """
    e1, e2 = float(e[0]), float(e[1])
    f1, f2 = float(f[0]), float(f[1])
    if not (e1 <= e2 and f1 <= f2):
        raise ValueError("interval endpoints out of order")
    if f2 >= e1:
        raise ValueError(f"intervals overlap or are misordered: E={e}, F={f}")
    if k < 1:
        raise ValueError("k must be >= 1")

    gamma = interval_cross_ratio((e1, e2), (f1, f2))
    alpha = 2.0 * gamma - 1.0 + 2.0 * math.sqrt(gamma * gamma - gamma)
    if alpha <= 1.0:  # touching intervals degenerate to alpha = 1
        alpha = 1.0 + 1e-15

    dn = _dn_points(alpha, k)
    z = alpha * dn  # optimal zeros in [1, alpha]

    co = _mobius_from_three_points((-alpha, -1.0, 1.0), (f1, f2, e1))
    a_m, b_m, c_m, d_m = co

    def mob(t):
        return (a_m * t + b_m) / (c_m * t + d_m)

    p = np.clip(mob(z), e1, e2)
    q = np.clip(mob(-z), f1, f2)
    factor = min(1.0, zolotarev_interval_bound(gamma, k))
    return ShiftSchedule(p=p, q=q, gamma=gamma, predicted_factor=factor)
