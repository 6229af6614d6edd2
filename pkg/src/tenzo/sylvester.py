"""Constructive solvers for 3D tensor Sylvester equations.

The problem is ``X x_1 A1 + X x_2 A2 + X x_3 A3 = F`` with normal coefficient
matrices whose spectra are certified by :class:`~tenzo.bounds.SpectralSet`
enclosures and a low-rank right-hand side.

Solvers:

* :func:`adi_solve` / :func:`fadi_solve` -- the matrix-equation building
  blocks (dense ADI and the factored variant that never forms the solution).
* :func:`tt_sylvester_solve_3d` -- the fADI-based tensor-train solver.  Only
  the *column space* of the first unfolding is computed (the row-space factor
  is never touched), which is what makes the banded-coefficient path run in
  near-linear time.
* :func:`tucker_sylvester_solve_3d` -- per-mode fADI column spaces plus a
  diagonalization solve for the projected core.
* :func:`direct_kron_solve_3d` / :func:`eigen_solve_3d` -- dense oracles.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from tenzo.bounds import (
    SpectralSet,
    check_minkowski_singly_separated,
    check_minkowski_sum_separated,
    interval_cross_ratio,
    k_for_epsilon_interval,
)
from tenzo.core import DenseTensor, frobenius_norm, unfold
from tenzo.formats import CPTensor, TTTensor, TuckerTensor, reconstruct
from tenzo.operators import (
    KronSumOp,
    LinearOp,
    NegOp,
    ShiftSchedule,
    ShiftSolveError,
    adi_shifts_interval,
    as_operator,
)

__all__ = [
    "SylvesterProblem3D",
    "SingularProblemError",
    "adi_solve",
    "fadi_solve",
    "fadi_column_space",
    "shifted_kron_solve",
    "tt_sylvester_solve_3d",
    "tucker_sylvester_solve_3d",
    "direct_kron_solve_3d",
    "eigen_solve_3d",
    "residual_3d",
]

DIRECT_SOLVE_CAP = 2**17


class SingularProblemError(ValueError):
    """The Sylvester operator is singular (an eigenvalue sum vanishes)."""


def khatri_rao(slow: np.ndarray, fast: np.ndarray) -> np.ndarray:
    """Column-wise Kronecker product; ``fast`` indexes vary fastest."""
    r = slow.shape[1]
    if fast.shape[1] != r:
        raise ValueError("factor column counts differ")
    return (fast[:, None, :] * slow[None, :, :]).reshape(-1, r, order="F")


@dataclass
class SylvesterProblem3D:
    """Coefficient operators, spectra certificates, and a low-rank RHS.

    The right-hand side is either separable (``rhs_cp``, preferred: every
    unfolding factor is then formed without densifying) or dense
    (``rhs_dense``, oracle scale; factors come from truncated SVDs).
    """

    a: tuple
    spectra: tuple[SpectralSet, SpectralSet, SpectralSet]
    rhs_cp: CPTensor | None = None
    rhs_dense: DenseTensor | None = None
    _svd_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.a = tuple(as_operator(op) for op in self.a)
        if len(self.a) != 3 or len(self.spectra) != 3:
            raise ValueError("need exactly three operators and three spectra")
        if self.rhs_cp is None and self.rhs_dense is None:
            raise ValueError("a right-hand side is required")
        ext = self.extents
        if self.rhs_cp is not None and self.rhs_cp.extents != ext:
            raise ValueError("rhs_cp extents do not match the operators")
        if self.rhs_dense is not None and self.rhs_dense.extents != ext:
            raise ValueError("rhs_dense extents do not match the operators")

    @property
    def extents(self) -> tuple[int, int, int]:
        return tuple(op.n for op in self.a)

    def rhs_tensor(self, cap: int = DIRECT_SOLVE_CAP) -> DenseTensor:
        if self.rhs_dense is not None:
            return self.rhs_dense
        return reconstruct(self.rhs_cp, cap=cap)

    def rhs_norm(self) -> float:
        if self.rhs_dense is not None:
            return self.rhs_dense.norm()
        cp = self.rhs_cp
        # Gram-based norm, no densification
        g = np.outer(cp.weights.conj(), cp.weights)
        for a in cp.factors:
            g = g * (a.conj().T @ a)
        return float(np.sqrt(max(g.sum().real, 0.0)))

    # -- low-rank factors of unfoldings / matricizations -------------------

    def _dense_factors(self, mat: np.ndarray, key: str):
        if key not in self._svd_cache:
            u, s, vh = np.linalg.svd(mat, full_matrices=False)
            keep = max(1, int(np.sum(s > 1e-13 * s[0]))) if s.size else 1
            self._svd_cache[key] = (u[:, :keep] * s[:keep], vh[:keep].conj().T)
        return self._svd_cache[key]

    def unfolding_factors(self, j: int):
        """(W, Z) with the j-th unfolding equal to W Z^H, j in {1, 2}."""
        if j not in (1, 2):
            raise ValueError("unfolding factors exist for j in {1, 2}")
        if self.rhs_cp is not None:
            u1, u2, u3 = self.rhs_cp.factors
            w = self.rhs_cp.weights
            if j == 1:
                return u1 * w, khatri_rao(u3, u2)
            return khatri_rao(u2, u1) * w, u3
        mat = unfold(self.rhs_dense, j).data
        return self._dense_factors(mat, f"unfold{j}")

    def unfolding_left_factor(self, j: int) -> np.ndarray:
        if self.rhs_cp is not None:
            u1, u2, u3 = self.rhs_cp.factors
            w = self.rhs_cp.weights
            if j == 1:
                return u1 * w
            if j == 2:
                return khatri_rao(u2, u1) * w
            raise ValueError("unfolding factors exist for j in {1, 2}")
        return self.unfolding_factors(j)[0]

    def matricization_left_factor(self, j: int) -> np.ndarray:
        """Left factor of the mode-j matricization (cyclic column order)."""
        if self.rhs_cp is not None:
            w = self.rhs_cp.weights
            return self.rhs_cp.factors[j - 1] * w
        from tenzo.core import matricize

        mat = matricize(self.rhs_dense, j).data
        return self._dense_factors(mat, f"matricize{j}")[0]

    def projected_step2_factors(self, u1: np.ndarray):
        """Factors of (I (x) U1^H) F_2 for the second solve of the TT pass."""
        if self.rhs_cp is not None:
            f1, f2, f3 = self.rhs_cp.factors
            w = self.rhs_cp.weights
            return khatri_rao(f2, u1.conj().T @ f1) * w, f3
        w2, z2 = self.unfolding_factors(2)
        n1, n2 = self.extents[0], self.extents[1]
        s1 = u1.shape[1]
        w2p = np.einsum(
            "si,ijr->sjr", u1.conj().T, w2.reshape(n1, n2, -1, order="F")
        ).reshape(s1 * n2, -1, order="F")
        return w2p, z2


# ---------------------------------------------------------------------------
# ADI and factored ADI for AX - XB = F
# ---------------------------------------------------------------------------


def adi_solve(a: np.ndarray, b: np.ndarray, f_rhs: np.ndarray, shifts: ShiftSchedule) -> np.ndarray:
    """Dense ADI for ``A X - X B = F`` with the given shift schedule.

    After k steps the error satisfies
    ``||X_k - X|| <= 4 exp(-pi^2 k / log(16 gamma)) ||X||`` for normal A, B
    with spectra inside the intervals the schedule was built for.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    x = np.zeros_like(f_rhs, dtype=np.result_type(a, b, f_rhs))
    eye_a = np.eye(a.shape[0], dtype=a.dtype)
    eye_b = np.eye(b.shape[0], dtype=b.dtype)
    for p_i, q_i in zip(shifts.p, shifts.q):
        try:
            half = np.linalg.solve(a - q_i * eye_a, x @ (b - q_i * eye_b) + f_rhs)
            x = np.linalg.solve((b - p_i * eye_b).T, ((a - p_i * eye_a) @ half - f_rhs).T).T
        except np.linalg.LinAlgError as exc:
            raise ShiftSolveError(f"singular shifted system in ADI: {exc}") from exc
    return x


def fadi_solve(a, b, m: np.ndarray, n: np.ndarray, shifts: ShiftSchedule):
    """Factored ADI for ``A X - X B = M N^H``.

    Returns ``(Z, D, Y)`` with ``X ~= Z diag(D) Y^H``; Z gains ``nu`` columns
    per step and the dense solution is never formed.
    """
    a_op = as_operator(a)
    b_op = as_operator(b)
    m = np.atleast_2d(m.T).T if m.ndim == 1 else m
    n = np.atleast_2d(n.T).T if n.ndim == 1 else n
    nu = m.shape[1]
    p, q = shifts.p, shifts.q

    z_blocks = [a_op.shifted_solve(q[0], m)]
    y_blocks = [b_op.shifted_solve_adjoint(p[0], n)]
    d_vals = [q[0] - p[0]]
    for i in range(len(p) - 1):
        z_next = z_blocks[-1] + (q[i + 1] - p[i]) * a_op.shifted_solve(
            q[i + 1], z_blocks[-1]
        )
        y_next = y_blocks[-1] + np.conj(p[i + 1] - q[i]) * b_op.shifted_solve_adjoint(
            p[i + 1], y_blocks[-1]
        )
        z_blocks.append(z_next)
        y_blocks.append(y_next)
        d_vals.append(q[i + 1] - p[i + 1])

    z = np.hstack(z_blocks)
    y = np.hstack(y_blocks)
    d = np.repeat(np.asarray(d_vals), nu)
    return z, d, y


def fadi_column_space(a, m: np.ndarray, shifts: ShiftSchedule):
    """The Z factor (and block scales) of fADI; needs only A-side solves."""
    a_op = as_operator(a)
    m = np.atleast_2d(m.T).T if m.ndim == 1 else m
    nu = m.shape[1]
    p, q = shifts.p, shifts.q
    z_blocks = [a_op.shifted_solve(q[0], m)]
    d_vals = [q[0] - p[0]]
    for i in range(len(p) - 1):
        z_blocks.append(
            z_blocks[-1]
            + (q[i + 1] - p[i]) * a_op.shifted_solve(q[i + 1], z_blocks[-1])
        )
        d_vals.append(q[i + 1] - p[i + 1])
    return np.hstack(z_blocks), np.repeat(np.asarray(d_vals), nu)


def truncated_orthobasis(z: np.ndarray, col_scales: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis of the dominant columns of ``z``.

    Columns are weighted by their fADI block scales, orthogonalized by a
    column-pivoted QR, and truncated where the R diagonal falls below
    ``rel_tol`` times its leading entry.
    """
    zs = z * np.abs(col_scales)[None, :]
    q_mat, r_mat, _ = scipy.linalg.qr(zs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r_mat))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros((z.shape[0], 0))
    keep = max(1, int(np.sum(diag >= rel_tol * diag[0])))
    return q_mat[:, :keep]


def shifted_kron_solve(a_small: np.ndarray, b, rhs: np.ndarray, shift,
                       spectra=None, dense_cap: int = 4096, tol: float = 1e-10) -> np.ndarray:
    """Solve ``(I (x) A + B (x) I + shift I) vec(Y) = vec(rhs)`` for Y.

    The Kronecker matrix is never materialized: the system is the Sylvester
    equation ``A Y + Y (B^T + shift I) = rhs``.  Small systems go through
    dense Bartels-Stewart; Hermitian ``A`` uses diagonalization with one
    B-solve per eigenvalue; otherwise an inner ADI runs on the interval
    ``spectra = (E, F)`` of ``A + shift`` versus ``-B`` and raises with the
    achieved residual if it fails to converge.
    """
    a_small = np.asarray(a_small)
    b_op = as_operator(b)
    na, nb = a_small.shape[0], b_op.n
    if rhs.shape != (na, nb):
        raise ValueError("rhs must be (n_a, n_b)")

    if na * nb <= dense_cap:
        b_dense = b_op.todense()
        return scipy.linalg.solve_sylvester(
            a_small + shift * np.eye(na), b_dense.T, rhs
        )

    if np.allclose(a_small, a_small.conj().T, atol=1e-10 * max(1.0, np.abs(a_small).max())):
        op = KronSumOp(a_small, b_op)
        return op.shifted_solve(-shift, rhs.reshape(na * nb, order="F")).reshape(
            (na, nb), order="F"
        )

    if spectra is None:
        raise ValueError("inner ADI needs interval spectra for a non-Hermitian factor")
    e_int, f_int = spectra
    gamma = interval_cross_ratio(e_int, f_int)
    k = k_for_epsilon_interval(gamma, min(0.5, tol))
    schedule = adi_shifts_interval(e_int, f_int, k)
    b_dense = b_op.todense()
    y = adi_solve(a_small + shift * np.eye(na), -b_dense.T, rhs, schedule)
    resid = np.linalg.norm(a_small @ y + y @ (b_dense.T + shift * np.eye(nb)) - rhs)
    if resid > tol * max(np.linalg.norm(rhs), 1e-300):
        raise ShiftSolveError(
            f"inner ADI did not converge: achieved residual {resid:.3e}"
        )
    return y


# ---------------------------------------------------------------------------
# The TT-format solver
# ---------------------------------------------------------------------------


def _interval_pairs_with_warning(problem: SylvesterProblem3D):
    if any(s.kind == "disk" for s in problem.spectra):
        warnings.warn(
            "disk spectra: running with heuristic real-interval shifts "
            "(optimal complex shifts are not implemented)",
            RuntimeWarning,
        )
        sets = [
            SpectralSet.interval(s.z0 - s.eta, s.z0 + s.eta)
            if s.kind == "disk"
            else s
            for s in problem.spectra
        ]
    else:
        sets = list(problem.spectra)
    return sets, check_minkowski_sum_separated(sets)


def _interval_schedule(pair, eps_over_sqrt_d: float) -> ShiftSchedule:
    e, f = pair
    gamma = interval_cross_ratio((e.a, e.b), (f.a, f.b))
    k = k_for_epsilon_interval(gamma, eps_over_sqrt_d)
    return adi_shifts_interval((e.a, e.b), (f.a, f.b), k)


def _zero_tt(extents) -> TTTensor:
    return TTTensor(tuple(np.zeros((1, n, 1)) for n in extents))


def tt_sylvester_solve_3d(problem: SylvesterProblem3D, eps: float) -> TTTensor:
    """Solve the 3D tensor Sylvester equation in tensor-train format.

    Pass 1 computes an orthonormal column space ``U1`` of the first unfolding
    with factored ADI (A1-solves only).  Pass 2 solves the projected
    equation ``(I (x) U1^H A1 U1 + A2 (x) I) C2 + C2 A3^T = (I (x) U1^H) F_2``
    with fADI and compresses ``C2`` into the second and third cores by
    QR + SVD.  The number of ADI steps per pass is the interval-bound value
    for target ``eps / sqrt(3)``, so the TT ranks never exceed the
    displacement rank bound at accuracy ``eps``.
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    n1, n2, n3 = problem.extents
    if problem.rhs_norm() == 0.0:
        return _zero_tt(problem.extents)
    sets, pairs = _interval_pairs_with_warning(problem)
    a1, a2, a3 = problem.a
    delta = eps / math.sqrt(3.0)

    # pass 1: column space of the first unfolding
    sched1 = _interval_schedule(pairs[0], delta)
    w1 = problem.unfolding_left_factor(1)
    z1, d1 = fadi_column_space(a1, w1, sched1)
    u1 = truncated_orthobasis(z1, d1, delta)
    if u1.shape[1] == 0:
        return _zero_tt(problem.extents)
    s1 = u1.shape[1]

    # pass 2: projected equation for C2 = reshape of the remaining factor
    a1_proj = u1.conj().T @ a1.matmat(u1)
    a1_proj = 0.5 * (a1_proj + a1_proj.conj().T)
    big = KronSumOp(a1_proj, a2)
    b_op = NegOp(a3)
    sched2 = _interval_schedule(pairs[1], delta)
    m2, n2fact = problem.projected_step2_factors(u1)
    v2, d2, y2 = fadi_solve(big, b_op, m2, n2fact, sched2)

    # compress C2 ~= U2 Sigma T2^H
    qv, rv = np.linalg.qr(v2)
    qy, ry = np.linalg.qr(y2)
    mid = (rv * d2[None, :]) @ ry.conj().T
    uu, sig, vvh = np.linalg.svd(mid)
    if sig.size == 0 or sig[0] == 0.0:
        return _zero_tt(problem.extents)
    s2 = max(1, int(np.sum(sig >= delta * sig[0])))
    u2 = qv @ uu[:, :s2]
    t2 = qy @ vvh[:s2].conj().T

    core1 = np.reshape(u1, (1, n1, s1))
    core2 = np.reshape(u2, (s1, n2, s2), order="F")
    core3 = np.reshape(sig[:s2, None] * t2.conj().T, (s2, n3, 1))
    return TTTensor((core1, core2, core3))


# ---------------------------------------------------------------------------
# The Tucker-format solver
# ---------------------------------------------------------------------------


def _core_rhs(problem: SylvesterProblem3D, bases) -> np.ndarray:
    if problem.rhs_cp is not None:
        cp = problem.rhs_cp
        projected = [u.conj().T @ f for u, f in zip(bases, cp.factors)]
        return np.einsum("t,at,bt,ct->abc", cp.weights, *projected)
    from tenzo.core import kmode_product

    g = problem.rhs_dense
    for j, u in enumerate(bases, start=1):
        g = kmode_product(g, u.conj().T, j)
    return g.data


def _diagonal_core_solve(projected_ops, g: np.ndarray) -> np.ndarray:
    """Solve the small projected Sylvester system by diagonalization.

    Falls back to a dense Kronecker solve when an eigenvector matrix is too
    ill-conditioned to trust.
    """
    eigs, vecs, invs = [], [], []
    ok = True
    for m in projected_ops:
        if np.allclose(m, m.conj().T, atol=1e-10 * max(1.0, np.abs(m).max())):
            w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
            vi = v.conj().T
        else:
            w, v = np.linalg.eig(m)
            if np.linalg.cond(v) > 1e10:
                ok = False
                break
            vi = np.linalg.inv(v)
        eigs.append(w)
        vecs.append(v)
        invs.append(vi)

    if ok:
        gt = np.einsum("ip,pqr->iqr", invs[0], g)
        gt = np.einsum("jq,iqr->ijr", invs[1], gt)
        gt = np.einsum("kr,ijr->ijk", invs[2], gt)
        denom = (
            eigs[0][:, None, None] + eigs[1][None, :, None] + eigs[2][None, None, :]
        )
        scale = np.abs(denom).max()
        if np.abs(denom).min() < 1e-14 * max(scale, 1.0):
            raise SingularProblemError("an eigenvalue sum of the core system vanishes")
        ct = gt / denom
        ct = np.einsum("pi,iqr->pqr", vecs[0], ct)
        ct = np.einsum("qj,pjr->pqr", vecs[1], ct)
        ct = np.einsum("rk,pqk->pqr", vecs[2], ct)
        return ct

    # dense Kronecker fallback (projected sizes are small)
    t1, t2, t3 = (m.shape[0] for m in projected_ops)
    eye1, eye2, eye3 = np.eye(t1), np.eye(t2), np.eye(t3)
    big = (
        np.kron(eye3, np.kron(eye2, projected_ops[0]))
        + np.kron(eye3, np.kron(projected_ops[1], eye1))
        + np.kron(projected_ops[2], np.kron(eye2, eye1))
    )
    vec = np.linalg.solve(big, g.reshape(-1, order="F"))
    return vec.reshape((t1, t2, t3), order="F")


def tucker_sylvester_solve_3d(problem: SylvesterProblem3D, eps: float) -> TuckerTensor:
    """Solve the 3D tensor Sylvester equation in orthogonal Tucker format.

    Mode-wise fADI column spaces give the orthonormal factors; the projected
    core system is solved by diagonalizing the three small projected
    matrices (a dense Kronecker solve covers the non-diagonalizable case).
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if problem.rhs_norm() == 0.0:
        core = DenseTensor(np.zeros((1, 1, 1)))
        bases = []
        for n in problem.extents:
            e = np.zeros((n, 1))
            e[0, 0] = 1.0
            bases.append(e)
        return TuckerTensor(core, tuple(bases))

    sets = list(problem.spectra)
    if any(s.kind == "disk" for s in sets):
        warnings.warn(
            "disk spectra: running with heuristic real-interval shifts",
            RuntimeWarning,
        )
        sets = [
            SpectralSet.interval(s.z0 - s.eta, s.z0 + s.eta) if s.kind == "disk" else s
            for s in sets
        ]
    pairs = check_minkowski_singly_separated(sets)
    delta = eps / math.sqrt(3.0)

    bases = []
    for j in range(3):
        sched = _interval_schedule(pairs[j], delta)
        m_j = problem.matricization_left_factor(j + 1)
        z, d = fadi_column_space(problem.a[j], m_j, sched)
        u = truncated_orthobasis(z, d, delta)
        if u.shape[1] == 0:
            u = np.zeros((problem.extents[j], 1))
            u[0, 0] = 1.0
        bases.append(u)

    projected = []
    for j in range(3):
        m = bases[j].conj().T @ problem.a[j].matmat(bases[j])
        projected.append(m)
    g = _core_rhs(problem, bases)
    core = _diagonal_core_solve(projected, g)
    if all(not np.iscomplexobj(b) for b in bases) and np.iscomplexobj(core):
        if np.abs(core.imag).max() < 1e-12 * max(np.abs(core.real).max(), 1e-300):
            core = core.real
    return TuckerTensor(DenseTensor(core), tuple(bases))


# ---------------------------------------------------------------------------
# Dense oracles and residuals
# ---------------------------------------------------------------------------


def direct_kron_solve_3d(problem: SylvesterProblem3D, cap: int = DIRECT_SOLVE_CAP) -> DenseTensor:
    """Assemble the full Kronecker system and solve it densely (oracle)."""
    n1, n2, n3 = problem.extents
    total = n1 * n2 * n3
    if total > cap:
        raise ValueError(f"problem size {total} exceeds the direct-solve cap {cap}")
    a1, a2, a3 = (op.todense() for op in problem.a)
    eye1, eye2, eye3 = np.eye(n1), np.eye(n2), np.eye(n3)
    big = (
        np.kron(eye3, np.kron(eye2, a1))
        + np.kron(eye3, np.kron(a2, eye1))
        + np.kron(a3, np.kron(eye2, eye1))
    )
    f = problem.rhs_tensor(cap).data.reshape(-1, order="F")
    x = np.linalg.solve(big, f)
    return DenseTensor(x.reshape((n1, n2, n3), order="F"))


def eigen_solve_3d(problem: SylvesterProblem3D, cap: int = DIRECT_SOLVE_CAP) -> DenseTensor:
    """Diagonalize each coefficient matrix and solve by elementwise scaling."""
    n1, n2, n3 = problem.extents
    if n1 * n2 * n3 > cap:
        raise ValueError("problem too large for the dense eigendecomposition oracle")
    eigs, vecs, invs = [], [], []
    for op in problem.a:
        m = op.todense()
        if np.allclose(m, m.conj().T, atol=1e-12 * max(1.0, np.abs(m).max())):
            w, v = np.linalg.eigh(m)
            vi = v.conj().T
        else:
            w, v = np.linalg.eig(m)
            vi = np.linalg.inv(v)
        eigs.append(w)
        vecs.append(v)
        invs.append(vi)

    g = problem.rhs_tensor(cap).data
    gt = np.einsum("ip,pqr->iqr", invs[0], g)
    gt = np.einsum("jq,iqr->ijr", invs[1], gt)
    gt = np.einsum("kr,ijr->ijk", invs[2], gt)
    denom = eigs[0][:, None, None] + eigs[1][None, :, None] + eigs[2][None, None, :]
    scale = np.abs(denom).max()
    if np.abs(denom).min() < 1e-14 * max(scale, 1.0):
        raise SingularProblemError("an eigenvalue sum vanishes; problem is singular")
    xt = gt / denom
    xt = np.einsum("pi,iqr->pqr", vecs[0], xt)
    xt = np.einsum("qj,pjr->pqr", vecs[1], xt)
    xt = np.einsum("rk,pqk->pqr", vecs[2], xt)
    if not np.iscomplexobj(g) and np.iscomplexobj(xt):
        if np.abs(xt.imag).max() < 1e-10 * max(np.abs(xt.real).max(), 1e-300):
            xt = xt.real
    return DenseTensor(xt)


def _apply_mode(op: LinearOp, data: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(data, axis, 0)
    shape = moved.shape
    out = op.matmat(moved.reshape(shape[0], -1))
    return np.moveaxis(out.reshape(shape), 0, axis)


def residual_3d(problem: SylvesterProblem3D, x, cap: int = DIRECT_SOLVE_CAP) -> float:
    """Frobenius norm of ``sum_k x x_k A_k - F`` (densifies, oracle scale)."""
    if isinstance(x, DenseTensor):
        xd = x.data
    elif isinstance(x, (TTTensor, TuckerTensor, CPTensor)):
        xd = reconstruct(x, cap=cap).data
    else:
        xd = np.asarray(x)
    total = xd.size
    if total > cap:
        raise ValueError("residual evaluation exceeds the dense cap")
    acc = np.zeros_like(xd, dtype=np.result_type(xd, float))
    for axis, op in enumerate(problem.a):
        acc = acc + _apply_mode(op, xd, axis)
    f = problem.rhs_tensor(cap).data
    return float(np.linalg.norm((acc - f).ravel()))
