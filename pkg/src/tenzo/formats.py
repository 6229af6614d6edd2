"""The three compressed tensor formats and their compression algorithms.

Tensor-train compression (:func:`tt_svd`) and the higher-order SVD
(:func:`hosvd`) both distribute a relative tolerance ``eps`` uniformly over
the d truncation steps, truncating each SVD with absolute Frobenius-tail
tolerance ``delta = eps * ||X||_F / sqrt(d)``.  With that rule the
reconstruction satisfies ``||X - X~||_F <= eps * ||X||_F``.

CP compression is intentionally absent (it is NP-hard in general);
:class:`CPTensor` supports construction, reconstruction and storage
accounting only.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from math import prod

import numpy as np

from tenzo.core import DenseTensor, UnfoldingMatrix, kmode_product, matricize

__all__ = [
    "TTTensor",
    "TuckerTensor",
    "CPTensor",
    "tt_svd",
    "hosvd",
    "reconstruct",
    "storage_count",
    "numerical_rank",
    "save_tt",
    "load_tt",
    "save_tucker",
    "load_tucker",
]

#: singular values below this multiple of sigma_max count as exact zeros
_SV_FLOOR = 1e-15

#: default cap on reconstructed element counts
RECONSTRUCT_CAP = 2**27


@dataclass(eq=False, frozen=True)
class TTTensor:
    """Tensor-train format: entry (i_1..i_d) is the product G_1(i_1)...G_d(i_d).

    Core ``k`` is an ``(s_{k-1}, n_k, s_k)`` array; boundary ranks satisfy
    ``s_0 = s_d = 1`` and adjacent core shapes chain.
    """

    cores: tuple[np.ndarray, ...]

    def __post_init__(self):
        cores = tuple(np.ascontiguousarray(c) for c in self.cores)
        object.__setattr__(self, "cores", cores)
        if not cores:
            raise ValueError("TTTensor needs at least one core")
        for c in cores:
            if c.ndim != 3:
                raise ValueError("each TT core must be a third-order array")
        if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
            raise ValueError("boundary TT ranks must be 1")
        for left, right in zip(cores[:-1], cores[1:]):
            if left.shape[2] != right.shape[0]:
                raise ValueError("adjacent TT core shapes must chain")

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def rank_vector(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.cores) + (1,)

    def storage_count(self) -> int:
        return sum(c.size for c in self.cores)


@dataclass(eq=False, frozen=True)
class TuckerTensor:
    """Orthogonal Tucker format: a core tensor with orthonormal mode factors."""

    core: DenseTensor
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        factors = tuple(np.ascontiguousarray(a) for a in self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) != self.core.ndim:
            raise ValueError("need one factor per core mode")
        for k, a in enumerate(factors):
            if a.ndim != 2 or a.shape[1] != self.core.extents[k]:
                raise ValueError(f"factor {k + 1} incompatible with the core")
            gram = a.conj().T @ a
            if np.max(np.abs(gram - np.eye(a.shape[1]))) > 1e-12:
                raise ValueError(f"factor {k + 1} does not have orthonormal columns")

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(a.shape[0] for a in self.factors)

    @property
    def rank_vector(self) -> tuple[int, ...]:
        return self.core.extents

    def storage_count(self) -> int:
        return sum(a.size for a in self.factors) + self.core.size


@dataclass(eq=False, frozen=True)
class CPTensor:
    """Weighted sum of rank-1 outer products: sum_t w_t a^(1)_t o ... o a^(d)_t."""

    weights: np.ndarray
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights))
        factors = tuple(np.ascontiguousarray(a) for a in self.factors)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "factors", factors)
        r = w.shape[0]
        for a in factors:
            if a.ndim != 2 or a.shape[1] != r:
                raise ValueError("all CP factors must share the weight count r")

    @property
    def rank(self) -> int:
        return int(self.weights.shape[0])

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(a.shape[0] for a in self.factors)

    def storage_count(self) -> int:
        return self.rank + self.rank * sum(self.extents)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return eps


def _tail_rank(sigma: np.ndarray, delta: float) -> int:
    """Smallest r with sqrt(sum_{j>r} sigma_j^2) <= delta."""
    if sigma.size == 0:
        return 0
    sigma = np.where(sigma < _SV_FLOOR * sigma[0], 0.0, sigma)
    tails = np.sqrt(np.cumsum(sigma[::-1] ** 2))[::-1]  # tails[r] = tail after r kept
    keep = int(np.searchsorted(-tails, -delta, side="left"))
    return keep


def numerical_rank(m, delta: float) -> int:
    """Frobenius-norm numerical rank at absolute tolerance ``delta``.

    Returns the smallest integer r such that discarding all singular values
    past the r-th leaves a tail of Frobenius norm at most ``delta``.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    a = m.data if isinstance(m, UnfoldingMatrix) else np.asarray(m)
    sigma = np.linalg.svd(a, compute_uv=False)
    return _tail_rank(sigma, float(delta))


def tt_svd(x: DenseTensor, eps: float) -> TTTensor:
    """Compress to tensor-train format by sequential truncated SVDs.

    Each of the d-1 splits truncates with Frobenius-tail tolerance
    ``eps * ||x||_F / sqrt(d)``, so the first TT rank equals the numerical
    rank of the first unfolding at that tolerance and the reconstruction
    error is at most ``eps`` relative.
    """
    eps = _check_eps(eps)
    d = x.ndim
    extents = x.extents
    nrm = x.norm()
    if nrm == 0.0:
        cores = [np.zeros((1, n, 1), dtype=x.data.dtype) for n in extents]
        return TTTensor(tuple(cores))
    delta = eps * nrm / np.sqrt(d)

    cores = []
    c = x.data
    r_prev = 1
    for k in range(d - 1):
        mat = np.reshape(c, (r_prev * extents[k], -1), order="F")
        u, sigma, vh = np.linalg.svd(mat, full_matrices=False)
        r = max(1, _tail_rank(sigma, delta))
        cores.append(np.reshape(u[:, :r], (r_prev, extents[k], r), order="F"))
        c = sigma[:r, None] * vh[:r]
        r_prev = r
    cores.append(np.reshape(c, (r_prev, extents[-1], 1), order="F"))
    return TTTensor(tuple(cores))


def hosvd(x: DenseTensor, eps: float) -> TuckerTensor:
    """Higher-order SVD with per-mode Frobenius-tail truncation.

    Mode ``j`` keeps the leading left singular vectors of the j-th
    matricization down to tail tolerance ``eps * ||x||_F / sqrt(d)``; the
    core is the full projection of ``x`` onto those factors.
    """
    eps = _check_eps(eps)
    d = x.ndim
    nrm = x.norm()
    if nrm == 0.0:
        factors = []
        for n in x.extents:
            a = np.zeros((n, 1), dtype=float)
            a[0, 0] = 1.0
            factors.append(a)
        core = DenseTensor(np.zeros((1,) * d, dtype=x.data.dtype))
        return TuckerTensor(core, tuple(factors))
    delta = eps * nrm / np.sqrt(d)

    factors = []
    for j in range(1, d + 1):
        mat = matricize(x, j).data
        u, sigma, _ = np.linalg.svd(mat, full_matrices=False)
        t = max(1, _tail_rank(sigma, delta))
        factors.append(u[:, :t])
    core = x
    for j, a in enumerate(factors, start=1):
        core = kmode_product(core, a.conj().T, j)
    return TuckerTensor(core, tuple(factors))


def _reconstruct_tt(t: TTTensor) -> DenseTensor:
    extents = t.extents
    acc = np.reshape(t.cores[0], (extents[0], -1), order="F")  # (n1, s1)
    for core in t.cores[1:]:
        s_prev, n, s = core.shape
        nxt = np.einsum("ms,sni->mni", acc, core)
        acc = np.reshape(nxt, (acc.shape[0] * n, s), order="F")
    return DenseTensor(np.reshape(acc, extents, order="F"))


def _reconstruct_tucker(t: TuckerTensor) -> DenseTensor:
    out = t.core
    for j, a in enumerate(t.factors, start=1):
        out = kmode_product(out, a, j)
    return out


def _reconstruct_cp(t: CPTensor) -> DenseTensor:
    d = len(t.factors)
    letters = "abcdefghijklmnopqrstuvwxyz"[:d]
    spec = "t," + ",".join(f"{c}t" for c in letters) + "->" + letters
    data = np.einsum(spec, t.weights, *t.factors)
    return DenseTensor(data)


def reconstruct(t, cap: int = RECONSTRUCT_CAP) -> DenseTensor:
    """Expand a compressed tensor to dense form, refusing above ``cap`` elements."""
    n_elem = prod(t.extents)
    if n_elem > cap:
        raise ValueError(
            f"reconstruction of {n_elem} elements exceeds the cap of {cap}"
        )
    if isinstance(t, TTTensor):
        return _reconstruct_tt(t)
    if isinstance(t, TuckerTensor):
        return _reconstruct_tucker(t)
    if isinstance(t, CPTensor):
        return _reconstruct_cp(t)
    raise TypeError(f"cannot reconstruct object of type {type(t).__name__}")


def storage_count(t) -> int:
    """Degrees of freedom needed to store ``t`` in its format."""
    if isinstance(t, (TTTensor, TuckerTensor, CPTensor)):
        return t.storage_count()
    raise TypeError(f"no storage model for type {type(t).__name__}")


# ---------------------------------------------------------------------------
# Binary container ("TTZ1"): little-endian, IEEE-754 doubles, column-major
# core payloads; complex entries as (re, im) pairs.
# ---------------------------------------------------------------------------

_MAGIC = b"TTZ1"
_FMT_TT = 0
_FMT_TUCKER = 1


def _write_array(buf, a: np.ndarray) -> None:
    flat = np.asarray(a).ravel(order="F")
    if np.iscomplexobj(flat):
        pairs = np.empty(2 * flat.size, dtype="<f8")
        pairs[0::2] = flat.real
        pairs[1::2] = flat.imag
        buf.write(pairs.tobytes())
    else:
        buf.write(flat.astype("<f8", copy=False).tobytes())


def _read_array(buf, shape, is_complex: bool) -> np.ndarray:
    count = prod(shape) * (2 if is_complex else 1)
    raw = buf.read(8 * count)
    if len(raw) != 8 * count:
        raise ValueError("truncated TTZ1 payload")
    flat = np.frombuffer(raw, dtype="<f8")
    if is_complex:
        flat = flat[0::2] + 1j * flat[1::2]
    return np.reshape(flat, shape, order="F")


def _write_header(buf, fmt: int, scalar_kind: str, extents, rank_vector) -> None:
    buf.write(_MAGIC)
    buf.write(struct.pack("<BBI", fmt, 1 if scalar_kind == "complex" else 0, len(extents)))
    buf.write(struct.pack(f"<{len(extents)}I", *extents))
    buf.write(struct.pack("<I", len(rank_vector)))
    buf.write(struct.pack(f"<{len(rank_vector)}I", *rank_vector))


def _read_header(buf):
    if buf.read(4) != _MAGIC:
        raise ValueError("not a TTZ1 container")
    fmt, cplx, d = struct.unpack("<BBI", buf.read(6))
    extents = struct.unpack(f"<{d}I", buf.read(4 * d))
    (nr,) = struct.unpack("<I", buf.read(4))
    ranks = struct.unpack(f"<{nr}I", buf.read(4 * nr))
    return fmt, bool(cplx), extents, ranks


def save_tt(t: TTTensor, path_or_file) -> None:
    def _dump(buf):
        is_complex = any(np.iscomplexobj(c) for c in t.cores)
        _write_header(
            buf, _FMT_TT, "complex" if is_complex else "real", t.extents, t.rank_vector
        )
        for c in t.cores:
            _write_array(buf, c.astype(complex) if is_complex and not np.iscomplexobj(c) else c)

    _with_file(path_or_file, "wb", _dump)


def load_tt(path_or_file) -> TTTensor:
    def _load(buf):
        fmt, cplx, extents, ranks = _read_header(buf)
        if fmt != _FMT_TT:
            raise ValueError("TTZ1 container does not hold a tensor-train")
        cores = []
        for k, n in enumerate(extents):
            shape = (ranks[k], n, ranks[k + 1])
            cores.append(_read_array(buf, shape, cplx))
        return TTTensor(tuple(cores))

    return _with_file(path_or_file, "rb", _load)


def save_tucker(t: TuckerTensor, path_or_file) -> None:
    def _dump(buf):
        is_complex = np.iscomplexobj(t.core.data) or any(
            np.iscomplexobj(a) for a in t.factors
        )
        kind = "complex" if is_complex else "real"
        _write_header(buf, _FMT_TUCKER, kind, t.extents, t.rank_vector)
        core = t.core.data
        _write_array(buf, core.astype(complex) if is_complex else core)
        for a in t.factors:
            _write_array(buf, a.astype(complex) if is_complex else a)

    _with_file(path_or_file, "wb", _dump)


def load_tucker(path_or_file) -> TuckerTensor:
    def _load(buf):
        fmt, cplx, extents, ranks = _read_header(buf)
        if fmt != _FMT_TUCKER:
            raise ValueError("TTZ1 container does not hold a Tucker tensor")
        core = DenseTensor(_read_array(buf, ranks, cplx))
        factors = tuple(
            _read_array(buf, (n, t), cplx) for n, t in zip(extents, ranks)
        )
        return TuckerTensor(core, factors)

    return _with_file(path_or_file, "rb", _load)


def _with_file(path_or_file, mode, fn):
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, mode) as fh:
            return fn(fh)
    return fn(path_or_file)
