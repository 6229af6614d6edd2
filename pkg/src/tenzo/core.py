"""Dense tensors and index-manipulation primitives.

All multi-index conventions in this package are column-major: in a tensor of
extents ``(n_1, ..., n_d)`` the first index ``i_1`` varies fastest.  Every
reshape, unfolding and vectorization below is defined through that single
bijection, so flattened data can be exchanged with any column-major runtime
bit-for-bit.

Modes and split indices in the public API are 1-based, matching the usual
mathematical notation for mode products and unfoldings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

__all__ = [
    "DenseTensor",
    "UnfoldingMatrix",
    "kmode_product",
    "unfold",
    "fold",
    "matricize",
    "cyclic_permute",
    "frobenius_norm",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype not in (np.float64, np.complex128):
        a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    out = np.asfortranarray(a)
    if out is a:
        out = a.copy(order="F")
    out.flags.writeable = False
    return out


@dataclass(eq=False, frozen=True)
class DenseTensor:
    """A d-dimensional array of real or complex scalars with explicit extents.

    The wrapped ``data`` array is copied on construction and made read-only;
    tensors can therefore be shared freely between threads.
    """

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data))
        if self.data.ndim < 1:
            raise ValueError("tensor order d must be >= 1")
        if any(n < 1 for n in self.data.shape):
            raise ValueError(f"every extent must be >= 1, got {self.data.shape}")

    @classmethod
    def from_flat(cls, flat, extents) -> "DenseTensor":
        """Build a tensor from column-major flattened data (i_1 fastest)."""
        flat = np.asarray(flat)
        extents = tuple(int(n) for n in extents)
        if flat.size != prod(extents):
            raise ValueError(
                f"data length {flat.size} != product of extents {prod(extents)}"
            )
        return cls(np.reshape(flat, extents, order="F"))

    @property
    def extents(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def scalar_kind(self) -> str:
        return "complex" if np.iscomplexobj(self.data) else "real"

    def to_flat(self) -> np.ndarray:
        """Column-major flattened copy of the entries."""
        return self.data.ravel(order="F").copy()

    def norm(self) -> float:
        return frobenius_norm(self)

    def __getitem__(self, idx):
        return self.data[idx]

    def allclose(self, other: "DenseTensor", rtol=1e-12, atol=0.0) -> bool:
        return self.extents == other.extents and np.allclose(
            self.data, other.data, rtol=rtol, atol=atol
        )

    def __repr__(self):
        return f"DenseTensor(extents={self.extents}, kind={self.scalar_kind})"


@dataclass(eq=False, frozen=True)
class UnfoldingMatrix:
    """A matrix view of a tensor produced by an unfolding or matricization.

    ``source`` records which operation produced it (e.g. ``"unfold(k=2)"``),
    and ``source_extents`` the extents of the originating tensor, so the
    flattening can be undone exactly.
    """

    data: np.ndarray
    source_extents: tuple[int, ...]
    source: str

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data))
        if self.data.ndim != 2:
            raise ValueError("UnfoldingMatrix data must be 2-D")
        if self.data.size != prod(self.source_extents):
            raise ValueError("rows*cols must equal the source element count")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __repr__(self):
        return f"UnfoldingMatrix({self.rows}x{self.cols}, from {self.source})"


def _check_mode(k: int, d: int, *, upper: int | None = None, what="mode") -> None:
    hi = d if upper is None else upper
    if not 1 <= k <= hi:
        raise ValueError(f"{what} {k} out of range [1, {hi}]")


def kmode_product(x: DenseTensor, a: np.ndarray, k: int) -> DenseTensor:
    """Multiply every mode-``k`` fiber of ``x`` by the matrix ``a``.

    ``a`` has shape ``(m, n_k)``; the result replaces extent ``n_k`` by ``m``.
    Entry-wise, ``(x ×_k a)[i_1,..,j,..,i_d] = sum_{i_k} x[i_1,..,i_d] a[j,i_k]``.
    """
    a = np.asarray(a)
    _check_mode(k, x.ndim)
    if a.ndim != 2:
        raise ValueError("mode-product matrix must be 2-D")
    if a.shape[1] != x.extents[k - 1]:
        raise ValueError(
            f"matrix has {a.shape[1]} columns but mode {k} has extent {x.extents[k - 1]}"
        )
    out = np.tensordot(a, x.data, axes=([1], [k - 1]))
    # tensordot puts the new axis first; restore it to position k-1
    out = np.moveaxis(out, 0, k - 1)
    return DenseTensor(out)


def unfold(x: DenseTensor, k: int) -> UnfoldingMatrix:
    """The k-th unfolding: rows indexed by modes 1..k, columns by k+1..d.

    A pure reinterpretation of the column-major data; no entry moves.
    """
    d = x.ndim
    if d < 2:
        raise ValueError("unfold requires a tensor of order >= 2")
    _check_mode(k, d, upper=d - 1, what="split index")
    rows = prod(x.extents[:k])
    cols = prod(x.extents[k:])
    m = np.reshape(x.data, (rows, cols), order="F")
    return UnfoldingMatrix(m, x.extents, f"unfold(k={k})")


def fold(m: UnfoldingMatrix | np.ndarray, extents=None) -> DenseTensor:
    """Invert :func:`unfold` / :func:`matricize` modulo the recorded source.

    For an :class:`UnfoldingMatrix` produced by ``unfold`` the extents are
    optional.  A raw array requires explicit ``extents`` and is interpreted
    as a k-th unfolding (column-major).
    """
    if isinstance(m, UnfoldingMatrix):
        data = m.data
        if extents is None:
            if not m.source.startswith("unfold"):
                raise ValueError(
                    f"cannot fold {m.source} without explicit extents; "
                    "matricizations permute modes"
                )
            extents = m.source_extents
    else:
        data = np.asarray(m)
        if extents is None:
            raise ValueError("extents required to fold a raw array")
    extents = tuple(int(n) for n in extents)
    return DenseTensor(np.reshape(data, extents, order="F"))


def cyclic_permute(x: DenseTensor, j: int) -> DenseTensor:
    """Reorder modes to ``(j, j+1, ..., d, 1, ..., j-1)``."""
    d = x.ndim
    _check_mode(j, d)
    axes = tuple(range(j - 1, d)) + tuple(range(0, j - 1))
    return DenseTensor(np.transpose(x.data, axes))


def matricize(x: DenseTensor, n: int) -> UnfoldingMatrix:
    """The mode-``n`` matricization: mode-``n`` fibers become the columns.

    Columns are ordered by the remaining modes cyclically,
    ``(n+1, ..., d, 1, ..., n-1)`` with mode ``n+1`` fastest, so that
    ``matricize(x, n) == unfold(cyclic_permute(x, n), 1)``.
    """
    d = x.ndim
    _check_mode(n, d, what="mode")
    if d == 1:
        m = np.reshape(x.data, (x.extents[0], 1), order="F")
        return UnfoldingMatrix(m, x.extents, f"matricize(n={n})")
    y = cyclic_permute(x, n)
    m = np.reshape(y.data, (x.extents[n - 1], -1), order="F")
    return UnfoldingMatrix(m, x.extents, f"matricize(n={n})")


def frobenius_norm(x) -> float:
    """Square root of the sum of squared entry magnitudes."""
    if isinstance(x, DenseTensor):
        a = x.data
    elif isinstance(x, UnfoldingMatrix):
        a = x.data
    else:
        a = np.asarray(x)
    return float(np.linalg.norm(a.ravel()))
