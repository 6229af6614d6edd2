"""Low-rank tensor formats, compressibility bounds, and tensor Sylvester solvers.

The package is organized as:

* :mod:`tenzo.core` -- dense tensors, mode products, unfoldings, matricizations
* :mod:`tenzo.formats` -- tensor-train / Tucker / CP formats, TT-SVD, HOSVD
* :mod:`tenzo.bounds` -- Zolotarev-type rank and storage bounds
* :mod:`tenzo.operators` -- linear operators with shifted solves (dense, banded, ...)
* :mod:`tenzo.sylvester` -- ADI/fADI solvers for 3D tensor Sylvester equations
* :mod:`tenzo.problems` -- problem generators (function samplers, Hilbert, Poisson)
* :mod:`tenzo.cli` -- experiment runner emitting CSV
"""

from tenzo.core import (
    DenseTensor,
    UnfoldingMatrix,
    cyclic_permute,
    fold,
    frobenius_norm,
    kmode_product,
    matricize,
    unfold,
)
from tenzo.formats import (
    CPTensor,
    TTTensor,
    TuckerTensor,
    hosvd,
    numerical_rank,
    reconstruct,
    storage_count,
    tt_svd,
)

__all__ = [
    "DenseTensor",
    "UnfoldingMatrix",
    "kmode_product",
    "unfold",
    "fold",
    "matricize",
    "cyclic_permute",
    "frobenius_norm",
    "TTTensor",
    "TuckerTensor",
    "CPTensor",
    "tt_svd",
    "hosvd",
    "reconstruct",
    "storage_count",
    "numerical_rank",
]

__version__ = "0.1.0"
