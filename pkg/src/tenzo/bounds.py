"""Closed-form compressibility bounds for structured tensors.

Two bound families are implemented:

* **Smoothness / algebraic bounds** -- polynomial sampling storage counts and
  the Gaussian-bump Chebyshev tail bound (driven by modified Bessel sums).
* **Displacement bounds** -- Zolotarev-number bounds on the ranks of tensors
  satisfying a multidimensional Sylvester equation whose coefficient spectra
  are enclosed in separated intervals or disks.

Interval machinery works with the quantity ``gamma``, the absolute
cross-ratio of the pair of disjoint real intervals; the rational
approximation error then obeys ``Z_k <= 4 * exp(-pi^2 k / log(16 gamma))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import prod

import numpy as np

__all__ = [
    "SpectralSet",
    "BoundReport",
    "SeparationError",
    "zolotarev_interval_bound",
    "gamma_interval",
    "interval_cross_ratio",
    "k_for_epsilon_interval",
    "disk_rho",
    "zolotarev_disk_bound",
    "k_for_epsilon_disk",
    "check_minkowski_sum_separated",
    "check_minkowski_singly_separated",
    "tt_storage_bound",
    "ml_storage_bound",
    "poly_sampling_bounds",
    "PolySamplingBounds",
    "bessel_i",
    "gaussian_bump_bound",
    "GaussianBumpBound",
    "hilbert_tt_bound",
    "fd_poisson_tt_bound",
    "spectral_poisson_tt_bound",
]

_PI2 = math.pi**2


class SeparationError(ValueError):
    """Raised when a spectral separation precondition fails.

    ``split_index`` is the 1-based split (or mode) at which the certified
    sets overlap.
    """

    def __init__(self, split_index: int, message: str):
        super().__init__(message)
        self.split_index = split_index


@dataclass(frozen=True)
class SpectralSet:
    """An eigenvalue enclosure: an interval [a, b] or a disk |z - z0| <= eta.

    User-supplied disk spectra must satisfy ``0 < eta < z0`` (enforced by the
    :meth:`disk` constructor and by every disk bound); the raw dataclass also
    represents derived Minkowski enclosures whose centers may be negative.
    """

    kind: str
    lo: float = 0.0  # interval: a      disk: z0 (center)
    hi: float = 0.0  # interval: b      disk: eta (radius)

    def __post_init__(self):
        if self.kind == "interval":
            if not self.lo <= self.hi:
                raise ValueError(f"interval requires a <= b, got [{self.lo}, {self.hi}]")
        elif self.kind == "disk":
            if self.hi <= 0.0:
                raise ValueError(f"disk radius must be positive, got {self.hi}")
        else:
            raise ValueError(f"unknown spectral set kind {self.kind!r}")

    @classmethod
    def interval(cls, a: float, b: float) -> "SpectralSet":
        return cls("interval", float(a), float(b))

    @classmethod
    def disk(cls, z0: float, eta: float) -> "SpectralSet":
        z0, eta = float(z0), float(eta)
        if not 0.0 < eta < z0:
            raise ValueError(f"disk requires 0 < eta < z0, got z0={z0}, eta={eta}")
        return cls("disk", z0, eta)

    @property
    def a(self) -> float:
        assert self.kind == "interval"
        return self.lo

    @property
    def b(self) -> float:
        assert self.kind == "interval"
        return self.hi

    @property
    def z0(self) -> float:
        assert self.kind == "disk"
        return self.lo

    @property
    def eta(self) -> float:
        assert self.kind == "disk"
        return self.hi


@dataclass(frozen=True)
class BoundReport:
    """Output of a storage-bound evaluator.

    ``rank_bound_vector`` is the TT rank vector bound ``(1, k_1 nu_1, ...)``
    for format "TT" or the multilinear rank bound ``(k_1 mu_1, ...)`` for
    format "ML"; ``rho_or_gamma`` carries the per-split conditioning numbers
    (interval cross-ratios gamma_j, or disk decay rates rho_j).
    """

    format: str
    k_values: tuple[int, ...]
    rho_or_gamma: tuple[float, ...]
    rank_bound_vector: tuple[int, ...]
    storage_bound: int
    epsilon: float
    extents: tuple[int, ...] = ()

    def __post_init__(self):
        if self.format not in ("TT", "ML"):
            raise ValueError("format must be 'TT' or 'ML'")
        if self.epsilon < 1.0 and any(k < 1 for k in self.k_values):
            raise ValueError("all k_j must be >= 1 for epsilon < 1")
        if self.extents:
            if self.format == "TT":
                s = self.rank_bound_vector
                expect = sum(
                    s[j] * s[j + 1] * n for j, n in enumerate(self.extents)
                )
            else:
                r = self.rank_bound_vector
                expect = sum(n * rj for n, rj in zip(self.extents, r)) + prod(r)
            if expect != self.storage_bound:
                raise ValueError(
                    f"storage bound {self.storage_bound} inconsistent with "
                    f"rank vector (expected {expect})"
                )

    @property
    def s1(self) -> int:
        """Bound on the second tensor-train rank entry (first mode rank)."""
        return self.rank_bound_vector[1 if self.format == "TT" else 0]


# ---------------------------------------------------------------------------
# Interval geometry
# ---------------------------------------------------------------------------


def zolotarev_interval_bound(gamma: float, k: int) -> float:
    """Upper bound on the degree-k Zolotarev number of an interval pair.

    Evaluates ``min(1, 4 * exp(-pi^2 k / log(16 gamma)))``; at k = 0 the value
    is 1 (constant rationals achieve ratio one).
    """
    gamma = float(gamma)
    if 16.0 * gamma <= 1.0:
        raise ValueError(f"need 16*gamma > 1, got gamma={gamma}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1.0
    return min(1.0, 4.0 * math.exp(-_PI2 * k / math.log(16.0 * gamma)))


def gamma_interval(a: float, b: float, j: int, d: int) -> float:
    """Conditioning number of the split-j interval pair for d identical spectra.

    For spectra in [a, b] (0 < a <= b) the split-j Minkowski pair is
    E_j = [ja, jb], F_j = [-(d-j)b, -(d-j)a], whose cross-ratio is
    ``(da + j(b-a)) (db - j(b-a)) / (a b d^2)``.
    """
    a, b = float(a), float(b)
    if a <= 0:
        raise ValueError(f"interval lower bound must be positive, got a={a}")
    if b < a:
        raise ValueError("need a <= b")
    if not 1 <= j <= d - 1:
        raise ValueError(f"split index j={j} out of range [1, {d - 1}]")
    w = b - a
    return (d * a + j * w) * (d * b - j * w) / (a * b * d * d)


def interval_cross_ratio(e: tuple[float, float], f: tuple[float, float]) -> float:
    """Absolute cross-ratio of two disjoint real intervals."""
    e1, e2 = float(e[0]), float(e[1])
    f1, f2 = float(f[0]), float(f[1])
    if e1 > f2:  # F entirely left of E
        x1, x2, x3, x4 = f1, f2, e1, e2
    elif f1 > e2:  # E entirely left of F
        x1, x2, x3, x4 = e1, e2, f1, f2
    else:
        raise ValueError(f"intervals [{e1},{e2}] and [{f1},{f2}] overlap")
    return ((x3 - x1) * (x4 - x2)) / ((x3 - x2) * (x4 - x1))


def k_for_epsilon_interval(gamma: float, eps_over_sqrt_d: float) -> int:
    """Smallest guaranteed k with the interval Zolotarev bound below target.

    Returns ``ceil(log(16 gamma) log(4/eta) / pi^2)`` for target
    ``eta = eps/sqrt(d)``, which makes
    :func:`zolotarev_interval_bound`(gamma, k) <= eta.
    """
    eta = float(eps_over_sqrt_d)
    if not 0.0 < eta < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {eta}")
    gamma = float(gamma)
    if 16.0 * gamma <= 1.0:
        raise ValueError(f"need 16*gamma > 1, got gamma={gamma}")
    k = math.ceil(math.log(16.0 * gamma) * math.log(4.0 / eta) / _PI2)
    k = max(k, 1)
    assert zolotarev_interval_bound(gamma, k) <= eta + 1e-300
    return k


# ---------------------------------------------------------------------------
# Disk geometry (all modes sharing one disk |z - z0| <= eta)
# ---------------------------------------------------------------------------


def disk_rho(z0: float, eta: float, j: int, d: int) -> float:
    """Per-step decay rate rho_j > 1 of the split-j disk pair.

    With S = d^2 z0^2 - ((d-j)^2 + j^2) eta^2 and g = 2 j (d-j) eta^2 the rate
    is rho_j = g / (S - sqrt(S^2 - g^2)), evaluated in the cancellation-free
    form (S + sqrt(S^2 - g^2)) / g.
    """
    z0, eta = float(z0), float(eta)
    if not 0.0 < eta < z0:
        raise ValueError(f"disk requires 0 < eta < z0, got z0={z0}, eta={eta}")
    if not 1 <= j <= d - 1:
        raise ValueError(f"split index j={j} out of range [1, {d - 1}]")
    s = d * d * z0 * z0 - ((d - j) ** 2 + j * j) * eta * eta
    g = 2.0 * j * (d - j) * eta * eta
    xi = s * s - g * g
    if xi < 0.0 or s <= 0.0:
        raise ValueError(
            f"invalid disk geometry at split {j}: separation premise violated"
        )
    return (s + math.sqrt(xi)) / g


def zolotarev_disk_bound(z0: float, eta: float, j: int, d: int, k: int) -> float:
    """Zolotarev number rho_j^{-k} of the split-j Minkowski disk pair."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1.0
    return disk_rho(z0, eta, j, d) ** (-k)


def k_for_epsilon_disk(z0: float, eta: float, j: int, d: int, eps: float) -> int:
    """Smallest k with rho_j^{-k} <= eps/sqrt(d): ceil(log(sqrt(d)/eps)/log(rho_j))."""
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    rho = disk_rho(z0, eta, j, d)
    k = math.ceil(math.log(math.sqrt(d) / eps) / math.log(rho))
    return max(k, 1)


# ---------------------------------------------------------------------------
# Minkowski separation certificates
# ---------------------------------------------------------------------------


def _common_kind(sets) -> str:
    kinds = {s.kind for s in sets}
    if len(kinds) != 1:
        raise ValueError("mixed interval/disk spectra are unsupported")
    return kinds.pop()


def check_minkowski_sum_separated(sets) -> list[tuple[SpectralSet, SpectralSet]]:
    """Certify split-wise disjointness of the cumulative Minkowski sums.

    For each split j returns the enclosures ``E_j`` of the sum of the first j
    spectra and ``F_j`` of the negated sum of the rest.  Raises
    :class:`SeparationError` at the first overlapping split.
    """
    sets = list(sets)
    d = len(sets)
    if d < 2:
        raise ValueError("need at least two spectra")
    kind = _common_kind(sets)
    pairs = []
    for j in range(1, d):
        left, right = sets[:j], sets[j:]
        if kind == "interval":
            e = SpectralSet.interval(sum(s.a for s in left), sum(s.b for s in left))
            f = SpectralSet.interval(-sum(s.b for s in right), -sum(s.a for s in right))
            if not (e.a > f.b or f.a > e.b):
                raise SeparationError(j, f"split {j}: E_j and F_j overlap")
        else:
            c_e = sum(s.z0 for s in left)
            r_e = sum(s.eta for s in left)
            c_f = -sum(s.z0 for s in right)
            r_f = sum(s.eta for s in right)
            if abs(c_e - c_f) <= r_e + r_f:
                raise SeparationError(j, f"split {j}: disks E_j and F_j overlap")
            e = SpectralSet("disk", c_e, r_e)
            f = SpectralSet("disk", c_f, r_f)
        pairs.append((e, f))
    return pairs


def check_minkowski_singly_separated(sets) -> list[tuple[SpectralSet, SpectralSet]]:
    """Certify each single spectrum against the negated sum of all others."""
    sets = list(sets)
    d = len(sets)
    if d < 2:
        raise ValueError("need at least two spectra")
    kind = _common_kind(sets)
    pairs = []
    for j in range(d):
        rest = sets[:j] + sets[j + 1 :]
        if kind == "interval":
            e = sets[j]
            f = SpectralSet.interval(-sum(s.b for s in rest), -sum(s.a for s in rest))
            if not (e.a > f.b or f.a > e.b):
                raise SeparationError(j + 1, f"mode {j + 1}: E_j and F_j overlap")
        else:
            e = SpectralSet("disk", sets[j].z0, sets[j].eta)
            c_f = -sum(s.z0 for s in rest)
            r_f = sum(s.eta for s in rest)
            if abs(e.z0 - c_f) <= e.eta + r_f:
                raise SeparationError(j + 1, f"mode {j + 1}: disks overlap")
            f = SpectralSet("disk", c_f, r_f)
        pairs.append((e, f))
    return pairs


def _require_identical_disks(sets) -> tuple[float, float]:
    z0s = {(s.z0, s.eta) for s in sets}
    if len(z0s) != 1:
        raise ValueError(
            "disk bounds require all modes to share one disk (z0, eta)"
        )
    return z0s.pop()


# ---------------------------------------------------------------------------
# Storage bounds for displacement-structured tensors
# ---------------------------------------------------------------------------


def tt_storage_bound(sets, nu, extents, eps: float) -> BoundReport:
    """Tensor-train storage bound for a displacement-structured tensor.

    ``sets`` are the d per-mode spectral enclosures, ``nu`` the d-1 ranks of
    the unfoldings of the right-hand side, and ``eps`` the target relative
    accuracy.  The rank bound at split j is ``k_j nu_j`` with k_j chosen so
    the split-j Zolotarev number is below ``eps/sqrt(d)``.
    """
    sets = list(sets)
    d = len(sets)
    extents = tuple(int(n) for n in extents)
    nu = tuple(int(v) for v in nu)
    if len(extents) != d or len(nu) != d - 1:
        raise ValueError("need d extents and d-1 unfolding ranks")
    if any(v < 1 for v in nu):
        raise ValueError("all nu_j must be >= 1")
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")

    pairs = check_minkowski_sum_separated(sets)
    kind = sets[0].kind
    ks, rogs = [], []
    if kind == "interval":
        for e, f in pairs:
            g = interval_cross_ratio((e.a, e.b), (f.a, f.b))
            ks.append(k_for_epsilon_interval(g, eps / math.sqrt(d)))
            rogs.append(g)
    else:
        z0, eta = _require_identical_disks(sets)
        for j in range(1, d):
            rho = disk_rho(z0, eta, j, d)
            ks.append(k_for_epsilon_disk(z0, eta, j, d, eps))
            rogs.append(rho)

    s = (1,) + tuple(k * v for k, v in zip(ks, nu)) + (1,)
    storage = sum(s[j] * s[j + 1] * n for j, n in enumerate(extents))
    return BoundReport(
        format="TT",
        k_values=tuple(ks),
        rho_or_gamma=tuple(rogs),
        rank_bound_vector=s,
        storage_bound=int(storage),
        epsilon=eps,
        extents=extents,
    )


def ml_storage_bound(sets, mu, extents, eps: float) -> BoundReport:
    """Multilinear (Tucker) storage bound for a displacement-structured tensor.

    ``mu`` holds the multilinear ranks of the right-hand side.  Mode j uses
    the single-versus-rest spectral pair; the storage bound is
    ``sum_j n_j k_j mu_j + prod_j k_j mu_j``.
    """
    sets = list(sets)
    d = len(sets)
    extents = tuple(int(n) for n in extents)
    mu = tuple(int(v) for v in mu)
    if len(extents) != d or len(mu) != d:
        raise ValueError("need d extents and d multilinear ranks")
    if any(v < 1 for v in mu):
        raise ValueError("all mu_j must be >= 1")
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")

    pairs = check_minkowski_singly_separated(sets)
    kind = sets[0].kind
    ks, rogs = [], []
    if kind == "interval":
        for e, f in pairs:
            g = interval_cross_ratio((e.a, e.b), (f.a, f.b))
            ks.append(k_for_epsilon_interval(g, eps / math.sqrt(d)))
            rogs.append(g)
    else:
        z0, eta = _require_identical_disks(sets)
        rho = disk_rho(z0, eta, 1, d)  # single-vs-rest pair == split-1 pair
        k = k_for_epsilon_disk(z0, eta, 1, d, eps)
        ks = [k] * d
        rogs = [rho] * d

    r = tuple(k * v for k, v in zip(ks, mu))
    storage = sum(n * rj for n, rj in zip(extents, r)) + prod(r)
    return BoundReport(
        format="ML",
        k_values=tuple(ks),
        rho_or_gamma=tuple(rogs),
        rank_bound_vector=r,
        storage_bound=int(storage),
        epsilon=eps,
        extents=extents,
    )


# ---------------------------------------------------------------------------
# Polynomial sampling bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolySamplingBounds:
    tt_rank_vector: tuple[int, ...]
    p_tt: int
    ml_rank_vector: tuple[int, ...]
    p_ml: int
    cp_rank: int
    p_cp: int


def poly_sampling_bounds(degrees, extents) -> PolySamplingBounds:
    """Storage bounds for a tensor sampled from a multivariate polynomial.

    ``degrees[j] = N_j`` means degree at most ``N_j - 1`` in variable j.  The
    TT split rank is ``t_k = min(prod_{j<=k} N_j, prod_{j>k} N_j)``, the
    multilinear ranks are the N_j themselves, and the CP rank is
    ``min_k prod(N)/N_k``.
    """
    degrees = tuple(int(v) for v in degrees)
    extents = tuple(int(v) for v in extents)
    d = len(degrees)
    if len(extents) != d:
        raise ValueError("degrees and extents must have equal length")
    if any(v < 1 for v in degrees) or any(n < 1 for n in extents):
        raise ValueError("degrees and extents must be >= 1")

    t = tuple(
        min(prod(degrees[:k]), prod(degrees[k:])) for k in range(d + 1)
    )  # t[0] = t[d] = 1
    p_tt = sum(t[k] * t[k + 1] * extents[k] for k in range(d))
    p_ml = sum(n * nk for n, nk in zip(extents, degrees)) + prod(degrees)
    r = min(prod(degrees) // nk for nk in degrees)
    p_cp = r + r * sum(extents)
    return PolySamplingBounds(t, int(p_tt), degrees, int(p_ml), int(r), int(p_cp))


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind and the Gaussian-bump bound
# ---------------------------------------------------------------------------

_BESSEL_X_MAX = 700.0
_RESCALE = 1e250


def _bessel_i0_series(x: float) -> float:
    # all-positive power series; converges for every x, no cancellation
    term = 1.0
    total = 1.0
    m = 1
    q = 0.25 * x * x
    while True:
        term *= q / (m * m)
        total += term
        if term < 1e-18 * total:
            return total
        m += 1


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function I_order(x) for x in [0, 700].

    Uses the downward three-term (Miller) recurrence normalized by a
    power-series I_0, which stays accurate for large orders; the start index
    is padded so the contaminating minimal solution decays below 1e-14.
    """
    order = int(order)
    x = float(x)
    if order < 0 or order > 10**6:
        raise ValueError("order must lie in [0, 1e6]")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x > _BESSEL_X_MAX:
        raise ValueError(f"x={x} exceeds the overflow-safe limit {_BESSEL_X_MAX}")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    i0 = _bessel_i0_series(x)
    if order == 0:
        return i0

    # start high enough that the seed error washes out in both the
    # order-dominated (sqrt(40 n)) and argument-dominated (sqrt(60 x)) regimes
    start = order + int(math.ceil(math.sqrt(40.0 * (order + 1)))) + int(
        math.ceil(math.sqrt(60.0 * x))
    ) + 20
    f_hi = 0.0
    f = 1e-300
    f_target = 0.0
    for j in range(start, 0, -1):
        f_lo = f_hi + (2.0 * j / x) * f
        f_hi, f = f, f_lo
        if abs(f) > _RESCALE:
            f /= _RESCALE
            f_hi /= _RESCALE
            f_target /= _RESCALE
        if j - 1 == order:
            f_target = f
    # f now holds the unnormalized value at order 0; divide first, the
    # ratio is <= 1 while i0/f alone can overflow
    return (f_target / f) * i0


@dataclass(frozen=True)
class GaussianBumpBound:
    """Chebyshev-degree certificate for a sum of Gaussian bumps."""

    ell: int
    s1_bound: int
    gamma: float
    epsilon: float


_ELL_CAP = 10**6


def gaussian_bump_bound(m_bumps: int, n: int, gamma: float, eps: float) -> GaussianBumpBound:
    """Smallest polynomial degree certifying a rank bound for Gaussian bumps.

    Finds the smallest integer ``ell`` with
    ``6 M n^{3/2} exp(-gamma/4) I_{floor(ell/2)+1}(gamma/4) <= eps`` and
    returns it together with the implied first TT rank bound ``ell + 1``
    (degree at most ell in each variable).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if m_bumps < 1 or n < 1:
        raise ValueError("m_bumps and n must be >= 1")
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    xc = gamma / 4.0
    pref = 6.0 * m_bumps * n**1.5 * math.exp(-xc)
    # the test depends on ell only through j = floor(ell/2) + 1, and
    # I_j(xc) decreases in j, so scan the smallest admissible Bessel order
    j = 1
    while 2 * (j - 1) <= _ELL_CAP:
        if pref * bessel_i(j, xc) <= eps:
            ell = 2 * (j - 1)
            return GaussianBumpBound(ell, ell + 1, float(gamma), eps)
        j += 1
    raise ValueError("degree scan exceeded the cap of 1e6")


# ---------------------------------------------------------------------------
# Specialized closed-form bounds (3D, equal modes, rank-1 right-hand side)
# ---------------------------------------------------------------------------


def _s1_report(n: int, s1: int, gamma: float, eps: float) -> BoundReport:
    return BoundReport(
        format="TT",
        k_values=(s1, s1),
        rho_or_gamma=(gamma, gamma),
        rank_bound_vector=(1, s1, s1, 1),
        storage_bound=int(n * (s1 * s1 + 2 * s1)),
        epsilon=eps,
        extents=(n, n, n),
    )


def _ceil_s1(log_arg: float, eps: float) -> int:
    return math.ceil(math.log(log_arg) * math.log(4.0 * math.sqrt(3.0) / eps) / _PI2)


def hilbert_tt_bound(n: int, eps: float) -> BoundReport:
    """TT storage bound for the n x n x n Hilbert tensor.

    ``s1 = ceil(log(16n(2n-1)/(3n-2)) log(4 sqrt(3)/eps) / pi^2)`` and the
    storage bound is ``n (s1^2 + 2 s1)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    arg = 16.0 * n * (2.0 * n - 1.0) / (3.0 * n - 2.0)
    s1 = _ceil_s1(arg, eps)
    return _s1_report(n, s1, arg / 16.0, eps)


def fd_poisson_tt_bound(n: int, eps: float) -> BoundReport:
    """TT storage bound for the finite-difference Poisson solution tensor.

    Spectra live in [1, n^2]; ``s1 = ceil(log(16(n^2+2)(2n^2+1)/(9n^2))
    log(4 sqrt(3)/eps) / pi^2)``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    n2 = float(n) * n
    arg = 16.0 * (n2 + 2.0) * (2.0 * n2 + 1.0) / (9.0 * n2)
    s1 = _ceil_s1(arg, eps)
    return _s1_report(n, s1, arg / 16.0, eps)


def spectral_poisson_tt_bound(n: int, eps: float) -> BoundReport:
    """TT storage bound for the ultraspherical spectral Poisson solution.

    Spectra (after sign normalization) live in [1/(30 n^4), 1];
    ``s1 = ceil(log(16(30n^4+2)(60n^4+1)/(270n^4)) log(4 sqrt(3)/eps) / pi^2)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    n4 = float(n) ** 4
    arg = 16.0 * (30.0 * n4 + 2.0) * (60.0 * n4 + 1.0) / (270.0 * n4)
    s1 = _ceil_s1(arg, eps)
    return _s1_report(n, s1, arg / 16.0, eps)
