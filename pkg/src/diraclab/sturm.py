"""One-dimensional Dirichlet eigenvalue solvers for the branch reduction.

Restricted to a fixed transverse branch, the cylinder Dirac-Laplacian becomes
a scalar two-point problem on [0, t]:

    (direct)      -a'' + p a' + (q - lam) a = 0,     a(0) = a(t) = 0,
                  p = (m-1) H,
                  q = mu^2 - mu' + (m-1)/2 H' - (m-1)^2/4 H^2,

and the substitution  abar = (rho / rho(0))^{(m-1)/2} a  removes the
first-order term, leaving the normal form

    (transformed) -abar'' + V abar = lam abar,       V = mu^2 - mu'.

Both forms have the same spectrum, so each can serve as an oracle for the
other.  The transformed path discretizes with symmetric second-order central
differences and finds tridiagonal eigenvalues by bisection with Sturm-sequence
counting; the direct path keeps the advection term and calls a dense
eigensolver on the (non-symmetric) difference matrix.  Each solve is repeated
on a half-resolution mesh for a Richardson error estimate, and the returned
eigenvalues are the extrapolated values unless extrapolation is switched off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DiscretizationFailureError, ResolutionError, UsageError
from .profiles import WarpingProfile, mean_curvature

__all__ = [
    "BranchProblem", "TransformedProblem", "SpectrumResult",
    "liouville_transform", "solve_transformed", "solve_direct",
    "tridiagonal_lowest",
]

_BISECT_TOL = 1e-10      # absolute eigenvalue tolerance of the bisection
_BISECT_MAXIT = 256

try:
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True, nogil=True)
def _sturm_count(d, e2, x, pivmin):
    """Number of eigenvalues of the symmetric tridiagonal matrix below x.

    ``d`` is the diagonal, ``e2`` the squared off-diagonal.  The classic
    LDL^T pivot recurrence.  Pivots smaller in magnitude than ``pivmin``
    are clamped to -pivmin (the dstebz safeguard): an absolute nudge like
    -1e-300 would let e2/q overflow to inf and silently zero the count
    whenever a bisection midpoint lands exactly on a diagonal entry.
    """
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q <= 0.0:
        count += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q <= 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def _bisect_lowest_numba(d, e2, K, lo0, hi0, tol, maxit, pivmin):
    out = np.empty(K)
    lo_floor = lo0
    for k in range(K):
        lo = lo_floor
        hi = hi0
        for _ in range(maxit):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if _sturm_count(d, e2, mid, pivmin) <= k:
                lo = mid
            else:
                hi = mid
        out[k] = 0.5 * (lo + hi)
        lo_floor = lo  # eigenvalues are ordered; reuse as the next lower bound
    return out


def _bisect_lowest_python(d, e2, K, lo0, hi0, tol, maxit, pivmin):
    """Vectorized fallback: bisect all K target indices simultaneously."""
    ks = np.arange(K)
    lo = np.full(K, lo0)
    hi = np.full(K, hi0)
    for _ in range(maxit):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        q = d[0] - mid
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        counts = (q <= 0).astype(np.int64)
        for i in range(1, d.size):
            q = d[i] - mid - e2[i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            counts += q <= 0
        go_up = counts <= ks
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    return 0.5 * (lo + hi)


def tridiagonal_lowest(diag: np.ndarray, off: np.ndarray, K: int,
                       tol: float = _BISECT_TOL) -> np.ndarray:
    """Lowest K eigenvalues of a symmetric tridiagonal matrix by
    Sturm-sequence bisection (absolute tolerance ``tol``)."""
    d = np.ascontiguousarray(diag, dtype=float)
    e = np.ascontiguousarray(off, dtype=float)
    if d.size < 1 or e.size != d.size - 1:
        raise ValueError("need len(off) == len(diag) - 1")
    if not 1 <= K <= d.size:
        raise ValueError("K out of range")
    r = np.zeros(d.size)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    lo = float(np.min(d - r)) - tol
    hi = float(np.max(d + r)) + tol
    e2 = e * e
    # dstebz-style pivot floor: small enough not to perturb counts, large
    # enough that e2 / pivmin stays finite.
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max()) if e2.size else 1.0)
    if _HAVE_NUMBA:
        vals = _bisect_lowest_numba(d, e2, K, lo, hi, tol, _BISECT_MAXIT, pivmin)
    else:
        vals = _bisect_lowest_python(d, e2, K, lo, hi, tol, _BISECT_MAXIT, pivmin)
    return np.sort(vals)


# ---------------------------------------------------------------------------
# problem descriptions
# ---------------------------------------------------------------------------

@dataclass
class BranchProblem:
    """Direct-form branch problem on [0, t] with Dirichlet ends.

    The coefficient callables are vectorized in u.  ``mu`` is the transverse
    eigenvalue along the slices (for a profile-built branch,
    mu(u) = mu0 * rho(0)/rho(u) and mu' = mu * H).
    """

    t: float
    m: int
    h: Callable
    h_prime: Callable
    mu: Callable
    mu_prime: Callable
    branch_id: int = 0
    mu0: Optional[float] = None
    profile: Optional[WarpingProfile] = None

    def __post_init__(self):
        if not self.t > 0:
            raise UsageError("interval length t must be positive")
        if self.m < 2:
            raise UsageError("dimension m must be at least 2")

    def p(self, u):
        return (self.m - 1) * np.asarray(self.h(u), dtype=float)

    def q(self, u):
        u = np.asarray(u, dtype=float)
        mu = np.asarray(self.mu(u), dtype=float)
        return (mu**2 - np.asarray(self.mu_prime(u), dtype=float)
                + 0.5 * (self.m - 1) * np.asarray(self.h_prime(u), dtype=float)
                - 0.25 * (self.m - 1) ** 2 * np.asarray(self.h(u), dtype=float) ** 2)

    @classmethod
    def from_profile(cls, profile: WarpingProfile, mu0: float,
                     branch_id: int = 0, m: Optional[int] = None) -> "BranchProblem":
        if m is None:
            if profile.kind != "exponential":
                raise ValueError("m must be given unless the profile is exponential")
            m = profile.m
        curv = mean_curvature(profile)
        rho0 = float(profile.rho(0.0))

        def mu(u):
            return mu0 * rho0 / profile.rho(u, 0)

        def mu_prime(u):
            return mu(u) * curv.h(u)

        return cls(t=profile.domain_length, m=int(m), h=curv.h,
                   h_prime=curv.h_prime, mu=mu, mu_prime=mu_prime,
                   branch_id=branch_id, mu0=float(mu0), profile=profile)


@dataclass
class TransformedProblem:
    """Normal-form problem -abar'' + V abar = lam abar on [0, t], Dirichlet.

    ``weight`` maps a direct-form eigenfunction to the transformed one,
    abar(u) = weight(u) * a(u); it is None when the problem was built from a
    bare potential.
    """

    t: float
    v: Callable
    weight: Optional[Callable] = None
    branch_id: int = 0
    source: Optional[BranchProblem] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.t > 0:
            raise UsageError("interval length t must be positive")


def liouville_transform(problem: BranchProblem) -> TransformedProblem:
    """Reduce a branch problem to normal form: V = mu^2 - mu'.

    The substitution weight is the standard Liouville weight
    (rho/rho(0))^{(m-1)/2}, equivalently exp((m-1)/2 * integral of -H).
    """

    def v(u):
        u = np.asarray(u, dtype=float)
        return (np.asarray(problem.mu(u), dtype=float) ** 2
                - np.asarray(problem.mu_prime(u), dtype=float))

    weight = None
    if problem.profile is not None:
        prof = problem.profile
        rho0 = float(prof.rho(0.0))
        half = 0.5 * (problem.m - 1)

        def weight(u):
            return (prof.rho(u, 0) / rho0) ** half

    return TransformedProblem(t=problem.t, v=v, weight=weight,
                              branch_id=problem.branch_id, source=problem)


# ---------------------------------------------------------------------------
# results and solvers
# ---------------------------------------------------------------------------

@dataclass
class SpectrumResult:
    """Ascending eigenvalues with per-eigenvalue Richardson error estimates.

    ``error_estimates`` is None when the solve was done on a single mesh.
    """

    values: np.ndarray
    error_estimates: Optional[np.ndarray]
    mesh_size: int
    multiplicities: np.ndarray = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.error_estimates is not None:
            self.error_estimates = np.asarray(self.error_estimates, dtype=float)
        if self.multiplicities is None:
            self.multiplicities = np.ones(self.values.size, dtype=int)


def _check_mesh(K: int, mesh: int, extrapolate: bool):
    if K < 1:
        raise ValueError("K must be >= 1")
    if mesh < 64:
        raise ResolutionError("mesh must have at least 64 interior points")
    limit = (mesh // 2 if extrapolate else mesh) - 2
    if K > limit:
        raise ResolutionError(f"K={K} exceeds what a mesh of {mesh} interior "
                              f"points supports (limit {limit})")


def _transformed_raw(v: Callable, t: float, K: int, n: int) -> np.ndarray:
    h = t / (n + 1)
    u = h * np.arange(1, n + 1)
    diag = 2.0 / h**2 + np.asarray(v(u), dtype=float)
    off = np.full(n - 1, -1.0 / h**2)
    return tridiagonal_lowest(diag, off, K)


def solve_transformed(problem: TransformedProblem, K: int, mesh: int = 2048,
                      extrapolate: bool = True) -> SpectrumResult:
    """Lowest K Dirichlet eigenvalues of the normal-form problem.

    Central differences on a uniform grid of ``mesh`` interior points; the
    symmetric tridiagonal system is solved by Sturm bisection.  With
    ``extrapolate`` the solve is repeated at half resolution and the returned
    values carry one Richardson step (the error estimate is the conservative
    second-order one, |fine - coarse| / 3).
    """
    _check_mesh(K, mesh, extrapolate)
    fine = _transformed_raw(problem.v, problem.t, K, mesh)
    if not extrapolate:
        return SpectrumResult(fine, None, mesh)
    coarse = _transformed_raw(problem.v, problem.t, K, mesh // 2)
    correction = (fine - coarse) / 3.0
    return SpectrumResult(fine + correction, np.abs(correction), mesh)


def _direct_raw(problem: BranchProblem, K: int, n: int) -> np.ndarray:
    t = problem.t
    h = t / (n + 1)
    u = h * np.arange(1, n + 1)
    p = np.asarray(problem.p(u), dtype=float)
    q = np.asarray(problem.q(u), dtype=float)
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, idx] = 2.0 / h**2 + q
    a[idx[:-1], idx[:-1] + 1] = -1.0 / h**2 + p[:-1] / (2.0 * h)
    a[idx[1:], idx[1:] - 1] = -1.0 / h**2 - p[1:] / (2.0 * h)
    vals = np.linalg.eigvals(a)
    order = np.argsort(vals.real)
    lowest = vals[order[:K]]
    scale = max(1.0, float(np.max(np.abs(lowest.real))))
    if np.max(np.abs(lowest.imag)) > 1e-8 * scale:
        raise DiscretizationFailureError(
            "direct discretization produced non-real low eigenvalues; "
            "refine the mesh")
    return np.sort(lowest.real)


def solve_direct(problem: BranchProblem, K: int, mesh: int = 1024,
                 extrapolate: bool = True) -> SpectrumResult:
    """Lowest K eigenvalues of the direct-form problem (advection kept).

    Dense, complex-safe eigen-extraction: eigenvalues are sorted by real part
    and returned as reals once the imaginary parts are negligible.  This is
    the oracle route; prefer :func:`solve_transformed` for production use.
    """
    _check_mesh(K, mesh, extrapolate)
    fine = _direct_raw(problem, K, mesh)
    if not extrapolate:
        return SpectrumResult(fine, None, mesh)
    coarse = _direct_raw(problem, K, mesh // 2)
    correction = (fine - coarse) / 3.0
    return SpectrumResult(fine + correction, np.abs(correction), mesh)
